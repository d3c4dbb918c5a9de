"""Derived A-infinity structures over Z, Z_(p), F_p and Q: exact cochain calculus and checkers."""

from .rings import CoefficientRing
from .bigraded import BigradedModule
from .cochains import MultiCochain, CochainSum, bracket, insert_product, koszul_pairing, sigma, sigma_inv
from .structure import (INSUFFICIENT, REFUTED, VERIFIED, Bidga, MorphismFamily, StructureFamily,
                        check_da_infinity, check_morphism, check_strict_unit, is_e2_equivalence)
from .presentation import parse as parse_presentation, emit as emit_presentation
from .report import emit_report

__all__ = [
    "CoefficientRing", "BigradedModule", "MultiCochain", "CochainSum", "bracket", "insert_product",
    "koszul_pairing", "sigma", "sigma_inv", "INSUFFICIENT", "REFUTED", "VERIFIED", "Bidga",
    "MorphismFamily", "StructureFamily", "check_da_infinity", "check_morphism", "check_strict_unit",
    "is_e2_equivalence", "parse_presentation", "emit_presentation", "emit_report",
]
