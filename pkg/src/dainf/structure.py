"""Derived A-infinity structures, morphisms, bidgas, E2 pages, orthogonality.

A structure is a family m_ij in C^{j, 2-i-j}_i; a morphism is a family
f_st in C^{t, 1-s-t}_s.  Checks report per cell (u, v) with the first
offending basis tuple, never a bare boolean.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .bigraded import BigradedModule
from .cochains import (CochainSum, MultiCochain, apply_tensor, bracket, compose, insert)
from .linalg import (Matrix, in_span, preimage_basis, quotient_presentation, column_span_basis, kernel_basis)

VERIFIED = "verified"
REFUTED = "refuted"
INSUFFICIENT = "window-insufficient"

EXIT_CODES = {VERIFIED: 0, REFUTED: 1, INSUFFICIENT: 2}


# --------------------------------------------------------------------------
# arity bounds from weights


def arity_bound(source: BigradedModule, total_degree: int, normalized: bool = True,
                target: BigradedModule | None = None) -> int | None:
    """Largest arity of a nonzero cochain of the given total degree, or None if unbounded.

    An input x contributes 1 + h - v to the total degree and the output y
    contributes v_y - h_y.  If all usable weights share a strict sign the
    arity is bounded.
    """
    target = source if target is None else target
    pool = source.nonunit_indices() if normalized else range(source.dim)
    weights = [source.weight(x) for x in pool]
    if not weights or not target.dim:
        return 0
    taus = [v - h for h, v in target.degrees]
    if min(weights) > 0:
        return max(0, (total_degree - min(taus)) // min(weights))
    if max(weights) < 0:
        return max(0, (max(taus) - total_degree) // (-max(weights)))
    return None


# --------------------------------------------------------------------------
# reports


@dataclass
class CellResult:
    cell: tuple
    ok: bool
    certified: bool = True
    witness: dict | None = None

    def as_dict(self) -> dict:
        d = {"cell": list(self.cell), "ok": self.ok, "certified": self.certified}
        if self.witness is not None:
            d["witness"] = self.witness
        return d


@dataclass
class CheckReport:
    kind: str
    cells: list = field(default_factory=list)
    total: bool = True
    extra: dict = field(default_factory=dict)
    failures: list = field(default_factory=list)  # non-cell failures (unit conditions etc.)

    @property
    def ok(self) -> bool:
        """No refutation: a failing cell outside the window only makes the report insufficient."""
        return not self.failures and all(c.ok or not c.certified for c in self.cells)

    @property
    def status(self) -> str:
        if not self.ok:
            return REFUTED
        if not self.total or not all(c.certified and c.ok for c in self.cells):
            return INSUFFICIENT
        return VERIFIED

    def first_failure(self) -> CellResult | None:
        for c in self.cells:
            if not c.ok:
                return c
        return None

    def as_dict(self) -> dict:
        return {
            "kind": self.kind,
            "status": self.status,
            "total": self.total,
            "cells": [c.as_dict() for c in self.cells],
            "failures": list(self.failures),
            "extra": self.extra,
        }


def entry_witness(c: MultiCochain) -> dict | None:
    """The first nonzero entry of a cochain, by basis names."""
    if c.is_zero():
        return None
    (ins, y), coeff = min(c.entries.items())
    return {
        "tridegree": list(c.tridegree),
        "inputs": [c.source.names[x] for x in ins],
        "output": c.target.names[y],
        "coefficient": c.ring.format(coeff),
    }


def _sum_witness(s) -> dict | None:
    if isinstance(s, MultiCochain):
        return entry_witness(s)
    for c in s.components():
        w = entry_witness(c)
        if w:
            return w
    return None


# --------------------------------------------------------------------------
# structures


class StructureFamily:
    """Operations m_ij of a (derived) A-infinity structure on one module.

    ``arity_max`` is the declared window: components of larger arity are
    unknown.  None declares the family complete.
    """

    def __init__(self, module: BigradedModule, components: dict | None = None, arity_max: int | None = None,
                 name: str | None = None):
        self.module = module
        self.arity_max = arity_max
        self.name = name
        comps = {}
        for (i, j), c in (components or {}).items():
            if c.source != module or c.target != module:
                raise ValueError(f"m_{i}{j} lives on a different module")
            if c.tridegree != (j, i, 2 - i - j):
                raise ValueError(f"m_{i}{j} has tridegree {c.tridegree}, expected {(j, i, 2 - i - j)}")
            if j < 1 or i < 0:
                raise ValueError(f"invalid label ({i},{j})")
            if not c.is_zero():
                comps[(i, j)] = c
        self.components = dict(sorted(comps.items()))

    @property
    def ring(self):
        return self.module.ring

    def __repr__(self):
        return f"StructureFamily({self.name!r}, {sorted(self.components)})"

    def component(self, i: int, j: int) -> MultiCochain:
        c = self.components.get((i, j))
        return c if c is not None else MultiCochain.zero(self.module, j, i, 2 - i - j)

    def labels(self) -> list:
        return sorted(self.components)

    def as_sum(self) -> CochainSum:
        return CochainSum.of(*self.components.values(), source=self.module)

    def even(self) -> CochainSum:
        return CochainSum.of(*[c for (i, _), c in self.components.items() if i % 2 == 0], source=self.module)

    def odd(self) -> CochainSum:
        return CochainSum.of(*[c for (i, _), c in self.components.items() if i % 2 == 1], source=self.module)

    def replace(self, components: dict, name: str | None = None) -> "StructureFamily":
        return StructureFamily(self.module, components, self.arity_max, name or self.name)

    def with_components(self, updates: dict) -> "StructureFamily":
        comps = dict(self.components)
        comps.update(updates)
        return self.replace(comps)

    def __eq__(self, other):
        if not isinstance(other, StructureFamily):
            return NotImplemented
        return self.module == other.module and {k: c.entries for k, c in self.components.items()} == \
            {k: c.entries for k, c in other.components.items()}

    @property
    def is_classical(self) -> bool:
        return all(i == 0 for i, _ in self.components)

    def is_bidga_shaped(self) -> bool:
        return set(self.components) <= {(0, 1), (1, 1), (0, 2)}

    def max_arity(self) -> int:
        return max((j for _, j in self.components), default=0)

    def window(self) -> int | None:
        return self.arity_max

    def is_total(self, total_degree: int = 3, normalized: bool = False) -> bool:
        """True when every cell that can be nonzero lies inside the declared window."""
        if self.arity_max is None:
            return True
        b = arity_bound(self.module, total_degree, normalized)
        return b is not None and b <= self.arity_max


class Bidga(StructureFamily):
    """A structure with m_ij = 0 for i + j >= 3; ∂ = m_11, μ = m_02."""

    def __init__(self, module, components=None, arity_max=None, name=None):
        super().__init__(module, components, arity_max, name)
        if not self.is_bidga_shaped():
            raise ValueError(f"bidga support must lie in (0,1),(1,1),(0,2); got {self.labels()}")

    @property
    def partial(self) -> MultiCochain:
        return self.component(1, 1)

    @property
    def mu(self) -> MultiCochain:
        return self.component(0, 2)

    @property
    def vertical(self) -> MultiCochain:
        return self.component(0, 1)

    @classmethod
    def from_structure(cls, m: StructureFamily) -> "Bidga":
        return cls(m.module, m.components, m.arity_max, m.name)


def structure_equation_terms(m: StructureFamily) -> dict:
    """{(u, v): sum of (-1)^(rq+t+pj) m_ij(1^r ⊗ m_pq ⊗ 1^t)}."""
    cells: dict = {}
    for (i, j), mij in m.components.items():
        for (p, q), mpq in m.components.items():
            for r in range(j):
                t = j - 1 - r
                term = insert(mij, mpq, r)
                if (r * q + t + p * j) & 1:
                    term = -term
                key = (i + p, j + q - 1)
                cells[key] = cells[key] + term if key in cells else term
    return cells


def check_da_infinity(m: StructureFamily, window: dict | None = None) -> CheckReport:
    """Evaluate the structure equation per (u, v) and cross-check m∘m^# and [m,m^#].

    ``window`` may restrict reported cells: {"u_max": .., "v_max": ..}.
    """
    cells = structure_equation_terms(m)
    W = m.arity_max
    report = CheckReport("dA-infinity structure", total=m.is_total(3))
    u_max = (window or {}).get("u_max")
    v_max = (window or {}).get("v_max")
    s = m.as_sum()
    circ = compose(s, s.hash())
    br = bracket(s, s.hash())
    agree_circ = True
    for (u, v) in sorted(cells):
        if (u_max is not None and u > u_max) or (v_max is not None and v > v_max):
            report.total = False
            continue
        c = cells[(u, v)]
        certified = W is None or v <= W
        report.cells.append(CellResult((u, v), c.is_zero(), certified, entry_witness(c)))
        if c != circ.component((v, u, 3 - u - v)):
            agree_circ = False
    circ_zero = circ.is_zero()
    report.extra = {
        "structure_equations_hold": all(c.is_zero() for c in cells.values()),
        "circ_hash_zero": circ_zero,
        "bracket_hash_zero": br.is_zero(),
        "bracket_is_twice_circ": br == circ.scale(2),
        "cellwise_equal_to_circ": agree_circ,
    }
    report.extra["conditions_agree"] = len({report.extra["structure_equations_hold"], circ_zero,
                                            br.is_zero()}) == 1
    return report


def check_classical_relations(m: StructureFamily) -> CheckReport:
    """The classical relation sum (-1)^(rs+t) m_(1+r+t)(1^r ⊗ m_s ⊗ 1^t) = 0 per arity.

    Only for structures concentrated in horizontal degree 0.
    """
    if not m.is_classical:
        raise ValueError("classical relations need horizontal degree 0 operations")
    ops = {j: c for (_, j), c in m.components.items()}
    cells: dict = {}
    for a, ma in ops.items():
        for s, ms in ops.items():
            for r in range(a):
                t = a - 1 - r
                term = insert(ma, ms, r)
                if (r * s + t) & 1:
                    term = -term
                n = a + s - 1
                cells[n] = cells[n] + term if n in cells else term
    report = CheckReport("classical A-infinity relations", total=m.is_total(3))
    for n in sorted(cells):
        c = cells[n]
        report.cells.append(CellResult((n,), c.is_zero(), m.arity_max is None or n <= m.arity_max,
                                       entry_witness(c)))
    return report


def check_strict_unit(m: StructureFamily) -> CheckReport:
    A = m.module
    report = CheckReport("strict unit")
    if A.unit_index is None:
        report.failures.append({"condition": "no unit designated"})
        return report
    e = A.unit_index
    m01 = m.component(0, 1)
    if m01.apply_basis((e,)):
        report.failures.append({"condition": "m01(unit) = 0", "value": _names(A, m01.apply_basis((e,)))})
    m02 = m.component(0, 2)
    for x in range(A.dim):
        for ins in ((e, x), (x, e)):
            got = {y: c for y, c in m02.apply_basis(ins).items()}
            if got != {x: 1}:
                report.failures.append({"condition": "m02 unit law", "inputs": [A.names[i] for i in ins],
                                        "value": _names(A, got)})
    for (i, j), c in m.components.items():
        if i + j < 3:
            continue
        for (ins, y), coeff in sorted(c.entries.items()):
            if e in ins:
                report.failures.append({"condition": f"m{i}{j} vanishes on tuples containing the unit",
                                        "inputs": [A.names[x] for x in ins], "output": A.names[y],
                                        "coefficient": A.ring.format(coeff)})
                break
    return report


def _names(A, vec: dict) -> dict:
    return {A.names[y]: A.ring.format(c) for y, c in sorted(vec.items())}


# --------------------------------------------------------------------------
# morphisms


def epsilon_exponent(u: int, ps, qs, reading: str = "a") -> int:
    """Exponent of the sign in front of m̄_ij(f_{p_1 q_1} ⊗ ... ⊗ f_{p_j q_j}).

    Reading "a": the inner sum runs over p_s + q_s.  Reading "b": it runs
    over p_s only and the trailing q is the last one, q_j.
    """
    j = len(ps)
    p = (None,) + tuple(ps)
    q = (None,) + tuple(qs)
    e = u
    for w in range(1, j):
        e += j * p[w] + w * (q[j - w] - p[w])
        if reading == "a":
            e += q[j - w] * sum(p[s] + q[s] for s in range(j - w + 1, j + 1))
        elif reading == "b":
            e += q[j - w] * (sum(p[s] for s in range(j - w + 1, j + 1)) + q[j])
        else:
            raise ValueError(f"unknown epsilon reading {reading!r}")
    return e


class MorphismFamily:
    """Components f_st : A^{⊗t} -> B of bidegree (s, 1-s-t)."""

    def __init__(self, source: StructureFamily, target: StructureFamily, components: dict | None = None,
                 arity_max: int | None = None, name: str | None = None):
        self.source = source
        self.target = target
        self.arity_max = arity_max
        self.name = name
        comps = {}
        for (s, t), c in (components or {}).items():
            if c.source != source.module or c.target != target.module:
                raise ValueError(f"f_{s}{t} has the wrong modules")
            if c.tridegree != (t, s, 1 - s - t):
                raise ValueError(f"f_{s}{t} has tridegree {c.tridegree}, expected {(t, s, 1 - s - t)}")
            if not c.is_zero():
                comps[(s, t)] = c
        self.components = dict(sorted(comps.items()))

    def component(self, s, t) -> MultiCochain:
        c = self.components.get((s, t))
        return c if c is not None else MultiCochain.zero(self.source.module, t, s, 1 - s - t,
                                                         self.target.module)

    def labels(self):
        return sorted(self.components)

    @classmethod
    def identity(cls, m: StructureFamily, target: StructureFamily | None = None) -> "MorphismFamily":
        return cls(m, target or m, {(0, 1): MultiCochain.identity(m.module)})

    def window(self):
        ws = [w for w in (self.arity_max, self.source.arity_max, self.target.arity_max) if w is not None]
        return min(ws) if ws else None


def morphism_sides(f: MorphismFamily, reading="a") -> tuple[dict, dict]:
    """Both sides of the morphism equation, keyed by (u, v)."""
    m = f.source
    mbar = f.target
    lhs: dict = {}
    for (i, j), fij in f.components.items():
        for (p, q), mpq in m.components.items():
            for r in range(j):
                t = j - 1 - r
                term = insert(fij, mpq, r)
                if (r * q + t + p * j) & 1:
                    term = -term
                key = (i + p, j + q - 1)
                lhs[key] = lhs[key] + term if key in lhs else term
    rhs: dict = {}
    flist = list(f.components.items())
    window = f.window()
    for (i, j), mij in mbar.components.items():
        # choose j components; prune by arity when a window is declared
        def rec(chosen, arity):
            if window is not None and arity + (j - len(chosen)) > window:
                return
            if len(chosen) == j:
                ps = [lab[0] for lab, _ in chosen]
                qs = [lab[1] for lab, _ in chosen]
                u = i + sum(ps)
                v = sum(qs)
                eps = reading(u, ps, qs) if callable(reading) else epsilon_exponent(u, ps, qs, reading)
                term = apply_tensor(mij, [c for _, c in chosen])
                if eps & 1:
                    term = -term
                key = (u, v)
                rhs[key] = rhs[key] + term if key in rhs else term
                return
            for lab, c in flist:
                rec(chosen + [(lab, c)], arity + lab[1])

        rec([], 0)
    return lhs, rhs


def check_morphism(f: MorphismFamily, reading="a") -> CheckReport:
    lhs, rhs = morphism_sides(f, reading)
    A, B = f.source.module, f.target.module
    W = f.window()
    report = CheckReport("dA-infinity morphism")
    for key in sorted(set(lhs) | set(rhs)):
        u, v = key
        zero = MultiCochain.zero(A, v, u, 2 - u - v, B)
        diff = lhs.get(key, zero) - rhs.get(key, zero)
        report.cells.append(CellResult(key, diff.is_zero(), W is None or v <= W, entry_witness(diff)))
    if W is not None:
        b = arity_bound(A, 2, False, B)
        report.total = b is not None and b <= W
    # unit conditions
    if A.unit_index is not None and B.unit_index is not None:
        e, eb = A.unit_index, B.unit_index
        if f.component(0, 1).apply_basis((e,)) != {eb: 1}:
            report.failures.append({"condition": "f01(unit) = unit"})
        for (s, t), c in f.components.items():
            if s + t >= 2 and any(e in ins for ins, _ in c.entries):
                report.failures.append({"condition": f"f{s}{t} vanishes on tuples containing the unit"})
    return report


# --------------------------------------------------------------------------
# orthogonality


def is_orthogonal(m: StructureFamily) -> CheckReport:
    """m_even∘m_even = 0, cross-checked against m_odd∘m_odd = 0."""
    e, o = m.even(), m.odd()
    ee = compose(e, e)
    oo = compose(o, o)
    report = CheckReport("orthogonality", total=m.is_total(3))
    for comp in ee.components():
        report.cells.append(CellResult((comp.hshift, comp.arity), False, True, entry_witness(comp)))
    report.extra = {
        "even_even_zero": ee.is_zero(),
        "odd_odd_zero": oo.is_zero(),
        "even_even_equals_odd_odd": ee == oo,
        "even_odd_equals_odd_even": compose(e, o) == compose(o, e),
    }
    if ee.is_zero() != oo.is_zero():
        report.failures.append({"condition": "m_even∘m_even = 0 and m_odd∘m_odd = 0 disagree"})
    return report


# --------------------------------------------------------------------------
# E2 pages


def _slot_matrix(c: MultiCochain, src_slot, tgt_slot) -> Matrix:
    A, B = c.source, c.target
    src = A.slot(src_slot)
    tgt = B.slot(tgt_slot)
    ps = {x: j for j, x in enumerate(src)}
    pt = {y: i for i, y in enumerate(tgt)}
    ent = {}
    for ((x,), y), coeff in c.entries.items():
        if x in ps and y in pt:
            ent[(pt[y], ps[x])] = coeff
    return Matrix(B.ring, len(tgt), len(src), ent)


@dataclass
class E2Slot:
    bidegree: tuple
    vertical: object  # HomologyPresentation of H_ver
    page: object  # HomologyPresentation of E2
    cycles: list  # lattice basis L1 (vectors in slot coordinates)
    boundaries: list  # generators of L2
    basis: tuple  # module indices of the slot


def e2_pages(m: StructureFamily) -> dict:
    """Per bidegree: vertical homology (m01) then horizontal homology (m11) of it."""
    A = m.module
    ring = A.ring
    m01 = m.component(0, 1)
    m11 = m.component(1, 1)
    if not compose(m01, m01).is_zero():
        raise ValueError("m01 does not square to zero")
    slots = set(A.support())
    ver: dict = {}

    def vert(bd):
        if bd in ver:
            return ver[bd]
        h, v = bd
        n = len(A.slot(bd))
        d_out = _slot_matrix(m01, bd, (h, v + 1))
        d_in = _slot_matrix(m01, (h, v - 1), bd)
        Z = kernel_basis(d_out) if n else []
        B = [c for c in d_in.columns() if any(x != 0 for x in c)]
        ver[bd] = (Z, B, n)
        return ver[bd]

    out = {}
    for bd in sorted(slots):
        h, v = bd
        Z, B, n = vert(bd)
        if h > 0:
            Zl, Bl, nl = vert((h - 1, v))
            d = _slot_matrix(m11, bd, (h - 1, v))
            L1 = preimage_basis(ring, d, Z, Bl) if nl else column_span_basis(ring, Z, n)
        else:
            L1 = column_span_basis(ring, Z, n)
        L2 = list(B)
        if (h + 1, v) in slots:
            Zu, _, _ = vert((h + 1, v))
            d_up = _slot_matrix(m11, (h + 1, v), bd)
            L2 += [d_up.apply(z) for z in Zu]
        L2 = [g for g in L2 if any(x != 0 for x in g)]
        page = quotient_presentation(ring, L1, L2, n)
        vpres = quotient_presentation(ring, column_span_basis(ring, Z, n), B, n)
        out[bd] = E2Slot(bd, vpres, page, L1, L2, A.slot(bd))
    return out


@dataclass
class E2Decision:
    is_equivalence: bool
    per_slot: dict  # bidegree -> {"injective", "surjective", "matrix"}
    witness: dict | None = None

    def as_dict(self):
        return {"is_equivalence": self.is_equivalence, "witness": self.witness,
                "slots": {f"{k[0]},{k[1]}": v for k, v in sorted(self.per_slot.items())}}


def is_e2_equivalence(f: MorphismFamily) -> E2Decision:
    """Decide whether H_hor(H_ver(f01)) is an isomorphism, slot by slot."""
    A, B = f.source.module, f.target.module
    ring = B.ring
    PA = e2_pages(f.source)
    PB = e2_pages(f.target)
    f01 = f.component(0, 1)
    per = {}
    witness = None
    for bd in sorted(set(PA) | set(PB)):
        sa, sb = PA.get(bd), PB.get(bd)
        na = len(A.slot(bd))
        nb = len(B.slot(bd))
        phi = _slot_matrix(f01, bd, bd)
        L1a = sa.cycles if sa else []
        L2a = sa.boundaries if sa else []
        L1b = sb.cycles if sb else []
        L2b = sb.boundaries if sb else []
        images = [phi.apply(x) for x in L1a] if na else []
        surj = all(in_span(ring, images + L2b, y, nb) is not None for y in L1b)
        pre = preimage_basis(ring, phi, L1a, L2b) if na else []
        inj = all(in_span(ring, L2a, x, na) is not None for x in pre)
        matrix = []
        if sa and sb:
            for g in sa.page.generators:
                cls = sb.page.class_of(phi.apply(g))
                matrix.append([ring.format(c) for c in cls] if cls is not None else None)
        per[bd] = {"injective": inj, "surjective": surj, "matrix": matrix,
                   "source": sa.page.summary() if sa else None, "target": sb.page.summary() if sb else None}
        if witness is None and not (inj and surj):
            witness = {"bidegree": list(bd), "injective": inj, "surjective": surj}
    return E2Decision(witness is None, per, witness)
