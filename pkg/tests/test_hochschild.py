import random

import pytest
from hypothesis import given, settings, strategies as st

from dainf.algebras import MonomialAlgebra, build_structure, massey_dga, resolution_bidga
from dainf.catalog import load
from dainf.cochains import CochainSum, nonempty_tridegrees, random_cochain
from dainf.hochschild import (Bimodule, HochschildComplex, bimodule_differential, differential_D,
                              explicit_m2_differential, filtration_membership, horizontal_differential)
from dainf.rings import CoefficientRing


def dual_numbers(ring="q"):
    alg = MonomialAlgebra(CoefficientRing.parse(ring), [("x", (0, -2))], max_exponents={"x": 1})
    return build_structure(alg, name="dual")


def nonzero_cells(cx, arities, internal):
    out = {}
    for n in arities:
        for i in internal:
            res = cx.cohomology((n, i))
            if not res.presentation.is_zero:
                out[(n, i)] = (res.free_rank, tuple(res.torsion))
    return out


def test_dual_numbers_over_rationals():
    # k[x]/(x^2), x even: one class in every arity, x...x -> 1 in even and x...x -> x in odd arity
    cx = HochschildComplex(dual_numbers("q"), "alg")
    got = nonzero_cells(cx, range(0, 6), range(-4, 14))
    assert got == {(0, -2): (1, ()), (0, 0): (1, ()), (1, 0): (1, ()), (2, 4): (1, ()), (3, 4): (1, ()),
                   (4, 8): (1, ()), (5, 8): (1, ())}


def test_dual_numbers_over_integers_has_two_torsion():
    cx = HochschildComplex(dual_numbers("zz"), "alg")
    res = cx.cohomology((2, 2))
    assert res.free_rank == 0 and res.torsion == (2,)
    assert HochschildComplex(dual_numbers("q"), "alg").cohomology((2, 2)).presentation.is_zero


def test_flavor_requirements():
    C = resolution_bidga()
    with pytest.raises(ValueError):
        HochschildComplex(C, "classical")
    with pytest.raises(ValueError):
        HochschildComplex(load("derived_gauge.dai").structure("G"), "orthogonal")
    with pytest.raises(ValueError):
        HochschildComplex(massey_dga(5), "bidga")
    with pytest.raises(ValueError):
        HochschildComplex(C, "nonsense")


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10**6))
def test_D_squares_to_zero_on_resolution(seed):
    rng = random.Random(seed)
    C = resolution_bidga()
    f = random_cochain(rng, C.module, *rng.choice(nonempty_tridegrees(C.module, 3)))
    assert differential_D(C, differential_D(C, f)).is_zero()


def test_regular_bimodule_agrees_with_D():
    rng = random.Random(1)
    C = resolution_bidga()
    reg = Bimodule.regular(C)
    assert reg.check_axioms() == []
    for tri in nonempty_tridegrees(C.module, 3):
        f = random_cochain(rng, C.module, *tri)
        assert differential_D(C, f) == bimodule_differential(C, reg, f)


def test_explicit_m2_differential_matches_bracket():
    rng = random.Random(3)
    M = massey_dga(5)
    mu = M.component(0, 2)
    for tri in nonempty_tridegrees(M.module, 3):
        if tri[1]:
            continue
        f = random_cochain(rng, M.module, *tri)
        assert CochainSum.of(explicit_m2_differential(mu, f)) == horizontal_differential(M, f) + CochainSum(M.module)


def test_matrices_compose_to_zero():
    cx = HochschildComplex(resolution_bidga(), "bidga")
    for s in range(0, 3):
        for r in range(-4, 3):
            assert cx.square_zero((s, r))


def test_cohomology_of_exterior_is_torsion():
    cx = HochschildComplex(load("exterior.dai").structure(), "classical")
    assert cx.bigraded is False
    for d in (-3, -1, 1, 3):
        assert cx.cohomology(d).presentation.is_zero


def test_filtration_of_top_class():
    cx = HochschildComplex(dual_numbers("q"), "alg")
    res = cx.cohomology((2, 4))
    rep = res.representatives[0]
    assert filtration_membership(cx, (2, 4), rep, 2).member
    assert not filtration_membership(cx, (2, 4), rep, 3).member
