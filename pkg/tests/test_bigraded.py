import pytest

from dainf.algebras import resolution_bidga
from dainf.bigraded import (BigradedModule, GradedMap, desuspension, evaluate_tensor_map, koszul_parity,
                            shift_module, suspension, tensor_power)
from dainf.rings import CoefficientRing

ZZ = CoefficientRing.parse("zz")


def exterior():
    return BigradedModule(ZZ, [("1", (0, 0)), ("e", (0, -1))], unit="1")


def test_module_rejects_bad_input():
    with pytest.raises(ValueError):
        BigradedModule(ZZ, [("x", (-1, 0))])
    with pytest.raises(ValueError):
        BigradedModule(ZZ, [("x", (0, 0)), ("x", (1, 0))])
    with pytest.raises(ValueError):
        BigradedModule(ZZ, [("u", (0, 1))], unit="u")


def test_tensor_square_of_exterior():
    A = exterior()
    T = tensor_power(A, 2)
    assert T.dim == 4
    assert T.names[T.slot((0, -2))[0]] == "e⊗e"
    assert len(T.slot((0, -1))) == 2


def test_tensor_slot_of_resolution_module():
    A = resolution_bidga().module
    T = tensor_power(A, 2)
    names = {T.names[i] for i in T.slot((1, -2))}
    assert names == {"1⊗ab", "a⊗b", "b⊗a", "ab⊗1"}


def test_normalized_tuples_skip_the_unit():
    A = exterior()
    assert A.all_tuples(2, normalized=True) == [(1, 1)]
    assert A.tuples(2, (0, -1)) == ((0, 1), (1, 0))


def test_koszul_parity():
    assert koszul_parity((1, 0), (1, 0)) == 1
    assert koszul_parity((0, 1), (0, 2)) == 0
    assert koszul_parity((1, 1), (0, 1)) == 1


def test_shift_lowers_vertical_degree():
    A = exterior()
    S = shift_module(A)
    assert S.degrees == ((0, -1), (0, -2))
    assert S.unit is None
    # the unit designation does not survive a nonzero shift
    assert shift_module(S, -1).degrees == A.degrees


def test_suspension_round_trip():
    A = exterior()
    s, d = suspension(A), desuspension(A)
    assert d.compose(s) == GradedMap.identity(A)
    assert s.bidegree == (0, -1) and d.bidegree == (0, 1)


def test_composition_adds_bidegrees():
    A = BigradedModule(ZZ, [("a", (2, 0)), ("b", (1, 1)), ("c", (0, 2))])
    f = GradedMap(A, A, (1, 1), {(0, 1): 2})
    g = GradedMap(A, A, (1, 1), {(1, 2): 3})
    h = g.compose(f)
    assert h.bidegree == (2, 2)
    assert h.entries == {(0, 2): 6}


def test_map_rejects_wrong_bidegree():
    A = exterior()
    with pytest.raises(ValueError):
        GradedMap(A, A, (0, 0), {(0, 1): 1})


def test_tensor_map_koszul_sign():
    # (1 ⊗ d)(e ⊗ e) with d of bidegree (0, 1) passes e: sign -1
    A = exterior()
    d = GradedMap(A, A, (0, 1), {(1, 0): 1})
    ident = GradedMap.identity(A)
    assert evaluate_tensor_map([ident, d], (1, 1)) == {(1, 0): -1}
    assert evaluate_tensor_map([d, ident], (1, 1)) == {(0, 1): 1}
