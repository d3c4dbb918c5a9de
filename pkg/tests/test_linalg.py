from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from dainf.linalg import (Matrix, homology_at, infeasibility_certificate, kernel_basis, smith_normal_form,
                          solve_linear)
from dainf.rings import CoefficientRing

ZZ = CoefficientRing.parse("zz")
QQ = CoefficientRing.parse("q")
F5 = CoefficientRing.parse("zp:5")
Z3 = CoefficientRing.parse("zloc:3")


def test_ring_descriptors_round_trip():
    for text in ("zz", "q", "zp:5", "zloc:3"):
        assert CoefficientRing.parse(text).descriptor == text


def test_ring_parse_rejects_composite_modulus():
    with pytest.raises(ValueError):
        CoefficientRing.parse("zp:6")


def test_ring_arithmetic():
    assert F5.normalize(7) == 2
    assert F5.normalize(-1) == 4
    assert Z3.normalize(Fraction(1, 2)) == Fraction(1, 2)
    assert Z3.is_unit(2) and not Z3.is_unit(3)
    assert not ZZ.is_unit(2) and ZZ.is_unit(-1)


def test_smith_small_examples():
    S, U, V = smith_normal_form(Matrix.from_rows(ZZ, [[2, 0], [0, 3]]))
    assert S.to_rows() == [[1, 0], [0, 6]]
    S, U, V = smith_normal_form(Matrix.from_rows(ZZ, [[2, 4], [6, 8]]))
    assert S.to_rows() == [[2, 0], [0, 4]]


def test_smith_refuses_fields():
    with pytest.raises(ValueError):
        smith_normal_form(Matrix.from_rows(QQ, [[1]]))


small = st.integers(min_value=-6, max_value=6)


@st.composite
def int_matrices(draw):
    r = draw(st.integers(1, 4))
    c = draw(st.integers(1, 4))
    return [[draw(small) for _ in range(c)] for _ in range(r)]


@settings(max_examples=60, deadline=None)
@given(int_matrices())
def test_smith_decomposition_property(rows):
    M = Matrix.from_rows(ZZ, rows)
    S, U, V = smith_normal_form(M)
    assert U @ M @ V == S
    d = [x for x in S.diagonal() if x != 0]
    assert all(d[i + 1] % d[i] == 0 for i in range(len(d) - 1))
    assert S.nnz() == len(d)


@settings(max_examples=60, deadline=None)
@given(int_matrices(), st.data())
def test_solve_linear_finds_preimages(rows, data):
    M = Matrix.from_rows(ZZ, rows)
    x = [data.draw(small) for _ in range(M.cols)]
    b = M.apply(x)
    sol = solve_linear(M, b)
    assert sol is not None and M.apply(sol) == b
    for k in kernel_basis(M):
        assert all(v == 0 for v in M.apply(k))


def test_solve_linear_depends_on_the_ring():
    assert solve_linear(Matrix.from_rows(ZZ, [[5]]), [1]) is None
    assert solve_linear(Matrix.from_rows(QQ, [[5]]), [1]) == [Fraction(1, 5)]
    # 5 is a unit away from 3
    assert solve_linear(Matrix.from_rows(Z3, [[5]]), [1]) == [Fraction(1, 5)]
    assert solve_linear(Matrix.from_rows(Z3, [[3]]), [1]) is None


def test_infeasibility_certificate():
    cert = infeasibility_certificate(Matrix.from_rows(ZZ, [[5]]), [1])
    assert cert.divisor == 5 and cert.value == 1
    assert infeasibility_certificate(Matrix.from_rows(ZZ, [[5]]), [10]) is None


def test_homology_torsion():
    h = homology_at(Matrix.from_rows(ZZ, [[5]]), Matrix.zeros(ZZ, 0, 1))
    assert h.free_rank == 0 and h.torsion == (5,)
    h = homology_at(Matrix.from_rows(QQ, [[5]]), Matrix.zeros(QQ, 0, 1))
    assert h.is_zero
    h = homology_at(Matrix.zeros(ZZ, 2, 0), Matrix.from_rows(ZZ, [[1, 1]]))
    assert h.free_rank == 1 and not h.torsion


def test_homology_rejects_non_complex():
    with pytest.raises(ValueError, match="composite-not-zero"):
        homology_at(Matrix.from_rows(ZZ, [[1]]), Matrix.from_rows(ZZ, [[1]]))


def test_homology_class_of_boundary_is_zero():
    d_in = Matrix.from_rows(ZZ, [[2], [0]])
    d_out = Matrix.zeros(ZZ, 0, 2)
    h = homology_at(d_in, d_out)
    assert h.free_rank == 1 and h.torsion == (2,)
    assert h.is_boundary([2, 0])
    assert not h.is_boundary([1, 0])
