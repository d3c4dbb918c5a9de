import pytest

from dainf.algebras import local_sphere_dga, massey_dga, truncated_exterior_dga
from dainf.massey import (MasseyUndefined, choice_independent, f1_is_quasi_isomorphism, homology_algebra,
                          m3_membership, massey_triple, scalar_class, transfer_minimal_model)
from dainf.structure import VERIFIED, check_classical_relations, check_da_infinity


def test_homology_of_massey_example():
    H = homology_algebra(massey_dga(5))
    assert H.generator_names() == ["[1]", "[x]", "[xy]", "[x^2y]"]
    s = H.summary()
    assert s["well_defined"]
    assert s["products"]["[x]*[xy]"] == "[x^2y]"
    # xy·x = -x·xy under the sign twist (x, y) -> -1: 4 = -1 mod 5
    assert s["products"]["[xy]*[x]"] == "4[x^2y]"


def test_homology_of_exterior_is_torsion():
    H = homology_algebra(truncated_exterior_dga(5))
    orders = {c["name"]: c["order"] for c in H.summary()["classes"]}
    assert orders == {"[1]": "5", "[e^2]": "5"}


def test_massey_xxx():
    H = homology_algebra(massey_dga(5))
    mp = massey_triple(H, "[x]", "[x]", "[x]")
    assert mp.as_dict()["value"] == "2[xy]"
    assert mp.zero_indeterminacy
    assert choice_independent(H, "[x]", "[x]", "[x]", trials=20, seed=3)


def test_massey_needs_vanishing_products():
    H = homology_algebra(massey_dga(5))
    with pytest.raises(MasseyUndefined):
        massey_triple(H, "[x]", "[xy]", "[x]")


def test_massey_with_scalar_middle_entry():
    H = homology_algebra(local_sphere_dga(3, 3))
    p = scalar_class(H, 3)
    assert H.format_class(p) == "3[1]"
    mp = massey_triple(H, "[e]", p, "[e]")
    assert mp.contains(H.generator("[xe]"))
    assert mp.zero_indeterminacy
    assert choice_independent(H, "[e]", p, "[e]", trials=20, seed=0)


def test_transfer_gives_a_minimal_model():
    model = transfer_minimal_model(massey_dga(5), 6)
    assert model.checks["m1_zero"]
    assert check_classical_relations(model.structure).status == VERIFIED
    assert check_da_infinity(model.structure).status == VERIFIED
    assert f1_is_quasi_isomorphism(model.H, model.morphism.component(0, 1))
    assert model.structure.labels() == [(0, 2), (0, 3)]


def test_m3_against_the_massey_product():
    model = transfer_minimal_model(massey_dga(5))
    out = m3_membership(model, "[x]", "[x]", "[x]")
    assert out["m3"] == "2[xy]"
    assert out["signed_m3"] == "3[xy]"
    assert out["member"] is False and out["member_with_opposite_sign"] is True


def test_homology_algebra_needs_a_dga():
    from dainf.algebras import resolution_bidga
    with pytest.raises(ValueError):
        homology_algebra(resolution_bidga())
