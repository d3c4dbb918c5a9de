import json
import random

import pytest
from hypothesis import given, settings, strategies as st

from dainf import deformation as dfm
from dainf.algebras import acyclic_pair_bidga, resolution_bidga
from dainf.catalog import load
from dainf.cochains import random_cochain
from dainf.hochschild import differential_D
from dainf.structure import INSUFFICIENT, REFUTED, VERIFIED, check_da_infinity, check_morphism, is_orthogonal


def gauge_on_B(seed):
    """Push B forward along a random id + f03 + f12 + f21."""
    B = acyclic_pair_bidga()
    rng = random.Random(seed)
    fh = {}
    for lab, tri in (((0, 3), (3, 0, -2)), ((1, 2), (2, 1, -2)), ((2, 1), (1, 2, -2))):
        c = random_cochain(rng, B.module, *tri, density=0.3, normalized=True, coeff_range=2)
        if not c.is_zero():
            fh[lab] = c
    return dfm.pushforward(B, fh)


def test_twisting_cochain_rejects_base_labels():
    C = resolution_bidga()
    with pytest.raises(ValueError):
        dfm.TwistingCochain(C, {(0, 2): C.component(0, 2)})


def test_pushforward_gives_a_morphism():
    mbar, f = gauge_on_B(0)
    assert check_da_infinity(mbar).status == VERIFIED
    assert check_morphism(f).status == VERIFIED


def test_perturb_classical_case_on_local_sphere():
    pres = load("local_sphere_m4.dai")
    m = pres.structure()
    a = dfm.TwistingCochain.split(m, dfm.base_labels_for("classical"))
    step = dfm.perturb(a, pres.cochain("p"), "classical")
    assert step.status == VERIFIED
    assert step.claims["lemma_formula"] and "opposite_sign" not in step.claims
    assert step.changed == (0, 3)
    assert step.after.structure() == load("local_sphere_m4_perturbed.dai").structure()


def test_side_condition_is_enforced():
    # a coupled step has both [m11, b] and [m02, b] nonzero, so neither lemma case applies
    mbar = load("derived_gauge.dai").structure()
    cert = dfm.trivialize(mbar, "derived")
    coupled = [s for s in cert.steps if s.case == "coupled"]
    assert coupled
    step = coupled[0]
    for case in ("A", "B"):
        with pytest.raises(dfm.SideConditionError):
            dfm.perturb(step.before, step.b, case)


def test_unknown_case_and_theorem():
    C = resolution_bidga()
    a = dfm.TwistingCochain.split(C)
    with pytest.raises(ValueError):
        dfm.perturb(a, random_cochain(random.Random(0), C.module, 2, 0, -1), "Z")
    with pytest.raises(ValueError):
        dfm.base_labels_for("other")


@pytest.mark.parametrize("seed", [0, 1, 2, 3, 4, 5])
def test_gauge_trivial_structures_trivialize(seed):
    mbar, _ = gauge_on_B(seed)
    cert = dfm.trivialize(mbar, "derived")
    assert cert.status == VERIFIED
    assert cert.final.is_zero()
    assert dfm.replay(mbar, cert).status == VERIFIED


def test_lowest_operation_need_not_be_closed():
    # the gauge seed with a nonzero m13 and m22: D(a13) != 0 yet the structure is trivial
    mbar = load("derived_gauge.dai").structure()
    a = dfm.TwistingCochain.split(mbar, dfm.base_labels_for("derived"))
    base = a.base
    assert is_orthogonal(base).ok
    low = a.component(1, 3)
    assert not low.is_zero()
    assert not differential_D(base, low).is_zero()
    cert = dfm.trivialize(mbar, "derived")
    assert cert.status == VERIFIED
    assert "coupled" in {s.case for s in cert.steps}


def test_torsion_obstruction_is_refuted():
    m = load("resolution_twisted.dai").structure()
    cert = dfm.trivialize(m, "derived")
    assert cert.status == REFUTED
    assert cert.failure["divisor"] == "5"
    assert cert.failure["label"] == [2, 2]


def test_certificate_round_trips_through_json():
    mbar = load("local_sphere_m4_perturbed.dai").structure()
    cert = dfm.trivialize(mbar, "classical")
    data = json.loads(json.dumps(cert.as_dict()))
    back = dfm.certificate_from_dict(mbar, data)
    assert dfm.replay(mbar, back).status == VERIFIED


def test_tampered_certificate_fails_replay():
    mbar = load("local_sphere_m4_perturbed.dai").structure()
    data = json.loads(json.dumps(dfm.trivialize(mbar, "classical").as_dict()))
    rec = data["steps"][0]["b"][0]
    rec["coefficient"] = str(int(rec["coefficient"]) + 1)
    back = dfm.certificate_from_dict(mbar, data)
    assert dfm.replay(mbar, back).status == REFUTED


def test_massey_fixed_trivialization():
    m = load("minimal_perturbed.dai").structure()
    cert = dfm.trivialize(m, "massey-fixed")
    assert cert.status == VERIFIED
    assert cert.final.is_zero()


def test_preconditions():
    with pytest.raises(ValueError):
        dfm.trivialize(load("massey.dai").structure(), "derived")
    with pytest.raises(ValueError):
        dfm.trivialize(resolution_bidga(), "classical")


def test_extension_of_resolution():
    pres = load("resolution.dai")
    C, A, f = pres.structure("C"), pres.structure("A"), pres.morphism("f")
    res = dfm.extend_structure(C, A, f.component(0, 1), 4)
    assert res.status == VERIFIED
    assert res.assignment["m22(a⊗a)->b"] == "-1"
    assert res.congruences == [{"unknown": "m22(a⊗a)->b", "value": "4", "modulus": "5"}]
    assert check_morphism(res.morphism).ok and check_da_infinity(res.structure).ok


@settings(max_examples=10, deadline=None)
@given(st.integers(0, 10**6))
def test_maurer_cartan_routes_agree(seed):
    mbar, _ = gauge_on_B(seed)
    a = dfm.TwistingCochain.split(mbar, dfm.base_labels_for("derived"))
    rep = dfm.check_maurer_cartan(a)
    assert rep.status in (VERIFIED, INSUFFICIENT)
    assert rep.extra["formula"] == "derived" and rep.extra["formula_holds"]
    assert rep.extra["routes_agree"]
    # a random twisting cochain on B breaks both routes at once
    B = acyclic_pair_bidga()
    bad = random_cochain(random.Random(seed), B.module, 3, 1, -2, density=0.5)
    if not bad.is_zero():
        rep = dfm.check_maurer_cartan(dfm.TwistingCochain(dfm.TwistingCochain.split(B).base, {(1, 3): bad}))
        assert rep.extra["routes_agree"]
        assert rep.extra["formula_holds"] == rep.extra["structure_equations_hold"]
