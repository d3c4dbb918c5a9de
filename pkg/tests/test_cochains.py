import random

import pytest
from hypothesis import given, settings, strategies as st

from dainf import properties
from dainf.algebras import massey_dga, resolution_bidga, truncated_exterior_dga
from dainf.cochains import (CochainSum, MultiCochain, bracket, brute_force_sign, classical_bracket, compose,
                            composition_sign, koszul_pairing, nonempty_tridegrees, plain_insertion_sum,
                            random_cochain, sigma, sigma_inv)


def test_entries_must_respect_tridegree():
    A = resolution_bidga().module
    with pytest.raises(ValueError):
        MultiCochain.from_names(A, 1, 0, 0, {("a",): {"b": 1}})


def test_pairing_values():
    A = resolution_bidga().module
    mu = MultiCochain.zero(A, 2, 0, 0)
    d = MultiCochain.zero(A, 1, 1, 0)
    ident = MultiCochain.identity(A)
    assert koszul_pairing(mu, mu) == 1
    assert koszul_pairing(d, d) == 1
    assert koszul_pairing(mu, ident) == 0
    assert koszul_pairing(d, mu) == 0


def test_bracket_with_identity_counts_arity_minus_one():
    C = resolution_bidga()
    mu = C.component(0, 2)
    assert bracket(mu, MultiCochain.identity(C.module)) == mu
    ternary = random_cochain(random.Random(2), C.module, 3, 0, -1, density=1.0)
    assert bracket(ternary, MultiCochain.identity(C.module)) == ternary.scale(2)


def test_hash_flips_odd_horizontal_shifts():
    C = resolution_bidga()
    d = C.component(1, 1)
    assert d.hash() == -d
    assert C.component(0, 2).hash() == C.component(0, 2)


def test_structure_squares_to_zero_on_resolution():
    C = resolution_bidga()
    m = C.as_sum()
    assert compose(m, m.hash()).is_zero()
    assert bracket(m, m.hash()).is_zero()


def test_composition_sign_table():
    assert composition_sign(2, 2, 0, 0) == 1
    assert composition_sign(2, 2, 1, 0) == 0
    assert composition_sign(1, 3, 0, 5) == 0


@pytest.mark.parametrize("n,m,v,j", [(2, 2, 0, 0), (2, 2, 1, -1), (3, 2, 1, 1), (2, 3, 0, 2), (4, 1, 3, 1)])
def test_oracle_agrees_on_samples(n, m, v, j):
    assert brute_force_sign(n, m, v, 0, j, 1, 0) == composition_sign(n, m, v, j)


def test_brute_force_rejects_bad_slot():
    with pytest.raises(ValueError):
        brute_force_sign(2, 2, 2, 0, 0, 0, 0)


ALGEBRAS = {"C over zz": resolution_bidga, "massey over zp:5": massey_dga, "exterior over zz": truncated_exterior_dga}


@settings(max_examples=25, deadline=None)
@given(st.sampled_from(sorted(ALGEBRAS)), st.integers(0, 10**6))
def test_identities_hold_on_random_triples(which, seed):
    A = ALGEBRAS[which]().module
    f, g, h = properties.random_triple(random.Random(seed), A, max_arity=3, arity_sum=6)
    for name, ok in properties.check_all(f, g, h).items():
        assert ok is not False, name


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10**6))
def test_sigma_carries_composition_to_plain_insertion(seed):
    rng = random.Random(seed)
    A = resolution_bidga().module
    tris = nonempty_tridegrees(A, 3)
    f = random_cochain(rng, A, *rng.choice(tris))
    g = random_cochain(rng, A, *rng.choice(tris))
    assert sigma_inv(sigma(f), A) == f
    assert sigma(compose(f, g)) == plain_insertion_sum(sigma(f), sigma(g))


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10**6))
def test_classical_bracket_matches_in_horizontal_degree_zero(seed):
    rng = random.Random(seed)
    A = massey_dga(5).module
    tris = [t for t in nonempty_tridegrees(A, 3) if t[1] == 0]
    f = random_cochain(rng, A, *rng.choice(tris))
    g = random_cochain(rng, A, *rng.choice(tris))
    assert bracket(f, g) == classical_bracket(f, g)


def test_cochain_sum_collects_components():
    C = resolution_bidga()
    s = C.as_sum()
    assert isinstance(s, CochainSum)
    assert {c.tridegree for c in s.components()} == {(1, 1, 0), (2, 0, 0)}
    assert (s - s).is_zero()


def test_property_run_reports_counts():
    out = properties.property_run(resolution_bidga().module, trials=5, seed=1, hmax=2, vmax=4)
    assert out["failures"] == []
    assert out["checked"]["jacobi"] == 5
