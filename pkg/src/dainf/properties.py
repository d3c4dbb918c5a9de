"""Identities of the composition product and bracket, checked exactly on given or random cochains."""

from __future__ import annotations

import random

from .bigraded import BigradedModule
from .cochains import (MultiCochain, bracket, classical_bracket, compose, koszul_pairing,
                       nonempty_tridegrees, random_cochain)


def _sgn(e: int) -> int:
    return -1 if e & 1 else 1


def antisymmetry(f: MultiCochain, g: MultiCochain) -> bool:
    """[g,f] = -(-1)^<f,g> [f,g]."""
    return bracket(g, f) == bracket(f, g).scale(-_sgn(koszul_pairing(f, g)))


def jacobi(f: MultiCochain, g: MultiCochain, h: MultiCochain) -> bool:
    t1 = bracket(bracket(f, g), h).scale(_sgn(koszul_pairing(f, h)))
    t2 = bracket(bracket(g, h), f).scale(_sgn(koszul_pairing(g, f)))
    t3 = bracket(bracket(h, f), g).scale(_sgn(koszul_pairing(h, g)))
    return (t1 + t2 + t3).is_zero()


def pre_lie(f: MultiCochain, g: MultiCochain, h: MultiCochain) -> bool:
    """(h∘f)∘g - (-1)^<f,g> (h∘g)∘f = h∘(f∘g) - (-1)^<f,g> h∘(g∘f)."""
    s = _sgn(koszul_pairing(f, g))
    lhs = compose(compose(h, f), g) - compose(compose(h, g), f).scale(s)
    rhs = compose(h, compose(f, g)) - compose(h, compose(g, f)).scale(s)
    return lhs == rhs


def pairing_additivity(f: MultiCochain, g: MultiCochain, h: MultiCochain) -> bool:
    fg = compose(f, g)
    return koszul_pairing(fg, h) == (koszul_pairing(f, h) + koszul_pairing(g, h)) & 1


def hash_compatibility(f: MultiCochain, g: MultiCochain) -> bool:
    return (f.hash().hash() == f
            and compose(f, g).hash() == compose(f.hash(), g.hash())
            and bracket(f, g).hash() == bracket(f.hash(), g.hash()))


def classical_specialization(f: MultiCochain, g: MultiCochain) -> bool | None:
    """In horizontal degree 0 the bracket agrees with the classical one; None when not applicable."""
    if f.hshift or g.hshift or any(h for h, _ in f.source.degrees):
        return None
    return bracket(f, g) == classical_bracket(f, g)


IDENTITIES = ("antisymmetry", "jacobi", "pre_lie", "pairing_additivity", "hash", "classical")


def check_all(f, g, h) -> dict:
    return {
        "antisymmetry": antisymmetry(f, g),
        "jacobi": jacobi(f, g, h),
        "pre_lie": pre_lie(f, g, h),
        "pairing_additivity": pairing_additivity(f, g, h),
        "hash": hash_compatibility(f, g),
        "classical": classical_specialization(f, g),
    }


def random_triple(rng: random.Random, A: BigradedModule, max_arity: int = 4, hmax: int = 4, vmax: int = 6,
                  arity_sum: int = 7):
    """Three random cochains with |vertical shift| <= vmax, 0 <= horizontal shift <= hmax.

    ``arity_sum`` caps the combined arity so triple compositions stay small.
    """
    tris = [t for t in nonempty_tridegrees(A, max_arity)
            if 0 <= t[1] <= hmax and abs(t[2]) <= vmax]
    if not tris:
        raise ValueError("no cochains in the requested window")
    while True:
        picks = [rng.choice(tris) for _ in range(3)]
        if sum(t[0] for t in picks) <= arity_sum:
            break
    return tuple(random_cochain(rng, A, *t, density=0.5) for t in picks)


def property_run(A: BigradedModule, trials: int, seed: int, **window) -> dict:
    """Check every identity on ``trials`` random triples; failures are reported with their tridegrees."""
    rng = random.Random(seed)
    counts = {k: 0 for k in IDENTITIES}
    failures = []
    for t in range(trials):
        f, g, h = random_triple(rng, A, **window)
        for name, ok in check_all(f, g, h).items():
            if ok is None:
                continue
            counts[name] += 1
            if not ok:
                failures.append({"trial": t, "identity": name,
                                 "tridegrees": [list(x.tridegree) for x in (f, g, h)]})
    return {"trials": trials, "seed": seed, "checked": counts, "failures": failures}
