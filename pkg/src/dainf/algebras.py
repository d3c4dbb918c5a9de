"""Builders for small algebras given by generators, commutation signs and monomial relations.

Monomials are exponent vectors over an ordered list of generators.  Two
generators g < h commute up to a sign: h g = eps(g, h) g h.  By default
eps is the Koszul sign of the bidegrees.  Relations are a monomial ideal
(given by its generators) plus exponent caps; an odd generator without
an explicit cap squares to zero.

Differentials are given on generators and extended as (signed)
derivations; whether the result is well defined is left to the
structure checker.
"""

from __future__ import annotations

from itertools import product as iproduct

from .bigraded import BigradedModule, koszul_parity
from .cochains import MultiCochain
from .rings import CoefficientRing
from .structure import Bidga, StructureFamily


class MonomialAlgebra:
    def __init__(self, ring: CoefficientRing, generators, max_exponents=None, forbidden=(), signs=None):
        self.ring = ring
        self.gens = [(str(n), (int(d[0]), int(d[1]))) for n, d in generators]
        self.names = [n for n, _ in self.gens]
        r = len(self.gens)
        self.signs = {}
        for a in range(r):
            for b in range(a + 1, r):
                self.signs[(a, b)] = -1 if koszul_parity(self.gens[a][1], self.gens[b][1]) else 1
        for (ga, gb), s in (signs or {}).items():
            a, b = self.names.index(ga), self.names.index(gb)
            if a > b:
                a, b = b, a
            self.signs[(a, b)] = s
        caps = []
        for a, (n, d) in enumerate(self.gens):
            cap = (max_exponents or {}).get(n)
            if cap is None:
                # an odd generator squares to minus itself, so its square vanishes
                if not koszul_parity(d, d):
                    raise ValueError(f"generator {n} needs a maximal exponent")
                cap = 1
            caps.append(cap)
        self.caps = caps
        self.forbidden = [tuple(self._exps(f)) for f in forbidden]
        monos = [e for e in iproduct(*[range(c + 1) for c in caps]) if self._alive(e)]
        monos.sort(key=lambda e: (sum(e), tuple(-x for x in e)))
        self.monomials = monos
        self.index = {e: i for i, e in enumerate(monos)}

    def _exps(self, spec) -> list:
        if isinstance(spec, dict):
            return [spec.get(n, 0) for n in self.names]
        return list(spec)

    def _alive(self, e) -> bool:
        if any(x > c for x, c in zip(e, self.caps)):
            return False
        return not any(all(x >= f for x, f in zip(e, fb)) for fb in self.forbidden)

    def degree(self, e) -> tuple:
        h = sum(x * d[0] for x, (_, d) in zip(e, self.gens))
        v = sum(x * d[1] for x, (_, d) in zip(e, self.gens))
        return (h, v)

    def name(self, e) -> str:
        parts = []
        for x, n in zip(e, self.names):
            if x == 1:
                parts.append(n)
            elif x > 1:
                parts.append(f"{n}^{x}")
        return "".join(parts) if parts else "1"

    def module(self) -> BigradedModule:
        return BigradedModule(self.ring, [(self.name(e), self.degree(e)) for e in self.monomials], unit="1")

    def word(self, e) -> list:
        return [a for a, x in enumerate(e) for _ in range(x)]

    def multiply_words(self, w) -> tuple:
        """Sort a word of generator indices into canonical order: (sign, exponents) or (0, None)."""
        w = list(w)
        sign = 1
        # bubble sort keeps track of every transposition
        for i in range(len(w)):
            for j in range(len(w) - 1 - i):
                a, b = w[j], w[j + 1]
                if a > b:
                    sign *= self.signs[(b, a)]
                    w[j], w[j + 1] = b, a
        e = [0] * len(self.gens)
        for a in w:
            e[a] += 1
        e = tuple(e)
        if e not in self.index:
            return 0, None
        return sign, e

    def mu(self, M: BigradedModule) -> MultiCochain:
        entries = {}
        for a in self.monomials:
            for b in self.monomials:
                s, e = self.multiply_words(self.word(a) + self.word(b))
                if s:
                    entries[((self.index[a], self.index[b]), self.index[e])] = s
        return MultiCochain(M, 2, 0, 0, entries)

    def derivation(self, M: BigradedModule, bidegree, on_generators: dict) -> MultiCochain:
        """Extend d on generators by d(w) = sum ± g_1..d(g_r)..g_l with Koszul signs."""
        s_, t_ = bidegree
        ring = self.ring
        gen_vals = {}
        for g, val in on_generators.items():
            a = self.names.index(g)
            vec = {}
            for mono, c in val.items():
                e = tuple(self._exps(self._parse_mono(mono)))
                if e not in self.index:
                    raise ValueError(f"{mono} is not a basis monomial")
                vec[e] = ring.coerce(c)
            gen_vals[a] = vec
        entries = {}
        for e in self.monomials:
            w = self.word(e)
            acc = {}
            for pos, g in enumerate(w):
                if g not in gen_vals:
                    continue
                prefix = w[:pos]
                ph = sum(self.gens[x][1][0] for x in prefix)
                pv = sum(self.gens[x][1][1] for x in prefix)
                sgn = -1 if (s_ * ph + t_ * pv) & 1 else 1
                for mono, c in gen_vals[g].items():
                    s2, e2 = self.multiply_words(prefix + self.word(mono) + w[pos + 1:])
                    if s2:
                        acc[e2] = acc.get(e2, 0) + sgn * s2 * c
            for e2, c in acc.items():
                c = ring.normalize(c)
                if c:
                    entries[((self.index[e],), self.index[e2])] = c
        return MultiCochain(M, 1, s_, t_, entries)

    def _parse_mono(self, text: str) -> dict:
        """'x^2y' -> {x: 2, y: 1}; '1' -> {}."""
        if text == "1":
            return {}
        out = {}
        i = 0
        names = sorted(self.names, key=len, reverse=True)
        while i < len(text):
            for n in names:
                if text.startswith(n, i):
                    i += len(n)
                    exp = 1
                    if i < len(text) and text[i] == "^":
                        j = i + 1
                        while j < len(text) and text[j].isdigit():
                            j += 1
                        exp = int(text[i + 1:j])
                        i = j
                    out[n] = out.get(n, 0) + exp
                    break
            else:
                raise ValueError(f"cannot parse monomial {text!r}")
        return out


def build_structure(alg: MonomialAlgebra, vertical: dict | None = None, horizontal: dict | None = None,
                    name: str | None = None) -> StructureFamily:
    """m01 from ``vertical``, m11 from ``horizontal``, m02 the product; a Bidga when it fits."""
    M = alg.module()
    comps = {(0, 2): alg.mu(M)}
    if vertical:
        comps[(0, 1)] = alg.derivation(M, (0, 1), vertical)
    if horizontal:
        comps[(1, 1)] = alg.derivation(M, (1, 0), horizontal)
    return Bidga(M, comps, name=name)


# --------------------------------------------------------------------------
# worked examples


def truncated_exterior_dga(p: int = 5) -> StructureFamily:
    """Z[e]/(e^4), |e| = -1, ∂e = p."""
    R = CoefficientRing.parse("zz")
    alg = MonomialAlgebra(R, [("e", (0, -1))], max_exponents={"e": 3})
    return build_structure(alg, vertical={"e": {"1": p}}, name="Z[e]/(e^4)")


def resolution_bidga(p: int = 5) -> StructureFamily:
    """Z<a,b>/(a^2, b^2, ab-ba), |a| = (1,0), |b| = (0,-2), m11(a) = p."""
    R = CoefficientRing.parse("zz")
    alg = MonomialAlgebra(R, [("a", (1, 0)), ("b", (0, -2))], max_exponents={"a": 1, "b": 1})
    return build_structure(alg, horizontal={"a": {"1": p}}, name="C")


def massey_dga(p: int = 5) -> StructureFamily:
    """k<x,y>/(x^3, y^2, xy = -yx), |x| = 2, |y| = 3, ∂y = x^2 over F_p."""
    R = CoefficientRing.parse(f"zp:{p}")
    alg = MonomialAlgebra(R, [("x", (0, 2)), ("y", (0, 3))], max_exponents={"x": 2, "y": 1},
                          signs={("x", "y"): -1})
    return build_structure(alg, vertical={"y": {"x^2": 1}}, name="massey")


def local_sphere_dga(p: int = 3, m: int = 2) -> StructureFamily:
    """Z_(p)[x] ⊗ Λ(e) / (x^m, x^(m-1) e), ∂x = p e, |e| = -(2p-3), |x| = -(2p-2)."""
    R = CoefficientRing.parse(f"zloc:{p}")
    alg = MonomialAlgebra(R, [("x", (0, -(2 * p - 2))), ("e", (0, -(2 * p - 3)))],
                          max_exponents={"x": m - 1, "e": 1}, forbidden=[{"x": m - 1, "e": 1}])
    return build_structure(alg, vertical={"x": {"e": p}}, name=f"local-sphere p={p} m={m}")


def acyclic_pair_bidga(p: int = 5) -> StructureFamily:
    """The bidga C of ``resolution_bidga`` tensored with the acyclic Z<s, c>/(s^2, c^2, sc), m11(s) = c."""
    R = CoefficientRing.parse("zz")
    alg = MonomialAlgebra(R, [("a", (1, 0)), ("b", (0, -2)), ("s", (1, -2)), ("c", (0, -2))],
                          max_exponents={"a": 1, "b": 1, "s": 1, "c": 1}, forbidden=[{"s": 1, "c": 1}])
    return build_structure(alg, horizontal={"a": {"1": p}, "s": {"c": 1}}, name="B")


def collapse_morphism(B: StructureFamily, C: StructureFamily):
    """Strict map B -> C killing every monomial that contains s or c."""
    from .structure import MorphismFamily
    entries = {}
    for x, n in enumerate(B.module.names):
        if "s" not in n and "c" not in n:
            entries[((x,), C.module.index(n))] = 1
    f01 = MultiCochain(B.module, 1, 0, 0, entries, C.module)
    return MorphismFamily(B, C, {(0, 1): f01}, name="collapse")
