"""Hochschild differentials and cohomology.

Flavors:

* ``classical``  D = [m, -] on cochains of horizontal shift 0, graded by n + i.
* ``alg``        D = [m02, -] on C^{n,i}, bigraded by (n, i).
* ``orthogonal`` D(f) = [m_even, f^#] + [m_odd, f], graded by n + k + i.
* ``bidga``      the same D for a bidga with m01 = 0, bigraded by (s, r) = (n + k, i),
                 optionally with coefficients in a bimodule.

Arity 0 cochains (elements of the target) are included, so HH^0 of the
ground ring is the ground ring.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

from .bigraded import BigradedModule, koszul_parity
from .cochains import (CochainSum, MultiCochain, apply_tensor, bracket, compose, cochain_basis, insert)
from .linalg import (Matrix, column_span_basis, homology_at, infeasibility_certificate, kernel_basis,
                     quotient_presentation, solve_linear)
from .structure import StructureFamily, arity_bound, is_orthogonal

FLAVORS = ("classical", "alg", "orthogonal", "bidga")


# --------------------------------------------------------------------------
# differentials


def differential_D(m: StructureFamily, f, check: bool = True):
    """D(f) = [m_even, f^#] + [m_odd, f]; needs an orthogonal structure."""
    if check and not is_orthogonal(m).ok:
        raise ValueError("differential_D needs an orthogonal structure")
    e, o = m.even(), m.odd()
    fs = f if isinstance(f, CochainSum) else CochainSum.of(f)
    out = CochainSum(m.module)
    if not e.is_zero():
        out = out + bracket(e, fs.hash())
    if not o.is_zero():
        out = out + bracket(o, fs)
    return out


def classical_differential(m: StructureFamily, f):
    """[m, f] for a structure in horizontal degree 0."""
    if not m.is_classical:
        raise ValueError("classical differential needs horizontal degree 0 operations")
    fs = f if isinstance(f, CochainSum) else CochainSum.of(f)
    return CochainSum(m.module) + bracket(m.as_sum(), fs)


def vertical_differential(m: StructureFamily, f):
    """d^v = [m_1, -] for a dga."""
    fs = f if isinstance(f, CochainSum) else CochainSum.of(f)
    return CochainSum(m.module) + bracket(m.component(0, 1), fs)


def horizontal_differential(m: StructureFamily, f):
    """d^h = [m_2, -] for a dga (or a graded algebra)."""
    fs = f if isinstance(f, CochainSum) else CochainSum.of(f)
    return CochainSum(m.module) + bracket(m.component(0, 2), fs)


def explicit_m2_differential(mu: MultiCochain, f: MultiCochain) -> MultiCochain:
    """(-1)^k ( m2(1⊗f) + sum_i (-1)^(i+1) f(1^i ⊗ m2 ⊗ 1) + (-1)^(n+1) m2(f⊗1) ), k the internal degree of f.

    Written out term by term, independent of the bracket machinery.
    """
    A = f.source
    n, k = f.arity, f.vshift
    ident = MultiCochain.identity(A)
    left = apply_tensor(mu, [ident, f])
    right = apply_tensor(mu, [f, ident])
    total = left + (right if (n + 1) % 2 == 0 else -right)
    for i in range(n):
        term = insert(f, mu, i)
        total = total + (term if (i + 1) % 2 == 0 else -term)
    return -total if k % 2 else total


# --------------------------------------------------------------------------
# bimodules


class Bimodule:
    """A bimodule over a bidga with m01 = 0: left and right actions and a horizontal differential.

    Actions are tables {(a, x): {y: c}} on basis indices (a in A, x, y in M).
    """

    def __init__(self, algebra: StructureFamily, module: BigradedModule, left: dict, right: dict,
                 differential: MultiCochain | None = None):
        self.algebra = algebra
        self.module = module
        self.left = {k: dict(v) for k, v in left.items() if v}
        self.right = {k: dict(v) for k, v in right.items() if v}
        self.differential = differential if differential is not None else MultiCochain.zero(module, 1, 1, 0)
        if self.differential.tridegree != (1, 1, 0):
            raise ValueError("bimodule differential must have bidegree (1, 0)")

    @classmethod
    def regular(cls, A: StructureFamily) -> "Bimodule":
        mu = A.component(0, 2)
        table: dict = {}
        for ((a, b), y), c in mu.entries.items():
            table.setdefault((a, b), {})[y] = c
        return cls(A, A.module, table, table, A.component(1, 1))

    def act_left(self, a: int, vec: dict) -> dict:
        out: dict = {}
        for x, c in vec.items():
            for y, d in self.left.get((a, x), {}).items():
                out[y] = out.get(y, 0) + c * d
        return _clean(self.module.ring, out)

    def act_right(self, vec: dict, a: int) -> dict:
        out: dict = {}
        for x, c in vec.items():
            for y, d in self.right.get((x, a), {}).items():
                out[y] = out.get(y, 0) + c * d
        return _clean(self.module.ring, out)

    def d(self, vec: dict) -> dict:
        out: dict = {}
        for x, c in vec.items():
            for y, d in self.differential.apply_basis((x,)).items():
                out[y] = out.get(y, 0) + c * d
        return _clean(self.module.ring, out)

    def check_axioms(self) -> list:
        """Failures of associativity, the derivation square and d^2 = 0."""
        A, M = self.algebra.module, self.module
        mu = self.algebra.component(0, 2)
        dA = self.algebra.component(1, 1)
        fails = []

        def prod(a, b):
            return mu.apply_basis((a, b))

        for x in range(M.dim):
            if self.d(self.d({x: 1})):
                fails.append({"axiom": "d^2 = 0", "element": M.names[x]})
            for a in range(A.dim):
                # derivation square: d(a x) = d(a) x + (-1)^{h_a} a d(x)
                lhs = self.d(self.act_left(a, {x: 1}))
                rhs = {}
                for b, c in dA.apply_basis((a,)).items():
                    _add(rhs, self.act_left(b, {x: 1}), c)
                _add(rhs, self.act_left(a, self.d({x: 1})), -1 if A.degrees[a][0] % 2 else 1)
                if _clean(M.ring, _sub(lhs, rhs)):
                    fails.append({"axiom": "left derivation square", "inputs": [A.names[a], M.names[x]]})
                lhs = self.d(self.act_right({x: 1}, a))
                rhs = {}
                _add(rhs, self.act_right(self.d({x: 1}), a), 1)
                sgn = -1 if M.degrees[x][0] % 2 else 1
                for b, c in dA.apply_basis((a,)).items():
                    _add(rhs, self.act_right({x: 1}, b), sgn * c)
                if _clean(M.ring, _sub(lhs, rhs)):
                    fails.append({"axiom": "right derivation square", "inputs": [M.names[x], A.names[a]]})
                for b in range(A.dim):
                    ab = prod(a, b)
                    lhs = self.act_left(a, self.act_left(b, {x: 1}))
                    rhs = {}
                    for y, c in ab.items():
                        _add(rhs, self.act_left(y, {x: 1}), c)
                    if _clean(M.ring, _sub(lhs, rhs)):
                        fails.append({"axiom": "left associativity", "inputs": [A.names[a], A.names[b], M.names[x]]})
                    lhs = self.act_right(self.act_right({x: 1}, a), b)
                    rhs = {}
                    for y, c in ab.items():
                        _add(rhs, self.act_right({x: 1}, y), c)
                    if _clean(M.ring, _sub(lhs, rhs)):
                        fails.append({"axiom": "right associativity", "inputs": [M.names[x], A.names[a], A.names[b]]})
                    lhs = self.act_right(self.act_left(a, {x: 1}), b)
                    rhs = self.act_left(a, self.act_right({x: 1}, b))
                    if _clean(M.ring, _sub(lhs, rhs)):
                        fails.append({"axiom": "bimodule compatibility",
                                      "inputs": [A.names[a], M.names[x], A.names[b]]})
        return fails


def _clean(ring, vec: dict) -> dict:
    out = {}
    for k, c in vec.items():
        c = ring.normalize(c)
        if c:
            out[k] = c
    return out


def _add(acc: dict, vec: dict, scale) -> None:
    for k, c in vec.items():
        acc[k] = acc.get(k, 0) + scale * c


def _sub(a: dict, b: dict) -> dict:
    out = dict(a)
    _add(out, b, -1)
    return out


def bimodule_differential(A: StructureFamily, M: Bimodule, f: MultiCochain) -> CochainSum:
    """The five-term differential on C^{n,i}_k(A, M) for a bidga A with m01 = 0."""
    if not A.component(0, 1).is_zero():
        raise ValueError("bimodule coefficients need m01 = 0")
    if f.source != A.module or f.target != M.module:
        raise ValueError("cochain does not map A^{⊗n} -> M")
    n, k, i = f.tridegree
    S, T = A.module, M.module
    mu = A.component(0, 2)
    dA = A.component(1, 1)
    right: dict = {}
    left: dict = {}
    fdeg = f.bidegree
    # rows of f by input tuple
    by_ins: dict = {}
    for (ins, y), c in f.entries.items():
        by_ins.setdefault(ins, {})[y] = c
    for ins, vec in by_ins.items():
        for x in range(S.dim):
            # right action: m^r(f ⊗ 1)(ins, x) = f(ins) · x
            for y, c in M.act_right(vec, x).items():
                key = (ins + (x,), y)
                right[key] = right.get(key, 0) + c
            # left action: m^l(1 ⊗ f)(x, ins) = (-1)^{|f||x|} x · f(ins)
            sgn = -1 if koszul_parity(fdeg, S.degrees[x]) else 1
            for y, c in M.act_left(x, vec).items():
                key = ((x,) + ins, y)
                left[key] = left.get(key, 0) + sgn * c
    r_term = MultiCochain(S, n + 1, k, i, right, T)
    l_term = MultiCochain(S, n + 1, k, i, left, T)
    out = CochainSum(S, T)
    out = out + (r_term if (k + n + i - 1) % 2 == 0 else -r_term)
    out = out + (l_term if (k + i) % 2 == 0 else -l_term)
    if n > 0:
        fm = compose(f, mu)
        out = out + (fm if (k + n + i) % 2 == 0 else -fm)
        fd = compose(f, dA)
        out = out + (fd if (k + 1) % 2 == 0 else -fd)
    out = out + apply_tensor(M.differential, [f])
    return out


# --------------------------------------------------------------------------
# degree bookkeeping


def input_degree_sums(module: BigradedModule, n: int, normalized: bool) -> frozenset:
    return _sums(module, n, normalized)


@lru_cache(maxsize=None)
def _sums(module, n, normalized):
    pool = set(module.degrees[x] for x in (module.nonunit_indices() if normalized else range(module.dim)))
    cur = {(0, 0)}
    for _ in range(n):
        cur = {(u + a, v + b) for (u, v) in cur for (a, b) in pool}
    return frozenset(cur)


def tridegrees_of_total(source, target, total: int, arities, normalized: bool) -> list:
    out = set()
    for n in arities:
        for (u, v) in input_degree_sums(source, n, normalized):
            for (h, w) in target.support():
                k, i = u - h, w - v
                if n + k + i == total:
                    out.add((n, k, i))
    return sorted(out)


# --------------------------------------------------------------------------
# the complex


@dataclass
class HHResult:
    degree: object
    presentation: object
    total: bool
    representatives: list = field(default_factory=list)

    @property
    def free_rank(self):
        return self.presentation.free_rank

    @property
    def torsion(self):
        return self.presentation.torsion

    def as_dict(self) -> dict:
        d = {"degree": list(self.degree) if isinstance(self.degree, tuple) else self.degree,
             "total": self.total}
        d.update(self.presentation.summary())
        d["representatives"] = [_sum_record(r) for r in self.representatives]
        return d


def _sum_record(s: CochainSum) -> list:
    A, B = s.source, s.target
    out = []
    for c in s.components():
        for (ins, y), coeff in sorted(c.entries.items()):
            out.append({"tridegree": list(c.tridegree), "inputs": [A.names[x] for x in ins],
                        "output": B.names[y], "coefficient": B.ring.format(coeff)})
    return out


class HochschildComplex:
    def __init__(self, m: StructureFamily, flavor: str = "orthogonal", arity_max: int | None = None,
                 normalized: bool = True, bimodule: Bimodule | None = None):
        if flavor not in FLAVORS:
            raise ValueError(f"unknown flavor {flavor!r}")
        self.m = m
        self.flavor = flavor
        self.normalized = normalized
        self.bimodule = bimodule
        self.source = m.module
        self.target = bimodule.module if bimodule is not None else m.module
        self.ring = self.source.ring
        if flavor in ("classical", "alg") and not m.is_classical:
            raise ValueError(f"{flavor} flavor needs horizontal degree 0 operations")
        if flavor == "orthogonal" and not is_orthogonal(m).ok:
            raise ValueError("orthogonal flavor needs an orthogonal structure")
        if flavor == "bidga" and not m.component(0, 1).is_zero():
            raise ValueError("bidga flavor needs m01 = 0")
        if bimodule is not None and flavor != "bidga":
            raise ValueError("coefficients are only supported in the bidga flavor")
        self.arity_max = arity_max
        self._basis_cache: dict = {}
        self._matrix_cache: dict = {}

    # gradings ---------------------------------------------------------------
    @property
    def bigraded(self) -> bool:
        return self.flavor in ("alg", "bidga")

    def next_degree(self, deg):
        if self.flavor == "alg":
            return (deg[0] + 1, deg[1])
        if self.flavor == "bidga":
            return (deg[0] + 1, deg[1])
        return deg + 1

    def prev_degree(self, deg):
        if self.bigraded:
            return (deg[0] - 1, deg[1])
        return deg - 1

    def _arity_window(self, total: int) -> tuple[int, bool]:
        """(largest arity to use, whether that covers every nonzero cochain)."""
        b = arity_bound(self.source, total, self.normalized, self.target)
        if self.arity_max is None:
            if b is None:
                raise ValueError("arity is unbounded for this module; declare arity_max")
            return b, True
        if b is None:
            return self.arity_max, False
        return min(b, self.arity_max), b <= self.arity_max

    def tridegrees(self, deg) -> list:
        if self.flavor == "alg":
            n, i = deg
            return [(n, 0, i)] if n >= 0 else []
        if self.flavor == "bidga":
            s, r = deg
            hmax = max((h for h, _ in self.target.support()), default=0)
            tris = tridegrees_of_total(self.source, self.target, s + r, range(0, max(s + hmax, -1) + 1),
                                       self.normalized)
            return [t for t in tris if t[1] == s - t[0] and t[2] == r]
        amax, _ = self._arity_window(deg)
        tris = tridegrees_of_total(self.source, self.target, deg, range(0, amax + 1), self.normalized)
        if self.flavor == "classical":
            tris = [t for t in tris if t[1] == 0]
        return tris

    def is_total(self, deg) -> bool:
        if self.bigraded:
            return True
        return all(self._arity_window(d)[1] for d in (self.prev_degree(deg), deg, self.next_degree(deg)))

    def basis(self, deg) -> list:
        if deg not in self._basis_cache:
            out = []
            for tri in self.tridegrees(deg):
                n, k, i = tri
                for key in cochain_basis(self.source, n, k, i, self.normalized, self.target):
                    out.append((tri, key))
            self._basis_cache[deg] = out
        return self._basis_cache[deg]

    def index(self, deg) -> dict:
        return {(tri, key): j for j, (tri, key) in enumerate(self.basis(deg))}

    # differential -----------------------------------------------------------
    def differential(self, f) -> CochainSum:
        if self.flavor == "classical":
            return classical_differential(self.m, f)
        if self.flavor == "alg":
            return horizontal_differential(self.m, f)
        if self.bimodule is not None:
            fs = f if isinstance(f, CochainSum) else CochainSum.of(f)
            out = CochainSum(self.source, self.target)
            for c in fs.components():
                out = out + bimodule_differential(self.m, self.bimodule, c)
            return out
        return differential_D(self.m, f, check=False)

    def cochain_of(self, vec, deg) -> CochainSum:
        parts: dict = {}
        for (tri, key), c in zip(self.basis(deg), vec):
            if c:
                parts.setdefault(tri, {})[key] = c
        out = CochainSum(self.source, self.target)
        for (n, k, i), ent in parts.items():
            out = out + MultiCochain(self.source, n, k, i, ent, self.target)
        return out

    def vector_of(self, f, deg, strict: bool = True) -> list | None:
        idx = self.index(deg)
        vec = [0] * len(idx)
        fs = f if isinstance(f, CochainSum) else CochainSum.of(f)
        for c in fs.components():
            for key, coeff in c.entries.items():
                j = idx.get((c.tridegree, key))
                if j is None:
                    if strict:
                        raise ValueError(f"cochain entry outside the degree-{deg} window: {c.tridegree}")
                    return None
                vec[j] = coeff
        return vec

    def matrix(self, deg) -> Matrix:
        """Matrix of D from degree deg to the next degree."""
        if deg in self._matrix_cache:
            return self._matrix_cache[deg]
        src = self.basis(deg)
        nxt = self.next_degree(deg)
        idx = self.index(nxt)
        amax = max((t[0] for t in self.tridegrees(nxt)), default=-1)
        ent = {}
        for j, ((n, k, i), key) in enumerate(src):
            e = MultiCochain(self.source, n, k, i, {key: 1}, self.target)
            for c in self.differential(e).components():
                for k2, coeff in c.entries.items():
                    r = idx.get((c.tridegree, k2))
                    if r is None:
                        if c.tridegree[0] > amax:
                            continue  # beyond the arity window; the degree is marked partial
                        raise ValueError("the differential leaves the chosen cochain space "
                                         f"(tridegree {c.tridegree}); is the structure strictly unital?")
                    ent[(r, j)] = coeff
        M = Matrix(self.ring, len(idx), len(src), ent)
        self._matrix_cache[deg] = M
        return M

    def cohomology(self, deg) -> HHResult:
        d_in = self.matrix(self.prev_degree(deg))
        d_out = self.matrix(deg)
        pres = homology_at(d_in, d_out)
        reps = [self.cochain_of(g, deg) for g in pres.generators]
        return HHResult(deg, pres, self.is_total(deg), reps)

    def square_zero(self, deg) -> bool:
        return (self.matrix(self.next_degree(deg)) @ self.matrix(deg)).is_zero()


def hochschild_cohomology(m: StructureFamily, degrees, flavor: str = "orthogonal", arity_max=None,
                          normalized: bool = True, bimodule: Bimodule | None = None) -> list:
    cx = HochschildComplex(m, flavor, arity_max, normalized, bimodule)
    return [cx.cohomology(d) for d in degrees]


# --------------------------------------------------------------------------
# the filtration by arity


@dataclass
class FiltrationDecision:
    member: bool
    representative: CochainSum | None = None
    certificate: object = None
    total: bool = True


def _low_rows(cx: HochschildComplex, deg, k: int) -> list:
    return [j for j, ((n, _, _), _) in enumerate(cx.basis(deg)) if n < k]


def filtration_membership(cx: HochschildComplex, deg, cocycle, k: int) -> FiltrationDecision:
    """Is [cocycle] in F^k, i.e. cohomologous to a cocycle supported in arities >= k?"""
    vec = cx.vector_of(cocycle, deg)
    if any(cx.matrix(deg).apply(vec)):
        raise ValueError("not a cocycle")
    low = _low_rows(cx, deg, k)
    D = cx.matrix(cx.prev_degree(deg))
    ring = cx.ring
    M = Matrix(ring, len(low), D.cols, {(r, j): D[(i, j)] for r, i in enumerate(low) for j in range(D.cols)
                                         if D[(i, j)] != 0})
    b = [ring.normalize(-vec[i]) for i in low]
    y = solve_linear(M, b)
    if y is None:
        return FiltrationDecision(False, None, infeasibility_certificate(M, b), cx.is_total(deg))
    Dy = D.apply(y)
    new = [ring.normalize(a + c) for a, c in zip(vec, Dy)]
    return FiltrationDecision(True, cx.cochain_of(new, deg), None, cx.is_total(deg))


def filtration_subgroup(cx: HochschildComplex, deg, k: int):
    """F^k HH^deg: cocycles supported in arities >= k modulo boundaries of that support."""
    ring = cx.ring
    basis = cx.basis(deg)
    high = [j for j, ((n, _, _), _) in enumerate(basis) if n >= k]
    d_out = cx.matrix(deg)
    dim = len(basis)
    # cocycles in the high part
    restricted = Matrix(ring, d_out.rows, len(high),
                        {(r, c): d_out[(r, j)] for c, j in enumerate(high) for r in range(d_out.rows)
                         if d_out[(r, j)] != 0})
    Zh = []
    for z in kernel_basis(restricted):
        full = [0] * dim
        for c, j in enumerate(high):
            full[j] = z[c]
        Zh.append(full)
    # boundaries landing in the high part
    D = cx.matrix(cx.prev_degree(deg))
    low = _low_rows(cx, deg, k)
    M = Matrix(ring, len(low), D.cols, {(r, j): D[(i, j)] for r, i in enumerate(low) for j in range(D.cols)
                                         if D[(i, j)] != 0})
    B = [D.apply(y) for y in kernel_basis(M)]
    B = [b for b in B if any(x != 0 for x in b)]
    return quotient_presentation(ring, column_span_basis(ring, Zh, dim), B, dim)
