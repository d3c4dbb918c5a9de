"""Multilinear cochains and their sign calculus.

A cochain in C^{n,i}_k(A, B) is an arity-n map A^{⊗n} -> B moving the
slot (u, v) to (u - k, v + i).  It is stored as a sparse table
``{(input tuple, output index): coefficient}`` over basis indices.

The operations here are the composition product, the bracket, the
suspension isomorphism sigma and its inverse, the # twist and a
brute-force sign oracle that composes suspensions element by element.
"""

from __future__ import annotations

import random
from math import comb
from typing import Iterable, Sequence

from .bigraded import BigradedModule, koszul_parity, shift_module


class MultiCochain:
    __slots__ = ("source", "target", "arity", "hshift", "vshift", "entries")

    def __init__(self, source: BigradedModule, arity: int, hshift: int, vshift: int,
                 entries: dict | None = None, target: BigradedModule | None = None, check: bool = True):
        self.source = source
        self.target = source if target is None else target
        self.arity = int(arity)
        self.hshift = int(hshift)
        self.vshift = int(vshift)
        ring = self.target.ring
        clean = {}
        for key, c in (entries or {}).items():
            if not hasattr(c, "_is_polynomial"):
                c = ring.normalize(c)
            if not c:
                continue
            if check:
                ins, out = key
                if len(ins) != self.arity:
                    raise ValueError(f"entry with {len(ins)} inputs in an arity-{self.arity} cochain")
                u, v = self.source.tuple_degree(ins)
                if self.target.degrees[out] != (u - self.hshift, v + self.vshift):
                    names = ",".join(self.source.names[x] for x in ins)
                    raise ValueError(
                        f"entry ({names}) -> {self.target.names[out]} violates tridegree {self.tridegree}")
            clean[key] = c
        self.entries = clean

    # degrees ------------------------------------------------------------
    @property
    def tridegree(self) -> tuple[int, int, int]:
        """(n, k, i) for C^{n,i}_k."""
        return (self.arity, self.hshift, self.vshift)

    @property
    def bidegree(self) -> tuple[int, int]:
        """Bidegree (k, i) of the underlying map, used in Koszul signs."""
        return (self.hshift, self.vshift)

    @property
    def total_degree(self) -> int:
        return self.arity + self.hshift + self.vshift

    @property
    def lie_bidegree(self) -> tuple[int, int]:
        return (self.hshift, self.arity + self.vshift - 1)

    @property
    def ring(self):
        return self.target.ring

    # construction ---------------------------------------------------------
    def _like(self, entries, check=False) -> "MultiCochain":
        return MultiCochain(self.source, self.arity, self.hshift, self.vshift, entries, self.target, check=check)

    @classmethod
    def zero(cls, source, arity, hshift, vshift, target=None):
        return cls(source, arity, hshift, vshift, {}, target)

    @classmethod
    def identity(cls, A: BigradedModule) -> "MultiCochain":
        return cls(A, 1, 0, 0, {((x,), x): 1 for x in range(A.dim)})

    @classmethod
    def from_names(cls, source, arity, hshift, vshift, table: dict, target=None) -> "MultiCochain":
        """Build from ``{(name, ...): {name: coeff}}``."""
        target = source if target is None else target
        ring = target.ring
        entries = {}
        for ins, outs in table.items():
            key_in = tuple(source.index(x) for x in ins)
            for y, c in outs.items():
                entries[(key_in, target.index(y))] = ring.coerce(c)
        return cls(source, arity, hshift, vshift, entries, target)

    # arithmetic -----------------------------------------------------------
    def same_space(self, other) -> bool:
        return (self.source == other.source and self.target == other.target
                and self.tridegree == other.tridegree)

    def __add__(self, other: "MultiCochain") -> "MultiCochain":
        if not isinstance(other, MultiCochain):
            return NotImplemented
        if not self.same_space(other):
            return CochainSum.of(self) + CochainSum.of(other)
        acc = dict(self.entries)
        for k, c in other.entries.items():
            acc[k] = acc.get(k, 0) + c
        return self._like(acc)

    def __neg__(self):
        return self._like({k: -c for k, c in self.entries.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c) -> "MultiCochain":
        return self._like({k: c * x for k, x in self.entries.items()})

    def __rmul__(self, c):
        return self.scale(c)

    def is_zero(self) -> bool:
        return not self.entries

    def __bool__(self):
        return bool(self.entries)

    def __eq__(self, other):
        if isinstance(other, CochainSum):
            return CochainSum.of(self) == other
        if not isinstance(other, MultiCochain):
            return NotImplemented
        return self.same_space(other) and self.entries == other.entries

    def __repr__(self):
        return f"MultiCochain(n={self.arity}, k={self.hshift}, i={self.vshift}, {len(self.entries)} entries)"

    def hash(self) -> "MultiCochain":
        """f^# = (-1)^k f."""
        return -self if self.hshift & 1 else self

    # evaluation -----------------------------------------------------------
    def apply_basis(self, inputs: Sequence[int]) -> dict:
        inputs = tuple(inputs)
        return {out: c for (ins, out), c in self.entries.items() if ins == inputs}

    def apply(self, vectors: Sequence[dict]) -> dict:
        """Evaluate on a tensor of vectors {basis index: coeff}, each homogeneous.

        Sign: the map passes nothing, so only multilinearity matters.
        """
        out: dict = {}
        for (ins, y), c in self.entries.items():
            prod = c
            for x, vec in zip(ins, vectors):
                a = vec.get(x, 0)
                if not a:
                    prod = 0
                    break
                prod = prod * a
            if prod:
                out[y] = out.get(y, 0) + prod
        ring = self.ring
        return {y: ring.normalize(c) for y, c in out.items() if ring.normalize(c) != 0}

    def blocks(self) -> dict:
        """Per source bidegree (u, v): {(input tuple, output): coeff} restricted to that slot."""
        out: dict = {}
        for (ins, y), c in sorted(self.entries.items()):
            out.setdefault(self.source.tuple_degree(ins), {})[(ins, y)] = c
        return out

    def is_normalized(self) -> bool:
        u = self.source.unit_index
        return u is None or all(u not in ins for ins, _ in self.entries)

    def normalized_part(self) -> "MultiCochain":
        u = self.source.unit_index
        if u is None:
            return self
        return self._like({k: c for k, c in self.entries.items() if u not in k[0]})


class CochainSum:
    """Finite family of cochains with distinct tridegrees, all A -> B."""

    __slots__ = ("source", "target", "parts")

    def __init__(self, source, target=None, parts: dict | None = None):
        self.source = source
        self.target = source if target is None else target
        self.parts = {}
        for tri, c in (parts or {}).items():
            if not c.is_zero():
                self.parts[tri] = c

    @classmethod
    def of(cls, *cochains: MultiCochain, source=None, target=None) -> "CochainSum":
        if source is None:
            source, target = cochains[0].source, cochains[0].target
        s = cls(source, target)
        for c in cochains:
            s = s.add_cochain(c)
        return s

    def add_cochain(self, c: MultiCochain) -> "CochainSum":
        if c.source != self.source or c.target != self.target:
            raise ValueError("module mismatch")
        parts = dict(self.parts)
        tri = c.tridegree
        parts[tri] = parts[tri] + c if tri in parts else c
        return CochainSum(self.source, self.target, parts)

    def __iter__(self):
        return iter(self.components())

    def components(self) -> list[MultiCochain]:
        return [self.parts[t] for t in sorted(self.parts)]

    def component(self, tridegree) -> MultiCochain:
        n, k, i = tridegree
        return self.parts.get(tuple(tridegree), MultiCochain.zero(self.source, n, k, i, self.target))

    def __add__(self, other):
        if isinstance(other, MultiCochain):
            return self.add_cochain(other)
        s = self
        for c in other.parts.values():
            s = s.add_cochain(c)
        return s

    def __neg__(self):
        return CochainSum(self.source, self.target, {t: -c for t, c in self.parts.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c) -> "CochainSum":
        return CochainSum(self.source, self.target, {t: x.scale(c) for t, x in self.parts.items()})

    def __rmul__(self, c):
        return self.scale(c)

    def is_zero(self) -> bool:
        return not self.parts

    def __bool__(self):
        return bool(self.parts)

    def __eq__(self, other):
        if isinstance(other, MultiCochain):
            other = CochainSum.of(other)
        if not isinstance(other, CochainSum):
            return NotImplemented
        return (self.source == other.source and self.target == other.target
                and {t: c.entries for t, c in self.parts.items()} == {t: c.entries for t, c in other.parts.items()})

    def __repr__(self):
        return f"CochainSum({sorted(self.parts)})"

    def hash(self) -> "CochainSum":
        return CochainSum(self.source, self.target, {t: c.hash() for t, c in self.parts.items()})

    def filter(self, pred) -> "CochainSum":
        return CochainSum(self.source, self.target, {t: c for t, c in self.parts.items() if pred(t)})

    def total_degrees(self) -> set:
        return {c.total_degree for c in self.parts.values()}


def _as_sum(x) -> CochainSum:
    return x if isinstance(x, CochainSum) else CochainSum.of(x)


# --------------------------------------------------------------------------
# raw insertions


def insert(f: MultiCochain, g: MultiCochain, pos: int) -> MultiCochain:
    """f(1^{⊗pos} ⊗ g ⊗ 1^{⊗(n-pos-1)}) with the Koszul sign of g passing the first pos inputs."""
    if not 0 <= pos < f.arity:
        raise ValueError(f"insertion slot {pos} outside arity {f.arity}")
    if g.target != f.source or g.source != f.source:
        raise ValueError("module mismatch in insertion")
    A = g.source
    gdeg = g.bidegree
    par = [koszul_parity(gdeg, d) for d in A.degrees]
    by_slot: dict = {}
    for (ins, out), c in f.entries.items():
        by_slot.setdefault(ins[pos], []).append((ins, out, c))
    acc: dict = {}
    for (gins, gout), gc in g.entries.items():
        for fins, fout, fc in by_slot.get(gout, ()):
            sign = sum(par[x] for x in fins[:pos]) & 1
            key = (fins[:pos] + gins + fins[pos + 1:], fout)
            val = fc * gc
            acc[key] = acc.get(key, 0) + (-val if sign else val)
    return MultiCochain(g.source, f.arity + g.arity - 1, f.hshift + g.hshift, f.vshift + g.vshift,
                        acc, f.target, check=False)


def apply_tensor(h: MultiCochain, fs: Sequence[MultiCochain]) -> MultiCochain:
    """h(f_1 ⊗ ... ⊗ f_j) with Koszul signs: f_r passes the inputs consumed by f_1..f_(r-1)."""
    if len(fs) != h.arity:
        raise ValueError("number of inner maps must equal the outer arity")
    A = fs[0].source
    for f in fs:
        if f.source != A or f.target != h.source:
            raise ValueError("module mismatch in tensor application")
    by_out = []
    for f in fs:
        idx: dict = {}
        for (ins, out), c in f.entries.items():
            idx.setdefault(out, []).append((ins, c, A.tuple_degree(ins)))
        by_out.append(idx)
    degs = [f.bidegree for f in fs]
    acc: dict = {}
    for (hins, hout), hc in h.entries.items():
        partial = [((), hc, 0, 0)]  # (inputs so far, coeff, passed h, passed v)
        for r, y in enumerate(hins):
            cands = by_out[r].get(y)
            if not cands:
                partial = []
                break
            s, t = degs[r]
            nxt = []
            for ins, c, ph, pv in partial:
                sign = (s * ph + t * pv) & 1
                for fins, fc, (dh, dv) in cands:
                    val = c * fc
                    nxt.append((ins + fins, -val if sign else val, ph + dh, pv + dv))
            partial = nxt
        for ins, c, _, _ in partial:
            key = (ins, hout)
            acc[key] = acc.get(key, 0) + c
    n = sum(f.arity for f in fs)
    k = h.hshift + sum(f.hshift for f in fs)
    i = h.vshift + sum(f.vshift for f in fs)
    return MultiCochain(A, n, k, i, acc, h.target, check=False)


# --------------------------------------------------------------------------
# the composition product and the bracket


def composition_sign(n: int, m: int, v: int, j: int) -> int:
    """Parity (n-1)(m-1) + v(m-1) + j(n-1) for inserting g (arity m, vertical shift j) into slot v of f."""
    return ((n - 1) * (m - 1) + v * (m - 1) + j * (n - 1)) & 1


def _compose_single(f: MultiCochain, g: MultiCochain) -> MultiCochain:
    n, m, j = f.arity, g.arity, g.vshift
    if n == 0:
        return MultiCochain.zero(g.source, max(m - 1, 0), f.hshift + g.hshift, f.vshift + g.vshift, f.target)
    total = None
    for v in range(n):
        term = insert(f, g, v)
        if composition_sign(n, m, v, j):
            term = -term
        total = term if total is None else total + term
    return total


def koszul_pairing(f, g) -> int:
    """<f,g> = (n+i-1)(m+j-1) + kl mod 2."""
    n, k, i = f.tridegree
    m, l, j = g.tridegree
    return ((n + i - 1) * (m + j - 1) + k * l) & 1


def _bilinear(op, f, g):
    if isinstance(f, MultiCochain) and isinstance(g, MultiCochain):
        return op(f, g)
    fs, gs = _as_sum(f), _as_sum(g)
    out = CochainSum(fs.source, fs.target)
    for a in fs.components():
        for b in gs.components():
            out = out + op(a, b)
    return out


def insert_product(f, g):
    """The composition product f∘g (sum of signed insertions of g into f)."""
    return _bilinear(_compose_single, f, g)


compose = insert_product


def _bracket_single(f: MultiCochain, g: MultiCochain):
    fg = _compose_single(f, g)
    gf = _compose_single(g, f)
    if koszul_pairing(f, g):
        return fg + gf
    return fg - gf


def bracket(f, g):
    """[f,g] = f∘g - (-1)^<f,g> g∘f."""
    return _bilinear(_bracket_single, f, g)


def hash_op(f):
    """f^# = (-1)^k f."""
    return f.hash()


def plain_insertion_sum(F: MultiCochain, G: MultiCochain) -> MultiCochain:
    """Sum over v of F(1^v ⊗ G ⊗ 1) with only Koszul signs (the brace on S(A))."""
    total = None
    for v in range(F.arity):
        term = insert(F, G, v)
        total = term if total is None else total + term
    return total


# --------------------------------------------------------------------------
# suspension isomorphism


def sigma(f: MultiCochain) -> MultiCochain:
    """σ(f) = (-1)^(n+i+k-1) S ∘ f ∘ (S^-1)^{⊗n}, a cochain on S(A)."""
    if f.source != f.target:
        raise ValueError("sigma needs an endo-cochain")
    A = f.source
    SA = shift_module(A)
    n, k, i = f.tridegree
    base = (n + i + k - 1) & 1
    entries = {}
    for (ins, y), c in f.entries.items():
        # (S^-1)_r passes S x_q for q < r; S x has vertical degree v - 1
        par = base
        for q, x in enumerate(ins):
            par += (n - 1 - q) * (A.degrees[x][1] - 1)
        entries[(ins, y)] = -c if par & 1 else c
    return MultiCochain(SA, n, k, i + n - 1, entries, SA, check=False)


def sigma_inv(F: MultiCochain, A: BigradedModule) -> MultiCochain:
    """σ^-1(F) = (-1)^(j+l+C(m,2)) S^-1 ∘ F ∘ S^{⊗m}, back on A."""
    SA = shift_module(A)
    if F.source != SA or F.target != SA:
        raise ValueError("sigma_inv: cochain does not live on S(A)")
    m, l, j = F.tridegree
    base = (j + l + comb(m, 2)) & 1
    entries = {}
    for (ins, y), c in F.entries.items():
        par = base
        for q, x in enumerate(ins):
            par += (m - 1 - q) * A.degrees[x][1]
        entries[(ins, y)] = -c if par & 1 else c
    return MultiCochain(A, m, l, j + 1 - m, entries, A, check=False)


# --------------------------------------------------------------------------
# brute-force sign oracle


class _SymbolicMap:
    """A map in a symbolic composite: bidegree, consumed count, intrinsic sign, output degree rule."""

    def __init__(self, bidegree, arity, sign=0, name=""):
        self.bidegree = bidegree
        self.arity = arity
        self.sign = sign
        self.name = name


def _apply_symbolic(maps: Sequence[_SymbolicMap], elems: Sequence[tuple[int, int]]):
    """Apply a tensor of symbolic maps to elements (given by bidegrees).

    Returns (sign parity, output elements).  Each map's output bidegree is
    the sum of its inputs moved by its own bidegree (h - s, v + t).
    """
    parity = 0
    out = []
    pos = 0
    ph = pv = 0
    for f in maps:
        chunk = elems[pos:pos + f.arity]
        pos += f.arity
        s, t = f.bidegree
        parity += s * ph + t * pv + f.sign
        h = sum(e[0] for e in chunk)
        v = sum(e[1] for e in chunk)
        ph += h
        pv += v
        out.append((h - s, v + t))
    if pos != len(elems):
        raise ValueError("maps do not consume all elements")
    return parity & 1, out


def _ident():
    return _SymbolicMap((0, 0), 1, 0, "1")


def _S():
    return _SymbolicMap((0, -1), 1, 0, "S")


def _S_inv():
    return _SymbolicMap((0, 1), 1, 0, "S^-1")


def _oracle_run(n, m, v, i, j, k, l, elems):
    """Sign of σ^-1(σ(f)(1^v ⊗ σ(g) ⊗ 1)) relative to f(1^v ⊗ g ⊗ 1) on given elements."""
    N = n + m - 1
    parity = 0
    # outer σ^-1: (-1)^(J+L+C(N,2)) S^-1 Φ S^{⊗N}
    J = (i + n - 1) + (j + m - 1)
    L = k + l
    parity += J + L + comb(N, 2)
    p, cur = _apply_symbolic([_S() for _ in range(N)], elems)
    parity += p
    # Φ = σ(f) ∘ (1^v ⊗ σ(g) ⊗ 1^(n-v-1)); first the tensor with σ(g) as one map of bidegree (l, j+m-1)
    sg = _SymbolicMap((l, j + m - 1), m, 0, "σg")
    p, _ = _apply_symbolic([_ident()] * v + [sg] + [_ident()] * (n - v - 1), cur)
    parity += p
    # expand σ(g) on its block: (-1)^(m+j+l-1) S g (S^-1)^{⊗m}
    block = cur[v:v + m]
    parity += m + j + l - 1
    p, unsusp = _apply_symbolic([_S_inv() for _ in range(m)], block)
    parity += p
    _, (gy,) = _apply_symbolic([_SymbolicMap((l, j), m, 0, "g")], unsusp)
    _, (sgy,) = _apply_symbolic([_S()], [gy])
    mid = cur[:v] + [sgy] + cur[v + m:]
    # σ(f) = (-1)^(n+i+k-1) S f (S^-1)^{⊗n}
    parity += n + i + k - 1
    p, unsusp = _apply_symbolic([_S_inv() for _ in range(n)], mid)
    parity += p
    _, (fz,) = _apply_symbolic([_SymbolicMap((k, i), n, 0, "f")], unsusp)
    _apply_symbolic([_S()], [fz])
    _apply_symbolic([_S_inv()], [(fz[0], fz[1] - 1)])
    # the direct composite f(1^v ⊗ g ⊗ 1) carries the Koszul sign of g passing x_1..x_v
    p_direct, _ = _apply_symbolic([_ident()] * v + [_SymbolicMap((l, j), m, 0, "g")] + [_ident()] * (n - v - 1),
                                  list(elems))
    return (parity - p_direct) & 1


def brute_force_sign(n: int, m: int, v: int, i: int, j: int, k: int, l: int, trials: int = 6) -> int:
    """Parity of the insertion sign found by composing suspensions literally.

    The sign is computed on several element-degree assignments and must not
    depend on them.
    """
    if not 0 <= v <= n - 1:
        raise ValueError(f"slot v={v} out of range for arity {n}")
    N = n + m - 1
    rng = random.Random(hash((n, m, v, i, j, k, l)) & 0xFFFF)
    assignments = [[(0, 0)] * N, [(0, 1)] * N, [(1, 0)] * N,
                   [((q % 2), (q + 1) % 3 - 1) for q in range(N)]]
    while len(assignments) < trials:
        assignments.append([(rng.randint(0, 3), rng.randint(-4, 4)) for _ in range(N)])
    results = {_oracle_run(n, m, v, i, j, k, l, a) for a in assignments}
    if len(results) != 1:
        raise AssertionError(f"sign depends on element degrees for {(n, m, v, i, j, k, l)}")
    return results.pop()


# --------------------------------------------------------------------------
# the classical bracket on horizontal degree 0


def classical_bracket(f: MultiCochain, g: MultiCochain) -> MultiCochain:
    """The bracket on classically graded cochains, written out independently.

    f in C^{n,k}, g in C^{m,l} (k, l the internal degrees = vertical shifts).
    """
    if f.hshift or g.hshift:
        raise ValueError("classical bracket needs horizontal shift 0")
    n, k = f.arity, f.vshift
    m, l = g.arity, g.vshift
    total = None

    def add(term, neg):
        nonlocal total
        term = -term if neg else term
        total = term if total is None else total + term

    for i in range(n):
        add(insert(f, g, i), ((n - 1) * (m - 1) + (n - 1) * l + i * (m - 1)) & 1)
    outer = ((n + k - 1) * (m + l - 1)) & 1
    for i in range(m):
        add(insert(g, f, i), (1 + outer + (m - 1) * (n - 1) + (m - 1) * k + i * (n - 1)) & 1)
    return total


# --------------------------------------------------------------------------
# spaces and random cochains


def cochain_basis(source: BigradedModule, arity: int, hshift: int, vshift: int, normalized: bool = True,
                  target: BigradedModule | None = None) -> list[tuple[tuple[int, ...], int]]:
    """Basis (input tuple, output) of C^{n,i}_k(A, B) in canonical order."""
    target = source if target is None else target
    out = []
    for y in range(target.dim):
        h, v = target.degrees[y]
        for t in source.tuples(arity, (h + hshift, v - vshift), normalized):
            out.append((t, y))
    out.sort()
    return out


def random_cochain(rng: random.Random, source: BigradedModule, arity: int, hshift: int, vshift: int,
                   density: float = 0.5, normalized: bool = False, coeff_range: int = 4,
                   target: BigradedModule | None = None) -> MultiCochain:
    target = source if target is None else target
    ring = target.ring
    entries = {}
    for key in cochain_basis(source, arity, hshift, vshift, normalized, target):
        if rng.random() < density:
            c = rng.randint(-coeff_range, coeff_range)
            if ring.is_field and ring.kind == "rationals" and rng.random() < 0.3:
                c = ring.coerce(f"{c}/{rng.randint(1, 3)}")
            entries[key] = ring.coerce(c)
    return MultiCochain(source, arity, hshift, vshift, entries, target)


def nonempty_tridegrees(source: BigradedModule, max_arity: int, normalized: bool = False,
                        target: BigradedModule | None = None) -> list[tuple[int, int, int]]:
    """All (n, k, i) with 1 <= n <= max_arity admitting a nonzero cochain."""
    target = source if target is None else target
    found = set()
    for n in range(1, max_arity + 1):
        for t in source.all_tuples(n, normalized):
            u, v = source.tuple_degree(t)
            for (h, w) in target.support():
                found.add((n, u - h, w - v))
    return sorted(found)


def sum_cochains(items: Iterable, source, target=None) -> CochainSum:
    out = CochainSum(source, target)
    for c in items:
        out = out + c
    return out
