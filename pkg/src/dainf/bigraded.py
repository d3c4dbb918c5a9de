"""Bigraded modules, graded maps, tensor powers and the shift.

An element of bidegree (h, v) has horizontal degree h >= 0 and vertical
degree v.  A map of bidegree (s, t) sends the slot (h, v) to (h - s, v + t).
Passing a map of bidegree (s, t) across an element of bidegree (h, v)
costs the Koszul sign (-1)^(s*h + t*v).
"""

from __future__ import annotations

from functools import lru_cache
from typing import Iterable, Sequence

from .linalg import Matrix
from .rings import CoefficientRing


def koszul_parity(map_degree: tuple[int, int], elem_degree: tuple[int, int]) -> int:
    """Parity of s*h + t*v."""
    return (map_degree[0] * elem_degree[0] + map_degree[1] * elem_degree[1]) & 1


class BigradedModule:
    """Free module on a finite named basis, each basis element in one bidegree."""

    def __init__(self, ring: CoefficientRing, basis: Iterable[tuple[str, tuple[int, int]]],
                 unit: str | None = None):
        self.ring = ring
        basis = [(str(n), (int(d[0]), int(d[1]))) for n, d in basis]
        self.names = tuple(n for n, _ in basis)
        self.degrees = tuple(d for _, d in basis)
        if len(set(self.names)) != len(self.names):
            raise ValueError("duplicate basis names")
        for n, (h, _) in basis:
            if h < 0:
                raise ValueError(f"basis element {n} has negative horizontal degree")
        self._index = {n: i for i, n in enumerate(self.names)}
        if unit is not None:
            if unit not in self._index:
                raise ValueError(f"unit {unit!r} is not a basis element")
            if self.degrees[self._index[unit]] != (0, 0):
                raise ValueError("the unit must sit in bidegree (0,0)")
        self.unit = unit
        self.unit_index = None if unit is None else self._index[unit]
        self._tuples = lru_cache(maxsize=None)(self._tuples_uncached)

    def __repr__(self):
        return f"BigradedModule({self.ring}, {list(zip(self.names, self.degrees))}, unit={self.unit!r})"

    def __eq__(self, other):
        return (isinstance(other, BigradedModule) and self.ring == other.ring and self.names == other.names
                and self.degrees == other.degrees and self.unit == other.unit)

    def __hash__(self):
        return hash((self.ring, self.names, self.degrees, self.unit))

    @property
    def dim(self) -> int:
        return len(self.names)

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise KeyError(f"no basis element named {name!r}") from None

    def degree(self, i: int) -> tuple[int, int]:
        return self.degrees[i]

    def nonunit_indices(self) -> tuple[int, ...]:
        return tuple(i for i in range(self.dim) if i != self.unit_index)

    def slot(self, bidegree: tuple[int, int]) -> tuple[int, ...]:
        return tuple(i for i, d in enumerate(self.degrees) if d == tuple(bidegree))

    def support(self) -> list[tuple[int, int]]:
        return sorted(set(self.degrees))

    def tuple_degree(self, t: Sequence[int]) -> tuple[int, int]:
        h = v = 0
        for x in t:
            d = self.degrees[x]
            h += d[0]
            v += d[1]
        return h, v

    def tuples(self, n: int, bidegree: tuple[int, int], normalized: bool = False) -> tuple[tuple[int, ...], ...]:
        """All n-tuples of basis indices of total bidegree, lexicographic by factor."""
        return self._tuples(n, tuple(bidegree), bool(normalized))

    def _tuples_uncached(self, n, bidegree, normalized):
        if n == 0:
            return ((),) if bidegree == (0, 0) else ()
        out = []
        h, v = bidegree
        for x in range(self.dim):
            if normalized and x == self.unit_index:
                continue
            dh, dv = self.degrees[x]
            if dh > h:
                continue
            for rest in self._tuples(n - 1, (h - dh, v - dv), normalized):
                out.append((x,) + rest)
        return tuple(out)

    def all_tuples(self, n: int, normalized: bool = False) -> list[tuple[int, ...]]:
        if n == 0:
            return [()]
        pool = self.nonunit_indices() if normalized else tuple(range(self.dim))
        out = [()]
        for _ in range(n):
            out = [t + (x,) for t in out for x in pool]
        return out

    def weight(self, i: int) -> int:
        """1 + h - v: the total-degree contribution of one input."""
        h, v = self.degrees[i]
        return 1 + h - v

    def shifted(self, times: int = 1) -> "BigradedModule":
        return shift_module(self, times)


def tensor_power(A: BigradedModule, n: int, normalized: bool = False) -> BigradedModule:
    """Basis: ordered n-tuples, lexicographic by factor; degrees add."""
    if n < 1:
        raise ValueError("tensor_power needs n >= 1")
    if n == 1 and not normalized:
        return A
    basis = []
    for t in A.all_tuples(n, normalized):
        basis.append(("⊗".join(A.names[x] for x in t), A.tuple_degree(t)))
    return BigradedModule(A.ring, basis)


def shift_module(A: BigradedModule, times: int = 1) -> BigradedModule:
    """S(A) with S(A)^v_u = A^(v+1)_u: every basis element drops one vertical degree.

    Negative ``times`` undoes the shift.  The unit designation is dropped
    unless the net shift is zero.
    """
    basis = [(n, (h, v - times)) for n, (h, v) in zip(A.names, A.degrees)]
    return BigradedModule(A.ring, basis, unit=A.unit if times == 0 else None)


class GradedMap:
    """A single linear map A -> B of bidegree (s, t), stored on basis elements."""

    def __init__(self, source: BigradedModule, target: BigradedModule, bidegree: tuple[int, int],
                 entries: dict | None = None):
        self.source = source
        self.target = target
        self.bidegree = (int(bidegree[0]), int(bidegree[1]))
        s, t = self.bidegree
        ring = target.ring
        clean = {}
        for (x, y), c in (entries or {}).items():
            hx, vx = source.degrees[x]
            if target.degrees[y] != (hx - s, vx + t):
                raise ValueError(
                    f"entry {source.names[x]} -> {target.names[y]} violates bidegree ({s},{t})")
            c = ring.normalize(c)
            if c != 0:
                clean[(x, y)] = c
        self.entries = clean

    arity = 1

    @classmethod
    def identity(cls, A: BigradedModule) -> "GradedMap":
        return cls(A, A, (0, 0), {(i, i): 1 for i in range(A.dim)})

    def apply_basis(self, inputs: Sequence[int]) -> dict:
        (x,) = inputs
        return {y: c for (xx, y), c in self.entries.items() if xx == x}

    def compose(self, other: "GradedMap") -> "GradedMap":
        """self after other; bidegrees add."""
        if other.target != self.source:
            raise ValueError("composition of incompatible maps")
        acc: dict = {}
        by_src: dict = {}
        for (y, z), c in self.entries.items():
            by_src.setdefault(y, []).append((z, c))
        for (x, y), c in other.entries.items():
            for z, d in by_src.get(y, ()):
                acc[(x, z)] = acc.get((x, z), 0) + c * d
        deg = (self.bidegree[0] + other.bidegree[0], self.bidegree[1] + other.bidegree[1])
        return GradedMap(other.source, self.target, deg, acc)

    def blocks(self) -> dict:
        """Per source bidegree, the matrix from that slot to its target slot.

        Target slots in negative horizontal degree are absent.
        """
        s, t = self.bidegree
        out = {}
        for (h, v) in self.source.support():
            if h - s < 0:
                continue
            src = self.source.slot((h, v))
            tgt = self.target.slot((h - s, v + t))
            pos_s = {x: j for j, x in enumerate(src)}
            pos_t = {y: i for i, y in enumerate(tgt)}
            ent = {(pos_t[y], pos_s[x]): c for (x, y), c in self.entries.items() if x in pos_s}
            out[(h, v)] = Matrix(self.target.ring, len(tgt), len(src), ent)
        return out

    def is_zero(self) -> bool:
        return not self.entries

    def __eq__(self, other):
        return (isinstance(other, GradedMap) and self.source == other.source and self.target == other.target
                and self.bidegree == other.bidegree and self.entries == other.entries)


def suspension(A: BigradedModule) -> GradedMap:
    """S : A -> S(A), identity on basis names, bidegree (0, -1)."""
    SA = shift_module(A)
    return GradedMap(A, SA, (0, -1), {(i, i): 1 for i in range(A.dim)})


def desuspension(A: BigradedModule) -> GradedMap:
    """S^-1 : S(A) -> A, bidegree (0, 1)."""
    SA = shift_module(A)
    return GradedMap(SA, A, (0, 1), {(i, i): 1 for i in range(A.dim)})


def evaluate_tensor_map(fs: Sequence, x: Sequence[int]) -> dict:
    """(f_1 ⊗ ... ⊗ f_r)(x_1 ⊗ ... ⊗ x_N) as {output tuple: coefficient}.

    Each f has ``arity``, ``bidegree``, ``source`` and ``apply_basis``; f_r
    consumes the next ``arity`` inputs.  f_r picks up the Koszul sign for
    every input consumed by f_1 .. f_(r-1).
    """
    if sum(f.arity for f in fs) != len(x):
        raise ValueError("arities do not match the input tuple")
    ring = fs[0].target.ring if fs else None
    results = {(): 1}
    pos = 0
    passed = (0, 0)
    for f in fs:
        chunk = tuple(x[pos:pos + f.arity])
        pos += f.arity
        sign = -1 if koszul_parity(f.bidegree, passed) else 1
        out = f.apply_basis(chunk)
        new = {}
        for prefix, c in results.items():
            for y, d in out.items():
                key = prefix + (y,)
                new[key] = new.get(key, 0) + sign * c * d
        results = new
        dh, dv = f.source.tuple_degree(chunk)
        passed = (passed[0] + dh, passed[1] + dv)
    if ring is None:
        return results
    return {k: ring.normalize(v) for k, v in results.items() if ring.normalize(v) != 0}
