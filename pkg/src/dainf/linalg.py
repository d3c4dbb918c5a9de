"""Exact linear algebra over the coefficient rings.

Smith normal form with transforms, particular solutions, kernels, column
spans and homology presentations.  Matrices are stored sparsely; the
elimination itself runs on dense row lists, which is plenty for the sizes
met here.

    >>> from dainf.rings import CoefficientRing
    >>> ZZ = CoefficientRing.parse("zz")
    >>> S, U, V = smith_normal_form(Matrix.from_rows(ZZ, [[2, 0], [0, 3]]))
    >>> S.to_rows()
    [[1, 0], [0, 6]]
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

from .rings import CoefficientRing, PRIME_FIELD


class Matrix:
    """Sparse matrix over a CoefficientRing; entries keyed by (row, col)."""

    __slots__ = ("ring", "rows", "cols", "_entries")

    def __init__(self, ring: CoefficientRing, rows: int, cols: int, entries=None):
        self.ring = ring
        self.rows = rows
        self.cols = cols
        clean = {}
        for (i, j), x in (entries or {}).items():
            if not (0 <= i < rows and 0 <= j < cols):
                raise IndexError(f"entry ({i},{j}) outside {rows}x{cols}")
            x = ring.normalize(x)
            if x != 0:
                clean[(i, j)] = x
        self._entries = clean

    @classmethod
    def from_rows(cls, ring, rows: Sequence[Sequence], cols: int | None = None):
        rows = [list(r) for r in rows]
        if cols is None:
            cols = len(rows[0]) if rows else 0
        entries = {}
        for i, r in enumerate(rows):
            if len(r) != cols:
                raise ValueError("ragged rows")
            for j, x in enumerate(r):
                if x != 0:
                    entries[(i, j)] = ring.coerce(x)
        return cls(ring, len(rows), cols, entries)

    @classmethod
    def from_columns(cls, ring, columns: Sequence[Sequence], rows: int):
        entries = {}
        for j, c in enumerate(columns):
            if len(c) != rows:
                raise ValueError("column length mismatch")
            for i, x in enumerate(c):
                if x != 0:
                    entries[(i, j)] = x
        return cls(ring, rows, len(columns), entries)

    @classmethod
    def identity(cls, ring, n: int):
        return cls(ring, n, n, {(i, i): 1 for i in range(n)})

    @classmethod
    def zeros(cls, ring, rows: int, cols: int):
        return cls(ring, rows, cols)

    def __getitem__(self, key):
        return self._entries.get(key, 0)

    def items(self):
        return sorted(self._entries.items())

    def nnz(self) -> int:
        return len(self._entries)

    def to_rows(self) -> list[list]:
        out = [[0] * self.cols for _ in range(self.rows)]
        for (i, j), x in self._entries.items():
            out[i][j] = x
        return out

    def column(self, j: int) -> list:
        col = [0] * self.rows
        for (i, jj), x in self._entries.items():
            if jj == j:
                col[i] = x
        return col

    def columns(self) -> list[list]:
        cols = [[0] * self.rows for _ in range(self.cols)]
        for (i, j), x in self._entries.items():
            cols[j][i] = x
        return cols

    def transpose(self) -> "Matrix":
        return Matrix(self.ring, self.cols, self.rows, {(j, i): x for (i, j), x in self._entries.items()})

    def apply(self, vec: Sequence) -> list:
        if len(vec) != self.cols:
            raise ValueError(f"vector of length {len(vec)} for {self.rows}x{self.cols} matrix")
        out = [0] * self.rows
        for (i, j), x in self._entries.items():
            if vec[j] != 0:
                out[i] += x * vec[j]
        return [self.ring.normalize(y) for y in out]

    def __matmul__(self, other: "Matrix") -> "Matrix":
        if self.cols != other.rows:
            raise ValueError(f"shape mismatch {self.rows}x{self.cols} @ {other.rows}x{other.cols}")
        by_row: dict[int, list] = {}
        for (k, j), y in other._entries.items():
            by_row.setdefault(k, []).append((j, y))
        acc: dict = {}
        for (i, k), x in self._entries.items():
            for j, y in by_row.get(k, ()):
                acc[(i, j)] = acc.get((i, j), 0) + x * y
        return Matrix(self.ring, self.rows, other.cols, acc)

    def __add__(self, other: "Matrix") -> "Matrix":
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise ValueError("shape mismatch")
        acc = dict(self._entries)
        for k, y in other._entries.items():
            acc[k] = acc.get(k, 0) + y
        return Matrix(self.ring, self.rows, self.cols, acc)

    def __neg__(self):
        return Matrix(self.ring, self.rows, self.cols, {k: -x for k, x in self._entries.items()})

    def __sub__(self, other):
        return self + (-other)

    def is_zero(self) -> bool:
        return not self._entries

    def __eq__(self, other):
        if not isinstance(other, Matrix):
            return NotImplemented
        return (self.rows, self.cols, self._entries) == (other.rows, other.cols, other._entries)

    def __repr__(self):
        return f"Matrix({self.ring}, {self.to_rows()})"

    def diagonal(self) -> list:
        return [self[i, i] for i in range(min(self.rows, self.cols))]

    @staticmethod
    def hstack(ring, blocks: Sequence["Matrix"], rows: int | None = None) -> "Matrix":
        if rows is None:
            rows = blocks[0].rows
        entries, off = {}, 0
        for b in blocks:
            if b.rows != rows:
                raise ValueError("row count mismatch in hstack")
            for (i, j), x in b._entries.items():
                entries[(i, j + off)] = x
            off += b.cols
        return Matrix(ring, rows, off, entries)

    @staticmethod
    def vstack(ring, blocks: Sequence["Matrix"], cols: int | None = None) -> "Matrix":
        if cols is None:
            cols = blocks[0].cols
        entries, off = {}, 0
        for b in blocks:
            if b.cols != cols:
                raise ValueError("column count mismatch in vstack")
            for (i, j), x in b._entries.items():
                entries[(i + off, j)] = x
            off += b.rows
        return Matrix(ring, off, cols, entries)


# --------------------------------------------------------------------------
# Smith normal form


@dataclass
class SmithData:
    """U A V = diag(d), with inverses of U and V kept alongside."""

    ring: CoefficientRing
    rows: int
    cols: int
    diag: list  # nonzero invariant factors d_0 | d_1 | ... (length = rank)
    U: list
    U_inv: list
    V: list
    V_inv: list

    @property
    def rank(self) -> int:
        return len(self.diag)


def _smith(ring: CoefficientRing, A: list[list], rows: int, cols: int) -> SmithData:
    mod = ring.p if ring.kind == PRIME_FIELD else None

    def norm(x):
        return x % mod if mod else x

    A = [list(r) for r in A]
    U = [[1 if i == j else 0 for j in range(rows)] for i in range(rows)]
    Ui = [[1 if i == j else 0 for j in range(rows)] for i in range(rows)]
    V = [[1 if i == j else 0 for j in range(cols)] for i in range(cols)]
    Vi = [[1 if i == j else 0 for j in range(cols)] for i in range(cols)]

    def swap_rows(a, b):
        if a == b:
            return
        A[a], A[b] = A[b], A[a]
        U[a], U[b] = U[b], U[a]
        for r in Ui:
            r[a], r[b] = r[b], r[a]

    def swap_cols(a, b):
        if a == b:
            return
        for r in A:
            r[a], r[b] = r[b], r[a]
        for r in V:
            r[a], r[b] = r[b], r[a]
        Vi[a], Vi[b] = Vi[b], Vi[a]

    def add_row(dst, src, f):
        # row_dst += f * row_src
        if f == 0:
            return
        ra, rs = A[dst], A[src]
        for j in range(cols):
            if rs[j] != 0:
                ra[j] = norm(ra[j] + f * rs[j])
        ua, us = U[dst], U[src]
        for j in range(rows):
            if us[j] != 0:
                ua[j] = norm(ua[j] + f * us[j])
        for r in Ui:
            if r[dst] != 0:
                r[src] = norm(r[src] - f * r[dst])

    def add_col(dst, src, f):
        # col_dst += f * col_src
        if f == 0:
            return
        for r in A:
            if r[src] != 0:
                r[dst] = norm(r[dst] + f * r[src])
        for r in V:
            if r[src] != 0:
                r[dst] = norm(r[dst] + f * r[src])
        va, vs = Vi[src], Vi[dst]
        for j in range(cols):
            if vs[j] != 0:
                va[j] = norm(va[j] - f * vs[j])

    def scale_row(i, u):
        A[i] = [norm(x * u) for x in A[i]]
        U[i] = [norm(x * u) for x in U[i]]
        inv = ring.inverse(u)
        for r in Ui:
            r[i] = norm(r[i] * inv)

    diag = []
    t = 0
    while t < min(rows, cols):
        best = None
        for i in range(t, rows):
            row = A[i]
            for j in range(t, cols):
                if row[j] != 0:
                    key = (ring.valuation(row[j]), i, j)
                    if best is None or key < best:
                        best = key
        if best is None:
            break
        swap_rows(t, best[1])
        swap_cols(t, best[2])
        while True:
            dirty = False
            piv = A[t][t]
            for i in range(t + 1, rows):
                if A[i][t] != 0:
                    q, r = ring.divmod(A[i][t], piv)
                    add_row(i, t, norm(-q))
                    dirty = dirty or r != 0
            for j in range(t + 1, cols):
                if A[t][j] != 0:
                    q, r = ring.divmod(A[t][j], piv)
                    add_col(j, t, norm(-q))
                    dirty = dirty or r != 0
            if dirty:
                cand = None
                for i in range(t + 1, rows):
                    if A[i][t] != 0:
                        key = (ring.valuation(A[i][t]), 0, i)
                        cand = key if cand is None or key < cand else cand
                for j in range(t + 1, cols):
                    if A[t][j] != 0:
                        key = (ring.valuation(A[t][j]), 1, j)
                        cand = key if cand is None or key < cand else cand
                if cand[1] == 0:
                    swap_rows(t, cand[2])
                else:
                    swap_cols(t, cand[2])
                continue
            bad = None
            for i in range(t + 1, rows):
                for j in range(t + 1, cols):
                    if A[i][j] != 0 and ring.quotient(A[i][j], piv) is None:
                        bad = i
                        break
                if bad is not None:
                    break
            if bad is None:
                break
            add_row(t, bad, 1)
        u = ring.associate_unit(A[t][t])
        if u != 1:
            scale_row(t, u)
        diag.append(A[t][t])
        t += 1
    return SmithData(ring, rows, cols, diag, U, Ui, V, Vi)


def smith_data(M: Matrix) -> SmithData:
    return _smith(M.ring, M.to_rows(), M.rows, M.cols)


def smith_normal_form(M: Matrix) -> tuple[Matrix, Matrix, Matrix]:
    """Return (S, U, V) with U*M*V = S diagonal and d_1 | d_2 | ... .

    Only for the integers and the p-local integers; over a field the
    linear-algebra routines below eliminate directly.
    """
    if M.ring.is_field:
        raise ValueError(f"smith_normal_form: unsupported ring kind {M.ring.kind}")
    data = smith_data(M)
    S = Matrix(M.ring, M.rows, M.cols, {(i, i): d for i, d in enumerate(data.diag)})
    return S, Matrix.from_rows(M.ring, data.U, M.rows), Matrix.from_rows(M.ring, data.V, M.cols)


# --------------------------------------------------------------------------
# solving


def _mat_vec(ring, rows: list[list], vec: Sequence) -> list:
    out = []
    for r in rows:
        s = 0
        for a, b in zip(r, vec):
            if a != 0 and b != 0:
                s += a * b
        out.append(ring.normalize(s))
    return out


def _solve_with(data: SmithData, b: Sequence):
    ring = data.ring
    c = _mat_vec(ring, data.U, b)
    y = [0] * data.cols
    for i, d in enumerate(data.diag):
        q = ring.quotient(c[i], d)
        if q is None:
            return None, i
        y[i] = q
    for i in range(data.rank, data.rows):
        if c[i] != 0:
            return None, i
    return _mat_vec(ring, data.V, y), None


def solve_linear(M: Matrix, b: Sequence):
    """Some x with M x = b, or None when the system has no solution over the ring.

    The answer is the Smith-form particular solution with every free
    parameter set to zero, so it is deterministic.
    """
    if len(b) != M.rows:
        raise ValueError("right-hand side has wrong length")
    b = [M.ring.normalize(x) for x in b]
    x, _ = _solve_with(smith_data(M), b)
    return x


@dataclass
class Infeasibility:
    """Witness that M x = b has no solution.

    ``combination`` gives a row combination y with y*M = divisor * w for an
    integral row w while y*b = ``value`` is not divisible by ``divisor``.
    A zero divisor means the combination kills M but not b.
    """

    combination: list
    divisor: object
    value: object


def infeasibility_certificate(M: Matrix, b: Sequence) -> Infeasibility | None:
    data = smith_data(M)
    x, row = _solve_with(data, list(b))
    if x is not None:
        return None
    ring = M.ring
    y = list(data.U[row])
    d = data.diag[row] if row < data.rank else 0
    value = ring.normalize(sum(a * c for a, c in zip(y, b)))
    return Infeasibility(y, d, value)


def kernel_basis(M: Matrix) -> list[list]:
    """Basis of {x : M x = 0}; a saturated lattice basis over a PID."""
    data = smith_data(M)
    return [[data.V[i][j] for i in range(M.cols)] for j in range(data.rank, M.cols)]


def column_span_basis(ring: CoefficientRing, gens: Sequence[Sequence], dim: int) -> list[list]:
    """A basis of the submodule spanned by the given vectors."""
    gens = [list(g) for g in gens if any(x != 0 for x in g)]
    if not gens:
        return []
    data = _smith(ring, [[g[i] for g in gens] for i in range(dim)], dim, len(gens))
    return [
        [ring.normalize(data.U_inv[i][j] * d) for i in range(dim)]
        for j, d in enumerate(data.diag)
    ]


def in_span(ring: CoefficientRing, gens: Sequence[Sequence], vec: Sequence, dim: int):
    """Coefficients c with sum c_i gens_i = vec, or None."""
    if not gens:
        return [] if all(x == 0 for x in vec) else None
    M = Matrix.from_columns(ring, [list(g) for g in gens], dim)
    return solve_linear(M, list(vec))


def preimage_basis(ring, d: Matrix, source_basis: Sequence[Sequence], target_gens: Sequence[Sequence]) -> list[list]:
    """Basis of {z in span(source_basis) : d z in span(target_gens)}."""
    src = [list(s) for s in source_basis]
    if not src:
        return []
    images = [d.apply(s) for s in src]
    cols = images + [[ring.normalize(-x) for x in t] for t in target_gens]
    K = kernel_basis(Matrix.from_columns(ring, cols, d.rows)) if cols else []
    gens = []
    for k in K:
        coeff = k[: len(src)]
        gens.append([ring.normalize(sum(c * s[i] for c, s in zip(coeff, src))) for i in range(d.cols)])
    return column_span_basis(ring, gens, d.cols)


# --------------------------------------------------------------------------
# homology


@dataclass
class HomologyPresentation:
    """A subquotient Z/B presented as sum of R/(d_i) plus a free part.

    ``generators`` lists torsion generators (in the order of ``torsion``)
    followed by free generators.
    """

    ring: CoefficientRing
    free_rank: int
    torsion: tuple
    generators: list
    dim: int
    _coords: Callable = field(repr=False, default=None)
    _transform: list = field(repr=False, default=None)
    _orders: list = field(repr=False, default=None)

    @property
    def is_zero(self) -> bool:
        return self.free_rank == 0 and not self.torsion

    @property
    def rank(self) -> int:
        return self.free_rank + len(self.torsion)

    def class_of(self, z: Sequence):
        """Coordinates of the class of a cycle: torsion residues, then free coefficients.

        Returns None when z does not lie in the cycle module.
        """
        c = self._coords(list(z))
        if c is None:
            return None
        ring = self.ring
        w = _mat_vec(ring, self._transform, c)
        out = []
        for wi, d in zip(w, self._orders):
            if d is None:
                continue
            out.append(ring.residue(wi, d))
        return tuple(out)

    def is_boundary(self, z: Sequence) -> bool:
        c = self.class_of(z)
        return c is not None and all(x == 0 for x in c)

    def summary(self) -> dict:
        return {
            "free_rank": self.free_rank,
            "torsion": [self.ring.format(t) for t in self.torsion],
        }


def quotient_presentation(ring: CoefficientRing, cycle_basis: Sequence[Sequence], boundary_gens: Sequence[Sequence],
                          dim: int, coords: Callable | None = None) -> HomologyPresentation:
    """Present span(cycle_basis) / span(boundary_gens); the latter must lie in the former.

    ``coords`` maps an ambient vector to its coordinates in cycle_basis
    (None if outside); a generic solver is used when omitted.
    """
    Z = [list(z) for z in cycle_basis]
    if coords is None:
        def coords(v, _Z=Z):
            return in_span(ring, _Z, v, dim)
    P_cols = []
    for b in boundary_gens:
        c = coords(list(b))
        if c is None:
            raise ValueError("boundary generator outside the cycle module")
        P_cols.append(c)
    k = len(Z)
    if P_cols:
        data = _smith(ring, [[c[i] for c in P_cols] for i in range(k)], k, len(P_cols))
        U, Ui, diag = data.U, data.U_inv, data.diag
    else:
        U = [[1 if i == j else 0 for j in range(k)] for i in range(k)]
        Ui = U
        diag = []
    orders, torsion, tors_gens, free_gens = [], [], [], []
    for i in range(k):
        gen = [ring.normalize(sum(Ui[r][i] * Z[r][a] for r in range(k) if Ui[r][i] != 0)) for a in range(dim)]
        if i < len(diag):
            d = diag[i]
            if ring.is_unit(d):
                orders.append(None)
            else:
                orders.append(d)
                torsion.append(d)
                tors_gens.append(gen)
        else:
            orders.append(0)
            free_gens.append(gen)
    return HomologyPresentation(ring, len(free_gens), tuple(torsion), tors_gens + free_gens, dim,
                                coords, U, orders)


def homology_at(d_in: Matrix, d_out: Matrix) -> HomologyPresentation:
    """ker(d_out) / im(d_in) at the middle slot of C --d_in--> M --d_out--> N."""
    ring = d_out.ring
    if d_in.rows != d_out.cols:
        raise ValueError("d_in and d_out do not meet at a common slot")
    if not (d_out @ d_in).is_zero():
        raise ValueError("composite-not-zero: d_out * d_in != 0")
    n = d_out.cols
    data = smith_data(d_out)
    r = data.rank
    K = [[data.V[i][j] for i in range(n)] for j in range(r, n)]

    def coords(v):
        full = _mat_vec(ring, data.V_inv, v)
        if any(x != 0 for x in full[:r]):
            return None
        return full[r:]

    images = [c for c in d_in.columns() if any(x != 0 for x in c)]
    return quotient_presentation(ring, K, images, n, coords)
