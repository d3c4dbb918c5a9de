"""Homology algebras, Massey triple products, minimal models by transfer, the m3 check.

Everything here is for dgas concentrated in horizontal degree 0, so the
degree |x| of an element is its vertical degree.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from .bigraded import BigradedModule
from .cochains import MultiCochain
from .linalg import Matrix, HomologyPresentation, column_span_basis, homology_at, in_span, solve_linear, kernel_basis
from .structure import (MorphismFamily, StructureFamily, _slot_matrix, check_classical_relations,
                        check_da_infinity, check_morphism, check_strict_unit, morphism_sides)


class MasseyUndefined(ValueError):
    """Raised when α1α2 or α2α3 is nonzero in homology."""


def _vec_to_dict(vec, slot) -> dict:
    return {slot[i]: c for i, c in enumerate(vec) if c}


def _dict_to_vec(d: dict, slot) -> list:
    pos = {x: i for i, x in enumerate(slot)}
    out = [0] * len(slot)
    for x, c in d.items():
        if c:
            if x not in pos:
                raise ValueError("vector has entries outside the expected degree")
            out[pos[x]] = c
    return out


def _degree_of(A: BigradedModule, vec: dict) -> int | None:
    degs = {A.degrees[x][1] for x, c in vec.items() if c}
    if len(degs) > 1:
        raise ValueError("element is not homogeneous")
    return degs.pop() if degs else None


@dataclass
class HomologyClass:
    degree: int
    coords: tuple

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coords)


class HomologyAlgebra:
    """H*(A) of a dga: per degree a presentation, cocycle representatives and products."""

    def __init__(self, m: StructureFamily):
        if not m.is_classical:
            raise ValueError("homology algebras are computed for dgas in horizontal degree 0")
        self.dga = m
        A = m.module
        self.module = A
        self.ring = A.ring
        self.d = m.component(0, 1)
        self.mu = m.component(0, 2)
        self.degrees = sorted({v for _, v in A.support()})
        self.pres: dict[int, HomologyPresentation] = {}
        for v in self.degrees:
            self.pres[v] = homology_at(self._dmat(v - 1), self._dmat(v))
        self.generators = []  # (degree, position, representative dict, order)
        self.scale: dict = {}  # (degree, position) -> unit u with old generator = u * new representative
        ring = self.ring
        for v in self.degrees:
            P = self.pres[v]
            orders = list(P.torsion) + [0] * P.free_rank
            for k, g in enumerate(P.generators):
                rep = _vec_to_dict(g, self.slot(v))
                if len(rep) == 1:
                    (b, u), = rep.items()
                    if u != 1 and ring.is_unit(u):
                        # prefer the basis element itself as representative
                        self.scale[(v, k)] = u
                        rep = {b: 1}
                self.generators.append((v, k, rep, orders[k]))

    def slot(self, v: int) -> tuple:
        return self.module.slot((0, v))

    def _dmat(self, v: int) -> Matrix:
        return _slot_matrix(self.d, (0, v), (0, v + 1))

    # classes -----------------------------------------------------------
    def class_of(self, vec: dict, degree: int | None = None) -> HomologyClass:
        v = _degree_of(self.module, vec) if degree is None else degree
        if v is None:
            v = degree if degree is not None else 0
        if v not in self.pres:
            return HomologyClass(v, ())
        c = self.pres[v].class_of(_dict_to_vec(vec, self.slot(v)))
        if c is None:
            raise ValueError("not a cycle")
        return HomologyClass(v, tuple(self._canon(v, k, x * self.scale.get((v, k), 1)) for k, x in enumerate(c)))

    def _canon(self, v: int, k: int, c):
        P = self.pres[v]
        orders = list(P.torsion) + [0] * P.free_rank
        return self.ring.residue(c, orders[k]) if orders[k] else self.ring.normalize(c)

    def representative(self, cls: HomologyClass) -> dict:
        out: dict = {}
        for (v, k, rep, _) in self.generators:
            if v != cls.degree:
                continue
            c = cls.coords[k]
            if not c:
                continue
            for y, x in rep.items():
                out[y] = out.get(y, 0) + c * x
        return {k: self.ring.normalize(c) for k, c in out.items() if self.ring.normalize(c)}

    def generator(self, name_or_index) -> HomologyClass:
        if isinstance(name_or_index, str):
            names = self.generator_names()
            idx = names.index(name_or_index)
        else:
            idx = name_or_index
        v, k, _, _ = self.generators[idx]
        coords = [0] * self.pres[v].rank
        coords[k] = 1
        return HomologyClass(v, tuple(coords))

    def generator_names(self) -> list:
        A = self.module
        out = []
        for v, k, rep, _ in self.generators:
            if len(rep) == 1 and list(rep.values())[0] == 1:
                out.append(f"[{A.names[next(iter(rep))]}]")
            else:
                out.append(f"[h{v}_{k}]")
        return out

    def format_class(self, cls: HomologyClass) -> str:
        names = self.generator_names()
        parts = []
        for (v, k, _, _), nm in zip(self.generators, names):
            if v != cls.degree:
                continue
            c = cls.coords[k]
            if c:
                parts.append(nm if c == 1 else f"{self.ring.format(c)}{nm}")
        return " + ".join(parts) if parts else "0"

    # products ----------------------------------------------------------
    def multiply(self, x: dict, y: dict) -> dict:
        out: dict = {}
        for a, ca in x.items():
            for b, cb in y.items():
                for z, c in self.mu.apply_basis((a, b)).items():
                    out[z] = out.get(z, 0) + ca * cb * c
        ring = self.ring
        return {k: ring.normalize(c) for k, c in out.items() if ring.normalize(c)}

    def product(self, a: HomologyClass, b: HomologyClass) -> HomologyClass:
        z = self.multiply(self.representative(a), self.representative(b))
        return self.class_of(z, a.degree + b.degree)

    def product_table(self) -> dict:
        names = self.generator_names()
        table = {}
        for i, gi in enumerate(self.generators):
            for j, gj in enumerate(self.generators):
                c = self.product(self.generator(i), self.generator(j))
                if not c.is_zero():
                    table[(names[i], names[j])] = self.format_class(c)
        return table

    def well_defined(self) -> bool:
        """Products of representatives with boundaries are boundaries."""
        for v in self.degrees:
            D = self._dmat(v - 1)
            bounds = [_vec_to_dict(c, self.slot(v)) for c in D.columns() if any(c)]
            for (w, _, rep, _) in self.generators:
                for b in bounds:
                    for z, deg in ((self.multiply(rep, b), v + w), (self.multiply(b, rep), v + w)):
                        if not z:
                            continue
                        if deg not in self.pres or not self.pres[deg].is_boundary(_dict_to_vec(z, self.slot(deg))):
                            return False
        return True

    def summary(self) -> dict:
        names = self.generator_names()
        return {
            "classes": [{"name": n, "degree": v, "order": self.ring.format(o) if o else "free"}
                        for n, (v, _, _, o) in zip(names, self.generators)],
            "products": {f"{a}*{b}": c for (a, b), c in sorted(self.product_table().items())},
            "well_defined": self.well_defined(),
        }

    # solving d u = z ------------------------------------------------------
    def primitive(self, z: dict, degree: int, rng: random.Random | None = None):
        """Some u with d u = z; with rng, a random cycle is added to vary the choice."""
        src = self.slot(degree - 1)
        D = self._dmat(degree - 1)
        if not src:
            return {} if not z else None
        x = solve_linear(D, _dict_to_vec(z, self.slot(degree)))
        if x is None:
            return None
        if rng is not None:
            for kv in kernel_basis(D):
                c = rng.randint(-3, 3)
                x = [a + c * b for a, b in zip(x, kv)]
        return {k: self.ring.normalize(c) for k, c in _vec_to_dict(x, src).items() if self.ring.normalize(c)}

    def random_boundary(self, degree: int, rng: random.Random) -> dict:
        D = self._dmat(degree - 1)
        out: dict = {}
        for col in D.columns():
            c = rng.randint(-3, 3)
            for i, x in enumerate(col):
                if x:
                    k = self.slot(degree)[i]
                    out[k] = out.get(k, 0) + c * x
        return {k: self.ring.normalize(c) for k, c in out.items() if self.ring.normalize(c)}


def homology_algebra(m: StructureFamily) -> HomologyAlgebra:
    return HomologyAlgebra(m)


# --------------------------------------------------------------------------
# Massey triple products


@dataclass
class MasseyProductResult:
    H: HomologyAlgebra = field(repr=False)
    degree: int
    value: HomologyClass
    representative: dict
    indeterminacy: list  # coordinate vectors spanning α1 H + H α3
    choices: dict = field(default_factory=dict)

    def _relations(self) -> list:
        P = self.H.pres.get(self.degree)
        if P is None:
            return []
        out = []
        for k, d in enumerate(list(P.torsion)):
            e = [0] * P.rank
            e[k] = d
            out.append(e)
        return out

    def _in_indeterminacy(self, coords) -> bool:
        P = self.H.pres.get(self.degree)
        if P is None or P.rank == 0:
            return True
        gens = [list(g) for g in self.indeterminacy] + self._relations()
        return in_span(self.H.ring, gens, list(coords), P.rank) is not None

    @property
    def zero_indeterminacy(self) -> bool:
        return all(self._in_indeterminacy([0] * len(g)) and not any(
            x for x in _reduce(self.H, self.degree, g)) for g in self.indeterminacy)

    def contains(self, cls: HomologyClass) -> bool:
        if cls.degree != self.degree:
            return False
        diff = [a - b for a, b in zip(cls.coords, self.value.coords)]
        return self._in_indeterminacy(diff)

    def same_coset(self, other: "MasseyProductResult") -> bool:
        if other.degree != self.degree or not self.contains(other.value):
            return False
        return (all(other._in_indeterminacy(g) for g in self.indeterminacy)
                and all(self._in_indeterminacy(g) for g in other.indeterminacy))

    def as_dict(self) -> dict:
        H = self.H
        return {
            "degree": self.degree,
            "value": H.format_class(self.value),
            "representative": {H.module.names[k]: H.ring.format(c) for k, c in sorted(self.representative.items())},
            "indeterminacy": [H.format_class(HomologyClass(self.degree, tuple(g))) for g in self.indeterminacy
                              if any(_reduce(H, self.degree, g))],
            "zero_indeterminacy": self.zero_indeterminacy,
        }


def _reduce(H: HomologyAlgebra, degree: int, coords) -> list:
    P = H.pres.get(degree)
    if P is None:
        return []
    out = []
    orders = list(P.torsion) + [0] * P.free_rank
    for c, d in zip(coords, orders):
        out.append(H.ring.residue(c, d) if d else c)
    return out


def _as_class(H: HomologyAlgebra, x) -> HomologyClass:
    if isinstance(x, HomologyClass):
        return x
    if isinstance(x, str):
        return H.generator(x)
    raise TypeError("expected a homology class or a generator name")


def scalar_class(H: HomologyAlgebra, c) -> HomologyClass:
    """The class of c times the unit (degree 0)."""
    A = H.module
    return H.class_of({A.unit_index: H.ring.coerce(c)}, 0)


def massey_triple(H: HomologyAlgebra, a1, a2, a3, rng: random.Random | None = None) -> MasseyProductResult:
    """<α1, α2, α3> from d u_i = (-1)^(1+|a_i|) a_i a_(i+1) and the defining combination."""
    a1, a2, a3 = (_as_class(H, x) for x in (a1, a2, a3))
    ring = H.ring
    if not H.product(a1, a2).is_zero() or not H.product(a2, a3).is_zero():
        raise MasseyUndefined("the Massey product needs α1α2 = 0 and α2α3 = 0")
    reps = []
    for a in (a1, a2, a3):
        r = H.representative(a)
        if rng is not None:
            b = H.random_boundary(a.degree, rng)
            r = {k: ring.normalize(r.get(k, 0) + b.get(k, 0)) for k in set(r) | set(b)}
            r = {k: c for k, c in r.items() if c}
        reps.append(r)
    x1, x2, x3 = reps
    d1, d2, d3 = a1.degree, a2.degree, a3.degree

    def scaled(vec, s):
        return {k: ring.normalize(s * c) for k, c in vec.items() if ring.normalize(s * c)}

    z1 = scaled(H.multiply(x1, x2), -1 if (1 + d1) % 2 else 1)
    z2 = scaled(H.multiply(x2, x3), -1 if (1 + d2) % 2 else 1)
    u1 = H.primitive(z1, d1 + d2, rng)
    u2 = H.primitive(z2, d2 + d3, rng)
    if u1 is None or u2 is None:
        raise MasseyUndefined("a defining product is not a boundary for these representatives")
    du1 = d1 + d2 - 1
    t1 = scaled(H.multiply(x1, u2), -1 if (1 + d1) % 2 else 1)
    t2 = scaled(H.multiply(u1, x3), -1 if (1 + du1) % 2 else 1)
    val = {k: ring.normalize(t1.get(k, 0) + t2.get(k, 0)) for k in set(t1) | set(t2)}
    val = {k: c for k, c in val.items() if c}
    deg = d1 + d2 + d3 - 1
    cls = H.class_of(val, deg)
    indet = []
    for i, (v, _, _, _) in enumerate(H.generators):
        g = H.generator(i)
        if v == d2 + d3 - 1:
            indet.append(list(H.product(a1, g).coords))
        if v == d1 + d2 - 1:
            indet.append(list(H.product(g, a3).coords))
    indet = [g for g in indet if g and any(g)]
    return MasseyProductResult(H, deg, cls, val, indet,
                               {"u1": u1, "u2": u2, "representatives": reps})


def choice_independent(H: HomologyAlgebra, a1, a2, a3, trials: int = 20, seed: int = 0) -> bool:
    base = massey_triple(H, a1, a2, a3)
    rng = random.Random(seed)
    return all(massey_triple(H, a1, a2, a3, rng).same_coset(base) for _ in range(trials))


# --------------------------------------------------------------------------
# transfer to a minimal model over a field


@dataclass
class MinimalModel:
    H: HomologyAlgebra
    module: BigradedModule
    structure: StructureFamily
    morphism: MorphismFamily
    window: int | None
    checks: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {
            "classes": list(self.module.names),
            "operations": {f"m{j}": _records(c) for (_, j), c in self.structure.components.items()},
            "checks": self.checks,
            "window": self.window,
        }


def _records(c: MultiCochain) -> list:
    A, B = c.source, c.target
    return [{"inputs": [A.names[x] for x in ins], "output": B.names[y], "coefficient": B.ring.format(v)}
            for (ins, y), v in sorted(c.entries.items())]


class _Splitting:
    """A^v = H ⊕ B ⊕ L with d: L^v -> B^(v+1) invertible."""

    def __init__(self, H: HomologyAlgebra):
        self.H = H
        ring = H.ring
        self.blocks = {}
        for v in H.degrees:
            slot = H.slot(v)
            n = len(slot)
            Bv = column_span_basis(ring, [c for c in H._dmat(v - 1).columns() if any(c)], n)
            Hv = [_dict_to_vec(rep, slot) for (w, _, rep, _) in H.generators if w == v]
            cols = Bv + Hv
            # complete with standard vectors, keeping the echelon order deterministic
            Lv = []
            for i in range(n):
                e = [1 if j == i else 0 for j in range(n)]
                trial = cols + Lv + [e]
                if _rank(ring, trial, n) == len(trial):
                    Lv.append(e)
            basis = Bv + Hv + Lv
            if len(basis) != n:
                raise ValueError("could not split the complex; is the ring a field?")
            M = Matrix.from_columns(ring, basis, n)
            self.blocks[v] = (slot, M, len(Bv), len(Hv), len(Lv), Lv)

    def coords(self, v: int, vec: dict):
        slot, M, nb, nh, nl, _ = self.blocks[v]
        x = solve_linear(M, _dict_to_vec(vec, slot))
        return x[:nb], x[nb:nb + nh], x[nb + nh:]

    def homotopy(self, v: int, vec: dict) -> dict:
        """h(b) in L^(v-1) with d h(b) = b for a boundary b in degree v (only its B part is used)."""
        H = self.H
        slot, M, nb, nh, nl, _ = self.blocks[v]
        bpart, _, _ = self.coords(v, vec)
        b_vec = [sum(c * M[(i, j)] for j, c in enumerate(bpart)) for i in range(len(slot))]
        if v - 1 not in self.blocks:
            return {}
        slot0, M0, nb0, nh0, nl0, L0 = self.blocks[v - 1]
        D = H._dmat(v - 1)
        DL = Matrix.from_columns(H.ring, [D.apply(l) for l in L0], len(slot)) if L0 else None
        if DL is None:
            return {}
        y = solve_linear(DL, b_vec)
        out = [sum(c * l[i] for c, l in zip(y, L0)) for i in range(len(slot0))]
        return {k: H.ring.normalize(c) for k, c in _vec_to_dict(out, slot0).items() if H.ring.normalize(c)}


def _rank(ring, cols, n) -> int:
    return len(column_span_basis(ring, cols, n))


def transfer_minimal_model(m: StructureFamily, arity_max: int | None = None) -> MinimalModel:
    """Minimal A-infinity model on H*(A) over a field, built arity by arity.

    With ι the chosen representatives, π the projection along B ⊕ L and h
    the inverse of d on L, the arity-n morphism equation reads
    f1 m'_n - d f_n = R_n with R_n built from lower data, so
    m'_n = π(R_n) and f_n = -h(R_n - ι π R_n).
    """
    if not m.ring.is_field:
        raise ValueError("transfer needs field coefficients")
    H = HomologyAlgebra(m)
    A = m.module
    names = H.generator_names()
    unit_name = None
    for nm, (v, k, rep, _) in zip(names, H.generators):
        if rep == {A.unit_index: 1}:
            unit_name = nm
    Hmod = BigradedModule(A.ring, [(nm, (0, v)) for nm, (v, _, _, _) in zip(names, H.generators)], unit=unit_name)
    from .structure import arity_bound
    bound = arity_bound(Hmod, 2, normalized=True)
    W = arity_max if arity_max is not None else (max(bound, 2) if bound is not None else None)
    if W is None:
        raise ValueError("the minimal model has unbounded arity; pass an arity window")
    split = _Splitting(H)
    f1 = MultiCochain(Hmod, 1, 0, 0, {((i,), y): c for i, (_, _, rep, _) in enumerate(H.generators)
                                      for y, c in rep.items()}, target=A)
    fcomps = {(0, 1): f1}
    mcomps: dict = {}

    def class_index(v, coords):
        out = {}
        for i, (w, k, _, _) in enumerate(H.generators):
            if w == v and coords[k]:
                out[i] = coords[k]
        return out

    for n in range(2, W + 1):
        src = StructureFamily(Hmod, mcomps, None, "minimal model")
        fam = MorphismFamily(src, m, fcomps, None)
        lhs, rhs = morphism_sides(fam)
        zero = MultiCochain.zero(Hmod, n, 0, 2 - n, A)
        R = rhs.get((0, n), zero) - lhs.get((0, n), zero)
        m_ent, f_ent = {}, {}
        by_input: dict = {}
        for (ins, y), c in R.entries.items():
            by_input.setdefault(ins, {})[y] = c
        for ins, vec in by_input.items():
            v = A.degrees[next(iter(vec))][1]
            _, hpart, _ = split.coords(v, vec)
            for i, c in class_index(v, hpart).items():
                m_ent[(ins, i)] = c
            iota = {}
            for i, c in class_index(v, hpart).items():
                for y, cy in H.generators[i][2].items():
                    iota[y] = iota.get(y, 0) + c * cy
            rest = {y: A.ring.normalize(vec.get(y, 0) - iota.get(y, 0)) for y in set(vec) | set(iota)}
            rest = {y: c for y, c in rest.items() if c}
            for y, c in split.homotopy(v, rest).items():
                f_ent[(ins, y)] = -c
        mn = MultiCochain(Hmod, n, 0, 2 - n, m_ent)
        fn = MultiCochain(Hmod, n, 0, 1 - n, f_ent, A)
        if not mn.is_zero():
            mcomps[(0, n)] = mn
        if not fn.is_zero():
            fcomps[(0, n)] = fn
    complete = bound is not None and W >= bound
    model = StructureFamily(Hmod, mcomps, None if complete else W, "minimal model")
    mor = MorphismFamily(model, m, fcomps, None if complete else W)
    checks = {
        "m1_zero": (0, 1) not in mcomps,
        "classical_relations": check_classical_relations(model).status,
        "structure": check_da_infinity(model).status,
        "morphism": check_morphism(mor).status,
        "strict_unit": check_strict_unit(model).ok,
        "f1_quasi_isomorphism": f1_is_quasi_isomorphism(H, f1),
    }
    return MinimalModel(H, Hmod, model, mor, W, checks)


def f1_is_quasi_isomorphism(H: HomologyAlgebra, f1: MultiCochain) -> bool:
    """The classes of f1(generators) form a basis of H*(A) degree by degree."""
    src = f1.source
    ring = H.ring
    for v in H.degrees:
        idx = [i for i, d in enumerate(src.degrees) if d == (0, v)]
        rows = []
        for i in idx:
            img = {y: c for ((x,), y), c in f1.entries.items() if x == i}
            cls = H.class_of(img, v)
            rows.append(list(cls.coords))
        r = H.pres[v].rank
        if len(rows) != r:
            return False
        if r and _rank(ring, rows, r) != r:
            return False
    return True


def m3_membership(model: MinimalModel, a1, a2, a3) -> dict:
    """Is (-1)^(|α1|+|α2|+1) m3(α1⊗α2⊗α3) in <α1, α2, α3>?"""
    H = model.H
    cls = [_as_class(H, x) for x in (a1, a2, a3)]
    ids = []
    for c in cls:
        nz = [(k, x) for k, x in enumerate(c.coords) if x]
        if len(nz) != 1 or nz[0][1] != 1:
            raise ValueError("m3 membership is checked on generator classes")
        gi = next(i for i, (v, k, _, _) in enumerate(H.generators) if v == c.degree and k == nz[0][0])
        ids.append(gi)
    m3 = model.structure.component(0, 3)
    out_vec = m3.apply_basis(tuple(ids))
    deg = sum(c.degree for c in cls) - 1
    coords = [0] * (H.pres[deg].rank if deg in H.pres else 0)
    for i, c in out_vec.items():
        v, k, _, _ = H.generators[i]
        coords[k] += c
    raw = HomologyClass(deg, tuple(H.ring.normalize(c) for c in coords))
    s = -1 if (cls[0].degree + cls[1].degree + 1) % 2 else 1
    signed = HomologyClass(deg, tuple(H.ring.normalize(s * c) for c in raw.coords))
    mp = massey_triple(H, *cls)
    return {
        "m3": H.format_class(raw),
        "signed_m3": H.format_class(signed),
        "massey": mp.as_dict(),
        "member": mp.contains(signed),
        "member_with_opposite_sign": mp.contains(raw) if s == -1 else mp.contains(
            HomologyClass(deg, tuple(H.ring.normalize(-c) for c in raw.coords))),
    }
