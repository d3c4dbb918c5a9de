"""Twisting cochains, Maurer-Cartan checks, perturbation, trivialization, extension.

A structure is split as base + a, where the base is a bidga (or a dga,
or a minimal model m2 + m3) and a collects the remaining operations.
Perturbations push a structure forward along a morphism id + b; the new
operations are solved from the morphism equation cell by cell, so every
output is checked against the structure and morphism equations rather
than trusted.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .cochains import CochainSum, MultiCochain, apply_tensor, bracket, cochain_basis, compose
from .hochschild import classical_differential, differential_D
from .linalg import Matrix, infeasibility_certificate, kernel_basis, solve_linear
from .structure import (INSUFFICIENT, REFUTED, VERIFIED, CheckReport, CellResult, MorphismFamily,
                        StructureFamily, arity_bound, check_da_infinity, check_morphism, entry_witness,
                        epsilon_exponent, morphism_sides, structure_equation_terms)

BIDGA_LABELS = ((0, 1), (1, 1), (0, 2))
THEOREMS = ("derived", "classical", "massey-fixed")


class WindowInsufficient(Exception):
    """Raised when a computation needs operations beyond the declared arity window."""


class SideConditionError(ValueError):
    pass


# --------------------------------------------------------------------------
# polynomial coefficients for the extension solver


class Poly:
    """Polynomial in numbered unknowns with ring coefficients; monomials are sorted index tuples."""

    _is_polynomial = True
    __slots__ = ("terms", "ring")

    def __init__(self, terms: dict | None = None, ring=None):
        self.ring = ring
        clean = {}
        for mono, c in (terms or {}).items():
            if ring is not None:
                c = ring.normalize(c)
            if c:
                clean[mono] = c
        self.terms = clean

    @classmethod
    def var(cls, i: int, ring) -> "Poly":
        return cls({(i,): 1}, ring)

    @classmethod
    def const(cls, c, ring) -> "Poly":
        return cls({(): c}, ring)

    def _lift(self, other) -> "Poly":
        if isinstance(other, Poly):
            return other
        return Poly({(): other}, self.ring)

    def __add__(self, other):
        other = self._lift(other)
        acc = dict(self.terms)
        for m, c in other.terms.items():
            acc[m] = acc.get(m, 0) + c
        return Poly(acc, self.ring)

    __radd__ = __add__

    def __neg__(self):
        return Poly({m: -c for m, c in self.terms.items()}, self.ring)

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        other = self._lift(other)
        acc: dict = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = tuple(sorted(m1 + m2))
                acc[m] = acc.get(m, 0) + c1 * c2
        return Poly(acc, self.ring)

    __rmul__ = __mul__

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        return self.terms == self._lift(other).terms

    def __hash__(self):
        return hash(tuple(sorted(self.terms.items())))

    def __repr__(self):
        return f"Poly({self.terms})"

    @property
    def degree(self) -> int:
        return max((len(m) for m in self.terms), default=0)

    def variables(self) -> set:
        return {x for m in self.terms for x in m}

    def substitute(self, values: dict) -> "Poly":
        acc: dict = {}
        for m, c in self.terms.items():
            rest = []
            for x in m:
                if x in values:
                    c = c * values[x]
                else:
                    rest.append(x)
            key = tuple(rest)
            acc[key] = acc.get(key, 0) + c
        return Poly(acc, self.ring)

    def linear(self) -> tuple[dict, object] | None:
        """({var: coeff}, constant) when the degree is at most one."""
        if self.degree > 1:
            return None
        return {m[0]: c for m, c in self.terms.items() if m}, self.terms.get((), 0)


# --------------------------------------------------------------------------
# twisting cochains


def _base_of(m: StructureFamily, labels) -> StructureFamily:
    return StructureFamily(m.module, {k: c for k, c in m.components.items() if k in labels},
                           m.arity_max, m.name)


class TwistingCochain:
    """Higher operations a_ij (i + j >= 3) on top of a fixed base structure."""

    def __init__(self, base: StructureFamily, components: dict | None = None, arity_max: int | None = None):
        self.base = base
        self.arity_max = arity_max if arity_max is not None else base.arity_max
        comps = {}
        for (i, j), c in (components or {}).items():
            if i + j < 3:
                raise ValueError(f"a_{i}{j}: twisting cochains live in i + j >= 3")
            if (i, j) in base.components:
                raise ValueError(f"a_{i}{j} overlaps a base operation")
            if c.tridegree != (j, i, 2 - i - j):
                raise ValueError(f"a_{i}{j} has tridegree {c.tridegree}")
            if not c.is_zero():
                comps[(i, j)] = c
        self.components = dict(sorted(comps.items()))

    @classmethod
    def split(cls, m: StructureFamily, base_labels=BIDGA_LABELS) -> "TwistingCochain":
        base = _base_of(m, base_labels)
        rest = {k: c for k, c in m.components.items() if k not in base_labels}
        return cls(base, rest, m.arity_max)

    @property
    def module(self):
        return self.base.module

    def component(self, i, j) -> MultiCochain:
        c = self.components.get((i, j))
        return c if c is not None else MultiCochain.zero(self.module, j, i, 2 - i - j)

    def labels(self) -> list:
        return sorted(self.components)

    def is_zero(self) -> bool:
        return not self.components

    def as_sum(self) -> CochainSum:
        return CochainSum.of(*self.components.values(), source=self.module)

    def structure(self, name: str | None = None) -> StructureFamily:
        comps = dict(self.base.components)
        comps.update(self.components)
        return StructureFamily(self.module, comps, self.arity_max, name or self.base.name)

    def __eq__(self, other):
        if not isinstance(other, TwistingCochain):
            return NotImplemented
        return ({k: c.entries for k, c in self.components.items()}
                == {k: c.entries for k, c in other.components.items()})


def maurer_cartan_residual(a: TwistingCochain) -> tuple[str, CochainSum] | None:
    """The applicable formula's residual, or None when neither formula applies to the base.

    Classical (base of horizontal degree 0, a classical): D(a) + a∘a with D = [m, -].
    Derived (bidga base with m01 = 0): 2D(a) + [a, a^#] - 4[∂, a_odd].
    """
    base = a.base
    A = a.module
    s = a.as_sum()
    if base.is_classical and all(i == 0 for i, _ in a.components) and base.is_bidga_shaped():
        return "classical", classical_differential(base, s) + compose(s, s)
    if base.is_bidga_shaped() and (0, 1) not in base.components:
        d = base.component(1, 1)
        odd = CochainSum.of(*[c for (i, _), c in a.components.items() if i % 2], source=A)
        res = differential_D(base, s, check=False).scale(2) + bracket(s, s.hash())
        if not odd.is_zero():
            res = res - bracket(d, odd).scale(4)
        return "derived", res
    return None


def check_maurer_cartan(a: TwistingCochain) -> CheckReport:
    """Formula route per tridegree plus the full structure equation; both verdicts are reported."""
    W = a.arity_max
    full = check_da_infinity(a.structure())
    report = CheckReport("Maurer-Cartan equation", total=full.total)
    got = maurer_cartan_residual(a)
    formula_ok = None
    if got is not None:
        kind, res = got
        for comp in sorted(res.components(), key=lambda c: (c.arity, c.hshift)):
            report.cells.append(CellResult((comp.hshift, comp.arity), comp.is_zero(),
                                           W is None or comp.arity <= W, entry_witness(comp)))
        formula_ok = res.is_zero()
        report.extra["formula"] = kind
    else:
        report.extra["formula"] = None
        report.cells.extend(full.cells)
    structure_ok = all(c.ok for c in full.cells)
    report.extra["formula_holds"] = formula_ok
    report.extra["structure_equations_hold"] = structure_ok
    report.extra["routes_agree"] = formula_ok is None or formula_ok == structure_ok
    if formula_ok is not None and formula_ok != structure_ok:
        report.failures.append({"condition": "formula and structure equation disagree"})
    return report


# --------------------------------------------------------------------------
# pushing a structure forward along id + b


def default_window(m: StructureFamily, arity_max: int | None = None) -> int:
    if arity_max is not None:
        return arity_max
    if m.arity_max is not None:
        return m.arity_max
    b = arity_bound(m.module, 2, normalized=True)
    if b is None:
        raise WindowInsufficient("structure operations have unbounded arity; declare an arity window")
    return max(2, b, m.max_arity())


def complete_by_degree(m: StructureFamily) -> StructureFamily:
    """Drop the window when it already covers every arity allowed by degrees.

    Strictly unital higher operations vanish on tuples with the unit, and on
    the other tuples they vanish beyond the weight bound.
    """
    if m.arity_max is None:
        return m
    bound = arity_bound(m.module, 2, normalized=True)
    if bound is None or m.arity_max < bound:
        return m
    if any(not c.is_normalized() for (i, j), c in m.components.items() if i + j >= 3):
        return m
    return StructureFamily(m.module, m.components, None, m.name)


def _max_h(module) -> int:
    return max((h for h, _ in module.degrees), default=0)


def pushforward(m: StructureFamily, f_higher: dict, reading="a", arity_max: int | None = None,
                name: str | None = None) -> tuple[StructureFamily, MorphismFamily]:
    """The structure m̄ making id + f_higher a morphism m -> m̄.

    Cells (u, v) are solved in increasing u + v.  The term m̄_uv(id ⊗ ... ⊗ id)
    enters with sign (-1)^eps(u; 0..; 1..), and every other right-hand term
    only involves cells solved earlier.
    """
    A = m.module
    W = default_window(m, arity_max)
    m = complete_by_degree(m)
    ident = MultiCochain.identity(A)
    flist = [((0, 1), ident)] + sorted((k, c) for k, c in f_higher.items() if not c.is_zero() and k != (0, 1))
    for (s, t), c in flist:
        if t > W:
            raise WindowInsufficient(f"f_{s}{t} exceeds the arity window {W}")
    fam = MorphismFamily(m, m, dict(flist), arity_max=W)
    lhs, _ = morphism_sides(fam, reading)
    hmax = _max_h(A)
    cells = sorted(((u, v) for v in range(1, W + 1) for u in range(0, v * hmax + 1)),
                   key=lambda c: (c[0] + c[1], c[0]))
    mbar: dict = {}
    for (u, v) in cells:
        acc = lhs.get((u, v))
        if acc is None:
            acc = MultiCochain.zero(A, v, u, 2 - u - v)
        for (i, j), mij in mbar.items():
            if i > u or j > v:
                continue
            for chosen in _sequences(flist, j, u - i, v):
                if all(lab == (0, 1) for lab, _ in chosen) and (i, j) == (u, v):
                    continue
                ps = [lab[0] for lab, _ in chosen]
                qs = [lab[1] for lab, _ in chosen]
                eps = reading(u, ps, qs) if callable(reading) else epsilon_exponent(u, ps, qs, reading)
                term = apply_tensor(mij, [c for _, c in chosen])
                acc = acc + term if eps & 1 else acc - term
        lead = reading(u, [0] * v, [1] * v) if callable(reading) else epsilon_exponent(u, [0] * v, [1] * v, reading)
        value = -acc if lead & 1 else acc
        if not value.is_zero():
            mbar[(u, v)] = value
    # complete by degree: normalized higher operations beyond the bound vanish
    bound = arity_bound(A, 2, normalized=True)
    complete = (bound is not None and W >= max(bound, 2) and (m.arity_max is None or m.arity_max >= bound)
                and all(c.is_normalized() for (s, t), c in flist if s + t >= 2))
    W_out = None if complete else W
    target = StructureFamily(A, mbar, W_out, name or m.name)
    return target, MorphismFamily(m, target, dict(flist), arity_max=W_out)


def _sequences(flist, j: int, p_total: int, q_total: int):
    """Sequences of j morphism components with sum p = p_total and sum q = q_total."""
    out = []

    def rec(chosen, p, q):
        left = j - len(chosen)
        if left == 0:
            if p == p_total and q == q_total:
                out.append(list(chosen))
            return
        if q + left > q_total or p > p_total:
            return
        for lab, c in flist:
            rec(chosen + [(lab, c)], p + lab[0], q + lab[1])

    rec([], 0, 0)
    return out


# --------------------------------------------------------------------------
# perturbation steps


def _morphism_label(b: MultiCochain) -> tuple[int, int]:
    n, s, i = b.tridegree
    if i != 1 - s - n:
        raise ValueError(f"cochain of tridegree {b.tridegree} is not a morphism component (total degree 1)")
    return (s, n)


def _single(sumlike) -> MultiCochain | None:
    if isinstance(sumlike, MultiCochain):
        return None if sumlike.is_zero() else sumlike
    comps = [c for c in sumlike.components() if not c.is_zero()]
    if len(comps) > 1:
        raise SideConditionError("the perturbation changes more than one operation at lowest order")
    return comps[0] if comps else None


@dataclass
class PerturbationStep:
    case: str
    b: MultiCochain
    label: tuple
    before: TwistingCochain
    after: TwistingCochain
    morphism: MorphismFamily
    changed: tuple | None
    claims: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        """Every claim holds; certification is tracked separately."""
        return all(v for k, v in self.claims.items() if isinstance(v, bool) and k != "certified")

    @property
    def certified(self) -> bool:
        return bool(self.claims.get("certified"))

    @property
    def status(self) -> str:
        if not self.ok:
            return REFUTED
        return VERIFIED if self.certified else INSUFFICIENT

    def as_dict(self) -> dict:
        return {
            "case": self.case,
            "b_label": list(self.label),
            "b_tridegree": list(self.b.tridegree),
            "b": cochain_record(self.b),
            "changed": list(self.changed) if self.changed else None,
            "claims": dict(self.claims),
            "after": {f"{i},{j}": cochain_record(c) for (i, j), c in self.after.components.items()},
        }


def cochain_record(c: MultiCochain) -> list:
    A, B = c.source, c.target
    return [{"inputs": [A.names[x] for x in ins], "output": B.names[y], "coefficient": B.ring.format(v)}
            for (ins, y), v in sorted(c.entries.items())]


CASES = ("A", "B", "classical", "coupled")


def _side_operators(a: TwistingCochain, case: str) -> tuple[list, list]:
    """(operators whose bracket with b must vanish, operators giving the change)."""
    base = a.base
    if case == "A":
        return [base.component(1, 1)], [base.component(0, 2)]
    if case == "B":
        return [base.component(0, 2)], [base.component(1, 1)]
    if case in ("classical", "coupled"):
        return [], [c for c in base.components.values()]
    raise ValueError(f"unknown perturbation case {case!r}")


def _stage_key(label):
    """Order in which operations are killed: total i + j first, then i."""
    i, j = label
    return (i + j, i)


def perturb(a: TwistingCochain, b: MultiCochain, case: str, reading="a") -> PerturbationStep:
    """Push base + a forward along id + b and verify the perturbation claims.

    Case A: [∂, b] = 0 and ā changes by -[μ, b].  Case B: [μ, b] = 0 and ā
    changes by -[∂, b].  Classical (also for a fixed m2 + m3 base): all but
    one of the brackets [m_r, b] vanish and ā changes by -D(b).  Coupled:
    no side condition; the claim is made at the earliest label reached by
    a nonzero bracket, and the later ones are recorded.
    """
    label = _morphism_label(b)
    if label[0] + label[1] < 2:
        raise ValueError("the perturbing cochain must have s + t >= 2")
    vanish, change_ops = _side_operators(a, case)
    for op in vanish:
        br = bracket(op, b)
        if not br.is_zero():
            raise SideConditionError(f"case {case}: bracket with the fixed operation is nonzero")
    parts = [_single(bracket(op, b)) for op in change_ops]
    nonzero = sorted((p for p in parts if p is not None and not p.is_zero()),
                     key=lambda p: _stage_key((p.hshift, p.arity)))
    if case == "classical" and len(nonzero) > 1:
        raise SideConditionError("classical case: more than one of the brackets [m_r, p] is nonzero")
    change = nonzero[0] if nonzero else None
    changed = (change.hshift, change.arity) if change is not None else None
    m = a.structure()
    mbar, f = pushforward(m, {label: b} if not b.is_zero() else {}, reading, a.arity_max)
    after = TwistingCochain(a.base, {k: c for k, c in mbar.components.items() if k not in a.base.components},
                            mbar.arity_max)
    claims: dict = {}
    claims["base_unchanged"] = all(mbar.component(*k) == c for k, c in a.base.components.items()) and \
        all(k in a.base.components or k in after.components for k in mbar.components)
    if changed is not None:
        expected = a.component(*changed) - change
        got = after.component(*changed)
        claims["lemma_formula"] = got == expected
        if got != expected and got == a.component(*changed) + change:
            claims["opposite_sign"] = True
        key = _stage_key(changed)
        claims["lower_unchanged"] = all(after.component(*lab) == a.component(*lab)
                                        for lab in set(after.components) | set(a.components)
                                        if _stage_key(lab) < key)
        for p in nonzero[1:]:
            lab = (p.hshift, p.arity)
            same = after.component(*lab) == a.component(*lab) - p
            claims[f"coupled_{lab[0]}{lab[1]}"] = "formula holds" if same else "differs by higher terms"
    else:
        claims["lemma_formula"] = True
        claims["lower_unchanged"] = True
    mc = check_da_infinity(mbar)
    mor = check_morphism(f, reading)
    claims["twisting"] = mc.ok
    claims["morphism"] = mor.ok
    claims["certified"] = mc.status == VERIFIED and mor.status == VERIFIED
    return PerturbationStep(case, b, label, a, after, f, changed, claims)


# --------------------------------------------------------------------------
# trivialization


@dataclass
class TrivializationCertificate:
    theorem: str
    start: TwistingCochain
    steps: list
    final: TwistingCochain | None
    failure: dict | None = None
    total: bool = True

    @property
    def status(self) -> str:
        if self.failure is not None:
            return REFUTED
        if not self.total or not all(s.certified for s in self.steps):
            return INSUFFICIENT
        return VERIFIED

    def as_dict(self) -> dict:
        return {
            "theorem": self.theorem,
            "status": self.status,
            "steps": [s.as_dict() for s in self.steps],
            "final_is_trivial": self.final is not None and self.final.is_zero(),
            "failure": self.failure,
            "total": self.total,
        }


def base_labels_for(theorem: str) -> tuple:
    if theorem == "derived":
        return ((1, 1), (0, 2))
    if theorem == "classical":
        return ((0, 1), (0, 2))
    if theorem == "massey-fixed":
        return ((0, 2), (0, 3))
    raise ValueError(f"unknown theorem {theorem!r}; expected one of {THEOREMS}")


def _preconditions(m: StructureFamily, theorem: str) -> TwistingCochain:
    if theorem == "derived":
        if (0, 1) in m.components:
            raise ValueError("the derived criterion needs m01 = 0")
    elif theorem == "classical":
        if not m.is_classical:
            raise ValueError("the classical criterion needs a structure in horizontal degree 0")
    elif theorem == "massey-fixed":
        if not m.is_classical or (0, 1) in m.components:
            raise ValueError("the Massey criterion needs a minimal model (m1 = 0) in horizontal degree 0")
    return TwistingCochain.split(m, base_labels_for(theorem))


def _solve_spaces(a: TwistingCochain, theorem: str, k: int, n: int) -> list:
    """Tridegrees (arity, hshift, vshift) of the perturbing cochains for the stage a_kn."""
    if theorem == "derived":
        out = [(n - 1, k, 2 - k - n)]
        if k >= 1:
            out.append((n, k - 1, 2 - k - n))
        return out
    if theorem == "classical":
        return [(n, 0, 1 - n), (n - 1, 0, 2 - n)]
    return [(n - 1, 0, 2 - n), (n - 2, 0, 3 - n)]


def solve_stage(a: TwistingCochain, spaces, label, normalized: bool = True):
    """Cochains b_r in the given tridegrees with sum_op [op, b] = a_label and every bracket
    landing before ``label`` (in stage order) zero; brackets landing later are left free.

    Returns ({tridegree: b}, None) or (None, infeasibility record).
    """
    A = a.module
    R = A.ring
    target = a.component(*label)
    key0 = _stage_key(label)
    ops = list(a.base.components.values())
    rows: dict = {}

    def row(tag, tri, k):
        r = rows.get((tag, tri, k))
        if r is None:
            r = rows[(tag, tri, k)] = len(rows)
        return r

    keys, cols = [], []
    for tri in spaces:
        n, k, i = tri
        if n < 1:
            continue
        for key in cochain_basis(A, n, k, i, normalized=normalized):
            e = MultiCochain(A, n, k, i, {key: 1}, check=False)
            ent: dict = {}
            for op in ops:
                br = _single(bracket(op, e))
                if br is None or br.is_zero():
                    continue
                lab = (br.hshift, br.arity)
                if lab == tuple(label):
                    tag = "target"
                elif _stage_key(lab) < key0:
                    tag = "lower"
                else:
                    continue
                for k2, c in br.entries.items():
                    r = row(tag, br.tridegree, k2)
                    ent[r] = ent.get(r, 0) + c
            keys.append((tri, key))
            cols.append(ent)
    rhs_ent = {row("target", target.tridegree, k2): c for k2, c in target.entries.items()}
    if not cols:
        if target.is_zero():
            return {}, None
        return None, {"reason": "no perturbing cochains in these tridegrees", "divisor": "0"}
    M = Matrix(R, len(rows), len(cols), {(r, j): c for j, ent in enumerate(cols) for r, c in ent.items() if c})
    rhs = [rhs_ent.get(r, 0) for r in range(len(rows))]
    x = solve_linear(M, rhs)
    if x is None:
        cert = infeasibility_certificate(M, rhs)
        return None, {"reason": ("not reached by the brackets with the base, even after scaling"
                                 if not cert.divisor else
                                 "torsion obstruction: only a multiple is reached over the ring"),
                      "divisor": R.format(cert.divisor), "value": R.format(cert.value)}
    parts: dict = {}
    for (tri, key), c in zip(keys, x):
        if c:
            parts.setdefault(tri, {})[key] = c
    return {tri: MultiCochain(A, tri[0], tri[1], tri[2], ent, check=False) for tri, ent in parts.items()}, None


def _case_for(a: TwistingCochain, theorem: str, b: MultiCochain) -> str:
    """The lemma case whose side condition b satisfies, else 'coupled'."""
    nonzero = [lab for lab, op in a.base.components.items() if not bracket(op, b).is_zero()]
    if theorem == "derived":
        if set(nonzero) <= {(0, 2)}:
            return "A"
        if set(nonzero) <= {(1, 1)}:
            return "B"
        return "coupled"
    return "classical" if len(nonzero) <= 1 else "coupled"


def trivialize(m: StructureFamily, theorem: str = "derived", reading="a", max_steps: int = 200) -> TrivializationCertificate:
    """Kill the lowest operation a_kn (t = k + n increasing, then k), one perturbation per space.

    The lemma cases are used whenever their side conditions hold; otherwise
    the step is 'coupled' and its later brackets move into operations that
    are handled afterwards.  Every step is re-verified by the exact pushforward.
    """
    a = _preconditions(m, theorem)
    start = a
    steps: list = []
    W = default_window(m)
    total = m.arity_max is None or m.is_total(3, normalized=True)
    for _ in range(max_steps):
        if a.is_zero():
            return TrivializationCertificate(theorem, start, steps, a, None, total)
        k, n = min(a.components, key=_stage_key)
        akn = a.component(k, n)
        spaces = _solve_spaces(a, theorem, k, n)
        if any(tri[0] > W for tri in spaces):
            raise WindowInsufficient(f"perturbing cochains for a_{k}{n} exceed the arity window")
        sol, info = solve_stage(a, spaces, (k, n))
        if sol is None:
            info.update({"label": [k, n], "tridegree": list(akn.tridegree),
                         "representative": cochain_record(akn)})
            return TrivializationCertificate(theorem, start, steps, a, info, total)
        for tri in spaces:
            b = sol.get(tri)
            if b is None:
                continue
            step = perturb(a, b, _case_for(a, theorem, b), reading)
            steps.append(step)
            if not step.ok:
                return TrivializationCertificate(theorem, start, steps, step.after,
                                                 {"reason": "perturbation step failed verification",
                                                  "claims": step.claims}, total)
            a = step.after
        if not a.component(k, n).is_zero():
            return TrivializationCertificate(theorem, start, steps, a, {
                "reason": "operation survived its perturbation", "label": [k, n],
                "representative": cochain_record(a.component(k, n))}, total)
    raise RuntimeError("trivialization did not terminate within max_steps")


def replay(m: StructureFamily, cert: TrivializationCertificate, reading="a") -> CheckReport:
    """Re-run every recorded step from m and compare with the recorded intermediate structures."""
    a = _preconditions(m, cert.theorem)
    report = CheckReport("certificate replay")
    for idx, step in enumerate(cert.steps):
        again = perturb(a, step.b, step.case, reading)
        same = again.after == step.after
        mc = check_da_infinity(again.after.structure())
        mor = check_morphism(again.morphism, reading)
        ok = same and mc.ok and mor.ok and again.ok
        report.cells.append(CellResult((idx,), ok, mc.status == VERIFIED and mor.status == VERIFIED, None if ok else {
            "reproduced": same, "structure": mc.ok, "morphism": mor.ok,
            "claims": again.claims}))
        a = again.after
    if cert.final is not None and a != cert.final:
        report.failures.append({"condition": "final structure differs from the certificate"})
    report.extra["final_is_trivial"] = a.is_zero()
    return report


def cochain_from_record(A, tridegree, records, target=None) -> MultiCochain:
    """Inverse of ``cochain_record``: entries by basis names."""
    B = A if target is None else target
    n, k, i = tridegree
    ent = {}
    for r in records:
        key = (tuple(A.index(x) for x in r["inputs"]), B.index(r["output"]))
        ent[key] = B.ring.coerce(r["coefficient"])
    return MultiCochain(A, n, k, i, ent, B)


def certificate_from_dict(m: StructureFamily, data: dict) -> TrivializationCertificate:
    """Rebuild the replayable part of a certificate (b, case and the recorded outputs) from JSON."""
    theorem = data["theorem"]
    start = _preconditions(m, theorem)
    A = m.module
    steps = []
    a = start
    for d in data["steps"]:
        b = cochain_from_record(A, d["b_tridegree"], d["b"])
        comps = {}
        for lab, recs in d["after"].items():
            i, j = (int(x) for x in lab.split(","))
            comps[(i, j)] = cochain_from_record(A, (j, i, 2 - i - j), recs)
        after = TwistingCochain(start.base, comps, start.arity_max)
        steps.append(PerturbationStep(d["case"], b, tuple(d["b_label"]), a, after, None,
                                      tuple(d["changed"]) if d.get("changed") else None, dict(d["claims"])))
        a = after
    return TrivializationCertificate(theorem, start, steps, a, data.get("failure"), data.get("total", True))


# --------------------------------------------------------------------------
# extension with unknown higher terms


@dataclass
class Unknown:
    kind: str          # "m" or "f"
    label: tuple
    key: tuple

    def describe(self, B, A) -> str:
        ins, out = self.key
        tgt = B if self.kind == "m" else A
        args = "⊗".join(B.names[x] for x in ins)
        return f"{self.kind}{self.label[0]}{self.label[1]}({args})->{tgt.names[out]}"


@dataclass
class Equation:
    kind: str
    cell: tuple
    key: tuple
    poly: Poly

    def stage(self):
        return (self.cell[0] + self.cell[1], self.cell[0])


@dataclass
class ExtensionResult:
    status: str
    assignment: dict
    structure: StructureFamily | None = None
    morphism: MorphismFamily | None = None
    certificate: dict | None = None
    congruences: list = field(default_factory=list)
    total: bool = True
    reference_claim: str | None = None

    def as_dict(self) -> dict:
        return {
            "status": self.status,
            "assignment": dict(sorted(self.assignment.items())),
            "certificate": self.certificate,
            "congruences": self.congruences,
            "total": self.total,
            "reference_claim": self.reference_claim,
        }


def _label_keys(src, tgt, tri, normalized=True):
    n, k, i = tri
    return cochain_basis(src, n, k, i, normalized=normalized, target=tgt)


def extend_structure(B: StructureFamily, target: StructureFamily, f01: MultiCochain, arity_max: int,
                     fixed_morphism: dict | None = None, reading="a",
                     reference_claim: str | None = None) -> ExtensionResult:
    """Search for higher m_ij on B (i+j >= 3) and f_st (s+t >= 2) making f a morphism B -> target.

    Unknown coefficients are polynomial variables.  Equations are taken cell
    by cell in increasing u + v; at each stage the equations that became
    linear are solved over the ring, and every variable they pin down is
    fixed.  An inconsistent stage yields the rows of the contradiction.
    """
    src, tgt = B.module, target.module
    ring = tgt.ring
    W = arity_max
    hB = _max_h(src)
    unknowns: list = []
    m_comps = dict(B.components)
    for j in range(1, W + 1):
        for i in range(0, j * hB + 1):
            if i + j < 3 or (i, j) in m_comps:
                continue
            keys = _label_keys(src, src, (j, i, 2 - i - j))
            if keys:
                ent = {}
                for key in keys:
                    ent[key] = Poly.var(len(unknowns), ring)
                    unknowns.append(Unknown("m", (i, j), key))
                m_comps[(i, j)] = MultiCochain(src, j, i, 2 - i - j, ent, check=False)
    f_comps = {(0, 1): f01}
    f_comps.update(fixed_morphism or {})
    for t in range(1, W + 1):
        for s in range(0, t * hB + 1):
            if s + t < 2 or (s, t) in f_comps:
                continue
            keys = _label_keys(src, tgt, (t, s, 1 - s - t))
            if keys:
                ent = {}
                for key in keys:
                    ent[key] = Poly.var(len(unknowns), ring)
                    unknowns.append(Unknown("f", (s, t), key))
                f_comps[(s, t)] = MultiCochain(src, t, s, 1 - s - t, ent, tgt, check=False)
    msym = StructureFamily(src, m_comps, W, B.name)
    fsym = MorphismFamily(msym, target, f_comps, arity_max=W)
    equations: list = []
    for cell, c in structure_equation_terms(msym).items():
        if cell[1] > W:
            continue
        for key, p in c.entries.items():
            equations.append(Equation("structure", cell, key, p if isinstance(p, Poly) else Poly.const(p, ring)))
    lhs, rhs = morphism_sides(fsym, reading)
    for cell in set(lhs) | set(rhs):
        if cell[1] > W:
            continue
        zero = MultiCochain.zero(src, cell[1], cell[0], 2 - cell[0] - cell[1], tgt)
        diff = lhs.get(cell, zero) - rhs.get(cell, zero)
        for key, p in diff.entries.items():
            equations.append(Equation("morphism", cell, key, p if isinstance(p, Poly) else Poly.const(p, ring)))
    equations.sort(key=lambda e: (e.stage(), e.kind, e.cell, e.key))
    names = [u.describe(src, tgt) for u in unknowns]

    def describe_eq(e: Equation, poly: Poly) -> dict:
        ins, out = e.key
        outmod = src if e.kind == "structure" else tgt
        terms = []
        for mono, c in sorted(poly.terms.items()):
            var = "*".join(names[x] for x in mono)
            terms.append(f"{ring.format(c)}" + (f"*{var}" if var else ""))
        return {"kind": e.kind, "cell": list(e.cell), "inputs": [src.names[x] for x in ins],
                "output": outmod.names[out], "equation": " + ".join(terms) + " = 0" if terms else "0 = 0",
                "original": _poly_text(e.poly, names, ring)}

    values: dict = {}
    congr: list = []
    stages = sorted({e.stage() for e in equations})
    bound_m = arity_bound(src, 2, True)
    bound_f = arity_bound(src, 1, True, tgt)
    total = bound_m is not None and bound_f is not None and max(bound_m, bound_f) <= W
    for stage in stages + [None]:
        active = [e for e in equations if stage is None or e.stage() <= stage]
        lin_rows = []
        nonlinear = []
        for e in active:
            p = e.poly.substitute(values)
            if not p:
                continue
            lin = p.linear()
            if lin is None:
                nonlinear.append((e, p))
            else:
                lin_rows.append((e, p, lin))
        if lin_rows:
            vars_ = sorted({x for _, _, (co, _) in lin_rows for x in co})
            col = {x: j for j, x in enumerate(vars_)}
            M = Matrix(ring, len(lin_rows), len(vars_),
                       {(r, col[x]): c for r, (_, _, (co, _)) in enumerate(lin_rows) for x, c in co.items()})
            rhs = [ring.normalize(-const) for _, _, (_, const) in lin_rows]
            x = solve_linear(M, rhs)
            if x is None:
                cert = infeasibility_certificate(M, rhs)
                rows = [{"weight": ring.format(y), **describe_eq(e, p)}
                        for y, (e, p, _) in zip(cert.combination, lin_rows) if y]
                fixed = {names[v]: ring.format(val) for v, val in sorted(values.items())}
                certificate = {
                    "stage": list(stage) if stage else None,
                    "constraints": rows,
                    "combination_divisor": ring.format(cert.divisor),
                    "combination_value": ring.format(cert.value),
                    "forced_values": fixed,
                    "contradiction": (f"the weighted sum of these constraints reads {ring.format(cert.value)} "
                                      f"≡ 0 mod {ring.format(cert.divisor)}" if cert.divisor else
                                      f"the weighted sum of these constraints reads {ring.format(cert.value)} = 0"),
                }
                return ExtensionResult(REFUTED, {}, certificate=certificate, total=True,
                                       reference_claim=reference_claim)
            K = kernel_basis(M)
            for xv, j in col.items():
                if stage is None or all(not kv[j] for kv in K):
                    values[xv] = ring.normalize(x[j])
            if stage is None:
                congr = _congruences(ring, col, x, K, unknowns, names)
        if stage is None and nonlinear:
            return ExtensionResult(INSUFFICIENT, {names[v]: ring.format(c) for v, c in values.items()},
                                   certificate={"reason": "nonlinear equations in undetermined unknowns",
                                                "equations": [describe_eq(e, p) for e, p in nonlinear[:5]]},
                                   total=total, reference_claim=reference_claim)
    for v in range(len(unknowns)):
        values.setdefault(v, 0)
    m_final = {}
    for (i, j), c in m_comps.items():
        m_final[(i, j)] = MultiCochain(src, j, i, 2 - i - j, {k: _eval(p, values) for k, p in c.entries.items()})
    mfam = StructureFamily(src, m_final, W, B.name)
    f_final = {}
    for (s, t), c in f_comps.items():
        f_final[(s, t)] = MultiCochain(src, t, s, 1 - s - t, {k: _eval(p, values) for k, p in c.entries.items()},
                                       tgt)
    ffam = MorphismFamily(mfam, target, f_final, arity_max=W)
    ok = all(c.ok for c in check_da_infinity(mfam).cells) and check_morphism(ffam, reading).ok
    status = (VERIFIED if total else INSUFFICIENT) if ok else REFUTED
    assignment = {names[v]: ring.format(c) for v, c in values.items() if c}
    return ExtensionResult(status, assignment, mfam, ffam,
                           None if ok else {"reason": "assembled solution failed verification"},
                           congr, total, reference_claim)


def _eval(p, values):
    if isinstance(p, Poly):
        q = p.substitute(values)
        return q.terms.get((), 0)
    return p


def _gcd(ring, a, b):
    while b:
        _, r = ring.divmod(a, b)
        a, b = b, r
    return ring.normalize(a * ring.associate_unit(a)) if a else 0


def _congruences(ring, col, x, K, unknowns, names) -> list:
    """For each structure unknown: its value is the particular one modulo the gcd of the kernel entries."""
    out = []
    for xv, j in sorted(col.items()):
        if unknowns[xv].kind != "m":
            continue
        g = 0
        for kv in K:
            g = _gcd(ring, g, kv[j])
        value = ring.residue(x[j], g) if g else x[j]
        out.append({"unknown": names[xv], "value": ring.format(value), "modulus": ring.format(g)})
    return out


def _poly_text(p: Poly, names, ring) -> str:
    terms = []
    for mono, c in sorted(p.terms.items()):
        var = "*".join(names[x] for x in mono)
        terms.append(f"{ring.format(c)}" + (f"*{var}" if var else ""))
    return (" + ".join(terms) if terms else "0") + " = 0"
