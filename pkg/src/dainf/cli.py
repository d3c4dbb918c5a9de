"""The ``dainf`` command line.

Every verb reads a presentation file, runs one operation and prints a
JSON run report.  Exit status: 0 verified or feasible, 1 refuted (the
report carries a witness), 2 window-insufficient or bad input.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
import time

from . import deformation as dfm
from . import massey as msy
from .hochschild import FLAVORS, HochschildComplex
from .presentation import ParseError, Presentation, emit_structure, parse
from .properties import property_run
from .report import RunReport, emit_report, inputs_digest, worst
from .structure import (INSUFFICIENT, REFUTED, VERIFIED, StructureFamily, check_classical_relations,
                        check_da_infinity, check_morphism, check_strict_unit, is_e2_equivalence, is_orthogonal)
from .cochains import bracket as bracket_op, koszul_pairing
from .deformation import cochain_record


class UsageError(Exception):
    pass


# --------------------------------------------------------------------------
# flag helpers


def parse_window(text: str | None):
    if text is None:
        return None
    parts = text.split(":")
    if len(parts) != 3:
        raise UsageError("--window takes U:VMIN:VMAX")
    try:
        u, lo, hi = (int(p) for p in parts)
    except ValueError:
        raise UsageError("--window takes three integers U:VMIN:VMAX") from None
    if lo > hi:
        raise UsageError("--window needs VMIN <= VMAX")
    return u, lo, hi


def parse_range(text: str) -> list:
    """'2..6' or '1,3,4'."""
    try:
        if ".." in text:
            a, b = text.split("..")
            return list(range(int(a), int(b) + 1))
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise UsageError(f"bad degree list {text!r}; use A..B or a comma list") from None


def _windowed(m: StructureFamily, args) -> StructureFamily:
    if args.arity_max is None:
        return m
    return StructureFamily(m.module, m.components, args.arity_max, m.name)


def _structure(pres: Presentation, name, args) -> StructureFamily:
    try:
        return _windowed(pres.structure(name), args)
    except KeyError as exc:
        raise UsageError(exc.args[0]) from None


def _lookup(getter, name):
    try:
        return getter(name)
    except KeyError as exc:
        raise UsageError(exc.args[0]) from None


def _class_arg(H, tok: str):
    tok = tok.strip()
    if tok.startswith("["):
        try:
            return H.generator(tok)
        except (KeyError, ValueError):
            raise UsageError(f"unknown class {tok}; known: {', '.join(H.generator_names())}") from None
    try:
        return msy.scalar_class(H, tok)
    except ValueError:
        raise UsageError(f"bad class {tok!r}: give a generator name like [x] or a scalar") from None


def _classes(H, text: str | None) -> list:
    if not text:
        raise UsageError("--classes is required, e.g. --classes '[x],[x],[x]'")
    toks = [t for t in _split_classes(text)]
    if len(toks) != 3:
        raise UsageError("--classes takes three entries")
    return [_class_arg(H, t) for t in toks]


def _split_classes(text):
    out, depth, cur = [], 0, ""
    for ch in text:
        if ch == "[":
            depth += 1
        elif ch == "]":
            depth -= 1
        if ch == "," and depth == 0:
            out.append(cur)
            cur = ""
        else:
            cur += ch
    out.append(cur)
    return out


# --------------------------------------------------------------------------
# verbs; each returns (status, results, totality)


def cmd_validate(pres: Presentation, args):
    results, statuses, totality = {}, [], {}
    names = [args.structure] if args.structure else list(pres.structures)
    for n in names:
        m = _structure(pres, n, args)
        rep = check_da_infinity(m)
        entry = {"structure": rep.as_dict(), "orthogonal": is_orthogonal(m).ok}
        statuses.append(rep.status)
        if m.module.unit is not None:
            unit = check_strict_unit(m)
            entry["strict_unit"] = unit.as_dict()
            statuses.append(unit.status)
        if m.is_classical:
            cl = check_classical_relations(m)
            entry["classical_relations"] = cl.status
            statuses.append(cl.status)
        results[n] = entry
        totality[n] = rep.total
    if not args.structure:
        for n, f in pres.morphisms.items():
            f = f if args.arity_max is None else type(f)(f.source, f.target, f.components, args.arity_max, f.name)
            rep = check_morphism(f, args.reading)
            results[n] = {"morphism": rep.as_dict()}
            statuses.append(rep.status)
            totality[n] = rep.total
    return worst(statuses), results, totality


def cmd_bracket(pres: Presentation, args):
    results: dict = {}
    statuses = []
    if args.left or args.right or pres.cochains:
        f = _lookup(pres.cochain, args.left or _nth(pres.cochains, 0))
        g = _lookup(pres.cochain, args.right or _nth(pres.cochains, 1))
        if f.source != g.source:
            raise UsageError("the two cochains live on different modules")
        fg, gf = bracket_op(f, g), bracket_op(g, f)
        sign = -1 if koszul_pairing(f, g) else 1
        anti = gf == fg.scale(-sign)
        results["bracket"] = {"tridegree": list(fg.tridegree), "entries": cochain_record(fg),
                              "pairing": koszul_pairing(f, g), "antisymmetry": anti}
        statuses.append(VERIFIED if anti else REFUTED)
    if args.trials:
        m = _structure(pres, args.structure, args)
        kw = {}
        if args.window is not None:
            u, lo, hi = args.window
            kw = {"hmax": u, "vmax": max(abs(lo), abs(hi))}
        run = property_run(m.module, args.trials, args.seed, **kw)
        results["properties"] = run
        statuses.append(REFUTED if run["failures"] else VERIFIED)
    if not statuses:
        raise UsageError("bracket needs two cochain blocks or --trials N")
    return worst(statuses), results, {"exact": True}


def _nth(table, k):
    names = list(table)
    if len(names) <= k:
        raise UsageError("name the cochains with --left/--right")
    return names[k]


def cmd_hochschild(pres: Presentation, args):
    m = _structure(pres, args.structure, args)
    cx = HochschildComplex(m, args.flavor, args.arity_max, args.normalized)
    firsts = parse_range(args.degrees)
    degs = []
    if cx.bigraded:
        if args.window is not None:
            u, lo, hi = args.window
            degs = [(s, r) for s in firsts if s <= u for r in range(lo, hi + 1)]
        else:
            degs = [(s, 2 - s) for s in firsts]
    else:
        degs = firsts
    rows, total = [], True
    for d in degs:
        res = cx.cohomology(d)
        row = res.as_dict()
        row["flavor"] = args.flavor
        rows.append(row)
        total = total and res.total
    return (VERIFIED if total else INSUFFICIENT), {"table": rows}, {"all_degrees_total": total}


def _twisting(pres, args):
    m = _structure(pres, args.structure, args)
    return m, dfm.TwistingCochain.split(m, dfm.base_labels_for(args.theorem))


def cmd_mc_check(pres: Presentation, args):
    _, a = _twisting(pres, args)
    rep = dfm.check_maurer_cartan(a)
    return rep.status, {"maurer_cartan": rep.as_dict()}, {"total": rep.total}


def cmd_perturb(pres: Presentation, args):
    m, a = _twisting(pres, args)
    b = _lookup(pres.cochain, args.cochain)
    try:
        step = dfm.perturb(a, b, args.case, args.reading)
    except dfm.SideConditionError as exc:
        return REFUTED, {"side_condition": str(exc)}, {}
    out = {"step": step.as_dict(),
           "presentation": emit_structure(f"{args.structure or m.name}_perturbed",
                                          step.after.structure())}
    if args.emit:
        with open(args.emit, "w", encoding="utf-8") as fh:
            fh.write(out["presentation"])
    return step.status, out, {"certified": step.certified}


def cmd_trivialize(pres: Presentation, args):
    m = _structure(pres, args.structure, args)
    cert = dfm.trivialize(m, args.theorem, args.reading)
    return cert.status, {"certificate": cert.as_dict()}, {"total": cert.total}


def cmd_replay(pres: Presentation, args):
    m = _structure(pres, args.structure, args)
    if not args.certificate:
        raise UsageError("replay needs --certificate PATH (a trivialize report or certificate)")
    with open(args.certificate, encoding="utf-8") as fh:
        data = json.load(fh)
    if "results" in data:
        data = data["results"]["certificate"]
    cert = dfm.certificate_from_dict(m, data)
    rep = dfm.replay(m, cert, args.reading)
    return rep.status, {"replay": rep.as_dict(), "theorem": cert.theorem,
                        "recorded_status": data.get("status")}, {"total": rep.total}


def cmd_extend(pres: Presentation, args):
    B = _lookup(pres.structure, args.source)
    A = _lookup(pres.structure, args.target)
    f = _lookup(pres.morphism, args.morphism)
    W = args.arity_max or B.arity_max or dfm.default_window(B)
    res = dfm.extend_structure(B, A, f.component(0, 1), W, reading=args.reading, reference_claim=args.claim)
    return res.status, {"extension": res.as_dict()}, {"total": res.total}


def cmd_massey(pres: Presentation, args):
    m = _structure(pres, args.structure, args)
    H = msy.homology_algebra(m)
    a1, a2, a3 = _classes(H, args.classes)
    try:
        mp = msy.massey_triple(H, a1, a2, a3)
    except msy.MasseyUndefined as exc:
        return REFUTED, {"homology": H.summary(), "undefined": str(exc)}, {}
    indep = msy.choice_independent(H, a1, a2, a3, trials=args.trials, seed=args.seed)
    out = {"homology": H.summary(), "massey": mp.as_dict(), "choice_independent": indep,
           "trials": args.trials, "seed": args.seed}
    return (VERIFIED if indep else REFUTED), out, {"exact": True}


def cmd_transfer(pres: Presentation, args):
    m = _structure(pres, args.structure, args)
    model = msy.transfer_minimal_model(m, args.arity_max)
    out = {"model": model.as_dict(), "presentation": emit_structure("minimal", model.structure)}
    statuses = []
    for k, v in model.checks.items():
        statuses.append(v if isinstance(v, str) else (VERIFIED if v else REFUTED))
    if args.classes:
        a1, a2, a3 = _classes(model.H, args.classes)
        out["m3_membership"] = msy.m3_membership(model, a1, a2, a3)
    return worst(statuses), out, {"window": model.window, "complete": model.structure.arity_max is None}


def cmd_e2_check(pres: Presentation, args):
    f = _lookup(pres.morphism, args.morphism)
    mor = check_morphism(f, args.reading)
    dec = is_e2_equivalence(f)
    status = worst([mor.status, VERIFIED if dec.is_equivalence else REFUTED])
    return status, {"morphism": mor.as_dict(), "e2": dec.as_dict()}, {"total": mor.total}


VERBS = {
    "validate": cmd_validate,
    "bracket": cmd_bracket,
    "hochschild": cmd_hochschild,
    "mc-check": cmd_mc_check,
    "perturb": cmd_perturb,
    "trivialize": cmd_trivialize,
    "extend": cmd_extend,
    "massey": cmd_massey,
    "transfer": cmd_transfer,
    "e2-check": cmd_e2_check,
    "replay": cmd_replay,
}

# flags that do not change the computation and stay out of the digest
_NOT_HASHED = {"verb", "file", "output", "timing", "emit", "certificate"}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("file", help="presentation file")
    common.add_argument("--ring", help="override the ring: q, zz, zp:P or zloc:P")
    common.add_argument("--window", help="U:VMIN:VMAX (first index bound, second index range)")
    common.add_argument("--arity-max", type=int, help="arity window; overrides the file's declaration")
    norm = common.add_mutually_exclusive_group()
    norm.add_argument("--normalized", dest="normalized", action="store_true", default=True,
                      help="unit-normalized cochains (default)")
    norm.add_argument("--full", dest="normalized", action="store_false", help="the full cochain complex")
    common.add_argument("--theorem", choices=dfm.THEOREMS, default="derived")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--reading", choices=("a", "b"), default="a",
                        help="sign reading of the morphism equation")
    common.add_argument("--structure", help="structure block to use")
    common.add_argument("--output", help="write the report here instead of stdout")
    common.add_argument("--timing", action="store_true", help="add wall-clock timing to the report")

    p = argparse.ArgumentParser(prog="dainf", description="Derived A-infinity workbench.")
    sub = p.add_subparsers(dest="verb", required=True)
    sub.add_parser("validate", parents=[common], help="check structure and morphism equations")
    b = sub.add_parser("bracket", parents=[common], help="bracket of two cochains / identity runs")
    b.add_argument("--left")
    b.add_argument("--right")
    b.add_argument("--trials", type=int, default=0, help="random identity checks to run")
    h = sub.add_parser("hochschild", parents=[common], help="Hochschild cohomology table")
    h.add_argument("--flavor", choices=FLAVORS, default="orthogonal")
    h.add_argument("--degrees", required=True, help="A..B or a comma list")
    sub.add_parser("mc-check", parents=[common], help="Maurer-Cartan check over the theorem's base")
    pt = sub.add_parser("perturb", parents=[common], help="one perturbation step")
    pt.add_argument("--cochain", help="cochain block to perturb by")
    pt.add_argument("--case", choices=dfm.CASES, required=True)
    pt.add_argument("--emit", help="write the perturbed structure as a presentation")
    sub.add_parser("trivialize", parents=[common], help="trivialize the higher operations")
    e = sub.add_parser("extend", parents=[common], help="search for an extension along f01")
    e.add_argument("--source", help="bidga to extend")
    e.add_argument("--target", help="target structure")
    e.add_argument("--morphism", help="morphism block holding f01")
    e.add_argument("--claim", help="reference claim recorded next to the derived congruences")
    ms = sub.add_parser("massey", parents=[common], help="triple Massey product")
    ms.add_argument("--classes", help="three classes, e.g. '[x],[x],[x]' or '[e],3,[e]'")
    ms.add_argument("--trials", type=int, default=20)
    tr = sub.add_parser("transfer", parents=[common], help="minimal model by transfer")
    tr.add_argument("--classes", help="optional triple for the m3 membership check")
    e2 = sub.add_parser("e2-check", parents=[common], help="decide an E2-equivalence")
    e2.add_argument("--morphism")
    rp = sub.add_parser("replay", parents=[common], help="replay a trivialization certificate")
    rp.add_argument("--certificate")
    return p


def _hashed_flags(args) -> dict:
    """Flags that change the computation; file arguments enter through their contents."""
    flags = {k: v for k, v in sorted(vars(args).items()) if k not in _NOT_HASHED}
    if getattr(args, "certificate", None):
        with open(args.certificate, "rb") as fh:
            flags["certificate_sha256"] = hashlib.sha256(fh.read()).hexdigest()
    return flags


def run(argv=None) -> tuple[int, str, str | None]:
    """Parse flags, run the verb: (exit code, report text, output path)."""
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.window = parse_window(args.window)
        with open(args.file, encoding="utf-8") as fh:
            text = fh.read()
        pres = parse(text, args.ring)
        flags = _hashed_flags(args)
        t0 = time.perf_counter()
        status, results, totality = VERBS[args.verb](pres, args)
        elapsed = time.perf_counter() - t0
    except (UsageError, ParseError, OSError) as exc:
        parser.exit(2, f"dainf {args.verb}: error: {exc}\n")
    except dfm.WindowInsufficient as exc:
        status, results, totality = INSUFFICIENT, {"window_insufficient": str(exc)}, {"total": False}
        flags = _hashed_flags(args)
        elapsed = None
    except ValueError as exc:
        parser.exit(2, f"dainf {args.verb}: error: {exc}\n")
    window = {"arity_max": args.arity_max, "window": list(args.window) if args.window else None,
              "normalized": args.normalized}
    report = RunReport(args.verb, inputs_digest(text, flags), window, status, results, totality,
                       {"seconds": round(elapsed, 3)} if args.timing and elapsed is not None else None)
    return report.exit_code, emit_report(report), args.output


def main(argv=None) -> int:
    code, text, out = run(argv)
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
