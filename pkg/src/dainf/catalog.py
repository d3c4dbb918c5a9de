"""The example corpus and its golden run reports.

``WORKED`` lists one CLI run per worked example: the corpus file, the
flags, and the exit code the recorded report carries.  Goldens are
regenerated with ``python -m dainf.catalog --regen``.
"""

from __future__ import annotations

import argparse
import os
from dataclasses import dataclass

CORPUS = os.path.join(os.path.dirname(__file__), "corpus")
GOLDEN = os.path.join(CORPUS, "golden")


def corpus_path(name: str) -> str:
    return os.path.join(CORPUS, name)


def golden_path(name: str) -> str:
    return os.path.join(GOLDEN, name + ".json")


def load(name: str, ring: str | None = None):
    from .presentation import parse_file
    return parse_file(corpus_path(name), ring)


@dataclass(frozen=True)
class Example:
    name: str
    verb: str
    file: str
    flags: tuple = ()
    exit_code: int = 0
    note: str = ""

    def argv(self) -> list:
        out = [self.verb, corpus_path(self.file)]
        for f in self.flags:
            out.append(f.replace("{golden}", GOLDEN + os.sep))
        return out


M22_CLAIM = "claimed: m22 forced to ±1 mod p by the (2,2) morphism cell and to 0 mod p by the (2,3) structure cell"

WORKED = (
    Example("validate_exterior", "validate", "exterior.dai",
            note="Z[e]/(e^4), de = 5: a dga with four basis elements"),
    Example("validate_resolution_C", "validate", "resolution.dai", ("--structure", "C"),
            note="the bidga C with m11(a) = 5"),
    Example("extend_resolution", "extend", "resolution.dai",
            ("--source", "C", "--target", "A", "--morphism", "f", "--arity-max", "4", "--claim", M22_CLAIM),
            exit_code=0, note="a feasible extension exists; see the ledger"),
    Example("trivialize_resolution_twisted", "trivialize", "resolution_twisted.dai", ("--theorem", "derived"),
            exit_code=1, note="m22(a,a) = -b is a 5-torsion obstruction"),
    Example("validate_massey", "validate", "massey.dai", note="k<x,y>/(x^3, y^2), dy = x^2 over F_5"),
    Example("massey_xxx", "massey", "massey.dai", ("--classes", "[x],[x],[x]"),
            note="<[x],[x],[x]> = {2[xy]}"),
    Example("transfer_massey", "transfer", "massey.dai", ("--classes", "[x],[x],[x]"),
            note="minimal model and the m3 membership check"),
    Example("hochschild_local_sphere_m2", "hochschild", "local_sphere_m2.dai",
            ("--flavor", "alg", "--degrees", "2..6"), note="HH^{n,2-n}_alg for p = 3, m = 2"),
    Example("massey_local_sphere_m3", "massey", "local_sphere_m3.dai", ("--classes", "[e],3,[e]"),
            note="<[e], 3, [e]> = {[xe]} over Z_(3)"),
    Example("perturb_local_sphere_m4", "perturb", "local_sphere_m4.dai",
            ("--theorem", "classical", "--cochain", "p", "--case", "classical"),
            note="classical perturbation with [mu, p] = 0, [d, p] != 0"),
    Example("trivialize_local_sphere_m4", "trivialize", "local_sphere_m4_perturbed.dai",
            ("--theorem", "classical"), note="undoes the perturbation"),
    Example("replay_local_sphere_m4", "replay", "local_sphere_m4_perturbed.dai",
            ("--theorem", "classical", "--certificate", "{golden}trivialize_local_sphere_m4.json"),
            note="replays the recorded certificate"),
    Example("e2_pair", "e2-check", "e2_pair.dai", ("--morphism", "collapse"),
            note="B -> C collapsing the acyclic factor"),
    Example("mc_derived_gauge", "mc-check", "derived_gauge.dai", note="both Maurer-Cartan routes"),
    Example("trivialize_derived_gauge", "trivialize", "derived_gauge.dai", ("--theorem", "derived"),
            note="a gauge-trivial structure on B"),
    Example("trivialize_minimal_perturbed", "trivialize", "minimal_perturbed.dai", ("--theorem", "massey-fixed"),
            note="kills m5 on the minimal model of the Massey example"),
    Example("bracket_pair", "bracket", "bracket_pair.dai", ("--left", "d", "--right", "mu"),
            note="[m11, m02] = 0 on C"),
    Example("bracket_properties", "bracket", "resolution.dai",
            ("--structure", "C", "--trials", "40", "--seed", "7"), note="random identity checks"),
    Example("validate_ground", "validate", "ground.dai", note="no operations at all"),
)


def by_name(name: str) -> Example:
    for ex in WORKED:
        if ex.name == name:
            return ex
    raise KeyError(name)


def run_example(ex: Example) -> tuple[int, str]:
    from .cli import run
    code, text, _ = run(ex.argv())
    return code, _portable(text)


def _portable(text: str) -> str:
    # absolute corpus paths only appear in flags echoed back; keep goldens relocatable
    return text.replace(GOLDEN + os.sep, "{golden}").replace(CORPUS + os.sep, "")


def regenerate(names=None) -> list:
    os.makedirs(GOLDEN, exist_ok=True)
    done = []
    for ex in WORKED:
        if names and ex.name not in names:
            continue
        code, text = run_example(ex)
        if code != ex.exit_code:
            raise RuntimeError(f"{ex.name}: exit {code}, manifest says {ex.exit_code}")
        with open(golden_path(ex.name), "w", encoding="utf-8") as fh:
            fh.write(text)
        done.append(ex.name)
    return done


def main(argv=None):
    p = argparse.ArgumentParser(prog="python -m dainf.catalog")
    p.add_argument("--regen", action="store_true", help="rewrite the golden reports")
    p.add_argument("names", nargs="*")
    args = p.parse_args(argv)
    if args.regen:
        for n in regenerate(args.names):
            print("wrote", golden_path(n))
    else:
        for ex in WORKED:
            print(f"{ex.name:34s} {ex.verb:11s} {ex.file:30s} exit {ex.exit_code}  {ex.note}")


if __name__ == "__main__":
    main()
