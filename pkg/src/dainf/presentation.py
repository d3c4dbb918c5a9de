"""The line-oriented presentation format.

A file is a sequence of blocks::

    structure NAME
    ring zz
    basis 1 0 0
    basis a 1 0
    unit 1
    window 4
    m 1 1 : a -> 5*1
    end

    morphism NAME SOURCE TARGET
    f 0 1 : b -> 1*e^2
    end

    cochain NAME on STRUCTURE
    tridegree 3 0 -2
    c : e e e -> 1*x^2e
    end

Every entry line carries its operation label explicitly and is checked
against the bidegree rule of that label; names must be declared before
use.  ``emit`` writes the canonical form, which ``parse`` reads back to
the same data.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .bigraded import BigradedModule
from .cochains import MultiCochain
from .rings import CoefficientRing
from .structure import MorphismFamily, StructureFamily


class ParseError(ValueError):
    def __init__(self, message: str, line: int, column: int = 1):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column
        self.message = message


@dataclass
class Presentation:
    structures: dict = field(default_factory=dict)   # name -> StructureFamily
    morphisms: dict = field(default_factory=dict)    # name -> MorphismFamily
    cochains: dict = field(default_factory=dict)     # name -> (structure name, MultiCochain)

    def structure(self, name: str | None = None) -> StructureFamily:
        return _pick(self.structures, name, "structure")

    def morphism(self, name: str | None = None) -> MorphismFamily:
        return _pick(self.morphisms, name, "morphism")

    def cochain(self, name: str | None = None) -> MultiCochain:
        return _pick(self.cochains, name, "cochain")[1]


def _pick(table: dict, name, kind):
    if name is None:
        if len(table) != 1:
            raise KeyError(f"the file declares {len(table)} {kind} blocks; name one explicitly")
        return next(iter(table.values()))
    if name not in table:
        raise KeyError(f"no {kind} named {name!r}")
    return table[name]


# --------------------------------------------------------------------------
# parsing


def _tokens(line: str):
    """(column, token) pairs, 1-based columns."""
    out = []
    i = 0
    while i < len(line):
        if line[i].isspace():
            i += 1
            continue
        j = i
        while j < len(line) and not line[j].isspace():
            j += 1
        out.append((i + 1, line[i:j]))
        i = j
    return out


def _int(tok, lineno):
    col, text = tok
    try:
        return int(text)
    except ValueError:
        raise ParseError(f"expected an integer, found {text!r}", lineno, col) from None


def _coefficient(ring: CoefficientRing, text: str, lineno: int, col: int):
    try:
        return ring.coerce(Fraction(text))
    except (ValueError, ZeroDivisionError) as exc:
        raise ParseError(f"bad coefficient {text!r}: {exc}", lineno, col) from None


def _outputs(ring, module: BigradedModule, line: str, start_col: int, lineno: int) -> dict:
    """'c1*name1, c2*name2' -> {index: coeff}; an empty list is allowed."""
    out: dict = {}
    text = line
    if not text.strip():
        return out
    pos = 0
    for part in text.split(","):
        col = start_col + pos + (len(part) - len(part.lstrip()))
        pos += len(part) + 1
        part = part.strip()
        if "*" not in part:
            raise ParseError(f"output term {part!r} must read COEFF*NAME", lineno, col)
        c_text, name = part.split("*", 1)
        c = _coefficient(ring, c_text.strip(), lineno, col)
        name = name.strip()
        if name not in module.names:
            raise ParseError(f"undeclared basis element {name!r}", lineno, col + part.index("*") + 1)
        idx = module.index(name)
        if idx in out:
            raise ParseError(f"output {name!r} listed twice", lineno, col)
        out[idx] = c
    return out


class _StructureBuilder:
    def __init__(self, name, lineno):
        self.name = name
        self.lineno = lineno
        self.ring = None
        self.basis = []
        self.unit = None
        self.window = None
        self.entries: dict = {}
        self.module = None

    def ensure_module(self, lineno, col):
        if self.module is None:
            if self.ring is None:
                raise ParseError("ring must be declared before entries", lineno, col)
            try:
                self.module = BigradedModule(self.ring, self.basis, unit=self.unit)
            except ValueError as exc:
                raise ParseError(str(exc), lineno, col) from None
        return self.module


def parse(text: str, ring_override: str | None = None) -> Presentation:
    pres = Presentation()
    block = None
    kind = None
    lines = text.splitlines()
    override = CoefficientRing.parse(ring_override) if ring_override else None
    for lineno, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].rstrip()
        toks = _tokens(line)
        if not toks:
            continue
        col, head = toks[0]
        if block is None:
            if head == "structure":
                if len(toks) != 2:
                    raise ParseError("usage: structure NAME", lineno, col)
                name = toks[1][1]
                _fresh(pres, name, lineno, toks[1][0])
                block, kind = _StructureBuilder(name, lineno), "structure"
                if override is not None:
                    block.ring = override
            elif head == "morphism":
                if len(toks) != 4:
                    raise ParseError("usage: morphism NAME SOURCE TARGET", lineno, col)
                name, src, tgt = (t[1] for t in toks[1:])
                _fresh(pres, name, lineno, toks[1][0])
                for (c, t) in toks[2:]:
                    if t not in pres.structures:
                        raise ParseError(f"undeclared structure {t!r}", lineno, c)
                block = {"name": name, "source": pres.structures[src], "target": pres.structures[tgt],
                         "window": None, "entries": {}}
                kind = "morphism"
            elif head == "cochain":
                if len(toks) != 4 or toks[2][1] != "on":
                    raise ParseError("usage: cochain NAME on STRUCTURE", lineno, col)
                name, on = toks[1][1], toks[3][1]
                _fresh(pres, name, lineno, toks[1][0])
                if on not in pres.structures:
                    raise ParseError(f"undeclared structure {on!r}", lineno, toks[3][0])
                block = {"name": name, "on": on, "tri": None, "entries": {}}
                kind = "cochain"
            else:
                raise ParseError(f"expected 'structure', 'morphism' or 'cochain', found {head!r}", lineno, col)
            continue
        if head == "end":
            if len(toks) != 1:
                raise ParseError("'end' takes no arguments", lineno, toks[1][0])
            _finish(pres, kind, block, lineno, col)
            block = kind = None
            continue
        if kind == "structure":
            _structure_line(block, toks, line, lineno, override)
        elif kind == "morphism":
            _morphism_line(block, toks, line, lineno)
        else:
            _cochain_line(pres, block, toks, line, lineno)
    if block is not None:
        raise ParseError(f"unterminated {kind} block", len(lines) + 1, 1)
    return pres


def _fresh(pres, name, lineno, col):
    if name in pres.structures or name in pres.morphisms or name in pres.cochains:
        raise ParseError(f"name {name!r} already used", lineno, col)


def _structure_line(b: _StructureBuilder, toks, line, lineno, override):
    col, head = toks[0]
    if head == "ring":
        if len(toks) != 2:
            raise ParseError("usage: ring DESCRIPTOR", lineno, col)
        if b.module is not None:
            raise ParseError("ring must precede entries", lineno, col)
        if override is None:
            try:
                b.ring = CoefficientRing.parse(toks[1][1])
            except ValueError as exc:
                raise ParseError(str(exc), lineno, toks[1][0]) from None
    elif head == "basis":
        if len(toks) != 4:
            raise ParseError("usage: basis NAME H V", lineno, col)
        if b.module is not None:
            raise ParseError("basis must precede entries", lineno, col)
        name = toks[1][1]
        if any(ch in name for ch in "*,:") or name == "->":
            raise ParseError(f"basis name {name!r} may not contain '*', ',' or ':'", lineno, toks[1][0])
        if name in [n for n, _ in b.basis]:
            raise ParseError(f"basis element {name!r} declared twice", lineno, toks[1][0])
        h, v = _int(toks[2], lineno), _int(toks[3], lineno)
        if h < 0:
            raise ParseError("horizontal degree must be non-negative", lineno, toks[2][0])
        b.basis.append((name, (h, v)))
    elif head == "unit":
        if len(toks) != 2:
            raise ParseError("usage: unit NAME", lineno, col)
        if toks[1][1] not in [n for n, _ in b.basis]:
            raise ParseError(f"undeclared basis element {toks[1][1]!r}", lineno, toks[1][0])
        b.unit = toks[1][1]
    elif head == "window":
        if len(toks) != 2:
            raise ParseError("usage: window ARITY", lineno, col)
        b.window = _int(toks[1], lineno)
    elif head == "m":
        M = b.ensure_module(lineno, col)
        i, j, ins, outs = _entry(M, M, toks, line, lineno, 2)
        if j < 1 or i < 0:
            raise ParseError(f"invalid operation label ({i},{j})", lineno, toks[1][0])
        if len(ins) != j:
            raise ParseError(f"m {i} {j} takes {j} inputs, found {len(ins)}", lineno,
                             toks[min(4, len(toks) - 1)][0])
        _store(b.entries, (i, j), ins, outs, M, M, (i, 2 - i - j), lineno, col)
    else:
        raise ParseError(f"unknown structure line {head!r}", lineno, col)


def _entry(src: BigradedModule, tgt: BigradedModule, toks, line, lineno, nlabel: int):
    if len(toks) < 2 + nlabel - 1 or ":" not in line:
        raise ParseError("entry lines read: OP LABEL : INPUTS -> OUTPUTS", lineno, toks[0][0])
    label = [_int(t, lineno) for t in toks[1:1 + nlabel]]
    colon = toks[1 + nlabel] if len(toks) > 1 + nlabel else None
    if colon is None or colon[1] != ":":
        raise ParseError("expected ':' after the operation label", lineno, colon[0] if colon else len(line) + 1)
    arrow = line.find("->")
    if arrow < 0:
        raise ParseError("expected '->'", lineno, len(line) + 1)
    ins = []
    for c, t in toks[2 + nlabel:]:
        if c - 1 >= arrow:
            break
        if t not in src.names:
            raise ParseError(f"undeclared basis element {t!r}", lineno, c)
        ins.append(src.index(t))
    outs = _outputs(tgt.ring, tgt, line[arrow + 2:], arrow + 3, lineno)
    return label[0], label[1], tuple(ins), outs


def _store(table, label, ins, outs, src, tgt, bidegree, lineno, col):
    s, t = bidegree
    u, v = src.tuple_degree(ins)
    for y in outs:
        if tgt.degrees[y] != (u - s, v + t):
            raise ParseError(
                f"entry ({' '.join(src.names[x] for x in ins)}) -> {tgt.names[y]} violates the bidegree "
                f"({s},{t}) of its label", lineno, col)
    ent = table.setdefault(label, {})
    for y, c in outs.items():
        if (ins, y) in ent:
            raise ParseError("entry listed twice", lineno, col)
        ent[(ins, y)] = c


def _morphism_line(b: dict, toks, line, lineno):
    col, head = toks[0]
    A, B = b["source"].module, b["target"].module
    if head == "window":
        if len(toks) != 2:
            raise ParseError("usage: window ARITY", lineno, col)
        b["window"] = _int(toks[1], lineno)
    elif head == "f":
        s, t, ins, outs = _entry(A, B, toks, line, lineno, 2)
        if t < 1 or s < 0:
            raise ParseError(f"invalid morphism label ({s},{t})", lineno, toks[1][0])
        if len(ins) != t:
            raise ParseError(f"f {s} {t} takes {t} inputs, found {len(ins)}", lineno,
                             toks[min(4, len(toks) - 1)][0])
        _store(b["entries"], (s, t), ins, outs, A, B, (s, 1 - s - t), lineno, col)
    else:
        raise ParseError(f"unknown morphism line {head!r}", lineno, col)


def _cochain_line(pres, b: dict, toks, line, lineno):
    col, head = toks[0]
    M = pres.structures[b["on"]].module
    if head == "tridegree":
        if len(toks) != 4:
            raise ParseError("usage: tridegree ARITY HSHIFT VSHIFT", lineno, col)
        if b["entries"]:
            raise ParseError("tridegree must precede entries", lineno, col)
        b["tri"] = tuple(_int(t, lineno) for t in toks[1:])
    elif head == "c":
        if b["tri"] is None:
            raise ParseError("tridegree must be declared before entries", lineno, col)
        n, k, i = b["tri"]
        ins, outs = _cochain_entry(M, toks, line, lineno)
        if len(ins) != n:
            raise ParseError(f"the cochain has arity {n}, found {len(ins)} inputs", lineno, col)
        _store(b["entries"], "c", ins, outs, M, M, (k, i), lineno, col)
    else:
        raise ParseError(f"unknown cochain line {head!r}", lineno, col)


def _cochain_entry(M, toks, line, lineno):
    if len(toks) < 2 or toks[1][1] != ":":
        raise ParseError("cochain entries read: c : INPUTS -> OUTPUTS", lineno, toks[0][0])
    arrow = line.find("->")
    if arrow < 0:
        raise ParseError("expected '->'", lineno, len(line) + 1)
    ins = []
    for c, t in toks[2:]:
        if c - 1 >= arrow:
            break
        if t not in M.names:
            raise ParseError(f"undeclared basis element {t!r}", lineno, c)
        ins.append(M.index(t))
    outs = _outputs(M.ring, M, line[arrow + 2:], arrow + 3, lineno)
    return tuple(ins), outs


def _finish(pres: Presentation, kind, b, lineno, col):
    if kind == "structure":
        if b.ring is None:
            raise ParseError(f"structure {b.name} declares no ring", b.lineno, 1)
        M = b.ensure_module(lineno, col)
        comps = {}
        for (i, j), ent in b.entries.items():
            comps[(i, j)] = MultiCochain(M, j, i, 2 - i - j, ent)
        try:
            pres.structures[b.name] = StructureFamily(M, comps, b.window, b.name)
        except ValueError as exc:
            raise ParseError(str(exc), b.lineno, 1) from None
    elif kind == "morphism":
        A, B = b["source"], b["target"]
        comps = {}
        for (s, t), ent in b["entries"].items():
            comps[(s, t)] = MultiCochain(A.module, t, s, 1 - s - t, ent, B.module)
        pres.morphisms[b["name"]] = MorphismFamily(A, B, comps, b["window"], b["name"])
    else:
        if b["tri"] is None:
            raise ParseError(f"cochain {b['name']} declares no tridegree", lineno, col)
        M = pres.structures[b["on"]].module
        n, k, i = b["tri"]
        c = MultiCochain(M, n, k, i, b["entries"].get("c", {}))
        pres.cochains[b["name"]] = (b["on"], c)


def parse_file(path, ring_override: str | None = None) -> Presentation:
    with open(path, encoding="utf-8") as fh:
        return parse(fh.read(), ring_override)


# --------------------------------------------------------------------------
# emitting


def _out_text(tgt: BigradedModule, vec: dict) -> str:
    return ", ".join(f"{tgt.ring.format(c)}*{tgt.names[y]}" for y, c in sorted(vec.items()))


def _entry_lines(prefix: str, c: MultiCochain) -> list:
    A, B = c.source, c.target
    rows: dict = {}
    for (ins, y), v in c.entries.items():
        rows.setdefault(ins, {})[y] = v
    lines = []
    for ins in sorted(rows):
        args = " ".join(A.names[x] for x in ins)
        lines.append(f"{prefix} : {args} -> {_out_text(B, rows[ins])}")
    return lines


def emit_structure(name: str, m: StructureFamily) -> str:
    A = m.module
    lines = [f"structure {name}", f"ring {A.ring.descriptor}"]
    for n, (h, v) in zip(A.names, A.degrees):
        lines.append(f"basis {n} {h} {v}")
    if A.unit is not None:
        lines.append(f"unit {A.unit}")
    if m.arity_max is not None:
        lines.append(f"window {m.arity_max}")
    for (i, j), c in sorted(m.components.items()):
        lines += _entry_lines(f"m {i} {j}", c)
    lines.append("end")
    return "\n".join(lines) + "\n"


def emit_morphism(name: str, f: MorphismFamily, source: str, target: str) -> str:
    lines = [f"morphism {name} {source} {target}"]
    if f.arity_max is not None:
        lines.append(f"window {f.arity_max}")
    for (s, t), c in sorted(f.components.items()):
        lines += _entry_lines(f"f {s} {t}", c)
    lines.append("end")
    return "\n".join(lines) + "\n"


def emit_cochain(name: str, c: MultiCochain, on: str) -> str:
    n, k, i = c.tridegree
    lines = [f"cochain {name} on {on}", f"tridegree {n} {k} {i}"]
    lines += _entry_lines("c", c)
    lines.append("end")
    return "\n".join(lines) + "\n"


def emit(pres: Presentation) -> str:
    """Canonical text: structures, then morphisms, then cochains, each in insertion order."""
    blocks = [emit_structure(n, m) for n, m in pres.structures.items()]
    for n, f in pres.morphisms.items():
        blocks.append(emit_morphism(n, f, _name_of(pres, f.source), _name_of(pres, f.target)))
    for n, (on, c) in pres.cochains.items():
        blocks.append(emit_cochain(n, c, on))
    return "\n".join(blocks)


def _name_of(pres: Presentation, m: StructureFamily) -> str:
    for n, s in pres.structures.items():
        if s is m:
            return n
    for n, s in pres.structures.items():
        if s == m and s.module == m.module:
            return n
    raise KeyError("morphism refers to a structure that is not part of the presentation")
