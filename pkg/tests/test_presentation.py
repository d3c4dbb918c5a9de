import glob
import os

import pytest

from dainf.algebras import acyclic_pair_bidga, collapse_morphism, resolution_bidga
from dainf.catalog import CORPUS, corpus_path, load
from dainf.presentation import ParseError, Presentation, emit, emit_morphism, emit_structure, parse, parse_file
from dainf.structure import VERIFIED, check_da_infinity

CORPUS_FILES = sorted(os.path.basename(p) for p in glob.glob(os.path.join(CORPUS, "*.dai")))


@pytest.mark.parametrize("fname", CORPUS_FILES)
def test_corpus_files_are_canonical(fname):
    with open(corpus_path(fname), encoding="utf-8") as fh:
        text = fh.read()
    assert emit(parse(text)) == text


def test_exterior_file():
    m = load("exterior.dai").structure()
    assert m.module.names == ("1", "e", "e^2", "e^3")
    assert m.module.unit == "1"
    assert check_da_infinity(m).status == VERIFIED


def test_ground_file_is_an_empty_structure():
    m = load("ground.dai").structure()
    assert m.labels() == []
    assert m.module.unit is None
    assert check_da_infinity(m).status == VERIFIED


def test_emitted_structures_parse_back():
    B = acyclic_pair_bidga()
    C = resolution_bidga()
    g = collapse_morphism(B, C)
    text = emit_structure("B", B) + "\n" + emit_structure("C", C) + "\n" + emit_morphism("g", g, "B", "C")
    pres = parse(text)
    assert pres.structure("B") == B
    assert pres.structure("C") == C
    assert pres.morphism("g").component(0, 1) == g.component(0, 1)
    assert emit(pres) == emit(parse(emit(pres)))


def test_ring_override():
    pres = parse_file(corpus_path("exterior.dai"), "q")
    assert pres.structure().ring.descriptor == "q"


def test_cochain_block():
    pres = load("local_sphere_m4.dai")
    p = pres.cochain("p")
    assert p.tridegree == (3, 0, -2)
    assert pres.cochains["p"][0] == "L"


def test_lookup_errors():
    pres = Presentation()
    with pytest.raises(KeyError):
        pres.structure("missing")


BAD = [
    ("structure S\nring zz\nbasis 1 0 0\nm 0 2 : 1 -> 1*1\nend\n", 4, 9, "takes 2 inputs"),
    ("structure S\nring zz\nbasis a 0 -1\nm 0 2 : a a -> 1*a\nend\n", 4, 1, "violates the bidegree"),
    ("structure S\nring zz\nbasis 1 0 0\n", 4, 1, "unterminated"),
    ("cochain c on X\nend\n", 1, 14, "undeclared structure"),
    ("structure S\nring zz\nbasis 1 0 0\nm 0 2 : 1 1 -> 1*q\nend\n", 4, 18, "undeclared basis element"),
    ("structure S\nring zz\nbasis x -1 0\nend\n", 3, 9, "non-negative"),
    ("structure S\nring zz\nbasis x 0 0\nbasis x 0 1\nend\n", 4, 7, "declared twice"),
    ("structure S\nring zp:6\nend\n", 2, 6, "prime"),
    ("widget W\n", 1, 1, "expected 'structure'"),
]


@pytest.mark.parametrize("text,line,column,fragment", BAD)
def test_parse_errors_carry_positions(text, line, column, fragment):
    with pytest.raises(ParseError) as info:
        parse(text)
    err = info.value
    assert (err.line, err.column) == (line, column)
    assert fragment in err.message


def test_comments_and_blank_lines_are_ignored():
    text = "# header\n\nstructure S  # trailing\nring zz\nbasis 1 0 0\nunit 1\nm 0 2 : 1 1 -> 1*1\nend\n"
    m = parse(text).structure("S")
    assert m.labels() == [(0, 2)]
