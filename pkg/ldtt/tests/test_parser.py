from pathlib import Path

import pytest

from ldtt.corpus import prelude_files
from ldtt.errors import (DuplicateLinearName, DuplicateName, LexError,
                         LinearVarInType, ParseError, SortMismatch,
                         UnboundName)
from ldtt.parser import DECL_KINDS, load, load_file, parse
from ldtt.pretty import pretty_file
from ldtt.syntax import Head, JudgmentKind, alpha_eq

SAMPLES = Path(__file__).resolve().parents[2] / "samples"


def test_decl_kinds():
    decls = load("""
        pragma eta_sigma;
        def id (A : U, x : El A) : El A := x;
        check (A : U, x : El A) id A x : El A;
        checkeq (A : U, x : El A) id A x == x : El A;
    """)
    assert [d.kind for d in decls] == ["flag", "def", "check", "eq-check"]
    assert {d.kind for d in decls} == set(DECL_KINDS)
    assert decls[0].pragma == "eta_sigma"
    assert decls[1].judgment.kind is JudgmentKind.CART_TERM_HAS_TYPE
    assert decls[3].judgment.kind is JudgmentKind.CART_EQ
    assert decls[2].name.startswith("check@")


def test_definitions_extend_the_signature():
    decls = load("def id (A : U, x : El A) : El A := x;\n"
                 "check (A : U, x : El A) id A x : El A;")
    assert decls[1].n_globals == 1
    assert len(decls[1].judgment.ctx) == 3


def test_linear_parameters_go_to_the_zone():
    (d, ) = load("def lid (A : L ; a : El A) : El A := a;")
    j = d.judgment
    assert j.kind is JudgmentKind.LIN_TERM_HAS_TYPE
    assert [s for s, _ in j.ctx.lin] == ["a"]
    assert j.subjects[0].head is Head.LIN_VAR
    assert d.linear_params == 1


def test_linear_definitions_are_boxed():
    (d, ) = load("def lid (A : L ; a : El A) : El A := a;")
    assert d.entry.type.head is Head.PI
    assert d.entry.type.children[1].head is Head.M_TY


def test_application_is_chosen_by_sort():
    (d, ) = load(
        "check (A : U, B : El A -> L, t : Mt (cap (x : El A). El (B x)),"
        " a : El A) unsig t a : El (B a);")
    assert d.judgment.subjects[0].head is Head.SQ_APP


@pytest.mark.parametrize("source", [
    "def $x (A : U) : U := A;",
    "def f (A : U) : U := A; # comment",
])
def test_illegal_characters(source):
    with pytest.raises(LexError) as info:
        parse(source, "bad.ldtt")
    assert not isinstance(info.value, ParseError)
    assert str(info.value.span).startswith("bad.ldtt:1:")


def test_comment_text_is_not_lexed():
    assert parse("-- a $ comment\npragma nat_l;") != []


@pytest.mark.parametrize("source", [
    "def f (A : U) : U := ;",
    "def f (A : U) U := A;",
    "checkeq (A : U, x : El A) x == : El A;",
    "def (A : U) : U := A;",
])
def test_grammar_mismatch(source):
    with pytest.raises(ParseError) as info:
        parse(source)
    assert info.value.span is not None


def test_parse_error_location():
    with pytest.raises(ParseError) as info:
        parse("pragma nat_l;\ndef f (A : U) : U := ;", "x.ldtt")
    assert info.value.span.line == 2


def test_unknown_pragma():
    with pytest.raises(ParseError):
        load("pragma funext;")


@pytest.mark.parametrize("name",
                         ["nat_l", "eta_sigma", "eta_sub", "eta_with", "ua"])
def test_every_pragma_parses(name):
    (decl, ) = load(f"pragma {name};")
    assert decl.kind == "flag"
    assert decl.pragma == name


def test_unbound_name():
    with pytest.raises(UnboundName) as info:
        load("def f (A : U) : U := B;")
    assert info.value.decl == "f"


def test_duplicate_definition():
    with pytest.raises(DuplicateName):
        load("def f (A : U) : U := A;\ndef f (A : U) : U := A;")


def test_duplicate_parameter():
    with pytest.raises(DuplicateName):
        load("def f (A : U, A : U) : U := A;")


def test_duplicate_linear_parameter():
    with pytest.raises(DuplicateLinearName):
        load("def f (A : L ; a : El A, a : El A) : El A := a;")


def test_linear_parameter_needs_linear_type():
    with pytest.raises(SortMismatch):
        load("def f (A : U ; a : El A) : El A := a;")


def _same_judgments(decls, again):
    assert len(decls) == len(again)
    for d, e in zip(decls, again):
        assert d.kind == e.kind
        if d.judgment is None:
            assert e.judgment is None
            continue
        assert d.judgment.kind is e.judgment.kind
        for s, t in zip(d.judgment.subjects, e.judgment.subjects):
            assert alpha_eq(s, t)


@pytest.mark.parametrize(
    "path",
    [*prelude_files(), SAMPLES / "identity.ldtt", SAMPLES / "boxes.ldtt"],
    ids=lambda p: p.name)
def test_pretty_printing_resolves_back(path):
    decls = load_file(path)
    _same_judgments(decls, load(pretty_file(decls)))


def test_linear_variable_inside_a_type():
    with pytest.raises(LinearVarInType):
        load("def f (A : L ; a : El A) : El A := (\\(b : El a). b) a;")
