import pytest

from ldtt.errors import EscapingVariable
from ldtt.kernel import Checker, LinZoneState, check, check_term, check_type
from ldtt.syntax import (UNIT_INTRO, UNIV_L, UNIV_U, Ctx, Head, Judgment,
                         JudgmentKind, arrow, cvar, el, l_let, lty, lvar, mty,
                         node, pi, unsig)

IDENTITY = "def id (A : U, x : El A) : El A := x;"


def test_cartesian_identity(accepts):
    assert accepts(IDENTITY)
    assert accepts(IDENTITY +
                   "\ncheck (A : U, x : El A) id A (id A x) : El A;")


def test_type_mismatch(rejection):
    assert rejection(
        "def f (A B : U, a : El A) : El B := a;") == "TypeMismatch"


def test_not_equal(rejection):
    assert rejection(
        "checkeq (A : U, x y : El A) x == y : El A;") == "NotEqual"


@pytest.mark.parametrize("source", [
    "def lid (A : L ; a : El A) : El A := a;",
    "def lswap (A B : L ; t : El A * El B) : El B * El A"
    "  := let u * v be t in v * u;",
    "def curry (A B C : L ; f : El A * El B -o El C)"
    "  : El A -o El B -o El C := \\(a : El A) (b : El B). f (a * b);",
    "def diag (A : L ; a : El A) : El A & El A := <a, a>;",
    "def half (A : L ; a : El A) : El A & Top := <a, top>;",
    "def drop (A : L ; a : El A) : Top := top;",
    "def pswap (A B : L ; s : El A (+) El B) : El B (+) El A"
    "  := case s of inl u => inr u | inr v => inl v;",
    "def ex (A : L ; z : Zero, a : El A) : El A := absurd z;",
    "def relift (A : U ; a : Lt (El A)) : Lt (El A)"
    "  := let x be a in lift x;",
    "def pk (A : U, B : L, a : El A ; b : El B) : sub (x : El A). El B"
    "  := (a, b);",
    "def unpk (A : U, B : L ; q : sub (x : El A). El B) : El B"
    "  := let x, b be q in b;",
    "def at (A : U, B : El A -> L, t : Mt (cap (x : El A). El (B x)),"
    " a : El A) : El (B a) := unsig t a;",
    "def box (B : L, m : Mt (El B)) : Mt (El B) := sig (unsig m);",
    "def unit_let (A : L ; i : I, a : El A) : El A"
    "  := let unit be i in a;",
])
def test_linear_rules_accept(accepts, source):
    assert accepts(source)


@pytest.mark.parametrize("source", [
    # used twice
    "def dup (A : L ; a : El A) : El A * El A := a * a;",
    # never used
    "def drop (A : L ; a : El A) : I := unit;",
    "def first (A B : L ; a : El A, b : El B) : El A := a;",
    "def ignore (A B : L ; t : El A * El B) : El A"
    "  := let u * v be t in u;",
    # a linear function applied to a variable twice
    "def twice (A : L ; f : El A -o El A -o El A, a : El A) : El A"
    "  := f a a;",
])
def test_linearity_violations(rejection, source):
    assert rejection(source) == "LinearViolation"


@pytest.mark.parametrize("source", [
    "def f (A : L ; a : El A, b : El A) : El A & El A := <a, b>;",
    "def g (A : L ; s : El A (+) El A, i : I) : El A"
    "  := case s of inl u => let unit be i in u | inr v => v;",
])
def test_additive_branches_must_agree(rejection, source):
    assert rejection(source) == "ZoneMismatch"


def test_top_slacks_the_whole_zone(accepts):
    assert accepts(
        "def f (A B : L ; a : El A, b : El B) : El A * Top := a * top;")
    assert accepts("def g (A B : L ; a : El A, b : El B)"
                   "  : (El A * El B) & Top := <a * b, top>;")


def test_top_does_not_cover_the_other_branch(rejection):
    # b is left over by the first component of the pair
    assert rejection("def g (A B : L ; a : El A, b : El B)"
                     "  : El A & Top := <a, top>;") == "LinearViolation"


def test_injection_needs_expected_type(rejection):
    assert rejection("def f (A : L ; a : El A) : El A := fst (inl a);"
                     ) == "CannotInfer"


def test_trace_records_rules(check_source):
    (report, ) = check_source(
        "def lswap (A B : L ; t : El A * El B) : El B * El A"
        "  := let u * v be t in v * u;")
    assert report.accepted
    assert "⊗-E" in report.trace
    assert "⊗-I" in report.trace
    assert "lvar" in report.trace


def test_rejected_definition_poisons_dependents(check_source):
    reports = check_source(
        "def dup (A : L ; a : El A) : El A * El A := a * a;\n"
        "def ok (A : U, x : El A) : El A := x;\n"
        "check (A : L ; a : El A) dup A a : El A * El A;")
    assert [r.accepted for r in reports] == [False, True, False]
    assert reports[0].name == "dup"
    assert reports[2].reason == "UnboundName"
    assert "dup" in reports[2].message


def test_ua_needs_pragma(rejection, check_source):
    body = ("check (A : L, p : Id L A A)"
            " ua A A (\\(u : El A). u) (\\(u : El A). u) (\\(u : El A). u)"
            " p p : Id L A A;")
    assert rejection(body) == "FeatureDisabled"
    with pytest.warns(FutureWarning):
        reports = check_source("pragma ua;\n" + body)
    # the loops are not of the right type, but the rule is on now
    assert reports[-1].reason == "TypeMismatch"


def test_ua_warning_is_raised_for_every_file(check_source):
    for _ in range(2):
        with pytest.warns(FutureWarning, match="experimental"):
            check_source("pragma ua;")


def test_linear_variable_in_cartesian_position():
    # A : U, B : L ; b : El B
    ctx = Ctx().extend("A", UNIV_U).extend("B", UNIV_L).extend_lin(
        "b", el(cvar(0)))
    judgment = Judgment(JudgmentKind.LIN_TERM_HAS_TYPE, ctx,
                        (node(Head.L_INTRO, lvar("b")), lty(el(cvar(1)))))
    report = check(judgment)
    assert not report.accepted
    assert report.reason == "ModeError"


def test_lift_checks_against_the_expected_type(accepts):
    # on its own (a, b) would be inferred as a non-dependent pair
    assert accepts("def lp (A : U, B : El A -> U, a : El A, b : El (B a))"
                   "  : Lt (Sigma (x : El A). El (B x)) := lift (a, b);")
    assert accepts(
        "def lsub_bwd (A : U, B : El A -> U"
        " ; q : sub (x : El A). Lt (El (B x)))"
        "  : Lt (Sigma (x : El A). El (B x))"
        "  := let x, v be q in let y be v in lift (x, y);")


def test_let_body_type_cannot_escape():
    # A : U, B : El A -> L, t : Pi (x : El A). Mt (El (B x)) ; a : Lt (El A)
    ctx = (Ctx().extend("A", UNIV_U).extend("B", arrow(
        el(cvar(0)), UNIV_L)).extend(
            "t", pi(el(cvar(1)), mty(el(node(Head.APP, cvar(1), cvar(0)))))))
    ctx = ctx.extend_lin("a", lty(el(cvar(2))))
    e = l_let(lvar("a"), unsig(node(Head.APP, cvar(1), cvar(0))))
    with pytest.raises(EscapingVariable):
        Checker().infer_lin(ctx.without_lin(), LinZoneState.from_ctx(ctx), e)


def test_leftover_zone():
    ctx = Ctx().extend("B", UNIV_L).extend_lin("a", el(cvar(0))).extend_lin(
        "b", el(cvar(0)))
    report, zone = check_term(ctx.without_lin(), LinZoneState.from_ctx(ctx),
                              lvar("a"), el(cvar(0)))
    assert report.accepted
    assert zone.live() == ["b"]


def test_check_type():
    assert check_type(Ctx(), UNIV_U).accepted
    assert check_type(Ctx(), UNIT_INTRO).reason == "SortMismatch"
