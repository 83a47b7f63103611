import pytest

from ldtt.config import EqFlags
from ldtt.equality import (RedexTrace, equal, equal_types, normalize,
                           one_step_reducts, reduce, replay)
from ldtt.errors import NonTermination
from ldtt.kernel import check
from ldtt.parser import load, load_file
from ldtt.suites import COMPUTATION_FILE
from ldtt.syntax import (UNIV_U, Ctx, Judgment, JudgmentKind, app, cvar, el,
                         lam, lvar)

# A : U, a : El A
CTX = Ctx().extend("A", UNIV_U).extend("a", el(cvar(0)))


def _identity_at_a():
    return lam(el(cvar(1)), cvar(0))


def test_beta():
    nf, trace = reduce(CTX, app(_identity_at_a(), cvar(0)))
    assert nf == cvar(0)
    assert trace.rules() == ["Π-C"]


def test_budget_stops_divergence():
    omega = lam(UNIV_U, app(cvar(0), cvar(0)))
    with pytest.raises(NonTermination) as info:
        reduce(Ctx(), app(omega, omega), budget=50)
    assert info.value.budget == 50


def test_definitions_unfold():
    decls = load("def id (A : U, x : El A) : El A := x;\n"
                 "check (B : U, y : El B) id B y : El B;")
    j = decls[1].judgment
    nf, trace = reduce(j.ctx, j.subjects[0])
    assert nf == cvar(0)
    assert trace.rules()[0] == "δ"
    assert trace.rules().count("Π-C") == 2
    assert replay(j.ctx, j.subjects[0], trace) == nf


def test_replay_rejects_foreign_steps():
    with pytest.raises(ValueError):
        replay(CTX, cvar(0), RedexTrace((("⊗-C", ()), )))


def test_one_step_reducts_finds_every_redex():
    inner = app(lam(el(cvar(2)), cvar(0)), cvar(0))
    e = app(lam(el(cvar(1)), inner), cvar(0))
    reducts = one_step_reducts(CTX, e)
    assert sorted(path for _, path, _ in reducts) == [(), (0, 1)]
    assert {rule for rule, _, _ in reducts} == {"Π-C"}
    for _, _, reduct in reducts:
        assert normalize(CTX, reduct) == cvar(0)


def test_equal():
    assert equal(CTX, el(cvar(1)), app(_identity_at_a(), cvar(0)), cvar(0))
    assert not equal(CTX.extend("b", el(cvar(1))), el(cvar(2)), cvar(0),
                     cvar(1))


@pytest.mark.parametrize("source", [
    # eta for -o
    "checkeq (A B : L ; f : El A -o El B)"
    "  \\(u : El A). f u == f : El A -o El B;",
    # any two terms of Top are equal
    "checkeq (A B : L ; t : El A * El B)"
    "  let u * v be t in top == top : Top;",
    # uniqueness of L
    "checkeq (A : U ; y : Lt (El A)) let x be y in lift x == y : Lt (El A);",
    # eta for M
    "checkeq (B : L, m : Mt (El B)) sig (unsig m) == m : Mt (El B);",
])
def test_extensional_rules(accepts, source):
    assert accepts(source)


def test_sigma_eta_is_optional(accepts, rejection):
    source = ("checkeq (A B : U, p : El A * El B)"
              "  (pr1 p, pr2 p) == p : El A * El B;")
    assert rejection(source) == "NotEqual"
    assert accepts("pragma eta_sigma;\n" + source)
    assert accepts(source, EqFlags(eta_sigma=True))


def _equations():
    for decl in load_file(COMPUTATION_FILE):
        j = decl.judgment
        if j is not None and j.kind in (JudgmentKind.CART_EQ,
                                        JudgmentKind.LIN_EQ):
            yield decl.name, j


@pytest.mark.parametrize("name,judgment", list(_equations()))
def test_normal_forms_are_normal(name, judgment):
    for side in judgment.subjects[:2]:
        nf = normalize(judgment.ctx, side)
        assert one_step_reducts(judgment.ctx, nf) == []
        assert normalize(judgment.ctx, nf) == nf


def test_computation_rules_hold(check_source):
    with open(COMPUTATION_FILE, encoding="utf-8") as f:
        reports = check_source(f.read())
    assert reports
    assert all(r.accepted for r in reports), [
        (r.name, r.message) for r in reports if not r.accepted
    ]


def test_equal_types_up_to_beta():
    a_again = el(app(lam(UNIV_U, cvar(0)), cvar(1)))
    assert equal_types(CTX, el(cvar(1)), a_again)
    assert not equal_types(CTX, el(cvar(1)), UNIV_U)


def test_with_eta_is_optional(accepts, rejection):
    source = ("checkeq (A B : L ; t : El A & El B)"
              "  <fst t, snd t> == t : El A & El B;")
    assert rejection(source) == "NotEqual"
    assert accepts("pragma eta_with;\n" + source)
    assert accepts(source, EqFlags(eta_with=True))
    # two additive pairs are still compared componentwise
    assert accepts("checkeq (A B : L ; f : El A -o El B)"
                   "  <\\(u : El A). f u, f> == <f, f>"
                   "  : (El A -o El B) & (El A -o El B);")


def test_tensor_lets_do_not_commute(accepts, rejection):
    swap = ("def lswap (A B : L ; t : El A * El B) : El B * El A"
            "  := let u * v be t in v * u;\n")
    assert accepts(swap + "checkeq (A B : L ; a : El A, b : El B)"
                   "  lswap A B (a * b) == b * a : El B * El A;")
    assert rejection(swap + "checkeq (A B : L ; t : El A * El B)"
                     "  lswap B A (lswap A B t) == t : El A * El B;"
                     ) == "NotEqual"


def test_lift_under_sig_is_not_collapsed(check_source):
    (report, ) = check_source(
        "check (A : U, B : L, g : Mt (Lt (El A)) -> Mt (El B)"
        " ; y : Lt (El A))"
        "  let x be y in unsig (g (sig (lift x))) : El B;")
    assert report.accepted
    j = report.judgment
    nf, trace = reduce(j.ctx, j.subjects[0])
    assert "L-U" not in trace.rules()
    assert check(Judgment(j.kind, j.ctx, (nf, j.subjects[1]))).accepted


def test_lift_outside_sig_still_collapses(check_source):
    (report, ) = check_source(
        "check (A : U, B : L, g : Mt (Lt (El A)) -> Mt (El B)"
        " ; y : Lt (El A))"
        "  let x be y in lift x : Lt (El A);")
    j = report.judgment
    nf, trace = reduce(j.ctx, j.subjects[0])
    assert trace.rules() == ["L-U"]
    assert nf == lvar("y")
