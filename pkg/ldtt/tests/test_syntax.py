import pytest

from ldtt.errors import (DuplicateLinearName, IllFormedNode, NegativeIndex,
                         OutOfScope)
from ldtt.substitution import instantiate, lin_subst, subst
from ldtt.syntax import (CE, CT, LE, LT, UNIT_INTRO, UNIV_L, UNIV_U, Ctx,
                         Head, Judgment, JudgmentKind, alpha_eq, app, arrow,
                         cvar, el, free_cart_indices, free_lin_slots, lam,
                         lin_lam, linear_occurrences, lvar, node, pi, shift,
                         sort_of, sq_app, sq_lam, strengthen, tensor, with_)


def test_arity_is_checked():
    with pytest.raises(IllFormedNode):
        node(Head.APP, cvar(0))
    with pytest.raises(IllFormedNode):
        node(Head.PI, UNIV_U, UNIV_U)


def test_sorts():
    ctx = Ctx().extend("A", UNIV_U).extend("B", UNIV_L)
    assert sort_of(UNIV_U) is CT
    assert sort_of(el(cvar(1)), ctx) is CT
    assert sort_of(el(cvar(0)), ctx) is LT
    assert sort_of(lam(UNIV_U, cvar(0))) is CE
    assert sort_of(tensor(el(cvar(0)), el(cvar(0))), ctx) is LT
    assert sort_of(UNIT_INTRO) is LE


def test_child_sort_mismatch():
    ctx = Ctx().extend("B", UNIV_L)
    with pytest.raises(IllFormedNode):
        sort_of(pi(el(cvar(0)), UNIV_U), ctx)


def test_out_of_scope():
    with pytest.raises(OutOfScope):
        sort_of(cvar(0))
    with pytest.raises(OutOfScope):
        sort_of(lvar("u"))
    with pytest.raises(OutOfScope):
        Ctx().entry(0)


def test_duplicate_slots():
    ctx = Ctx().extend("B", UNIV_L).extend_lin("u", el(cvar(0)))
    with pytest.raises(DuplicateLinearName):
        ctx.extend_lin("u", el(cvar(0)))


def test_linear_zone_only_on_zoned_judgments():
    ctx = Ctx().extend("B", UNIV_L).extend_lin("u", el(cvar(0)))
    Judgment(JudgmentKind.LIN_TERM_HAS_TYPE, ctx, (lvar("u"), el(cvar(0))))
    with pytest.raises(IllFormedNode):
        Judgment(JudgmentKind.CART_TYPE_OK, ctx, (UNIV_U, ))
    with pytest.raises(IllFormedNode):
        Judgment(JudgmentKind.CART_EQ, Ctx(), (UNIV_U, ))


def test_shift_respects_binders():
    e = lam(UNIV_U, app(cvar(0), cvar(1)))
    assert shift(e, 0, 2) == lam(UNIV_U, app(cvar(0), cvar(3)))
    with pytest.raises(NegativeIndex):
        shift(cvar(0), 0, -1)


def test_arrow_shifts_codomain():
    assert arrow(el(cvar(0)), el(cvar(0))) == pi(el(cvar(0)), el(cvar(1)),
                                                 "_")


def test_subst_and_instantiate():
    body = app(cvar(0), cvar(1))
    assert instantiate(body, cvar(5)) == app(cvar(5), cvar(0))
    assert subst(lam(UNIV_U, cvar(1)), cvar(3)) == lam(UNIV_U, cvar(4))


def test_free_variables():
    e = lam(UNIV_U, app(cvar(0), cvar(2)))
    assert free_cart_indices(e) == {1}
    assert strengthen(cvar(3)) == cvar(2)
    assert strengthen(cvar(0)) is None
    f = lin_lam(UNIV_L, tensor(lvar("u"), lvar("v")), "u")
    assert free_lin_slots(f) == frozenset({"v"})


def test_additive_occurrences_count_once():
    pair = node(Head.WITH_PAIR, lvar("u"), lvar("u"))
    assert linear_occurrences(pair, "u") == 1
    both = node(Head.TEN_PAIR, lvar("u"), lvar("u"))
    assert linear_occurrences(both, "u") == 2


def test_alpha_equivalence_of_linear_binders():
    a = lin_lam(UNIV_L, lvar("u"), "u")
    b = lin_lam(UNIV_L, lvar("w"), "w")
    assert alpha_eq(a, b)
    assert a != b
    assert not alpha_eq(a, lin_lam(UNIV_L, lvar("z"), "w"))


def test_lin_subst_avoids_capture():
    e = lin_lam(UNIV_L, tensor(lvar("u"), lvar("v")), "u")
    out = lin_subst(e, "v", lvar("u"))
    bound = out.names[0]
    assert bound != "u"
    assert out.children[1] == tensor(lvar(bound), lvar("u"))


def test_with_type_sort():
    ctx = Ctx().extend("B", UNIV_L)
    assert sort_of(with_(el(cvar(0)), el(cvar(0))), ctx) is LT


def test_boxed_lambda_sorts():
    ctx = Ctx().extend("A", UNIV_U).extend("a", el(cvar(0)))
    boxed = sq_lam(el(cvar(1)), UNIT_INTRO)
    assert sort_of(boxed, ctx) is LE
    assert sort_of(sq_app(boxed, cvar(0)), ctx) is LE
    with pytest.raises(IllFormedNode):
        sort_of(sq_app(boxed, UNIT_INTRO), ctx)
