import numpy as np
import pytest

from ldtt.config import EqFlags
from ldtt.equality import normalize, one_step_reducts
from ldtt.errors import SizeOverflow
from ldtt.generate import GenConfig, TermGenerator, generate, inferable
from ldtt.kernel import check
from ldtt.models.families import (FamiliesModel, interp_ctx, random_basis,
                                  soundness_failures)
from ldtt.syntax import (Ctx, Head, Judgment, JudgmentKind, cvar, el,
                         linear_occurrences, lvar, node, tensor)

LINEARITY_SEEDS = range(500)
REDUCTION_SEEDS = range(300)
MODEL_SEEDS = range(200)

# no injections or absurd: their normal forms can sit where a type must
# be inferred
REDUCTION_CONFIG = GenConfig(injections=False, zero=False, box=True)
MODEL_CONFIG = GenConfig(fuel=3, type_depth=1, inputs=2)


def _with(g, ctx=None, subjects=None):
    return Judgment(g.judgment.kind, g.ctx if ctx is None else ctx,
                    g.judgment.subjects if subjects is None else subjects)


@pytest.mark.parametrize("seed", LINEARITY_SEEDS)
def test_generated_terms_are_linear(seed):
    g = generate(seed)
    report = check(g.judgment)
    assert report.accepted, (g.term, report.message)
    if g.slack:
        return
    for slot, _ in g.ctx.lin:
        assert linear_occurrences(g.term, slot) == 1, slot
    # A : L is the last cartesian entry
    unused = g.ctx.extend_lin("extra", el(cvar(len(g.ctx) - 1)))
    assert check(_with(g, ctx=unused)).reason == "LinearViolation"
    if g.ctx.lin:
        slot, t = g.ctx.lin[0]
        twice = (node(Head.TEN_PAIR, g.term, lvar(slot)), tensor(g.type, t))
        assert check(_with(g, subjects=twice)).reason == "LinearViolation"


@pytest.mark.parametrize("seed", range(100))
def test_zone_order_does_not_matter(seed):
    g = generate(seed)
    rng = np.random.default_rng(seed)
    for ctx in (g.ctx, g.ctx.extend_lin("extra", el(cvar(len(g.ctx) - 1)))):
        before = check(_with(g, ctx=ctx))
        order = rng.permutation(len(ctx.lin))
        for lin in (ctx.lin[::-1], tuple(ctx.lin[i] for i in order)):
            after = check(_with(g, ctx=Ctx(ctx.cart, lin)))
            assert (after.accepted, after.reason) == (before.accepted,
                                                      before.reason)


@pytest.mark.parametrize("flags", [EqFlags(), EqFlags(nat_l=True)],
                         ids=["plain", "nat_l"])
@pytest.mark.parametrize("seed", REDUCTION_SEEDS)
def test_reduction_preserves_typing(seed, flags):
    g = generate(seed, REDUCTION_CONFIG)
    assert check(g.judgment, flags).accepted
    nf = normalize(g.ctx, g.term, flags)
    report = check(_with(g, subjects=(nf, g.type)), flags)
    assert report.accepted, (g.term, nf, report.message)
    assert normalize(g.ctx, nf, flags) == nf
    assert one_step_reducts(g.ctx, nf, flags) == []


@pytest.mark.parametrize("seed", REDUCTION_SEEDS)
def test_terms_convert_to_their_normal_forms(seed):
    g = generate(seed, REDUCTION_CONFIG)
    nf = normalize(g.ctx, g.term)
    assert check(
        Judgment(JudgmentKind.LIN_EQ, g.ctx, (g.term, nf, g.type))).accepted


def _sized_instance(seed, model):
    rng = np.random.default_rng(seed)
    gen = TermGenerator(rng, MODEL_CONFIG)
    for _ in range(50):
        g = gen.term()
        nf = normalize(g.ctx, g.term)
        j = Judgment(JudgmentKind.LIN_EQ, g.ctx, (g.term, nf, g.type))
        basis = random_basis(g.ctx, rng, model, max_set=2, max_dim=2)
        try:
            return g, soundness_failures(j, interp_ctx(g.ctx, basis, model))
        except SizeOverflow:
            continue
    pytest.fail(f"no instance of seed {seed} fits the model")


@pytest.mark.parametrize("seed", MODEL_SEEDS)
def test_reduction_is_sound_in_families(seed):
    model = FamiliesModel(2, dim_cap=256)
    g, failures = _sized_instance(seed, model)
    assert failures == [], g.term


def test_generation_is_seeded():
    assert generate(7).judgment == generate(7).judgment
    assert len({generate(seed).judgment for seed in range(20)}) > 1


def test_every_connective_shows_up():
    heads = set()

    def walk(e):
        heads.add(e.head)
        for c in e.children:
            walk(c)

    for seed in range(200):
        walk(generate(seed).term)
        walk(generate(seed, REDUCTION_CONFIG).term)
    assert {
        Head.TEN_PAIR, Head.TEN_LET, Head.UNIT_LET, Head.LIN_LAM,
        Head.LIN_APP, Head.WITH_PAIR, Head.WITH_FST, Head.WITH_SND,
        Head.INL, Head.INR, Head.PLUS_CASE, Head.ZERO_ELIM, Head.TOP_INTRO,
        Head.L_INTRO, Head.L_LET, Head.M_ELIM
    } <= heads


def test_inferable():
    assert inferable(lvar("a"))
    assert not inferable(node(Head.INL, lvar("a")))
    assert not inferable(node(Head.TEN_PAIR, lvar("a"),
                              node(Head.INR, lvar("b"))))
    assert inferable(node(Head.PLUS_CASE, lvar("s"), lvar("u"),
                          node(Head.INL, lvar("v")), names=("u", "v")))

