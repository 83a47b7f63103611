from pathlib import Path

import pytest
from pydantic import ValidationError

from ldtt.errors import MissingBasis, SizeOverflow
from ldtt.gf import idmat, is_invertible
from ldtt.models.families import (BasisEntry, FamiliesModel, check_frobenius,
                                  check_lm_adjunction, check_soundness,
                                  interp_cart_type, interp_ctx,
                                  interp_lin_term, interp_lin_type,
                                  load_basis, parse_basis, random_basis,
                                  soundness_failures)
from ldtt.parser import load, load_file
from ldtt.suites import COMPUTATION_FILE, EQUATION_KINDS
from ldtt.syntax import (TOP_TY, UNIT_I, UNIV_L, UNIV_U, CartEntry, Ctx,
                         app, arrow, cvar, el, lolli, lty, pi, sqsubset,
                         tensor, with_)

SAMPLES = Path(__file__).resolve().parents[2] / "samples"

# A : U, B : L
AB = Ctx((CartEntry("A", UNIV_U), CartEntry("B", UNIV_L)))
AB_BASIS = {"A": {"set": 3}, "B": {"vec": 2}}


@pytest.mark.parametrize("t,dim", [
    (el(cvar(0)), 2),
    (UNIT_I, 1),
    (TOP_TY, 0),
    (tensor(el(cvar(0)), el(cvar(0))), 4),
    (lolli(el(cvar(0)), el(cvar(0))), 4),
    (with_(el(cvar(0)), UNIT_I), 3),
    (lty(el(cvar(1))), 3),
    (sqsubset(el(cvar(1)), el(cvar(1))), 6),
])
def test_linear_type_dimensions(t, dim):
    env = interp_ctx(AB, AB_BASIS)
    assert interp_lin_type(env, t).dims == (dim, )


def test_cartesian_types_count_elements():
    env = interp_ctx(AB, {"A": {"set": 2}, "B": {"vec": 1}})
    assert interp_cart_type(env, el(cvar(1))).total_size() == 2
    # functions 2 -> 2
    assert interp_cart_type(env, arrow(el(cvar(1)), el(cvar(1)))).fiber(
        0).size == 4


def test_points_enumerate_ordinary_entries():
    ctx = AB.extend("a", el(cvar(1)))
    assert len(interp_ctx(ctx, AB_BASIS)) == 3


def test_universe_entries_need_a_basis():
    with pytest.raises(MissingBasis):
        interp_ctx(AB, {"A": {"set": 1}})


def test_caps():
    with pytest.raises(SizeOverflow):
        interp_ctx(AB.extend("f", arrow(el(cvar(1)), el(cvar(1)))),
                   {"A": {"set": 3}, "B": {"vec": 1}},
                   FamiliesModel(size_cap=20))
    env = interp_ctx(AB, AB_BASIS, FamiliesModel(dim_cap=3))
    with pytest.raises(SizeOverflow):
        interp_lin_type(env, tensor(el(cvar(0)), el(cvar(0))))


def test_swap_is_a_permutation():
    (d, ) = load("def lswap (A B : L ; t : El A * El B) : El B * El A"
                 "  := let u * v be t in v * u;")
    j = d.judgment
    env = interp_ctx(j.ctx, {"A": {"vec": 2}, "B": {"vec": 3}})
    (m, ) = interp_lin_term(env, j.subjects[0], j.subjects[1]).mats
    arr = m.to_array()
    assert m.shape == (6, 6)
    assert is_invertible(m)
    assert (arr.sum(axis=0) == 1).all() and (arr.sum(axis=1) == 1).all()
    assert m != idmat(6, 2)


def test_cartesian_equations():
    (ok, bad) = load("checkeq (A B : U, a : El A, b : El B)"
                     "  pr1 (a, b) == a : El A;\n"
                     "checkeq (A : U, a b : El A) a == b : El A;")
    assert check_soundness(ok.judgment, {"A": {"set": 2}, "B": {"set": 3}})
    env = interp_ctx(bad.judgment.ctx, {"A": {"set": 2}})
    assert len(env) == 4
    assert len(soundness_failures(bad.judgment, env)) == 2


def test_computation_rules_are_sound(rng):
    model = FamiliesModel()
    for decl in load_file(COMPUTATION_FILE):
        j = decl.judgment
        if j is None or j.kind not in EQUATION_KINDS:
            continue
        for _ in range(3):
            basis = random_basis(j.ctx, rng, model, max_dim=2)
            env = interp_ctx(j.ctx, basis, model)
            assert soundness_failures(j, env) == [], decl.name


def test_swapped_injections_are_caught():
    (d, ) = load("checkeq (A : L ; t : El A (+) El A)"
                 "  t == case t of inl u => inr u | inr v => inl v"
                 "  : El A (+) El A;")
    env = interp_ctx(d.judgment.ctx, {"A": {"vec": 1}})
    assert soundness_failures(d.judgment, env) == [0]


def test_box_samples_hold():
    basis = load_basis(str(SAMPLES / "boxes_basis.json"))
    assert basis["A"].vec == 2
    for decl in load_file(SAMPLES / "boxes.ldtt"):
        if decl.kind == "eq-check":
            assert check_soundness(decl.judgment, basis), decl.name


@pytest.mark.parametrize("n_a,dims_b", [(1, [1]), (2, [1, 2]),
                                        (3, [2, 1, 1])])
def test_frobenius(n_a, dims_b):
    # A : U, X : L, B : El A -> L
    ctx = Ctx((CartEntry("A", UNIV_U), CartEntry("X", UNIV_L),
               CartEntry("B", pi(el(cvar(1)), UNIV_L))))
    env = interp_ctx(ctx, {
        "A": {"set": n_a},
        "X": {"vec": 2},
        "B": {"vec": dims_b}
    })
    assert check_frobenius(env, el(cvar(2)), el(cvar(1)),
                           el(app(cvar(1), cvar(0))))


@pytest.mark.parametrize("n,d", [(1, 1), (2, 1), (1, 2)])
def test_l_m_adjunction(n, d):
    env = interp_ctx(AB, {"A": {"set": n}, "B": {"vec": d}})
    assert check_lm_adjunction(env, el(cvar(1)), el(cvar(0)))


def test_random_basis_sizes_families(rng):
    ctx = Ctx((CartEntry("A", UNIV_U),
               CartEntry("B", pi(el(cvar(0)), UNIV_L))))
    basis = random_basis(ctx, rng, max_set=3, max_dim=2)
    assert 1 <= basis["A"].set_size <= 3
    assert len(basis["B"].vec) == basis["A"].set_size
    assert all(1 <= d <= 2 for d in basis["B"].vec)


def test_basis_entries_take_exactly_one_form():
    with pytest.raises(ValidationError):
        BasisEntry.model_validate({"set": 1, "vec": 2})
    with pytest.raises(ValidationError):
        BasisEntry.model_validate({})
    with pytest.raises(TypeError):
        parse_basis([1, 2])
    assert parse_basis({"A": {"elem": 0}})["A"].elem == 0


def test_elem_fixes_a_point():
    ctx = AB.extend("a", el(cvar(1)))
    env = interp_ctx(ctx, {**AB_BASIS, "a": {"elem": 1}})
    assert len(env) == 1
    assert env.envs[0][2] == 1
    assert env.zone_den.dims == (1, )
