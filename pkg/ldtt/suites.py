"""The model test suites run by ``ldtt model-test``.

Each suite takes a ``RunConfig`` and returns result rows (see
``ldtt.callbacks.utils.make_row``), one per checked instance or
property, in a fixed order.
"""
from typing import Callable, Dict, List, Optional, Sequence, Tuple
import logging

import numpy as np

from ldtt.callbacks.utils import make_row
from ldtt.config import RunConfig
from ldtt.corpus import CORPUS, PRELUDE_DIR, load_entry
from ldtt.equality import normalize
from ldtt.errors import (LdttError, ModelUnsupported, NotInvertibleComponent,
                         SizeOverflow)
from ldtt.gf import Mat, random_mat, zeros
from ldtt.kernel import check_decls
from ldtt.models.families import (FamiliesModel, check_frobenius,
                                  check_lm_adjunction, interp_ctx,
                                  random_basis, soundness_failures)
from ldtt.models.groupoids import (Functor, GpdDiagram, GSection, NatTrans,
                                   VectDiagram, arrow_category,
                                   check_sigma_pairing, codiscrete,
                                   cyclic_group, diagonal, discrete,
                                   grothendieck, random_representation,
                                   representations, small_groupoids, terminal)
from ldtt.models.kan import (check_adjunction, check_beck_chevalley,
                             check_frobenius as check_kan_frobenius, lan,
                             pullback, ran)
from ldtt.models.univalence import Universe, ua_forward, univalence_report
from ldtt.parser import ResolvedDecl, load_file
from ldtt.syntax import (UNIV_L, UNIV_U, CartEntry, Ctx, Head, Judgment,
                         JudgmentKind, app, cvar, el, lvar, node, pi, plus)

logger = logging.getLogger(__name__)

Row = Dict[str, object]

COMPUTATION_FILE = PRELUDE_DIR / "computation.ldtt"
EQUATION_KINDS = (JudgmentKind.CART_EQ, JudgmentKind.LIN_EQ)

RULE_SAMPLES = 14
CORPUS_SAMPLES = 5
KAN_SAMPLES = 4

# Errors that mean an instance is too big or outside the model, not wrong.
SKIP_ERRORS = (SizeOverflow, ModelUnsupported)


def _location(decl: ResolvedDecl) -> Optional[str]:
    return None if decl.span is None else str(decl.span)


# families model


def _sample_equation(judgment: Judgment, model: FamiliesModel,
                     rng: np.random.Generator,
                     samples: int) -> Tuple[int, List[int]]:
    """Check ``judgment`` under ``samples`` random bases; the number of
    instances run and the failing points of the first bad one."""
    for i in range(samples):
        basis = random_basis(judgment.ctx, rng, model, max_set=3, max_dim=3)
        failures = soundness_failures(judgment, interp_ctx(
            judgment.ctx, basis, model))
        if failures:
            return i + 1, failures
    return samples, []


def _equation_rows(unit: str, decls: Sequence[ResolvedDecl],
                   config: RunConfig, model: FamiliesModel,
                   rng: np.random.Generator, samples: int,
                   against_normal_form: bool) -> List[Row]:
    reports = check_decls(decls, config.flags, config.step_budget)
    rows = []
    for decl, report in zip(decls, reports):
        if decl.judgment is None or decl.judgment.kind not in EQUATION_KINDS:
            continue
        where = _location(decl)
        if not report.accepted:
            rows.append(
                make_row(unit, decl.name, False, reason=report.reason,
                         message=report.message, location=where))
            continue
        judgment = decl.judgment
        checks = [judgment]
        if against_normal_form:
            lhs, _, t = judgment.subjects
            nf = normalize(judgment.ctx, lhs, config.flags,
                           config.step_budget)
            checks.append(Judgment(judgment.kind, judgment.ctx, (lhs, nf, t)))
        try:
            ran_, failures = 0, []
            for j in checks:
                n, failures = _sample_equation(j, model, rng, samples)
                ran_ += n
                if failures:
                    break
        except SKIP_ERRORS as err:
            rows.append(
                make_row(unit, decl.name, None, reason=err.reason,
                         message=err.message, location=where))
            continue
        rows.append(
            make_row(unit, decl.name, not failures,
                     message=f"{ran_} instances", location=where,
                     trace=report.trace, failures=failures))
    return rows


def _swapped_injections() -> Judgment:
    """``t == case t of inl u => inr u | inr v => inl v``, which is false."""
    ctx = Ctx((CartEntry("A", UNIV_L), ),
              (("t", plus(el(cvar(0)), el(cvar(0)))), ))
    swapped = node(
        Head.PLUS_CASE,
        lvar("t"),
        node(Head.INR, lvar("u")),
        node(Head.INL, lvar("v")),
        names=("u", "v"))
    return Judgment(JudgmentKind.LIN_EQ, ctx,
                    (lvar("t"), swapped, plus(el(cvar(0)), el(cvar(0)))))


def _frobenius_ctx() -> Ctx:
    return Ctx((CartEntry("A", UNIV_U), CartEntry("X", UNIV_L),
                CartEntry("B", pi(el(cvar(1)), UNIV_L))))


def fam_suite(config: RunConfig) -> List[Row]:
    """Soundness of the corpus and of the computation rules in the
    families model, plus its Frobenius and ``L -| M`` properties."""
    model = FamiliesModel(config.prime, config.size_cap, config.dim_cap)
    rng = np.random.default_rng(config.seed)
    rows: List[Row] = []

    for name, _ in CORPUS:
        try:
            decls = load_entry(name)
        except LdttError as err:
            rows.append(
                make_row("fam/corpus", name, False, reason=err.reason,
                         message=err.message))
            continue
        for row in _equation_rows("fam/corpus", decls, config, model, rng,
                                  CORPUS_SAMPLES, False):
            row["entry"] = f"{name}/{row['entry']}"
            rows.append(row)

    rows.extend(
        _equation_rows("fam/rules", load_file(COMPUTATION_FILE), config,
                       model, rng, RULE_SAMPLES, True))

    control = _swapped_injections()
    failures = soundness_failures(
        control, interp_ctx(control.ctx, {"A": {"vec": 1}}, model))
    rows.append(
        make_row("fam/control", "swapped-injections", bool(failures),
                 message="expected to fail", failures=failures))

    ctx = _frobenius_ctx()
    a, xi, b = el(cvar(2)), el(cvar(1)), el(app(cvar(1), cvar(0)))
    for i in range(KAN_SAMPLES):
        basis = random_basis(ctx, rng, model, max_set=3, max_dim=2)
        ok = check_frobenius(interp_ctx(ctx, basis, model), a, xi, b)
        rows.append(make_row("fam/frobenius", f"random #{i}", ok))

    ctx = Ctx((CartEntry("A", UNIV_U), CartEntry("B", UNIV_L)))
    for n in (1, 2):
        for d in (1, 2):
            env = interp_ctx(ctx, {"A": {"set": n}, "B": {"vec": d}}, model)
            try:
                ok = check_lm_adjunction(env, el(cvar(1)), el(cvar(0)))
            except SKIP_ERRORS as err:
                rows.append(
                    make_row("fam/adjunction", f"|A|={n} dim B={d}", None,
                             reason=err.reason, message=err.message))
                continue
            rows.append(
                make_row("fam/adjunction", f"|A|={n} dim B={d}", ok))
    return rows


# diagram model


def fibrations() -> List[Tuple[str, GpdDiagram]]:
    """Small diagrams whose total groupoids stay within 3 objects."""
    d2 = discrete(2)
    swap = GpdDiagram(
        cyclic_group(2), (d2, ),
        (Functor.identity(d2), Functor(d2, d2, (1, 0), (1, 0)))).audit()
    return [
        ("1 <- BZ/2", GpdDiagram.constant(terminal(), cyclic_group(2))),
        ("1 <- 3", GpdDiagram.constant(terminal(), discrete(3))),
        ("1 <- I", GpdDiagram.constant(terminal(), codiscrete(2))),
        ("BZ/2 <- 1", GpdDiagram.constant(cyclic_group(2), terminal())),
        ("2 <- BZ/2", GpdDiagram.constant(discrete(2), cyclic_group(2))),
        ("BZ/2 swap 2", swap),
    ]


def _guarded(unit: str, entry: str, check: Callable[[], bool]) -> Row:
    try:
        return make_row(unit, entry, bool(check()))
    except SKIP_ERRORS as err:
        return make_row(unit, entry, None, reason=err.reason,
                        message=err.message)


def _sign(g, m: int, p: int) -> Mat:
    return Mat([[1 if g.identities[g.src[m]] == m else p - 1]], p)


def sign_transport_example(p: int = 3) -> Tuple[Tuple[Mat, ...],
                                               Tuple[Mat, ...]]:
    """Transport over ``BZ/2`` against its diagonal case.

    Over ``Γ = 1`` with ``A = BZ/2``, ``Ξ`` and ``C`` are the sign
    representations of the two copies of ``A`` in the identity type.
    Returns ``ĉ`` along the nontrivial loop and along ``refl``.
    """
    fiber = cyclic_group(2)
    a = GpdDiagram.constant(terminal(), fiber)
    ids = arrow_category(a)
    ex = ids.extension
    xi_mats, c_mats = [], []
    for m in ids.total.morphisms:
        ext2_mor = ids.total.morphism_labels[m][0]
        ext_mor, beta = ex.ext2.morphism_labels[ext2_mor]
        alpha = ex.ext.morphism_labels[ext_mor][1]
        xi_mats.append(_sign(fiber, beta, p))
        c_mats.append(_sign(fiber, alpha, p))
    ones = (1, ) * ids.total.n_objects
    xi = VectDiagram(ids.total, ones, tuple(xi_mats), p).audit()
    c_diag = VectDiagram(ids.total, ones, tuple(c_mats), p).audit()
    e = fiber.identities[0]
    m = GSection(a, (0, ), (e, )).audit()
    loop = next(f for f in fiber.morphisms if f != e)
    c = (Mat([[1]], p), )
    return (ids.c_hat(m, m, (loop, ), xi, c_diag, c),
            ids.c_hat(m, m, (e, ), xi, c_diag, c))


def _constant_section(a: GpdDiagram, x: int) -> GSection:
    fiber = a.ob_map[0]
    return GSection(a, (x, ) * a.base.n_objects,
                    (fiber.identities[x], ) * a.base.n_morphisms).audit()


def _id_type_rows(name: str, a: GpdDiagram, rng: np.random.Generator,
                  p: int) -> List[Row]:
    ids = arrow_category(a)
    rows = [
        make_row("gpd/id", f"{name} refl over diagonal",
                 ids.refl.then(ids.proj) == diagonal(a))
    ]
    fiber = a.ob_map[0]
    if any(f != fiber for f in a.ob_map) or any(
            f != Functor.identity(fiber) for f in a.mor_map):
        return rows
    ext = ids.extension.ext
    ones = (1, ) * ids.total.n_objects
    reps = list(representations(ids.total, ones, p, limit=64))
    xi = reps[int(rng.integers(0, len(reps)))]
    c_diag = VectDiagram.constant(ids.total, 2, p)
    c = []
    for x in ext.objects:
        r = ids.refl.ob[x]
        c.append(random_mat(rng, c_diag.dims[r], xi.dims[r], p))
    for x in fiber.objects:
        m = _constant_section(a, x)
        path = (fiber.identities[x], ) * a.base.n_objects
        phis = ids.phi(m, m, path)
        rows.append(
            make_row("gpd/id", f"{name} phi at refl, x={x}",
                     all(ids.total.identities[ids.total.src[f]] == f
                         for f in phis)))
        c_hat = ids.c_hat(m, m, path, xi, c_diag, c)
        expected = tuple(c[ext.object_index((g, x))]
                         for g in a.base.objects)
        rows.append(
            make_row("gpd/id", f"{name} transport at refl, x={x}",
                     c_hat == expected))
    return rows


def gpd_suite(config: RunConfig) -> List[Row]:
    """Kan extensions, Beck-Chevalley, Frobenius, Σ pairing and the
    identity type of the diagram model on small fibrations."""
    p, cap = config.prime, config.size_cap
    rng = np.random.default_rng(config.seed)
    rows: List[Row] = []
    for name, a in fibrations():
        total, proj = grothendieck(a, cap)
        base = proj.tgt
        for i in range(KAN_SAMPLES):
            f = random_representation(rng, total, 1, p)
            g = random_representation(rng, base, 1, p)
            rows.append(
                _guarded("gpd/adjunction", f"{name} #{i}",
                         lambda f=f, g=g: check_adjunction(proj, f, g, cap)))
        squares = (("id", Functor.identity(base)),
                   ("point", Functor.constant(terminal(), base, 0)))
        for label, along in squares:
            square = pullback(proj, along)
            for i in range(KAN_SAMPLES // 2):
                f = random_representation(rng, total, 2, p)
                rows.append(
                    _guarded(
                        "gpd/beck-chevalley", f"{name} along {label} #{i}",
                        lambda s=square, f=f: check_beck_chevalley(s, f, cap)))
        for i in range(KAN_SAMPLES):
            xi = random_representation(rng, base, 2, p)
            f = random_representation(rng, total, 2, p)
            rows.append(
                _guarded(
                    "gpd/frobenius", f"{name} #{i}",
                    lambda xi=xi, f=f: check_kan_frobenius(proj, xi, f, cap)))
        b = GpdDiagram.constant(total, discrete(2))
        rows.append(
            _guarded("gpd/sigma", f"{name} pairing",
                     lambda a=a, b=b: check_sigma_pairing(a, b)))
        rows.extend(_id_type_rows(name, a, rng, p))

    # a covering of connected groupoids: Lan and Ran agree in dimension
    name, swap = fibrations()[-1]
    total, proj = grothendieck(swap, cap)
    for i in range(KAN_SAMPLES):
        f = random_representation(rng, total, 2, p)
        rows.append(
            _guarded(
                "gpd/kan-dims", f"{name} #{i}", lambda f=f:
                lan(proj, f, cap).diagram.dims == ran(proj, f, cap)
                .diagram.dims))

    codisc = codiscrete(2)
    rows.append(
        make_row(
            "gpd/kan-dims", "coinvariants of I",
            lan(Functor.to_terminal(codisc), VectDiagram.constant(
                codisc, 1, p), cap).diagram.dims == (1, )))
    bz2 = cyclic_group(2)
    sign = VectDiagram.from_action(bz2, (1, ),
                                   lambda u: [[1 if u == 0 else 2]], 3)
    rows.append(
        make_row("gpd/kan-dims", "invariants of the sign over GF(3)",
                 ran(Functor.to_terminal(bz2), sign, cap).diagram.dims ==
                 (0, )))

    along_loop, at_refl = sign_transport_example(3)
    rows.append(
        make_row("gpd/id", "sign transport differs from refl",
                 along_loop != at_refl and at_refl == (Mat([[1]], 3), )))
    return rows


# linear univalence


def _trivial_and_sign() -> List[VectDiagram]:
    bz2 = cyclic_group(2)
    return [
        VectDiagram.from_action(bz2, (1, ), lambda u: [[1]], 3),
        VectDiagram.from_action(bz2, (1, ), lambda u: [[1 if u == 0 else 2]],
                                3),
    ]


def univalence_suite(config: RunConfig) -> List[Row]:
    """Both round trips of ``ua`` over every small groupoid."""
    p, k, cap = config.prime, config.universe_dim_cap, config.size_cap
    rows: List[Row] = []
    for name, base in small_groupoids():
        try:
            report = univalence_report(base, k, p, name, cap)
        except SKIP_ERRORS as err:
            rows.append(
                make_row("univalence", name, None, reason=err.reason,
                         message=err.message))
            continue
        rows.append(
            make_row(
                "univalence",
                name,
                report.passed,
                message=(f"{report.linear_types} types, {report.isos} isos, "
                         f"{report.sections} sections")))

    report = univalence_report(cyclic_group(2), 1, 3, "BZ/2 trivial, sign",
                               cap, types=_trivial_and_sign())
    # 2 automorphisms of each type, none between them
    rows.append(
        make_row("univalence", "BZ/2 trivial vs sign over GF(3)",
                 report.passed and report.isos == 4))

    one = terminal()
    d = VectDiagram.constant(one, 1, p)
    try:
        ua_forward(Universe(one, max(k, 1), p),
                   NatTrans(d, d, (zeros(1, 1, p), )))
        rejected = False
    except NotInvertibleComponent:
        rejected = True
    rows.append(make_row("univalence", "zero map is not a path", rejected))
    return rows


SUITES: Dict[str, Callable[[RunConfig], List[Row]]] = {
    "fam": fam_suite,
    "gpd": gpd_suite,
    "univalence": univalence_suite,
}
