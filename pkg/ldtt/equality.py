"""Definitional equality.

``reduce`` rewrites to normal form with a leftmost-outermost strategy.
When ``nat_l`` is on, lets of ``Lt`` are first hoisted out of linear
elimination frames until none is left; ``eta_sub`` does the same for
``sub``-lets. ``equal`` normalizes and then compares type-directed,
extensionally at Pi, cap, -o, Mt and Top, and at & when ``eta_with`` is on.
"""
from dataclasses import dataclass, field
from typing import Callable, Iterator, List, Optional, Tuple
import logging

from ldtt.config import EqFlags
from ldtt.errors import NonTermination
from ldtt.substitution import (fresh_slot, instantiate, instantiate_many,
                               lin_subst, lin_subst_many)
from ldtt.syntax import (CE, CT, Ctx, Expr, Head, alpha_eq, bound_lin_slots,
                         cvar, free_lin_slots, lvar, node, occurs_cart,
                         shift)

logger = logging.getLogger(__name__)

DEFAULT_STEP_BUDGET = 100_000

Path = Tuple[int, ...]

# linear positions, not under any binder, that a let may be hoisted out of
FRAME_POSITIONS = {
    Head.LIN_APP: (0, 1),
    Head.TEN_PAIR: (0, 1),
    Head.TEN_LET: (0, ),
    Head.UNIT_LET: (0, ),
    Head.WITH_FST: (0, ),
    Head.WITH_SND: (0, ),
    Head.INL: (0, ),
    Head.INR: (0, ),
    Head.PLUS_CASE: (0, ),
    Head.ZERO_ELIM: (0, ),
    Head.SQ_APP: (0, ),
    Head.SQ_PAIR: (1, ),
    Head.SQ_LET: (0, ),
    Head.L_LET: (0, ),
}

HOIST_RULES = ("Nat_L", "eta-⊏")


@dataclass(frozen=True)
class RedexTrace:
    steps: Tuple[Tuple[str, Path], ...] = field(default_factory=tuple)

    def __len__(self) -> int:
        return len(self.steps)

    def rules(self) -> List[str]:
        return [rule for rule, _ in self.steps]


class _Defs:
    """Definition lookup for a position ``depth`` binders below ``ctx``."""

    def __init__(self, ctx: Ctx, depth: int = 0) -> None:
        self.ctx = ctx
        self.depth = depth

    def under(self, n: int) -> "_Defs":
        return self if n == 0 else _Defs(self.ctx, self.depth + n)

    def value(self, i: int) -> Optional[Expr]:
        if i < self.depth or i - self.depth >= len(self.ctx.cart):
            return None
        value = self.ctx.value_of(i - self.depth)
        return None if value is None else shift(value, 0, self.depth)


def _get(e: Expr, path: Path) -> Expr:
    for i in path:
        e = e.children[i]
    return e


def _put(e: Expr, path: Path, new: Expr) -> Expr:
    if not path:
        return new
    i = path[0]
    children = list(e.children)
    children[i] = _put(children[i], path[1:], new)
    return e.with_children(children)


def _defs_at(ctx: Ctx, e: Expr, path: Path) -> _Defs:
    depth = 0
    for i in path:
        depth += e.cart_binders(i)
        e = e.children[i]
    return _Defs(ctx, depth)


def is_eta_expansion(c: Expr, target: Expr, flags: EqFlags) -> bool:
    """Whether ``c`` is an η-expansion of the neutral ``target``."""
    if alpha_eq(c, target):
        return True
    h = c.head
    if h is Head.M_INTRO:
        return is_eta_expansion(c.children[0], node(Head.M_ELIM, target),
                                flags)
    if h is Head.WITH_PAIR and flags.eta_with:
        return (is_eta_expansion(c.children[0],
                                 node(Head.WITH_FST, target), flags)
                and is_eta_expansion(c.children[1],
                                     node(Head.WITH_SND, target), flags))
    if h is Head.PAIR_C and flags.eta_sigma:
        return (is_eta_expansion(c.children[0], node(Head.PR1, target),
                                 flags)
                and is_eta_expansion(c.children[1], node(Head.PR2, target),
                                     flags))
    if h is Head.LAM:
        return is_eta_expansion(
            c.children[1], node(Head.APP, shift(target, 0, 1), cvar(0)),
            flags)
    if h is Head.SQ_LAM:
        return is_eta_expansion(
            c.children[1], node(Head.SQ_APP, shift(target, 0, 1), cvar(0)),
            flags)
    if h is Head.LIN_LAM:
        u = c.names[0]
        if u in free_lin_slots(target):
            return False
        return is_eta_expansion(c.children[1],
                                node(Head.LIN_APP, target, lvar(u)), flags)
    return False


def _lu_sites(u: Expr, depth: int, flags: EqFlags,
              path: Path = ()) -> Optional[List[Path]]:
    """Positions of ``lift x`` (x = index ``depth``) in ``u``; None when x
    also occurs in any other form.

    Cartesian subterms are opaque: a ``lift x`` under ``sig`` cannot take a
    linear variable in its place.
    """
    if u.signature.sort in (CE, CT):
        return None if occurs_cart(u, depth) else []
    if u.head is Head.L_INTRO and occurs_cart(u, depth):
        if is_eta_expansion(u.children[0], cvar(depth), flags):
            return [path]
        return None
    sites: List[Path] = []
    for i, c in enumerate(u.children):
        found = _lu_sites(c, depth + u.cart_binders(i), flags, path + (i, ))
        if found is None:
            return None
        sites.extend(found)
    return sites


def _contract_l_u(e: Expr, flags: EqFlags) -> Optional[Expr]:
    a, u = e.children
    sites = _lu_sites(u, 0, flags)
    if sites is None or len(sites) != 1:
        return None
    hole = fresh_slot("y", free_lin_slots(u) | bound_lin_slots(u)
                      | free_lin_slots(a) | bound_lin_slots(a))
    body = shift(_put(u, sites[0], lvar(hole)), 0, -1)
    return lin_subst(body, hole, a)


def _is_transport(c_type: Expr, c: Expr) -> bool:
    if c_type.head is not Head.LOLLI:
        return False
    src, dst = c_type.children
    if not (src.head is Head.EL and dst.head is Head.EL):
        return False
    if not (alpha_eq(src.children[0], cvar(2))
            and alpha_eq(dst.children[0], cvar(1))):
        return False
    return (c.head is Head.LIN_LAM and c.children[1].head is Head.LIN_VAR
            and c.children[1].slot == c.names[0])


def contract(e: Expr, defs: _Defs,
             flags: EqFlags) -> Optional[Tuple[str, Expr]]:
    """The redex rooted at ``e``, as ``(rule, contractum)``."""
    h = e.head
    ch = e.children
    if h is Head.CART_VAR:
        value = defs.value(e.index)
        return None if value is None else ("δ", value)
    if h is Head.APP and ch[0].head is Head.LAM:
        return "Π-C", instantiate(ch[0].children[1], ch[1])
    if h is Head.SQ_APP and ch[0].head is Head.SQ_LAM:
        return "⊓-C", instantiate(ch[0].children[1], ch[1])
    if h is Head.LIN_APP and ch[0].head is Head.LIN_LAM:
        f = ch[0]
        return "⊸-C", lin_subst(f.children[1], f.names[0], ch[1])
    if h in (Head.PR1, Head.PR2) and ch[0].head is Head.PAIR_C:
        return "Σ-C", ch[0].children[0 if h is Head.PR1 else 1]
    if h in (Head.SIG_ELIM1, Head.SIG_ELIM2) and ch[2].head is Head.PAIR_C:
        return "Σ-C", instantiate_many(ch[1], ch[2].children)
    if h in (Head.ID_ELIM1, Head.ID_ELIM2) and ch[2].head is Head.REFL:
        return "Id-C", instantiate(ch[1], ch[2].children[0])
    if (h is Head.ID_ELIM2 and flags.ua_rules and ch[2].head is Head.UA
            and not e.captured and _is_transport(ch[0], ch[1])):
        return "ua-C1", ch[2].children[2]
    if h is Head.TEN_LET and ch[0].head is Head.TEN_PAIR:
        u, v = e.names
        a, b = ch[0].children
        return "⊗-C", lin_subst_many(ch[1], {u: a, v: b})
    if h is Head.UNIT_LET and ch[0].head is Head.UNIT_INTRO:
        return "I-C", ch[1]
    if h in (Head.WITH_FST, Head.WITH_SND) and ch[0].head is Head.WITH_PAIR:
        return "&-C", ch[0].children[0 if h is Head.WITH_FST else 1]
    if h is Head.PLUS_CASE and ch[0].head in (Head.INL, Head.INR):
        k = 0 if ch[0].head is Head.INL else 1
        return "⊕-C", lin_subst(ch[1 + k], e.names[k], ch[0].children[0])
    if h is Head.SQ_LET and ch[0].head is Head.SQ_PAIR:
        s, t = ch[0].children
        body = lin_subst(ch[1], e.names[1], shift(t, 0, 1))
        return "⊏-C", instantiate(body, s)
    if h is Head.SQ_LET and flags.eta_sub:
        c = ch[1]
        if (c.head is Head.SQ_PAIR and alpha_eq(c.children[0], cvar(0))
                and c.children[1].head is Head.LIN_VAR
                and c.children[1].slot == e.names[1]):
            return "eta-⊏", ch[0]
    if h is Head.L_LET and ch[0].head is Head.L_INTRO:
        return "L-C", instantiate(ch[1], ch[0].children[0])
    if h is Head.L_LET:
        collapsed = _contract_l_u(e, flags)
        if collapsed is not None:
            return "L-U", collapsed
    if h is Head.M_ELIM and ch[0].head is Head.M_INTRO:
        return "M-C1", ch[0].children[0]
    if h is Head.M_INTRO and ch[0].head is Head.M_ELIM:
        return "M-C2", ch[0].children[0]
    if (h is Head.PAIR_C and flags.eta_sigma and ch[0].head is Head.PR1
            and ch[1].head is Head.PR2
            and alpha_eq(ch[0].children[0], ch[1].children[0])):
        return "eta-Σ", ch[0].children[0]
    return None


def hoist(e: Expr, flags: EqFlags) -> Optional[Tuple[str, Expr]]:
    """Move a let out of the leftmost frame position of ``e``."""
    for i in FRAME_POSITIONS.get(e.head, ()):
        child = e.children[i]
        if child.head is Head.L_LET and flags.nat_l:
            t, u = child.children
            rest = [
                u if j == i else shift(c, e.cart_binders(j), 1)
                for j, c in enumerate(e.children)
            ]
            return "Nat_L", node(
                Head.L_LET, t, e.with_children(rest), names=child.names)
        if child.head is Head.SQ_LET and flags.eta_sub:
            t, c = child.children
            x, y = child.names
            others = set()
            for j, other in enumerate(e.children):
                if j != i:
                    others |= free_lin_slots(other)
            new_y = fresh_slot(y, others | free_lin_slots(c))
            if new_y != y:
                c = lin_subst(c, y, lvar(new_y))
            rest = [
                c if j == i else shift(o, e.cart_binders(j), 1)
                for j, o in enumerate(e.children)
            ]
            return "eta-⊏", node(
                Head.SQ_LET, t, e.with_children(rest), names=(x, new_y))
    return None


def _positions(e: Expr, defs: _Defs,
               path: Path = ()) -> Iterator[Tuple[Path, Expr, _Defs]]:
    yield path, e, defs
    for i, c in enumerate(e.children):
        yield from _positions(c, defs.under(e.cart_binders(i)), path + (i, ))


def _find_step(e: Expr, defs: _Defs, flags: EqFlags,
               rule: Callable) -> Optional[Tuple[str, Path, Expr]]:
    for path, sub, sub_defs in _positions(e, defs):
        found = rule(sub, sub_defs, flags)
        if found is not None:
            name, new = found
            return name, path, _put(e, path, new)
    return None


def _hoist_rule(sub, sub_defs, flags):
    return hoist(sub, flags)


def step(ctx: Ctx, e: Expr,
         flags: EqFlags) -> Optional[Tuple[str, Path, Expr]]:
    """One normal-order step, hoisting first."""
    defs = _Defs(ctx)
    if flags.nat_l or flags.eta_sub:
        found = _find_step(e, defs, flags, _hoist_rule)
        if found is not None:
            return found
    return _find_step(e, defs, flags, contract)


def reduce(ctx: Ctx,
           e: Expr,
           flags: Optional[EqFlags] = None,
           budget: int = DEFAULT_STEP_BUDGET) -> Tuple[Expr, RedexTrace]:
    """Normal form of ``e`` and the steps taken to reach it.

    Raises:
        NonTermination: more than ``budget`` steps were needed.
    """
    flags = flags or EqFlags()
    steps = []
    while True:
        found = step(ctx, e, flags)
        if found is None:
            return e, RedexTrace(tuple(steps))
        if len(steps) >= budget:
            raise NonTermination(budget)
        rule, path, e = found
        steps.append((rule, path))
        logger.debug("%s at %s", rule, path)


def normalize(ctx: Ctx,
              e: Expr,
              flags: Optional[EqFlags] = None,
              budget: int = DEFAULT_STEP_BUDGET) -> Expr:
    return reduce(ctx, e, flags, budget)[0]


def replay(ctx: Ctx, e: Expr, trace: RedexTrace,
           flags: Optional[EqFlags] = None) -> Expr:
    """Apply the steps of ``trace`` to ``e``."""
    flags = flags or EqFlags()
    for rule, path in trace.steps:
        sub = _get(e, path)
        if rule in HOIST_RULES and sub.head in FRAME_POSITIONS:
            found = hoist(sub, flags)
            if found is not None and found[0] == rule:
                e = _put(e, path, found[1])
                continue
        found = contract(sub, _defs_at(ctx, e, path), flags)
        if found is None or found[0] != rule:
            raise ValueError(f"trace step {rule} does not apply at {path}.")
        e = _put(e, path, found[1])
    return e


def one_step_reducts(ctx: Ctx, e: Expr, flags: Optional[EqFlags] = None
                     ) -> List[Tuple[str, Path, Expr]]:
    """Every single rewrite of ``e``, at every position."""
    flags = flags or EqFlags()
    out = []
    for path, sub, sub_defs in _positions(e, _Defs(ctx)):
        for found in (hoist(sub, flags), contract(sub, sub_defs, flags)):
            if found is not None:
                out.append((found[0], path, _put(e, path, found[1])))
    return out


class Conversion:
    """Type-directed comparison of normal forms."""

    def __init__(self, flags: Optional[EqFlags] = None,
                 budget: int = DEFAULT_STEP_BUDGET) -> None:
        self.flags = flags or EqFlags()
        self.budget = budget

    def nf(self, ctx: Ctx, e: Expr) -> Expr:
        return normalize(ctx, e, self.flags, self.budget)

    def terms(self, ctx: Ctx, type_: Expr, e1: Expr, e2: Expr) -> bool:
        return self._conv(ctx, self.nf(ctx, type_), self.nf(ctx, e1),
                          self.nf(ctx, e2))

    def types(self, ctx: Ctx, t1: Expr, t2: Expr) -> bool:
        return self._conv_type(ctx, self.nf(ctx, t1), self.nf(ctx, t2))

    def _conv(self, ctx: Ctx, t: Expr, a: Expr, b: Expr) -> bool:
        if alpha_eq(a, b):
            return True
        h = t.head
        if h is Head.TOP_TY:
            return True
        if h in (Head.PI, Head.SQCAP):
            app_head = Head.APP if h is Head.PI else Head.SQ_APP
            inner = ctx.extend(t.names[0], t.children[0])
            a1 = self.nf(inner, node(app_head, shift(a, 0, 1), cvar(0)))
            b1 = self.nf(inner, node(app_head, shift(b, 0, 1), cvar(0)))
            return self._conv(inner, t.children[1], a1, b1)
        if h is Head.LOLLI:
            u = fresh_slot("u", free_lin_slots(a) | free_lin_slots(b)
                           | {s for s, _ in ctx.lin})
            a1 = self.nf(ctx, node(Head.LIN_APP, a, lvar(u)))
            b1 = self.nf(ctx, node(Head.LIN_APP, b, lvar(u)))
            return self._conv(ctx, t.children[1], a1, b1)
        if h is Head.WITH and (self.flags.eta_with or
                               (a.head is Head.WITH_PAIR
                                and b.head is Head.WITH_PAIR)):
            return all(
                self._conv(ctx, t.children[k], self.nf(ctx, node(proj, a)),
                           self.nf(ctx, node(proj, b)))
                for k, proj in enumerate((Head.WITH_FST, Head.WITH_SND)))
        if h is Head.M_TY:
            return self._conv(ctx, t.children[0],
                              self.nf(ctx, node(Head.M_ELIM, a)),
                              self.nf(ctx, node(Head.M_ELIM, b)))
        if h is Head.SIGMA and (self.flags.eta_sigma or
                                (a.head is Head.PAIR_C
                                 and b.head is Head.PAIR_C)):
            a1 = self.nf(ctx, node(Head.PR1, a))
            b1 = self.nf(ctx, node(Head.PR1, b))
            if not self._conv(ctx, t.children[0], a1, b1):
                return False
            second = self.nf(ctx, instantiate(t.children[1], a1))
            return self._conv(ctx, second, self.nf(ctx, node(Head.PR2, a)),
                              self.nf(ctx, node(Head.PR2, b)))
        if a.head is not b.head or len(a.children) != len(b.children):
            return False
        if h is Head.L_TY and a.head is Head.L_INTRO:
            return self._conv(ctx, t.children[0], a.children[0],
                              b.children[0])
        if h is Head.TENSOR and a.head is Head.TEN_PAIR:
            return all(
                self._conv(ctx, t.children[k], a.children[k], b.children[k])
                for k in range(2))
        if h is Head.PLUS and a.head in (Head.INL, Head.INR):
            k = 0 if a.head is Head.INL else 1
            return self._conv(ctx, t.children[k], a.children[0],
                              b.children[0])
        if h is Head.SQSUBSET and a.head is Head.SQ_PAIR:
            if not self._conv(ctx, t.children[0], a.children[0],
                              b.children[0]):
                return False
            fiber = self.nf(ctx, instantiate(t.children[1], a.children[0]))
            return self._conv(ctx, fiber, a.children[1], b.children[1])
        if h is Head.ID:
            # proofs of identity types are compared up to syntax
            return alpha_eq(a, b)
        return False

    def _conv_type(self, ctx: Ctx, t1: Expr, t2: Expr) -> bool:
        if alpha_eq(t1, t2):
            return True
        if t1.head is not t2.head or len(t1.children) != len(t2.children):
            return False
        h = t1.head
        if h in (Head.PI, Head.SIGMA, Head.SQCAP, Head.SQSUBSET):
            if not self._conv_type(ctx, t1.children[0], t2.children[0]):
                return False
            inner = ctx.extend(t1.names[0], t1.children[0])
            return self._conv_type(inner, t1.children[1], t2.children[1])
        if h is Head.ID:
            return (self._conv_type(ctx, t1.children[0], t2.children[0])
                    and all(
                        self._conv(ctx, t1.children[0], t1.children[k],
                                   t2.children[k]) for k in (1, 2)))
        if h is Head.EL:
            return alpha_eq(t1.children[0], t2.children[0])
        return all(
            self._conv_type(ctx, c1, c2)
            for c1, c2 in zip(t1.children, t2.children))


def equal(ctx: Ctx,
          type_: Expr,
          e1: Expr,
          e2: Expr,
          flags: Optional[EqFlags] = None,
          budget: int = DEFAULT_STEP_BUDGET) -> bool:
    """Judgmental equality of ``e1`` and ``e2`` at ``type_``."""
    return Conversion(flags, budget).terms(ctx, type_, e1, e2)


def equal_types(ctx: Ctx,
                t1: Expr,
                t2: Expr,
                flags: Optional[EqFlags] = None,
                budget: int = DEFAULT_STEP_BUDGET) -> bool:
    return Conversion(flags, budget).types(ctx, t1, t2)
