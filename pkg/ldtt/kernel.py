"""Bidirectional type checker.

Cartesian terms and types are checked against a context ``Ctx`` whose
linear part is ignored; linear terms additionally thread a
``LinZoneState`` through their subterms (leftover typing). Every rule
application is recorded by name in the checker's trace.
"""
from contextlib import contextmanager
from dataclasses import dataclass, field, replace
from typing import Any, FrozenSet, List, Optional, Sequence, Tuple
import logging
import warnings

from ldtt.config import EqFlags
from ldtt.equality import DEFAULT_STEP_BUDGET, Conversion
from ldtt.errors import (CannotInfer, EscapingVariable, FeatureDisabled,
                         LdttError, LinearViolation, ModeError, NotEqual,
                         OutOfScope, SortMismatch, TypeMismatch, UnboundName,
                         ZoneMismatch)
from ldtt.substitution import (fresh_slot, instantiate, instantiate_many,
                               lin_subst, lin_subst_many, subst)
from ldtt.syntax import (CT, LE, LT, UNIT_I, UNIV_L, ZERO_TY, CartEntry,
                         Ctx, Expr, Head, Judgment, JudgmentKind, Sort, cvar,
                         el, free_cart_indices, lin_app, lin_lam, lolli, lvar,
                         mty, node, shift, sig, strengthen)

logger = logging.getLogger(__name__)

LIVE = "live"
CONSUMED = "consumed"
SLACKED = "slacked"

_TYPE_HEADS = {
    Head.PI, Head.SIGMA, Head.ID, Head.UNIV_U, Head.UNIV_L, Head.SQCAP,
    Head.SQSUBSET, Head.TENSOR, Head.UNIT_I, Head.LOLLI, Head.WITH,
    Head.PLUS, Head.ZERO_TY, Head.TOP_TY, Head.L_TY, Head.M_TY, Head.EL
}


@dataclass(frozen=True)
class ZoneEntry:
    """A linear slot; ``type`` is scoped over the first ``depth`` cartesian
    entries."""
    slot: str
    type: Expr
    depth: int
    status: str = LIVE

    def type_at(self, depth: int) -> Expr:
        return shift(self.type, 0, depth - self.depth)


@dataclass(frozen=True)
class LinZoneState:
    entries: Tuple[ZoneEntry, ...] = ()

    @classmethod
    def from_ctx(cls, ctx: Ctx) -> "LinZoneState":
        depth = len(ctx.cart)
        return cls(tuple(ZoneEntry(s, t, depth) for s, t in ctx.lin))

    def slots(self) -> List[str]:
        return [e.slot for e in self.entries]

    def find(self, slot: str) -> Optional[ZoneEntry]:
        for entry in self.entries:
            if entry.slot == slot:
                return entry
        return None

    def put(self, entry: ZoneEntry) -> "LinZoneState":
        return LinZoneState(
            tuple(entry if e.slot == entry.slot else e
                  for e in self.entries))

    def add(self, slot: str, type_: Expr, depth: int) -> "LinZoneState":
        return LinZoneState(self.entries + (ZoneEntry(slot, type_, depth), ))

    def remove(self, slot: str) -> "LinZoneState":
        return LinZoneState(
            tuple(e for e in self.entries if e.slot != slot))

    def live(self) -> List[str]:
        return [e.slot for e in self.entries if e.status == LIVE]

    def slack_all(self) -> "LinZoneState":
        return LinZoneState(
            tuple(
                replace(e, status=SLACKED) if e.status == LIVE else e
                for e in self.entries))

    def statuses(self) -> dict:
        return {e.slot: e.status for e in self.entries}


@dataclass(frozen=True)
class CheckReport:
    judgment: Optional[Judgment]
    accepted: bool
    reason: Optional[str] = None
    message: Optional[str] = None
    span: Optional[Any] = None
    trace: Tuple[str, ...] = field(default_factory=tuple)
    name: Optional[str] = None

    @property
    def outcome(self) -> str:
        return "accepted" if self.accepted else "rejected"

    @classmethod
    def rejected(cls, judgment: Optional[Judgment], error: LdttError,
                 trace: Sequence[str] = (),
                 name: Optional[str] = None) -> "CheckReport":
        return cls(
            judgment,
            False,
            reason=error.reason,
            message=error.message,
            span=error.span,
            trace=tuple(trace),
            name=name or error.decl)

    def named(self, name: Optional[str], span=None) -> "CheckReport":
        return replace(self, name=name, span=self.span or span)


def _pair_instance(c_type: Expr) -> Expr:
    """``C`` under ``t`` to ``C[(x, y)/t]`` under ``x, y``."""
    return subst(shift(c_type, 1, 2), node(Head.PAIR_C, cvar(1), cvar(0)), 0)


def _refl_instance(c_type: Expr) -> Expr:
    """``C`` under ``x, y, p`` to ``C[z, z, refl z]`` under ``z``."""
    return instantiate_many(
        shift(c_type, 3, 1),
        [cvar(0), cvar(0), node(Head.REFL, cvar(0))])


def _path_ctx(ctx: Ctx, a: Expr, names: Sequence[str]) -> Ctx:
    x, y, p = names[:3]
    return (ctx.extend(x, a).extend(y, shift(a, 0, 1)).extend(
        p, node(Head.ID, shift(a, 0, 2), cvar(1), cvar(0))))


class Checker:
    """Type checker for one unit with fixed equality flags.

    Parameters
    ----------
    flags : EqFlags, optional
      Optional equality rules, default all off.

    budget : int
      Reduction step budget per normalization.

    """

    def __init__(self, flags: Optional[EqFlags] = None,
                 budget: int = DEFAULT_STEP_BUDGET) -> None:
        self.flags = flags or EqFlags()
        self.budget = budget
        self.conv = Conversion(self.flags, budget)
        self.trace: List[str] = []
        self._frozen: FrozenSet[str] = frozenset()

    def _rule(self, name: str) -> None:
        self.trace.append(name)

    @contextmanager
    def _freeze(self, zone: LinZoneState):
        saved = self._frozen
        self._frozen = saved | frozenset(zone.slots())
        try:
            yield
        finally:
            self._frozen = saved

    def _whnf(self, ctx: Ctx, t: Expr) -> Expr:
        return self.conv.nf(ctx.without_lin(), t)

    def _expect(self, ctx: Ctx, t: Expr, head: Head, what: str) -> Expr:
        nf = self._whnf(ctx, t)
        if nf.head is not head:
            raise TypeMismatch(f"expected {what}, got {nf}")
        return nf

    def _same_type(self, ctx: Ctx, got: Expr, expected: Expr) -> None:
        if not self.conv.types(ctx.without_lin(), got, expected):
            raise TypeMismatch(f"expected type {expected}, got {got}")
        self._rule("conv")

    # types

    def check_type(self, ctx: Ctx, t: Expr) -> Sort:
        """Check a type former and return its sort."""
        h = t.head
        ch = t.children
        if h in (Head.UNIV_U, Head.UNIV_L):
            self._rule(f"{h}-F")
            return CT
        if h in (Head.UNIT_I, Head.ZERO_TY, Head.TOP_TY):
            self._rule(f"{h}-F")
            return LT
        if h in (Head.PI, Head.SIGMA, Head.SQCAP, Head.SQSUBSET):
            self.check_cart_type(ctx, ch[0])
            inner = ctx.extend(t.names[0], ch[0])
            if h in (Head.PI, Head.SIGMA):
                self.check_cart_type(inner, ch[1])
                self._rule(f"{h}-F")
                return CT
            self.check_lin_type(inner, ch[1])
            self._rule(f"{h}-F")
            return LT
        if h is Head.ID:
            self.check_cart_type(ctx, ch[0])
            self.check_cart(ctx, ch[1], ch[0])
            self.check_cart(ctx, ch[2], ch[0])
            self._rule("=-F")
            return CT
        if h in (Head.TENSOR, Head.LOLLI, Head.WITH, Head.PLUS):
            self.check_lin_type(ctx, ch[0])
            self.check_lin_type(ctx, ch[1])
            self._rule(f"{h}-F")
            return LT
        if h is Head.L_TY:
            self.check_cart_type(ctx, ch[0])
            self._rule("L-F")
            return LT
        if h is Head.M_TY:
            self.check_lin_type(ctx, ch[0])
            self._rule("M-F")
            return CT
        if h is Head.EL:
            universe = self._whnf(ctx, self.infer_cart(ctx, ch[0]))
            if universe.head is Head.UNIV_U:
                self._rule("El-F")
                return CT
            if universe.head is Head.UNIV_L:
                self._rule("El-F")
                return LT
            raise TypeMismatch(f"El of {ch[0]} which is not a code of U or "
                               f"L but has type {universe}")
        raise SortMismatch(f"{h} is not a type")

    def check_cart_type(self, ctx: Ctx, t: Expr) -> None:
        if self.check_type(ctx, t) is not CT:
            raise SortMismatch(f"expected a cartesian type, got {t}")

    def check_lin_type(self, ctx: Ctx, t: Expr) -> None:
        if self.check_type(ctx, t) is not LT:
            raise SortMismatch(f"expected a linear type, got {t}")

    def check_ctx(self, ctx: Ctx, start: int = 0) -> None:
        """Check the cartesian entries from ``start`` on and every linear
        type."""
        for i in range(start, len(ctx.cart)):
            prefix = Ctx(ctx.cart[:i])
            entry = ctx.cart[i]
            self.check_cart_type(prefix, entry.type)
            if entry.value is not None:
                self.check_cart(prefix, entry.value, entry.type)
        full = ctx.without_lin()
        for _, t in ctx.lin:
            self.check_lin_type(full, t)

    # cartesian terms

    def infer_cart(self, ctx: Ctx, e: Expr) -> Expr:
        h = e.head
        ch = e.children
        if h is Head.CART_VAR:
            self._rule("var")
            return ctx.type_of(e.index)
        if h is Head.LIN_VAR:
            if e.slot in self._frozen:
                raise ModeError(
                    f"linear variable '{e.slot}' used in a cartesian term")
            raise OutOfScope(f"linear slot '{e.slot}' not in scope")
        if h in _TYPE_HEADS:
            raise SortMismatch(f"{h} is a type, not a term")
        if h is Head.LAM:
            self.check_cart_type(ctx, ch[0])
            body = self.infer_cart(ctx.extend(e.names[0], ch[0]), ch[1])
            self._rule("Π-I")
            return node(Head.PI, ch[0], body, names=e.names)
        if h is Head.APP:
            f_type = self._expect(ctx, self.infer_cart(ctx, ch[0]), Head.PI,
                                  "a Pi type")
            self.check_cart(ctx, ch[1], f_type.children[0])
            self._rule("Π-E")
            return instantiate(f_type.children[1], ch[1])
        if h is Head.PAIR_C:
            a = self.infer_cart(ctx, ch[0])
            b = self.infer_cart(ctx, ch[1])
            self._rule("Σ-I")
            return node(Head.SIGMA, a, shift(b, 0, 1), names=("_", ))
        if h in (Head.PR1, Head.PR2):
            s_type = self._expect(ctx, self.infer_cart(ctx, ch[0]),
                                  Head.SIGMA, "a Sigma type")
            if h is Head.PR1:
                self._rule("Σ-pr1")
                return s_type.children[0]
            self._rule("Σ-pr2")
            return instantiate(s_type.children[1], node(Head.PR1, ch[0]))
        if h is Head.SIG_ELIM1:
            c_type, c, s = ch
            s_type = self._expect(ctx, self.infer_cart(ctx, s), Head.SIGMA,
                                  "a Sigma type")
            a, b = s_type.children
            self.check_cart_type(ctx.extend(e.names[0], s_type), c_type)
            inner = ctx.extend(e.names[1], a).extend(e.names[2], b)
            self.check_cart(inner, c, _pair_instance(c_type))
            self._rule("Σ-E1")
            return instantiate(c_type, s)
        if h is Head.REFL:
            a = self.infer_cart(ctx, ch[0])
            self._rule("=-I")
            return node(Head.ID, a, ch[0], ch[0])
        if h is Head.ID_ELIM1:
            c_type, c, p = ch
            a, m, n = self._expect(ctx, self.infer_cart(ctx, p), Head.ID,
                                   "an identity type").children
            self.check_cart_type(_path_ctx(ctx, a, e.names), c_type)
            self.check_cart(
                ctx.extend(e.names[3], a), c, _refl_instance(c_type))
            self._rule("=-E1")
            return instantiate_many(c_type, [m, n, p])
        if h is Head.M_INTRO:
            b, _ = self.infer_lin(ctx.without_lin(), LinZoneState(), ch[0])
            self._rule("M-I")
            return mty(b)
        if h is Head.UA:
            return self._infer_ua(ctx, e)
        raise CannotInfer(f"cannot infer a type for {h}")

    def check_cart(self, ctx: Ctx, e: Expr, t: Expr) -> None:
        if e.head is Head.PAIR_C:
            nf = self._whnf(ctx, t)
            if nf.head is Head.SIGMA:
                self.check_cart(ctx, e.children[0], nf.children[0])
                self.check_cart(ctx, e.children[1],
                                instantiate(nf.children[1], e.children[0]))
                self._rule("Σ-I")
                return
        self._same_type(ctx, self.infer_cart(ctx, e), t)

    def _infer_ua(self, ctx: Ctx, e: Expr) -> Expr:
        if not self.flags.ua_rules:
            raise FeatureDisabled("ua requires 'pragma ua;'")
        a, b, f, g, h, p, q = e.children
        self.check_cart(ctx, a, UNIV_L)
        self.check_cart(ctx, b, UNIV_L)
        el_a, el_b = el(a), el(b)
        empty = ctx.without_lin()
        for term, src, dst in ((f, el_a, el_b), (g, el_b, el_a),
                               (h, el_b, el_a)):
            self.check_lin_closed(empty, term, lolli(src, dst))

        def loop(first, second, src):
            u = "u"
            comp = lin_lam(src, lin_app(second, lin_app(first, lvar(u))), u)
            ident = lin_lam(src, lvar(u), u)
            return node(Head.ID, mty(lolli(src, src)), sig(comp), sig(ident))

        self.check_cart(ctx, p, loop(f, g, el_a))
        self.check_cart(ctx, q, loop(h, f, el_b))
        self._rule("ua-I")
        return node(Head.ID, UNIV_L, a, b)

    # linear terms

    def check_lin_closed(self, ctx: Ctx, e: Expr, t: Expr) -> None:
        zone = self.check_lin(ctx, LinZoneState(), e, t)
        self._require_consumed(zone, zone.slots())

    def _require_consumed(self, zone: LinZoneState,
                          slots: Sequence[str]) -> None:
        for slot in slots:
            entry = zone.find(slot)
            if entry is not None and entry.status == LIVE:
                raise LinearViolation(slot, 0)

    def _fresh_binder(self, zone: LinZoneState, slot: str,
                      body: Expr) -> Tuple[str, Expr]:
        taken = set(zone.slots()) | self._frozen
        if slot not in taken:
            return slot, body
        new = fresh_slot(slot, taken)
        return new, lin_subst(body, slot, lvar(new))

    def _bind(self, ctx: Ctx, zone: LinZoneState, slot: str, type_: Expr,
              body: Expr, expected: Optional[Expr]) -> Tuple[Expr, Any]:
        """Check ``body`` with ``slot : type_`` added, then retire it."""
        slot, body = self._fresh_binder(zone, slot, body)
        inner = zone.add(slot, type_, len(ctx.cart))
        got, inner = self._lin(ctx, inner, body, expected)
        self._require_consumed(inner, [slot])
        return got, inner.remove(slot)

    def _merge(self, before: LinZoneState, left: LinZoneState,
               right: LinZoneState) -> LinZoneState:
        lstat, rstat = left.statuses(), right.statuses()
        out = []
        for entry in before.entries:
            ls, rs = lstat[entry.slot], rstat[entry.slot]
            if ls == rs:
                status = ls
            elif {ls, rs} == {CONSUMED, SLACKED}:
                status = CONSUMED
            elif {ls, rs} == {LIVE, SLACKED}:
                status = LIVE
            else:
                raise ZoneMismatch(
                    f"linear variable '{entry.slot}' is used in only one "
                    f"branch")
            out.append(replace(entry, status=status))
        return LinZoneState(tuple(out))

    def infer_lin(self, ctx: Ctx, zone: LinZoneState,
                  e: Expr) -> Tuple[Expr, LinZoneState]:
        return self._lin(ctx, zone, e, None)

    def check_lin(self, ctx: Ctx, zone: LinZoneState, e: Expr,
                  t: Expr) -> LinZoneState:
        return self._lin(ctx, zone, e, t)[1]

    def _lin(self, ctx: Ctx, zone: LinZoneState, e: Expr,
             expected: Optional[Expr]) -> Tuple[Expr, LinZoneState]:
        got, zone = self._lin_rule(ctx, zone, e, expected)
        if expected is not None and got is not expected:
            self._same_type(ctx, got, expected)
            got = expected
        return got, zone

    def _cart_in_zone(self, ctx: Ctx, zone: LinZoneState, e: Expr,
                      t: Optional[Expr] = None) -> Expr:
        with self._freeze(zone):
            if t is None:
                return self.infer_cart(ctx.without_lin(), e)
            self.check_cart(ctx.without_lin(), e, t)
            return t

    def _lin_rule(self, ctx: Ctx, zone: LinZoneState, e: Expr,
                  expected: Optional[Expr]) -> Tuple[Expr, LinZoneState]:
        h = e.head
        ch = e.children
        exp = None if expected is None else self._whnf(ctx, expected)
        if h is Head.LIN_VAR:
            entry = zone.find(e.slot)
            if entry is None:
                if e.slot in self._frozen:
                    raise ModeError(f"linear variable '{e.slot}' is not "
                                    f"available here")
                raise OutOfScope(f"linear slot '{e.slot}' not in scope")
            if entry.status == CONSUMED:
                raise LinearViolation(e.slot, 2)
            self._rule("lvar")
            return (entry.type_at(len(ctx.cart)),
                    zone.put(replace(entry, status=CONSUMED)))
        if h is Head.CART_VAR or e.signature.sort is not LE:
            raise SortMismatch(f"{e} is not a linear term")

        if h is Head.SQ_LAM:
            self.check_cart_type(ctx, ch[0])
            inner = ctx.extend(e.names[0], ch[0])
            body_exp = None
            if exp is not None and exp.head is Head.SQCAP:
                self._same_type(ctx, ch[0], exp.children[0])
                body_exp = exp.children[1]
            body, zone = self._lin(inner, zone, ch[1], body_exp)
            self._rule("⊓-I")
            result = node(Head.SQCAP, ch[0], body, names=e.names)
            return (expected if body_exp is not None else result), zone
        if h is Head.SQ_APP:
            t_type, zone = self._lin(ctx, zone, ch[0], None)
            t_type = self._expect(ctx, t_type, Head.SQCAP, "a cap type")
            self._cart_in_zone(ctx, zone, ch[1], t_type.children[0])
            self._rule("⊓-E")
            return instantiate(t_type.children[1], ch[1]), zone
        if h is Head.SQ_PAIR:
            if exp is not None and exp.head is Head.SQSUBSET:
                self._cart_in_zone(ctx, zone, ch[0], exp.children[0])
                fiber = instantiate(exp.children[1], ch[0])
                _, zone = self._lin(ctx, zone, ch[1], fiber)
                self._rule("⊏-I")
                return expected, zone
            a = self._cart_in_zone(ctx, zone, ch[0])
            b, zone = self._lin(ctx, zone, ch[1], None)
            self._rule("⊏-I")
            return node(Head.SQSUBSET, a, shift(b, 0, 1),
                        names=("_", )), zone
        if h is Head.SQ_LET:
            t_type, zone = self._lin(ctx, zone, ch[0], None)
            a, b = self._expect(ctx, t_type, Head.SQSUBSET,
                                "a sub type").children
            x, y = e.names
            inner_ctx = ctx.extend(x, a)
            body_exp = None if expected is None else shift(expected, 0, 1)
            c_type, zone = self._bind(inner_ctx, zone, y, b, ch[1], body_exp)
            self._rule("⊏-E")
            if expected is not None:
                return expected, zone
            return self._strengthen(c_type, x), zone
        if h is Head.TEN_PAIR:
            if exp is not None and exp.head is Head.TENSOR:
                _, zone = self._lin(ctx, zone, ch[0], exp.children[0])
                _, zone = self._lin(ctx, zone, ch[1], exp.children[1])
                self._rule("⊗-I")
                return expected, zone
            a, zone = self._lin(ctx, zone, ch[0], None)
            b, zone = self._lin(ctx, zone, ch[1], None)
            self._rule("⊗-I")
            return node(Head.TENSOR, a, b), zone
        if h is Head.TEN_LET:
            t_type, zone = self._lin(ctx, zone, ch[0], None)
            a, b = self._expect(ctx, t_type, Head.TENSOR,
                                "a tensor type").children
            u, v = e.names
            taken = set(zone.slots()) | self._frozen
            body = ch[1]
            fresh = {}
            for old in (u, v):
                fresh[old] = fresh_slot(old, taken | set(fresh.values()))
            if fresh[u] != u or fresh[v] != v:
                body = lin_subst_many(
                    body, {k: lvar(n)
                           for k, n in fresh.items() if k != n})
            depth = len(ctx.cart)
            inner = zone.add(fresh[u], a, depth).add(fresh[v], b, depth)
            c_type, inner = self._lin(ctx, inner, body, expected)
            self._require_consumed(inner, [fresh[u], fresh[v]])
            self._rule("⊗-E")
            return c_type, inner.remove(fresh[u]).remove(fresh[v])
        if h is Head.UNIT_INTRO:
            self._rule("I-I")
            return UNIT_I, zone
        if h is Head.UNIT_LET:
            _, zone = self._lin(ctx, zone, ch[0], UNIT_I)
            c_type, zone = self._lin(ctx, zone, ch[1], expected)
            self._rule("I-E")
            return c_type, zone
        if h is Head.LIN_LAM:
            self.check_lin_type(ctx, ch[0])
            body_exp = None
            if exp is not None and exp.head is Head.LOLLI:
                self._same_type(ctx, ch[0], exp.children[0])
                body_exp = exp.children[1]
            body, zone = self._bind(ctx, zone, e.names[0], ch[0], ch[1],
                                    body_exp)
            self._rule("⊸-I")
            if body_exp is not None:
                return expected, zone
            return lolli(ch[0], body), zone
        if h is Head.LIN_APP:
            f_type, zone = self._lin(ctx, zone, ch[0], None)
            f_type = self._expect(ctx, f_type, Head.LOLLI, "a -o type")
            _, zone = self._lin(ctx, zone, ch[1], f_type.children[0])
            self._rule("⊸-E")
            return f_type.children[1], zone
        if h is Head.WITH_PAIR:
            left_exp = right_exp = None
            if exp is not None and exp.head is Head.WITH:
                left_exp, right_exp = exp.children
            a, left = self._lin(ctx, zone, ch[0], left_exp)
            b, right = self._lin(ctx, zone, ch[1], right_exp)
            self._rule("&-I")
            result = expected if left_exp is not None else node(
                Head.WITH, a, b)
            return result, self._merge(zone, left, right)
        if h in (Head.WITH_FST, Head.WITH_SND):
            t_type, zone = self._lin(ctx, zone, ch[0], None)
            t_type = self._expect(ctx, t_type, Head.WITH, "a & type")
            k = 0 if h is Head.WITH_FST else 1
            self._rule(f"&-E{k + 1}")
            return t_type.children[k], zone
        if h in (Head.INL, Head.INR):
            if exp is None or exp.head is not Head.PLUS:
                raise CannotInfer(f"{h} needs an expected (+) type")
            k = 0 if h is Head.INL else 1
            _, zone = self._lin(ctx, zone, ch[0], exp.children[k])
            self._rule(f"⊕-I{k + 1}")
            return expected, zone
        if h is Head.PLUS_CASE:
            t_type, zone = self._lin(ctx, zone, ch[0], None)
            a, b = self._expect(ctx, t_type, Head.PLUS,
                                "a (+) type").children
            c1, left = self._bind(ctx, zone, e.names[0], a, ch[1], expected)
            c2, right = self._bind(ctx, zone, e.names[1], b, ch[2],
                                   expected if expected is not None else c1)
            self._rule("⊕-E")
            return c1, self._merge(zone, left, right)
        if h is Head.ZERO_ELIM:
            if expected is None:
                raise CannotInfer("absurd needs an expected type")
            _, zone = self._lin(ctx, zone, ch[0], ZERO_TY)
            self._rule("0-E")
            return expected, zone.slack_all()
        if h is Head.TOP_INTRO:
            self._rule("⊤-I")
            return node(Head.TOP_TY), zone.slack_all()
        if h is Head.L_INTRO:
            if exp is not None and exp.head is Head.L_TY:
                self._cart_in_zone(ctx, zone, ch[0], exp.children[0])
                self._rule("L-I")
                return expected, zone
            a = self._cart_in_zone(ctx, zone, ch[0])
            self._rule("L-I")
            return node(Head.L_TY, a), zone
        if h is Head.L_LET:
            t_type, zone = self._lin(ctx, zone, ch[0], None)
            a = self._expect(ctx, t_type, Head.L_TY,
                             "an Lt type").children[0]
            inner = ctx.extend(e.names[0], a)
            body_exp = None if expected is None else shift(expected, 0, 1)
            c_type, zone = self._lin(inner, zone, ch[1], body_exp)
            self._rule("L-E")
            if expected is not None:
                return expected, zone
            return self._strengthen(c_type, e.names[0]), zone
        if h is Head.M_ELIM:
            t_type = self._cart_in_zone(ctx, zone, ch[0])
            b = self._expect(ctx, t_type, Head.M_TY, "an Mt type")
            self._rule("M-E")
            return b.children[0], zone
        if h is Head.SIG_ELIM2:
            return self._sig_elim2(ctx, zone, e, expected)
        if h is Head.ID_ELIM2:
            return self._id_elim2(ctx, zone, e, expected)
        raise CannotInfer(f"cannot check {h}")

    def _strengthen(self, t: Expr, name: str) -> Expr:
        out = strengthen(t, 0)
        if out is None:
            raise EscapingVariable(
                f"the type {t} of the let body mentions the bound variable "
                f"'{name}'")
        return out

    def _retype(self, ctx: Ctx, zone: LinZoneState, e: Expr, inner_ctx: Ctx,
                inner_types: Sequence[Expr],
                outer_types: Sequence[Expr]) -> LinZoneState:
        """Retype the captured slots of an eliminator for its body."""
        depth = len(inner_ctx.cart)
        for slot, inner_t, outer_t in zip(e.captured, inner_types,
                                          outer_types):
            entry = zone.find(slot)
            if entry is None:
                raise OutOfScope(f"linear slot '{slot}' not in zone")
            if entry.status == CONSUMED:
                raise LinearViolation(slot, 2)
            if not self.conv.types(ctx.without_lin(), outer_t,
                                   entry.type_at(len(ctx.cart))):
                raise TypeMismatch(
                    f"zone slot '{slot}' has type "
                    f"{entry.type_at(len(ctx.cart))}, not {outer_t}")
            zone = zone.put(replace(entry, type=inner_t, depth=depth))
        return zone

    def _restore(self, before: LinZoneState, e: Expr,
                 after: LinZoneState) -> LinZoneState:
        for slot in e.captured:
            entry = before.find(slot)
            status = after.find(slot).status
            after = after.put(replace(entry, status=status))
        return after

    def _sig_elim2(self, ctx: Ctx, zone: LinZoneState, e: Expr,
                   expected: Optional[Expr]) -> Tuple[Expr, LinZoneState]:
        c_type, c, s = e.children[:3]
        zone_types = e.children[3:]
        s_type = self._expect(ctx, self._cart_in_zone(ctx, zone, s),
                              Head.SIGMA, "a Sigma type")
        a, b = s_type.children
        self.check_lin_type(ctx.extend(e.names[0], s_type), c_type)
        inner_ctx = ctx.extend(e.names[1], a).extend(e.names[2], b)
        for t in zone_types:
            self.check_lin_type(inner_ctx, t)
        outer = [
            instantiate_many(t, [node(Head.PR1, s),
                                 node(Head.PR2, s)]) for t in zone_types
        ]
        inner_zone = self._retype(ctx, zone, e, inner_ctx, zone_types, outer)
        _, inner_zone = self._lin(inner_ctx, inner_zone, c,
                                  _pair_instance(c_type))
        self._rule("Σ-E2")
        result = instantiate(c_type, s)
        if expected is not None:
            self._same_type(ctx, result, expected)
            result = expected
        return result, self._restore(zone, e, inner_zone)

    def _id_elim2(self, ctx: Ctx, zone: LinZoneState, e: Expr,
                  expected: Optional[Expr]) -> Tuple[Expr, LinZoneState]:
        c_type, c, p = e.children[:3]
        zone_types = e.children[3:]
        a, m, n = self._expect(ctx, self._cart_in_zone(ctx, zone, p),
                               Head.ID, "an identity type").children
        path_ctx = _path_ctx(ctx, a, e.names)
        self.check_lin_type(path_ctx, c_type)
        for t in zone_types:
            self.check_lin_type(path_ctx, t)
        inner_ctx = ctx.extend(e.names[3], a)
        inner_types = [_refl_instance(t) for t in zone_types]
        outer = [instantiate_many(t, [m, n, p]) for t in zone_types]
        inner_zone = self._retype(ctx, zone, e, inner_ctx, inner_types,
                                  outer)
        _, inner_zone = self._lin(inner_ctx, inner_zone, c,
                                  _refl_instance(c_type))
        self._rule("=-E2")
        result = instantiate_many(c_type, [m, n, p])
        if expected is not None:
            self._same_type(ctx, result, expected)
            result = expected
        return result, self._restore(zone, e, inner_zone)

    # judgments

    def _run(self, judgment: Optional[Judgment], fn, *args,
             name: Optional[str] = None) -> CheckReport:
        self.trace = []
        self._frozen = frozenset()
        try:
            fn(*args)
        except LdttError as err:
            logger.debug("rejected %s: %s", name or judgment, err)
            return CheckReport.rejected(judgment, err, self.trace, name)
        return CheckReport(judgment, True, trace=tuple(self.trace), name=name)

    def check_type_report(self, ctx: Ctx, t: Expr) -> CheckReport:
        return self._run(None, self.check_type, ctx, t)

    def check_term(self, ctx: Ctx, zone: LinZoneState, e: Expr,
                   t: Expr) -> Tuple[CheckReport, LinZoneState]:
        """Check a linear term against ``t``, returning the leftover zone.

        On rejection the input zone is returned unchanged.
        """
        holder = [zone]

        def go():
            holder[0] = self.check_lin(ctx, zone, e, t)

        return self._run(None, go), holder[0]

    def _judge(self, judgment: Judgment, start: int = 0) -> None:
        kind, ctx, subjects = (judgment.kind, judgment.ctx,
                               judgment.subjects)
        self.check_ctx(ctx, start)
        cart = ctx.without_lin()
        if kind is JudgmentKind.CART_TYPE_OK:
            self.check_cart_type(cart, subjects[0])
        elif kind is JudgmentKind.LIN_TYPE_OK:
            self.check_lin_type(cart, subjects[0])
        elif kind is JudgmentKind.CART_TERM_HAS_TYPE:
            self.check_cart_type(cart, subjects[1])
            self.check_cart(cart, subjects[0], subjects[1])
        elif kind is JudgmentKind.LIN_TERM_HAS_TYPE:
            self.check_lin_type(cart, subjects[1])
            self._check_full_zone(ctx, subjects[0], subjects[1])
        elif kind is JudgmentKind.CART_EQ:
            e1, e2, t = subjects
            self.check_cart_type(cart, t)
            self.check_cart(cart, e1, t)
            self.check_cart(cart, e2, t)
            self._check_equal(cart, t, e1, e2)
        elif kind is JudgmentKind.LIN_EQ:
            e1, e2, t = subjects
            self.check_lin_type(cart, t)
            self._check_full_zone(ctx, e1, t)
            self._check_full_zone(ctx, e2, t)
            self._check_equal(cart, t, e1, e2)

    def _check_full_zone(self, ctx: Ctx, e: Expr, t: Expr) -> None:
        zone = self.check_lin(ctx.without_lin(), LinZoneState.from_ctx(ctx),
                              e, t)
        self._require_consumed(zone, zone.slots())

    def _check_equal(self, ctx: Ctx, t: Expr, e1: Expr, e2: Expr) -> None:
        if not self.conv.terms(ctx, t, e1, e2):
            raise NotEqual(f"{e1} and {e2} are not judgmentally equal")
        self._rule("≡")

    def check(self, judgment: Judgment) -> CheckReport:
        return self._run(judgment, self._judge, judgment)

    def check_decl(self, sig: Sequence[CartEntry], decl) -> CheckReport:
        """Check a resolved declaration whose context extends ``sig``.

        Only the entries past the signature are re-checked.
        """
        judgment = decl.judgment
        if judgment is None:
            return CheckReport(None, True, name=decl.name)
        if tuple(judgment.ctx.cart[:len(sig)]) != tuple(sig):
            raise ValueError(f"context of '{decl.name}' does not extend the "
                             f"given signature.")
        report = self._run(
            judgment, self._judge, judgment, len(sig), name=decl.name)
        return report.named(decl.name, getattr(decl, "span", None))


def check(judgment: Judgment, flags: Optional[EqFlags] = None,
          budget: int = DEFAULT_STEP_BUDGET) -> CheckReport:
    return Checker(flags, budget).check(judgment)


def check_type(ctx: Ctx, t: Expr,
               flags: Optional[EqFlags] = None) -> CheckReport:
    return Checker(flags).check_type_report(ctx, t)


def check_term(ctx: Ctx,
               zone: LinZoneState,
               e: Expr,
               t: Expr,
               flags: Optional[EqFlags] = None
               ) -> Tuple[CheckReport, LinZoneState]:
    return Checker(flags).check_term(ctx, zone, e, t)


def _mentions_level(judgment: Judgment, level: int) -> bool:
    """Whether anything in ``judgment`` refers to cartesian entry ``level``."""
    cart = judgment.ctx.cart
    for j in range(level + 1, len(cart)):
        entry = cart[j]
        idx = j - 1 - level
        for e in (entry.type, entry.value):
            if e is not None and idx in free_cart_indices(e):
                return True
    idx = len(cart) - 1 - level
    exprs = [t for _, t in judgment.ctx.lin] + list(judgment.subjects)
    return any(idx in free_cart_indices(e) for e in exprs)


def check_decls(decls: Sequence[Any],
                flags: Optional[EqFlags] = None,
                budget: int = DEFAULT_STEP_BUDGET) -> List[CheckReport]:
    """Check the resolved declarations of one file in order.

    Pragmas switch flags on for the declarations that follow them. A
    declaration that mentions a rejected definition is rejected as well.
    """
    flags = flags or EqFlags()
    reports = []
    rejected = {}
    for decl in decls:
        if decl.pragma is not None:
            flags = flags.with_pragma(decl.pragma)
            if decl.pragma == "ua":
                warnings.warn(
                    "The linear univalence rules are experimental and may "
                    "change in a future release.", FutureWarning)
            reports.append(CheckReport(None, True, name=decl.name,
                                       span=decl.span))
            continue
        judgment = decl.judgment
        sig = judgment.ctx.cart[:decl.n_globals]
        broken = [
            name for name, level in rejected.items()
            if level < decl.n_globals and _mentions_level(judgment, level)
        ]
        if broken:
            err = UnboundName(
                f"depends on rejected definition '{broken[0]}'",
                span=decl.span, decl=decl.name)
            report = CheckReport.rejected(judgment, err, name=decl.name)
        else:
            report = Checker(flags, budget).check_decl(sig, decl)
        if decl.kind == "def" and decl.entry is not None and (
                not report.accepted):
            rejected[decl.name] = decl.n_globals
        logger.debug("%s %s", decl.name, report.outcome)
        reports.append(report)
    return reports
