"""Seeded random well-typed linear terms.

Terms are built goal-first over a fixed cartesian context. The linear
variables in scope are resources that must each be used exactly once;
whatever is left when the budget runs out is handed to a fresh zone
variable of type ``R1 -o ... -o Rn -o goal``. Additive forms (``<_, _>``
and ``case``) get the same resources in both branches, so anything a
branch cannot consume on its own goes through one such variable shared
by both.

Every position the checker infers is given an inferable term; anything
else is wrapped in an identity abstraction first.
"""
from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence, Tuple
import logging

import numpy as np
from pydantic import BaseModel, ConfigDict

from ldtt.syntax import (TOP_INTRO, TOP_TY, UNIT_I, UNIT_INTRO, UNIV_L,
                         UNIV_U, ZERO_TY, Ctx, Expr, Head, Judgment,
                         JudgmentKind, app, arrow, cvar, el, l_let, lift,
                         lin_app, lin_lam, lolli, lty, lvar, mty, node, plus,
                         shift, sig, tensor, unsig, with_)

logger = logging.getLogger(__name__)

Resource = Tuple[Expr, Expr]

# heads the checker cannot infer a type for
_CHECK_ONLY = (Head.INL, Head.INR, Head.ZERO_ELIM)


class GenConfig(BaseModel):
    """Shape of the generated terms.

    Parameters
    ----------
    fuel : int
      Nesting budget; at zero the remaining resources are closed off.

    type_depth : int
      Depth of the random linear types.

    inputs : int
      Most zone variables handed to the term before it is built.

    injections : bool
      Allow ``inl``/``inr`` on goals of a ``(+)`` type.

    zero : bool
      Allow ``Zero`` as a type, and ``absurd``.

    box : bool
      Put ``g : Mt (Lt (El X)) -> Mt (Lt (El X))`` in the context and
      reach ``Lt (El X)`` through it.

    redexes : bool
      Plant beta redexes of every linear connective.

    """
    model_config = ConfigDict(frozen=True)

    fuel: int = 4
    type_depth: int = 2
    inputs: int = 3
    injections: bool = True
    zero: bool = True
    box: bool = False
    redexes: bool = True


def base_ctx(box: bool = False) -> Ctx:
    """``A B : L, X : U, c : El X``, then ``g`` when ``box`` is set."""
    ctx = (Ctx().extend("A", UNIV_L).extend("B", UNIV_L).extend(
        "X", UNIV_U).extend("c", el(cvar(0))))
    if box:
        m = mty(lty(el(cvar(1))))
        ctx = ctx.extend("g", arrow(m, m))
    return ctx


@dataclass(frozen=True)
class GeneratedTerm:
    judgment: Judgment
    # uses top or absurd, so the zone is not consumed variable by variable
    slack: bool

    @property
    def ctx(self) -> Ctx:
        return self.judgment.ctx

    @property
    def term(self) -> Expr:
        return self.judgment.subjects[0]

    @property
    def type(self) -> Expr:
        return self.judgment.subjects[1]


@dataclass(frozen=True)
class _Scope:
    # cartesian binders entered below the base context
    depth: int
    # indices of the variables of type El X
    points: Tuple[int, ...]

    def under(self) -> "_Scope":
        return _Scope(self.depth + 1,
                      tuple(i + 1 for i in self.points) + (0, ))


def inferable(e: Expr) -> bool:
    """Whether the checker can infer a type for ``e`` as generated."""
    h = e.head
    if h in _CHECK_ONLY:
        return False
    if h in (Head.TEN_PAIR, Head.WITH_PAIR):
        return all(inferable(c) for c in e.children)
    if h in (Head.LIN_LAM, Head.TEN_LET, Head.UNIT_LET, Head.L_LET,
             Head.PLUS_CASE):
        return inferable(e.children[1])
    return True


def _closer_type(types: Sequence[Expr], goal: Expr) -> Expr:
    out = goal
    for t in reversed(types):
        out = lolli(t, out)
    return out


class TermGenerator:
    """Random terms of ``LinTermHasType`` judgments over ``base_ctx``.

    Types are kept scoped over the base context and shifted when they
    are written under a ``let x be _ in _``.
    """

    def __init__(self,
                 rng: np.random.Generator,
                 config: Optional[GenConfig] = None) -> None:
        self.rng = rng
        self.config = config or GenConfig()
        self.ctx = base_ctx(self.config.box)
        n = len(self.ctx)
        self._a, self._b = el(cvar(n - 1)), el(cvar(n - 2))
        self._points = lty(el(cvar(n - 3)))
        self._c = n - 4
        atoms = [self._a, self._a, self._b, self._b, UNIT_I, self._points,
                 TOP_TY]
        if self.config.zero:
            atoms.append(ZERO_TY)
        self._atoms = atoms
        self._zone: List[Tuple[str, Expr]] = []
        self._count = 0
        self._slack = False

    # randomness

    def _pick(self, items: Sequence):
        return items[int(self.rng.integers(len(items)))]

    def _coin(self, p: float = 0.5) -> bool:
        return bool(self.rng.random() < p)

    def _split(self, res: Sequence[Resource]
               ) -> Tuple[List[Resource], List[Resource]]:
        mine, theirs = [], []
        for r in res:
            (mine if self._coin() else theirs).append(r)
        return mine, theirs

    def random_type(self, depth: Optional[int] = None) -> Expr:
        depth = self.config.type_depth if depth is None else depth
        if depth <= 0 or self._coin(0.4):
            return self._pick(self._atoms)
        make = self._pick((tensor, lolli, with_, plus))
        return make(self.random_type(depth - 1), self.random_type(depth - 1))

    # names and the zone

    def _fresh(self, prefix: str) -> str:
        self._count += 1
        return f"{prefix}{self._count}"

    def _leaf(self, t: Expr) -> Expr:
        slot = self._fresh("s")
        self._zone.append((slot, t))
        return lvar(slot)

    def term(self, goal: Optional[Expr] = None) -> GeneratedTerm:
        self._zone, self._count, self._slack = [], 0, False
        goal = self.random_type() if goal is None else goal
        inputs = int(self.rng.integers(self.config.inputs + 1))
        res = []
        for _ in range(inputs):
            t = self.random_type()
            res.append((self._leaf(t), t))
        e = self._make(goal, res, _Scope(0, (self._c, )), self.config.fuel)
        ctx = self.ctx
        for slot, t in self._zone:
            ctx = ctx.extend_lin(slot, t)
        logger.debug("generated a term over %d zone variables",
                     len(self._zone))
        return GeneratedTerm(
            Judgment(JudgmentKind.LIN_TERM_HAS_TYPE, ctx, (e, goal)),
            self._slack)

    # building

    def _make(self, goal: Expr, res: List[Resource], scope: _Scope,
              fuel: int) -> Expr:
        if fuel <= 0:
            return self._close(goal, res, scope, 0)
        moves: List[Callable] = [self._close]
        if any(self._eliminable(t) for _, t in res):
            moves += [self._eliminate] * 2
        if self._introducible(goal):
            moves += [self._introduce] * 2
        if self.config.redexes:
            moves.append(self._redex)
        return self._pick(moves)(goal, res, scope, fuel - 1)

    def _ty(self, t: Expr, scope: _Scope) -> Expr:
        return shift(t, 0, scope.depth)

    def _annotate(self, e: Expr, t: Expr, scope: _Scope) -> Expr:
        if inferable(e):
            return e
        w = self._fresh("w")
        return lin_app(lin_lam(self._ty(t, scope), lvar(w), w), e)

    def _point(self, scope: _Scope) -> Expr:
        x = lift(cvar(self._pick(scope.points)))
        if self.config.box and self._coin():
            return unsig(app(cvar(scope.depth), sig(x)))
        return x

    def _close(self, goal: Expr, res: List[Resource], scope: _Scope,
               fuel: int) -> Expr:
        if len(res) == 1 and res[0][1] == goal:
            return res[0][0]
        if goal == TOP_TY:
            self._slack = True
            return TOP_INTRO
        if not res:
            if goal == UNIT_I:
                return UNIT_INTRO
            if goal == self._points:
                return self._point(scope)
            return self._leaf(goal)
        k = self._leaf(_closer_type([t for _, t in res], goal))
        return lin_app(k, *(e for e, _ in res))

    def _eliminable(self, t: Expr) -> bool:
        if t.head is Head.ZERO_TY:
            return self.config.zero
        return t.head in (Head.TENSOR, Head.UNIT_I, Head.WITH, Head.LOLLI,
                          Head.PLUS, Head.L_TY)

    def _eliminate(self, goal: Expr, res: List[Resource], scope: _Scope,
                   fuel: int) -> Expr:
        k = self._pick([i for i, (_, t) in enumerate(res)
                        if self._eliminable(t)])
        r, t = res[k]
        rest = res[:k] + res[k + 1:]
        h = t.head
        if h is Head.TENSOR:
            u, v = self._fresh("u"), self._fresh("v")
            body = self._make(goal, rest + [(lvar(u), t.children[0]),
                                            (lvar(v), t.children[1])],
                              scope, fuel)
            return node(Head.TEN_LET, r, body, names=(u, v))
        if h is Head.UNIT_I:
            return node(Head.UNIT_LET, r, self._make(goal, rest, scope, fuel))
        if h is Head.WITH:
            i = int(self._coin())
            proj = node(Head.WITH_SND if i else Head.WITH_FST, r)
            return self._make(goal, rest + [(proj, t.children[i])], scope,
                              fuel)
        if h is Head.LOLLI:
            mine, theirs = self._split(rest)
            arg = self._make(t.children[0], mine, scope, fuel)
            return self._make(goal,
                              theirs + [(lin_app(r, arg), t.children[1])],
                              scope, fuel)
        if h is Head.PLUS:
            return self._case(goal, r, t, rest, scope)
        if h is Head.ZERO_TY:
            self._slack = True
            return node(Head.ZERO_ELIM, r)
        inner = scope.under()
        moved = [(shift(e, 0, 1), s) for e, s in rest]
        if self._coin():
            moved.append((lift(cvar(0)), t))
        return l_let(r, self._make(goal, moved, inner, fuel))

    def _case(self, goal: Expr, r: Expr, t: Expr, rest: List[Resource],
              scope: _Scope) -> Expr:
        """``case r of ...`` with both branches through one zone variable."""
        u, v = self._fresh("u"), self._fresh("v")
        k = self._leaf(_closer_type([t] + [s for _, s in rest], goal))
        args = [e for e, _ in rest]
        left = lin_app(k, node(Head.INL, lvar(u)), *args)
        right = lin_app(k, node(Head.INR, lvar(v)), *args)
        if self.config.redexes and self._coin():
            w = self._fresh("w")
            right = lin_app(
                lin_lam(self._ty(t, scope), lin_app(k, lvar(w), *args), w),
                node(Head.INR, lvar(v)))
        return node(Head.PLUS_CASE, r, left, right, names=(u, v))

    def _introducible(self, goal: Expr) -> bool:
        if goal.head is Head.PLUS:
            return self.config.injections
        return goal.head in (Head.TENSOR, Head.LOLLI, Head.WITH)

    def _introduce(self, goal: Expr, res: List[Resource], scope: _Scope,
                   fuel: int) -> Expr:
        a, b = goal.children
        h = goal.head
        if h is Head.TENSOR:
            mine, theirs = self._split(res)
            return node(Head.TEN_PAIR, self._make(a, mine, scope, fuel),
                        self._make(b, theirs, scope, fuel))
        if h is Head.LOLLI:
            u = self._fresh("u")
            body = self._make(b, res + [(lvar(u), a)], scope, fuel)
            return lin_lam(self._ty(a, scope), body, u)
        if h is Head.WITH:
            return self._pair(goal, res, scope, fuel)
        i = int(self._coin())
        inj = Head.INR if i else Head.INL
        return node(inj, self._make(goal.children[i], res, scope, fuel))

    def _pair(self, goal: Expr, res: List[Resource], scope: _Scope,
              fuel: int) -> Expr:
        a, b = goal.children
        if a == b and self._coin():
            e = self._make(a, res, scope, fuel)
            return node(Head.WITH_PAIR, e, self._variant(e, a, scope))
        k = self._leaf(_closer_type([t for _, t in res], goal))
        whole = lin_app(k, *(e for e, _ in res))
        return node(Head.WITH_PAIR, node(Head.WITH_FST, whole),
                    node(Head.WITH_SND, whole))

    def _variant(self, e: Expr, t: Expr, scope: _Scope) -> Expr:
        """A term using the same variables as ``e``, equal to it."""
        if not self.config.redexes:
            return e
        choice = int(self.rng.integers(3))
        if choice == 0:
            w = self._fresh("w")
            return lin_app(lin_lam(self._ty(t, scope), lvar(w), w), e)
        if choice == 1:
            return node(Head.UNIT_LET, UNIT_INTRO, e)
        self._slack = True
        return node(Head.WITH_FST,
                    node(Head.WITH_PAIR, self._annotate(e, t, scope),
                         TOP_INTRO))

    def _redex(self, goal: Expr, res: List[Resource], scope: _Scope,
               fuel: int) -> Expr:
        kinds = ["lolli", "tensor", "with", "unit", "lift"]
        if self.config.injections:
            kinds.append("plus")
        kind = self._pick(kinds)
        if kind == "lolli":
            c = self.random_type(1)
            u = self._fresh("u")
            mine, theirs = self._split(res)
            body = self._annotate(
                self._make(goal, mine + [(lvar(u), c)], scope, fuel), goal,
                scope)
            arg = self._make(c, theirs, scope, fuel)
            return lin_app(lin_lam(self._ty(c, scope), body, u), arg)
        if kind == "tensor":
            c, d = self.random_type(1), self.random_type(1)
            u, v = self._fresh("u"), self._fresh("v")
            first, rest = self._split(res)
            second, rest = self._split(rest)
            pair = node(
                Head.TEN_PAIR,
                self._annotate(self._make(c, first, scope, fuel), c, scope),
                self._annotate(self._make(d, second, scope, fuel), d, scope))
            body = self._make(goal, rest + [(lvar(u), c), (lvar(v), d)],
                              scope, fuel)
            return node(Head.TEN_LET, pair, body, names=(u, v))
        if kind == "with":
            self._slack = True
            e = self._annotate(self._make(goal, res, scope, fuel), goal,
                               scope)
            if self._coin():
                return node(Head.WITH_FST,
                            node(Head.WITH_PAIR, e, TOP_INTRO))
            return node(Head.WITH_SND, node(Head.WITH_PAIR, TOP_INTRO, e))
        if kind == "unit":
            return node(Head.UNIT_LET, UNIT_INTRO,
                        self._make(goal, res, scope, fuel))
        if kind == "lift":
            point = lift(cvar(self._pick(scope.points)))
            moved = [(shift(e, 0, 1), s) for e, s in res]
            if self._coin():
                moved.append((lift(cvar(0)), self._points))
            return l_let(point, self._make(goal, moved, scope.under(), fuel))
        c, d = self.random_type(1), self.random_type(1)
        mine, theirs = self._split(res)
        t = plus(c, d)
        scrut = self._annotate(
            node(Head.INL, self._make(c, mine, scope, fuel)), t, scope)
        return self._case(goal, scrut, t, theirs, scope)


def generate(seed: int, config: Optional[GenConfig] = None) -> GeneratedTerm:
    return TermGenerator(np.random.default_rng(seed), config).term()
