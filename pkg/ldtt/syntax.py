"""Core syntax: the unified expression tree, sorts, contexts and judgments.

Cartesian variables are de Bruijn indices into the cartesian telescope.
Linear variables are named by slot-ids; a binder node records the slot-ids
it binds in ``names`` so exchange in the linear zone never renumbers
anything. Cartesian binder names in ``names`` are printing hints only.
"""
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, FrozenSet, List, Optional, Sequence, Set, Tuple

from ldtt.errors import (DuplicateLinearName, IllFormedNode, NegativeIndex,
                         OutOfScope)


class Sort(Enum):
    CART_TYPE = "CartType"
    LIN_TYPE = "LinType"
    CART_TERM = "CartTerm"
    LIN_TERM = "LinTerm"

    def __str__(self) -> str:
        return self.value


CT = Sort.CART_TYPE
LT = Sort.LIN_TYPE
CE = Sort.CART_TERM
LE = Sort.LIN_TERM


class Head(Enum):
    CART_VAR = "CartVar"
    LIN_VAR = "LinVar"
    PI = "Pi"
    LAM = "Lam"
    APP = "App"
    SIGMA = "Sigma"
    PAIR_C = "PairC"
    PR1 = "Pr1"
    PR2 = "Pr2"
    SIG_ELIM1 = "SigElim1"
    SIG_ELIM2 = "SigElim2"
    ID = "Id"
    REFL = "Refl"
    ID_ELIM1 = "IdElim1"
    ID_ELIM2 = "IdElim2"
    UNIV_U = "UnivU"
    UNIV_L = "UnivL"
    EL = "El"
    SQCAP = "Sqcap"
    SQ_LAM = "SqLam"
    SQ_APP = "SqApp"
    SQSUBSET = "Sqsubset"
    SQ_PAIR = "SqPair"
    SQ_LET = "SqLet"
    TENSOR = "Tensor"
    TEN_PAIR = "TenPair"
    TEN_LET = "TenLet"
    UNIT_I = "UnitI"
    UNIT_INTRO = "UnitIntro"
    UNIT_LET = "UnitLet"
    LOLLI = "Lolli"
    LIN_LAM = "LinLam"
    LIN_APP = "LinApp"
    WITH = "With"
    WITH_PAIR = "WithPair"
    WITH_FST = "WithFst"
    WITH_SND = "WithSnd"
    PLUS = "Plus"
    INL = "Inl"
    INR = "Inr"
    PLUS_CASE = "PlusCase"
    ZERO_TY = "ZeroTy"
    ZERO_ELIM = "ZeroElim"
    TOP_TY = "TopTy"
    TOP_INTRO = "TopIntro"
    L_TY = "LTy"
    L_INTRO = "LIntro"
    L_LET = "LLet"
    M_TY = "MTy"
    M_INTRO = "MIntro"
    M_ELIM = "MElim"
    UA = "Ua"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class ChildSpec:
    """Sort of a child and what it binds.

    ``cart`` is the number of cartesian binders in scope for the child,
    ``lin`` the positions in the node's ``names`` of the linear slots the
    child binds.
    """
    sort: Sort
    cart: int = 0
    lin: Tuple[int, ...] = ()


@dataclass(frozen=True)
class Signature:
    sort: Optional[Sort]
    children: Tuple[ChildSpec, ...] = ()
    names: int = 0
    variadic: Optional[ChildSpec] = None


def _sig(sort, *children, names=0, variadic=None) -> Signature:
    specs = tuple(c if isinstance(c, ChildSpec) else ChildSpec(c)
                  for c in children)
    return Signature(sort, specs, names, variadic)


SIGNATURES: Dict[Head, Signature] = {
    Head.CART_VAR: _sig(CE),
    Head.LIN_VAR: _sig(LE),
    Head.PI: _sig(CT, CT, ChildSpec(CT, 1), names=1),
    Head.LAM: _sig(CE, CT, ChildSpec(CE, 1), names=1),
    Head.APP: _sig(CE, CE, CE),
    Head.SIGMA: _sig(CT, CT, ChildSpec(CT, 1), names=1),
    Head.PAIR_C: _sig(CE, CE, CE),
    Head.PR1: _sig(CE, CE),
    Head.PR2: _sig(CE, CE),
    Head.SIG_ELIM1: _sig(
        CE, ChildSpec(CT, 1), ChildSpec(CE, 2), CE, names=3),
    Head.SIG_ELIM2: _sig(
        LE,
        ChildSpec(LT, 1),
        ChildSpec(LE, 2),
        CE,
        names=3,
        variadic=ChildSpec(LT, 2)),
    Head.ID: _sig(CT, CT, CE, CE),
    Head.REFL: _sig(CE, CE),
    Head.ID_ELIM1: _sig(
        CE, ChildSpec(CT, 3), ChildSpec(CE, 1), CE, names=4),
    Head.ID_ELIM2: _sig(
        LE,
        ChildSpec(LT, 3),
        ChildSpec(LE, 1),
        CE,
        names=4,
        variadic=ChildSpec(LT, 3)),
    Head.UNIV_U: _sig(CT),
    Head.UNIV_L: _sig(CT),
    Head.EL: _sig(None, CE),
    Head.SQCAP: _sig(LT, CT, ChildSpec(LT, 1), names=1),
    Head.SQ_LAM: _sig(LE, CT, ChildSpec(LE, 1), names=1),
    Head.SQ_APP: _sig(LE, LE, CE),
    Head.SQSUBSET: _sig(LT, CT, ChildSpec(LT, 1), names=1),
    Head.SQ_PAIR: _sig(LE, CE, LE),
    Head.SQ_LET: _sig(LE, LE, ChildSpec(LE, 1, (1, )), names=2),
    Head.TENSOR: _sig(LT, LT, LT),
    Head.TEN_PAIR: _sig(LE, LE, LE),
    Head.TEN_LET: _sig(LE, LE, ChildSpec(LE, 0, (0, 1)), names=2),
    Head.UNIT_I: _sig(LT),
    Head.UNIT_INTRO: _sig(LE),
    Head.UNIT_LET: _sig(LE, LE, LE),
    Head.LOLLI: _sig(LT, LT, LT),
    Head.LIN_LAM: _sig(LE, LT, ChildSpec(LE, 0, (0, )), names=1),
    Head.LIN_APP: _sig(LE, LE, LE),
    Head.WITH: _sig(LT, LT, LT),
    Head.WITH_PAIR: _sig(LE, LE, LE),
    Head.WITH_FST: _sig(LE, LE),
    Head.WITH_SND: _sig(LE, LE),
    Head.PLUS: _sig(LT, LT, LT),
    Head.INL: _sig(LE, LE),
    Head.INR: _sig(LE, LE),
    Head.PLUS_CASE: _sig(
        LE, LE, ChildSpec(LE, 0, (0, )), ChildSpec(LE, 0, (1, )), names=2),
    Head.ZERO_TY: _sig(LT),
    Head.ZERO_ELIM: _sig(LE, LE),
    Head.TOP_TY: _sig(LT),
    Head.TOP_INTRO: _sig(LE),
    Head.L_TY: _sig(LT, CT),
    Head.L_INTRO: _sig(LE, CE),
    Head.L_LET: _sig(LE, LE, ChildSpec(LE, 1), names=1),
    Head.M_TY: _sig(CT, LT),
    Head.M_INTRO: _sig(CE, LE),
    Head.M_ELIM: _sig(LE, CE),
    Head.UA: _sig(CE, CE, CE, LE, LE, LE, CE, CE),
}


@dataclass(frozen=True)
class Expr:
    """A node of the core syntax tree.

    ``captured`` is only used by ``SigElim2`` and ``IdElim2``: the zone
    slots the eliminator retypes, aligned with the trailing zone-type
    children.
    """
    head: Head
    children: Tuple["Expr", ...] = ()
    index: Optional[int] = None
    slot: Optional[str] = None
    names: Tuple[str, ...] = ()
    captured: Tuple[str, ...] = ()

    def __post_init__(self):
        sig = SIGNATURES[self.head]
        fixed = len(sig.children)
        n = len(self.children)
        if n < fixed or (n > fixed and sig.variadic is None):
            raise IllFormedNode(
                f"{self.head} expects {fixed} children, got {n}")
        if n - fixed != len(self.captured):
            raise IllFormedNode(
                f"{self.head} has {n - fixed} zone types for "
                f"{len(self.captured)} captured slots")
        if len(self.names) != sig.names:
            raise IllFormedNode(
                f"{self.head} expects {sig.names} binder names, "
                f"got {len(self.names)}")
        if self.head is Head.CART_VAR and self.index is None:
            raise IllFormedNode("CartVar without an index")
        if self.head is Head.LIN_VAR and not self.slot:
            raise IllFormedNode("LinVar without a slot")

    def __repr__(self) -> str:
        if self.head is Head.CART_VAR:
            return f"#{self.index}"
        if self.head is Head.LIN_VAR:
            return f"@{self.slot}"
        if not self.children:
            return str(self.head)
        inner = ", ".join(repr(c) for c in self.children)
        return f"{self.head}({inner})"

    @property
    def signature(self) -> Signature:
        return SIGNATURES[self.head]

    def child_spec(self, i: int) -> ChildSpec:
        sig = self.signature
        if i < len(sig.children):
            return sig.children[i]
        return sig.variadic

    def cart_binders(self, i: int) -> int:
        return self.child_spec(i).cart

    def lin_binders(self, i: int) -> Tuple[str, ...]:
        return tuple(self.names[k] for k in self.child_spec(i).lin)

    def replace(self, **changes) -> "Expr":
        kwargs = dict(
            head=self.head,
            children=self.children,
            index=self.index,
            slot=self.slot,
            names=self.names,
            captured=self.captured)
        kwargs.update(changes)
        return Expr(**kwargs)

    def with_children(self, children: Sequence["Expr"]) -> "Expr":
        return self.replace(children=tuple(children))


def node(head: Head, *children: Expr, names: Sequence[str] = (),
         captured: Sequence[str] = ()) -> Expr:
    return Expr(head, tuple(children), names=tuple(names),
                captured=tuple(captured))


def cvar(i: int) -> Expr:
    return Expr(Head.CART_VAR, index=i)


def lvar(slot: str) -> Expr:
    return Expr(Head.LIN_VAR, slot=slot)


UNIV_U = node(Head.UNIV_U)
UNIV_L = node(Head.UNIV_L)
UNIT_I = node(Head.UNIT_I)
UNIT_INTRO = node(Head.UNIT_INTRO)
ZERO_TY = node(Head.ZERO_TY)
TOP_TY = node(Head.TOP_TY)
TOP_INTRO = node(Head.TOP_INTRO)


def pi(a: Expr, b: Expr, x: str = "x") -> Expr:
    return node(Head.PI, a, b, names=(x, ))


def arrow(a: Expr, b: Expr) -> Expr:
    return pi(a, shift(b, 0, 1), "_")


def sigma(a: Expr, b: Expr, x: str = "x") -> Expr:
    return node(Head.SIGMA, a, b, names=(x, ))


def times(a: Expr, b: Expr) -> Expr:
    return sigma(a, shift(b, 0, 1), "_")


def lam(a: Expr, body: Expr, x: str = "x") -> Expr:
    return node(Head.LAM, a, body, names=(x, ))


def app(f: Expr, *args: Expr) -> Expr:
    for a in args:
        f = node(Head.APP, f, a)
    return f


def el(code: Expr) -> Expr:
    return node(Head.EL, code)


def sqcap(a: Expr, b: Expr, x: str = "x") -> Expr:
    return node(Head.SQCAP, a, b, names=(x, ))


def sqsubset(a: Expr, b: Expr, x: str = "x") -> Expr:
    return node(Head.SQSUBSET, a, b, names=(x, ))


def lolli(a: Expr, b: Expr) -> Expr:
    return node(Head.LOLLI, a, b)


def tensor(a: Expr, b: Expr) -> Expr:
    return node(Head.TENSOR, a, b)


def with_(a: Expr, b: Expr) -> Expr:
    return node(Head.WITH, a, b)


def plus(a: Expr, b: Expr) -> Expr:
    return node(Head.PLUS, a, b)


def lty(a: Expr) -> Expr:
    return node(Head.L_TY, a)


def mty(b: Expr) -> Expr:
    return node(Head.M_TY, b)


def lin_lam(a: Expr, body: Expr, u: str) -> Expr:
    return node(Head.LIN_LAM, a, body, names=(u, ))


def lin_app(f: Expr, *args: Expr) -> Expr:
    for a in args:
        f = node(Head.LIN_APP, f, a)
    return f


def sq_lam(a: Expr, body: Expr, x: str = "x") -> Expr:
    return node(Head.SQ_LAM, a, body, names=(x, ))


def sq_app(t: Expr, a: Expr) -> Expr:
    return node(Head.SQ_APP, t, a)


def lift(a: Expr) -> Expr:
    return node(Head.L_INTRO, a)


def l_let(a: Expr, body: Expr, x: str = "x") -> Expr:
    return node(Head.L_LET, a, body, names=(x, ))


def sig(b: Expr) -> Expr:
    return node(Head.M_INTRO, b)


def unsig(t: Expr) -> Expr:
    return node(Head.M_ELIM, t)


# Judgments and contexts


@dataclass(frozen=True)
class CartEntry:
    name: str
    type: Expr
    value: Optional[Expr] = None


@dataclass(frozen=True)
class Ctx:
    """A split context Γ;Ξ.

    Each cartesian entry's type (and value, for definitions) is scoped
    over the preceding entries; each linear type is scoped over all of
    ``cart``.
    """
    cart: Tuple[CartEntry, ...] = ()
    lin: Tuple[Tuple[str, Expr], ...] = ()

    def __post_init__(self):
        slots = [s for s, _ in self.lin]
        if len(set(slots)) != len(slots):
            raise DuplicateLinearName(f"duplicate linear slot in {slots}")

    def __len__(self) -> int:
        return len(self.cart)

    def extend(self, name: str, type_: Expr,
               value: Optional[Expr] = None) -> "Ctx":
        lin = tuple((s, shift(t, 0, 1)) for s, t in self.lin)
        return Ctx(self.cart + (CartEntry(name, type_, value), ), lin)

    def extend_lin(self, slot: str, type_: Expr) -> "Ctx":
        return Ctx(self.cart, self.lin + ((slot, type_), ))

    def without_lin(self) -> "Ctx":
        return Ctx(self.cart, ())

    def entry(self, i: int) -> CartEntry:
        if i < 0 or i >= len(self.cart):
            raise OutOfScope(f"cartesian index {i} out of scope "
                             f"(context length {len(self.cart)})")
        return self.cart[len(self.cart) - 1 - i]

    def type_of(self, i: int) -> Expr:
        return shift(self.entry(i).type, 0, i + 1)

    def value_of(self, i: int) -> Optional[Expr]:
        value = self.entry(i).value
        return None if value is None else shift(value, 0, i + 1)

    def names(self) -> List[str]:
        return [e.name for e in self.cart]

    def lin_type(self, slot: str) -> Expr:
        for s, t in self.lin:
            if s == slot:
                return t
        raise OutOfScope(f"linear slot '{slot}' not in zone")


class JudgmentKind(Enum):
    CTX_OK = "CtxOk"
    CART_TYPE_OK = "CartTypeOk"
    LIN_TYPE_OK = "LinTypeOk"
    CART_TERM_HAS_TYPE = "CartTermHasType"
    LIN_TERM_HAS_TYPE = "LinTermHasType"
    CART_EQ = "CartEq"
    LIN_EQ = "LinEq"

    def __str__(self) -> str:
        return self.value


_SUBJECT_COUNTS = {
    JudgmentKind.CTX_OK: 0,
    JudgmentKind.CART_TYPE_OK: 1,
    JudgmentKind.LIN_TYPE_OK: 1,
    JudgmentKind.CART_TERM_HAS_TYPE: 2,
    JudgmentKind.LIN_TERM_HAS_TYPE: 2,
    JudgmentKind.CART_EQ: 3,
    JudgmentKind.LIN_EQ: 3,
}

_ZONED_KINDS = {
    JudgmentKind.CTX_OK, JudgmentKind.LIN_TERM_HAS_TYPE, JudgmentKind.LIN_EQ
}


@dataclass(frozen=True)
class Judgment:
    kind: JudgmentKind
    ctx: Ctx
    subjects: Tuple[Expr, ...] = field(default_factory=tuple)

    def __post_init__(self):
        if len(self.subjects) != _SUBJECT_COUNTS[self.kind]:
            raise IllFormedNode(
                f"{self.kind} judgment takes "
                f"{_SUBJECT_COUNTS[self.kind]} subjects, "
                f"got {len(self.subjects)}")
        if self.ctx.lin and self.kind not in _ZONED_KINDS:
            raise IllFormedNode(
                f"{self.kind} judgment must have an empty linear zone")


# Structural operations


def shift(e: Expr, cutoff: int, amount: int) -> Expr:
    """Move every free cartesian index ``>= cutoff`` by ``amount``."""
    if amount == 0:
        return e
    if e.head is Head.CART_VAR:
        if e.index >= cutoff:
            new = e.index + amount
            if new < 0:
                raise NegativeIndex(
                    f"shifting index {e.index} by {amount} underflows")
            return cvar(new)
        return e
    if not e.children:
        return e
    return e.with_children(
        shift(c, cutoff + e.cart_binders(i), amount)
        for i, c in enumerate(e.children))


def occurs_cart(e: Expr, idx: int) -> bool:
    if e.head is Head.CART_VAR:
        return e.index == idx
    return any(
        occurs_cart(c, idx + e.cart_binders(i))
        for i, c in enumerate(e.children))


def free_cart_indices(e: Expr, depth: int = 0) -> Set[int]:
    if e.head is Head.CART_VAR:
        return {e.index - depth} if e.index >= depth else set()
    out = set()
    for i, c in enumerate(e.children):
        out |= free_cart_indices(c, depth + e.cart_binders(i))
    return out


def free_lin_slots(e: Expr) -> FrozenSet[str]:
    if e.head is Head.LIN_VAR:
        return frozenset((e.slot, ))
    out = set(e.captured)
    for i, c in enumerate(e.children):
        out |= free_lin_slots(c) - set(e.lin_binders(i))
    return frozenset(out)


def bound_lin_slots(e: Expr) -> Set[str]:
    out = set(e.names[k] for i in range(len(e.children))
              for k in e.child_spec(i).lin)
    for c in e.children:
        out |= bound_lin_slots(c)
    return out


def linear_occurrences(e: Expr, slot: str) -> int:
    """Free occurrences of ``slot``; additive branches count in parallel."""
    if e.head is Head.LIN_VAR:
        return int(e.slot == slot)
    counts = [
        0 if slot in e.lin_binders(i) else linear_occurrences(c, slot)
        for i, c in enumerate(e.children)
    ]
    if e.head is Head.WITH_PAIR:
        return max(counts)
    if e.head is Head.PLUS_CASE:
        return counts[0] + max(counts[1:])
    return sum(counts)


def alpha_eq(e1: Expr, e2: Expr) -> bool:
    return _alpha(e1, e2, {}, {}, 0)


def _alpha(a: Expr, b: Expr, ma: Dict[str, int], mb: Dict[str, int],
           level: int) -> bool:
    if a.head is not b.head or len(a.children) != len(b.children):
        return False
    if a.head is Head.CART_VAR:
        return a.index == b.index
    if a.head is Head.LIN_VAR:
        return _same_slot(a.slot, b.slot, ma, mb)
    if len(a.captured) != len(b.captured) or not all(
            _same_slot(x, y, ma, mb)
            for x, y in zip(a.captured, b.captured)):
        return False
    for i, (ca, cb) in enumerate(zip(a.children, b.children)):
        bound_a, bound_b = a.lin_binders(i), b.lin_binders(i)
        if bound_a:
            ma2, mb2 = dict(ma), dict(mb)
            for k, (x, y) in enumerate(zip(bound_a, bound_b)):
                ma2[x] = level + k
                mb2[y] = level + k
            if not _alpha(ca, cb, ma2, mb2, level + len(bound_a)):
                return False
        elif not _alpha(ca, cb, ma, mb, level):
            return False
    return True


def _same_slot(x: str, y: str, ma: Dict[str, int],
               mb: Dict[str, int]) -> bool:
    lx, ly = ma.get(x), mb.get(y)
    if lx is None and ly is None:
        return x == y
    return lx == ly


def _code_universe(code: Expr, types: List[Optional[Expr]],
                   ctx: Ctx) -> Sort:
    args = 0
    head = code
    while head.head is Head.APP:
        head = head.children[0]
        args += 1
    if head.head is not Head.CART_VAR:
        raise IllFormedNode(f"cannot determine the universe of code {code}")
    i = head.index
    if i < len(types):
        type_ = types[len(types) - 1 - i]
    else:
        type_ = ctx.entry(i - len(types)).type
    if type_ is None:
        raise IllFormedNode(f"cannot determine the universe of code {code}")
    for _ in range(args):
        if type_.head is not Head.PI:
            raise IllFormedNode(f"code {code} applied to too many arguments")
        type_ = type_.children[1]
    if type_.head is Head.UNIV_U:
        return CT
    if type_.head is Head.UNIV_L:
        return LT
    raise IllFormedNode(f"{code} is not a code of U or L")


def sort_of(e: Expr, ctx: Optional[Ctx] = None) -> Sort:
    """The unique sort of ``e``, validating child sorts along the way."""
    ctx = ctx or Ctx()
    return _sort(e, ctx, [], frozenset())


def _sort(e: Expr, ctx: Ctx, types: List[Optional[Expr]],
          bound: FrozenSet[str]) -> Sort:
    if e.head is Head.CART_VAR:
        if e.index >= len(types) + len(ctx.cart):
            raise OutOfScope(f"cartesian index {e.index} out of scope")
        return CE
    if e.head is Head.LIN_VAR:
        if e.slot not in bound and all(s != e.slot for s, _ in ctx.lin):
            raise OutOfScope(f"linear slot '{e.slot}' out of scope")
        return LE
    for slot in e.captured:
        if slot not in bound and all(s != slot for s, _ in ctx.lin):
            raise OutOfScope(f"linear slot '{slot}' out of scope")
    for i, child in enumerate(e.children):
        spec = e.child_spec(i)
        inner_types = types
        if spec.cart:
            binder_type = e.children[0] if (
                spec.cart == 1 and e.head in _TYPED_BINDERS) else None
            inner_types = types + [binder_type] + [None] * (spec.cart - 1)
        inner_bound = bound | frozenset(e.lin_binders(i))
        got = _sort(child, ctx, inner_types, inner_bound)
        if got is not spec.sort:
            raise IllFormedNode(f"child {i} of {e.head} has sort {got}, "
                                f"expected {spec.sort}")
    if e.head is Head.EL:
        return _code_universe(e.children[0], types, ctx)
    return e.signature.sort


_TYPED_BINDERS = {
    Head.PI, Head.SIGMA, Head.LAM, Head.SQCAP, Head.SQSUBSET, Head.SQ_LAM
}


def strengthen(e: Expr, idx: int = 0) -> Optional[Expr]:
    """Remove the binder ``idx`` from the scope of ``e`` when unused."""
    if occurs_cart(e, idx):
        return None
    return shift(e, idx + 1, -1) if idx else shift(e, 0, -1)
