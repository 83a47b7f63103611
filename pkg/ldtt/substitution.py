"""Cartesian and linear substitution on core expressions."""
from typing import Dict, Iterable, Mapping, Sequence

from ldtt.errors import IllFormedNode, SortMismatch
from ldtt.syntax import (Expr, Head, bound_lin_slots, cvar, free_lin_slots,
                         lvar, shift)

# heads that can never be cartesian terms
_NON_CART_TERM_HEADS = {
    Head.LIN_VAR, Head.PI, Head.SIGMA, Head.ID, Head.UNIV_U, Head.UNIV_L,
    Head.EL, Head.SQCAP, Head.SQ_LAM, Head.SQ_APP, Head.SQSUBSET,
    Head.SQ_PAIR, Head.SQ_LET, Head.TENSOR, Head.TEN_PAIR, Head.TEN_LET,
    Head.UNIT_I, Head.UNIT_INTRO, Head.UNIT_LET, Head.LOLLI, Head.LIN_LAM,
    Head.LIN_APP, Head.WITH, Head.WITH_PAIR, Head.WITH_FST, Head.WITH_SND,
    Head.PLUS, Head.INL, Head.INR, Head.PLUS_CASE, Head.ZERO_TY,
    Head.ZERO_ELIM, Head.TOP_TY, Head.TOP_INTRO, Head.L_TY, Head.L_INTRO,
    Head.L_LET, Head.M_TY, Head.M_ELIM, Head.SIG_ELIM2, Head.ID_ELIM2
}


def subst(e: Expr, a: Expr, idx: int = 0) -> Expr:
    """Replace the cartesian variable ``idx`` of ``e`` by ``a``.

    ``a`` lives in the context of the result, i.e. with that variable
    removed; indices above ``idx`` move down by one.
    """
    if a.head in _NON_CART_TERM_HEADS:
        raise SortMismatch(f"cannot substitute non-cartesian term {a}")
    return _subst(e, a, idx, 0)


def _subst(e: Expr, a: Expr, idx: int, depth: int) -> Expr:
    if e.head is Head.CART_VAR:
        target = idx + depth
        if e.index == target:
            return shift(a, 0, depth)
        if e.index > target:
            return cvar(e.index - 1)
        return e
    if not e.children:
        return e
    return e.with_children(
        _subst(c, a, idx, depth + e.cart_binders(i))
        for i, c in enumerate(e.children))


def instantiate(body: Expr, arg: Expr) -> Expr:
    """``body`` under one binder, with the binder replaced by ``arg``."""
    return subst(body, arg, 0)


def instantiate_many(body: Expr, args: Sequence[Expr]) -> Expr:
    """``body`` under ``len(args)`` binders; ``args[0]`` is the outermost.

    All arguments live in the outer context.
    """
    k = len(args)
    for j in range(k - 1, -1, -1):
        body = subst(body, shift(args[j], 0, j), 0)
    return body


def fresh_slot(base: str, avoid: Iterable[str]) -> str:
    avoid = set(avoid)
    name = base
    while name in avoid:
        name = name + "'"
    return name


def lin_subst(e: Expr, slot: str, t: Expr) -> Expr:
    return lin_subst_many(e, {slot: t})


def lin_subst_many(e: Expr, mapping: Mapping[str, Expr]) -> Expr:
    """Simultaneously replace free linear slots, renaming binders that would
    capture free slots of the replacements."""
    if not mapping:
        return e
    danger = set()
    for t in mapping.values():
        danger |= free_lin_slots(t)
    return _lin_subst(e, dict(mapping), danger, 0)


def _lin_subst(e: Expr, mapping: Dict[str, Expr], danger: set,
               depth: int) -> Expr:
    if e.head is Head.LIN_VAR:
        t = mapping.get(e.slot)
        if t is None:
            return e
        return shift(t, 0, depth) if depth else t
    if not mapping:
        return e
    captured = e.captured
    if captured and any(s in mapping for s in captured):
        new_captured = []
        for s in captured:
            t = mapping.get(s)
            if t is None:
                new_captured.append(s)
            elif t.head is Head.LIN_VAR:
                new_captured.append(t.slot)
            else:
                raise IllFormedNode(
                    f"cannot substitute compound term {t} for retyped "
                    f"zone slot '{s}' of {e.head}")
        captured = tuple(new_captured)
    names = list(e.names)
    children = []
    renames: Dict[int, str] = {}
    for i, child in enumerate(e.children):
        spec = e.child_spec(i)
        inner = dict(mapping)
        extra: Dict[str, Expr] = {}
        for k in spec.lin:
            bound = e.names[k]
            inner.pop(bound, None)
            if bound in danger and inner:
                if k not in renames:
                    avoid = danger | free_lin_slots(child) | bound_lin_slots(
                        child) | set(mapping)
                    renames[k] = fresh_slot(bound, avoid)
                extra[bound] = lvar(renames[k])
                names[k] = renames[k]
        if extra:
            child = _lin_subst(child, extra, set(), 0)
        children.append(
            _lin_subst(child, inner, danger, depth + spec.cart))
    return e.replace(
        children=tuple(children), names=tuple(names), captured=captured)
