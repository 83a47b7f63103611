"""Printing core terms and resolved declarations back to surface syntax.

The output parses and resolves to an alpha-equivalent core term, so it
can be fed back to ``ldtt.parser``.
"""
import re
from typing import Dict, Iterable, List, Optional

from ldtt.parser import KEYWORDS, ResolvedDecl
from ldtt.syntax import (Ctx, Expr, Head, JudgmentKind, bound_lin_slots,
                         free_lin_slots, occurs_cart, shift)

EXPR, ARROW, LOLLI, ADD, TENSOR, APP, ATOM = range(7)

_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_']*$")

_CONSTANTS = {
    Head.UNIV_U: "U",
    Head.UNIV_L: "L",
    Head.UNIT_I: "Unit",
    Head.UNIT_INTRO: "unit",
    Head.ZERO_TY: "Zero",
    Head.TOP_TY: "Top",
    Head.TOP_INTRO: "top",
}

_UNARY = {
    Head.PR1: "pr1",
    Head.PR2: "pr2",
    Head.WITH_FST: "fst",
    Head.WITH_SND: "snd",
    Head.INL: "inl",
    Head.INR: "inr",
    Head.ZERO_ELIM: "absurd",
    Head.EL: "El",
    Head.L_TY: "Lt",
    Head.M_TY: "Mt",
    Head.L_INTRO: "lift",
    Head.M_INTRO: "sig",
    Head.REFL: "refl",
}

_BINDERS = {
    Head.PI: "Pi",
    Head.SIGMA: "Sigma",
    Head.SQCAP: "cap",
    Head.SQSUBSET: "sub",
}

_APPS = (Head.APP, Head.SQ_APP, Head.LIN_APP)


class _Env:
    def __init__(self, names: Iterable[str], lin: Dict[str, str],
                 lin_globals: Dict[str, int], reserved: Iterable[str]):
        self.names: List[str] = list(names)
        self.lin = dict(lin)
        self.lin_globals = lin_globals
        self.reserved = set(reserved)

    def taken(self) -> set:
        return set(self.names) | set(self.lin.values()) | set(KEYWORDS)

    def fresh(self, base: str) -> str:
        if not _IDENT.match(base or "") or base in KEYWORDS:
            base = "x"
        used = self.taken() | self.reserved
        name = base
        while name in used:
            name += "'"
        return name

    def bind(self, base: str) -> "_Env":
        env = _Env(self.names, self.lin, self.lin_globals, self.reserved)
        env.names.append(self.fresh(base))
        return env

    def bind_lin(self, slot: str) -> "_Env":
        env = _Env(self.names, self.lin, self.lin_globals, self.reserved)
        taken = self.taken()
        env.lin[slot] = slot if slot not in taken else self.fresh(slot)
        return env

    def var(self, i: int) -> str:
        if i < len(self.names):
            return self.names[len(self.names) - 1 - i]
        return f"#{i}"

    def global_params(self, i: int) -> Optional[int]:
        if i < len(self.names):
            return self.lin_globals.get(self.var(i))
        return None


def _paren(text: str, level: int, needed: int) -> str:
    return f"({text})" if level < needed else text


def _spine(e: Expr):
    args = []
    while e.head is Head.APP:
        args.append(e.children[1])
        e = e.children[0]
    return e, args[::-1]


class _Printer:
    def show(self, e: Expr, env: _Env, needed: int = EXPR) -> str:
        text, level = self._show(e, env)
        return _paren(text, level, needed)

    def _show(self, e: Expr, env: _Env):
        h = e.head
        c = e.children
        if h is Head.CART_VAR:
            return env.var(e.index), ATOM
        if h is Head.LIN_VAR:
            return env.lin.get(e.slot, e.slot), ATOM
        if h in _CONSTANTS:
            return _CONSTANTS[h], ATOM
        if h in _BINDERS:
            if h is Head.PI and not occurs_cart(c[1], 0):
                return (f"{self.show(c[0], env, LOLLI)} -> "
                        f"{self.show(shift(c[1], 0, -1), env)}", ARROW)
            if h is Head.SIGMA and not occurs_cart(c[1], 0):
                return (f"{self.show(c[0], env, TENSOR)} * "
                        f"{self.show(shift(c[1], 0, -1), env, APP)}",
                        TENSOR)
            inner = env.bind(e.names[0])
            return (f"{_BINDERS[h]} ({inner.names[-1]} : "
                    f"{self.show(c[0], env)}). {self.show(c[1], inner)}",
                    EXPR)
        if h in (Head.LAM, Head.SQ_LAM):
            inner = env.bind(e.names[0])
            return (f"\\({inner.names[-1]} : {self.show(c[0], env)}). "
                    f"{self.show(c[1], inner)}", EXPR)
        if h is Head.LIN_LAM:
            inner = env.bind_lin(e.names[0])
            slot = inner.lin[e.names[0]]
            return (f"\\({slot} : {self.show(c[0], env)}). "
                    f"{self.show(c[1], inner)}", EXPR)
        if h in _APPS:
            return (f"{self.show(c[0], env, APP)} "
                    f"{self.show(c[1], env, ATOM)}", APP)
        if h is Head.M_ELIM:
            return self._unbox(e, env)
        if h in _UNARY:
            return f"{_UNARY[h]} {self.show(c[0], env, ATOM)}", APP
        if h in (Head.PAIR_C, Head.SQ_PAIR):
            return f"({self.show(c[0], env)}, {self.show(c[1], env)})", ATOM
        if h is Head.WITH_PAIR:
            return f"<{self.show(c[0], env)}, {self.show(c[1], env)}>", ATOM
        if h in (Head.TENSOR, Head.TEN_PAIR):
            return (f"{self.show(c[0], env, TENSOR)} * "
                    f"{self.show(c[1], env, APP)}", TENSOR)
        if h in (Head.WITH, Head.PLUS):
            op = "&" if h is Head.WITH else "(+)"
            return (f"{self.show(c[0], env, ADD)} {op} "
                    f"{self.show(c[1], env, TENSOR)}", ADD)
        if h is Head.LOLLI:
            return (f"{self.show(c[0], env, ADD)} -o {self.show(c[1], env)}",
                    LOLLI)
        if h is Head.ID:
            args = " ".join(self.show(x, env, ATOM) for x in c)
            return f"Id {args}", APP
        if h is Head.UA:
            args = " ".join(self.show(x, env, ATOM) for x in c)
            return f"ua {args}", APP
        if h is Head.UNIT_LET:
            return (f"let unit be {self.show(c[0], env)} in "
                    f"{self.show(c[1], env)}", EXPR)
        if h is Head.L_LET:
            inner = env.bind(e.names[0])
            return (f"let {inner.names[-1]} be {self.show(c[0], env)} in "
                    f"{self.show(c[1], inner)}", EXPR)
        if h is Head.SQ_LET:
            inner = env.bind(e.names[0]).bind_lin(e.names[1])
            return (f"let {inner.names[-1]}, {inner.lin[e.names[1]]} be "
                    f"{self.show(c[0], env)} in {self.show(c[1], inner)}",
                    EXPR)
        if h is Head.TEN_LET:
            inner = env.bind_lin(e.names[0]).bind_lin(e.names[1])
            u, v = inner.lin[e.names[0]], inner.lin[e.names[1]]
            return (f"let {u} * {v} be {self.show(c[0], env)} in "
                    f"{self.show(c[1], inner)}", EXPR)
        if h is Head.PLUS_CASE:
            left = env.bind_lin(e.names[0])
            right = env.bind_lin(e.names[1])
            return (f"case {self.show(c[0], env, ARROW)} of "
                    f"inl {left.lin[e.names[0]]} => "
                    f"{self.show(c[1], left, ARROW)} | "
                    f"inr {right.lin[e.names[1]]} => "
                    f"{self.show(c[2], right)}", EXPR)
        if h in (Head.SIG_ELIM1, Head.SIG_ELIM2, Head.ID_ELIM1,
                 Head.ID_ELIM2):
            return self._elim(e, env), APP
        raise ValueError(f"cannot print {h}")

    def _unbox(self, e: Expr, env: _Env):
        inner = e.children[0]
        head, args = _spine(inner)
        if head.head is Head.CART_VAR:
            k = env.global_params(head.index)
            if k is not None and k == len(args):
                if not args:
                    return env.var(head.index), ATOM
                shown = " ".join(self.show(a, env, ATOM) for a in args)
                return f"{env.var(head.index)} {shown}", APP
        return f"unsig {self.show(inner, env, ATOM)}", APP

    def _elim(self, e: Expr, env: _Env) -> str:
        h, c, names = e.head, e.children, e.names
        sigma = h in (Head.SIG_ELIM1, Head.SIG_ELIM2)
        word = {
            Head.SIG_ELIM1: "split1",
            Head.SIG_ELIM2: "split2",
            Head.ID_ELIM1: "J1",
            Head.ID_ELIM2: "J2"
        }[h]
        n_motive = 1 if sigma else 3
        motive_env = env
        for n in names[:n_motive]:
            motive_env = motive_env.bind(n)
        branch_env = env
        for n in names[n_motive:]:
            branch_env = branch_env.bind(n)
        motive_names = " ".join(motive_env.names[len(env.names):])
        branch_names = " ".join(branch_env.names[len(env.names):])
        text = (f"{word} ({motive_names} . {self.show(c[0], motive_env)}) "
                f"({branch_names} . {self.show(c[1], branch_env)}) "
                f"{self.show(c[2], env, ATOM)}")
        if e.captured:
            zone_env = branch_env if sigma else motive_env
            groups = " ".join(
                f"({env.lin.get(slot, slot)} : {self.show(t, zone_env)})"
                for slot, t in zip(e.captured, c[3:]))
            text += f" with {groups}"
        return text


def pretty(e: Expr,
           ctx: Optional[Ctx] = None,
           lin_globals: Optional[Dict[str, int]] = None) -> str:
    """Surface text for ``e`` with the names of ``ctx`` in scope."""
    ctx = ctx or Ctx()
    slots = free_lin_slots(e) | bound_lin_slots(e)
    env = _Env(ctx.names(), {s: s for s, _ in ctx.lin}, lin_globals or {},
               slots)
    return _Printer().show(e, env)


def _telescope(ctx: Ctx, start: int, lin_globals, reserved) -> str:
    printer = _Printer()
    env = _Env(ctx.names()[:start], {}, lin_globals, reserved)
    groups = []
    for entry in ctx.cart[start:]:
        groups.append(f"{entry.name} : {printer.show(entry.type, env)}")
        env.names.append(entry.name)
    lin_groups = [f"{s} : {printer.show(t, env)}" for s, t in ctx.lin]
    if not groups and not lin_groups:
        return ""
    text = ", ".join(groups)
    if lin_groups:
        text += (" ; " if text else "; ") + ", ".join(lin_groups)
    return f" ({text})"


def pretty_decl(d: ResolvedDecl,
                lin_globals: Optional[Dict[str, int]] = None) -> str:
    """One declaration as surface text, terminated by ``;``."""
    if d.judgment is None:
        return f"pragma {d.name};"
    lin_globals = lin_globals if lin_globals is not None else {}
    j = d.judgment
    ctx = j.ctx
    reserved = set()
    for s in j.subjects:
        reserved |= free_lin_slots(s) | bound_lin_slots(s)
    tele = _telescope(ctx, d.n_globals, lin_globals, reserved)

    def show(e):
        return pretty(e, ctx, lin_globals)

    if j.kind in (JudgmentKind.CART_TYPE_OK, JudgmentKind.LIN_TYPE_OK):
        universe = "U" if j.kind is JudgmentKind.CART_TYPE_OK else "L"
        body, annotation = show(j.subjects[0]), universe
    elif j.kind in (JudgmentKind.CART_EQ, JudgmentKind.LIN_EQ):
        lhs, rhs, t = j.subjects
        return f"checkeq{tele} {show(lhs)} == {show(rhs)} : {show(t)};"
    else:
        body, annotation = show(j.subjects[0]), show(j.subjects[1])
    if d.kind == "def":
        return f"def {d.name}{tele} : {annotation} := {body};"
    return f"check{tele} {body} : {annotation};"


def pretty_file(decls: List[ResolvedDecl]) -> str:
    """Print a whole resolved file so that it resolves back to itself."""
    lin_globals: Dict[str, int] = {}
    lines = []
    for d in decls:
        lines.append(pretty_decl(d, lin_globals))
        if d.kind == "def" and d.judgment is not None and (
                d.judgment.kind is JudgmentKind.LIN_TERM_HAS_TYPE):
            lin_globals[d.name] = len(d.judgment.ctx.cart) - d.n_globals
    return "\n".join(lines) + "\n"
