"""Surface syntax: grammar, parse tree visitor and name resolution.

``parse`` turns ``.ldtt`` source into ``SurfaceDecl`` values; ``resolve``
elaborates them to core judgments, choosing constructors by the sort of
the pieces (application of a linear term to a cartesian one is ``SqApp``,
and so on) and replacing names by de Bruijn indices and slot-ids.
"""
from contextlib import contextmanager
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Iterator, List, NamedTuple, Optional, Tuple
import re

from arpeggio import (EOF, NoMatch, OneOrMore, Optional as Opt, ParserPython,
                      PTNodeVisitor, ZeroOrMore, visit_parse_tree)
from arpeggio import RegExMatch as _

from ldtt.config import PRAGMAS
from ldtt.errors import (DuplicateLinearName, DuplicateName, LdttError,
                         LexError, LinearVarInType, ParseError, SortMismatch,
                         UnboundName)
from ldtt.substitution import fresh_slot, instantiate_many
from ldtt.syntax import (CE, CT, LE, LT, TOP_INTRO, TOP_TY, UNIT_I,
                         UNIT_INTRO, UNIV_L, UNIV_U, ZERO_TY, CartEntry, Ctx,
                         Expr, Head, Judgment, JudgmentKind, Sort, arrow,
                         cvar, lam, lin_lam, lolli, lvar, mty, node, pi,
                         shift, sort_of, times)

KEYWORDS = (
    "def", "checkeq", "check", "pragma", "let", "be", "in", "case", "of",
    "inl", "inr", "Pi", "Sigma", "cap", "sub", "U", "L", "El", "Lt", "Mt",
    "lift", "sig", "unsig", "refl", "Id", "pr1", "pr2", "fst", "snd",
    "absurd", "top", "unit", "Unit", "I", "Top", "Zero", "split1", "split2",
    "J1", "J2", "with", "ua")

UNARY = ("pr1", "pr2", "fst", "snd", "inl", "inr", "absurd", "El", "Lt",
         "Mt", "lift", "unsig", "sig", "refl")

_WORD_END = r"(?![A-Za-z0-9_'])"
_IDENT_RE = r"(?!(?:%s)%s)[A-Za-z_][A-Za-z0-9_']*" % ("|".join(KEYWORDS),
                                                      _WORD_END)
_LEGAL_CHARS = re.compile(r"[A-Za-z0-9_'\s\\().,:;=<>*&|+\-]*")

DECL_KINDS = ("def", "check", "eq-check", "flag")


@dataclass(frozen=True)
class SourceSpan:
    file: str
    start: int
    end: int
    line: int
    col: int

    def __str__(self) -> str:
        return f"{self.file}:{self.line}:{self.col}"


@dataclass(frozen=True)
class Surface:
    """A surface expression node; ``args`` depend on ``tag``."""
    tag: str
    args: Tuple[Any, ...]
    span: Optional[SourceSpan] = None


@dataclass(frozen=True)
class Param:
    name: str
    type: Surface
    linear: bool
    span: Optional[SourceSpan] = None


@dataclass(frozen=True)
class SurfaceDecl:
    name: str
    kind: str
    params: Tuple[Param, ...] = ()
    body: Optional[Surface] = None
    expected: Optional[Surface] = None
    rhs: Optional[Surface] = None
    span: Optional[SourceSpan] = None


# grammar


def _kw(word):
    return _(word + _WORD_END)


def comment():
    return _(r"--[^\n]*")


def ident():
    return _(_IDENT_RE)


def decl_file():
    return ZeroOrMore(decl), EOF


def decl():
    return [def_decl, checkeq_decl, check_decl, pragma_decl]


def def_decl():
    return _kw("def"), ident, ZeroOrMore(tele), ":", expr, ":=", expr, ";"


def check_decl():
    return _kw("check"), ZeroOrMore(tele), expr, ":", expr, ";"


def checkeq_decl():
    return (_kw("checkeq"), ZeroOrMore(tele), expr, "==", expr, ":", expr,
            ";")


def pragma_decl():
    return _kw("pragma"), pragma_name, ";"


def pragma_name():
    return [_kw("ua"), ident]


def tele():
    return "(", Opt(cart_groups), Opt(";", Opt(lin_groups)), ")"


def cart_groups():
    return group, ZeroOrMore(",", group)


def lin_groups():
    return group, ZeroOrMore(",", group)


def group():
    return OneOrMore(ident), ":", expr


def expr():
    return [lam_expr, binder_expr, let_expr, case_expr, arrow_expr]


def binder_group():
    return "(", OneOrMore(ident), ":", expr, ")"


def lam_expr():
    return "\\", OneOrMore(binder_group), ".", expr


def binder_kw():
    return [_kw("Pi"), _kw("Sigma"), _kw("cap"), _kw("sub")]


def binder_expr():
    return binder_kw, OneOrMore(binder_group), ".", expr


def let_expr():
    return [let_unit, let_tensor, let_pair, let_plain]


def let_unit():
    return _kw("let"), _kw("unit"), _kw("be"), expr, _kw("in"), expr


def let_tensor():
    return (_kw("let"), ident, "*", ident, _kw("be"), expr, _kw("in"), expr)


def let_pair():
    return (_kw("let"), ident, ",", ident, _kw("be"), expr, _kw("in"), expr)


def let_plain():
    return _kw("let"), ident, _kw("be"), expr, _kw("in"), expr


def case_expr():
    return (_kw("case"), expr, _kw("of"), _kw("inl"), ident, "=>", expr, "|",
            _kw("inr"), ident, "=>", expr)


def arrow_expr():
    return lolli_expr, Opt("->", expr)


def lolli_expr():
    return add_expr, Opt("-o", expr)


def add_op():
    return ["&", "(+)"]


def add_expr():
    return tensor_expr, ZeroOrMore(add_op, tensor_expr)


def tensor_expr():
    return spine, ZeroOrMore("*", spine)


def spine():
    return head, ZeroOrMore(atom)


def head():
    return [elim_form, prefix_form, atom]


def unary_kw():
    return [_kw(word) for word in UNARY]


def prefix_form():
    return [id_form, ua_form, unary_form]


def unary_form():
    return unary_kw, atom


def id_form():
    return _kw("Id"), atom, atom, atom


def ua_form():
    return _kw("ua"), atom, atom, atom, atom, atom, atom, atom


def elim_kw():
    return [_kw("split1"), _kw("split2"), _kw("J1"), _kw("J2")]


def motive():
    return "(", OneOrMore(ident), ".", expr, ")"


def zone_annot():
    return _kw("with"), OneOrMore(binder_group)


def elim_form():
    return elim_kw, motive, motive, atom, Opt(zone_annot)


def atom():
    return [paren_pair, paren_expr, with_pair, constant, ident]


def paren_pair():
    return "(", expr, ",", expr, ")"


def paren_expr():
    return "(", expr, ")"


def with_pair():
    return "<", expr, ",", expr, ">"


def constant():
    return [
        _kw("U"),
        _kw("L"),
        _kw("Unit"),
        _kw("I"),
        _kw("Top"),
        _kw("Zero"),
        _kw("unit"),
        _kw("top")
    ]


_PARSER = None


def _parser() -> ParserPython:
    global _PARSER
    if _PARSER is None:
        _PARSER = ParserPython(decl_file, comment)
    return _PARSER


# parse tree to surface values


class _Kw(NamedTuple):
    word: str


class _Groups(NamedTuple):
    linear: bool
    groups: Tuple["_Group", ...]


class _Name(NamedTuple):
    text: str
    span: SourceSpan


class _Group(NamedTuple):
    names: Tuple[_Name, ...]
    type: Surface


class _Motive(NamedTuple):
    names: Tuple[_Name, ...]
    body: Surface


class _Zone(NamedTuple):
    groups: Tuple[_Group, ...]


def _line_col(source: str, pos: int) -> Tuple[int, int]:
    line = source.count("\n", 0, pos) + 1
    col = pos - (source.rfind("\n", 0, pos) + 1) + 1
    return line, col


def _objects(children) -> List[Any]:
    return [c for c in children if not isinstance(c, str)]


class _SurfaceVisitor(PTNodeVisitor):
    def __init__(self, source: str, file: str) -> None:
        super().__init__(defaults=True)
        self.source = source
        self.file = file

    def span(self, node) -> SourceSpan:
        line, col = _line_col(self.source, node.position)
        return SourceSpan(self.file, node.position, node.position_end, line,
                          col)

    def _word(self, node, children) -> _Kw:
        words = [c for c in children if isinstance(c, str)]
        return _Kw(words[0] if words else node.flat_str().strip())

    visit_binder_kw = _word
    visit_unary_kw = _word
    visit_elim_kw = _word
    visit_add_op = _word
    visit_constant = _word

    def visit_ident(self, node, children):
        return _Name(node.flat_str().strip(), self.span(node))

    visit_pragma_name = visit_ident

    def visit_decl_file(self, node, children):
        return _objects(children)

    def _tele(self, children) -> List[Param]:
        params = []
        for groups in children:
            if not isinstance(groups, _Groups):
                continue
            for names, type_ in groups.groups:
                params.extend(
                    Param(n.text, type_, groups.linear, n.span)
                    for n in names)
        return params

    def visit_tele(self, node, children):
        return tuple(self._tele(children))

    def _groups(self, children, linear):
        return _Groups(
            linear, tuple(g for g in children if isinstance(g, _Group)))

    def visit_cart_groups(self, node, children):
        return self._groups(children, False)

    def visit_lin_groups(self, node, children):
        return self._groups(children, True)

    def visit_group(self, node, children):
        objs = _objects(children)
        names = tuple(o for o in objs if isinstance(o, _Name))
        return _Group(names, objs[-1])

    visit_binder_group = visit_group

    def _params(self, objs) -> Tuple[Param, ...]:
        params: List[Param] = []
        for o in objs:
            if isinstance(o, tuple) and all(isinstance(p, Param) for p in o):
                params.extend(o)
        return tuple(params)

    def visit_def_decl(self, node, children):
        objs = _objects(children)
        name = objs[0]
        return SurfaceDecl(
            name.text,
            "def",
            self._params(objs[1:-2]),
            body=objs[-1],
            expected=objs[-2],
            span=self.span(node))

    def visit_check_decl(self, node, children):
        objs = _objects(children)
        span = self.span(node)
        return SurfaceDecl(
            f"check@{span.line}",
            "check",
            self._params(objs[:-2]),
            body=objs[-2],
            expected=objs[-1],
            span=span)

    def visit_checkeq_decl(self, node, children):
        objs = _objects(children)
        span = self.span(node)
        return SurfaceDecl(
            f"checkeq@{span.line}",
            "eq-check",
            self._params(objs[:-3]),
            body=objs[-3],
            rhs=objs[-2],
            expected=objs[-1],
            span=span)

    def visit_pragma_decl(self, node, children):
        # a bare keyword (ua) arrives as a plain string
        names = [c.text for c in children if isinstance(c, _Name)]
        name = names[0] if names else "ua"
        return SurfaceDecl(name, "flag", span=self.span(node))

    def _binders(self, objs):
        return tuple((tuple(n.text for n in g.names), g.type)
                     for g in objs if isinstance(g, _Group))

    def visit_lam_expr(self, node, children):
        objs = _objects(children)
        return Surface("lam", (self._binders(objs[:-1]), objs[-1]),
                       self.span(node))

    def visit_binder_expr(self, node, children):
        objs = _objects(children)
        return Surface("bind",
                       (objs[0].word, self._binders(objs[1:-1]), objs[-1]),
                       self.span(node))

    def _let(self, node, children, kind):
        objs = _objects(children)
        names = tuple(o.text for o in objs if isinstance(o, _Name))
        value, body = [o for o in objs if isinstance(o, Surface)]
        return Surface("let", (kind, names, value, body), self.span(node))

    def visit_let_unit(self, node, children):
        return self._let(node, children, "unit")

    def visit_let_tensor(self, node, children):
        return self._let(node, children, "tensor")

    def visit_let_pair(self, node, children):
        return self._let(node, children, "pair")

    def visit_let_plain(self, node, children):
        return self._let(node, children, "plain")

    def visit_case_expr(self, node, children):
        objs = _objects(children)
        scrut, u, left, v, right = objs
        return Surface("case", (scrut, u.text, left, v.text, right),
                       self.span(node))

    def _binary(self, node, children, tag):
        objs = _objects(children)
        if len(objs) == 1:
            return objs[0]
        return Surface(tag, (objs[0], objs[1]), self.span(node))

    def visit_arrow_expr(self, node, children):
        return self._binary(node, children, "arrow")

    def visit_lolli_expr(self, node, children):
        return self._binary(node, children, "lolli")

    def visit_add_expr(self, node, children):
        objs = _objects(children)
        out = objs[0]
        for i in range(1, len(objs), 2):
            tag = "with" if objs[i].word == "&" else "plus"
            out = Surface(tag, (out, objs[i + 1]), self.span(node))
        return out

    def visit_tensor_expr(self, node, children):
        objs = _objects(children)
        out = objs[0]
        for other in objs[1:]:
            out = Surface("tensor", (out, other), self.span(node))
        return out

    def visit_spine(self, node, children):
        objs = _objects(children)
        out = objs[0]
        for arg in objs[1:]:
            out = Surface("app", (out, arg), self.span(node))
        return out

    def visit_unary_form(self, node, children):
        kw, arg = _objects(children)
        return Surface("unary", (kw.word, arg), self.span(node))

    def visit_id_form(self, node, children):
        return Surface("id", tuple(_objects(children)), self.span(node))

    def visit_ua_form(self, node, children):
        return Surface("ua", tuple(_objects(children)), self.span(node))

    def visit_motive(self, node, children):
        objs = _objects(children)
        return _Motive(tuple(o for o in objs if isinstance(o, _Name)),
                       objs[-1])

    def visit_zone_annot(self, node, children):
        return _Zone(tuple(g for g in children if isinstance(g, _Group)))

    def visit_elim_form(self, node, children):
        objs = _objects(children)
        kw, mot, branch, principal = objs[:4]
        zone = objs[4].groups if len(objs) > 4 else ()
        zone = tuple((n.text, t) for names, t in zone for n in names)
        return Surface(
            "elim", (kw.word, tuple(n.text for n in mot.names), mot.body,
                     tuple(n.text for n in branch.names), branch.body,
                     principal, zone), self.span(node))

    def visit_paren_pair(self, node, children):
        a, b = _objects(children)
        return Surface("pair", (a, b), self.span(node))

    def visit_paren_expr(self, node, children):
        return _objects(children)[0]

    def visit_with_pair(self, node, children):
        a, b = _objects(children)
        return Surface("wpair", (a, b), self.span(node))

    def visit_atom(self, node, children):
        objs = _objects(children)
        obj = objs[0]
        if isinstance(obj, _Name):
            return Surface("var", (obj.text, ), obj.span)
        if isinstance(obj, _Kw):
            return Surface("const", (obj.word, ), self.span(node))
        return obj


def _check_characters(source: str, file: str) -> None:
    for lineno, line in enumerate(source.split("\n"), start=1):
        code = line.split("--", 1)[0]
        legal = _LEGAL_CHARS.match(code).end()
        if legal < len(code):
            start = sum(len(x) + 1
                        for x in source.split("\n")[:lineno - 1]) + legal
            raise LexError(
                f"unexpected character {code[legal]!r}",
                span=SourceSpan(file, start, start + 1, lineno, legal + 1))


def _expected_names(err: NoMatch) -> List[str]:
    names = []
    for rule in getattr(err, "rules", []) or []:
        name = getattr(rule, "to_match", None) or getattr(
            rule, "rule_name", "") or str(rule)
        names.append(str(name).split("(?!")[0] or str(rule))
    return names


def parse(source: str, file: str = "<string>") -> List[SurfaceDecl]:
    """Parse a whole ``.ldtt`` file.

    Raises:
        LexError: a character outside the surface alphabet.
        ParseError: the text does not match the grammar.
    """
    _check_characters(source, file)
    try:
        tree = _parser().parse(source)
    except NoMatch as err:
        pos = err.position
        line, col = _line_col(source, pos)
        expected = _expected_names(err)
        raise ParseError(
            f"expected one of {sorted(set(expected))}",
            expected=expected,
            span=SourceSpan(file, pos, pos, line, col)) from None
    return visit_parse_tree(tree, _SurfaceVisitor(source, file))


def parse_file(path) -> List[SurfaceDecl]:
    path = Path(path)
    with open(path, "r", encoding="utf-8") as f:
        return parse(f.read(), str(path))


# resolution


class ResolvedDecl(NamedTuple):
    name: str
    judgment: Optional[Judgment]
    kind: str
    pragma: Optional[str] = None
    span: Optional[SourceSpan] = None
    entry: Optional[CartEntry] = None
    n_globals: int = 0
    linear_params: int = 0


@dataclass
class _Binding:
    name: str
    kind: str  # "cart", "lin" or "macro"
    slot: Optional[str] = None
    lin_params: Optional[int] = None
    macro: Optional[Tuple[int, Expr, int]] = None


_CONSTANTS = {
    "U": UNIV_U,
    "L": UNIV_L,
    "Unit": UNIT_I,
    "I": UNIT_I,
    "Top": TOP_TY,
    "Zero": ZERO_TY,
    "unit": UNIT_INTRO,
    "top": TOP_INTRO,
}

_UNARY_HEADS = {
    "pr1": Head.PR1,
    "pr2": Head.PR2,
    "fst": Head.WITH_FST,
    "snd": Head.WITH_SND,
    "inl": Head.INL,
    "inr": Head.INR,
    "absurd": Head.ZERO_ELIM,
    "El": Head.EL,
    "Lt": Head.L_TY,
    "Mt": Head.M_TY,
    "lift": Head.L_INTRO,
    "sig": Head.M_INTRO,
    "unsig": Head.M_ELIM,
    "refl": Head.REFL,
}


class Resolver:
    """Elaborates surface declarations against a growing signature."""

    def __init__(self) -> None:
        self.ctx = Ctx()
        self.bindings: List[_Binding] = []
        self.in_type = False
        self._slots: set = set()

    # scope handling

    @contextmanager
    def _scope(self) -> Iterator[None]:
        ctx, n, in_type = self.ctx, len(self.bindings), self.in_type
        try:
            yield
        finally:
            self.ctx, self.in_type = ctx, in_type
            del self.bindings[n:]

    @contextmanager
    def _type_position(self) -> Iterator[None]:
        saved = self.in_type
        self.in_type = True
        try:
            yield
        finally:
            self.in_type = saved

    def _push_cart(self, name: str, type_: Expr) -> None:
        self.ctx = self.ctx.extend(name, type_)
        self.bindings.append(_Binding(name, "cart"))

    def _push_lin(self, name: str, type_: Expr) -> str:
        slot = fresh_slot(name, self._slots)
        self._slots.add(slot)
        self.ctx = self.ctx.extend_lin(slot, type_)
        self.bindings.append(_Binding(name, "lin", slot=slot))
        return slot

    def _lookup(self, name: str, span) -> Tuple[_Binding, Optional[int]]:
        index = 0
        for b in reversed(self.bindings):
            if b.name == name:
                return b, (index if b.kind == "cart" else None)
            if b.kind == "cart":
                index += 1
        raise UnboundName(f"unbound name '{name}'", span=span)

    def _sort(self, e: Expr) -> Sort:
        return sort_of(e, self.ctx)

    # expressions

    def elaborate(self, s: Surface) -> Expr:
        try:
            return self._elab(s)
        except LdttError as err:
            raise err.with_span(s.span)

    def _elab_type(self, s: Surface) -> Expr:
        with self._type_position():
            return self.elaborate(s)

    def _elab(self, s: Surface) -> Expr:
        tag, args = s.tag, s.args
        if tag in ("var", "app"):
            return self._spine(s, boxed=False)
        if tag == "const":
            return _CONSTANTS[args[0]]
        if tag == "lam":
            return self._lam(args[0], args[1])
        if tag == "bind":
            return self._binder(args[0], args[1], args[2])
        if tag in ("arrow", "lolli", "tensor", "with", "plus"):
            return self._binary(tag, self.elaborate(args[0]),
                                self.elaborate(args[1]))
        if tag == "pair":
            a, b = self.elaborate(args[0]), self.elaborate(args[1])
            head = Head.SQ_PAIR if self._sort(b) is LE else Head.PAIR_C
            return self._checked(node(head, a, b))
        if tag == "wpair":
            return self._checked(
                node(Head.WITH_PAIR, self.elaborate(args[0]),
                     self.elaborate(args[1])))
        if tag == "unary":
            word, arg = args
            if word == "unsig":
                inner = self._spine(arg, boxed=True) if arg.tag in (
                    "var", "app") else self.elaborate(arg)
            elif word in ("El", "Lt", "Mt"):
                inner = self._elab_type(arg)
            else:
                inner = self.elaborate(arg)
            return self._checked(node(_UNARY_HEADS[word], inner))
        if tag == "id":
            with self._type_position():
                return self._checked(
                    node(Head.ID, *(self.elaborate(a) for a in args)))
        if tag == "ua":
            return self._checked(
                node(Head.UA, *(self.elaborate(a) for a in args)))
        if tag == "let":
            return self._let(*args)
        if tag == "case":
            return self._case(*args)
        if tag == "elim":
            return self._elim(*args)
        raise ParseError(f"unknown surface form '{tag}'", span=s.span)

    def _checked(self, e: Expr) -> Expr:
        self._sort(e)
        return e

    def _spine(self, s: Surface, boxed: bool) -> Expr:
        args: List[Surface] = []
        while s.tag == "app":
            args.append(s.args[1])
            s = s.args[0]
        args.reverse()
        if s.tag != "var":
            f = self.elaborate(s)
            return self._apply_all(f, args)
        name = s.args[0]
        binding, index = self._lookup(name, s.span)
        if binding.kind == "lin":
            if self.in_type:
                raise LinearVarInType(
                    f"linear variable '{name}' used inside a type",
                    span=s.span)
            return self._apply_all(lvar(binding.slot), args)
        if binding.kind == "macro":
            k, body, depth = binding.macro
            if len(args) < k:
                raise SortMismatch(
                    f"type definition '{name}' expects {k} arguments",
                    span=s.span)
            actual = [self.elaborate(a) for a in args[:k]]
            expanded = instantiate_many(
                shift(body, k, len(self.ctx.cart) - (depth - k)), actual)
            return self._apply_all(expanded, args[k:])
        f = cvar(index)
        k = binding.lin_params
        if k is None or boxed:
            return self._apply_all(f, args)
        if len(args) < k:
            raise SortMismatch(
                f"linear definition '{name}' expects {k} cartesian "
                f"arguments", span=s.span)
        for a in args[:k]:
            f = node(Head.APP, f, self.elaborate(a))
        return self._apply_all(node(Head.M_ELIM, f), args[k:])

    def _apply_all(self, f: Expr, args: List[Surface]) -> Expr:
        for a_surface in args:
            a = self.elaborate(a_surface)
            sf, sa = self._sort(f), self._sort(a)
            if sf is CE and sa is CE:
                f = node(Head.APP, f, a)
            elif sf is LE and sa is CE:
                f = node(Head.SQ_APP, f, a)
            elif sf is LE and sa is LE:
                f = node(Head.LIN_APP, f, a)
            else:
                raise SortMismatch(f"cannot apply a {sf} to a {sa}",
                                   span=a_surface.span)
        return f

    def _bind_group_names(self, binders):
        for names, type_surface in binders:
            for name in names:
                yield name, type_surface

    def _lam(self, binders, body_surface) -> Expr:
        with self._scope():
            pushed = []
            for name, type_surface in self._bind_group_names(binders):
                type_ = self._elab_type(type_surface)
                sort = self._sort(type_)
                if sort is CT:
                    self._push_cart(name, type_)
                    pushed.append(("cart", name, type_))
                elif sort is LT:
                    slot = self._push_lin(name, type_)
                    pushed.append(("lin", slot, type_))
                else:
                    raise SortMismatch(f"binder '{name}' needs a type",
                                       span=type_surface.span)
            body = self.elaborate(body_surface)
            sort = self._sort(body)
        for kind, name, type_ in reversed(pushed):
            if kind == "lin":
                body, sort = lin_lam(type_, body, name), LE
                continue
            head = Head.LAM if sort is CE else Head.SQ_LAM
            body = node(head, type_, body, names=(name, ))
        return body

    def _binder(self, word, binders, body_surface) -> Expr:
        head = {
            "Pi": Head.PI,
            "Sigma": Head.SIGMA,
            "cap": Head.SQCAP,
            "sub": Head.SQSUBSET
        }[word]
        with self._scope():
            pushed = []
            for name, type_surface in self._bind_group_names(binders):
                type_ = self._elab_type(type_surface)
                if self._sort(type_) is not CT:
                    raise SortMismatch(
                        f"{word} binder '{name}' needs a cartesian type",
                        span=type_surface.span)
                self._push_cart(name, type_)
                pushed.append((name, type_))
            body = self._elab_type(body_surface)
            want = CT if head in (Head.PI, Head.SIGMA) else LT
            if self._sort(body) is not want:
                raise SortMismatch(f"body of {word} must be a {want}",
                                   span=body_surface.span)
        for name, type_ in reversed(pushed):
            body = node(head, type_, body, names=(name, ))
        return body

    def _binary(self, tag: str, a: Expr, b: Expr) -> Expr:
        sa, sb = self._sort(a), self._sort(b)
        if tag == "arrow" and sa is CT and sb is CT:
            return arrow(a, b)
        if tag == "lolli" and sa is LT and sb is LT:
            return lolli(a, b)
        if tag == "tensor":
            if sa is CT and sb is CT:
                return times(a, b)
            if sa is LT and sb is LT:
                return node(Head.TENSOR, a, b)
            if sa is LE and sb is LE:
                return node(Head.TEN_PAIR, a, b)
        if tag in ("with", "plus") and sa is LT and sb is LT:
            return node(Head.WITH if tag == "with" else Head.PLUS, a, b)
        raise SortMismatch(f"'{tag}' does not apply to a {sa} and a {sb}")

    def _guess(self, e: Expr) -> Optional[Expr]:
        """The declared type of a variable principal, if it has one."""
        if e.head is Head.CART_VAR:
            return self.ctx.type_of(e.index)
        if e.head is Head.LIN_VAR:
            return self.ctx.lin_type(e.slot)
        return None

    def _let(self, kind, names, value_surface, body_surface) -> Expr:
        t = self.elaborate(value_surface)
        guess = self._guess(t)
        with self._scope():
            if kind == "unit":
                return node(Head.UNIT_LET, t, self.elaborate(body_surface))
            if kind == "plain":
                a = guess.children[0] if guess is not None and (
                    guess.head is Head.L_TY) else UNIV_U
                self._push_cart(names[0], a)
                body = self.elaborate(body_surface)
                return node(Head.L_LET, t, body, names=names)
            if kind == "pair":
                a, b = UNIV_U, UNIT_I
                if guess is not None and guess.head is Head.SQSUBSET:
                    a, b = guess.children
                self._push_cart(names[0], a)
                slot = self._push_lin(names[1], b)
                body = self.elaborate(body_surface)
                return node(
                    Head.SQ_LET, t, body, names=(names[0], slot))
            a, b = UNIT_I, UNIT_I
            if guess is not None and guess.head is Head.TENSOR:
                a, b = guess.children
            su = self._push_lin(names[0], a)
            sv = self._push_lin(names[1], b)
            body = self.elaborate(body_surface)
            return node(Head.TEN_LET, t, body, names=(su, sv))

    def _case(self, scrut_surface, u, left_surface, v,
              right_surface) -> Expr:
        t = self.elaborate(scrut_surface)
        guess = self._guess(t)
        a, b = UNIT_I, UNIT_I
        if guess is not None and guess.head is Head.PLUS:
            a, b = guess.children
        with self._scope():
            su = self._push_lin(u, a)
            left = self.elaborate(left_surface)
        with self._scope():
            sv = self._push_lin(v, b)
            right = self.elaborate(right_surface)
        return node(Head.PLUS_CASE, t, left, right, names=(su, sv))

    def _elim(self, word, motive_names, motive_surface, branch_names,
              branch_surface, principal_surface, zone) -> Expr:
        principal = self.elaborate(principal_surface)
        guess = self._guess(principal)
        sigma_elim = word.startswith("split")
        linear = word in ("split2", "J2")
        want_motive, want_branch = (LT, LE) if linear else (CT, CE)
        n_motive = 1 if sigma_elim else 3
        n_branch = 2 if sigma_elim else 1
        if len(motive_names) != n_motive or len(branch_names) != n_branch:
            raise ParseError(
                f"{word} binds {n_motive} motive and {n_branch} branch "
                f"variables", span=principal_surface.span)
        if zone and not linear:
            raise ParseError(f"{word} takes no zone annotation",
                             span=principal_surface.span)
        if sigma_elim:
            s_type = guess if guess is not None else UNIV_U
            a, b = UNIV_U, UNIV_U
            if guess is not None and guess.head is Head.SIGMA:
                a, b = guess.children
            motive_binders = [(motive_names[0], s_type)]
            branch_binders = [(branch_names[0], a), (branch_names[1], b)]
            zone_binders = branch_binders
            head = Head.SIG_ELIM2 if linear else Head.SIG_ELIM1
        else:
            a = UNIV_U
            if guess is not None and guess.head is Head.ID:
                a = guess.children[0]
            motive_binders = [
                (motive_names[0], a), (motive_names[1], shift(a, 0, 1)),
                (motive_names[2],
                 node(Head.ID, shift(a, 0, 2), cvar(1), cvar(0)))
            ]
            branch_binders = [(branch_names[0], a)]
            zone_binders = motive_binders
            head = Head.ID_ELIM2 if linear else Head.ID_ELIM1
        with self._scope():
            for name, t in motive_binders:
                self._push_cart(name, t)
            motive = self._elab_type(motive_surface)
            if self._sort(motive) is not want_motive:
                raise SortMismatch(f"motive of {word} must be a "
                                   f"{want_motive}",
                                   span=motive_surface.span)
        with self._scope():
            for name, t in branch_binders:
                self._push_cart(name, t)
            branch = self.elaborate(branch_surface)
        captured = []
        zone_types = []
        for slot_name, type_surface in zone:
            binding, _ = self._lookup(slot_name, principal_surface.span)
            if binding.kind != "lin":
                raise SortMismatch(
                    f"'{slot_name}' is not a linear variable",
                    span=type_surface.span)
            captured.append(binding.slot)
            with self._scope():
                for name, t in zone_binders:
                    self._push_cart(name, t)
                zone_types.append(self._elab_type(type_surface))
        names = tuple(motive_names) + tuple(branch_names)
        return self._checked(
            node(head, motive, branch, principal, *zone_types, names=names,
                 captured=captured))

    # declarations

    def _params(self, params) -> Tuple[List[Tuple[str, Expr]], List[str]]:
        cart: List[Tuple[str, Expr]] = []
        lin: List[str] = []
        seen_cart, seen_lin = set(), set()
        for p in params:
            if p.linear:
                if p.name in seen_lin:
                    raise DuplicateLinearName(
                        f"duplicate linear parameter '{p.name}'",
                        span=p.span)
                seen_lin.add(p.name)
                continue
            if p.name in seen_cart:
                raise DuplicateName(f"duplicate parameter '{p.name}'",
                                    span=p.span)
            seen_cart.add(p.name)
            type_ = self._elab_type(p.type)
            if self._sort(type_) is not CT:
                raise SortMismatch(
                    f"parameter '{p.name}' needs a cartesian type",
                    span=p.span)
            self._push_cart(p.name, type_)
            cart.append((p.name, type_))
        for p in params:
            if not p.linear:
                continue
            type_ = self._elab_type(p.type)
            if self._sort(type_) is not LT:
                raise SortMismatch(
                    f"linear parameter '{p.name}' needs a linear type",
                    span=p.span)
            lin.append(self._push_lin(p.name, type_))
        return cart, lin

    def _global_names(self) -> set:
        return {b.name for b in self.bindings}

    def resolve_decl(self, d: SurfaceDecl) -> ResolvedDecl:
        try:
            return self._resolve_decl(d)
        except LdttError as err:
            raise err.with_span(d.span).with_decl(d.name)

    def _resolve_decl(self, d: SurfaceDecl) -> ResolvedDecl:
        if d.kind == "flag":
            if d.name not in PRAGMAS:
                raise ParseError(
                    f"unknown pragma '{d.name}'",
                    expected=PRAGMAS.keys(),
                    span=d.span)
            return ResolvedDecl(d.name, None, "flag", pragma=d.name,
                                span=d.span, n_globals=len(self.ctx.cart))
        if d.kind == "def" and d.name in self._global_names():
            raise DuplicateName(f"'{d.name}' is already defined",
                                span=d.span)
        n_globals = len(self.ctx.cart)
        self._slots = set()
        with self._scope():
            cart, lin = self._params(d.params)
            expected = self._elab_type(d.expected)
            body = self.elaborate(d.body)
            rhs = self.elaborate(d.rhs) if d.rhs is not None else None
            ctx = self.ctx
        body_sort = sort_of(body, ctx)
        if body_sort in (CT, LT):
            kind = (JudgmentKind.CART_TYPE_OK
                    if body_sort is CT else JudgmentKind.LIN_TYPE_OK)
            universe = UNIV_U if body_sort is CT else UNIV_L
            if expected != universe or lin or rhs is not None:
                raise SortMismatch(
                    f"a type must be annotated with "
                    f"{'U' if body_sort is CT else 'L'} and take no "
                    f"linear parameters", span=d.span)
            judgment = Judgment(kind, ctx.without_lin(), (body, ))
            if d.kind == "def":
                self.bindings.append(
                    _Binding(d.name, "macro",
                             macro=(len(cart), body, len(ctx.cart))))
            return ResolvedDecl(d.name, judgment, d.kind, span=d.span,
                                n_globals=n_globals)
        expected_sort = sort_of(expected, ctx)
        if (body_sort, expected_sort) not in ((CE, CT), (LE, LT)):
            raise SortMismatch(f"a {body_sort} cannot have a "
                               f"{expected_sort} as its type", span=d.span)
        if body_sort is CE and lin:
            raise SortMismatch("a cartesian term takes no linear parameters",
                               span=d.span)
        linear = body_sort is LE
        if rhs is not None:
            kind = JudgmentKind.LIN_EQ if linear else JudgmentKind.CART_EQ
            subjects = (body, rhs, expected)
        else:
            kind = (JudgmentKind.LIN_TERM_HAS_TYPE
                    if linear else JudgmentKind.CART_TERM_HAS_TYPE)
            subjects = (body, expected)
        judgment = Judgment(kind, ctx if linear else ctx.without_lin(),
                            subjects)
        entry = None
        if d.kind == "def":
            entry = self._entry(d.name, cart, ctx, body, expected, linear)
            self.ctx = self.ctx.extend(entry.name, entry.type, entry.value)
            self.bindings.append(
                _Binding(
                    d.name,
                    "cart",
                    lin_params=len(cart) if linear else None))
        return ResolvedDecl(
            d.name,
            judgment,
            d.kind,
            span=d.span,
            entry=entry,
            n_globals=n_globals,
            linear_params=len(lin))

    def _entry(self, name, cart, ctx, body, expected, linear) -> CartEntry:
        type_, value = expected, body
        if linear:
            for slot, t in reversed(ctx.lin):
                type_ = lolli(t, type_)
                value = lin_lam(t, value, slot)
            type_, value = mty(type_), node(Head.M_INTRO, value)
        for pname, ptype in reversed(cart):
            type_ = pi(ptype, type_, pname)
            value = lam(ptype, value, pname)
        return CartEntry(name, type_, value)


def resolve(decls: List[SurfaceDecl],
            resolver: Optional[Resolver] = None) -> List[ResolvedDecl]:
    """Resolve a file's declarations in order.

    Raises:
        UnboundName, DuplicateName, DuplicateLinearName, LinearVarInType,
        SortMismatch: with the span and name of the offending declaration.
    """
    resolver = resolver or Resolver()
    return [resolver.resolve_decl(d) for d in decls]


def load(source: str, file: str = "<string>") -> List[ResolvedDecl]:
    return resolve(parse(source, file))


def load_file(path) -> List[ResolvedDecl]:
    return resolve(parse_file(path))
