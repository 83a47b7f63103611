"""The set-indexed families model over GF(p).

A context is interpreted as the finite set of its points ``γ`` (tuples of
values, one per cartesian entry). Cartesian types denote finite sets of
values at each point, linear types denote vector spaces described by a
``Shape`` and linear terms denote matrices from the Kronecker product of
the zone to their type.

Linear terms are evaluated on structured values: a tensor is a formal
sum of pure tensors, a ``-o`` value a Python function, and so on. Since
every linear term is multilinear in its zone, evaluating it on all
tuples of basis vectors and flattening the results through the target
shape gives the columns of its matrix.
"""
from dataclasses import dataclass
from itertools import product
from math import prod
from typing import (Any, Callable, Dict, List, Mapping, Optional, Sequence,
                    Tuple, Union)
import json
import logging

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from ldtt.errors import (IllFormedNode, MissingBasis, ModelUnsupported,
                         SizeOverflow, SortError)
from ldtt.gf import Mat, is_invertible, vectors, zeros
from ldtt.syntax import (Ctx, Expr, Head, Judgment, JudgmentKind, arrow,
                         cvar, lvar, mty, node, shift, sqsubset, tensor)

logger = logging.getLogger(__name__)

DEFAULT_SIZE_CAP = 10_000
DEFAULT_DIM_CAP = 64

# Domain types


@dataclass(frozen=True)
class FinSet:
    size: int
    labels: Optional[Tuple[Any, ...]] = None

    def __post_init__(self):
        if self.size < 0:
            raise ValueError(f"size must be non-negative, got {self.size}")
        if self.labels is not None and len(self.labels) != self.size:
            raise ValueError(f"{len(self.labels)} labels for a set of size "
                             f"{self.size}")

    def __iter__(self):
        return iter(range(self.size))

    def __len__(self) -> int:
        return self.size


@dataclass(frozen=True)
class SetFam:
    base: FinSet
    fibers: Tuple[FinSet, ...]

    def __post_init__(self):
        if len(self.fibers) != self.base.size:
            raise ValueError("a family needs one fiber per base element")

    def fiber(self, i: int) -> FinSet:
        return self.fibers[i]

    def total_size(self) -> int:
        return sum(f.size for f in self.fibers)


@dataclass(frozen=True)
class VecFam:
    base: FinSet
    dims: Tuple[int, ...]

    def __post_init__(self):
        if len(self.dims) != self.base.size:
            raise ValueError("a family needs one dimension per base element")

    def dim(self, i: int) -> int:
        return self.dims[i]


@dataclass(frozen=True)
class LinMorFam:
    base: FinSet
    mats: Tuple[Mat, ...]

    def __post_init__(self):
        if len(self.mats) != self.base.size:
            raise ValueError("a family needs one matrix per base element")

    def __getitem__(self, i: int) -> Mat:
        return self.mats[i]

    def __eq__(self, other) -> bool:
        if not isinstance(other, LinMorFam):
            return NotImplemented
        return self.base == other.base and self.mats == other.mats

    def __hash__(self) -> int:
        return hash((self.base, self.mats))


# Cartesian values


@dataclass(frozen=True)
class SetCode:
    """A code of ``U``: a finite set of the given size."""
    size: int
    name: str = ""


@dataclass(frozen=True)
class VecCode:
    """A code of ``L``: a vector space of the given dimension."""
    dim: int
    name: str = ""


class CartFn:
    """A value of a Pi type."""

    def __init__(self, fn: Callable[[Any], Any]) -> None:
        self.fn = fn

    def __call__(self, arg: Any) -> Any:
        return self.fn(arg)


@dataclass(frozen=True, eq=False)
class Refl:
    point: Any


@dataclass(frozen=True, eq=False)
class MBox:
    """A value of ``Mt B``: a linear value of ``B`` in the empty zone."""
    value: Any


class _Delayed:
    def __init__(self, thunk: Callable[[], Any]) -> None:
        self._thunk = thunk
        self._done = False
        self._value = None

    def force(self) -> Any:
        if not self._done:
            self._value = self._thunk()
            self._done = True
        return self._value


# Linear values


class _Zero:
    def __repr__(self) -> str:
        return "ZERO"


ZERO = _Zero()


@dataclass(frozen=True, eq=False)
class Tens:
    terms: Tuple[Tuple[Any, Any], ...]


@dataclass(frozen=True, eq=False)
class Both:
    """Values of ``&`` and ``(+)``."""
    left: Any
    right: Any


@dataclass(frozen=True, eq=False)
class Free:
    terms: Tuple[Tuple[int, Any], ...]


@dataclass(frozen=True, eq=False)
class DSum:
    terms: Tuple[Tuple[Any, Any], ...]


class LinFn:
    def __init__(self, fn: Callable[[Any], Any]) -> None:
        self.fn = fn

    def __call__(self, arg: Any) -> Any:
        return self.fn(arg)


class Dep(LinFn):
    """A value of a cap type, indexed by cartesian values."""


def _add(v: Any, w: Any, p: int) -> Any:
    if v is ZERO:
        return w
    if w is ZERO:
        return v
    if isinstance(v, int):
        return (v + w) % p
    if isinstance(v, np.ndarray):
        return np.mod(v + w, p)
    if isinstance(v, Tens):
        return Tens(v.terms + w.terms)
    if isinstance(v, Free):
        return Free(v.terms + w.terms)
    if isinstance(v, DSum):
        return DSum(v.terms + w.terms)
    if isinstance(v, Both):
        return Both(_add(v.left, w.left, p), _add(v.right, w.right, p))
    if isinstance(v, Dep):
        return Dep(lambda a: _add(v(a), w(a), p))
    if isinstance(v, LinFn):
        return LinFn(lambda x: _add(v(x), w(x), p))
    raise TypeError(f"cannot add linear values {v!r} and {w!r}")


def _scale(v: Any, c: int, p: int) -> Any:
    c %= p
    if c == 0 or v is ZERO:
        return ZERO
    if c == 1:
        return v
    if isinstance(v, int):
        return (v * c) % p
    if isinstance(v, np.ndarray):
        return np.mod(v * c, p)
    if isinstance(v, Tens):
        return Tens(tuple((_scale(a, c, p), b) for a, b in v.terms))
    if isinstance(v, Free):
        return Free(tuple((k * c % p, x) for k, x in v.terms))
    if isinstance(v, DSum):
        return DSum(tuple((a, _scale(b, c, p)) for a, b in v.terms))
    if isinstance(v, Both):
        return Both(_scale(v.left, c, p), _scale(v.right, c, p))
    if isinstance(v, Dep):
        return Dep(lambda a: _scale(v(a), c, p))
    if isinstance(v, LinFn):
        return LinFn(lambda x: _scale(v(x), c, p))
    raise TypeError(f"cannot scale linear value {v!r}")


def _sum(values, p: int) -> Any:
    out = ZERO
    for v in values:
        out = _add(out, v, p)
    return out


# Shapes: the vector space a linear type denotes at one point


class Shape:
    dim: int = 0

    def __init__(self, p: int) -> None:
        self.p = p

    def flatten(self, v: Any) -> np.ndarray:
        raise NotImplementedError

    def unflatten(self, vec: np.ndarray) -> Any:
        raise NotImplementedError

    def basis(self) -> List[Any]:
        out = []
        for i in range(self.dim):
            e = np.zeros(self.dim, dtype=np.int64)
            e[i] = 1
            out.append(self.unflatten(e))
        return out

    def _zeros(self) -> np.ndarray:
        return np.zeros(self.dim, dtype=np.int64)


class ScalarShape(Shape):
    dim = 1

    def flatten(self, v):
        if v is ZERO:
            return self._zeros()
        return np.array([v % self.p], dtype=np.int64)

    def unflatten(self, vec):
        return int(vec[0]) % self.p


class AtomShape(Shape):
    def __init__(self, p: int, dim: int) -> None:
        super().__init__(p)
        self.dim = dim

    def flatten(self, v):
        if v is ZERO:
            return self._zeros()
        return np.mod(np.asarray(v, dtype=np.int64), self.p)

    def unflatten(self, vec):
        return np.mod(np.asarray(vec, dtype=np.int64), self.p)


class EmptyShape(Shape):
    """``0`` and ``Top``."""

    def flatten(self, v):
        return self._zeros()

    def unflatten(self, vec):
        return ZERO


class TensorShape(Shape):
    def __init__(self, p: int, left: Shape, right: Shape) -> None:
        super().__init__(p)
        self.left, self.right = left, right
        self.dim = left.dim * right.dim

    def flatten(self, v):
        out = self._zeros()
        if v is ZERO:
            return out
        for a, b in v.terms:
            out = out + np.kron(self.left.flatten(a), self.right.flatten(b))
        return np.mod(out, self.p)

    def unflatten(self, vec):
        lb, rb = self.left.basis(), self.right.basis()
        terms = []
        for k in np.nonzero(vec)[0]:
            i, j = divmod(int(k), self.right.dim)
            terms.append((_scale(lb[i], int(vec[k]), self.p), rb[j]))
        return Tens(tuple(terms)) if terms else ZERO


class LolliShape(Shape):
    """``A -o B`` as ``dim B x dim A`` matrices flattened row-major."""

    def __init__(self, p: int, src: Shape, tgt: Shape) -> None:
        super().__init__(p)
        self.src, self.tgt = src, tgt
        self.dim = src.dim * tgt.dim

    def matrix(self, v) -> np.ndarray:
        m = np.zeros((self.tgt.dim, self.src.dim), dtype=np.int64)
        if v is ZERO:
            return m
        for i, e in enumerate(self.src.basis()):
            m[:, i] = self.tgt.flatten(v(e))
        return m

    def flatten(self, v):
        return self.matrix(v).reshape(-1)

    def unflatten(self, vec):
        m = np.asarray(vec, dtype=np.int64).reshape(self.tgt.dim,
                                                    self.src.dim)
        return LinFn(lambda x: self.tgt.unflatten(
            np.mod(m @ self.src.flatten(x), self.p)))


class PairShape(Shape):
    """``A & B`` and ``A (+) B``: both are the direct sum."""

    def __init__(self, p: int, left: Shape, right: Shape) -> None:
        super().__init__(p)
        self.left, self.right = left, right
        self.dim = left.dim + right.dim

    def flatten(self, v):
        if v is ZERO:
            return self._zeros()
        return np.concatenate(
            [self.left.flatten(v.left),
             self.right.flatten(v.right)])

    def unflatten(self, vec):
        k = self.left.dim
        return Both(
            self.left.unflatten(vec[:k]), self.right.unflatten(vec[k:]))


class _Indexed(Shape):
    """A shape with one block per element of a cartesian index set."""

    def __init__(self, p: int, points: Sequence[Any],
                 canon: Callable[[Any], Any]) -> None:
        super().__init__(p)
        self.points = list(points)
        self.canon = canon
        self.index = {canon(a): i for i, a in enumerate(self.points)}

    def position(self, a: Any) -> int:
        return self.index[self.canon(a)]


class FreeShape(_Indexed):
    """``Lt A``: the free vector space on the elements of ``A``."""

    def __init__(self, p, points, canon) -> None:
        super().__init__(p, points, canon)
        self.dim = len(self.points)

    def flatten(self, v):
        out = self._zeros()
        if v is ZERO:
            return out
        for coef, a in v.terms:
            out[self.position(a)] += coef
        return np.mod(out, self.p)

    def unflatten(self, vec):
        terms = tuple((int(vec[i]), self.points[i])
                      for i in np.nonzero(vec)[0])
        return Free(terms) if terms else ZERO


class _Blocks(_Indexed):
    def __init__(self, p, points, canon, fibers: Sequence[Shape]) -> None:
        super().__init__(p, points, canon)
        self.fibers = list(fibers)
        self.offsets = np.cumsum([0] + [f.dim for f in self.fibers])
        self.dim = int(self.offsets[-1])

    def block(self, vec: np.ndarray, i: int) -> np.ndarray:
        return vec[self.offsets[i]:self.offsets[i + 1]]


class CapShape(_Blocks):
    """``cap (x : A). B``: the product of the fibers."""

    def flatten(self, v):
        if v is ZERO or not self.points:
            return self._zeros()
        return np.concatenate(
            [f.flatten(v(a)) for f, a in zip(self.fibers, self.points)])

    def unflatten(self, vec):
        table = [f.unflatten(self.block(vec, i))
                 for i, f in enumerate(self.fibers)]
        return Dep(lambda a: table[self.position(a)])


class SubShape(_Blocks):
    """``sub (x : A). B``: the sum of the fibers."""

    def flatten(self, v):
        out = self._zeros()
        if v is ZERO:
            return out
        for a, b in v.terms:
            i = self.position(a)
            out[self.offsets[i]:self.offsets[i + 1]] += self.fibers[i].flatten(
                b)
        return np.mod(out, self.p)

    def unflatten(self, vec):
        terms = tuple(
            (self.points[i], f.unflatten(self.block(vec, i)))
            for i, f in enumerate(self.fibers) if self.block(vec, i).any())
        return DSum(terms) if terms else ZERO


# Basis assignments


class BasisEntry(BaseModel):
    """How one context entry is interpreted instead of enumerated.

    ``set`` gives a code of ``U``, ``vec`` a code of ``L``; their nested
    list forms (``sets`` and lists in ``vec``) give families indexed by
    the arguments of a Pi-typed entry. ``elem`` fixes an ordinary entry
    to one element of its type.
    """
    model_config = ConfigDict(frozen=True, populate_by_name=True)

    set_size: Optional[int] = Field(default=None, alias="set")
    sets: Optional[List[Any]] = None
    vec: Optional[Union[int, List[Any]]] = None
    elem: Optional[int] = None

    @model_validator(mode="after")
    def _exactly_one(self) -> "BasisEntry":
        given = [
            k for k in ("set_size", "sets", "vec", "elem")
            if getattr(self, k) is not None
        ]
        if len(given) != 1:
            raise ValueError(f"a basis entry needs exactly one of 'set', "
                             f"'sets', 'vec' or 'elem', got {given}")
        return self


Basis = Mapping[str, BasisEntry]


def parse_basis(data: Mapping[str, Any]) -> Dict[str, BasisEntry]:
    if not isinstance(data, Mapping):
        raise TypeError(f"a basis must be a JSON object, got "
                        f"{type(data).__name__}.")
    return {
        name: v if isinstance(v, BasisEntry) else BasisEntry.model_validate(v)
        for name, v in data.items()
    }


def load_basis(path: str) -> Dict[str, BasisEntry]:
    with open(path, "r", encoding="utf-8") as f:
        return parse_basis(json.load(f))


# The interpreter


def _peel_pi(t: Expr) -> Expr:
    while t.head is Head.PI:
        t = t.children[1]
    return t


class FamiliesModel:
    """Evaluation of cartesian and linear terms at the points of a context.

    Parameters
    ----------
    prime : int
      Characteristic of the field.

    size_cap : int
      Largest set (of points, or of elements of a type) that may be
      enumerated.

    dim_cap : int
      Largest dimension a linear type (or a zone) may denote.

    """

    def __init__(self,
                 prime: int = 2,
                 size_cap: int = DEFAULT_SIZE_CAP,
                 dim_cap: int = DEFAULT_DIM_CAP) -> None:
        self.p = prime
        self.size_cap = size_cap
        self.dim_cap = dim_cap

    def _check_size(self, n: int, what: str) -> None:
        if n > self.size_cap:
            raise SizeOverflow(
                f"{what} has {n} elements, over the cap of {self.size_cap}")

    # cartesian

    def lookup(self, env: Tuple[Any, ...], i: int) -> Any:
        if i >= len(env):
            raise IllFormedNode(f"index {i} outside an environment of "
                                f"length {len(env)}")
        v = env[len(env) - 1 - i]
        if isinstance(v, _Delayed):
            v = v.force()
        return v

    def eval(self, e: Expr, env: Tuple[Any, ...]) -> Any:
        h = e.head
        ch = e.children
        if h is Head.CART_VAR:
            return self.lookup(env, e.index)
        if h is Head.LAM:
            return CartFn(lambda a: self.eval(ch[1], env + (a, )))
        if h is Head.APP:
            return self.eval(ch[0], env)(self.eval(ch[1], env))
        if h is Head.PAIR_C:
            return (self.eval(ch[0], env), self.eval(ch[1], env))
        if h is Head.PR1:
            return self.eval(ch[0], env)[0]
        if h is Head.PR2:
            return self.eval(ch[0], env)[1]
        if h is Head.SIG_ELIM1:
            a, b = self.eval(ch[2], env)
            return self.eval(ch[1], env + (a, b))
        if h is Head.REFL:
            return Refl(self.eval(ch[0], env))
        if h is Head.ID_ELIM1:
            return self.eval(ch[1], env + (self.eval(ch[2], env).point, ))
        if h is Head.M_INTRO:
            return MBox(self.lin_eval(ch[0], env, {}))
        if h is Head.UA:
            raise ModelUnsupported(
                "the families model does not interpret ua")
        raise SortError(f"{h} is not a cartesian term")

    def canon(self, v: Any, t: Expr, env: Tuple[Any, ...]) -> Any:
        """A hashable normal form of ``v`` as an element of ``t``."""
        h = t.head
        if h is Head.EL:
            return int(v)
        if h is Head.SIGMA:
            a, b = t.children
            return (self.canon(v[0], a, env),
                    self.canon(v[1], b, env + (v[0], )))
        if h is Head.PI:
            a, b = t.children
            return tuple(
                self.canon(v(x), b, env + (x, ))
                for x in self.elements(a, env))
        if h is Head.ID:
            return "refl"
        if h is Head.M_TY:
            shape = self.shape(t.children[0], env)
            return tuple(int(c) for c in shape.flatten(v.value))
        if h in (Head.UNIV_U, Head.UNIV_L):
            return v
        raise SortError(f"{t} is not a cartesian type")

    def elements(self, t: Expr, env: Tuple[Any, ...]) -> List[Any]:
        h = t.head
        ch = t.children
        if h is Head.EL:
            code = self.eval(ch[0], env)
            if not isinstance(code, SetCode):
                raise SortError(f"El of {code} is not a cartesian type")
            return list(range(code.size))
        if h is Head.SIGMA:
            out = []
            for a in self.elements(ch[0], env):
                out.extend((a, b) for b in self.elements(ch[1], env + (a, )))
                self._check_size(len(out), f"type {t}")
            return out
        if h is Head.PI:
            dom = self.elements(ch[0], env)
            keys = [self.canon(a, ch[0], env) for a in dom]
            cods = [self.elements(ch[1], env + (a, )) for a in dom]
            self._check_size(prod(len(c) for c in cods), f"type {t}")
            return [
                self._table_fn(ch[0], env, dict(zip(keys, combo)))
                for combo in product(*cods)
            ]
        if h is Head.ID:
            a, m, n = ch
            m_val = self.eval(m, env)
            same = self.canon(m_val, a, env) == self.canon(
                self.eval(n, env), a, env)
            return [Refl(m_val)] if same else []
        if h is Head.M_TY:
            shape = self.shape(ch[0], env)
            self._check_size(self.p**shape.dim, f"type {t}")
            return [
                MBox(shape.unflatten(np.array(vec, dtype=np.int64)))
                for vec in vectors(shape.dim, self.p)
            ]
        if h in (Head.UNIV_U, Head.UNIV_L):
            raise ModelUnsupported(
                f"the universe {h} cannot be enumerated; give the entry a "
                f"basis")
        raise SortError(f"{t} is not a cartesian type")

    def _table_fn(self, dom: Expr, env: Tuple[Any, ...],
                  table: Dict[Any, Any]) -> CartFn:
        return CartFn(lambda a: table[self.canon(a, dom, env)])

    # linear

    def shape(self, t: Expr, env: Tuple[Any, ...]) -> Shape:
        out = self._shape(t, env)
        if out.dim > self.dim_cap:
            raise SizeOverflow(f"linear type {t} has dimension {out.dim}, "
                               f"over the cap of {self.dim_cap}")
        return out

    def _shape(self, t: Expr, env: Tuple[Any, ...]) -> Shape:
        h = t.head
        ch = t.children
        p = self.p
        if h is Head.UNIT_I:
            return ScalarShape(p)
        if h in (Head.ZERO_TY, Head.TOP_TY):
            return EmptyShape(p)
        if h is Head.TENSOR:
            return TensorShape(p, self._shape(ch[0], env),
                               self._shape(ch[1], env))
        if h is Head.LOLLI:
            return LolliShape(p, self._shape(ch[0], env),
                              self._shape(ch[1], env))
        if h in (Head.WITH, Head.PLUS):
            return PairShape(p, self._shape(ch[0], env),
                             self._shape(ch[1], env))
        if h is Head.EL:
            code = self.eval(ch[0], env)
            if not isinstance(code, VecCode):
                raise SortError(f"El of {code} is not a linear type")
            return AtomShape(p, code.dim)
        if h in (Head.L_TY, Head.SQCAP, Head.SQSUBSET):
            a = ch[0]
            points = self.elements(a, env)

            def canon(x, a=a):
                return self.canon(x, a, env)

            if h is Head.L_TY:
                return FreeShape(p, points, canon)
            fibers = [self._shape(ch[1], env + (x, )) for x in points]
            cls = CapShape if h is Head.SQCAP else SubShape
            return cls(p, points, canon, fibers)
        raise SortError(f"{t} is not a linear type")

    def lin_eval(self, e: Expr, env: Tuple[Any, ...],
                 lenv: Mapping[str, Any]) -> Any:
        h = e.head
        ch = e.children
        p = self.p
        if h is Head.LIN_VAR:
            return lenv[e.slot]
        if h is Head.SQ_LAM:
            return Dep(lambda a: self.lin_eval(ch[1], env + (a, ), lenv))
        if h is Head.SQ_APP:
            t = self.lin_eval(ch[0], env, lenv)
            return ZERO if t is ZERO else t(self.eval(ch[1], env))
        if h is Head.SQ_PAIR:
            b = self.lin_eval(ch[1], env, lenv)
            return ZERO if b is ZERO else DSum(((self.eval(ch[0], env), b), ))
        if h is Head.SQ_LET:
            t = self.lin_eval(ch[0], env, lenv)
            if t is ZERO:
                return ZERO
            y = e.names[1]
            return _sum((self.lin_eval(ch[1], env + (a, ), {
                **lenv, y: b
            }) for a, b in t.terms), p)
        if h is Head.TEN_PAIR:
            a = self.lin_eval(ch[0], env, lenv)
            b = self.lin_eval(ch[1], env, lenv)
            return ZERO if a is ZERO or b is ZERO else Tens(((a, b), ))
        if h is Head.TEN_LET:
            t = self.lin_eval(ch[0], env, lenv)
            if t is ZERO:
                return ZERO
            u, v = e.names
            return _sum((self.lin_eval(ch[1], env, {
                **lenv, u: a,
                v: b
            }) for a, b in t.terms), p)
        if h is Head.UNIT_INTRO:
            return 1
        if h is Head.UNIT_LET:
            s = self.lin_eval(ch[0], env, lenv)
            if s is ZERO:
                return ZERO
            return _scale(self.lin_eval(ch[1], env, lenv), s, p)
        if h is Head.LIN_LAM:
            u = e.names[0]
            return LinFn(
                lambda x: self.lin_eval(ch[1], env, {
                    **lenv, u: x
                }))
        if h is Head.LIN_APP:
            f = self.lin_eval(ch[0], env, lenv)
            return ZERO if f is ZERO else f(self.lin_eval(ch[1], env, lenv))
        if h is Head.WITH_PAIR:
            return Both(
                self.lin_eval(ch[0], env, lenv),
                self.lin_eval(ch[1], env, lenv))
        if h in (Head.WITH_FST, Head.WITH_SND):
            t = self.lin_eval(ch[0], env, lenv)
            if t is ZERO:
                return ZERO
            return t.left if h is Head.WITH_FST else t.right
        if h is Head.INL:
            return Both(self.lin_eval(ch[0], env, lenv), ZERO)
        if h is Head.INR:
            return Both(ZERO, self.lin_eval(ch[0], env, lenv))
        if h is Head.PLUS_CASE:
            t = self.lin_eval(ch[0], env, lenv)
            if t is ZERO:
                return ZERO
            out = ZERO
            for k, part in enumerate((t.left, t.right)):
                if part is not ZERO:
                    out = _add(
                        out,
                        self.lin_eval(ch[k + 1], env, {
                            **lenv, e.names[k]: part
                        }), p)
            return out
        if h in (Head.ZERO_ELIM, Head.TOP_INTRO):
            return ZERO
        if h is Head.L_INTRO:
            return Free(((1, self.eval(ch[0], env)), ))
        if h is Head.L_LET:
            t = self.lin_eval(ch[0], env, lenv)
            if t is ZERO:
                return ZERO
            return _sum((_scale(self.lin_eval(ch[1], env + (a, ), lenv), k,
                                p) for k, a in t.terms), p)
        if h is Head.M_ELIM:
            return self.eval(ch[0], env).value
        if h is Head.SIG_ELIM2:
            a, b = self.eval(ch[2], env)
            return self.lin_eval(ch[1], env + (a, b), lenv)
        if h is Head.ID_ELIM2:
            point = self.eval(ch[2], env).point
            return self.lin_eval(ch[1], env + (point, ), lenv)
        raise SortError(f"{h} is not a linear term")

    def matrix(self, e: Expr, env: Tuple[Any, ...],
               zone: Sequence[Tuple[str, Expr]], t: Expr) -> Mat:
        """The matrix of ``e : t`` from the Kronecker product of ``zone``.

        Columns follow the left-major order of the zone's basis tuples.
        """
        shapes = [self.shape(z, env) for _, z in zone]
        cols = prod(s.dim for s in shapes)
        if cols > self.dim_cap:
            raise SizeOverflow(f"zone of dimension {cols} is over the cap "
                               f"of {self.dim_cap}")
        tgt = self.shape(t, env)
        if cols == 0:
            return zeros(tgt.dim, 0, self.p)
        slots = [s for s, _ in zone]
        columns = []
        for combo in product(*(s.basis() for s in shapes)):
            value = self.lin_eval(e, env, dict(zip(slots, combo)))
            columns.append(tgt.flatten(value))
        return Mat(np.column_stack(columns), self.p)

    # contexts

    def points(self, ctx: Ctx, basis: Basis) -> List[Tuple[Any, ...]]:
        envs: List[Tuple[Any, ...]] = [()]
        for entry in ctx.cart:
            if entry.value is not None:
                envs = [
                    env + (self._delay(entry.value, env), ) for env in envs
                ]
            elif entry.name in basis:
                envs = [
                    env + (self._from_basis(entry.name, basis[entry.name],
                                            entry.type, env), )
                    for env in envs
                ]
            elif _peel_pi(entry.type).head in (Head.UNIV_U, Head.UNIV_L):
                raise MissingBasis(
                    f"no basis entry for '{entry.name}' : {entry.type}")
            else:
                envs = [
                    env + (a, ) for env in envs
                    for a in self.elements(entry.type, env)
                ]
            self._check_size(len(envs), "context")
        return envs

    def _delay(self, value: Expr, env: Tuple[Any, ...]) -> _Delayed:
        return _Delayed(lambda: self.eval(value, env))

    def _from_basis(self, name: str, spec: BasisEntry, t: Expr,
                    env: Tuple[Any, ...]) -> Any:
        if spec.elem is not None:
            elems = self.elements(t, env)
            if not 0 <= spec.elem < len(elems):
                raise ValueError(f"basis element {spec.elem} of '{name}' out "
                                 f"of range 0..{len(elems) - 1}")
            return elems[spec.elem]
        if spec.set_size is not None:
            return self._codes(name, spec.set_size, t, env, Head.UNIV_U)
        if spec.sets is not None:
            return self._codes(name, spec.sets, t, env, Head.UNIV_U)
        return self._codes(name, spec.vec, t, env, Head.UNIV_L)

    def _codes(self, name: str, spec: Any, t: Expr, env: Tuple[Any, ...],
               universe: Head) -> Any:
        if t.head is Head.PI:
            dom = self.elements(t.children[0], env)
            if not isinstance(spec, list) or len(spec) != len(dom):
                raise MissingBasis(
                    f"basis of '{name}' needs a list of {len(dom)} entries "
                    f"for the argument {t.children[0]}")
            table = {
                self.canon(a, t.children[0], env): self._codes(
                    name, item, t.children[1], env + (a, ), universe)
                for a, item in zip(dom, spec)
            }
            return self._table_fn(t.children[0], env, table)
        if t.head is not universe:
            raise SortError(f"basis of '{name}' gives a code of {universe} "
                            f"for an entry of type {t}")
        if isinstance(spec, list):
            if len(spec) != 1:
                raise MissingBasis(f"basis of '{name}' has {len(spec)} "
                                   f"entries for a single code")
            spec = spec[0]
        if not isinstance(spec, int) or spec < 0:
            raise ValueError(f"basis of '{name}' must be a non-negative "
                             f"size, got {spec!r}")
        if universe is Head.UNIV_U:
            return SetCode(spec, name)
        return VecCode(spec, name)


# Interpretation environments


@dataclass(frozen=True, eq=False)
class InterpEnv:
    ctx: Ctx
    model: FamiliesModel
    envs: Tuple[Tuple[Any, ...], ...]
    base: FinSet
    zone_den: VecFam

    def __iter__(self):
        return iter(self.envs)

    def __len__(self) -> int:
        return len(self.envs)


def interp_ctx(ctx: Ctx,
               basis: Optional[Basis] = None,
               model: Optional[FamiliesModel] = None) -> InterpEnv:
    model = model or FamiliesModel()
    basis = parse_basis(basis or {})
    envs = tuple(model.points(ctx, basis))
    base = FinSet(len(envs))
    dims = tuple(
        prod(model.shape(t, env).dim for _, t in ctx.lin) for env in envs)
    logger.debug("interpreted a context of %d points", len(envs))
    return InterpEnv(ctx, model, envs, base, VecFam(base, dims))


def interp_cart_type(env: InterpEnv, t: Expr) -> SetFam:
    return SetFam(env.base,
                  tuple(
                      FinSet(len(env.model.elements(t, g)))
                      for g in env.envs))


def interp_lin_type(env: InterpEnv, t: Expr) -> VecFam:
    return VecFam(env.base,
                  tuple(env.model.shape(t, g).dim for g in env.envs))


def interp_lin_term(env: InterpEnv,
                    e: Expr,
                    t: Expr,
                    zone: Optional[Sequence[Tuple[str, Expr]]] = None
                    ) -> LinMorFam:
    """The matrices of ``e : t``, one per point, out of ``zone``.

    ``zone`` defaults to the linear zone of the interpreted context.
    """
    zone = env.ctx.lin if zone is None else zone
    return LinMorFam(env.base,
                     tuple(
                         env.model.matrix(e, g, zone, t) for g in env.envs))


def soundness_failures(judgment: Judgment, env: InterpEnv) -> List[int]:
    """Points at which the two sides of an equation denote differently."""
    if judgment.kind not in (JudgmentKind.CART_EQ, JudgmentKind.LIN_EQ):
        raise ValueError(f"expected an equation judgment, got "
                         f"{judgment.kind}.")
    e1, e2, t = judgment.subjects
    model = env.model
    failures = []
    for i, g in enumerate(env.envs):
        if judgment.kind is JudgmentKind.CART_EQ:
            same = model.canon(model.eval(e1, g), t, g) == model.canon(
                model.eval(e2, g), t, g)
        else:
            zone = judgment.ctx.lin
            same = model.matrix(e1, g, zone, t) == model.matrix(
                e2, g, zone, t)
        if not same:
            failures.append(i)
    return failures


def check_soundness(judgment: Judgment,
                    basis: Optional[Basis] = None,
                    model: Optional[FamiliesModel] = None) -> bool:
    env = interp_ctx(judgment.ctx, basis, model)
    failures = soundness_failures(judgment, env)
    if failures:
        logger.info("equation fails at %d of %d points", len(failures),
                    len(env))
    return not failures


def frobenius_map(env: InterpEnv, a: Expr, xi: Expr, b: Expr) -> LinMorFam:
    """The canonical ``sub (x : a). (xi * b) -o xi * sub (x : a). b``.

    ``xi`` lives over the context, ``b`` under the extra binder ``x``.
    """
    src = sqsubset(a, tensor(shift(xi, 0, 1), b))
    tgt = tensor(xi, sqsubset(a, b))
    term = node(
        Head.SQ_LET,
        lvar("w"),
        node(
            Head.TEN_LET,
            lvar("t"),
            node(Head.TEN_PAIR, lvar("u"),
                 node(Head.SQ_PAIR, cvar(0), lvar("v"))),
            names=("u", "v")),
        names=("x", "t"))
    return interp_lin_term(env, term, tgt, zone=(("w", src), ))


def check_frobenius(env: InterpEnv, a: Expr, xi: Expr, b: Expr) -> bool:
    """The canonical map is an invertible permutation at every point."""
    for m in frobenius_map(env, a, xi, b):
        if not is_invertible(m):
            return False
        arr = m.to_array()
        if not ((arr.sum(axis=0) == 1).all() and (arr.sum(axis=1) == 1).all()):
            return False
    return True


def check_lm_adjunction(env: InterpEnv, a: Expr, b: Expr) -> bool:
    """Transposition between ``Lt a -o b`` and ``a -> Mt b`` is bijective.

    At every point the cartesian maps ``g`` are enumerated and sent to
    the linear map ``let x be t in unsig (g x)``; the images must be all
    ``p^(dim b * |a|)`` matrices, and sending each back through
    ``x |-> sig (f (lift x))`` must return the ``g`` it came from.
    """
    model = env.model
    fn_type = arrow(a, mty(b))
    term = node(
        Head.L_LET,
        lvar("t"),
        node(Head.M_ELIM, node(Head.APP, cvar(1),
                               cvar(0))),
        names=("x", ))
    zone = (("t", shift(node(Head.L_TY, a), 0, 1)), )
    b_up = shift(b, 0, 1)
    for g_env in env.envs:
        n = len(model.elements(a, g_env))
        d = model.shape(b, g_env).dim
        model._check_size(model.p**(d * n), "hom-set")
        seen = {}
        for g in model.elements(fn_type, g_env):
            env_g = g_env + (g, )
            mat = model.matrix(term, env_g, zone, b_up)
            if mat in seen:
                return False
            seen[mat] = model.canon(g, fn_type, g_env)
        if len(seen) != model.p**(d * n):
            return False
        shape = LolliShape(model.p, model.shape(node(Head.L_TY, a), g_env),
                           model.shape(b, g_env))
        for mat, key in seen.items():
            f = shape.unflatten(mat.to_array().reshape(-1))
            back = CartFn(lambda x, f=f: MBox(f(Free(((1, x), )))))
            if model.canon(back, fn_type, g_env) != key:
                return False
    return True


def _random_code(model: FamiliesModel, t: Expr, env: Tuple[Any, ...],
                 rng: np.random.Generator, max_set: int, max_dim: int) -> Any:
    if t.head is Head.PI:
        return [
            _random_code(model, t.children[1], env + (a, ), rng, max_set,
                         max_dim) for a in model.elements(t.children[0], env)
        ]
    if t.head is Head.UNIV_U:
        return int(rng.integers(1, max_set + 1))
    return int(rng.integers(1, max_dim + 1))


def random_basis(ctx: Ctx,
                 rng: np.random.Generator,
                 model: Optional[FamiliesModel] = None,
                 max_set: int = 3,
                 max_dim: int = 3) -> Dict[str, BasisEntry]:
    """Random sizes for every universe-valued entry of ``ctx``.

    A Pi-typed entry gets one size per argument, read off the first
    point of the entries before it.
    """
    model = model or FamiliesModel()
    basis: Dict[str, BasisEntry] = {}
    for k, entry in enumerate(ctx.cart):
        universe = _peel_pi(entry.type).head
        if entry.value is not None or universe not in (Head.UNIV_U,
                                                       Head.UNIV_L):
            continue
        envs = model.points(Ctx(ctx.cart[:k]), basis)
        if not envs:
            raise MissingBasis(f"no point to size '{entry.name}' at")
        code = _random_code(model, entry.type, envs[0], rng, max_set,
                            max_dim)
        if universe is Head.UNIV_L:
            basis[entry.name] = BasisEntry(vec=code)
        elif isinstance(code, int):
            basis[entry.name] = BasisEntry(set=code)
        else:
            basis[entry.name] = BasisEntry(sets=code)
    return basis
