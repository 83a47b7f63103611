"""Finite groupoids, diagrams over them and the Grothendieck construction.

Groupoids are stored as full tables: ``comp[g][f]`` is ``g . f`` (first
``f``, then ``g``) when ``dst[f] == src[g]`` and ``-1`` otherwise.
Objects and morphisms may carry labels; constructions use them to find
the index of a pair ``(γ, a)`` or ``(u, α)``.
"""
from dataclasses import dataclass, field
from functools import cached_property
from itertools import product
from typing import (Any, Callable, Dict, Iterator, List, Optional, Sequence,
                    Tuple, Union)
import json
import logging

import numpy as np

from ldtt.errors import BaseMismatch, InvalidGroupoid, SizeOverflow
from ldtt.gf import (Mat, enumerate_mats, idmat, inverse, invertible_mats,
                     is_invertible, kron)

logger = logging.getLogger(__name__)

DEFAULT_SIZE_CAP = 10_000


@dataclass(frozen=True)
class FinGroupoid:
    n_objects: int
    src: Tuple[int, ...]
    dst: Tuple[int, ...]
    comp: Tuple[Tuple[int, ...], ...]
    identities: Tuple[int, ...]
    inv: Tuple[int, ...]
    object_labels: Optional[Tuple[Any, ...]] = field(
        default=None, compare=False)
    morphism_labels: Optional[Tuple[Any, ...]] = field(
        default=None, compare=False)

    @property
    def objects(self) -> range:
        return range(self.n_objects)

    @property
    def n_morphisms(self) -> int:
        return len(self.src)

    @property
    def morphisms(self) -> range:
        return range(self.n_morphisms)

    @cached_property
    def _homs(self) -> Dict[Tuple[int, int], List[int]]:
        out: Dict[Tuple[int, int], List[int]] = {}
        for f in self.morphisms:
            out.setdefault((self.src[f], self.dst[f]), []).append(f)
        return out

    @cached_property
    def _outgoing(self) -> Dict[int, List[int]]:
        out: Dict[int, List[int]] = {a: [] for a in self.objects}
        for f in self.morphisms:
            out[self.src[f]].append(f)
        return out

    @cached_property
    def _object_index(self) -> Dict[Any, int]:
        return {label: i for i, label in enumerate(self.object_labels or ())}

    @cached_property
    def _morphism_index(self) -> Dict[Any, int]:
        return {
            label: i
            for i, label in enumerate(self.morphism_labels or ())
        }

    def hom(self, a: int, b: int) -> List[int]:
        return self._homs.get((a, b), [])

    def outgoing(self, a: int) -> List[int]:
        return self._outgoing[a]

    def compose(self, g: int, f: int) -> int:
        out = self.comp[g][f]
        if out < 0:
            raise InvalidGroupoid(f"morphisms {g} and {f} do not compose")
        return out

    def object_index(self, label: Any) -> int:
        return self._object_index[label]

    def morphism_index(self, label: Any) -> int:
        return self._morphism_index[label]

    def audit(self) -> "FinGroupoid":
        """Check the tables; return ``self`` so constructions can chain."""
        m = self.n_morphisms
        if len(self.dst) != m or len(self.inv) != m or len(self.comp) != m:
            raise InvalidGroupoid("morphism tables have different lengths")
        if len(self.identities) != self.n_objects:
            raise InvalidGroupoid("need one identity per object")
        for f in self.morphisms:
            if not (0 <= self.src[f] < self.n_objects
                    and 0 <= self.dst[f] < self.n_objects):
                raise InvalidGroupoid(f"morphism {f} has an unknown end")
            if len(self.comp[f]) != m:
                raise InvalidGroupoid(f"composition row {f} is not total")
        for a, e in enumerate(self.identities):
            if self.src[e] != a or self.dst[e] != a:
                raise InvalidGroupoid(f"identity of {a} is not a loop at {a}")
        for g in self.morphisms:
            for f in self.morphisms:
                h = self.comp[g][f]
                if (self.dst[f] == self.src[g]) != (h >= 0):
                    raise InvalidGroupoid(
                        f"composite {g} . {f} defined on a wrong pair")
                if h >= 0 and (self.src[h] != self.src[f]
                               or self.dst[h] != self.dst[g]):
                    raise InvalidGroupoid(
                        f"composite {g} . {f} has the wrong ends")
        for f in self.morphisms:
            if (self.comp[self.identities[self.dst[f]]][f] != f
                    or self.comp[f][self.identities[self.src[f]]] != f):
                raise InvalidGroupoid(f"identities are not units for {f}")
            i = self.inv[f]
            if (self.comp[i][f] != self.identities[self.src[f]]
                    or self.comp[f][i] != self.identities[self.dst[f]]):
                raise InvalidGroupoid(f"{i} is not an inverse of {f}")
        for f in self.morphisms:
            for g in self.outgoing(self.dst[f]):
                gf = self.comp[g][f]
                for h in self.outgoing(self.dst[g]):
                    if self.comp[h][gf] != self.comp[self.comp[h][g]][f]:
                        raise InvalidGroupoid(
                            f"composition not associative at {h}, {g}, {f}")
        return self

    def to_json(self) -> Dict[str, Any]:
        return {
            "objects": self.n_objects,
            "morphisms": [[s, d] for s, d in zip(self.src, self.dst)],
            "comp": [list(row) for row in self.comp],
            "identities": list(self.identities),
            "inverses": list(self.inv),
        }


def build_groupoid(objects: Sequence[Any],
                   morphisms: Sequence[Tuple[Any, Any, Any]],
                   compose: Callable[[Any, Any], Any],
                   identity: Callable[[Any], Any],
                   invert: Callable[[Any], Any],
                   size_cap: int = DEFAULT_SIZE_CAP) -> FinGroupoid:
    """Tabulate a groupoid given on labels, then audit it.

    ``morphisms`` holds ``(label, src label, dst label)`` triples;
    ``compose(g, f)`` is only called on composable pairs.
    """
    if len(morphisms) > size_cap:
        raise SizeOverflow(f"groupoid with {len(morphisms)} morphisms is "
                           f"over the cap of {size_cap}")
    obj_index = {label: i for i, label in enumerate(objects)}
    mor_index = {label: i for i, (label, _, _) in enumerate(morphisms)}
    src = tuple(obj_index[s] for _, s, _ in morphisms)
    dst = tuple(obj_index[d] for _, _, d in morphisms)
    labels = [label for label, _, _ in morphisms]
    outgoing: Dict[int, List[int]] = {a: [] for a in range(len(objects))}
    for f, s in enumerate(src):
        outgoing[s].append(f)
    comp = [[-1] * len(labels) for _ in labels]
    try:
        for f, f_label in enumerate(labels):
            for g in outgoing[dst[f]]:
                comp[g][f] = mor_index[compose(labels[g], f_label)]
        identities = tuple(mor_index[identity(a)] for a in objects)
        inv = tuple(mor_index[invert(label)] for label in labels)
    except KeyError as err:
        raise InvalidGroupoid(f"tables not closed: {err} is not a morphism")
    return FinGroupoid(
        len(objects),
        src,
        dst,
        tuple(tuple(row) for row in comp),
        identities,
        inv,
        object_labels=tuple(objects),
        morphism_labels=tuple(labels)).audit()


# Small groupoids


def discrete(n: int) -> FinGroupoid:
    return build_groupoid(
        list(range(n)), [(("id", a), a, a) for a in range(n)],
        lambda g, f: g, lambda a: ("id", a), lambda f: f)


def terminal() -> FinGroupoid:
    return discrete(1)


def cyclic_group(n: int) -> FinGroupoid:
    """``B(Z/n)``: one object, morphisms ``0..n-1`` under addition."""
    return build_groupoid([0], [(k, 0, 0) for k in range(n)],
                          lambda g, f: (g + f) % n, lambda a: 0,
                          lambda f: (-f) % n)


def codiscrete(n: int) -> FinGroupoid:
    """One morphism between any two of ``n`` objects."""
    return build_groupoid(
        list(range(n)), [((i, j), i, j) for i in range(n)
                         for j in range(n)],
        lambda g, f: (f[0], g[1]), lambda a: (a, a), lambda f: (f[1], f[0]))


def product_groupoid(g: FinGroupoid, h: FinGroupoid) -> FinGroupoid:
    objects = [(a, b) for a in g.objects for b in h.objects]
    morphisms = [((f, k), (g.src[f], h.src[k]), (g.dst[f], h.dst[k]))
                 for f in g.morphisms for k in h.morphisms]
    return build_groupoid(
        objects, morphisms, lambda x, y:
        (g.compose(x[0], y[0]), h.compose(x[1], y[1])), lambda a:
        (g.identities[a[0]], h.identities[a[1]]), lambda x:
        (g.inv[x[0]], h.inv[x[1]]))


def disjoint_union(g: FinGroupoid, h: FinGroupoid) -> FinGroupoid:
    objects = [(0, a) for a in g.objects] + [(1, b) for b in h.objects]
    parts = (g, h)
    morphisms = [((k, f), (k, part.src[f]), (k, part.dst[f]))
                 for k, part in enumerate(parts) for f in part.morphisms]
    return build_groupoid(
        objects, morphisms, lambda x, y:
        (x[0], parts[x[0]].compose(x[1], y[1])), lambda a:
        (a[0], parts[a[0]].identities[a[1]]), lambda x:
        (x[0], parts[x[0]].inv[x[1]]))


def core_groupoid(max_dim: int, p: int) -> FinGroupoid:
    """The finite fragment of the core of FinVect: dims ``0..max_dim``
    and every invertible matrix between equal dims."""
    objects = list(range(max_dim + 1))
    morphisms = [((d, m), d, d) for d in objects
                 for m in invertible_mats(d, p)]
    return build_groupoid(objects, morphisms, lambda g, f:
                          (g[0], g[1] @ f[1]), lambda d: (d, idmat(d, p)),
                          lambda f: (f[0], inverse(f[1])))


def small_groupoids() -> List[Tuple[str, FinGroupoid]]:
    """Groupoids with at most 3 objects and 8 morphisms."""
    return [
        ("1", terminal()),
        ("2", discrete(2)),
        ("3", discrete(3)),
        ("BZ/2", cyclic_group(2)),
        ("BZ/3", cyclic_group(3)),
        ("I", codiscrete(2)),
        ("I x BZ/2", product_groupoid(codiscrete(2), cyclic_group(2))),
        ("1 + BZ/2", disjoint_union(terminal(), cyclic_group(2))),
    ]


# Functors


@dataclass(frozen=True)
class Functor:
    src: FinGroupoid
    tgt: FinGroupoid
    ob: Tuple[int, ...]
    mor: Tuple[int, ...]

    def audit(self) -> "Functor":
        s, t = self.src, self.tgt
        if len(self.ob) != s.n_objects or len(self.mor) != s.n_morphisms:
            raise InvalidGroupoid("functor tables do not cover the source")
        for f in s.morphisms:
            image = self.mor[f]
            if (t.src[image] != self.ob[s.src[f]]
                    or t.dst[image] != self.ob[s.dst[f]]):
                raise InvalidGroupoid(f"functor sends {f} to a morphism "
                                      f"with the wrong ends")
        for a in s.objects:
            if self.mor[s.identities[a]] != t.identities[self.ob[a]]:
                raise InvalidGroupoid(f"functor does not preserve the "
                                      f"identity of {a}")
        for f in s.morphisms:
            for g in s.outgoing(s.dst[f]):
                if self.mor[s.comp[g][f]] != t.comp[self.mor[g]][self.mor[f]]:
                    raise InvalidGroupoid(
                        f"functor does not preserve {g} . {f}")
        return self

    @classmethod
    def identity(cls, g: FinGroupoid) -> "Functor":
        return cls(g, g, tuple(g.objects), tuple(g.morphisms))

    @classmethod
    def constant(cls, src: FinGroupoid, tgt: FinGroupoid,
                 obj: int) -> "Functor":
        e = tgt.identities[obj]
        return cls(src, tgt, (obj, ) * src.n_objects, (e, ) * src.n_morphisms)

    @classmethod
    def to_terminal(cls, src: FinGroupoid) -> "Functor":
        return cls.constant(src, terminal(), 0)

    def then(self, other: "Functor") -> "Functor":
        """``other . self``."""
        if other.src != self.tgt:
            raise BaseMismatch("functors do not compose")
        return Functor(self.src, other.tgt,
                       tuple(other.ob[a] for a in self.ob),
                       tuple(other.mor[f] for f in self.mor))


# Diagrams


@dataclass(frozen=True)
class GpdDiagram:
    base: FinGroupoid
    ob_map: Tuple[FinGroupoid, ...]
    mor_map: Tuple[Functor, ...]

    def audit(self) -> "GpdDiagram":
        b = self.base
        if (len(self.ob_map) != b.n_objects
                or len(self.mor_map) != b.n_morphisms):
            raise InvalidGroupoid("diagram does not cover its base")
        for fiber in self.ob_map:
            fiber.audit()
        for u in b.morphisms:
            fn = self.mor_map[u]
            if (fn.src != self.ob_map[b.src[u]]
                    or fn.tgt != self.ob_map[b.dst[u]]):
                raise InvalidGroupoid(f"action of {u} has the wrong ends")
            fn.audit()
        for a in b.objects:
            if self.mor_map[b.identities[a]] != Functor.identity(
                    self.ob_map[a]):
                raise InvalidGroupoid(f"identity of {a} acts non-trivially")
        for u in b.morphisms:
            for v in b.outgoing(b.dst[u]):
                if self.mor_map[b.comp[v][u]] != self.mor_map[u].then(
                        self.mor_map[v]):
                    raise InvalidGroupoid(
                        f"diagram is not functorial at {v} . {u}")
        return self

    @classmethod
    def constant(cls, base: FinGroupoid,
                 fiber: FinGroupoid) -> "GpdDiagram":
        ident = Functor.identity(fiber)
        return cls(base, (fiber, ) * base.n_objects,
                   (ident, ) * base.n_morphisms)


@dataclass(frozen=True)
class VectDiagram:
    base: FinGroupoid
    dims: Tuple[int, ...]
    mats: Tuple[Mat, ...]
    p: int

    def audit(self) -> "VectDiagram":
        b = self.base
        if len(self.dims) != b.n_objects or len(self.mats) != b.n_morphisms:
            raise InvalidGroupoid("diagram does not cover its base")
        for u in b.morphisms:
            m = self.mats[u]
            if m.shape != (self.dims[b.dst[u]], self.dims[b.src[u]]):
                raise InvalidGroupoid(f"matrix of {u} has shape {m.shape}")
            if m.p != self.p or not is_invertible(m):
                raise InvalidGroupoid(f"matrix of {u} is not invertible")
        for a in b.objects:
            if self.mats[b.identities[a]] != idmat(self.dims[a], self.p):
                raise InvalidGroupoid(f"identity of {a} acts non-trivially")
        for u in b.morphisms:
            for v in b.outgoing(b.dst[u]):
                if self.mats[b.comp[v][u]] != self.mats[v] @ self.mats[u]:
                    raise InvalidGroupoid(
                        f"diagram is not functorial at {v} . {u}")
        return self

    def mat(self, u: int) -> Mat:
        return self.mats[u]

    @classmethod
    def constant(cls, base: FinGroupoid, dim: int, p: int) -> "VectDiagram":
        return cls(base, (dim, ) * base.n_objects,
                   tuple(idmat(dim, p) for _ in base.morphisms), p)

    @classmethod
    def from_action(cls, base: FinGroupoid, dims: Sequence[int],
                    action: Callable[[int], Any], p: int) -> "VectDiagram":
        mats = tuple(Mat(np.asarray(action(u), dtype=np.int64).reshape(
            dims[base.dst[u]], dims[base.src[u]]), p)
                     for u in base.morphisms)
        return cls(base, tuple(dims), mats, p).audit()


def tensor_diagrams(x: VectDiagram, y: VectDiagram) -> VectDiagram:
    if x.base != y.base:
        raise BaseMismatch("tensor of diagrams over different bases")
    return VectDiagram(x.base,
                       tuple(a * b for a, b in zip(x.dims, y.dims)),
                       tuple(kron(m, n) for m, n in zip(x.mats, y.mats)),
                       x.p)


Diagram = Union[GpdDiagram, VectDiagram]


@dataclass(frozen=True)
class NatTrans:
    src: VectDiagram
    tgt: VectDiagram
    components: Tuple[Mat, ...]

    def audit(self) -> "NatTrans":
        if self.src.base != self.tgt.base:
            raise BaseMismatch("transformation between diagrams over "
                               "different bases")
        b = self.src.base
        for a in b.objects:
            if self.components[a].shape != (self.tgt.dims[a],
                                            self.src.dims[a]):
                raise InvalidGroupoid(f"component at {a} has the wrong shape")
        for u in b.morphisms:
            s, d = b.src[u], b.dst[u]
            if (self.tgt.mats[u] @ self.components[s] !=
                    self.components[d] @ self.src.mats[u]):
                raise InvalidGroupoid(f"naturality fails at {u}")
        return self

    def then(self, other: "NatTrans") -> "NatTrans":
        return NatTrans(self.src, other.tgt,
                        tuple(g @ f for f, g in zip(self.components,
                                                    other.components)))

    @classmethod
    def identity(cls, d: VectDiagram) -> "NatTrans":
        return cls(d, d, tuple(idmat(n, d.p) for n in d.dims))

    def is_iso(self) -> bool:
        return all(is_invertible(m) for m in self.components)


def nat_transformations(x: VectDiagram, y: VectDiagram,
                        size_cap: int = DEFAULT_SIZE_CAP
                        ) -> Iterator[NatTrans]:
    """Every natural transformation ``x => y``, in a fixed order."""
    b = x.base
    count = 1
    for a in b.objects:
        count *= x.p**(x.dims[a] * y.dims[a])
    if count > size_cap:
        raise SizeOverflow(f"{count} candidate transformations, over the "
                           f"cap of {size_cap}")
    choices = [list(enumerate_mats(y.dims[a], x.dims[a], x.p))
               for a in b.objects]
    for comps in product(*choices):
        t = NatTrans(x, y, tuple(comps))
        if all(t.tgt.mats[u] @ comps[b.src[u]] == comps[b.dst[u]]
               @ t.src.mats[u] for u in b.morphisms):
            yield t


def representations(base: FinGroupoid, dims: Sequence[int], p: int,
                    limit: Optional[int] = None) -> Iterator[VectDiagram]:
    """Functors ``base -> FinVect`` with the given dimensions.

    A backtracking search over the non-identity morphisms; a morphism's
    inverse is fixed as soon as the morphism is.
    """
    mats: Dict[int, Mat] = {
        base.identities[a]: idmat(dims[a], p)
        for a in base.objects
    }
    order = [f for f in base.morphisms if f not in mats]
    found = 0

    triples = [(g, f, base.comp[g][f]) for f in base.morphisms
               for g in base.outgoing(base.dst[f])]

    def consistent(*touched: int) -> bool:
        return all(mats[h] == mats[g] @ mats[f] for g, f, h in triples
                   if g in mats and f in mats and h in mats and (
                       g in touched or f in touched or h in touched))

    def search(k: int):
        nonlocal found
        if limit is not None and found >= limit:
            return
        if k == len(order):
            found += 1
            yield VectDiagram(base, tuple(dims),
                              tuple(mats[f] for f in base.morphisms), p)
            return
        f = order[k]
        if f in mats:
            yield from search(k + 1)
            return
        n = dims[base.src[f]]
        if dims[base.dst[f]] != n:
            return
        i = base.inv[f]
        for m in invertible_mats(n, p):
            mats[f] = m
            if i != f:
                mats[i] = inverse(m)
            elif m @ m != idmat(n, p):
                del mats[f]
                continue
            if consistent(f, i):
                yield from search(k + 1)
            del mats[f]
            mats.pop(i, None)

    yield from search(0)


def random_representation(rng: np.random.Generator, base: FinGroupoid,
                          max_dim: int, p: int,
                          limit: int = 256) -> VectDiagram:
    """A representation with random dims, constant on connected
    components."""
    comp_of = connected_components(base)
    dims_by_comp = {
        c: int(rng.integers(0, max_dim + 1))
        for c in set(comp_of)
    }
    dims = [dims_by_comp[comp_of[a]] for a in base.objects]
    reps = list(representations(base, dims, p, limit=limit))
    return reps[int(rng.integers(0, len(reps)))]


def connected_components(g: FinGroupoid) -> List[int]:
    comp = [-1] * g.n_objects
    for a in g.objects:
        if comp[a] >= 0:
            continue
        stack = [a]
        comp[a] = a
        while stack:
            x = stack.pop()
            for f in g.outgoing(x):
                y = g.dst[f]
                if comp[y] < 0:
                    comp[y] = a
                    stack.append(y)
    return comp


# Sections and the Grothendieck construction


@dataclass(frozen=True)
class GSection:
    """A section of a groupoid diagram over its base.

    ``points[γ]`` is an object of the fiber over ``γ``; ``actions[u]``
    for ``u : γ -> γ'`` is a fiber morphism ``A(u)(points[γ]) ->
    points[γ']``.
    """
    diagram: GpdDiagram
    points: Tuple[int, ...]
    actions: Tuple[int, ...]

    def audit(self) -> "GSection":
        d = self.diagram
        b = d.base
        for u in b.morphisms:
            s, t = b.src[u], b.dst[u]
            fiber = d.ob_map[t]
            alpha = self.actions[u]
            if (fiber.src[alpha] != d.mor_map[u].ob[self.points[s]]
                    or fiber.dst[alpha] != self.points[t]):
                raise InvalidGroupoid(f"action of the section at {u} has the "
                                      f"wrong ends")
        for a in b.objects:
            e = b.identities[a]
            if self.actions[e] != d.ob_map[a].identities[self.points[a]]:
                raise InvalidGroupoid(f"section is not unital at {a}")
        for u in b.morphisms:
            for v in b.outgoing(b.dst[u]):
                fiber = d.ob_map[b.dst[v]]
                expected = fiber.compose(
                    self.actions[v], d.mor_map[v].mor[self.actions[u]])
                if self.actions[b.comp[v][u]] != expected:
                    raise InvalidGroupoid(
                        f"section is not functorial at {v} . {u}")
        return self

    def as_functor(self, total: FinGroupoid) -> Functor:
        """The functor ``base -> total`` over the base."""
        b = self.diagram.base
        return Functor(
            b, total,
            tuple(total.object_index((g, self.points[g])) for g in b.objects),
            tuple(
                total.morphism_index((u, self.actions[u]))
                for u in b.morphisms))


def grothendieck(a: GpdDiagram, size_cap: int = DEFAULT_SIZE_CAP
                 ) -> Tuple[FinGroupoid, Functor]:
    """The total groupoid of ``a`` and its projection to the base.

    Objects are pairs ``(γ, x)``; a morphism ``(γ, x) -> (γ', x')`` is a
    pair ``(u, α)`` with ``u : γ -> γ'`` and ``α : A(u)(x) -> x'``.
    """
    b = a.base
    objects = [(g, x) for g in b.objects for x in a.ob_map[g].objects]
    morphisms = []
    for u in b.morphisms:
        s, t = b.src[u], b.dst[u]
        fu = a.mor_map[u]
        fiber = a.ob_map[t]
        for x in a.ob_map[s].objects:
            for alpha in fiber.outgoing(fu.ob[x]):
                morphisms.append(((u, alpha), (s, x), (t, fiber.dst[alpha])))

    def compose(g, f):
        (v, beta), (u, alpha) = g, f
        fiber = a.ob_map[b.dst[v]]
        return (b.compose(v, u),
                fiber.compose(beta, a.mor_map[v].mor[alpha]))

    def identity(obj):
        g, x = obj
        return (b.identities[g], a.ob_map[g].identities[x])

    def invert(f):
        u, alpha = f
        ui = b.inv[u]
        return (ui, a.mor_map[ui].mor[a.ob_map[b.dst[u]].inv[alpha]])

    total = build_groupoid(objects, morphisms, compose, identity, invert,
                           size_cap)
    proj = Functor(total, b, tuple(g for g, _ in objects),
                   tuple(u for (u, _), _, _ in morphisms))
    logger.debug("grothendieck: %d objects, %d morphisms", total.n_objects,
                 total.n_morphisms)
    return total, proj


def precompose(f: Functor, d: Diagram) -> Diagram:
    """Reindex ``d`` along ``f``."""
    if f.tgt != d.base:
        raise BaseMismatch("functor codomain is not the base of the diagram")
    if isinstance(d, VectDiagram):
        return VectDiagram(f.src, tuple(d.dims[a] for a in f.ob),
                           tuple(d.mats[u] for u in f.mor), d.p)
    return GpdDiagram(f.src, tuple(d.ob_map[a] for a in f.ob),
                      tuple(d.mor_map[u] for u in f.mor))


def weakening(a: GpdDiagram) -> Functor:
    """The display map ``Γ.A -> Γ``."""
    return grothendieck(a)[1]


@dataclass(frozen=True)
class Extension:
    """``Γ.A`` and ``Γ.A.π*A`` with their maps."""
    diagram: GpdDiagram
    ext: FinGroupoid
    proj: Functor
    pulled: GpdDiagram
    ext2: FinGroupoid
    proj2: Functor
    diagonal: Functor


def extend_twice(a: GpdDiagram) -> Extension:
    ext, proj = grothendieck(a)
    pulled = precompose(proj, a)
    ext2, proj2 = grothendieck(pulled)
    diag = Functor(
        ext, ext2,
        tuple(ext2.object_index((x, ext.object_labels[x][1]))
              for x in ext.objects),
        tuple(ext2.morphism_index((f, ext.morphism_labels[f][1]))
              for f in ext.morphisms))
    return Extension(a, ext, proj, pulled, ext2, proj2, diag.audit())


def diagonal(a: GpdDiagram) -> Functor:
    """``v_A : Γ.A -> Γ.A.π*A``, ``(γ, x) |-> ((γ, x), x)``."""
    return extend_twice(a).diagonal


def sigma_diagram(a: GpdDiagram, b: GpdDiagram,
                  ext: Optional[FinGroupoid] = None) -> GpdDiagram:
    """``Σ_A B`` over the base of ``a``, for ``b`` over ``Γ.A``."""
    base = a.base
    ext = ext or grothendieck(a)[0]
    if b.base != ext:
        raise BaseMismatch("B must be a diagram over Γ.A")
    fibers = []
    for g in base.objects:
        ag = a.ob_map[g]
        e = base.identities[g]
        restricted = GpdDiagram(
            ag, tuple(b.ob_map[ext.object_index((g, x))] for x in ag.objects),
            tuple(b.mor_map[ext.morphism_index((e, alpha))]
                  for alpha in ag.morphisms))
        fibers.append(grothendieck(restricted)[0])
    actions = []
    for u in base.morphisms:
        s, t = base.src[u], base.dst[u]
        fu = a.mor_map[u]
        at = a.ob_map[t]
        src_f, dst_f = fibers[s], fibers[t]

        def over(x, u=u, fu=fu, at=at):
            return b.mor_map[ext.morphism_index(
                (u, at.identities[fu.ob[x]]))]

        ob = tuple(
            dst_f.object_index((fu.ob[x], over(x).ob[y]))
            for x, y in src_f.object_labels)
        mor = []
        for alpha, beta in src_f.morphism_labels:
            x2 = a.ob_map[s].dst[alpha]
            mor.append(
                dst_f.morphism_index((fu.mor[alpha], over(x2).mor[beta])))
        actions.append(Functor(src_f, dst_f, ob, tuple(mor)))
    return GpdDiagram(base, tuple(fibers), tuple(actions)).audit()


def check_sigma_pairing(a: GpdDiagram, b: GpdDiagram) -> bool:
    """``pair : Γ.A.B -> Γ.Σ_A B`` is an isomorphism of groupoids."""
    ext, _ = grothendieck(a)
    sig = sigma_diagram(a, b, ext)
    ext_sig, _ = grothendieck(sig)
    ext_b, _ = grothendieck(b)
    ob = []
    for x, y in ext_b.object_labels:
        g, xa = ext.object_labels[x]
        ob.append(ext_sig.object_index((g, sig.ob_map[g].object_index(
            (xa, y)))))
    mor = []
    for m, beta in ext_b.morphism_labels:
        u, alpha = ext.morphism_labels[m]
        t = a.base.dst[u]
        mor.append(
            ext_sig.morphism_index(
                (u, sig.ob_map[t].morphism_index((alpha, beta)))))
    pairing = Functor(ext_b, ext_sig, tuple(ob), tuple(mor)).audit()
    return (sorted(pairing.ob) == list(ext_sig.objects)
            and sorted(pairing.mor) == list(ext_sig.morphisms))


# Identity types


@dataclass(frozen=True)
class IdType:
    """``Id_A`` as the arrow category of ``A``, over ``Γ.A.π*A``.

    The fiber over ``((γ, x), y)`` is the discrete groupoid on the
    morphisms ``x -> y`` of ``A(γ)``; ``total`` is its Grothendieck
    construction and ``refl`` the section ``(γ, x) |-> id_x``.
    """
    extension: Extension
    diagram: GpdDiagram
    total: FinGroupoid
    proj: Functor
    refl: Functor

    def path_object(self, g: int, x: int, y: int, h: int) -> int:
        """The object ``(((γ, x), y), h)`` of ``total``."""
        ext, ext2 = self.extension.ext, self.extension.ext2
        base = ext2.object_index((ext.object_index((g, x)), y))
        fiber = self.diagram.ob_map[base]
        return self.total.object_index((base, fiber.object_index(h)))

    def phi(self, m: GSection, n: GSection,
            path: Sequence[int]) -> Tuple[int, ...]:
        """The components of ``φ : r ∘ M => P⁺ ∘ N⁺ ∘ M``.

        ``path[γ]`` is a morphism ``M(γ) -> N(γ)`` of ``A(γ)``. The
        component at ``γ`` is ``(((id, id), P_γ), id)`` in ``total``.
        """
        ex = self.extension
        a = ex.diagram
        out = []
        for g in a.base.objects:
            fiber = a.ob_map[g]
            x, y, h = m.points[g], n.points[g], path[g]
            if fiber.src[h] != x or fiber.dst[h] != y:
                raise InvalidGroupoid(f"path at {g} does not go from M to N")
            e_g = a.base.identities[g]
            e_x = fiber.identities[x]
            over = ex.ext.morphism_index((e_g, e_x))
            base_mor = ex.ext2.morphism_index((over, h))
            src_base = ex.ext2.object_index((ex.ext.object_index((g, x)), x))
            id_fiber = self.diagram.ob_map[src_base]
            target = self.diagram.mor_map[base_mor].ob[id_fiber.object_index(
                e_x)]
            tgt_fiber = self.diagram.ob_map[ex.ext2.dst[base_mor]]
            out.append(
                self.total.morphism_index(
                    (base_mor, tgt_fiber.identities[target])))
        return tuple(out)

    def c_hat(self, m: GSection, n: GSection, path: Sequence[int],
              xi: VectDiagram, c_diag: VectDiagram,
              c: Sequence[Mat]) -> Tuple[Mat, ...]:
        """Transport of ``c`` along ``φ``: ``C(φ) ∘ c_M ∘ Ξ(φ)⁻¹``.

        ``xi`` and ``c_diag`` are diagrams over ``total``; ``c[x]`` is the
        component at the object ``x`` of ``Γ.A``, a map ``Ξ(r x) -> C(r
        x)``.
        """
        ex = self.extension
        phis = self.phi(m, n, path)
        out = []
        for g, f in enumerate(phis):
            x = ex.ext.object_index((g, m.points[g]))
            out.append(c_diag.mats[f] @ c[x] @ inverse(xi.mats[f]))
        return tuple(out)

    def path_points(self, m: GSection, n: GSection,
                    path: Sequence[int]) -> Tuple[int, ...]:
        return tuple(
            self.path_object(g, m.points[g], n.points[g], path[g])
            for g in self.extension.diagram.base.objects)


def arrow_category(a: GpdDiagram) -> IdType:
    ex = extend_twice(a)
    ext, ext2 = ex.ext, ex.ext2
    fibers = []
    for x2 in ext2.objects:
        x, y = ext2.object_labels[x2]
        g, xa = ext.object_labels[x]
        homs = a.ob_map[g].hom(xa, y)
        fibers.append(
            build_groupoid(homs, [(h, h, h) for h in homs],
                           lambda p, q: p, lambda h: h, lambda h: h))
    actions = []
    for f2 in ext2.morphisms:
        f, beta = ext2.morphism_labels[f2]
        u, alpha = ext.morphism_labels[f]
        t = a.base.dst[u]
        fu = a.mor_map[u]
        at = a.ob_map[t]
        src_f = fibers[ext2.src[f2]]
        dst_f = fibers[ext2.dst[f2]]
        ob = []
        for h in src_f.object_labels:
            moved = at.compose(at.compose(beta, fu.mor[h]), at.inv[alpha])
            ob.append(dst_f.object_index(moved))
        mor = tuple(dst_f.identities[o] for o in ob)
        actions.append(Functor(src_f, dst_f, tuple(ob), mor))
    diagram = GpdDiagram(ext2, tuple(fibers), tuple(actions)).audit()
    total, proj = grothendieck(diagram)
    refl_ob = []
    for x in ext.objects:
        g, xa = ext.object_labels[x]
        base = ex.diagonal.ob[x]
        fiber = diagram.ob_map[base]
        refl_ob.append(
            total.object_index(
                (base, fiber.object_index(a.ob_map[g].identities[xa]))))
    refl_mor = []
    for f in ext.morphisms:
        base = ex.diagonal.mor[f]
        fiber = diagram.ob_map[ext2.dst[base]]
        target = refl_ob[ext.dst[f]]
        _, h = total.object_labels[target]
        refl_mor.append(total.morphism_index((base, fiber.identities[h])))
    refl = Functor(ext, total, tuple(refl_ob), tuple(refl_mor)).audit()
    return IdType(ex, diagram, total, proj, refl)


# JSON descriptions


def groupoid_from_json(data: Dict[str, Any]) -> FinGroupoid:
    """Load a groupoid given by explicit full tables and audit it."""
    try:
        objects = data["objects"]
        n = objects if isinstance(objects, int) else len(objects)
        labels = None if isinstance(objects, int) else tuple(objects)
        pairs = data["morphisms"]
        g = FinGroupoid(
            n,
            tuple(int(s) for s, _ in pairs),
            tuple(int(d) for _, d in pairs),
            tuple(tuple(int(x) for x in row) for row in data["comp"]),
            tuple(int(e) for e in data["identities"]),
            tuple(int(i) for i in data["inverses"]),
            object_labels=labels)
    except (KeyError, TypeError, ValueError) as err:
        raise InvalidGroupoid(f"malformed groupoid description: {err}")
    return g.audit()


def vect_diagram_from_json(data: Dict[str, Any]) -> VectDiagram:
    base = groupoid_from_json(data["base"])
    p = int(data.get("prime", 2))
    dims = tuple(int(d) for d in data["dims"])
    mats = tuple(
        Mat(np.asarray(m, dtype=np.int64).reshape(dims[base.dst[u]],
                                                  dims[base.src[u]]), p)
        for u, m in zip(base.morphisms, data["mats"]))
    if len(mats) != base.n_morphisms:
        raise InvalidGroupoid("need one matrix per morphism")
    return VectDiagram(base, dims, mats, p).audit()


def load_groupoid(path: str) -> FinGroupoid:
    with open(path, "r", encoding="utf-8") as f:
        return groupoid_from_json(json.load(f))


def load_vect_diagram(path: str) -> VectDiagram:
    with open(path, "r", encoding="utf-8") as f:
        return vect_diagram_from_json(json.load(f))
