"""Univalence for the universe of linear types in the groupoid model.

Over a base groupoid ``Γ`` the universe is the constant diagram at the
core of finite-dimensional spaces, cut off at ``max_dim``. A section of
it is a representation of ``Γ``; a section of its identity type over a
pair ``(A, B)`` picks, for every object, an invertible matrix ``A(γ) ->
B(γ)`` that is natural in ``γ``.
"""
from dataclasses import dataclass
from functools import cached_property
from itertools import product
from typing import Iterator, List, Optional, Sequence, Tuple
import logging

from ldtt.errors import (BaseMismatch, InvalidGroupoid,
                         NotInvertibleComponent, SizeOverflow)
from ldtt.gf import Mat, idmat, inverse, is_invertible
from ldtt.models.groupoids import (DEFAULT_SIZE_CAP, FinGroupoid, Functor,
                                   GpdDiagram, GSection, IdType, NatTrans,
                                   VectDiagram, arrow_category,
                                   connected_components, core_groupoid,
                                   nat_transformations, representations)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class IdSection:
    """A section of ``Id_𝕃`` over the pair ``(a, b)``: one core morphism
    ``a(γ) -> b(γ)`` per object of the base."""
    a: GSection
    b: GSection
    points: Tuple[int, ...]


class Universe:
    """The linear universe over ``base`` with fibers of dim at most
    ``max_dim`` over GF(p)."""

    def __init__(self, base: FinGroupoid, max_dim: int, p: int) -> None:
        self.base = base
        self.max_dim = max_dim
        self.p = p
        self.core = core_groupoid(max_dim, p)
        self.diagram = GpdDiagram.constant(base, self.core)

    @cached_property
    def id_type(self) -> IdType:
        return arrow_category(self.diagram)

    def matrix(self, m: int) -> Mat:
        return self.core.morphism_labels[m][1]

    def morphism(self, m: Mat) -> int:
        return self.core.morphism_index((m.rows, m))

    def code(self, d: VectDiagram) -> GSection:
        """The section of the universe classifying ``d``."""
        if d.base != self.base:
            raise BaseMismatch("representation over a different base")
        if d.p != self.p:
            raise BaseMismatch(f"representation over GF({d.p}), universe "
                               f"over GF({self.p})")
        if max(d.dims, default=0) > self.max_dim:
            raise SizeOverflow(f"dimension {max(d.dims)} is over the "
                               f"universe cap of {self.max_dim}")
        return GSection(self.diagram, d.dims,
                        tuple(self.morphism(m) for m in d.mats)).audit()

    def el(self, s: GSection) -> VectDiagram:
        """Decode a section of the universe to its representation."""
        return VectDiagram(self.base, s.points,
                           tuple(self.matrix(m) for m in s.actions), self.p)

    def linear_types(self, size_cap: int = DEFAULT_SIZE_CAP
                     ) -> Iterator[VectDiagram]:
        """Every representation with fibers of dim at most ``max_dim``."""
        comp = connected_components(self.base)
        roots = sorted(set(comp))
        for choice in product(range(self.max_dim + 1), repeat=len(roots)):
            by_root = dict(zip(roots, choice))
            dims = [by_root[comp[a]] for a in self.base.objects]
            yield from representations(self.base, dims, self.p,
                                       limit=size_cap)

    def transport(self, a: GSection, b: GSection, u: int, h: int) -> int:
        """Act with ``u : γ -> γ'`` on a path ``h : a(γ) -> b(γ)``:
        ``b(u) . h . a(u)⁻¹``."""
        c = self.core
        return c.compose(c.compose(b.actions[u], h), c.inv[a.actions[u]])

    def audit_section(self, s: IdSection) -> IdSection:
        c = self.core
        for g in self.base.objects:
            h = s.points[g]
            if c.src[h] != s.a.points[g] or c.dst[h] != s.b.points[g]:
                raise InvalidGroupoid(f"path at {g} has the wrong ends")
        for u in self.base.morphisms:
            g, g2 = self.base.src[u], self.base.dst[u]
            if self.transport(s.a, s.b, u, s.points[g]) != s.points[g2]:
                raise InvalidGroupoid(f"path is not stable under {u}")
        return s

    def id_sections(self, a: GSection, b: GSection) -> Iterator[IdSection]:
        choices = [
            self.core.hom(a.points[g], b.points[g])
            for g in self.base.objects
        ]
        for pts in product(*choices):
            s = IdSection(a, b, tuple(pts))
            try:
                yield self.audit_section(s)
            except InvalidGroupoid:
                continue

    def section_functor(self, s: IdSection) -> Functor:
        """``s`` as a functor into the total groupoid of ``Id_𝕃``."""
        ids = self.id_type
        ex = ids.extension
        ob = tuple(
            ids.path_object(g, s.a.points[g], s.b.points[g], s.points[g])
            for g in self.base.objects)
        mor = []
        for u in self.base.morphisms:
            over = ex.ext.morphism_index((u, s.a.actions[u]))
            base_mor = ex.ext2.morphism_index((over, s.b.actions[u]))
            fiber = ids.diagram.ob_map[ex.ext2.dst[base_mor]]
            _, h = ids.total.object_labels[ob[self.base.dst[u]]]
            mor.append(ids.total.morphism_index((base_mor,
                                                 fiber.identities[h])))
        return Functor(self.base, ids.total, ob, tuple(mor)).audit()


def ua_forward(universe: Universe, iso: NatTrans) -> IdSection:
    """A natural isomorphism ``El(A) ≅ El(B)`` as a path ``A = B``."""
    iso.audit()
    for g, m in enumerate(iso.components):
        if not is_invertible(m):
            raise NotInvertibleComponent(
                f"component at object {g} is not invertible")
    a, b = universe.code(iso.src), universe.code(iso.tgt)
    s = IdSection(a, b,
                  tuple(universe.morphism(m) for m in iso.components))
    return universe.audit_section(s)


def ua_backward(universe: Universe, s: IdSection) -> NatTrans:
    """Transport along a path ``A = B``: the natural isomorphism it
    carries."""
    universe.audit_section(s)
    return NatTrans(universe.el(s.a), universe.el(s.b),
                    tuple(universe.matrix(h) for h in s.points)).audit()


def ua_from_biinvertible(universe: Universe, f: NatTrans, g: NatTrans,
                         h: NatTrans) -> IdSection:
    """A path from ``f : A -> B`` with a left inverse ``g`` and a right
    inverse ``h``.

    Maps between linear types form a discrete set, so the premises
    ``g ∘ f = id`` and ``f ∘ h = id`` hold exactly or not at all.
    """
    for name, t in (("g . f", f.then(g)), ("f . h", h.then(f))):
        for c in t.components:
            if c != idmat(c.rows, c.p):
                raise NotInvertibleComponent(f"{name} is not the identity")
    return ua_forward(universe, f)


@dataclass
class UnivalenceReport:
    base_name: str
    linear_types: int = 0
    pairs: int = 0
    isos: int = 0
    sections: int = 0
    roundtrip_failures: int = 0
    premise_failures: int = 0
    count_mismatches: int = 0

    @property
    def passed(self) -> bool:
        return not (self.roundtrip_failures or self.premise_failures
                    or self.count_mismatches)

    def __bool__(self) -> bool:
        return self.passed


def _isomorphisms(x: VectDiagram, y: VectDiagram,
                  size_cap: int) -> List[NatTrans]:
    if x.dims != y.dims:
        return []
    return [t for t in nat_transformations(x, y, size_cap) if t.is_iso()]


def univalence_report(base: FinGroupoid,
                      max_dim: int,
                      p: int,
                      base_name: str = "",
                      size_cap: int = DEFAULT_SIZE_CAP,
                      types: Optional[Sequence[VectDiagram]] = None
                      ) -> UnivalenceReport:
    """Run both round trips of ``ua`` over every pair of linear types.

    For each pair the natural isomorphisms and the identity sections are
    enumerated independently; the two counts must agree.
    """
    universe = Universe(base, max_dim, p)
    report = UnivalenceReport(base_name)
    types = list(types if types is not None else universe.linear_types(
        size_cap))
    report.linear_types = len(types)
    for x, y in product(types, repeat=2):
        report.pairs += 1
        isos = _isomorphisms(x, y, size_cap)
        report.isos += len(isos)
        for iso in isos:
            s = ua_forward(universe, iso)
            if ua_backward(universe, s).components != iso.components:
                report.roundtrip_failures += 1
            inv = NatTrans(y, x, tuple(inverse(c) for c in iso.components))
            try:
                if ua_from_biinvertible(universe, iso, inv, inv) != s:
                    report.premise_failures += 1
            except NotInvertibleComponent:
                report.premise_failures += 1
        sections = list(
            universe.id_sections(universe.code(x), universe.code(y)))
        report.sections += len(sections)
        for s in sections:
            if ua_forward(universe, ua_backward(universe, s)) != s:
                report.roundtrip_failures += 1
        if len(sections) != len(isos):
            report.count_mismatches += 1
    logger.info(
        "univalence over %s: %d types, %d isomorphisms, %d sections",
        base_name or "base", report.linear_types, report.isos,
        report.sections)
    return report


def ua_roundtrip_check(base: FinGroupoid,
                       max_dim: int,
                       p: int,
                       size_cap: int = DEFAULT_SIZE_CAP) -> bool:
    return univalence_report(base, max_dim, p, size_cap=size_cap).passed
