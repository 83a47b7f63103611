"""Left and right Kan extensions of vector-space diagrams along functors
of finite groupoids.

``Lan_p F (b)`` is the colimit of ``F`` over the comma groupoid ``(p ↓
b)``, computed as a cokernel; ``Ran_p F (b)`` is the limit over ``(b ↓
p)``, computed as a kernel. Both stay in matrix form: every extension
keeps its ``proj``/``section`` (or ``incl``) pair so induced maps can be
written as ``Q' · P · S``.
"""
from dataclasses import dataclass
from typing import Dict, List, Sequence, Tuple
import logging

import numpy as np

from ldtt.errors import BaseMismatch, NotAPullback, SizeOverflow
from ldtt.gf import (Mat, cokernel, hstack, idmat, kernel_basis, kron, solve,
                     vstack)
from ldtt.models.groupoids import (DEFAULT_SIZE_CAP, FinGroupoid, Functor,
                                   NatTrans, VectDiagram, build_groupoid,
                                   nat_transformations, precompose,
                                   tensor_diagrams)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Comma:
    """Objects of a comma groupoid over a fixed object of the base.

    ``objects[j] = (a, f)``; for ``(p ↓ b)`` ``f : p(a) -> b``, for
    ``(b ↓ p)`` ``f : b -> p(a)``. ``arrows`` lists ``(α, j, j')`` for
    each morphism ``α : a_j -> a_j'`` of the comma groupoid.
    """
    objects: Tuple[Tuple[int, int], ...]
    index: Dict[Tuple[int, int], int]
    offsets: Tuple[int, ...]
    dims: Tuple[int, ...]
    arrows: Tuple[Tuple[int, int, int], ...]

    @property
    def total(self) -> int:
        return sum(self.dims)

    def embed(self, j: int, p: int) -> Mat:
        """``ι_j : F(a_j) -> ⊕ F(a)``."""
        out = np.zeros((self.total, self.dims[j]), dtype=np.int64)
        out[self.offsets[j]:self.offsets[j] + self.dims[j], :] = np.eye(
            self.dims[j], dtype=np.int64)
        return Mat(out, p)

    def select(self, j: int, p: int) -> Mat:
        """``π_j : ⊕ F(a) -> F(a_j)``."""
        return self.embed(j, p).T


def _comma(p: Functor, b: int, dims: Sequence[int], under: bool,
           size_cap: int) -> Comma:
    a_gpd, b_gpd = p.src, p.tgt
    objects = []
    for a in a_gpd.objects:
        hom = (b_gpd.hom(p.ob[a], b) if under else b_gpd.hom(b, p.ob[a]))
        objects.extend((a, f) for f in hom)
    if len(objects) > size_cap:
        raise SizeOverflow(f"comma groupoid with {len(objects)} objects is "
                           f"over the cap of {size_cap}")
    index = {obj: j for j, obj in enumerate(objects)}
    arrows = []
    for j, (a, f) in enumerate(objects):
        for alpha in a_gpd.outgoing(a):
            pa = p.mor[alpha]
            if under:
                g = b_gpd.compose(f, b_gpd.inv[pa])
            else:
                g = b_gpd.compose(pa, f)
            arrows.append((alpha, j, index[(a_gpd.dst[alpha], g)]))
    obj_dims = tuple(dims[a] for a, _ in objects)
    offsets = tuple(int(x) for x in np.cumsum((0, ) + obj_dims)[:-1])
    return Comma(tuple(objects), index, offsets, obj_dims, tuple(arrows))


@dataclass(frozen=True)
class Colimit:
    comma: Comma
    proj: Mat
    section: Mat

    @property
    def dim(self) -> int:
        return self.proj.rows


@dataclass(frozen=True)
class Limit:
    comma: Comma
    incl: Mat

    @property
    def dim(self) -> int:
        return self.incl.cols


def _colimit(p: Functor, f: VectDiagram, b: int, size_cap: int) -> Colimit:
    comma = _comma(p, b, f.dims, True, size_cap)
    relations = [
        Mat(comma.embed(j, f.p)[:, :] -
            (comma.embed(k, f.p) @ f.mats[alpha])[:, :], f.p)
        for alpha, j, k in comma.arrows
    ]
    rel = hstack(relations, rows=comma.total, p=f.p)
    proj, dim = cokernel(rel)
    section = solve(proj, idmat(dim, f.p))
    return Colimit(comma, proj, section)


def _limit(p: Functor, f: VectDiagram, b: int, size_cap: int) -> Limit:
    comma = _comma(p, b, f.dims, False, size_cap)
    rows = [
        Mat(comma.select(k, f.p)[:, :] -
            (f.mats[alpha] @ comma.select(j, f.p))[:, :], f.p)
        for alpha, j, k in comma.arrows
    ]
    diff = vstack(rows, cols=comma.total, p=f.p)
    return Limit(comma, kernel_basis(diff))


def _block_move(src: Comma, dst: Comma, target: Sequence[int],
                blocks: Sequence[Mat], p: int) -> Mat:
    """``dst.total x src.total``: block ``j`` goes to block
    ``target[j]`` through ``blocks[j]``."""
    out = np.zeros((dst.total, src.total), dtype=np.int64)
    for j, (k, m) in enumerate(zip(target, blocks)):
        r, c = dst.offsets[k], src.offsets[j]
        out[r:r + dst.dims[k], c:c + src.dims[j]] += m[:, :]
    return Mat(out, p)


@dataclass(frozen=True)
class LeftKan:
    functor: Functor
    source: VectDiagram
    diagram: VectDiagram
    unit: NatTrans
    colimits: Tuple[Colimit, ...]


@dataclass(frozen=True)
class RightKan:
    functor: Functor
    source: VectDiagram
    diagram: VectDiagram
    counit: NatTrans
    limits: Tuple[Limit, ...]


def _check_base(p: Functor, f: VectDiagram) -> None:
    if f.base != p.src:
        raise BaseMismatch("diagram is not over the domain of the functor")


def lan(p: Functor, f: VectDiagram,
        size_cap: int = DEFAULT_SIZE_CAP) -> LeftKan:
    """``Lan_p F`` with its unit ``F => p* Lan_p F``."""
    _check_base(p, f)
    b_gpd = p.tgt
    colims = tuple(_colimit(p, f, b, size_cap) for b in b_gpd.objects)
    mats = []
    for beta in b_gpd.morphisms:
        s, t = colims[b_gpd.src[beta]], colims[b_gpd.dst[beta]]
        target = [
            t.comma.index[(a, b_gpd.compose(beta, g))]
            for a, g in s.comma.objects
        ]
        blocks = [idmat(d, f.p) for d in s.comma.dims]
        move = _block_move(s.comma, t.comma, target, blocks, f.p)
        mats.append(t.proj @ move @ s.section)
    diagram = VectDiagram(b_gpd, tuple(c.dim for c in colims), tuple(mats),
                          f.p)
    unit = []
    for a in p.src.objects:
        c = colims[p.ob[a]]
        j = c.comma.index[(a, b_gpd.identities[p.ob[a]])]
        unit.append(c.proj @ c.comma.embed(j, f.p))
    unit_nt = NatTrans(f, precompose(p, diagram), tuple(unit))
    logger.debug("lan: dims %s", diagram.dims)
    return LeftKan(p, f, diagram, unit_nt, colims)


def ran(p: Functor, f: VectDiagram,
        size_cap: int = DEFAULT_SIZE_CAP) -> RightKan:
    """``Ran_p F`` with its counit ``p* Ran_p F => F``."""
    _check_base(p, f)
    b_gpd = p.tgt
    lims = tuple(_limit(p, f, b, size_cap) for b in b_gpd.objects)
    mats = []
    for beta in b_gpd.morphisms:
        s, t = lims[b_gpd.src[beta]], lims[b_gpd.dst[beta]]
        # component (a, g') of the target reads component (a, g' . β)
        target = [
            s.comma.index[(a, b_gpd.compose(g, beta))]
            for a, g in t.comma.objects
        ]
        blocks = [idmat(d, f.p) for d in t.comma.dims]
        pick = _block_move(t.comma, s.comma, target, blocks, f.p).T
        mats.append(solve(t.incl, pick @ s.incl))
    diagram = VectDiagram(b_gpd, tuple(lim.dim for lim in lims),
                          tuple(mats), f.p)
    counit = []
    for a in p.src.objects:
        lim = lims[p.ob[a]]
        j = lim.comma.index[(a, b_gpd.identities[p.ob[a]])]
        counit.append(lim.comma.select(j, f.p) @ lim.incl)
    counit_nt = NatTrans(precompose(p, diagram), f, tuple(counit))
    logger.debug("ran: dims %s", diagram.dims)
    return RightKan(p, f, diagram, counit_nt, lims)


def lan_map(p: Functor, tau: NatTrans,
            size_cap: int = DEFAULT_SIZE_CAP) -> NatTrans:
    """``Lan_p τ : Lan_p F => Lan_p F'``."""
    src, tgt = lan(p, tau.src, size_cap), lan(p, tau.tgt, size_cap)
    comps = []
    for b in p.tgt.objects:
        s, t = src.colimits[b], tgt.colimits[b]
        blocks = [tau.components[a] for a, _ in s.comma.objects]
        move = _block_move(s.comma, t.comma, range(len(blocks)), blocks,
                           tau.src.p)
        comps.append(t.proj @ move @ s.section)
    return NatTrans(src.diagram, tgt.diagram, tuple(comps))


def ran_map(p: Functor, tau: NatTrans,
            size_cap: int = DEFAULT_SIZE_CAP) -> NatTrans:
    """``Ran_p τ : Ran_p F => Ran_p F'``."""
    src, tgt = ran(p, tau.src, size_cap), ran(p, tau.tgt, size_cap)
    comps = []
    for b in p.tgt.objects:
        s, t = src.limits[b], tgt.limits[b]
        blocks = [tau.components[a] for a, _ in s.comma.objects]
        move = _block_move(s.comma, t.comma, range(len(blocks)), blocks,
                           tau.src.p)
        comps.append(solve(t.incl, move @ s.incl))
    return NatTrans(src.diagram, tgt.diagram, tuple(comps))


def lan_counit(p: Functor, g: VectDiagram,
               size_cap: int = DEFAULT_SIZE_CAP) -> NatTrans:
    """``Lan_p p*G => G``."""
    ext = lan(p, precompose(p, g), size_cap)
    comps = []
    for b in p.tgt.objects:
        c = ext.colimits[b]
        eval_map = hstack([g.mats[f] for _, f in c.comma.objects],
                          rows=g.dims[b],
                          p=g.p)
        comps.append(eval_map @ c.section)
    return NatTrans(ext.diagram, g, tuple(comps))


def ran_unit(p: Functor, g: VectDiagram,
             size_cap: int = DEFAULT_SIZE_CAP) -> NatTrans:
    """``G => Ran_p p*G``."""
    ext = ran(p, precompose(p, g), size_cap)
    comps = []
    for b in p.tgt.objects:
        lim = ext.limits[b]
        spread = vstack([g.mats[f] for _, f in lim.comma.objects],
                        cols=g.dims[b],
                        p=g.p)
        comps.append(solve(lim.incl, spread))
    return NatTrans(g, ext.diagram, tuple(comps))


def _is_identity(t: NatTrans) -> bool:
    return all(c == idmat(c.rows, c.p) for c in t.components)


def _restrict(p: Functor, t: NatTrans) -> NatTrans:
    return NatTrans(
        precompose(p, t.src), precompose(p, t.tgt),
        tuple(t.components[b] for b in p.ob))


def _hom_bijection(transposes: List[NatTrans], other_side: int) -> bool:
    seen = {tuple(t.components) for t in transposes}
    return len(seen) == len(transposes) == other_side


def check_lan_adjunction(p: Functor, f: VectDiagram, g: VectDiagram,
                         size_cap: int = DEFAULT_SIZE_CAP) -> bool:
    """``Lan_p ⊣ p*`` at ``F`` over the domain and ``G`` over the
    codomain: both triangle identities and a bijection of hom sets."""
    ext = lan(p, f, size_cap)
    ext.unit.audit()
    ext.diagram.audit()
    left = lan_map(p, ext.unit, size_cap).then(
        lan_counit(p, ext.diagram, size_cap))
    pg = precompose(p, g)
    right = lan(p, pg, size_cap).unit.then(
        _restrict(p, lan_counit(p, g, size_cap)))
    if not (_is_identity(left) and _is_identity(right)):
        logger.info("lan adjunction: triangle identity fails")
        return False
    transposes = [
        ext.unit.then(_restrict(p, t))
        for t in nat_transformations(ext.diagram, g, size_cap)
    ]
    count = sum(1 for _ in nat_transformations(f, pg, size_cap))
    return _hom_bijection(transposes, count)


def check_ran_adjunction(p: Functor, g: VectDiagram, f: VectDiagram,
                         size_cap: int = DEFAULT_SIZE_CAP) -> bool:
    """``p* ⊣ Ran_p`` at ``G`` over the codomain and ``F`` over the
    domain."""
    ext = ran(p, f, size_cap)
    ext.counit.audit()
    ext.diagram.audit()
    left = ran_unit(p, ext.diagram, size_cap).then(
        ran_map(p, ext.counit, size_cap))
    pg = precompose(p, g)
    right = _restrict(p, ran_unit(p, g, size_cap)).then(
        ran(p, pg, size_cap).counit)
    if not (_is_identity(left) and _is_identity(right)):
        logger.info("ran adjunction: triangle identity fails")
        return False
    transposes = [
        _restrict(p, t).then(ext.counit)
        for t in nat_transformations(g, ext.diagram, size_cap)
    ]
    count = sum(1 for _ in nat_transformations(pg, f, size_cap))
    return _hom_bijection(transposes, count)


def check_adjunction(p: Functor, f: VectDiagram, g: VectDiagram,
                     size_cap: int = DEFAULT_SIZE_CAP) -> bool:
    """``Lan_p ⊣ p* ⊣ Ran_p`` at ``F`` over ``A`` and ``G`` over ``B``."""
    return (check_lan_adjunction(p, f, g, size_cap)
            and check_ran_adjunction(p, g, f, size_cap))


# Beck-Chevalley


@dataclass(frozen=True)
class Square:
    """A commuting square of groupoids

        A' --f'--> A
        |          |
        q          p
        v          v
        C  --f-->  B
    """
    p: Functor
    f: Functor
    q: Functor
    f_: Functor

    def audit(self) -> "Square":
        if (self.f_.then(self.p).ob != self.q.then(self.f).ob
                or self.f_.then(self.p).mor != self.q.then(self.f).mor):
            raise NotAPullback("square does not commute")
        strict = pullback(self.p, self.f)
        ob = [(self.q.ob[x], self.f_.ob[x]) for x in self.q.src.objects]
        mor = [(self.q.mor[m], self.f_.mor[m])
               for m in self.q.src.morphisms]
        if (sorted(ob) != sorted(strict.q.src.object_labels)
                or sorted(mor) != sorted(strict.q.src.morphism_labels)):
            raise NotAPullback("square is not a strict pullback")
        return self


def pullback(p: Functor, f: Functor) -> Square:
    """The strict pullback of ``p : A -> B`` along ``f : C -> B``."""
    if p.tgt != f.tgt:
        raise BaseMismatch("functors have different codomains")
    c, a = f.src, p.src
    objects = [(x, y) for x in c.objects for y in a.objects
               if f.ob[x] == p.ob[y]]
    morphisms = [((u, v), (c.src[u], a.src[v]), (c.dst[u], a.dst[v]))
                 for u in c.morphisms for v in a.morphisms
                 if f.mor[u] == p.mor[v]]
    top: FinGroupoid = build_groupoid(
        objects, morphisms, lambda g, h:
        (c.compose(g[0], h[0]), a.compose(g[1], h[1])), lambda x:
        (c.identities[x[0]], a.identities[x[1]]), lambda g:
        (c.inv[g[0]], a.inv[g[1]]))
    q = Functor(top, c, tuple(x for x, _ in objects),
                tuple(u for (u, _), _, _ in morphisms))
    f_ = Functor(top, a, tuple(y for _, y in objects),
                 tuple(v for (_, v), _, _ in morphisms))
    return Square(p, f, q, f_)


def beck_chevalley_lan(square: Square, f: VectDiagram,
                       size_cap: int = DEFAULT_SIZE_CAP) -> NatTrans:
    """``Lan_q f'*F => f* Lan_p F``."""
    sq = square
    low = lan(sq.q, precompose(sq.f_, f), size_cap)
    high = lan(sq.p, f, size_cap)
    comps = []
    for x in sq.f.src.objects:
        s, t = low.colimits[x], high.colimits[sq.f.ob[x]]
        target = [
            t.comma.index[(sq.f_.ob[a], sq.f.mor[u])]
            for a, u in s.comma.objects
        ]
        blocks = [idmat(d, f.p) for d in s.comma.dims]
        move = _block_move(s.comma, t.comma, target, blocks, f.p)
        comps.append(t.proj @ move @ s.section)
    return NatTrans(low.diagram, precompose(sq.f, high.diagram),
                    tuple(comps))


def beck_chevalley_ran(square: Square, f: VectDiagram,
                       size_cap: int = DEFAULT_SIZE_CAP) -> NatTrans:
    """``f* Ran_p F => Ran_q f'*F``."""
    sq = square
    low = ran(sq.q, precompose(sq.f_, f), size_cap)
    high = ran(sq.p, f, size_cap)
    comps = []
    for x in sq.f.src.objects:
        s, t = high.limits[sq.f.ob[x]], low.limits[x]
        target = [
            s.comma.index[(sq.f_.ob[a], sq.f.mor[u])]
            for a, u in t.comma.objects
        ]
        blocks = [idmat(d, f.p) for d in t.comma.dims]
        pick = _block_move(t.comma, s.comma, target, blocks, f.p).T
        comps.append(solve(t.incl, pick @ s.incl))
    return NatTrans(precompose(sq.f, high.diagram), low.diagram,
                    tuple(comps))


def check_beck_chevalley(square: Square, f: VectDiagram,
                         size_cap: int = DEFAULT_SIZE_CAP) -> bool:
    """Both comparison maps are natural isomorphisms.

    Raises ``NotAPullback`` when the square is not a strict pullback.
    """
    square.audit()
    for t in (beck_chevalley_lan(square, f, size_cap),
              beck_chevalley_ran(square, f, size_cap)):
        t.audit()
        if not t.is_iso():
            return False
    return True


# Frobenius


def frobenius_lan(p: Functor, xi: VectDiagram, f: VectDiagram,
                  size_cap: int = DEFAULT_SIZE_CAP) -> NatTrans:
    """``Lan_p(p*Ξ ⊗ F) => Ξ ⊗ Lan_p F``."""
    mixed = lan(p, tensor_diagrams(precompose(p, xi), f), size_cap)
    plain = lan(p, f, size_cap)
    comps = []
    for b in p.tgt.objects:
        s, c = mixed.colimits[b], plain.colimits[b]
        blocks = [
            kron(xi.mats[g], c.proj @ c.comma.embed(j, f.p))
            for j, (_, g) in enumerate(c.comma.objects)
        ]
        comps.append(
            hstack(blocks, rows=xi.dims[b] * c.dim, p=f.p) @ s.section)
    return NatTrans(mixed.diagram, tensor_diagrams(xi, plain.diagram),
                    tuple(comps))


def frobenius_ran(p: Functor, xi: VectDiagram, f: VectDiagram,
                  size_cap: int = DEFAULT_SIZE_CAP) -> NatTrans:
    """``Ξ ⊗ Ran_p F => Ran_p(p*Ξ ⊗ F)``."""
    mixed = ran(p, tensor_diagrams(precompose(p, xi), f), size_cap)
    plain = ran(p, f, size_cap)
    comps = []
    for b in p.tgt.objects:
        t, lim = mixed.limits[b], plain.limits[b]
        blocks = [
            kron(xi.mats[g], lim.comma.select(j, f.p) @ lim.incl)
            for j, (_, g) in enumerate(lim.comma.objects)
        ]
        spread = vstack(blocks, cols=xi.dims[b] * lim.dim, p=f.p)
        comps.append(solve(t.incl, spread))
    return NatTrans(tensor_diagrams(xi, plain.diagram), mixed.diagram,
                    tuple(comps))


def check_frobenius(p: Functor, xi: VectDiagram, f: VectDiagram,
                    size_cap: int = DEFAULT_SIZE_CAP) -> bool:
    """Both projection maps are natural isomorphisms."""
    if xi.base != p.tgt:
        raise BaseMismatch("Ξ must be a diagram over the codomain")
    for t in (frobenius_lan(p, xi, f, size_cap),
              frobenius_ran(p, xi, f, size_cap)):
        t.audit()
        if not t.is_iso():
            return False
    return True

