import pytest

from ldtt.errors import BaseMismatch, NotAPullback
from ldtt.models.groupoids import (Functor, GpdDiagram, VectDiagram,
                                   codiscrete, cyclic_group, discrete,
                                   grothendieck, random_representation,
                                   terminal)
from ldtt.models.kan import (Square, check_adjunction, check_beck_chevalley,
                             check_frobenius, lan, pullback, ran)
from ldtt.suites import fibrations


def sign(p):
    return VectDiagram.from_action(cyclic_group(2), (1, ),
                                   lambda u: [[1 if u == 0 else p - 1]], p)


def swap_projection():
    d2 = discrete(2)
    swap = GpdDiagram(
        cyclic_group(2), (d2, ),
        (Functor.identity(d2), Functor(d2, d2, (1, 0), (1, 0)))).audit()
    return grothendieck(swap)


def test_coinvariants_of_codiscrete():
    codisc = codiscrete(2)
    ext = lan(Functor.to_terminal(codisc), VectDiagram.constant(codisc, 1, 3))
    assert ext.diagram.dims == (1, )


@pytest.mark.parametrize("p,dims", [(3, (0, )), (2, (1, ))])
def test_sign_invariants_and_coinvariants(p, dims):
    bang = Functor.to_terminal(cyclic_group(2))
    assert ran(bang, sign(p)).diagram.dims == dims
    assert lan(bang, sign(p)).diagram.dims == dims


def test_trivial_action_keeps_everything():
    bz2 = cyclic_group(2)
    bang = Functor.to_terminal(bz2)
    trivial = VectDiagram.constant(bz2, 2, 3)
    assert lan(bang, trivial).diagram.dims == (2, )
    assert ran(bang, trivial).diagram.dims == (2, )


def test_units_are_natural():
    total, proj = swap_projection()
    f = VectDiagram.constant(total, 2, 3)
    ext = lan(proj, f)
    ext.diagram.audit()
    ext.unit.audit()
    r = ran(proj, f)
    r.diagram.audit()
    r.counit.audit()


def test_lan_and_ran_agree_on_a_covering(rng):
    total, proj = swap_projection()
    for _ in range(3):
        f = random_representation(rng, total, 2, 3)
        assert lan(proj, f).diagram.dims == ran(proj, f).diagram.dims


def test_diagram_over_the_wrong_base():
    with pytest.raises(BaseMismatch):
        lan(Functor.to_terminal(cyclic_group(2)),
            VectDiagram.constant(discrete(2), 1, 3))


def test_adjunction_on_sign():
    bang = Functor.to_terminal(cyclic_group(2))
    assert check_adjunction(bang, sign(3),
                            VectDiagram.constant(terminal(), 1, 3))


@pytest.mark.parametrize("name,a", fibrations()[:4])
def test_adjunction_on_fibrations(name, a, rng):
    total, proj = grothendieck(a)
    f = random_representation(rng, total, 1, 3)
    g = random_representation(rng, proj.tgt, 1, 3)
    assert check_adjunction(proj, f, g)


@pytest.mark.parametrize("name,a", fibrations())
def test_beck_chevalley(name, a, rng):
    total, proj = grothendieck(a)
    base = proj.tgt
    f = random_representation(rng, total, 2, 3)
    assert check_beck_chevalley(pullback(proj, Functor.identity(base)), f)
    assert check_beck_chevalley(
        pullback(proj, Functor.constant(terminal(), base, 0)), f)


def test_beck_chevalley_needs_a_pullback():
    bz2 = cyclic_group(2)
    one = terminal()
    square = Square(Functor.to_terminal(bz2), Functor.identity(one),
                    Functor.identity(one), Functor.constant(one, bz2, 0))
    with pytest.raises(NotAPullback, match="strict pullback"):
        check_beck_chevalley(square, sign(3))


@pytest.mark.parametrize("name,a", fibrations())
def test_frobenius(name, a, rng):
    total, proj = grothendieck(a)
    xi = random_representation(rng, proj.tgt, 2, 3)
    f = random_representation(rng, total, 2, 3)
    assert check_frobenius(proj, xi, f)


def test_frobenius_needs_xi_over_the_codomain():
    total, proj = swap_projection()
    f = VectDiagram.constant(total, 1, 3)
    with pytest.raises(BaseMismatch):
        check_frobenius(proj, f, f)
