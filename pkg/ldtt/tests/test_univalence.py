import pytest

from ldtt.errors import BaseMismatch, NotInvertibleComponent, SizeOverflow
from ldtt.gf import Mat, zeros
from ldtt.models.groupoids import (NatTrans, VectDiagram, cyclic_group,
                                   discrete, terminal)
from ldtt.models.univalence import (Universe, ua_backward,
                                    ua_from_biinvertible, ua_forward,
                                    ua_roundtrip_check, univalence_report)


def trivial():
    return VectDiagram.constant(cyclic_group(2), 1, 3)


def sign():
    return VectDiagram.from_action(cyclic_group(2), (1, ),
                                   lambda u: [[1 if u == 0 else 2]], 3)


@pytest.fixture
def universe():
    return Universe(cyclic_group(2), 1, 3)


def test_code_and_el_are_inverse(universe):
    for d in (trivial(), sign()):
        assert universe.el(universe.code(d)) == d


def test_code_rejects_foreign_representations(universe):
    with pytest.raises(SizeOverflow):
        universe.code(VectDiagram.constant(cyclic_group(2), 2, 3))
    with pytest.raises(BaseMismatch):
        universe.code(VectDiagram.constant(discrete(2), 1, 3))
    with pytest.raises(BaseMismatch, match="GF"):
        universe.code(VectDiagram.constant(cyclic_group(2), 1, 2))


def test_ua_round_trip(universe):
    s = sign()
    iso = NatTrans(s, s, (Mat([[2]], 3), ))
    path = ua_forward(universe, iso)
    assert ua_backward(universe, path).components == iso.components
    assert ua_forward(universe, ua_backward(universe, path)) == path


def test_identity_sections_match_isomorphisms(universe):
    a, b = universe.code(trivial()), universe.code(sign())
    assert len(list(universe.id_sections(a, a))) == 2
    assert list(universe.id_sections(a, b)) == []


def test_section_functor_lands_in_the_identity_type(universe):
    a = universe.code(sign())
    for s in universe.id_sections(a, a):
        fn = universe.section_functor(s)
        assert fn.tgt == universe.id_type.total


def test_zero_map_is_not_a_path():
    d = VectDiagram.constant(terminal(), 1, 3)
    with pytest.raises(NotInvertibleComponent):
        ua_forward(Universe(terminal(), 1, 3),
                   NatTrans(d, d, (zeros(1, 1, 3), )))


def test_biinvertible_premises(universe):
    s = sign()
    f = NatTrans(s, s, (Mat([[2]], 3), ))
    assert ua_from_biinvertible(universe, f, f, f) == ua_forward(universe, f)
    one = NatTrans(s, s, (Mat([[1]], 3), ))
    with pytest.raises(NotInvertibleComponent, match="g . f"):
        ua_from_biinvertible(universe, f, one, f)


def test_trivial_and_sign_are_not_equal():
    report = univalence_report(cyclic_group(2), 1, 3, "BZ/2",
                               types=[trivial(), sign()])
    assert report.passed
    # two automorphisms each, none between them
    assert report.isos == 4
    assert report.sections == 4
    assert report.pairs == 4


def test_univalence_over_the_point():
    report = univalence_report(terminal(), 1, 3)
    assert report
    # dims 0 and 1; GL_0 and GL_1(F_3)
    assert report.linear_types == 2
    assert report.isos == report.sections == 3


@pytest.mark.parametrize("base", [terminal(), discrete(2), cyclic_group(2)])
def test_roundtrip_check(base):
    assert ua_roundtrip_check(base, 1, 2)
