from pathlib import Path
import json

import pytest

from ldtt.errors import BaseMismatch, InvalidGroupoid, SizeOverflow
from ldtt.gf import Mat
from ldtt.models.groupoids import (FinGroupoid, Functor, GpdDiagram,
                                   GSection, VectDiagram, arrow_category,
                                   check_sigma_pairing, codiscrete,
                                   connected_components, cyclic_group,
                                   diagonal, discrete, extend_twice,
                                   grothendieck, groupoid_from_json,
                                   load_groupoid, load_vect_diagram,
                                   nat_transformations, precompose,
                                   random_representation,
                                   representations, small_groupoids,
                                   tensor_diagrams, terminal,
                                   vect_diagram_from_json, weakening)
from ldtt.suites import fibrations, sign_transport_example

SAMPLES = Path(__file__).resolve().parents[2] / "samples"


def sign(p=3):
    return VectDiagram.from_action(cyclic_group(2), (1, ),
                                   lambda u: [[1 if u == 0 else p - 1]], p)


def swap_diagram():
    d2 = discrete(2)
    return GpdDiagram(
        cyclic_group(2), (d2, ),
        (Functor.identity(d2), Functor(d2, d2, (1, 0), (1, 0)))).audit()


def test_small_groupoids_sizes():
    sizes = {
        name: (g.n_objects, g.n_morphisms)
        for name, g in small_groupoids()
    }
    assert sizes == {
        "1": (1, 1),
        "2": (2, 2),
        "3": (3, 3),
        "BZ/2": (1, 2),
        "BZ/3": (1, 3),
        "I": (2, 4),
        "I x BZ/2": (2, 8),
        "1 + BZ/2": (2, 3),
    }
    for _, g in small_groupoids():
        assert g.audit() is g


def test_audit_rejects_bad_inverse():
    g = FinGroupoid(1, (0, 0), (0, 0), ((0, 1), (1, 0)), (0, ), (0, 0))
    with pytest.raises(InvalidGroupoid, match="inverse"):
        g.audit()


def test_json_round_trip_and_malformed():
    g = cyclic_group(3)
    assert groupoid_from_json(g.to_json()) == g
    with pytest.raises(InvalidGroupoid, match="malformed"):
        groupoid_from_json({"objects": 1})


def test_load_vect_diagram():
    d = load_vect_diagram(str(SAMPLES / "bz2_sign.json"))
    assert d == sign(3)
    data = {"base": cyclic_group(2).to_json(), "dims": [1],
            "mats": [[[1]]], "prime": 3}
    with pytest.raises(InvalidGroupoid, match="one matrix per morphism"):
        vect_diagram_from_json(data)


def test_diagram_must_be_functorial():
    with pytest.raises(InvalidGroupoid, match="functorial"):
        VectDiagram.from_action(cyclic_group(3), (1, ),
                                lambda u: [[1 if u == 0 else 2]], 3)


def test_functor_audit_and_composition():
    bz2 = cyclic_group(2)
    with pytest.raises(InvalidGroupoid, match="identity"):
        Functor(bz2, bz2, (0, ), (1, 0)).audit()
    bang = Functor.to_terminal(bz2).audit()
    assert Functor.identity(bz2).then(bang) == bang
    with pytest.raises(BaseMismatch):
        bang.then(Functor.identity(bz2))


def test_grothendieck_of_constant_and_swap():
    total, proj = grothendieck(
        GpdDiagram.constant(cyclic_group(2), discrete(2)))
    assert (total.n_objects, total.n_morphisms) == (2, 4)
    assert connected_components(total) == [0, 1]
    proj.audit()

    total, proj = grothendieck(swap_diagram())
    assert (total.n_objects, total.n_morphisms) == (2, 4)
    # the swap glues the two points
    assert connected_components(total) == [0, 0]
    proj.audit()


def test_grothendieck_respects_size_cap():
    with pytest.raises(SizeOverflow):
        grothendieck(GpdDiagram.constant(cyclic_group(2), discrete(2)),
                     size_cap=1)


def test_precompose():
    _, proj = grothendieck(swap_diagram())
    pulled = precompose(proj, sign())
    assert pulled.dims == (1, 1)
    pulled.audit()
    with pytest.raises(BaseMismatch):
        precompose(Functor.identity(discrete(2)), sign())


def test_tensor_of_signs_is_trivial():
    s = sign(3)
    assert tensor_diagrams(s, s) == VectDiagram.constant(cyclic_group(2), 1,
                                                         3)


def test_nat_transformations():
    trivial = VectDiagram.constant(cyclic_group(2), 1, 3)
    assert len(list(nat_transformations(trivial, trivial))) == 3
    only = list(nat_transformations(trivial, sign(3)))
    assert len(only) == 1 and only[0].components[0].is_zero()
    with pytest.raises(SizeOverflow):
        list(nat_transformations(trivial, trivial, size_cap=2))


def test_representations():
    assert len(list(representations(cyclic_group(2), [1], 3))) == 2
    assert len(list(representations(cyclic_group(2), [1], 2))) == 1
    assert len(list(representations(codiscrete(2), [1, 1], 3))) == 2
    assert list(representations(codiscrete(2), [1, 2], 3)) == []
    assert len(list(representations(cyclic_group(2), [1], 3,
                                    limit=1))) == 1


def test_random_representation_is_constant_on_components(rng):
    d = random_representation(rng, codiscrete(2), 2, 3)
    assert d.dims[0] == d.dims[1]
    d.audit()


def test_diagonal_is_a_section():
    a = GpdDiagram.constant(terminal(), cyclic_group(2))
    ex = extend_twice(a)
    assert ex.diagonal.then(ex.proj2) == Functor.identity(ex.ext)
    assert diagonal(a) == ex.diagonal


@pytest.mark.parametrize("name,a", fibrations())
def test_sigma_pairing(name, a):
    total, _ = grothendieck(a)
    assert check_sigma_pairing(a, GpdDiagram.constant(total, discrete(2)))


def test_section_audit():
    a = GpdDiagram.constant(terminal(), cyclic_group(2))
    GSection(a, (0, ), (0, )).audit()
    with pytest.raises(InvalidGroupoid, match="unital"):
        GSection(a, (0, ), (1, )).audit()


def test_refl_lies_over_the_diagonal():
    a = GpdDiagram.constant(cyclic_group(2), discrete(2))
    ids = arrow_category(a)
    assert ids.refl.then(ids.proj) == diagonal(a)


def test_phi_at_refl_is_trivial():
    fiber = cyclic_group(2)
    a = GpdDiagram.constant(terminal(), fiber)
    ids = arrow_category(a)
    m = GSection(a, (0, ), (fiber.identities[0], )).audit()
    (f, ) = ids.phi(m, m, (fiber.identities[0], ))
    assert ids.total.identities[ids.total.src[f]] == f


def test_sign_transport_differs_from_refl():
    along_loop, at_refl = sign_transport_example(3)
    assert at_refl == (Mat([[1]], 3), )
    assert along_loop == (Mat([[2]], 3), )


def test_weakening_is_the_projection():
    a = swap_diagram()
    assert weakening(a) == grothendieck(a)[1]
    assert weakening(a).tgt == cyclic_group(2)


def test_load_groupoid(tmp_path):
    path = tmp_path / "bz3.json"
    path.write_text(json.dumps(cyclic_group(3).to_json()))
    assert load_groupoid(str(path)) == cyclic_group(3)


def test_section_as_functor():
    a = GpdDiagram.constant(terminal(), cyclic_group(2))
    total, proj = grothendieck(a)
    section = GSection(a, (0, ), (0, )).audit().as_functor(total).audit()
    assert section.then(proj) == Functor.identity(terminal())


def test_refl_path_points():
    fiber = cyclic_group(2)
    a = GpdDiagram.constant(terminal(), fiber)
    ids = arrow_category(a)
    m = GSection(a, (0, ), (fiber.identities[0], )).audit()
    assert ids.path_points(m, m, (fiber.identities[0], )) == (ids.refl.ob[0], )
