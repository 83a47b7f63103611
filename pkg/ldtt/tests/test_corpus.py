import pytest

from ldtt.config import EqFlags
from ldtt.corpus import CORPUS, corpus_isos, counit_source, load_entry


def test_every_entry_is_accepted():
    results = corpus_isos()
    assert [name for name, _ in results] == [name for name, _ in CORPUS]
    failed = {name: r.message for name, r in results if not r.accepted}
    assert not failed


def test_counit_instances_are_appended():
    decls = load_entry("counit")
    assert "eps" in [d.name for d in decls]
    assert counit_source().count("checkeq") == sum(
        d.kind == "eq-check" for d in decls) - 2


def test_unknown_entry():
    with pytest.raises(ValueError):
        load_entry("fmapX")


def test_flags_are_only_added_to():
    results = corpus_isos(EqFlags.all_on())
    assert all(r.accepted for _, r in results)
