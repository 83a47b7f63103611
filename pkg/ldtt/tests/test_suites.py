import pytest

from ldtt.callbacks.constants import BAD_OUTCOMES, OUTCOMES
from ldtt.config import RunConfig
from ldtt.suites import SUITES, fibrations


def bad(rows):
    return [r for r in rows if r["outcome"] in BAD_OUTCOMES]


def test_fibrations_are_diagrams():
    names = [name for name, _ in fibrations()]
    assert len(names) == len(set(names)) == 6
    for _, a in fibrations():
        a.audit()


@pytest.mark.parametrize("suite", sorted(SUITES))
def test_suite_passes(suite):
    rows = SUITES[suite](RunConfig(prime=3, universe_dim_cap=1))
    assert rows
    assert {r["outcome"] for r in rows} <= set(OUTCOMES)
    assert bad(rows) == []


def test_suites_are_reproducible():
    config = RunConfig(seed=7)
    first = [(r["entry"], r["outcome"]) for r in SUITES["fam"](config)]
    second = [(r["entry"], r["outcome"]) for r in SUITES["fam"](config)]
    assert first == second


def test_fam_control_fails_as_expected():
    rows = SUITES["fam"](RunConfig())
    (control, ) = [r for r in rows if r["unit"] == "fam/control"]
    assert control["outcome"] == "passed"
    assert control["failures"]
