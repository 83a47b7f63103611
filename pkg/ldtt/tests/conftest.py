from typing import List, Optional

import numpy as np
import pytest

from ldtt.config import EqFlags
from ldtt.kernel import CheckReport, check_decls
from ldtt.parser import load


def _check_source(source: str,
                  flags: Optional[EqFlags] = None) -> List[CheckReport]:
    decls = load(source)
    return [
        r for d, r in zip(decls, check_decls(decls, flags))
        if d.pragma is None
    ]


@pytest.fixture
def check_source():
    """Check every declaration of a source string; pragmas dropped."""
    return _check_source


@pytest.fixture
def accepts(check_source):
    def _accepts(source: str, flags: Optional[EqFlags] = None) -> bool:
        reports = check_source(source, flags)
        return bool(reports) and all(r.accepted for r in reports)

    return _accepts


@pytest.fixture
def rejection(check_source):
    """Reason of the last report, which must be a rejection."""

    def _rejection(source: str, flags: Optional[EqFlags] = None) -> str:
        report = check_source(source, flags)[-1]
        assert not report.accepted, report
        return report.reason

    return _rejection


@pytest.fixture
def rng():
    return np.random.default_rng(0)
