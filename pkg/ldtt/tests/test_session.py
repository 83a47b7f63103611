from pathlib import Path

import pytest

from ldtt.callbacks import ReportLoggingCallback
from ldtt.config import RunConfig
from ldtt.errors import UnboundName
from ldtt.session import CheckSession, check_file

SAMPLES = Path(__file__).resolve().parents[2] / "samples"


@pytest.fixture
def history():
    return ReportLoggingCallback()


@pytest.fixture
def session(history):
    return CheckSession(RunConfig(), callbacks=[("report", history)])


def test_check_file_rows():
    rows = check_file(str(SAMPLES / "identity.ldtt"))
    assert [r["entry"] for r in rows][:2] == ["id", "compose"]
    assert all(r["outcome"] == "accepted" for r in rows)

    (row, ) = check_file(str(SAMPLES / "broken.ldtt"))
    assert row["outcome"] == "rejected"
    assert row["reason"] == "LinearViolation"
    assert row["entry"] == "dup"


def test_check_file_parse_error(tmp_path):
    path = tmp_path / "bad.ldtt"
    path.write_text("def f (A : U) : El A := ;\n")
    (row, ) = check_file(str(path))
    assert row["outcome"] == "rejected"
    assert row["reason"] == "ParseError"


def test_check_files_reports_in_order(session, history):
    paths = [SAMPLES / "identity.ldtt", SAMPLES / "broken.ldtt"]
    assert not session.check_files(paths)
    units = [r["unit"] for r in history.history]
    assert units[-1] == str(SAMPLES / "broken.ldtt")
    assert units[0] == str(SAMPLES / "identity.ldtt")
    assert session.check_files(paths[:1])


def test_default_callbacks_are_not_duplicated(session, history):
    session.initialize()
    assert session.callbacks_ == [("report", history)]


@pytest.mark.parametrize("verbose,json,kind", [
    (0, False, "ReportLoggingCallback"),
    (1, False, "TablePrintCallback"),
    (2, False, "DetailedPrintCallback"),
    (1, True, "JsonReportCallback"),
])
def test_default_callbacks(verbose, json, kind):
    config = RunConfig(verbose=verbose,
                       report_format="json" if json else "text")
    session = CheckSession(config, sink=lambda _: None).initialize()
    assert [type(c).__name__ for _, c in session.callbacks_] == [kind]


def test_disabled_callbacks():
    session = CheckSession(RunConfig(), callbacks="disable").initialize()
    assert session.callbacks_ == []
    assert session.check_files([SAMPLES / "identity.ldtt"])


def test_set_params(session):
    session.set_params(config=RunConfig(prime=3))
    assert not session.initialized_
    with pytest.raises(ValueError, match="Invalid parameter"):
        session.set_params(prime=3)


def test_normalize(session):
    assert session.normalize(SAMPLES / "identity.ldtt", "id") == "x"
    with pytest.raises(UnboundName):
        session.normalize(SAMPLES / "identity.ldtt", "nope")


def test_interp(session, history):
    assert session.interp(SAMPLES / "boxes.ldtt",
                          SAMPLES / "boxes_basis.json")
    outcomes = {r["outcome"] for r in history.history}
    assert outcomes == {"passed"}


def test_interp_reports_rejected_equations(session, history, tmp_path):
    path = tmp_path / "swap.ldtt"
    path.write_text("checkeq (A : L ; a : El A, b : El A)\n"
                    "  a * b == b * a : El A * El A;\n")
    basis = tmp_path / "basis.json"
    basis.write_text('{"A": {"vec": 2}}')
    assert not session.interp(path, basis)
    (row, ) = history.history
    assert row["outcome"] == "failed"


def test_model_test_unknown_suite(session):
    with pytest.raises(ValueError, match="unknown suite"):
        session.model_test("nope")


def test_corpus(session, history):
    assert session.corpus()
    assert {r["outcome"] for r in history.history} == {"accepted"}
