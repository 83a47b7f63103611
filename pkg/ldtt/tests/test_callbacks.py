import pytest
from pydantic import ValidationError

from ldtt.callbacks import (DetailedPrintCallback, JsonReportCallback,
                            ReportDocument, ReportLoggingCallback,
                            TablePrintCallback)
from ldtt.callbacks.utils import (SortedKeysMixin,
                                  add_callback_if_not_already_in, make_row,
                                  report_row)


def rows():
    return [
        make_row("a.ldtt", "id", True, location="a.ldtt:3:1"),
        make_row("a.ldtt", "dup", False, reason="LinearViolation",
                 message="a used twice", trace=["lvar", "⊗-I"]),
    ]


def run(callback, batches, **finish_info):
    callback.start(command="check")
    for batch in batches:
        callback.handle_result(batch, command="check")
    callback.finish(command="check", **finish_info)
    return callback


def test_sorted_keys():
    keys = ["message", "zeta", "outcome", "unit", "alpha", "entry"]
    assert SortedKeysMixin()._sorted_keys(keys) == [
        "unit", "entry", "outcome", "alpha", "zeta", "message"
    ]
    assert SortedKeysMixin()._sorted_keys(keys, {"zeta", "unit"}) == [
        "entry", "outcome", "alpha", "message"
    ]


@pytest.mark.parametrize("ok,outcome", [(True, "passed"), (False, "failed"),
                                        (None, "skipped")])
def test_make_row_outcome(ok, outcome):
    assert make_row("u", "e", ok)["outcome"] == outcome


def test_report_row(check_source):
    ok, bad = check_source("def lid (A : L ; a : El A) : El A := a;\n"
                           "def twice (A : L ; a : El A) : El A * El A "
                           ":= a * a;")
    assert report_row("u", ok)["outcome"] == "accepted"
    row = report_row("u", bad)
    assert row["outcome"] == "rejected"
    assert row["reason"] == "LinearViolation"
    assert row["entry"] == "twice"


def test_add_callback_if_not_already_in():
    callbacks = [("report", ReportLoggingCallback())]
    assert not add_callback_if_not_already_in("report",
                                              TablePrintCallback(),
                                              callbacks)
    assert not add_callback_if_not_already_in("other",
                                              ReportLoggingCallback(),
                                              callbacks)
    assert add_callback_if_not_already_in("json", JsonReportCallback(),
                                          callbacks)
    assert add_callback_if_not_already_in("table", TablePrintCallback(),
                                          callbacks)
    assert not add_callback_if_not_already_in("json2", JsonReportCallback(),
                                              callbacks)
    assert [name for name, _ in callbacks] == ["report", "json", "table"]


def test_logging_callback_summary():
    cb = run(ReportLoggingCallback(), [rows()[:1], rows()[1:]])
    assert not cb.passed
    assert cb.summary() == {"passed": 1, "failed": 1}
    assert len(cb.history) == 2
    table = cb.summary_table()
    assert table.loc["a.ldtt", "failed"] == 1


def test_table_prints_header_once():
    out = []
    run(TablePrintCallback(sink=out.append, color=False,
                           print_summary=False), [rows()[:1], rows()[1:]])
    # header, rule, one line per row
    assert len(out) == 4
    assert "entry" in out[0] and "outcome" in out[0]
    assert "unit" not in out[0]
    assert "LinearViolation" in out[3]


def test_table_summary():
    out = []
    run(TablePrintCallback(sink=out.append, color=False), [rows()])
    assert out[4] == ""
    assert "failed" in out[5]


def test_detailed_print_keeps_the_trace():
    out = []
    run(DetailedPrintCallback(sink=out.append), [rows()])
    assert list(out[1])[:3] == ["unit", "entry", "outcome"]
    assert out[1]["trace"] == ["lvar", "⊗-I"]


def test_json_report():
    out = []
    cb = run(JsonReportCallback(sink=out.append), [rows()],
             config={"prime": 2})
    assert len(out) == 1
    doc = ReportDocument.model_validate_json(out[0])
    assert doc == cb.document_
    assert doc.schema_version == "ldtt.report/1"
    assert not doc.passed
    assert doc.summary == {"passed": 1, "failed": 1}
    assert doc.entries[1].trace == ["lvar", "⊗-I"]


def test_json_report_to_file(tmp_path):
    path = tmp_path / "report.json"
    out = []
    run(JsonReportCallback(path, sink=out.append), [rows()[:1]])
    assert out == []
    assert ReportDocument.model_validate_json(path.read_text()).passed


def test_report_document_is_consistent():
    entry = make_row("u", "e", False)
    with pytest.raises(ValidationError, match="disagrees"):
        ReportDocument(command="check", entries=[entry],
                       summary={"failed": 1}, passed=True)
    with pytest.raises(ValidationError, match="add up"):
        ReportDocument(command="check", entries=[entry], summary={},
                       passed=False)
    with pytest.raises(ValidationError, match="unknown outcome"):
        ReportDocument(command="check",
                       entries=[dict(entry, outcome="maybe")],
                       summary={"maybe": 1}, passed=True)
