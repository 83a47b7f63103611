from typing import TYPE_CHECKING, Any, Dict, Optional, Sequence, Union

from ldtt.callbacks.constants import (ACCEPTED, FAILED, FAILURES_KEY, PASSED,
                                      REJECTED, SKIPPED, TRACE_KEY)

if TYPE_CHECKING:
    from ldtt.callbacks.report import ReportCallback  # noqa: F401
    from ldtt.kernel import CheckReport  # noqa: F401

FIRST_KEYS = ("unit", "entry", "outcome")
LAST_KEYS = ("message", )


class SortedKeysMixin:
    def _sorted_keys(self, keys, keys_ignored=None):
        """Sort keys, dropping the ones that should be ignored.

        'unit', 'entry' and 'outcome' are put first, 'message' last and
        the remaining keys are sorted alphabetically.
        """
        keys_ignored = keys_ignored or set()
        keys = [key for key in keys if key not in keys_ignored]
        sorted_keys = [key for key in FIRST_KEYS if key in keys]
        sorted_keys.extend(
            sorted(key for key in keys
                   if key not in FIRST_KEYS and key not in LAST_KEYS))
        sorted_keys.extend(key for key in LAST_KEYS if key in keys)
        return sorted_keys


def make_row(unit: str,
             entry: str,
             ok: Optional[bool],
             *,
             reason: Optional[str] = None,
             message: Optional[str] = None,
             location: Optional[str] = None,
             trace: Sequence[str] = (),
             failures: Sequence[int] = ()) -> Dict[str, Any]:
    """One result row of a model suite or a soundness check.

    ``ok=None`` marks an instance that could not be run.
    """
    outcome = SKIPPED if ok is None else (PASSED if ok else FAILED)
    return {
        "unit": unit,
        "entry": entry,
        "outcome": outcome,
        "reason": reason,
        "message": message,
        "location": location,
        TRACE_KEY: list(trace),
        FAILURES_KEY: list(failures),
    }


def report_row(unit: str, report: "CheckReport") -> Dict[str, Any]:
    """One result row for a kernel ``CheckReport``."""
    return {
        "unit": unit,
        "entry": report.name or "<anonymous>",
        "outcome": ACCEPTED if report.accepted else REJECTED,
        "reason": report.reason,
        "message": report.message,
        "location": None if report.span is None else str(report.span),
        TRACE_KEY: list(report.trace),
        FAILURES_KEY: [],
    }


def add_callback_if_not_already_in(callback_name: str,
                                   callback: "ReportCallback",
                                   callback_list: list) -> bool:
    """Add a callback to the list if there isn't one with the same
    name or exact type.

    Subclasses count as different: a JSON report is added next to a
    plain logging callback.
    """
    if not any(name == callback_name or type(callback) is type(c)
               for name, c in callback_list):
        callback_list.append((callback_name, callback))
        return True
    return False


def as_named(callback: Union["ReportCallback", tuple]) -> tuple:
    if isinstance(callback, tuple):
        return callback
    return (type(callback).__name__, callback)
