from pathlib import Path
from pprint import pprint
from typing import Any, Callable, Dict, List, Optional, Set, Union
import logging
import sys

from tabulate import tabulate
import pandas as pd

from ldtt.callbacks.constants import (BAD_OUTCOMES, FAILURES_KEY, OUTCOMES,
                                      TRACE_KEY)
from ldtt.callbacks.schema import ReportDocument
from ldtt.callbacks.utils import SortedKeysMixin

logger = logging.getLogger(__name__)

ANSI_RED = "\033[91m"
ANSI_GREEN = "\033[92m"
ANSI_YELLOW = "\033[93m"
ANSI_END = "\033[0m"

OUTCOME_COLORS = {
    "accepted": ANSI_GREEN,
    "passed": ANSI_GREEN,
    "rejected": ANSI_RED,
    "failed": ANSI_RED,
    "skipped": ANSI_YELLOW,
}

DEFAULT_KEYS_TO_NOT_PRINT = {TRACE_KEY}

DEFAULT_KEYS_TO_NOT_PRINT_TABLE = DEFAULT_KEYS_TO_NOT_PRINT.union(
    {FAILURES_KEY, "unit"})


class ReportCallback:
    """Receives result rows as a command produces them.

    ``handle_result`` is called once per batch of rows, in input order.
    """

    def start(self, **info) -> None:
        pass

    def handle_result(self, results: List[Dict], **info) -> None:
        pass

    def finish(self, **info) -> None:
        pass


class ReportLoggingCallback(ReportCallback):
    """Keeps every row and logs the rejected or failed ones."""

    def __init__(self) -> None:
        self._history: List[Dict] = []

    @property
    def history(self) -> List[Dict]:
        return list(self._history)

    @property
    def passed(self) -> bool:
        return not any(r["outcome"] in BAD_OUTCOMES for r in self._history)

    def start(self, **info) -> None:
        self._history = []

    def handle_result(self, results: List[Dict], **info) -> None:
        for row in results:
            if row["outcome"] in BAD_OUTCOMES:
                logger.info("%s %s: %s (%s)", row["unit"], row["entry"],
                            row["outcome"], row.get("reason"))
            else:
                logger.debug("%s %s: %s", row["unit"], row["entry"],
                             row["outcome"])
        self._history.extend(results)

    def summary(self) -> Dict[str, int]:
        if not self._history:
            return {}
        counts = pd.DataFrame(self._history)["outcome"].value_counts()
        return {k: int(counts[k]) for k in OUTCOMES if k in counts.index}

    def summary_table(self) -> pd.DataFrame:
        """Outcome counts per unit."""
        df = pd.DataFrame(self._history, columns=["unit", "outcome"])
        return pd.crosstab(df["unit"], df["outcome"])


class AbstractPrintCallback(ReportLoggingCallback):
    def __init__(self,
                 *,
                 keys_to_not_print: Set[str] = DEFAULT_KEYS_TO_NOT_PRINT,
                 sink: Callable[[Any], None] = pprint) -> None:
        self.keys_to_not_print = set(keys_to_not_print or {})
        self.sink = sink
        super().__init__()

    def handle_result(self, results: List[Dict], **info) -> None:
        super().handle_result(results, **info)
        for row in results:
            self.display(row)

    def display(self, row: Dict) -> None:
        raise NotImplementedError

    def _sink(self, text, verbose=True):
        if (self.sink is not print) or verbose:
            self.sink(text)


class DetailedPrintCallback(SortedKeysMixin, AbstractPrintCallback):
    """Prints every row as a dict, including the trace."""

    def __init__(self,
                 *,
                 keys_to_not_print: Set[str] = frozenset(),
                 sink: Callable[[Any], None] = pprint) -> None:
        super().__init__(keys_to_not_print=keys_to_not_print, sink=sink)

    def display(self, row: Dict) -> None:
        self._sink({
            k: row[k]
            for k in self._sorted_keys(row.keys(), self.keys_to_not_print)
        })


class TablePrintCallback(SortedKeysMixin, AbstractPrintCallback):
    """Prints one table line per row, with the header only once."""

    def __init__(
            self,
            *,
            keys_to_not_print: Set[str] = DEFAULT_KEYS_TO_NOT_PRINT_TABLE,
            sink: Callable[[Any], None] = print,
            tablefmt="simple",
            stralign="left",
            color: Optional[bool] = None,
            print_summary: bool = True,
    ) -> None:
        self.tablefmt = tablefmt
        self.stralign = stralign
        self.color = color
        self.print_summary = print_summary
        super().__init__(keys_to_not_print=keys_to_not_print, sink=sink)
        self.first_iteration_ = True

    def start(self, **info) -> None:
        super().start(**info)
        self.first_iteration_ = True
        if self.color is None:
            self.color_ = self.sink is print and sys.stdout.isatty()
        else:
            self.color_ = self.color

    def display(self, row: Dict) -> None:
        tabulated = self.table(row)
        if self.first_iteration_:
            header, lines = tabulated.split("\n", 2)[:2]
            self._sink(header)
            self._sink(lines)
            self.first_iteration_ = False

        self._sink(tabulated.rsplit("\n", 1)[-1])
        if self.sink is print:
            sys.stdout.flush()

    def finish(self, **info) -> None:
        if not self.print_summary or not self._history:
            return
        self._sink("")
        self._sink(
            tabulate(
                self.summary_table(),
                headers="keys",
                tablefmt=self.tablefmt,
                stralign="right"))

    def format_row(self, row, key):
        value = row.get(key)

        if value is None:
            return ""
        if key == "outcome" and getattr(self, "color_", False):
            return OUTCOME_COLORS.get(value, "") + value + ANSI_END
        if isinstance(value, (list, tuple)):
            return ",".join(str(v) for v in value)
        return value

    def table(self, row):
        # every row gets the same columns so the header printed first
        # lines up with all later ones
        keys = self._sorted_keys(
            ["unit", "entry", "outcome", "reason", "location", "message"] +
            [k for k in row if k not in (TRACE_KEY, FAILURES_KEY)],
            self.keys_to_not_print)
        keys = list(dict.fromkeys(keys))
        return tabulate(
            [[self.format_row(row, k) for k in keys]],
            headers=keys,
            tablefmt=self.tablefmt,
            stralign=self.stralign,
        )


class JsonReportCallback(ReportLoggingCallback):
    """Collects every row and emits a single ``ReportDocument`` at the
    end, either to ``path`` or through ``sink``."""

    def __init__(self,
                 path: Optional[Union[str, Path]] = None,
                 *,
                 sink: Callable[[str], None] = print,
                 indent: int = 2) -> None:
        self.path = path
        self.sink = sink
        self.indent = indent
        super().__init__()
        self.document_: Optional[ReportDocument] = None

    def finish(self, command: str = "", config: Optional[Dict] = None,
               **info) -> None:
        self.document_ = ReportDocument(
            command=command,
            config=config or {},
            entries=self._history,
            summary=self.summary(),
            passed=self.passed)
        text = self.document_.model_dump_json(indent=self.indent)
        if self.path is not None:
            Path(self.path).write_text(text + "\n")
            logger.info("wrote report to %s", self.path)
        else:
            self.sink(text)
