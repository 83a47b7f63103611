from ldtt.callbacks.report import (
    ReportCallback, ReportLoggingCallback, TablePrintCallback,
    DetailedPrintCallback, JsonReportCallback)
from ldtt.callbacks.schema import EntryRecord, ReportDocument

__all__ = [
    "ReportCallback", "ReportLoggingCallback", "TablePrintCallback",
    "DetailedPrintCallback", "JsonReportCallback", "EntryRecord",
    "ReportDocument"
]
