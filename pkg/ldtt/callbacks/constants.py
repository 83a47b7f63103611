SCHEMA_VERSION = "ldtt.report/1"

ACCEPTED = "accepted"
REJECTED = "rejected"
PASSED = "passed"
FAILED = "failed"
SKIPPED = "skipped"

OUTCOMES = (ACCEPTED, REJECTED, PASSED, FAILED, SKIPPED)
BAD_OUTCOMES = frozenset({REJECTED, FAILED})

TRACE_KEY = "trace"
FAILURES_KEY = "failures"
