"""Command-line driver.

Exit status is 0 when every entry passes, 1 when an entry is rejected or
fails, and 2 on usage errors (bad arguments, missing files, bad
configuration).
"""
from pathlib import Path
from typing import List, Optional
import argparse
import logging
import sys

from pydantic import ValidationError

from ldtt.config import ReportFormat, load_config
from ldtt.errors import LdttError
from ldtt.session import CheckSession
from ldtt.suites import SUITES

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "--prime", type=int, default=None,
        help="Characteristic of the field for the models (default: 2).")
    common.add_argument(
        "--budget", type=int, default=None,
        help="Reduction step budget per equation (default: 100000).")
    common.add_argument(
        "--jobs", type=int, default=None,
        help="Check files in parallel on this many workers.")
    common.add_argument(
        "--json", action="store_true",
        help="Emit a versioned JSON report on stdout.")
    common.add_argument(
        "--config", default=None,
        help="JSON config file (default: $LDTT_CONFIG).")
    common.add_argument(
        "-v", "--verbose", action="count", default=0,
        help="Print more; repeat for the full rule traces.")
    common.add_argument(
        "-q", "--quiet", action="store_true",
        help="Only log failures, print no table.")

    parser = argparse.ArgumentParser(
        prog="ldtt",
        description="Checker for a dependent type theory with a linear "
        "fragment, with finite semantic models.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", parents=[common],
                       help="Check declaration files.")
    p.add_argument("paths", nargs="+", type=Path)

    p = sub.add_parser("normalize", parents=[common],
                       help="Print the normal form of a definition.")
    p.add_argument("path", type=Path)
    p.add_argument("--def", dest="name", required=True,
                   help="Name of the definition.")

    p = sub.add_parser("interp", parents=[common],
                       help="Check the equations of a file in the families "
                       "model.")
    p.add_argument("path", type=Path)
    p.add_argument("--basis", type=Path, required=True,
                   help="JSON file sizing the constants of the file.")

    p = sub.add_parser("model-test", parents=[common],
                       help="Run a model test suite.")
    p.add_argument("suite", choices=sorted(SUITES))

    sub.add_parser("corpus", parents=[common],
                   help="Check the bundled theorem corpus.")
    return parser


def _setup_logging(verbose: int, quiet: bool) -> None:
    level = logging.WARNING
    if verbose >= 2:
        level = logging.DEBUG
    elif verbose == 1 and not quiet:
        level = logging.INFO
    logging.basicConfig(
        level=level,
        stream=sys.stderr,
        format="%(levelname)s %(name)s: %(message)s")


def _missing(paths: List[Path]) -> Optional[Path]:
    return next((p for p in paths if not p.is_file()), None)


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    _setup_logging(args.verbose, args.quiet)

    files = {
        "check": lambda: list(args.paths),
        "normalize": lambda: [args.path],
        "interp": lambda: [args.path, args.basis],
    }.get(args.command, list)()
    missing = _missing(files)
    if missing is not None:
        print(f"ldtt: error: no such file: {missing}", file=sys.stderr)
        return EXIT_USAGE

    overrides = {
        "prime": args.prime,
        "step_budget": args.budget,
        "jobs": args.jobs,
        "report_format": ReportFormat.JSON if args.json else None,
        "verbose": 0 if args.quiet else 1 + args.verbose,
    }
    try:
        config = load_config(args.config, overrides)
    except (ValidationError, ValueError, TypeError) as err:
        print(f"ldtt: error: bad configuration: {err}", file=sys.stderr)
        return EXIT_USAGE

    session = CheckSession(config).initialize()
    try:
        if args.command == "check":
            passed = session.check_files(args.paths)
        elif args.command == "normalize":
            print(session.normalize(args.path, args.name))
            passed = True
        elif args.command == "interp":
            passed = session.interp(args.path, args.basis)
        elif args.command == "model-test":
            passed = session.model_test(args.suite)
        else:
            passed = session.corpus()
    except LdttError as err:
        print(f"ldtt: {err.reason}: {err}", file=sys.stderr)
        return EXIT_FAILED
    except (ValueError, TypeError) as err:
        # malformed basis file
        print(f"ldtt: error: {err}", file=sys.stderr)
        return EXIT_USAGE
    return EXIT_OK if passed else EXIT_FAILED


if __name__ == "__main__":
    sys.exit(main())
