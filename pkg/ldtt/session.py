from contextlib import AbstractContextManager
from pathlib import Path
from typing import (Any, Callable, Dict, Iterable, List, Optional, Sequence,
                    Tuple, Union)
import logging

from ldtt.callbacks import (DetailedPrintCallback, JsonReportCallback,
                            ReportCallback, ReportLoggingCallback,
                            TablePrintCallback)
from ldtt.callbacks.constants import BAD_OUTCOMES
from ldtt.callbacks.utils import (add_callback_if_not_already_in, as_named,
                                  make_row, report_row)
from ldtt.config import EqFlags, ReportFormat, RunConfig, load_config
from ldtt.corpus import corpus_isos
from ldtt.equality import DEFAULT_STEP_BUDGET, normalize
from ldtt.errors import LdttError, UnboundName
from ldtt.kernel import check_decls
from ldtt.models.families import (FamiliesModel, interp_ctx, load_basis,
                                  soundness_failures)
from ldtt.parser import load_file
from ldtt.pretty import pretty
from ldtt.suites import EQUATION_KINDS, SUITES

logger = logging.getLogger(__name__)

Row = Dict[str, Any]


class ray_start_shutdown(AbstractContextManager):
    """Context manager to start and shutdown a local Ray instance.

    Args:
        num_cpus (int): Number of CPUs Ray may use.
    """

    def __init__(self, num_cpus: int) -> None:
        self.num_cpus = num_cpus
        self.started_ = False

    def __enter__(self):
        """Starts Ray unless it is already running."""
        import ray
        if not ray.is_initialized():
            ray.init(
                num_cpus=self.num_cpus,
                include_dashboard=False,
                log_to_driver=False)
            self.started_ = True
        return self

    def __exit__(self, __exc_type, __exc_value, __traceback) -> None:
        """Shuts Ray down if it was started here."""
        if self.started_:
            import ray
            ray.shutdown()
            self.started_ = False


def _error_row(unit: str, err: LdttError) -> Row:
    return make_row(
        unit,
        err.decl or "<file>",
        False,
        reason=err.reason,
        message=err.message,
        location=None if err.span is None else str(err.span))


def check_file(path: str, flags: Optional[EqFlags] = None,
               budget: int = DEFAULT_STEP_BUDGET) -> List[Row]:
    """Parse, resolve and check one file; one row per declaration.

    A parse or resolution error gives a single rejected row.
    """
    unit = str(path)
    try:
        decls = load_file(path)
    except LdttError as err:
        row = _error_row(unit, err)
        row["outcome"] = "rejected"
        return [row]
    reports = check_decls(decls, flags, budget)
    return [
        report_row(unit, report) for decl, report in zip(decls, reports)
        if decl.pragma is None
    ]


def _flags_before(decls, stop: int, flags: EqFlags) -> EqFlags:
    for decl in decls[:stop]:
        if decl.pragma is not None:
            flags = flags.with_pragma(decl.pragma)
    return flags


class CheckSession:
    """Runs the commands of the checker and reports through callbacks.

    Parameters
    ----------
    config : RunConfig, optional
      Run settings. Loaded with ``load_config`` (so from ``$LDTT_CONFIG``
      if set) when not given.

    callbacks : list of callbacks or (name, callback) tuples, or "disable"
      Receive the result rows. Default callbacks are added unless one
      with the same name or type is already there, see
      ``get_default_callbacks``.

    sink : callable
      Where the default callbacks print to.

    """

    def __init__(self,
                 config: Optional[RunConfig] = None,
                 callbacks: Union[List[Union[ReportCallback, Tuple[
                     str, ReportCallback]]], str, None] = None,
                 sink: Callable[[Any], None] = print) -> None:
        self.config = config
        self.callbacks = callbacks
        self.sink = sink
        self.initialized_ = False

    def get_params(self) -> Dict[str, Any]:
        return {
            "config": self.config,
            "callbacks": self.callbacks,
            "sink": self.sink
        }

    def set_params(self, **params) -> "CheckSession":
        for key, value in params.items():
            if key not in self.get_params():
                raise ValueError(f"Invalid parameter {key} for "
                                 f"{type(self).__name__}.")
            setattr(self, key, value)
        self.initialized_ = False
        return self

    def initialize(self) -> "CheckSession":
        self.config_ = self.config or load_config()
        self._initialize_callbacks()
        self.initialized_ = True
        return self

    def _initialize_callbacks(self):
        if self.callbacks == "disable":
            self.callbacks_ = []
            return
        self.callbacks_ = [as_named(cb) for cb in self.callbacks or []]
        for name, callback in self.get_default_callbacks():
            add_callback_if_not_already_in(name, callback, self.callbacks_)

    def get_default_callbacks(self) -> List[Tuple[str, ReportCallback]]:
        if self.config_.report_format is ReportFormat.JSON:
            return [("report", JsonReportCallback(sink=self.sink))]
        if self.config_.verbose <= 0:
            return [("report", ReportLoggingCallback())]
        if self.config_.verbose >= 2:
            return [("report", DetailedPrintCallback(sink=self.sink))]
        return [("report", TablePrintCallback(sink=self.sink))]

    def notify(self, method_name: str, **info) -> None:
        for _, callback in self.callbacks_:
            getattr(callback, method_name)(**info)

    def _run(self, command: str, batches: Iterable[List[Row]]) -> bool:
        if not self.initialized_:
            self.initialize()
        passed = True
        self.notify("start", command=command)
        for rows in batches:
            passed &= not any(r["outcome"] in BAD_OUTCOMES for r in rows)
            self.notify("handle_result", results=rows, command=command)
        self.notify(
            "finish",
            command=command,
            config=self.config_.model_dump(mode="json"))
        logger.info("%s: %s", command, "passed" if passed else "failed")
        return passed

    # commands

    def check_files(self, paths: Sequence[Union[str, Path]]) -> bool:
        """Check every file; True iff every declaration is accepted.

        With ``jobs > 1`` files are checked in parallel on Ray. Results
        are reported in input order either way.
        """
        if not self.initialized_:
            self.initialize()
        config = self.config_
        paths = [str(p) for p in paths]
        if config.jobs <= 1 or len(paths) <= 1:
            batches = (check_file(p, config.flags, config.step_budget)
                       for p in paths)
            return self._run("check", batches)

        import ray
        remote_check = ray.remote(check_file)
        with ray_start_shutdown(config.jobs):
            refs = [
                remote_check.remote(p, config.flags, config.step_budget)
                for p in paths
            ]
            return self._run("check", (ray.get(ref) for ref in refs))

    def normalize(self, path: Union[str, Path], name: str) -> str:
        """Normal form of the body of definition ``name`` in ``path``."""
        if not self.initialized_:
            self.initialize()
        decls = load_file(path)
        for i, decl in enumerate(decls):
            if decl.kind == "def" and decl.name == name:
                break
        else:
            raise UnboundName(f"no definition named '{name}' in {path}")
        flags = _flags_before(decls, i, self.config_.flags)
        ctx, body = decl.judgment.ctx, decl.judgment.subjects[0]
        nf = normalize(ctx, body, flags, self.config_.step_budget)
        return pretty(nf, ctx)

    def interp(self, path: Union[str, Path], basis_path: Union[str,
                                                               Path]) -> bool:
        """Interpret every equation of ``path`` in the families model and
        compare the two sides at every point."""
        if not self.initialized_:
            self.initialize()
        config = self.config_
        model = FamiliesModel(config.prime, config.size_cap, config.dim_cap)
        basis = load_basis(str(basis_path))
        return self._run("interp", [self._interp_rows(path, basis, model)])

    def _interp_rows(self, path, basis, model) -> List[Row]:
        unit = str(path)
        try:
            decls = load_file(path)
        except LdttError as err:
            return [_error_row(unit, err)]
        reports = check_decls(decls, self.config_.flags,
                              self.config_.step_budget)
        rows = []
        for decl, report in zip(decls, reports):
            if decl.judgment is None or (decl.judgment.kind
                                         not in EQUATION_KINDS):
                continue
            where = None if decl.span is None else str(decl.span)
            if not report.accepted:
                rows.append(
                    make_row(unit, decl.name, False, reason=report.reason,
                             message=report.message, location=where))
                continue
            try:
                env = interp_ctx(decl.judgment.ctx, basis, model)
                failures = soundness_failures(decl.judgment, env)
            except LdttError as err:
                rows.append(
                    make_row(unit, decl.name, False, reason=err.reason,
                             message=err.message, location=where))
                continue
            message = (f"differs at {len(failures)} of {len(env)} points"
                       if failures else f"{len(env)} points")
            rows.append(
                make_row(unit, decl.name, not failures, message=message,
                         location=where, failures=failures))
        return rows

    def model_test(self, suite: str) -> bool:
        if suite not in SUITES:
            raise ValueError(f"unknown suite '{suite}', expected one of "
                             f"{sorted(SUITES)}.")
        if not self.initialized_:
            self.initialize()
        return self._run(f"model-test {suite}", [SUITES[suite](self.config_)])

    def corpus(self) -> bool:
        if not self.initialized_:
            self.initialize()
        results = corpus_isos(self.config_.flags, self.config_.step_budget)
        return self._run("corpus",
                         [[report_row("corpus", r) for _, r in results]])
