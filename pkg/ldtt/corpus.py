"""The bundled theorem corpus.

Each entry is a ``.ldtt`` file under ``ldtt/prelude``: the directional
terms of an isomorphism (or a functor, or a counit) followed by
``checkeq`` declarations stating that the composites are identities.
"""
from pathlib import Path
from typing import List, Optional, Tuple
import logging

from ldtt.config import EqFlags
from ldtt.equality import DEFAULT_STEP_BUDGET
from ldtt.errors import LdttError
from ldtt.kernel import CheckReport, check_decls
from ldtt.parser import ResolvedDecl, load

logger = logging.getLogger(__name__)

PRELUDE_DIR = Path(__file__).parent / "prelude"

CORPUS = (
    ("fmapM", "fmap_m.ldtt"),
    ("fmapL", "fmap_l.ldtt"),
    ("counit", "counit.ldtt"),
    ("M-sqcap", "m_sqcap.ldtt"),
    ("M-with", "m_with.ldtt"),
    ("L-subset", "l_subset.ldtt"),
    ("LM-with", "lm_with.ldtt"),
)

# (telescope, body of f after ``let x be y in``); x : El A is the bound
# variable and the result lives in El B.
COUNIT_INSTANCES = (
    ("(A : U, B : L, h : El A -> Mt (El B) ; y : Lt (El A))",
     "unsig (h x)"),
    ("(A : U, B : L, b : Mt (El B) ; y : Lt (El A))", "unsig b"),
    ("(A : U, B : L, h : El A -> El A -> Mt (El B) ; y : Lt (El A))",
     "unsig (h x x)"),
    ("(A : U, B : L, h : El A * El A -> Mt (El B) ; y : Lt (El A))",
     "unsig (h (x, x))"),
    ("(A : U, B : L, h : El A -> Mt (El B -o El B), b : Mt (El B) ; "
     "y : Lt (El A))", "unsig (h x) (unsig b)"),
    ("(A : U, B : L, h : El A -> Mt (El B & El B) ; y : Lt (El A))",
     "fst (unsig (h x))"),
)


def prelude_files() -> List[Path]:
    return [PRELUDE_DIR / filename for _, filename in CORPUS]


def counit_source() -> str:
    """Uniqueness equations of the counit for the generated ``f``s.

    For ``f = let x be y in F`` the transpose is ``g = \\x. sig F`` and
    ``eps B (let x be y in lift (g x))`` must equal ``f``.
    """
    lines = []
    for tele, body in COUNIT_INSTANCES:
        g = f"(\\(x : El A). sig ({body}))"
        lines.append(f"checkeq {tele}\n"
                     f"  eps B (let x be y in lift ({g} x))\n"
                     f"  == let x be y in {body} : El B;\n")
    return "\n".join(lines)


def load_entry(name: str) -> List[ResolvedDecl]:
    """Parse and resolve one corpus entry by name."""
    filenames = dict(CORPUS)
    if name not in filenames:
        raise ValueError(f"unknown corpus entry '{name}', expected one of "
                         f"{[n for n, _ in CORPUS]}.")
    path = PRELUDE_DIR / filenames[name]
    source = path.read_text(encoding="utf-8")
    if name == "counit":
        source += "\n" + counit_source()
    return load(source, str(path))


def _summarize(name: str, reports: List[CheckReport]) -> CheckReport:
    failed = [r for r in reports if not r.accepted]
    trace = tuple(rule for r in reports for rule in r.trace)
    if not failed:
        return CheckReport(None, True, trace=trace, name=name)
    first = failed[0]
    return CheckReport(
        first.judgment,
        False,
        reason=first.reason,
        message=f"{first.name}: {first.message}",
        span=first.span,
        trace=trace,
        name=name)


def corpus_isos(flags: Optional[EqFlags] = None,
                budget: int = DEFAULT_STEP_BUDGET
                ) -> List[Tuple[str, CheckReport]]:
    """Check every corpus entry; one summary report per entry.

    In-file pragmas switch on the flags each entry relies on, on top of
    ``flags``.
    """
    results = []
    for name, _ in CORPUS:
        try:
            decls = load_entry(name)
        except LdttError as err:
            results.append((name, CheckReport.rejected(None, err, name=name)))
            continue
        reports = check_decls(decls, flags, budget)
        summary = _summarize(name, reports)
        logger.info("corpus entry %s: %s", name, summary.outcome)
        results.append((name, summary))
    return results
