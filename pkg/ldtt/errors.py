from typing import Iterable, Optional, TYPE_CHECKING

if TYPE_CHECKING:
    from ldtt.parser import SourceSpan  # noqa: F401


class LdttError(Exception):
    """Base class of every error raised by this package.

    ``span`` is filled in for errors that can be traced back to a
    location in a source file, ``decl`` with the name of the declaration
    being processed when the error was raised.
    """

    def __init__(self,
                 message: str,
                 *,
                 span: Optional["SourceSpan"] = None,
                 decl: Optional[str] = None) -> None:
        super().__init__(message)
        self.message = message
        self.span = span
        self.decl = decl

    @property
    def reason(self) -> str:
        return type(self).__name__

    def with_decl(self, decl: str) -> "LdttError":
        if self.decl is None:
            self.decl = decl
        return self

    def with_span(self, span: Optional["SourceSpan"]) -> "LdttError":
        if self.span is None:
            self.span = span
        return self

    def __str__(self) -> str:
        prefix = ""
        if self.span is not None:
            prefix = f"{self.span}: "
        if self.decl is not None:
            prefix += f"in '{self.decl}': "
        return prefix + self.message


# core syntax
class OutOfScope(LdttError):
    pass


class IllFormedNode(LdttError):
    pass


class NegativeIndex(LdttError):
    pass


class SortMismatch(LdttError):
    pass


# surface syntax
class LexError(LdttError):
    def __init__(self,
                 message: str,
                 *,
                 expected: Iterable[str] = (),
                 span=None) -> None:
        self.expected = tuple(sorted(set(expected)))
        super().__init__(message, span=span)


class ParseError(LexError):
    pass


class UnboundName(LdttError):
    pass


class DuplicateName(LdttError):
    pass


class DuplicateLinearName(LdttError):
    pass


class LinearVarInType(LdttError):
    pass


# kernel
class LinearViolation(LdttError):
    def __init__(self, slot: str, used: int, **kwargs) -> None:
        self.slot = slot
        self.used = used
        what = "never used" if used == 0 else "used more than once"
        super().__init__(f"linear variable '{slot}' {what}", **kwargs)


class ZoneMismatch(LdttError):
    pass


class ModeError(LdttError):
    pass


class TypeMismatch(LdttError):
    pass


class CannotInfer(LdttError):
    pass


class EscapingVariable(LdttError):
    pass


class FeatureDisabled(LdttError):
    pass


# equality
class NonTermination(LdttError):
    def __init__(self, budget: int, **kwargs) -> None:
        self.budget = budget
        super().__init__(
            f"reduction step budget of {budget} exceeded", **kwargs)


class NotEqual(LdttError):
    pass


# linear algebra
class DimMismatch(LdttError):
    pass


class ModulusMismatch(LdttError):
    pass


# models
class MissingBasis(LdttError):
    pass


class SizeOverflow(LdttError):
    pass


class SortError(LdttError):
    pass


class ModelUnsupported(LdttError):
    pass


class BaseMismatch(LdttError):
    pass


class NotAPullback(LdttError):
    pass


class NotInvertibleComponent(LdttError):
    pass


class InvalidGroupoid(LdttError):
    pass
