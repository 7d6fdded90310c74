"""Exception hierarchy shared by every qgir module."""

from __future__ import annotations


class QgirError(Exception):
    """Base class for all errors raised by qgir."""


class KBError(QgirError, ValueError):
    """A knowledge-base file is malformed or violates an invariant.

    ``ident`` names the offending concept or place when there is one.
    """

    def __init__(self, message: str, ident: str | None = None, related: tuple[str, ...] = ()):
        super().__init__(message)
        self.ident = ident
        self.related = related


class UnknownConceptError(QgirError, KeyError):
    def __init__(self, key: str):
        super().__init__(key)
        self.key = key

    def __str__(self) -> str:
        return f"unknown concept: {self.key!r}"


class UnreachableError(QgirError):
    """No directed path exists between two concepts."""

    def __init__(self, source: str, target: str):
        super().__init__(f"no path from {source!r} to {target!r}")
        self.source = source
        self.target = target


class UnknownPlaceError(QgirError, KeyError):
    def __init__(self, key: str):
        super().__init__(key)
        self.key = key

    def __str__(self) -> str:
        return f"unknown place: {self.key!r}"


class AmbiguousPlaceError(QgirError, KeyError):
    def __init__(self, name: str, candidates: tuple[str, ...]):
        super().__init__(name)
        self.name = name
        self.candidates = candidates

    def __str__(self) -> str:
        return f"ambiguous place name {self.name!r}: candidates {', '.join(self.candidates)}"


class QuerySyntaxError(QgirError, ValueError):
    def __init__(self, message: str, position: int | None = None):
        where = f" at position {position}" if position is not None else ""
        super().__init__(f"{message}{where}")
        self.position = position


class UnknownPredicateError(QuerySyntaxError):
    def __init__(self, symbol: str, position: int | None = None):
        super().__init__(f"unknown spatial predicate {symbol!r}", position)
        self.symbol = symbol


class CorpusError(QgirError, ValueError):
    def __init__(self, message: str, line: int | None = None):
        where = f"line {line}: " if line is not None else ""
        super().__init__(f"{where}{message}")
        self.line = line


class UnsupportedExpressionError(QgirError):
    """The expression is grammatical but has no similarity semantics."""


class TotalConflictError(QgirError):
    """Dempster normalisation failed: the two pieces of evidence fully conflict."""


class EvaluationError(QgirError, ValueError):
    pass


class ConfigError(QgirError, ValueError):
    pass
