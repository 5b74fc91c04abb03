"""Exception types shared across the toolkit."""

from __future__ import annotations


class ActError(Exception):
    """Base class for all toolkit errors."""


class DomainError(ActError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class RateUndefined(ActError, ValueError):
    """No finite exponential rate exists (success probability is exactly 1)."""


class MissingParameter(ActError, ValueError):
    """A leaf lacks a parameter required by the requested analysis."""


class StateSpaceLimit(ActError, RuntimeError):
    """The reachable state space exceeded the configured cap."""


class ActParseError(ActError, ValueError):
    """Model text could not be parsed.

    ``code`` is one of ``syntax``, ``undefined-reference`` or
    ``duplicate-definition``; ``line``/``column`` are 1-based.
    """

    def __init__(self, message: str, line: int, column: int, code: str = "syntax"):
        super().__init__(f"{line}:{column}: {message}")
        self.message = message
        self.line = line
        self.column = column
        self.code = code


class ActValidationError(ActError, ValueError):
    """A parsed or constructed model violates a structural rule."""

    def __init__(self, diagnostics):
        self.diagnostics = list(diagnostics)
        lines = "; ".join(str(d) for d in self.diagnostics)
        super().__init__(f"invalid model: {lines}")
