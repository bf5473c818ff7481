"""Exception hierarchy shared by the library, the HTTP service, and the CLI.

Every error carries a ``kind`` that the outer layers map onto an HTTP status
and a process exit code, so failure semantics stay identical no matter which
surface raised them.
"""

from __future__ import annotations

from typing import Any

# kind -> CLI exit code
EXIT_CODES = {
    "input": 2,
    "numeric": 3,
    "exhausted": 4,
    "precondition": 5,
}


class KronspecError(Exception):
    """Base class for all panics the toolkit raises on purpose."""

    kind = "numeric"

    def __init__(self, message: str, **details: Any):
        super().__init__(message)
        self.message = message
        self.details = details

    @property
    def exit_code(self) -> int:
        return EXIT_CODES[self.kind]

    def payload(self) -> dict:
        """JSON-safe description used by the service error handler."""
        return {
            "kind": self.kind,
            "message": self.message,
            "details": _jsonable(self.details),
        }


class InputError(KronspecError):
    """Bad user input: malformed files, wrong shapes, invalid parameters."""

    kind = "input"


class ParseError(InputError):
    """File could not be parsed; carries 1-based line/column when known."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None, **details: Any):
        loc = ""
        if line is not None:
            loc = f" (line {line}" + (f", column {column}" if column is not None else "") + ")"
        super().__init__(message + loc, line=line, column=column, **details)
        self.line = line
        self.column = column


class SingularMatrixError(KronspecError):
    """A matrix failed the relative smallest-singular-value gate."""

    def __init__(self, message: str, sigma_min: float | None = None, sigma_max: float | None = None, hint: str | None = None):
        if hint:
            message = f"{message}; {hint}"
        super().__init__(message, sigma_min=sigma_min, sigma_max=sigma_max)
        self.sigma_min = sigma_min
        self.sigma_max = sigma_max


class EigenConvergenceError(KronspecError):
    """The dense eigensolver did not converge within its iteration cap."""


class ReconstructionError(KronspecError):
    """A computed decomposition failed its residual guarantee."""

    def __init__(self, message: str, residual: float, tolerance: float, condition: float):
        super().__init__(message, residual=residual, tolerance=tolerance, condition=condition)
        self.residual = residual
        self.tolerance = tolerance
        self.condition = condition


class DegeneratePencilError(KronspecError):
    """All interpolation nodes stayed singular after the retry cap."""


class AttemptsExhaustedError(KronspecError):
    """A randomized search ran out of attempts; carries the search trace."""

    kind = "exhausted"

    def __init__(self, message: str, trace: Any = None):
        super().__init__(message)
        self.trace = trace

    def payload(self) -> dict:
        out = super().payload()
        if self.trace is not None:
            as_payload = getattr(self.trace, "as_payload", None)
            out["details"]["trace"] = as_payload() if callable(as_payload) else self.trace
        return out


class PreconditionError(KronspecError):
    """An operation's mathematical precondition does not hold for the input."""

    kind = "precondition"


def _jsonable(obj: Any) -> Any:
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    if isinstance(obj, float) and obj != obj:  # NaN
        return None
    return obj
