"""Exception hierarchy. Every error carries a stable machine-readable code."""

from __future__ import annotations


class LinkhomError(Exception):
    exit_code = 1

    def __init__(self, code: str, message: str):
        super().__init__(message)
        self.code = code
        self.message = message

    def to_json(self) -> dict:
        return {"error": self.code, "message": self.message, "exit_code": self.exit_code}


class InputError(LinkhomError, ValueError):
    """Malformed or out-of-range user input."""

    exit_code = 2


class HypothesisViolation(LinkhomError):
    """The input is well formed but violates the hypotheses of the curve theorem
    (endpoint off the unit circle, tangency, curve through the origin, ...)."""

    exit_code = 3


class ResourceRefusal(LinkhomError):
    """The cubical oracle refused to build a complex (cell budget, grid too coarse)."""

    exit_code = 4
