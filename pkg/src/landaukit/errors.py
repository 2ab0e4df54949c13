"""Exception types shared across the toolkit."""

from __future__ import annotations


class LandauKitError(Exception):
    """Base class for all toolkit errors."""


class DegenerateKinematics(LandauKitError):
    pass


class BoundViolation(LandauKitError):
    pass


class NoValidRouting(LandauKitError):
    pass


class InvalidStarGraph(LandauKitError):
    pass


class ZeroScale(LandauKitError):
    pass


class CertificationFailure(LandauKitError):
    pass


class SignViolation(LandauKitError):
    pass


class ObstructionFound(LandauKitError):
    """Raised by the contraction cascade when some structure blocks contraction.

    ``kind`` names the obstruction (``"zigzag"``, ``"smallness"``, ...) and
    ``detail`` carries the offending structure in a JSON-friendly form.
    """

    def __init__(self, kind: str, detail: object = None, log: object = None):
        super().__init__(f"{kind}: {detail}")
        self.kind = kind
        self.detail = detail
        self.log = log


class ParseError(LandauKitError):
    def __init__(self, message: str, line: int = 0, column: int = 0):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


class ValidationError(LandauKitError):
    pass
