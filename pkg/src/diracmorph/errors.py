"""Exception hierarchy shared by all modules."""

from __future__ import annotations


class DiracMorphError(Exception):
    """Base class for every error raised by the package."""


class ExprSyntaxError(DiracMorphError, ValueError):
    """Malformed expression text. ``position`` is 1-based."""

    def __init__(self, message: str, position: int, text: str = ""):
        self.position = position
        self.text = text
        super().__init__(f"{message} at position {position}")


class UnknownIdentifierError(ExprSyntaxError):
    pass


class EvalError(DiracMorphError, ValueError):
    """Invalid argument, or an imaginary part leaking into a real context."""


class DomainError(DiracMorphError, ValueError):
    """A point lies outside the box a field is declared on."""

    def __init__(self, message: str, point=None):
        self.point = point
        if point is not None:
            message = f"{message} (point {_fmt_point(point)})"
        super().__init__(message)


class StencilError(DomainError):
    pass


class DimensionError(DiracMorphError, ValueError):
    pass


class ScenarioError(DiracMorphError, ValueError):
    pass


class GeometryError(DiracMorphError):
    def __init__(self, message: str, point=None):
        self.point = point
        if point is not None:
            message = f"{message} (point {_fmt_point(point)})"
        super().__init__(message)


class NotASubmersionError(GeometryError):
    pass


class NotHorizontallyConformalError(GeometryError):
    pass


class NotRiemannianSubmersionError(GeometryError):
    pass


class VanishingSpinorError(GeometryError):
    pass


class NonHarmonicWitnessError(DiracMorphError):
    pass


class ScenarioFileError(ScenarioError):
    def __init__(self, message: str, path: str = "<string>", line: int | None = None):
        self.path = path
        self.line = line
        where = f"{path}:{line}" if line is not None else path
        super().__init__(f"{where}: {message}")


def _fmt_point(point) -> str:
    try:
        return "(" + ", ".join(f"{float(c):.6g}" for c in point) + ")"
    except TypeError:
        return repr(point)
