"""Exception types raised by assocfam.

All exceptions inherit from :class:`AssocFamError`, so ``except AssocFamError``
catches everything this package raises on purpose.
"""

from __future__ import annotations

from typing import TYPE_CHECKING, Any

if TYPE_CHECKING:
    from .models import ResidualReport

__all__ = [
    "AssocFamError",
    "ContractViolation",
    "DomainError",
    "InternalError",
    "ConfigError",
    "UnknownEntry",
    "ParamOutOfRange",
    "ExtractionError",
    "DegenerateImmersion",
    "SignatureError",
    "LightlikeNormal",
    "FamilyError",
    "NoRealSolution",
    "CaseViolation",
    "UmbilicalPoint",
    "SuiteFailure",
]


class AssocFamError(Exception):
    """Base class for every error raised by assocfam.

    Attributes:
        message: Human-readable description.
        point: Chart point ``(u, v)`` the error refers to, when known.
        value: The offending value (a radicand, a norm, a parameter), when
            one exists.
    """

    def __init__(
        self,
        message: str,
        *,
        point: tuple[float, float] | None = None,
        value: Any = None,
    ) -> None:
        super().__init__(message)
        self.message = message
        self.point = point
        self.value = value

    def __str__(self) -> str:
        if self.point is None:
            return self.message
        u, v = self.point
        return f"[at ({u:.6g}, {v:.6g})] {self.message}"


class ContractViolation(AssocFamError, ValueError):
    """An operation was called outside its documented preconditions."""


class DomainError(AssocFamError):
    """A point lies outside the domain of a function or chart."""


class InternalError(AssocFamError):
    """An invariant that construction should guarantee did not hold."""


class ConfigError(AssocFamError, ValueError):
    """A descriptor, expression, law string or option could not be used."""


class UnknownEntry(ConfigError):
    """No catalog surface has the requested name."""


class ParamOutOfRange(ConfigError):
    """A catalog parameter is unknown or outside its documented range.

    Attributes:
        name: The parameter name.
    """

    def __init__(self, message: str, *, name: str | None = None, **kwargs: Any) -> None:
        super().__init__(message, **kwargs)
        self.name = name


class ExtractionError(AssocFamError):
    """Geometric data could not be extracted at a point of an immersion."""


class DegenerateImmersion(ExtractionError):
    """The differential of the parametrization has rank below 2."""


class SignatureError(ExtractionError):
    """The induced metric is not positive definite."""


class LightlikeNormal(ExtractionError):
    """The orthogonal complement of the tangent plane is degenerate."""


class FamilyError(AssocFamError):
    """A family member or obstruction could not be evaluated at a point."""


class NoRealSolution(FamilyError):
    """The normal component of a rotated member has a negative square."""


class CaseViolation(FamilyError):
    """The point belongs to a different case than the operation handles."""


class UmbilicalPoint(FamilyError):
    """``JAT - AJT`` vanishes, so the umbilical branch applies."""


class SuiteFailure(AssocFamError):
    """The base surface failed its own structure-equation suite.

    Attributes:
        report: The failing :class:`~assocfam.models.ResidualReport`.
    """

    def __init__(self, message: str, *, report: ResidualReport) -> None:
        super().__init__(message)
        self.report = report
