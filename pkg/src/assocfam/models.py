"""Report models for assocfam.

Every model is a dataclass with ``to_dict()`` and ``from_dict()``; ``to_json``
and ``to_csv`` render the dict deterministically (see ``docs/schema/``).
"""

from __future__ import annotations

import math
import re
from collections.abc import Sequence
from dataclasses import dataclass, field
from typing import Any, Literal, Optional, cast

from . import _serialize
from ._config import (
    DEFAULT_CASE_TOL,
    DEFAULT_CLASSIFY_TOL,
    DEFAULT_GRID_MARGIN,
    DEFAULT_GRID_NU,
    DEFAULT_GRID_NV,
    DEFAULT_RESIDUAL_TOL,
)
from .exceptions import AssocFamError, ConfigError, ContractViolation

CaseTag = Literal["T_equals_dt", "T_zero", "generic", "mixed"]
Outcome = Literal[
    "ExistsMinimalProduct",
    "ExistsTotallyUmbilical",
    "ExistsVerticalCylinderProduct",
    "NotExists",
    "SpaceFormExcluded",
    "Undetermined",
]
ChartPoint = tuple[float, float]
ChartDomain = tuple[tuple[float, float], tuple[float, float]]

__all__ = [
    "CaseTag",
    "Outcome",
    "ChartPoint",
    "ChartDomain",
    "GridSpec",
    "Tolerances",
    "EquationResidual",
    "PointFailure",
    "ResidualReport",
    "FamilySweep",
    "Verdict",
]

_CASE_TAGS = frozenset({"T_equals_dt", "T_zero", "generic", "mixed"})
_OUTCOMES = frozenset(
    {
        "ExistsMinimalProduct",
        "ExistsTotallyUmbilical",
        "ExistsVerticalCylinderProduct",
        "NotExists",
        "SpaceFormExcluded",
        "Undetermined",
    }
)
_GRID_PATTERN = re.compile(r"\s*(\d+)\s*[xX]\s*(\d+)\s*")


def _required_string(data: dict[str, Any], key: str) -> str:
    value = data.get(key)
    if not isinstance(value, str) or not value.strip():
        raise ValueError(f"field {key!r} must be a non-empty string")
    return value


def _optional_string(data: dict[str, Any], key: str) -> str | None:
    value = data.get(key)
    if value is None:
        return None
    if not isinstance(value, str):
        raise ValueError(f"field {key!r} must be a string or null")
    return value


def _required_float(data: dict[str, Any], key: str) -> float:
    value = data.get(key)
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ValueError(f"field {key!r} must be a number")
    if not math.isfinite(value):
        raise ValueError(f"field {key!r} must be finite")
    return float(value)


def _optional_float(data: dict[str, Any], key: str) -> float | None:
    if data.get(key) is None:
        return None
    return _required_float(data, key)


def _positive_int(data: dict[str, Any], key: str) -> int:
    value = data.get(key)
    if isinstance(value, bool) or not isinstance(value, int) or value < 1:
        raise ValueError(f"field {key!r} must be a positive integer")
    return value


def _required_bool(data: dict[str, Any], key: str) -> bool:
    value = data.get(key)
    if not isinstance(value, bool):
        raise ValueError(f"field {key!r} must be a boolean")
    return value


def _required_list(data: dict[str, Any], key: str) -> list[Any]:
    value = data.get(key, [])
    if not isinstance(value, list):
        raise ValueError(f"field {key!r} must be a list")
    return value


def _required_dict(data: dict[str, Any], key: str) -> dict[str, Any]:
    value = data.get(key)
    if not isinstance(value, dict):
        raise ValueError(f"field {key!r} must be an object")
    return value


def _string_list(data: dict[str, Any], key: str) -> list[str]:
    items = _required_list(data, key)
    if not all(isinstance(item, str) for item in items):
        raise ValueError(f"field {key!r} must be a list of strings")
    return list(items)


def _point(value: Any, key: str) -> ChartPoint | None:
    if value is None:
        return None
    if (
        not isinstance(value, list)
        or len(value) != 2
        or not all(isinstance(c, (int, float)) and not isinstance(c, bool) for c in value)
    ):
        raise ValueError(f"field {key!r} must be a [u, v] pair or null")
    return (float(value[0]), float(value[1]))


def _literal(data: dict[str, Any], key: str, allowed: frozenset[str]) -> str:
    value = _required_string(data, key)
    if value not in allowed:
        choices = ", ".join(sorted(allowed))
        raise ValueError(f"field {key!r} must be one of {choices}; got {value!r}")
    return value


@dataclass(frozen=True)
class GridSpec:
    """Uniform ``nu x nv`` sample of a chart rectangle.

    Each side is shrunk by ``margin`` times its length before sampling; a
    single sample along a side sits at its midpoint. Points are ordered with
    ``u`` as the outer loop.
    """

    nu: int = DEFAULT_GRID_NU
    nv: int = DEFAULT_GRID_NV
    margin: float = DEFAULT_GRID_MARGIN

    def __post_init__(self) -> None:
        for name, n in (("nu", self.nu), ("nv", self.nv)):
            if isinstance(n, bool) or not isinstance(n, int) or n < 1:
                raise ConfigError(f"grid {name} must be a positive integer, got {n!r}")
        if not (math.isfinite(self.margin) and 0 <= self.margin < 0.5):
            raise ConfigError(f"grid margin must be in [0, 0.5), got {self.margin!r}")

    @classmethod
    def parse(cls, text: str, margin: float = DEFAULT_GRID_MARGIN) -> GridSpec:
        match = _GRID_PATTERN.fullmatch(text)
        if match is None:
            raise ConfigError(f"grid must look like NUxNV, got {text!r}", value=text)
        return cls(int(match.group(1)), int(match.group(2)), margin)

    def describe(self) -> str:
        return f"{self.nu}x{self.nv}"

    def _axis(self, lo: float, hi: float, n: int) -> list[float]:
        pad = (hi - lo) * self.margin
        a, b = lo + pad, hi - pad
        if n == 1:
            return [(a + b) / 2]
        return [a + (b - a) * i / (n - 1) for i in range(n)]

    def points(self, domain: ChartDomain) -> list[ChartPoint]:
        (u0, u1), (v0, v1) = domain
        us = self._axis(u0, u1, self.nu)
        vs = self._axis(v0, v1, self.nv)
        return [(u, v) for u in us for v in vs]

    def to_dict(self) -> dict[str, Any]:
        return {"nu": self.nu, "nv": self.nv, "margin": self.margin}

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> GridSpec:
        try:
            return cls(
                _positive_int(data, "nu"),
                _positive_int(data, "nv"),
                _required_float(data, "margin"),
            )
        except ConfigError as exc:
            raise ValueError(str(exc)) from exc


@dataclass(frozen=True)
class Tolerances:
    residual: float = DEFAULT_RESIDUAL_TOL
    case: float = DEFAULT_CASE_TOL
    classify: float = DEFAULT_CLASSIFY_TOL

    def __post_init__(self) -> None:
        for name in ("residual", "case", "classify"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise ConfigError(f"{name} tolerance must be positive and finite, got {value!r}")


@dataclass
class EquationResidual:
    """Aggregate of one structure equation over a grid."""

    name: str
    max_abs: float
    mean_abs: float
    argmax: Optional[ChartPoint] = None

    def to_dict(self) -> dict[str, Any]:
        return {
            "name": self.name,
            "max_abs": self.max_abs,
            "mean_abs": self.mean_abs,
            "argmax": list(self.argmax) if self.argmax is not None else None,
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> EquationResidual:
        return cls(
            name=_required_string(data, "name"),
            max_abs=_required_float(data, "max_abs"),
            mean_abs=_required_float(data, "mean_abs"),
            argmax=_point(data.get("argmax"), "argmax"),
        )


@dataclass
class PointFailure:
    """A grid point where extraction or rotation raised."""

    point: ChartPoint
    error: str
    message: str

    @classmethod
    def from_error(cls, point: ChartPoint, exc: AssocFamError) -> PointFailure:
        return cls(
            point=(float(point[0]), float(point[1])),
            error=type(exc).__name__,
            message=exc.message,
        )

    def to_dict(self) -> dict[str, Any]:
        return {"point": list(self.point), "error": self.error, "message": self.message}

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> PointFailure:
        point = _point(data.get("point"), "point")
        if point is None:
            raise ValueError("field 'point' must be a [u, v] pair")
        return cls(
            point=point,
            error=_required_string(data, "error"),
            message=_optional_string(data, "message") or "",
        )


@dataclass
class ResidualReport:
    """Per-equation residual statistics of one surface (or family member).

    ``passed`` is derived: every ``max_abs`` is at most ``tolerance`` and no
    grid point failed.
    """

    space: str
    surface: str
    grid: GridSpec
    tolerance: float
    equations: list[EquationResidual]
    failures: list[PointFailure] = field(default_factory=list)
    theta: Optional[float] = None
    notes: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures and all(eq.max_abs <= self.tolerance for eq in self.equations)

    def equation(self, name: str) -> EquationResidual:
        for eq in self.equations:
            if eq.name == name:
                return eq
        raise KeyError(name)

    def max_residual(self) -> float:
        return max((eq.max_abs for eq in self.equations), default=0.0)

    def to_dict(self) -> dict[str, Any]:
        return {
            "space": self.space,
            "surface": self.surface,
            "theta": self.theta,
            "grid": self.grid.to_dict(),
            "tolerance": self.tolerance,
            "passed": self.passed,
            "equations": [eq.to_dict() for eq in self.equations],
            "failures": [failure.to_dict() for failure in self.failures],
            "notes": list(self.notes),
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> ResidualReport:
        report = cls(
            space=_required_string(data, "space"),
            surface=_required_string(data, "surface"),
            grid=GridSpec.from_dict(_required_dict(data, "grid")),
            tolerance=_required_float(data, "tolerance"),
            equations=[
                EquationResidual.from_dict(item) for item in _required_list(data, "equations")
            ],
            failures=[PointFailure.from_dict(item) for item in _required_list(data, "failures")],
            theta=_optional_float(data, "theta"),
            notes=_string_list(data, "notes"),
        )
        if "passed" in data and _required_bool(data, "passed") != report.passed:
            raise ValueError("field 'passed' contradicts the equation rows")
        return report

    def to_json(self) -> str:
        return _serialize.dumps(self.to_dict())

    def csv_rows(self) -> list[list[Any]]:
        rows: list[list[Any]] = []
        for eq in self.equations:
            u, v = eq.argmax if eq.argmax is not None else (None, None)
            rows.append(
                [self.theta, eq.name, eq.max_abs, eq.mean_abs, u, v, self.tolerance, self.passed]
            )
        return rows

    def to_csv(self) -> str:
        return _serialize.csv_text(_CSV_HEADER, self.csv_rows())


_CSV_HEADER = (
    "theta",
    "equation",
    "max_abs",
    "mean_abs",
    "argmax_u",
    "argmax_v",
    "tolerance",
    "passed",
)


@dataclass
class FamilySweep:
    """Reports of one law over a list of angles."""

    space: str
    surface: str
    law: str
    reports: list[ResidualReport]

    @property
    def thetas(self) -> list[float]:
        return [report.theta if report.theta is not None else 0.0 for report in self.reports]

    @property
    def passed(self) -> bool:
        return all(report.passed for report in self.reports)

    @property
    def first_failing_theta(self) -> float | None:
        for theta, report in zip(self.thetas, self.reports):
            if not report.passed:
                return theta
        return None

    def summary(self) -> list[dict[str, Any]]:
        """One row per angle: the max residual of each equation and the pass flag."""
        rows = []
        for theta, report in zip(self.thetas, self.reports):
            row: dict[str, Any] = {"theta": theta}
            for eq in report.equations:
                row[eq.name] = eq.max_abs
            row["failures"] = len(report.failures)
            row["passed"] = report.passed
            rows.append(row)
        return rows

    def to_dict(self) -> dict[str, Any]:
        return {
            "space": self.space,
            "surface": self.surface,
            "law": self.law,
            "thetas": self.thetas,
            "passed": self.passed,
            "first_failing_theta": self.first_failing_theta,
            "summary": self.summary(),
            "reports": [report.to_dict() for report in self.reports],
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> FamilySweep:
        sweep = cls(
            space=_required_string(data, "space"),
            surface=_required_string(data, "surface"),
            law=_required_string(data, "law"),
            reports=[ResidualReport.from_dict(item) for item in _required_list(data, "reports")],
        )
        if "passed" in data and _required_bool(data, "passed") != sweep.passed:
            raise ValueError("field 'passed' contradicts the reports")
        return sweep

    def to_json(self) -> str:
        return _serialize.dumps(self.to_dict())

    def to_csv(self) -> str:
        rows: list[list[Any]] = []
        for report in self.reports:
            rows.extend(report.csv_rows())
        return _serialize.csv_text(_CSV_HEADER, rows)


@dataclass
class Verdict:
    """Outcome of :func:`assocfam.family.classify`.

    ``NotExists`` needs a positive ``magnitude``: the size of the obstruction
    that rules the family out.
    """

    outcome: Outcome
    obstruction: str
    case: CaseTag
    magnitude: float = 0.0
    space: str = ""
    surface: str = ""
    diagnostics: dict[str, float] = field(default_factory=dict)
    regions: dict[str, Verdict] = field(default_factory=dict)
    notes: list[str] = field(default_factory=list)

    def __post_init__(self) -> None:
        if self.outcome not in _OUTCOMES:
            raise ContractViolation(f"unknown outcome {self.outcome!r}")
        if self.case not in _CASE_TAGS:
            raise ContractViolation(f"unknown case tag {self.case!r}")
        if self.outcome == "NotExists" and not self.magnitude > 0:
            raise ContractViolation(
                f"NotExists needs a positive obstruction magnitude, got {self.magnitude!r}",
                value=self.magnitude,
            )

    @property
    def is_definite(self) -> bool:
        return self.outcome != "Undetermined"

    def to_dict(self) -> dict[str, Any]:
        return {
            "outcome": self.outcome,
            "obstruction": self.obstruction,
            "case": self.case,
            "magnitude": self.magnitude,
            "space": self.space,
            "surface": self.surface,
            "diagnostics": dict(self.diagnostics),
            "regions": {tag: sub.to_dict() for tag, sub in self.regions.items()},
            "notes": list(self.notes),
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> Verdict:
        diagnostics = data.get("diagnostics", {})
        if not isinstance(diagnostics, dict):
            raise ValueError("field 'diagnostics' must be an object")
        regions = data.get("regions", {})
        if not isinstance(regions, dict):
            raise ValueError("field 'regions' must be an object")
        try:
            return cls(
                outcome=cast(Outcome, _literal(data, "outcome", _OUTCOMES)),
                obstruction=_optional_string(data, "obstruction") or "",
                case=cast(CaseTag, _literal(data, "case", _CASE_TAGS)),
                magnitude=_required_float(data, "magnitude"),
                space=_optional_string(data, "space") or "",
                surface=_optional_string(data, "surface") or "",
                diagnostics={key: _required_float(diagnostics, key) for key in diagnostics},
                regions={tag: cls.from_dict(sub) for tag, sub in regions.items()},
                notes=_string_list(data, "notes"),
            )
        except ContractViolation as exc:
            raise ValueError(str(exc)) from exc

    def to_json(self) -> str:
        return _serialize.dumps(self.to_dict())

    def to_csv(self) -> str:
        rows: list[Sequence[Any]] = [
            ["outcome", self.outcome],
            ["obstruction", self.obstruction],
            ["case", self.case],
            ["magnitude", self.magnitude],
        ]
        rows.extend([f"diagnostics.{key}", value] for key, value in self.diagnostics.items())
        rows.extend([f"regions.{tag}", sub.outcome] for tag, sub in self.regions.items())
        return _serialize.csv_text(("key", "value"), rows)
