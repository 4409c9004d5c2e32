"""Built-in parametrized surfaces.

Each entry covers one case of the classification and records the verdict
:func:`assocfam.family.classify` returns for its default space and
parameters. Entries are looked up by stable names (used by the CLI)::

    imm = make_surface("helicoid-product", {"space": "E(1,0)", "pitch": 0.5})
"""

from __future__ import annotations

import logging
import math
from collections.abc import Callable, Mapping
from dataclasses import dataclass
from typing import Any, Literal, NamedTuple, Optional, Union

from ._expr import GRAPH_FUNCTIONS, Expression
from .ambient import (
    AmbientSpace,
    HomogeneousSpace,
    WarpedProduct,
    finite_window,
    format_space,
    parse_space,
)
from .exceptions import ConfigError, ParamOutOfRange, UnknownEntry
from .jets import Jet2, JetLike, lift
from .models import CaseTag, ChartDomain, Outcome
from .surface import ChartMap, Immersion

__all__ = [
    "ParamSpec",
    "ExpectedVerdict",
    "CatalogEntry",
    "make_surface",
    "list_catalog",
    "get_entry",
]

logger = logging.getLogger(__name__)

ParamKind = Literal["float", "choice", "expr"]
ParamValue = Union[float, str]
Builder = Callable[[AmbientSpace, Mapping[str, Any]], tuple[ChartDomain, ChartMap]]


@dataclass(frozen=True)
class ParamSpec:
    """A catalog parameter: its default and the values it accepts."""

    name: str
    default: ParamValue
    description: str
    kind: ParamKind = "float"
    low: float = -math.inf
    high: float = math.inf
    choices: tuple[str, ...] = ()
    nonzero: bool = False

    def coerce(self, value: object) -> ParamValue:
        """Convert a CLI string or a Python value, checking the documented range."""
        if self.kind == "expr":
            if not isinstance(value, str):
                raise ParamOutOfRange(f"{self.name} must be an expression string", name=self.name)
            return value
        if self.kind == "choice":
            text = str(value).strip()
            if text not in self.choices:
                raise ParamOutOfRange(
                    f"{self.name} must be one of {', '.join(self.choices)}, got {text!r}",
                    name=self.name,
                    value=value,
                )
            return text
        if not isinstance(value, (int, float, str)):
            raise ParamOutOfRange(
                f"{self.name} must be a number, got {value!r}", name=self.name, value=value
            )
        try:
            number = float(value)
        except ValueError:
            raise ParamOutOfRange(
                f"{self.name} must be a number, got {value!r}", name=self.name, value=value
            ) from None
        if not (math.isfinite(number) and self.low <= number <= self.high):
            raise ParamOutOfRange(
                f"{self.name} must lie in [{self.low:g}, {self.high:g}], got {number!r}",
                name=self.name,
                value=number,
            )
        if self.nonzero and number == 0:
            raise ParamOutOfRange(f"{self.name} must be nonzero", name=self.name, value=number)
        return number

    def describe(self) -> str:
        if self.kind == "choice":
            return f"{self.name} in {{{', '.join(self.choices)}}} (default {self.default})"
        if self.kind == "expr":
            return f"{self.name}: expression (default {self.default})"
        return f"{self.name} in [{self.low:g}, {self.high:g}] (default {self.default})"


class ExpectedVerdict(NamedTuple):
    outcome: Outcome
    obstruction: str
    case: CaseTag


@dataclass(frozen=True)
class CatalogEntry:
    """A named surface family.

    Attributes:
        name: Stable catalog name.
        default_space: Descriptor of the ambient space used when none is given.
        params: Parameter specs, in documentation order.
        builder: Returns the chart domain and map for a space and parameters.
        expected: Verdict for the default space and parameters, when fixed.
        note: Which case of the classification the entry exercises.
        families: Ambient families the entry accepts.
    """

    name: str
    default_space: str
    params: tuple[ParamSpec, ...]
    builder: Builder
    expected: Optional[ExpectedVerdict]
    note: str
    families: tuple[type, ...] = (HomogeneousSpace, WarpedProduct)

    @property
    def expected_case(self) -> CaseTag | None:
        return None if self.expected is None else self.expected.case

    def param(self, name: str) -> ParamSpec:
        for spec in self.params:
            if spec.name == name:
                return spec
        known = ", ".join(spec.name for spec in self.params) or "none"
        raise ParamOutOfRange(f"{self.name} has no parameter {name!r} (known: {known})", name=name)

    def resolve(self, params: Mapping[str, object]) -> dict[str, ParamValue]:
        values = {spec.name: spec.default for spec in self.params}
        for key, raw in params.items():
            values[key] = self.param(key).coerce(raw)
        return values

    def summary(self) -> dict[str, Any]:
        return {
            "name": self.name,
            "default_space": self.default_space,
            "params": [spec.describe() for spec in self.params],
            "expected": None if self.expected is None else self.expected._asdict(),
            "note": self.note,
        }


def _half_width(space: AmbientSpace, wanted: float) -> float:
    """Largest square half-width up to ``wanted`` inside the chart disc."""
    if isinstance(space, HomogeneousSpace) and space.kappa < 0:
        return min(wanted, 0.9 * math.sqrt(2.0 / -space.kappa))
    return wanted


def _chart_radius(space: AmbientSpace) -> float:
    if isinstance(space, HomogeneousSpace) and space.kappa < 0:
        return 2.0 / math.sqrt(-space.kappa)
    if isinstance(space, WarpedProduct) and space.c < 0:
        return 2.0
    return math.inf


def _height_window(space: AmbientSpace) -> tuple[float, float]:
    if isinstance(space, WarpedProduct):
        return finite_window(space.interval)
    return (-1.0, 1.0)


def _check_height(space: AmbientSpace, t: float, what: str) -> None:
    if isinstance(space, WarpedProduct):
        lo, hi = space.interval
        if not lo < t < hi:
            raise ParamOutOfRange(
                f"{what} = {t!r} lies outside I of {format_space(space)}", name=what
            )


def _radius_param(space: AmbientSpace, radius: float) -> None:
    if not radius < 0.9 * _chart_radius(space):
        raise ParamOutOfRange(
            f"radius {radius!r} leaves the chart of {format_space(space)}", name="radius"
        )


def _build_slice(space: AmbientSpace, p: Mapping[str, Any]) -> tuple[ChartDomain, ChartMap]:
    t0 = float(p["t0"])
    _check_height(space, t0, "t0")
    if isinstance(space, WarpedProduct) and space.k == 1:
        raise ParamOutOfRange(
            "a slice of a Lorentzian fiber is not a Riemannian surface", name="t0"
        )
    h = _half_width(space, 1.0)

    def chart(u: Jet2, v: Jet2) -> tuple[JetLike, ...]:
        return (u, v, t0)

    return ((-h, h), (-h, h)), chart


def _build_vertical(space: AmbientSpace, p: Mapping[str, Any]) -> tuple[ChartDomain, ChartMap]:
    if isinstance(space, WarpedProduct):
        if space.eps != 1:
            raise ParamOutOfRange(
                "a cylinder over a timelike t-line is not Riemannian", name="base"
            )
        if p["base"] == "circle" and space.k == 1:
            raise ParamOutOfRange("circles of a Lorentzian fiber are not spacelike", name="base")
    heights = _height_window(space)
    if p["base"] == "circle":
        r = float(p["radius"])
        _radius_param(space, r)

        def circle(u: Jet2, v: Jet2) -> tuple[JetLike, ...]:
            return (r * lift("cos", u), r * lift("sin", u), v)

        return ((-1.5, 1.5), heights), circle
    h = _half_width(space, 0.8)

    def line(u: Jet2, v: Jet2) -> tuple[JetLike, ...]:
        return (u, 0.0, v)

    return ((-h, h), heights), line


def _geodesic_radius(kappa: float, s: Jet2) -> JetLike:
    """Chart radius of the point at base distance ``s`` from the origin."""
    if kappa == 0:
        return s
    root = math.sqrt(abs(kappa))
    arg = 0.5 * root * s
    if kappa > 0:
        return (2 / root) * lift("sin", arg) / lift("cos", arg)
    return (2 / root) * lift("sinh", arg) / lift("cosh", arg)


def _build_helicoid(space: AmbientSpace, p: Mapping[str, Any]) -> tuple[ChartDomain, ChartMap]:
    pitch = float(p["pitch"])
    if isinstance(space, WarpedProduct):
        if space.warp.family != "const" or space.eps != 1 or space.k != 0:
            raise ParamOutOfRange(
                "the helicoid needs a constant warp over a Riemannian fiber, "
                f"got {format_space(space)}",
                name="space",
            )
        kappa = float(space.c)
        for end in (-1.5 * pitch, 1.5 * pitch):
            _check_height(space, end, "pitch")
    else:
        kappa = space.kappa
    s_max = 1.0 if kappa <= 0 else min(1.0, 0.9 * math.pi / math.sqrt(kappa))

    def helicoid(s: Jet2, phi: Jet2) -> tuple[JetLike, ...]:
        rho = _geodesic_radius(kappa, s)
        return (rho * lift("cos", phi), rho * lift("sin", phi), pitch * phi)

    return ((0.1, s_max), (-1.5, 1.5)), helicoid


def _build_nil_plane(space: AmbientSpace, p: Mapping[str, Any]) -> tuple[ChartDomain, ChartMap]:
    angle, offset = float(p["angle"]), float(p["offset"])
    c, s = math.cos(angle), math.sin(angle)
    h = _half_width(space, 1.0)
    if not offset * offset + h * h < _chart_radius(space) ** 2 * 0.81:
        raise ParamOutOfRange(f"offset {offset!r} leaves the chart", name="offset")

    def plane(u: Jet2, v: Jet2) -> tuple[JetLike, ...]:
        return (c * u - offset * s, s * u + offset * c, v)

    return ((-h, h), (-1.0, 1.0)), plane


def _build_tilted(space: AmbientSpace, p: Mapping[str, Any]) -> tuple[ChartDomain, ChartMap]:
    slope = float(p["slope"])
    h = _half_width(space, 0.8)

    def tilted(u: Jet2, v: Jet2) -> tuple[JetLike, ...]:
        return (u, v, slope * u)

    return ((-h, h), (-h, h)), tilted


def _build_graph(space: AmbientSpace, p: Mapping[str, Any]) -> tuple[ChartDomain, ChartMap]:
    phi = Expression(str(p["phi"]), ("u", "v"), GRAPH_FUNCTIONS)
    h = _half_width(space, 1.0)

    def graph(u: Jet2, v: Jet2) -> tuple[JetLike, ...]:
        return (u, v, phi(u, v))

    return ((-h, h), (-h, h)), graph


_RADIUS = ParamSpec("radius", 0.5, "chart radius of the base circle", low=0.01, high=10.0)
_BASE = ParamSpec("base", "geodesic", "base curve", kind="choice", choices=("geodesic", "circle"))

_ENTRIES: tuple[CatalogEntry, ...] = (
    CatalogEntry(
        name="slice-product",
        default_space="E(1,0)",
        params=(ParamSpec("t0", 0.0, "height of the slice"),),
        builder=_build_slice,
        expected=ExpectedVerdict("ExistsTotallyUmbilical", "none", "T_zero"),
        note=(
            "horizontal slice t = t0: totally geodesic in E(kappa,0), totally umbilical "
            "in a warped product with a'(t0) != 0; both route to ExistsTotallyUmbilical"
        ),
    ),
    CatalogEntry(
        name="vertical-cylinder",
        default_space="E(-1,0)",
        params=(_BASE, _RADIUS),
        builder=_build_vertical,
        expected=ExpectedVerdict("ExistsVerticalCylinderProduct", "none", "T_equals_dt"),
        note="preimage of a base geodesic or circle; exists iff tau = 0 over a geodesic",
        families=(HomogeneousSpace,),
    ),
    CatalogEntry(
        name="warped-cylinder",
        default_space="W(1,1,1,0,a=cosh[2,0],I=[-1,1])",
        params=(_BASE, _RADIUS),
        builder=_build_vertical,
        expected=ExpectedVerdict("NotExists", "warpDerivative", "T_equals_dt"),
        note="fiber curve times I; exists iff a is constant and the curve is a geodesic",
        families=(WarpedProduct,),
    ),
    CatalogEntry(
        name="helicoid-product",
        default_space="E(-1,0)",
        params=(
            ParamSpec(
                "pitch", 1.0, "vertical rise per radian", low=-10.0, high=10.0, nonzero=True
            ),
        ),
        builder=_build_helicoid,
        expected=ExpectedVerdict("ExistsMinimalProduct", "none", "generic"),
        note=(
            "horizontal geodesics screwed along the fiber; minimal in M^2(kappa) x R "
            "and in warped products with constant a"
        ),
    ),
    CatalogEntry(
        name="nil3-vertical-plane",
        default_space="E(0,0.5)",
        params=(
            ParamSpec("angle", 0.0, "direction of the base line", low=-math.pi, high=math.pi),
            ParamSpec(
                "offset", 0.0, "distance of the base line from the origin", low=-1.0, high=1.0
            ),
        ),
        builder=_build_nil_plane,
        expected=ExpectedVerdict("NotExists", "relationHandtau", "T_equals_dt"),
        note="minimal vertical plane with tau != 0: no associate family",
        families=(HomogeneousSpace,),
    ),
    CatalogEntry(
        name="tilted-plane-product",
        default_space="E(-1,0)",
        params=(ParamSpec("slope", 0.5, "slope of t along x", low=-5.0, high=5.0, nonzero=True),),
        builder=_build_tilted,
        expected=ExpectedVerdict("NotExists", "minimalOrUmbilical", "generic"),
        note="graph t = slope x: neither minimal nor umbilical",
        families=(HomogeneousSpace,),
    ),
    CatalogEntry(
        name="graph",
        default_space="E(-1,0)",
        params=(ParamSpec("phi", "0.2*u*v", "height t = phi(u, v)", kind="expr"),),
        builder=_build_graph,
        expected=None,
        note="user graph over the fiber chart; the verdict depends on phi",
    ),
)

_BY_NAME = {entry.name: entry for entry in _ENTRIES}


def list_catalog() -> list[CatalogEntry]:
    """All entries in documentation order."""
    return list(_ENTRIES)


def get_entry(name: str) -> CatalogEntry:
    try:
        return _BY_NAME[name]
    except KeyError:
        raise UnknownEntry(
            f"unknown surface {name!r}; choose one of {', '.join(_BY_NAME)}", value=name
        ) from None


def _space_of(entry: CatalogEntry, raw: object) -> AmbientSpace:
    if raw is None:
        space = parse_space(entry.default_space)
    elif isinstance(raw, str):
        space = parse_space(raw)
    elif isinstance(raw, (HomogeneousSpace, WarpedProduct)):
        space = raw
    else:
        raise ConfigError(f"space must be a descriptor or an ambient space, got {raw!r}")
    if not isinstance(space, entry.families):
        raise ParamOutOfRange(
            f"{entry.name} is not defined in {format_space(space)}", name="space"
        )
    return space


def make_surface(name: str, params: Mapping[str, object] | None = None) -> Immersion:
    """Build the catalog surface ``name``.

    ``params`` may hold a ``space`` (descriptor or space object); every other
    key must be one of the entry's parameters. Strings are accepted for
    numeric parameters so CLI values pass through unchanged.

    Raises:
        UnknownEntry: no entry is called ``name``.
        ParamOutOfRange: a parameter is unknown or outside its range, or the
            entry is not defined in the requested space.
    """
    entry = get_entry(name)
    given = dict(params or {})
    space = _space_of(entry, given.pop("space", None))
    values = entry.resolve(given)
    domain, chart = entry.builder(space, values)
    logger.debug("built %s in %s with %s", name, format_space(space), values)
    return Immersion(space=space, chart_domain=domain, map=chart, name=name)
