"""Ambient 3-manifolds: homogeneous spaces E(kappa, tau) and warped products.

Both families use chart coordinates ``(x, y, t)`` with ``t`` the distinguished
coordinate, so the vertical field is always ``(0, 0, 1)``.

* ``E(kappa, tau)``: ``lam**2 (dx**2 + dy**2) + (tau*lam*(y dx - x dy) + dt)**2``
  with ``lam = 1 / (1 + kappa (x**2 + y**2) / 4)``.
* ``I x_a M_k(c)``: ``a(t)**2 Lam**2 (dx**2 + sigma dy**2) + eps dt**2`` with
  ``Lam = 1 / (1 + c (x**2 + sigma y**2) / 4)`` and ``sigma = -1`` for a
  Lorentzian fiber (``k = 1``).

Metric components are written once over :data:`~assocfam.jets.JetLike`
values, so metric derivatives come from jets rather than differences.
"""

from __future__ import annotations

import logging
import math
import re
from collections.abc import Sequence
from dataclasses import dataclass
from typing import NamedTuple, Union

import numpy as np

from ._config import SPACEFORM_TOL
from ._expr import WARP_FUNCTIONS, Expression, split_top_level
from .exceptions import ConfigError, DomainError, InternalError
from .jets import Jet2, JetLike, jet_constant, jet_variable, lift, value_of

__all__ = [
    "AmbientPoint",
    "AmbientSpace",
    "HomogeneousSpace",
    "WarpedProduct",
    "WarpFunction",
    "WarpCoefficients",
    "parse_space",
    "format_space",
    "metric_at",
    "metric_components",
    "metric_derivatives",
    "christoffels_at",
    "lowered_christoffels",
    "vertical_field",
    "check_chart",
    "spaceform_residual",
    "is_spaceform",
    "warp_coefficients",
    "finite_window",
]

logger = logging.getLogger(__name__)

_WARP_ARITY = {"const": 1, "cosh": 2, "sinh": 2, "sin": 2, "linear": 2, "exp": 2}


class AmbientPoint(NamedTuple):
    x: float
    y: float
    t: float


def _fmt(x: float) -> str:
    """Shortest round-trip text for a descriptor number."""
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    if float(x).is_integer() and abs(x) < 1e16:
        return str(int(x))
    return repr(float(x))


def _parse_number(text: str, what: str, *, allow_inf: bool = False) -> float:
    try:
        value = float(text)
    except ValueError:
        raise ConfigError(f"{what} must be a number, got {text!r}") from None
    if math.isnan(value) or (math.isinf(value) and not allow_inf):
        raise ConfigError(f"{what} must be finite, got {text!r}")
    return value


def _parse_int(text: str, what: str, allowed: Sequence[int]) -> int:
    value = _parse_number(text, what)
    if not value.is_integer() or int(value) not in allowed:
        choices = ", ".join(str(a) for a in allowed)
        raise ConfigError(f"{what} must be one of {choices}, got {text!r}")
    return int(value)


def finite_window(interval: tuple[float, float], length: float = 2.0) -> tuple[float, float]:
    """A bounded piece of ``interval``: itself when finite, else ``length`` at the finite end."""
    lo, hi = interval
    if math.isinf(lo) and math.isinf(hi):
        return (-length / 2, length / 2)
    if math.isinf(lo):
        return (hi - length, hi)
    if math.isinf(hi):
        return (lo, lo + length)
    return (lo, hi)


@dataclass(frozen=True)
class WarpFunction:
    """Warping function ``a(t)`` from a named family.

    Families: ``const[c]``, ``cosh[C1,C2]`` (``cosh(C1 t + C2) / C1``),
    ``sinh[C1,C2]``, ``sin[C1,C2]`` (same scaling), ``linear[m,b]``,
    ``exp[C1,C2]`` (``exp(C1 t + C2)``) and ``custom[<expression in t>]``.
    """

    family: str
    params: tuple[float, ...] = ()
    expr: Expression | None = None

    def __post_init__(self) -> None:
        if self.family == "custom":
            if self.expr is None:
                raise ConfigError("custom warp needs an expression")
            return
        if self.family not in _WARP_ARITY:
            choices = ", ".join([*sorted(_WARP_ARITY), "custom"])
            raise ConfigError(f"warp family must be one of {choices}, got {self.family!r}")
        if len(self.params) != _WARP_ARITY[self.family]:
            raise ConfigError(
                f"{self.family} warp takes {_WARP_ARITY[self.family]} parameter(s), "
                f"got {len(self.params)}"
            )
        if self.family in ("cosh", "sinh", "sin") and self.params[0] == 0:
            raise ConfigError(f"{self.family} warp needs a nonzero rate C1")

    @classmethod
    def parse(cls, text: str) -> WarpFunction:
        match = re.fullmatch(r"\s*([a-z]+)\[(.*)\]\s*", text, flags=re.S)
        if match is None:
            raise ConfigError(f"warp must look like name[params], got {text!r}")
        family, body = match.group(1), match.group(2)
        if family == "custom":
            return cls("custom", (), Expression(body, ("t",), WARP_FUNCTIONS))
        params = tuple(_parse_number(p, f"{family} parameter") for p in split_top_level(body))
        return cls(family, params)

    def describe(self) -> str:
        if self.family == "custom":
            return f"custom[{self.expr}]"
        return f"{self.family}[{','.join(_fmt(p) for p in self.params)}]"

    def __call__(self, t: JetLike) -> JetLike:
        if self.family == "custom":
            assert self.expr is not None
            return self.expr(t)
        p = self.params
        if self.family == "const":
            return jet_constant(p[0], t.deg) if isinstance(t, Jet2) else p[0]
        if self.family == "linear":
            return p[0] * t + p[1]
        arg = p[0] * t + p[1]
        if self.family == "exp":
            return lift("exp", arg)
        return lift(self.family, arg) / p[0]

    def derivatives(self, t: float) -> tuple[float, float, float, float]:
        """``(a, a', a'', a''')`` at ``t``, exact up to rounding."""
        a = self(jet_variable(0, t, 3))
        if not isinstance(a, Jet2):
            return (float(a), 0.0, 0.0, 0.0)
        return (a.partial(0, 0), a.partial(1, 0), a.partial(2, 0), a.partial(3, 0))


@dataclass(frozen=True)
class HomogeneousSpace:
    """``E(kappa, tau)``: base curvature ``kappa``, bundle curvature ``tau``."""

    kappa: float
    tau: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.kappa) and math.isfinite(self.tau)):
            raise ConfigError("kappa and tau must be finite")
        if self.kappa == 4 * self.tau * self.tau:
            raise ConfigError(
                f"E({_fmt(self.kappa)},{_fmt(self.tau)}) has kappa = 4 tau^2 (a space form)"
            )

    @property
    def bundle_term(self) -> float:
        """``kappa - 4 tau**2``."""
        return self.kappa - 4 * self.tau * self.tau

    def describe(self) -> str:
        return f"E({_fmt(self.kappa)},{_fmt(self.tau)})"


@dataclass(frozen=True)
class WarpedProduct:
    """``I x_a M_k(c)`` with metric ``eps dt**2 + a(t)**2 g_c``.

    Attributes:
        eps: Sign of ``dt**2``.
        eps0: Sign attached to the fiber; ``c = eps0 = +-1`` or ``c = 0, eps0 = 1``.
        c: Fiber curvature in ``{-1, 0, 1}``.
        k: Index of the fiber metric in ``{0, 1}``.
        warp: The warping function.
        interval: Open interval ``I``; ends may be infinite.
    """

    eps: int
    eps0: int
    c: int
    k: int
    warp: WarpFunction
    interval: tuple[float, float]

    def __post_init__(self) -> None:
        if self.eps not in (-1, 1) or self.eps0 not in (-1, 1):
            raise ConfigError("eps and eps0 must be +1 or -1")
        if self.c not in (-1, 0, 1):
            raise ConfigError(f"c must be -1, 0 or 1, got {self.c}")
        if self.k not in (0, 1):
            raise ConfigError(f"k must be 0 or 1, got {self.k}")
        if not ((self.c != 0 and self.c == self.eps0) or (self.c == 0 and self.eps0 == 1)):
            raise ConfigError("need c = eps0 = +-1, or c = 0 with eps0 = 1")
        lo, hi = self.interval
        if not lo < hi:
            raise ConfigError(f"interval must satisfy lo < hi, got [{_fmt(lo)},{_fmt(hi)}]")
        wlo, whi = finite_window(self.interval)
        for i in range(1, 34):
            t = wlo + (whi - wlo) * i / 34
            try:
                a = value_of(self.warp(t))
            except DomainError as exc:
                raise ConfigError(f"warp {self.warp.describe()} undefined at t={t:.6g}") from exc
            if not a > 0:
                raise ConfigError(
                    f"warp {self.warp.describe()} must be positive on I, got a({t:.6g}) = {a:.6g}"
                )

    @property
    def sigma(self) -> int:
        """Sign of the second fiber direction."""
        return -1 if self.k == 1 else 1

    def describe(self) -> str:
        lo, hi = self.interval
        return (
            f"W({self.eps},{self.eps0},{self.c},{self.k},"
            f"a={self.warp.describe()},I=[{_fmt(lo)},{_fmt(hi)}])"
        )


AmbientSpace = Union[HomogeneousSpace, WarpedProduct]


def parse_space(text: str) -> AmbientSpace:
    """Parse ``E(kappa,tau)`` or ``W(eps,eps0,c,k,a=<warp>,I=[lo,hi])``."""
    s = text.strip()
    if s.startswith("E(") and s.endswith(")"):
        parts = split_top_level(s[2:-1])
        if len(parts) != 2:
            raise ConfigError(f"E(...) takes kappa and tau, got {text!r}")
        return HomogeneousSpace(_parse_number(parts[0], "kappa"), _parse_number(parts[1], "tau"))
    if s.startswith("W(") and s.endswith(")"):
        parts = split_top_level(s[2:-1])
        if len(parts) != 6 or not parts[4].startswith("a=") or not parts[5].startswith("I="):
            raise ConfigError(f"W(...) takes eps,eps0,c,k,a=...,I=[lo,hi]; got {text!r}")
        bounds = parts[5][2:]
        if not (bounds.startswith("[") and bounds.endswith("]")):
            raise ConfigError(f"interval must look like I=[lo,hi], got {parts[5]!r}")
        ends = split_top_level(bounds[1:-1])
        if len(ends) != 2:
            raise ConfigError(f"interval must have two ends, got {parts[5]!r}")
        return WarpedProduct(
            eps=_parse_int(parts[0], "eps", (-1, 1)),
            eps0=_parse_int(parts[1], "eps0", (-1, 1)),
            c=_parse_int(parts[2], "c", (-1, 0, 1)),
            k=_parse_int(parts[3], "k", (0, 1)),
            warp=WarpFunction.parse(parts[4][2:]),
            interval=(
                _parse_number(ends[0], "interval start", allow_inf=True),
                _parse_number(ends[1], "interval end", allow_inf=True),
            ),
        )
    raise ConfigError(f"space must be E(...) or W(...), got {text!r}")


def format_space(space: AmbientSpace) -> str:
    return space.describe()


def _chart_denominator(space: AmbientSpace, x: JetLike, y: JetLike) -> JetLike:
    if isinstance(space, HomogeneousSpace):
        return 1 + space.kappa * (x * x + y * y) / 4
    return 1 + space.c * (x * x + space.sigma * (y * y)) / 4


def check_chart(space: AmbientSpace, p: Sequence[float]) -> None:
    """Raise :class:`DomainError` unless ``p`` lies in the model chart."""
    x, y, t = (float(c) for c in p)
    if not all(math.isfinite(c) for c in (x, y, t)):
        raise DomainError(f"non-finite ambient point {(x, y, t)!r}", value=(x, y, t))
    if not value_of(_chart_denominator(space, x, y)) > 0:
        raise DomainError(f"point {(x, y, t)!r} outside the chart of {space.describe()}")
    if isinstance(space, WarpedProduct):
        lo, hi = space.interval
        if not lo < t < hi:
            raise DomainError(f"t = {t!r} outside I = [{_fmt(lo)}, {_fmt(hi)}]", value=t)


def metric_components(space: AmbientSpace, x: JetLike, y: JetLike, t: JetLike) -> np.ndarray:
    """3x3 object array of metric components at jet or float coordinates."""
    inv = lift("recip", _chart_denominator(space, x, y))
    g = np.empty((3, 3), dtype=object)
    g[:] = 0.0
    if isinstance(space, HomogeneousSpace):
        conformal = inv * inv
        omega = (space.tau * inv * y, -space.tau * inv * x, 1.0)
        for i in range(3):
            for j in range(i, 3):
                entry = omega[i] * omega[j]
                if i == j and i < 2:
                    entry = entry + conformal
                g[i, j] = g[j, i] = entry
        return g
    a = space.warp(t)
    fiber = a * a * inv * inv
    g[0, 0] = fiber
    g[1, 1] = space.sigma * fiber
    g[2, 2] = float(space.eps)
    return g


def _floats(m: np.ndarray) -> np.ndarray:
    return np.vectorize(value_of, otypes=[np.float64])(m)


def metric_at(space: AmbientSpace, p: Sequence[float]) -> np.ndarray:
    """Metric matrix ``G`` at ``p``."""
    check_chart(space, p)
    x, y, t = (float(c) for c in p)
    return _floats(metric_components(space, x, y, t))


def _partials(m: np.ndarray, index: tuple[int, int]) -> np.ndarray:
    out = np.zeros((3, 3))
    for i in range(3):
        for j in range(3):
            entry = m[i, j]
            if isinstance(entry, Jet2):
                out[i, j] = entry.partial(*index)
    return out


def metric_derivatives(
    space: AmbientSpace, p: Sequence[float]
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """``(G, dG, d2G)`` at ``p`` with ``dG[a] = d_a G`` and ``d2G[a, b] = d_a d_b G``.

    Three degree-2 jet evaluations cover the coordinate pairs (x, y),
    (x, t) and (y, t).
    """
    check_chart(space, p)
    x0, y0, t0 = (float(c) for c in p)
    u = jet_variable(0, 0.0, 2)
    v = jet_variable(1, 0.0, 2)
    dG = np.zeros((3, 3, 3))
    d2G = np.zeros((3, 3, 3, 3))
    for first, second in ((0, 1), (0, 2), (1, 2)):
        coords: list[JetLike] = [x0, y0, t0]
        coords[first] = coords[first] + u
        coords[second] = coords[second] + v
        m = metric_components(space, *coords)
        dG[first] = _partials(m, (1, 0))
        dG[second] = _partials(m, (0, 1))
        d2G[first, first] = _partials(m, (2, 0))
        d2G[second, second] = _partials(m, (0, 2))
        d2G[first, second] = d2G[second, first] = _partials(m, (1, 1))
    G = _floats(metric_components(space, x0, y0, t0))
    return G, dG, d2G


def lowered_christoffels(dG: np.ndarray) -> np.ndarray:
    """``Gamma[l, i, j] = (d_i G_jl + d_j G_il - d_l G_ij) / 2``."""
    return 0.5 * (np.einsum("ijl->lij", dG) + np.einsum("jil->lij", dG) - dG)


def christoffels_at(space: AmbientSpace, p: Sequence[float]) -> np.ndarray:
    """Levi-Civita symbols ``Gamma[k, i, j]`` of the ambient metric at ``p``."""
    G, dG, _ = metric_derivatives(space, p)
    det = float(np.linalg.det(G))
    if not math.isfinite(det) or abs(det) < 1e-300:
        raise InternalError(f"degenerate ambient metric at {tuple(p)!r}", value=det)
    return np.einsum("kl,lij->kij", np.linalg.inv(G), lowered_christoffels(dG))


def vertical_field(space: AmbientSpace, p: Sequence[float]) -> np.ndarray:
    """The coordinate field ``d/dt``."""
    check_chart(space, p)
    return np.array([0.0, 0.0, 1.0])


class WarpCoefficients(NamedTuple):
    log_derivative: float
    """``a'/a``."""
    second_ratio: float
    """``a''/a``."""
    q: float
    """``a''/a - (a'/a)**2 + eps c / a**2``."""


def warp_coefficients(w: WarpedProduct, t: float) -> WarpCoefficients:
    a, a1, a2, _ = w.warp.derivatives(t)
    if not a > 0:
        raise DomainError(f"warp must be positive, got a({t!r}) = {a!r}", value=a)
    ratio = a1 / a
    return WarpCoefficients(ratio, a2 / a, a2 / a - ratio * ratio + w.eps * w.c / (a * a))


def spaceform_residual(w: WarpedProduct, t: float) -> float:
    """``a'' a - a'**2 + eps c``; zero on all of I exactly for space forms."""
    a, a1, a2, _ = w.warp.derivatives(t)
    return a2 * a - a1 * a1 + w.eps * w.c


def is_spaceform(w: WarpedProduct, samples: int = 33) -> bool:
    """Whether the warping ODE holds at ``samples`` interior points of I."""
    lo, hi = finite_window(w.interval)
    for i in range(1, samples + 1):
        t = lo + (hi - lo) * i / (samples + 1)
        a, a1, a2, _ = w.warp.derivatives(t)
        scale = 1.0 + abs(a2 * a) + a1 * a1 + abs(w.eps * w.c)
        if abs(a2 * a - a1 * a1 + w.eps * w.c) > SPACEFORM_TOL * scale:
            return False
    logger.debug("%s satisfies the space-form warping equation", w.describe())
    return True
