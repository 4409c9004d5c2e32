"""Structure-equation residuals.

Each ambient family has four compatibility equations (Gauss, Codazzi, the
``nabla T`` equation and the ``df`` equation). They are evaluated in the
coordinate frame with ``g``-norms; pair-dependent equations take the maximum
over ``d_u`` and ``d_v``.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Sequence
from typing import NamedTuple, Union

import numpy as np

from ._config import DEFAULT_RESIDUAL_TOL
from .ambient import AmbientSpace, HomogeneousSpace, WarpedProduct, format_space, warp_coefficients
from .exceptions import ContractViolation, DomainError
from .models import ChartPoint, EquationResidual, GridSpec, PointFailure, ResidualReport
from .surface import Immersion, SurfaceData, sample_grid

__all__ = [
    "HOMOGENEOUS_EQUATIONS",
    "WARPED_EQUATIONS",
    "StructureResiduals",
    "residual_homogeneous",
    "residual_warped",
    "gradient_residual",
    "closedness_residual",
    "pointwise_residuals",
    "report_from_samples",
    "residual_grid",
]

logger = logging.getLogger(__name__)

HOMOGENEOUS_EQUATIONS = ("r_G", "r_C", "r_T", "r_f")
WARPED_EQUATIONS = ("r_G", "r_C", "r_T", "r_f", "r_grad")

_BASIS = np.eye(2)

Sample = tuple[ChartPoint, Union[SurfaceData, PointFailure]]


class StructureResiduals(NamedTuple):
    r_G: float
    r_C: float
    r_T: float
    r_f: float


def _codazzi_lhs(d: SurfaceData) -> np.ndarray:
    """``(nabla_u A) d_v - (nabla_v A) d_u``."""
    return d.nablaA[0][:, 1] - d.nablaA[1][:, 0]


def _pair_term(d: SurfaceData) -> np.ndarray:
    """``<d_v, T> d_u - <d_u, T> d_v``."""
    return d.inner(_BASIS[1], d.T) * _BASIS[0] - d.inner(_BASIS[0], d.T) * _BASIS[1]


def residual_homogeneous(d: SurfaceData, kappa: float, tau: float) -> StructureResiduals:
    """Residuals of the E(kappa, tau) structure equations at one point.

    * Gauss: ``K = det A + tau**2 + (kappa - 4 tau**2)(1 - |T|**2)``
    * Codazzi: ``(nabla_X A)Y - (nabla_Y A)X = (kappa - 4 tau**2) f (<Y,T>X - <X,T>Y)``
    * ``nabla_X T = f (AX - tau JX)``
    * ``X(f) = -<AX, T> + tau <JX, T>``
    """
    bundle = kappa - 4 * tau * tau
    tnorm2 = d.inner(d.T, d.T)
    r_G = abs(d.K - float(np.linalg.det(d.A)) - tau * tau - bundle * (1 - tnorm2))
    r_C = d.norm(_codazzi_lhs(d) - bundle * d.f * _pair_term(d))
    r_T = max(d.norm(d.nablaT[i] - d.f * (d.A[:, i] - tau * d.Jmat[:, i])) for i in range(2))
    r_f = max(
        abs(d.df[i] + d.inner(d.A[:, i], d.T) - tau * d.inner(d.Jmat[:, i], d.T))
        for i in range(2)
    )
    return StructureResiduals(r_G, r_C, r_T, r_f)


def residual_warped(
    d: SurfaceData, w: WarpedProduct, pi: float | None = None
) -> StructureResiduals:
    """Residuals of the warped-product structure equations at one point.

    ``pi`` is the height at which ``a`` is evaluated, by default the ``t``
    coordinate of the point. With ``Q = a''/a - (a'/a)**2 + eps c / a**2``:

    * Gauss: ``K = eps3 det A + (c - eps a'**2) / a**2 - Q |T|**2``
    * Codazzi: right-hand side ``eps3 Q f (<Y,T>X - <X,T>Y)``
    * ``nabla_X T = f AX + (a'/a)(X - eps <X,T> T)``
    * ``X(f) = -eps3 <AX, T> - eps (a'/a) f <X, T>``
    """
    t = float(d.chi[2]) if pi is None else pi
    a = w.warp.derivatives(t)[0]
    coeffs = warp_coefficients(w, t)
    ratio = coeffs.log_derivative
    eps, eps3 = w.eps, d.eps3
    tnorm2 = d.inner(d.T, d.T)
    curvature = (w.c - eps * (ratio * a) ** 2) / (a * a)
    r_G = abs(d.K - eps3 * float(np.linalg.det(d.A)) - curvature + coeffs.q * tnorm2)
    r_C = d.norm(_codazzi_lhs(d) - eps3 * coeffs.q * d.f * _pair_term(d))
    r_T = 0.0
    r_f = 0.0
    for i in range(2):
        x = _BASIS[i]
        xt = d.inner(x, d.T)
        expected = d.f * d.A[:, i] + ratio * (x - eps * xt * d.T)
        r_T = max(r_T, d.norm(d.nablaT[i] - expected))
        r_f = max(
            r_f, abs(d.df[i] + eps3 * d.inner(d.A[:, i], d.T) + eps * ratio * d.f * xt)
        )
    return StructureResiduals(r_G, r_C, r_T, r_f)


def gradient_residual(d: SurfaceData, w: WarpedProduct) -> float:
    """``|T - eps grad(pi)|_g`` with ``pi`` the height along the surface."""
    return d.norm(d.T - w.eps * (d.ginv @ d.dheight))


def closedness_residual(d: SurfaceData) -> float:
    """``|d(T_flat)(d_u, d_v)| / sqrt(det g)``; zero when ``T`` is a gradient."""
    curl = d.inner(d.nablaT[0], _BASIS[1]) - d.inner(d.nablaT[1], _BASIS[0])
    return abs(curl) / d.sqrt_det_g


def pointwise_residuals(
    d: SurfaceData, space: AmbientSpace, *, rotated: bool = False
) -> dict[str, float]:
    """Named residuals of ``d`` against the equations of ``space``.

    For warped products ``r_grad`` is the gradient condition, or the
    closedness of ``T`` for ``rotated`` family members whose height is not
    sampled.
    """
    if isinstance(space, HomogeneousSpace):
        return dict(zip(HOMOGENEOUS_EQUATIONS, residual_homogeneous(d, space.kappa, space.tau)))
    values = dict(zip(WARPED_EQUATIONS, residual_warped(d, space)))
    values["r_grad"] = closedness_residual(d) if rotated else gradient_residual(d, space)
    return values


def _equation_names(space: AmbientSpace) -> tuple[str, ...]:
    return HOMOGENEOUS_EQUATIONS if isinstance(space, HomogeneousSpace) else WARPED_EQUATIONS


def report_from_samples(
    samples: Sequence[Sample],
    space: AmbientSpace,
    surface: str,
    grid: GridSpec,
    tol: float = DEFAULT_RESIDUAL_TOL,
    *,
    theta: float | None = None,
    rotated: bool = False,
) -> ResidualReport:
    """Aggregate pointwise residuals into a report.

    Means use compensated summation; ``argmax`` is the first grid point
    attaining the maximum.
    """
    names = _equation_names(space)
    columns: dict[str, list[tuple[float, ChartPoint]]] = {name: [] for name in names}
    failures: list[PointFailure] = []
    for q, item in samples:
        if isinstance(item, PointFailure):
            failures.append(item)
            continue
        try:
            values = pointwise_residuals(item, space, rotated=rotated)
        except DomainError as exc:
            failures.append(PointFailure.from_error(q, exc))
            continue
        bad = [name for name, value in values.items() if not math.isfinite(value)]
        if bad:
            failures.append(
                PointFailure(point=q, error="NonFiniteResidual", message=", ".join(bad))
            )
            continue
        for name in names:
            columns[name].append((values[name], q))

    equations = []
    for name in names:
        column = columns[name]
        if not column:
            equations.append(EquationResidual(name, 0.0, 0.0, None))
            continue
        best_value, best_point = column[0]
        for value, q in column[1:]:
            if value > best_value:
                best_value, best_point = value, q
        mean = math.fsum(value for value, _ in column) / len(column)
        equations.append(EquationResidual(name, best_value, mean, best_point))

    notes: list[str] = []
    if rotated and isinstance(space, WarpedProduct):
        notes.append("r_grad measures the closedness of T; a is evaluated at the base height")
    report = ResidualReport(
        space=format_space(space),
        surface=surface,
        grid=grid,
        tolerance=tol,
        equations=equations,
        failures=failures,
        theta=theta,
        notes=notes,
    )
    if failures:
        logger.warning("%d grid point(s) of %s failed", len(failures), surface)
    logger.info(
        "%s%s: max residual %.3g (%s)",
        surface,
        "" if theta is None else f" at theta={theta:.6g}",
        report.max_residual(),
        "pass" if report.passed else "FAIL",
    )
    return report


def residual_grid(
    imm: Immersion,
    grid: GridSpec | None = None,
    tol: float = DEFAULT_RESIDUAL_TOL,
    *,
    space: AmbientSpace | None = None,
    threads: int | None = None,
) -> ResidualReport:
    """Sample ``imm`` on ``grid`` and check its structure equations.

    ``space`` replaces the equations' parameters (not the geometry) and must
    be of the same family as ``imm.space``.
    """
    equations_space = imm.space if space is None else space
    if type(equations_space) is not type(imm.space):
        raise ContractViolation(
            f"cannot check a surface in {format_space(imm.space)} "
            f"against the equations of {format_space(equations_space)}"
        )
    grid = grid or GridSpec()
    samples = sample_grid(imm, grid, threads)
    return report_from_samples(samples, equations_space, imm.name, grid, tol)
