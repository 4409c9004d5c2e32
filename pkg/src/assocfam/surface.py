"""Geometric data of parametrized surfaces.

A single jet pass at a chart point ``q`` yields everything the structure
equations need: the chart map is evaluated on degree-3 jets of ``(u, v)``, so
the tangent vectors are exact to degree 2 and the derived fields (``A``,
``T``, ``f``, ``H``, ``J``) are exact to degree 1. First derivatives of those
fields, corrected by the intrinsic Christoffel symbols, give the covariant
data; the Gauss curvature comes from the degree-2 jet of ``g`` through the
Brioschi formula.

Conventions:

* ``A X = -(tangential part of D_X nu)``, so ``sigma(X, Y) = eps3 <AX, Y> nu``.
* ``T`` and ``f`` split the vertical field: ``d/dt = dchi(T) + f nu``.
* ``Jmat`` is the rotation by ``pi/2`` of the orientation fixed by ``nu``;
  flipping the orientation negates ``nu``, ``f``, ``A`` and ``Jmat``.
* Matrices act on coordinate vectors: ``A[k, i]`` is the ``d_k`` component
  of ``A d_i``.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Callable, Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Any, NamedTuple, Optional, Union

import numpy as np

from . import _serialize
from ._config import DEGENERATE_TOL, LIGHTLIKE_TOL, ORIENTATION_TOL, resolve_threads
from .ambient import (
    AmbientSpace,
    check_chart,
    format_space,
    lowered_christoffels,
    metric_components,
    metric_derivatives,
)
from .exceptions import (
    ContractViolation,
    DegenerateImmersion,
    DomainError,
    ExtractionError,
    LightlikeNormal,
    SignatureError,
)
from .jets import Jet2, JetLike, jet_constant, jet_variable, lift, value_of
from .models import ChartDomain, ChartPoint, GridSpec, PointFailure

__all__ = [
    "ChartMap",
    "Immersion",
    "SurfaceData",
    "Frame",
    "CovariantData",
    "extract",
    "first_fundamental",
    "normal_and_sign",
    "shape_operator",
    "structure_projection",
    "gauss_curvature",
    "split_shape",
    "covariant_data",
    "covariant_fields",
    "with_fields",
    "FieldJets",
    "sample_grid",
    "resolve_orientation",
    "codazzi_identity_defect",
    "frame_matrices",
]

logger = logging.getLogger(__name__)

ChartMap = Callable[[Jet2, Jet2], Sequence[JetLike]]
GridSample = list[tuple[ChartPoint, Union["SurfaceData", PointFailure]]]


@dataclass(frozen=True)
class Immersion:
    """A parametrized surface ``chi: chart_domain -> space``.

    Attributes:
        space: The ambient manifold.
        chart_domain: ``((u0, u1), (v0, v1))``.
        map: Pure function from the ``u`` and ``v`` jets to the three ambient
            chart coordinates ``(x, y, t)``; constants may be plain floats.
        orientation: ``1`` or ``-1`` picks the normal; ``0`` resolves it
            from the sample grid (see :func:`resolve_orientation`).
        name: Label used in reports.
    """

    space: AmbientSpace
    chart_domain: ChartDomain
    map: ChartMap
    orientation: int = 0
    name: str = "custom"

    def __post_init__(self) -> None:
        if self.orientation not in (-1, 0, 1):
            raise ContractViolation(f"orientation must be -1, 0 or 1, got {self.orientation!r}")
        (u0, u1), (v0, v1) = self.chart_domain
        if not (u0 < u1 and v0 < v1):
            raise ContractViolation(f"empty chart domain {self.chart_domain!r}")

    def flipped(self) -> Immersion:
        """The same surface with the opposite normal."""
        if self.orientation == 0:
            raise ContractViolation("resolve the orientation before flipping it")
        return replace(self, orientation=-self.orientation)


@dataclass(frozen=True)
class FieldJets:
    """Degree-1 jets of the fields, kept for building rotated members."""

    A: np.ndarray
    T: np.ndarray
    f: Jet2
    H: Jet2
    J: np.ndarray
    gamma: np.ndarray
    ginv: np.ndarray


@dataclass(frozen=True, eq=False)
class SurfaceData:
    """Everything known about a surface at one chart point.

    ``nablaA[i]`` is the matrix of ``nabla_{d_i} A``; ``nablaT[i]`` is the
    vector ``nabla_{d_i} T``; ``df`` and ``dH`` are covectors;
    ``dheight`` is the differential of the ``t`` coordinate along the
    surface.
    """

    point: ChartPoint
    chi: np.ndarray
    g: np.ndarray
    Jmat: np.ndarray
    nu: np.ndarray
    eps3: int
    A: np.ndarray
    T: np.ndarray
    f: float
    H: float
    K: float
    Aa: np.ndarray
    nablaA: np.ndarray
    nablaT: np.ndarray
    df: np.ndarray
    dH: np.ndarray
    deltaAa: np.ndarray
    dheight: np.ndarray
    orientation: int
    _jets: Optional[FieldJets] = field(default=None, repr=False, compare=False)

    @property
    def ginv(self) -> np.ndarray:
        return np.linalg.inv(self.g)

    @property
    def sqrt_det_g(self) -> float:
        return math.sqrt(float(np.linalg.det(self.g)))

    def inner(self, x: np.ndarray, y: np.ndarray) -> float:
        return float(x @ self.g @ y)

    def norm(self, x: np.ndarray) -> float:
        return math.sqrt(max(self.inner(x, x), 0.0))

    def to_dict(self) -> dict[str, Any]:
        return {
            "point": list(self.point),
            "chi": self.chi.tolist(),
            "orientation": self.orientation,
            "eps3": self.eps3,
            "g": self.g.tolist(),
            "Jmat": self.Jmat.tolist(),
            "nu": self.nu.tolist(),
            "A": self.A.tolist(),
            "T": self.T.tolist(),
            "f": self.f,
            "H": self.H,
            "K": self.K,
            "Aa": self.Aa.tolist(),
            "nablaA": self.nablaA.tolist(),
            "nablaT": self.nablaT.tolist(),
            "df": self.df.tolist(),
            "dH": self.dH.tolist(),
            "deltaAa": self.deltaAa.tolist(),
            "dheight": self.dheight.tolist(),
        }

    @property
    def field_jets(self) -> FieldJets:
        if self._jets is None:
            raise ContractViolation("surface data carries no field jets")
        return self._jets

    def to_json(self) -> str:
        return _serialize.dumps(self.to_dict())


class CovariantData(NamedTuple):
    nablaA: np.ndarray
    nablaT: np.ndarray
    df: np.ndarray
    dH: np.ndarray
    deltaAa: np.ndarray


@dataclass(frozen=True)
class Frame:
    """Data of a point in the ``g``-orthonormal frame ``e1 = d_u/|d_u|``, ``e2 = J e1``.

    ``basis`` holds ``e1`` and ``e2`` as columns of coordinate components;
    operators are ``2x2`` matrices on frame components and ``nablaT`` is the
    operator ``X -> nabla_X T``.
    """

    basis: np.ndarray
    A: np.ndarray
    J: np.ndarray
    T: np.ndarray
    grad_f: np.ndarray
    grad_H: np.ndarray
    deltaAa: np.ndarray
    nablaT: np.ndarray


def _as_jet(x: JetLike, deg: int) -> Jet2:
    return x if isinstance(x, Jet2) else jet_constant(float(x), deg)


def _trunc(x: JetLike, deg: int) -> JetLike:
    if isinstance(x, Jet2) and x.deg > deg:
        return x.truncate(deg)
    return x


def _map(fn: Callable[[Any], Any], m: np.ndarray) -> np.ndarray:
    out = np.empty(m.shape, dtype=object)
    for index in np.ndindex(m.shape):
        out[index] = fn(m[index])
    return out


def _values(m: np.ndarray) -> np.ndarray:
    out = np.empty(m.shape)
    for index in np.ndindex(m.shape):
        out[index] = value_of(m[index])
    return out


def _first(x: JetLike, axis: int) -> float:
    if not isinstance(x, Jet2):
        return 0.0
    return x.partial(1, 0) if axis == 0 else x.partial(0, 1)


def _gradients(m: np.ndarray) -> np.ndarray:
    """``out[a, ...] = d_a m[...]`` at the base point."""
    out = np.empty((2, *m.shape))
    for index in np.ndindex(m.shape):
        out[(0, *index)] = _first(m[index], 0)
        out[(1, *index)] = _first(m[index], 1)
    return out


def _scaled(m: np.ndarray, s: JetLike) -> np.ndarray:
    return _map(lambda x: x * s, m)


def _cross(a: Sequence[JetLike], b: Sequence[JetLike]) -> np.ndarray:
    out = np.empty(3, dtype=object)
    out[0] = a[1] * b[2] - a[2] * b[1]
    out[1] = a[2] * b[0] - a[0] * b[2]
    out[2] = a[0] * b[1] - a[1] * b[0]
    return out


def _inv2(m: np.ndarray) -> np.ndarray:
    inv_det = lift("recip", m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0])
    out = np.empty((2, 2), dtype=object)
    out[0, 0] = m[1, 1] * inv_det
    out[0, 1] = -m[0, 1] * inv_det
    out[1, 0] = -m[1, 0] * inv_det
    out[1, 1] = m[0, 0] * inv_det
    return out


def _inv3(m: np.ndarray) -> np.ndarray:
    adj = np.empty((3, 3), dtype=object)
    for i in range(3):
        for j in range(3):
            r0, r1 = (k for k in range(3) if k != j)
            c0, c1 = (k for k in range(3) if k != i)
            minor = m[r0, c0] * m[r1, c1] - m[r0, c1] * m[r1, c0]
            adj[i, j] = minor if (i + j) % 2 == 0 else -minor
    det = m[0, 0] * adj[0, 0] + m[0, 1] * adj[1, 0] + m[0, 2] * adj[2, 0]
    return _scaled(adj, lift("recip", det))


def _jet_rotation(g: np.ndarray) -> np.ndarray:
    """``J_coord`` of an oriented 2x2 metric, entrywise in jets."""
    inv_root = lift("pow", g[0, 0] * g[1, 1] - g[0, 1] * g[1, 0], -0.5)
    rot = np.empty((2, 2), dtype=object)
    rot[0, 0] = -g[0, 1]
    rot[0, 1] = -g[1, 1]
    rot[1, 0] = g[0, 0]
    rot[1, 1] = g[0, 1]
    return _scaled(rot, inv_root)


def _brioschi(g: np.ndarray) -> float:
    E, F, G = g[0, 0], g[0, 1], g[1, 1]
    e, f_, g_ = E.value(), F.value(), G.value()
    Eu, Ev = E.partial(1, 0), E.partial(0, 1)
    Fu, Fv = F.partial(1, 0), F.partial(0, 1)
    Gu, Gv = G.partial(1, 0), G.partial(0, 1)
    Evv, Fuv, Guu = E.partial(0, 2), F.partial(1, 1), G.partial(2, 0)
    m1 = np.array(
        [
            [-Evv / 2 + Fuv - Guu / 2, Eu / 2, Fu - Ev / 2],
            [Fv - Gu / 2, e, f_],
            [Gv / 2, f_, g_],
        ]
    )
    m2 = np.array([[0.0, Ev / 2, Gu / 2], [Ev / 2, e, f_], [Gu / 2, f_, g_]])
    det_g = e * g_ - f_ * f_
    return float((np.linalg.det(m1) - np.linalg.det(m2)) / (det_g * det_g))


def _ambient_christoffel_jets(
    dG: np.ndarray, d2G: np.ndarray, xu: np.ndarray, xv: np.ndarray
) -> np.ndarray:
    """Degree-1 jets of the lowered ambient symbols along the surface."""
    coeffs = np.empty((3, 3, 3, 3))
    coeffs[..., 0] = dG
    coeffs[..., 1] = np.einsum("baij,b->aij", d2G, xu)
    coeffs[..., 2] = np.einsum("baij,b->aij", d2G, xv)
    lowered = np.empty_like(coeffs)
    for c in range(3):
        lowered[..., c] = lowered_christoffels(coeffs[..., c])
    out = np.empty((3, 3, 3), dtype=object)
    for index in np.ndindex(3, 3, 3):
        out[index] = Jet2(lowered[index], 1)
    return out


def _intrinsic_christoffels(g2: np.ndarray, ginv: np.ndarray) -> np.ndarray:
    """``gamma[k, i, j]`` of the induced metric at the base point."""
    return np.einsum("kl,lij->kij", ginv, lowered_christoffels(_gradients(g2)))


def covariant_fields(
    A: np.ndarray,
    T: np.ndarray,
    f: JetLike,
    H: JetLike,
    gamma: np.ndarray,
    ginv: np.ndarray,
) -> CovariantData:
    """Covariant derivatives of degree-1 field jets at their base point.

    ``(nabla_i A)^k_j = d_i A^k_j + Gamma^k_il A^l_j - A^k_l Gamma^l_ij``,
    ``(nabla_i T)^k = d_i T^k + Gamma^k_il T^l`` and
    ``deltaAa^k = g^ij (nabla_i (A - H 1))^k_j``.
    """
    A0 = _values(A)
    T0 = _values(T)
    dA = _gradients(A)
    dT = _gradients(T)
    df = np.array([_first(f, 0), _first(f, 1)])
    dH = np.array([_first(H, 0), _first(H, 1)])
    nablaA = np.empty((2, 2, 2))
    nablaT = np.empty((2, 2))
    for i in range(2):
        conn = gamma[:, i, :]
        nablaA[i] = dA[i] + conn @ A0 - A0 @ conn
        nablaT[i] = dT[i] + conn @ T0
    nablaAa = nablaA - dH[:, None, None] * np.eye(2)
    deltaAa = np.einsum("ij,ikj->k", ginv, nablaAa)
    return CovariantData(nablaA, nablaT, df, dH, deltaAa)


def with_fields(
    d: SurfaceData, A: np.ndarray, T: np.ndarray, f: JetLike, H: JetLike
) -> SurfaceData:
    """``d`` with ``A``, ``T``, ``f`` and ``H`` replaced by degree-1 jet fields.

    The intrinsic data, the ambient point and ``Jmat`` are kept; the
    covariant data is recomputed from the new jets.
    """
    jets = d.field_jets
    cov = covariant_fields(A, T, f, H, jets.gamma, jets.ginv)
    A0 = _values(A)
    H0 = value_of(H)
    return replace(
        d,
        A=A0,
        T=_values(T),
        f=value_of(f),
        H=H0,
        Aa=A0 - H0 * np.eye(2),
        nablaA=cov.nablaA,
        nablaT=cov.nablaT,
        df=cov.df,
        dH=cov.dH,
        deltaAa=cov.deltaAa,
        _jets=replace(jets, A=A, T=T, f=_as_jet(f, 1), H=_as_jet(H, 1)),
    )


def _extract_oriented(imm: Immersion, q: ChartPoint, s: int) -> SurfaceData:
    u0, v0 = float(q[0]), float(q[1])
    space = imm.space
    u = jet_variable(0, u0, 3)
    v = jet_variable(1, v0, 3)
    X = [_as_jet(c, 3) for c in imm.map(u, v)]
    if len(X) != 3:
        raise ContractViolation(f"chart map must return 3 coordinates, got {len(X)}")
    chi = np.array([c.value() for c in X])
    check_chart(space, chi)

    first = [[c.derivative(axis) for c in X] for axis in (0, 1)]
    second = np.empty((2, 2, 3), dtype=object)
    for i in range(2):
        for j in range(2):
            for a in range(3):
                second[i, j, a] = first[i][a].derivative(j)
    xu = np.array([c.value() for c in first[0]])
    xv = np.array([c.value() for c in first[1]])
    n_val = np.cross(xu, xv)
    if np.linalg.norm(n_val) <= DEGENERATE_TOL * np.linalg.norm(xu) * np.linalg.norm(xv):
        raise DegenerateImmersion("chi_u and chi_v are linearly dependent", point=(u0, v0))

    G3 = metric_components(space, *X)
    tangent2 = np.array(first, dtype=object)
    g2 = tangent2 @ _map(lambda x: _trunc(x, 2), G3) @ tangent2.T
    g1 = _map(lambda x: _trunc(x, 1), g2)
    G1 = _map(lambda x: _trunc(x, 1), G3)
    tangent1 = _map(lambda x: _trunc(x, 1), tangent2)

    n1 = _cross(tangent1[0], tangent1[1])
    nu_hat = _inv3(G1) @ n1
    N2 = _as_jet(n1 @ nu_hat, 1)
    G0, dG, d2G = metric_derivatives(space, chi)
    ginv_norm = float(np.linalg.norm(np.linalg.inv(G0)))
    if abs(N2.value()) <= LIGHTLIKE_TOL * float(n_val @ n_val) * ginv_norm:
        raise LightlikeNormal("the normal direction is lightlike", point=(u0, v0), value=N2.value())
    g_val = _values(g1)
    if not (g_val[0, 0] > 0 and np.linalg.det(g_val) > 0):
        raise SignatureError(
            "induced metric is not positive definite", point=(u0, v0), value=g_val.tolist()
        )
    eps3 = 1 if N2.value() > 0 else -1
    nu = _scaled(nu_hat, lift("pow", eps3 * N2, -0.5) * float(s))

    Gnu = G1 @ nu
    gamma_nu = np.empty((3, 3), dtype=object)
    lowered = _ambient_christoffel_jets(dG, d2G, xu, xv)
    for a in range(3):
        for b in range(3):
            gamma_nu[a, b] = sum(nu[m] * lowered[m, a, b] for m in range(3))
    h = np.empty((2, 2), dtype=object)
    for i in range(2):
        for j in range(i, 2):
            h[i, j] = h[j, i] = second[i, j] @ Gnu + tangent1[i] @ gamma_nu @ tangent1[j]

    ginv1 = _inv2(g1)
    A = ginv1 @ h
    b = np.array([tangent1[j] @ G1[2] for j in range(2)], dtype=object)
    T = ginv1 @ b
    f = _as_jet(eps3 * Gnu[2], 1)
    H = (A[0, 0] + A[1, 1]) * 0.5
    J = _scaled(_jet_rotation(g1), float(s))

    ginv = np.linalg.inv(g_val)
    gamma = _intrinsic_christoffels(g2, ginv)
    nablaA, nablaT, df, dH, deltaAa = covariant_fields(A, T, f, H, gamma, ginv)

    A0 = _values(A)
    H0 = H.value()
    return SurfaceData(
        point=(u0, v0),
        chi=chi,
        g=g_val,
        Jmat=_values(J),
        nu=_values(nu),
        eps3=eps3,
        A=A0,
        T=_values(T),
        f=f.value(),
        H=H0,
        K=_brioschi(g2),
        Aa=A0 - H0 * np.eye(2),
        nablaA=nablaA,
        nablaT=nablaT,
        df=df,
        dH=dH,
        deltaAa=deltaAa,
        dheight=np.array([xu[2], xv[2]]),
        orientation=s,
        _jets=FieldJets(A=A, T=T, f=f, H=H, J=J, gamma=gamma, ginv=ginv),
    )


def resolve_orientation(imm: Immersion, grid: GridSpec | None = None) -> Immersion:
    """Fix ``imm.orientation`` when it is ``0``.

    The normal is chosen so that ``f >= 0`` at the first grid point when
    ``|f|`` exceeds the orientation threshold there, and is the chart's
    right-handed normal otherwise.
    """
    if imm.orientation != 0:
        return imm
    q = (grid or GridSpec()).points(imm.chart_domain)[0]
    try:
        f = _extract_oriented(imm, q, 1).f
    except (ExtractionError, DomainError) as exc:
        logger.warning("orientation of %s defaults to +1: %s", imm.name, exc)
        return replace(imm, orientation=1)
    s = -1 if abs(f) > ORIENTATION_TOL and f < 0 else 1
    logger.debug("orientation of %s resolved to %+d (f=%.3g)", imm.name, s, f)
    return replace(imm, orientation=s)


def extract(imm: Immersion, q: ChartPoint) -> SurfaceData:
    """All geometric data of ``imm`` at ``q``.

    Raises:
        DomainError: ``chi(q)`` lies outside the ambient chart.
        DegenerateImmersion: ``chi_u`` and ``chi_v`` are dependent.
        LightlikeNormal: the normal line is degenerate.
        SignatureError: the induced metric is not positive definite.
    """
    imm = resolve_orientation(imm)
    return _extract_oriented(imm, q, imm.orientation)


def first_fundamental(imm: Immersion, q: ChartPoint) -> np.ndarray:
    return extract(imm, q).g


def normal_and_sign(imm: Immersion, q: ChartPoint) -> tuple[np.ndarray, int]:
    d = extract(imm, q)
    return d.nu, d.eps3


def shape_operator(imm: Immersion, q: ChartPoint) -> np.ndarray:
    return extract(imm, q).A


def structure_projection(imm: Immersion, q: ChartPoint) -> tuple[np.ndarray, float]:
    d = extract(imm, q)
    return d.T, d.f


def gauss_curvature(imm: Immersion, q: ChartPoint) -> float:
    return extract(imm, q).K


def covariant_data(imm: Immersion, q: ChartPoint) -> CovariantData:
    d = extract(imm, q)
    return CovariantData(d.nablaA, d.nablaT, d.df, d.dH, d.deltaAa)


def split_shape(A: np.ndarray, Jmat: np.ndarray) -> tuple[float, np.ndarray, np.ndarray]:
    """``(H, Ac, Aa)``: the parts of ``A`` commuting and anticommuting with ``Jmat``."""
    A = np.asarray(A, dtype=np.float64)
    H = float(np.trace(A)) / 2
    Ac = H * np.eye(2)
    return H, Ac, A - Ac


def sample_grid(
    imm: Immersion, grid: GridSpec | None = None, threads: int | None = None
) -> GridSample:
    """Extract ``imm`` on every grid point, in grid order.

    Points where extraction raises become :class:`PointFailure` records.
    ``threads`` (see :func:`resolve_threads`) bounds the worker pool. Jet
    arithmetic runs under the GIL, so extra workers mostly overlap the numpy
    calls; the returned list is the same, in grid order, for any count.
    """
    grid = grid or GridSpec()
    imm = resolve_orientation(imm, grid)
    points = grid.points(imm.chart_domain)
    workers = resolve_threads(threads)

    def work(q: ChartPoint) -> SurfaceData | PointFailure:
        try:
            return _extract_oriented(imm, q, imm.orientation)
        except (ExtractionError, DomainError) as exc:
            logger.warning("extraction of %s failed: %s", imm.name, exc)
            return PointFailure.from_error(q, exc)

    logger.debug(
        "sampling %s on %s in %s with %d worker(s)",
        imm.name,
        grid.describe(),
        format_space(imm.space),
        workers,
    )
    if workers == 1:
        results = [work(q) for q in points]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(work, points))
    return list(zip(points, results))


def codazzi_identity_defect(d: SurfaceData) -> float:
    """``|d^nabla A(d_u, d_v) + sqrt(det g) J (deltaAa - grad H)|_g``.

    Compares the antisymmetrized covariant derivative of ``A`` with the
    divergence of ``A - H 1`` minus the gradient of ``H``; the two are
    computed independently and must agree.
    """
    lhs = d.nablaA[0][:, 1] - d.nablaA[1][:, 0]
    j_coord = d.orientation * d.Jmat
    rhs = -d.sqrt_det_g * (j_coord @ (d.deltaAa - d.ginv @ d.dH))
    return d.norm(lhs - rhs)


def frame_matrices(d: SurfaceData) -> Frame:
    e1 = np.array([1.0, 0.0]) / math.sqrt(d.g[0, 0])
    basis = np.column_stack([e1, d.Jmat @ e1])
    to_frame = basis.T @ d.g
    return Frame(
        basis=basis,
        A=to_frame @ d.A @ basis,
        J=to_frame @ d.Jmat @ basis,
        T=to_frame @ d.T,
        grad_f=basis.T @ d.df,
        grad_H=basis.T @ d.dH,
        deltaAa=to_frame @ d.deltaAa,
        nablaT=to_frame @ d.nablaT.T @ basis,
    )
