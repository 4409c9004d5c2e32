"""Generalized associate families and the existence classifier.

A :class:`FamilyLaw` rotates the data of a surface::

    A_theta = F1 e^{-2J theta} (A - H 1) + F2 H 1
    T_theta = lam T + mu J T
    f_theta**2 = eps eps3 (1 - s) + s f**2          s = lam**2 + mu**2

(``eps = eps3 = 1`` in E(kappa, tau)). :func:`verify_family` checks the
rotated data against the structure equations; the obstruction functions
evaluate the identities a family member would force at a point, in the
complex picture of the tangent plane (``J`` acts as ``i`` in the frame
``e1 = d_u/|d_u|``, ``e2 = J e1``).
"""

from __future__ import annotations

import cmath
import logging
import math
import re
from collections.abc import Callable, Iterable, Sequence
from dataclasses import dataclass, replace
from typing import NamedTuple

import numpy as np

from ._config import DEFAULT_CASE_TOL, DEFAULT_RESIDUAL_TOL, UMBILICAL_POINT_TOL
from ._expr import LAW_FUNCTIONS, Expression, split_top_level
from .ambient import (
    AmbientSpace,
    HomogeneousSpace,
    WarpedProduct,
    format_space,
    is_spaceform,
    warp_coefficients,
)
from .compat import report_from_samples
from .exceptions import (
    CaseViolation,
    ConfigError,
    ContractViolation,
    DomainError,
    FamilyError,
    NoRealSolution,
    SuiteFailure,
    UmbilicalPoint,
)
from .jets import Jet2, JetLike, lift, value_of
from .models import (
    CaseTag,
    Outcome,
    ChartPoint,
    FamilySweep,
    GridSpec,
    PointFailure,
    ResidualReport,
    Tolerances,
    Verdict,
)
from .surface import Frame, Immersion, SurfaceData, frame_matrices, sample_grid, with_fields

__all__ = [
    "FamilyLaw",
    "LawValues",
    "RotatedData",
    "CaseSplit",
    "parse_law",
    "rotate_shape",
    "rotate_structure_field",
    "solve_f_theta",
    "rotated_data",
    "rotated_surface",
    "relation_h_tau",
    "verify_family",
    "sweep",
    "obstruction_homogeneous",
    "obstruction_warped",
    "case_split",
    "classify",
]

logger = logging.getLogger(__name__)

_INITIAL_TOL = 1e-12
# |lam**2 + mu**2 - 1| below this keeps f_theta = f exactly.
_UNIT_TOL = 1e-12
REFERENCE_THETA = math.pi / 4
_LAW_KEYS = ("F1", "F2", "lam", "mu")
_CANONICAL_SOURCES = {"F1": "1", "F2": "1", "lam": "cos(2*theta)", "mu": "-sin(2*theta)"}

LawFn = Callable[[float], float]


class LawValues(NamedTuple):
    F1: float
    F2: float
    lam: float
    mu: float

    @property
    def s(self) -> float:
        """``lam**2 + mu**2``."""
        return self.lam * self.lam + self.mu * self.mu

    @property
    def z(self) -> complex:
        return complex(self.lam, self.mu)


@dataclass(frozen=True)
class FamilyLaw:
    """The four functions ``F1, F2, lam, mu`` of the family parameter.

    Construction checks ``F1(0) = F2(0) = lam(0) = 1`` and ``mu(0) = 0``.
    """

    F1: LawFn
    F2: LawFn
    lam: LawFn
    mu: LawFn
    description: str = "custom"

    def __post_init__(self) -> None:
        values = self(0.0)
        expected = LawValues(1.0, 1.0, 1.0, 0.0)
        for name, got, want in zip(_LAW_KEYS, values, expected):
            if not abs(got - want) <= _INITIAL_TOL:
                raise ConfigError(
                    f"law {self.description!r} needs {name}(0) = {want:g}, got {got!r}",
                    value=got,
                )

    @classmethod
    def canonical(cls) -> FamilyLaw:
        """``F1 = F2 = 1``, ``T_theta = e^{-2J theta} T``."""
        return cls(
            F1=lambda theta: 1.0,
            F2=lambda theta: 1.0,
            lam=lambda theta: math.cos(2 * theta),
            mu=lambda theta: -math.sin(2 * theta),
            description="canonical",
        )

    def __call__(self, theta: float) -> LawValues:
        return LawValues(
            float(self.F1(theta)),
            float(self.F2(theta)),
            float(self.lam(theta)),
            float(self.mu(theta)),
        )

    def describe(self) -> str:
        return self.description


def _law_expression(source: str) -> Expression:
    return Expression(source, ("theta",), LAW_FUNCTIONS, aliases={"θ": "theta"})


def _as_law_fn(expr: Expression) -> LawFn:
    def fn(theta: float) -> float:
        return value_of(expr(theta))

    return fn


def parse_law(text: str) -> FamilyLaw:
    """Parse ``canonical`` or ``custom(F1=...,F2=...,lam=...,mu=...)``.

    Omitted functions take their canonical form. ``describe()`` of the result
    parses back to the same law.
    """
    s = text.strip()
    if s == "canonical":
        return FamilyLaw.canonical()
    match = re.fullmatch(r"custom\((.*)\)", s, flags=re.S)
    if match is None:
        raise ConfigError(f"law must be 'canonical' or custom(...), got {text!r}", value=text)
    sources = dict(_CANONICAL_SOURCES)
    seen: set[str] = set()
    for part in split_top_level(match.group(1)):
        key, sep, body = part.partition("=")
        key = key.strip()
        if not sep or key not in _LAW_KEYS:
            raise ConfigError(f"law entries must be one of F1=, F2=, lam=, mu=; got {part!r}")
        if key in seen:
            raise ConfigError(f"law entry {key} given twice")
        seen.add(key)
        sources[key] = body
    exprs = {key: _law_expression(sources[key]) for key in _LAW_KEYS}
    description = "custom(" + ",".join(f"{key}={exprs[key]}" for key in _LAW_KEYS) + ")"
    return FamilyLaw(
        F1=_as_law_fn(exprs["F1"]),
        F2=_as_law_fn(exprs["F2"]),
        lam=_as_law_fn(exprs["lam"]),
        mu=_as_law_fn(exprs["mu"]),
        description=description,
    )


@dataclass(frozen=True)
class RotatedData:
    """Pointwise data of the family member at ``theta``."""

    theta: float
    Atheta: np.ndarray
    Ttheta: np.ndarray
    ftheta: float
    Htheta: float


def _add_diagonal(m: np.ndarray, x: JetLike) -> np.ndarray:
    out = m.astype(object) if isinstance(x, Jet2) else m.copy()
    out[0, 0] = out[0, 0] + x
    out[1, 1] = out[1, 1] + x
    return out


def _rotation(Jmat: np.ndarray, theta: float) -> np.ndarray:
    """``e^{-2J theta} = cos(2 theta) 1 - sin(2 theta) J``."""
    return math.cos(2 * theta) * np.eye(2) - math.sin(2 * theta) * Jmat


def rotate_shape(
    A: np.ndarray, H: JetLike, Jmat: np.ndarray, theta: float, law: FamilyLaw
) -> np.ndarray:
    """``F1 e^{-2J theta}(A - H 1) + F2 H 1``.

    Works on float matrices and on object arrays of jets alike.
    """
    values = law(theta)
    anti = _add_diagonal(A, -H)
    return _add_diagonal(values.F1 * (_rotation(Jmat, theta) @ anti), values.F2 * H)


def rotate_structure_field(
    T: np.ndarray, Jmat: np.ndarray, theta: float, law: FamilyLaw
) -> np.ndarray:
    """``lam T + mu J T``."""
    values = law(theta)
    return values.lam * T + values.mu * (Jmat @ T)


def solve_f_theta(
    f: JetLike,
    theta: float,
    law: FamilyLaw,
    *,
    eps: int = 1,
    eps3: int = 1,
    branch: int | None = None,
) -> JetLike:
    """Normal component of the rotated vertical field.

    ``f_theta**2 = eps eps3 (1 - s) + s f**2``; ``branch`` defaults to the
    sign of ``f``. When ``s = 1`` the result is ``f`` itself.

    Raises:
        NoRealSolution: the right-hand side is negative (or zero for a jet,
            where the root is not differentiable).
    """
    s = law(theta).s
    if abs(s - 1.0) <= _UNIT_TOL:
        return f
    if branch is None:
        branch = -1 if value_of(f) < 0 else 1
    radicand = eps * eps3 * (1.0 - s) + s * (f * f)
    r0 = value_of(radicand)
    if r0 < 0 or (r0 == 0 and isinstance(radicand, Jet2)):
        raise NoRealSolution(
            f"f_theta**2 = {r0:.6g} at theta={theta:.6g} for law {law.describe()}", value=r0
        )
    return branch * lift("sqrt", radicand)


def _signature(d: SurfaceData, space: AmbientSpace) -> tuple[int, int]:
    if isinstance(space, WarpedProduct):
        return space.eps, d.eps3
    return 1, 1


def rotated_data(d: SurfaceData, law: FamilyLaw, theta: float, space: AmbientSpace) -> RotatedData:
    eps, eps3 = _signature(d, space)
    A_theta = rotate_shape(d.A, d.H, d.Jmat, theta, law)
    f_theta = solve_f_theta(d.f, theta, law, eps=eps, eps3=eps3)
    return RotatedData(
        theta=theta,
        Atheta=A_theta,
        Ttheta=rotate_structure_field(d.T, d.Jmat, theta, law),
        ftheta=float(value_of(f_theta)),
        Htheta=float(np.trace(A_theta)) / 2,
    )


def rotated_surface(
    d: SurfaceData, law: FamilyLaw, theta: float, space: AmbientSpace
) -> SurfaceData:
    """Data of the member at ``theta`` with exact covariant derivatives.

    Built from the degree-1 field jets of ``d``; ``g``, ``K`` and ``Jmat``
    are those of the base surface.
    """
    jets = d.field_jets
    eps, eps3 = _signature(d, space)
    branch = -1 if d.f < 0 else 1
    A = rotate_shape(jets.A, jets.H, jets.J, theta, law)
    T = rotate_structure_field(jets.T, jets.J, theta, law)
    f = solve_f_theta(jets.f, theta, law, eps=eps, eps3=eps3, branch=branch)
    H = (A[0, 0] + A[1, 1]) * 0.5
    return with_fields(d, A, T, f, H)


def relation_h_tau(H: float, tau: float, law: FamilyLaw, theta: float) -> tuple[float, float]:
    """``((F2 - F1 cos 2t) H + F1 sin 2t tau, F1 sin 2t H + (F1 cos 2t - 1) tau)``.

    Both vanish for a family member in E(kappa, tau) with ``f != 0``.
    """
    values = law(theta)
    c, s = math.cos(2 * theta), math.sin(2 * theta)
    return (
        (values.F2 - values.F1 * c) * H + values.F1 * s * tau,
        values.F1 * s * H + (values.F1 * c - 1) * tau,
    )


def _rotate_samples(
    samples: Sequence[tuple[ChartPoint, SurfaceData | PointFailure]],
    law: FamilyLaw,
    theta: float,
    space: AmbientSpace,
) -> list[tuple[ChartPoint, SurfaceData | PointFailure]]:
    out: list[tuple[ChartPoint, SurfaceData | PointFailure]] = []
    for q, item in samples:
        if isinstance(item, PointFailure):
            out.append((q, item))
            continue
        try:
            out.append((q, rotated_surface(item, law, theta, space)))
        except (FamilyError, DomainError) as exc:
            logger.debug("member theta=%.6g undefined at %s: %s", theta, q, exc)
            out.append((q, PointFailure.from_error(q, exc)))
    return out


def verify_family(
    imm: Immersion,
    law: FamilyLaw,
    thetas: Iterable[float],
    grid: GridSpec | None = None,
    tol: float = DEFAULT_RESIDUAL_TOL,
    *,
    threads: int | None = None,
) -> list[ResidualReport]:
    """Check the structure equations of every member ``theta`` of the family.

    ``theta = 0`` returns the base report itself.

    Raises:
        SuiteFailure: the base surface fails its own equations.
    """
    grid = grid or GridSpec()
    samples = sample_grid(imm, grid, threads)
    base = report_from_samples(samples, imm.space, imm.name, grid, tol)
    if not base.passed:
        raise SuiteFailure(
            f"{imm.name} fails its structure equations (max residual {base.max_residual():.3g})",
            report=base,
        )
    reports = []
    for theta in thetas:
        theta = float(theta)
        if theta == 0.0:
            reports.append(replace(base, theta=0.0))
            continue
        logger.debug("checking %s member theta=%.6g of %s", law.describe(), theta, imm.name)
        rotated = _rotate_samples(samples, law, theta, imm.space)
        reports.append(
            report_from_samples(
                rotated, imm.space, imm.name, grid, tol, theta=theta, rotated=True
            )
        )
    return reports


def sweep(
    imm: Immersion,
    law: FamilyLaw,
    thetas: Iterable[float],
    grid: GridSpec | None = None,
    tol: float = DEFAULT_RESIDUAL_TOL,
    *,
    threads: int | None = None,
) -> FamilySweep:
    """:func:`verify_family` packaged as a :class:`FamilySweep`."""
    reports = verify_family(imm, law, thetas, grid, tol, threads=threads)
    result = FamilySweep(
        space=format_space(imm.space), surface=imm.name, law=law.describe(), reports=reports
    )
    if not result.passed:
        logger.warning(
            "%s family of %s fails first at theta=%.6g",
            law.describe(),
            imm.name,
            result.first_failing_theta,
        )
    return result


def _cx(v: np.ndarray) -> complex:
    return complex(float(v[0]), float(v[1]))


@dataclass(frozen=True)
class _Member:
    """Frame data of a point together with the member at ``theta``."""

    frame: Frame
    values: LawValues
    f_theta: float
    A_theta: np.ndarray
    rotation: complex
    D: complex
    G: complex

    @property
    def zop(self) -> np.ndarray:
        return self.values.lam * np.eye(2) + self.values.mu * self.frame.J


def _member(d: SurfaceData, law: FamilyLaw, theta: float, eps: int, tol_case: float) -> _Member:
    if abs(d.f) <= tol_case:
        raise CaseViolation(f"|f| = {abs(d.f):.3g} is within the case tolerance", point=d.point)
    frame = frame_matrices(d)
    f_theta = solve_f_theta(d.f, theta, law, eps=eps, eps3=d.eps3)
    return _Member(
        frame=frame,
        values=law(theta),
        f_theta=float(value_of(f_theta)),
        A_theta=rotate_shape(frame.A, d.H, frame.J, theta, law),
        rotation=cmath.exp(-2j * theta),
        D=_cx(frame.deltaAa),
        G=_cx(frame.grad_H),
    )


def _divergence_and_codazzi(f: float, m: _Member) -> tuple[float, float]:
    v, e, D, G = m.values, m.rotation, m.D, m.G
    divergence = f * (v.F1 * e * D - v.F2 * G) - m.f_theta * v.z * (D - G)
    codazzi = v.F1 * e * D - v.F2 * G - (m.f_theta / f) * v.z * (D - G)
    return abs(divergence), abs(codazzi)


def obstruction_homogeneous(
    d: SurfaceData,
    kappa: float,
    tau: float,
    law: FamilyLaw,
    theta: float,
    *,
    tol_case: float = DEFAULT_CASE_TOL,
) -> dict[str, float]:
    """Identities the member at ``theta`` would force at a point of E(kappa, tau).

    Every value is a magnitude that vanishes when the member exists.
    ``V = AT + JAJT`` vanishes exactly at umbilical points and
    ``B = f z - f_theta F1 e^{-2i theta}`` must annihilate it.

    Raises:
        CaseViolation: ``|f| <= tol_case`` (the ``T = d/dt`` case).
        NoRealSolution: ``f_theta`` is not real.
    """
    m = _member(d, law, theta, 1, tol_case)
    fr, v = m.frame, m.values
    f, H, s = d.f, d.H, v.s
    bundle = kappa - 4 * tau * tau
    divergence, codazzi = _divergence_and_codazzi(f, m)
    gauss_lhs = (1 - v.F1**2) * (d.K - tau * tau) - (v.F2**2 - v.F1**2) * H * H
    structure = f * (m.zop @ (fr.A - tau * fr.J)) - m.f_theta * (m.A_theta - tau * fr.J)
    zT = m.zop @ fr.T
    df_gap = 0.0
    for x in np.eye(2):
        base = -float(fr.A @ x @ fr.T) + tau * float(fr.J @ x @ fr.T)
        member = float(m.A_theta @ x @ zT) - tau * float(fr.J @ x @ zT)
        df_gap = max(df_gap, abs(s * f * base + m.f_theta * member))
    V = fr.A @ fr.T + fr.J @ fr.A @ fr.J @ fr.T
    B = f * v.z - m.f_theta * v.F1 * m.rotation
    rel1, rel2 = relation_h_tau(H, tau, law, theta)
    return {
        "det_rotated": abs(
            float(np.linalg.det(fr.A)) - float(np.linalg.det(m.A_theta))
            - bundle * (1 - s) * (1 - f * f)
        ),
        "divergence_rotated": divergence,
        "gauss_rotated": abs(gauss_lhs - bundle * (1 - s + (s - v.F1**2) * f * f)),
        "gauss_rotated_printed": abs(gauss_lhs - bundle * (1 - s + (s - v.F1) * f * f)),
        "codazzi_rotated": codazzi,
        "structure_field_rotated": float(np.linalg.norm(structure, 2)),
        "df_rotated": df_gap,
        "V_norm": float(np.linalg.norm(V)),
        "BV_norm": abs(B) * float(np.linalg.norm(V)),
        "relation_H_tau_1": abs(rel1),
        "relation_H_tau_2": abs(rel2),
        "lambda_forced_gap": abs(v.lam - (m.f_theta / f) * v.F1 * math.cos(2 * theta)),
        "mu_forced_gap": abs(v.mu + (m.f_theta / f) * v.F1 * math.sin(2 * theta)),
    }


def _complex_pair(prefix: str, value: complex) -> dict[str, float]:
    return {f"{prefix}_re": value.real, f"{prefix}_im": value.imag}


def obstruction_warped(
    d: SurfaceData,
    w: WarpedProduct,
    law: FamilyLaw,
    theta: float,
    *,
    tol_case: float = DEFAULT_CASE_TOL,
    pi: float | None = None,
) -> dict[str, float]:
    """Identities the member at ``theta`` would force at a point of a warped product.

    Besides the rotated structure equations this reports ``|W|`` for
    ``W = JAT - AJT``, the mean-curvature relations, and the coefficients
    ``c0..c4`` (real and imaginary parts) of the cubic in ``z_theta`` with
    ``alpha + i beta = iT / W``, plus ``d2 = |a'f/a| |T|**2 |(alpha + i beta) D|``.

    Raises:
        CaseViolation: ``|f|`` or ``|T|`` is within ``tol_case``.
        UmbilicalPoint: ``W`` vanishes, so ``alpha + i beta`` is undefined.
        NoRealSolution: ``f_theta`` is not real.
    """
    m = _member(d, law, theta, w.eps, tol_case)
    fr, v = m.frame, m.values
    W = fr.J @ fr.A @ fr.T - fr.A @ fr.J @ fr.T
    W_norm = float(np.linalg.norm(W))
    if W_norm < UMBILICAL_POINT_TOL * (1 + float(np.linalg.norm(fr.A, 2))):
        raise UmbilicalPoint(f"|JAT - AJT| = {W_norm:.3g}", point=d.point, value=W_norm)
    n = float(fr.T @ fr.T)
    if math.sqrt(n) <= tol_case:
        raise CaseViolation(f"|T| = {math.sqrt(n):.3g} is within the case tolerance", point=d.point)

    t = float(d.chi[2]) if pi is None else pi
    coeffs = warp_coefficients(w, t)
    r, Q = coeffs.log_derivative, coeffs.q
    eps, eps3 = w.eps, d.eps3
    f, H, s, z = d.f, d.H, v.s, v.z
    f_theta = m.f_theta
    D, G = m.D, m.G
    divergence, codazzi = _divergence_and_codazzi(f, m)

    gauss_lhs = (1 - v.F1**2) * (d.K + eps * coeffs.second_ratio)
    h_term = eps3 * (v.F2**2 - v.F1**2) * H * H
    gauss_rhs = Q * (eps * (1 - s) + (s - v.F1**2) * eps3 * f * f)

    eye = np.eye(2)
    zT = m.zop @ fr.T
    structure = (
        m.zop @ (f * fr.A + r * (eye - eps * np.outer(fr.T, fr.T)))
        - f_theta * m.A_theta
        - r * (eye - eps * np.outer(zT, zT))
    )
    df_gap = 0.0
    for x in eye:
        base = -eps3 * float(fr.A @ x @ fr.T) - eps * r * f * float(x @ fr.T)
        member = -eps3 * float(m.A_theta @ x @ zT) - eps * r * f_theta * float(x @ zT)
        df_gap = max(df_gap, abs(f_theta * member - s * f * base))

    Wc, Tc = _cx(W), _cx(fr.T)
    B = f * z - f_theta * v.F1 * m.rotation
    rest = 2 - eps * n
    out = {
        "det_rotated": abs(
            float(np.linalg.det(fr.A)) - float(np.linalg.det(m.A_theta))
            - eps3 * Q * (1 - s) * (eps - eps3 * f * f)
        ),
        "divergence_rotated": divergence,
        "gauss_rotated": abs(gauss_lhs - h_term - gauss_rhs),
        "gauss_rotated_printed": abs(gauss_lhs + h_term - gauss_rhs),
        "codazzi_rotated": codazzi,
        "structure_field_rotated": float(np.linalg.norm(structure, 2)),
        "df_rotated": df_gap,
        "W_norm": W_norm,
        "W_relation": abs(B * Wc - r * eps * z * (1 - z) * n * (1j * Tc)),
        "mu_gated": abs(v.mu * (r * rest + 2 * f * H)),
        "eqforH2_gap": abs(
            2 * (f * v.lam - f_theta * v.F2) * H
            - r * ((1 - v.lam) * rest + eps * (1 - s) * n)
        ),
    }
    if abs(v.mu) > _UNIT_TOL and f_theta != 0 and abs(rest) > _UNIT_TOL:
        out["F2_forced_gap"] = abs(v.F2 - (f / f_theta) * (2 - eps * s * n) / rest)
    S = (1j * Tc / Wc) * D
    if abs(rest) > _UNIT_TOL:
        out.update(_complex_pair("c0", 2 * f * f * G / rest))
    out.update(_complex_pair("c1", eps * eps3 * (D - G) + r * f * eps * n * S - f * f * D))
    if abs(rest) > _UNIT_TOL:
        out.update(_complex_pair("c2", -(eps * f * f * n / rest) * G))
    out.update(_complex_pair("c3", -r * f * eps * n * S))
    out.update(_complex_pair("c4", -eps3 * n * (D - G)))
    out["d2"] = abs(r * f) * n * abs(S)
    if abs(v.mu) <= _UNIT_TOL:
        out["mu_zero_lambda"] = abs(r * (1 - v.lam))
        out["mu_zero_rotation"] = abs(f_theta * v.F1 * math.sin(2 * theta))
    return out


class CaseSplit(NamedTuple):
    tags: list[CaseTag]
    aggregate: CaseTag


def case_split(data: Sequence[SurfaceData], tol_case: float = DEFAULT_CASE_TOL) -> CaseSplit:
    """Tag each point ``T_equals_dt`` (``|f|`` small), ``T_zero`` or ``generic``.

    The aggregate is the common tag, or ``mixed``.
    """
    if not data:
        raise ContractViolation("case_split needs at least one sample")
    tags: list[CaseTag] = []
    for d in data:
        if abs(d.f) <= tol_case:
            tags.append("T_equals_dt")
        elif d.norm(d.T) <= tol_case:
            tags.append("T_zero")
        else:
            tags.append("generic")
    distinct = set(tags)
    aggregate: CaseTag = tags[0] if len(distinct) == 1 else "mixed"
    return CaseSplit(tags, aggregate)


@dataclass(frozen=True)
class _Stats:
    max_H: float
    max_umbilicity: float
    max_shape: float
    max_log_derivative: float
    max_relation: float


def _stats(data: Sequence[SurfaceData], space: AmbientSpace) -> _Stats:
    canonical = FamilyLaw.canonical()
    max_H = max_umb = max_shape = max_log = max_rel = 0.0
    for d in data:
        frame = frame_matrices(d)
        max_H = max(max_H, abs(d.H))
        max_umb = max(max_umb, float(np.linalg.norm(frame.A - d.H * np.eye(2), 2)))
        max_shape = max(max_shape, float(np.linalg.norm(frame.A, 2)))
        if isinstance(space, WarpedProduct):
            max_log = max(max_log, abs(warp_coefficients(space, float(d.chi[2])).log_derivative))
        else:
            rel = relation_h_tau(d.H, space.tau, canonical, REFERENCE_THETA)
            max_rel = max(max_rel, abs(rel[0]), abs(rel[1]))
    return _Stats(max_H, max_umb, max_shape, max_log, max_rel)


Decision = tuple[Outcome, str, float]
_REGION_TAGS: tuple[CaseTag, ...] = ("T_equals_dt", "T_zero", "generic")


def _decide_homogeneous(case: CaseTag, st: _Stats, tau: float, tol: float) -> Decision:
    if case == "T_equals_dt":
        if tau != 0:
            return "NotExists", "relationHandtau", st.max_relation
        if st.max_H <= tol:
            return "ExistsVerticalCylinderProduct", "none", 0.0
        return "NotExists", "geodesicBase", st.max_H
    if case == "T_zero":
        if tau == 0 and st.max_shape <= tol:
            return "ExistsTotallyUmbilical", "none", 0.0
        return "NotExists", "totallyGeodesicSlice", max(st.max_shape, abs(tau))
    if tau != 0:
        return "NotExists", "relationHandtau", st.max_relation
    if st.max_H <= tol:
        return "ExistsMinimalProduct", "none", 0.0
    if st.max_umbilicity <= tol:
        return "ExistsTotallyUmbilical", "none", 0.0
    return "NotExists", "minimalOrUmbilical", min(st.max_H, st.max_umbilicity)


def _decide_warped(case: CaseTag, st: _Stats, tol: float) -> Decision:
    minimal = st.max_H <= tol
    product = st.max_log_derivative <= tol
    if case == "T_equals_dt":
        if product and minimal:
            return "ExistsVerticalCylinderProduct", "none", 0.0
        if not product:
            return "NotExists", "warpDerivative", st.max_log_derivative
        return "NotExists", "geodesicBase", st.max_H
    if st.max_umbilicity <= tol:
        return "ExistsTotallyUmbilical", "none", 0.0
    if case == "T_zero":
        return "NotExists", "totallyUmbilical", st.max_umbilicity
    if minimal and product:
        return "ExistsMinimalProduct", "none", 0.0
    if minimal:
        return "NotExists", "warpDerivative", st.max_log_derivative
    return "NotExists", "minimalOrUmbilical", min(st.max_H, st.max_umbilicity)


def _decide(case: CaseTag, st: _Stats, space: AmbientSpace, tol: float) -> Decision:
    if isinstance(space, HomogeneousSpace):
        return _decide_homogeneous(case, st, space.tau, tol)
    return _decide_warped(case, st, tol)


def _diagnostics(
    data: Sequence[SurfaceData], st: _Stats, space: AmbientSpace, tols: Tolerances
) -> tuple[dict[str, float], list[str]]:
    diagnostics = {
        "max_abs_H": st.max_H,
        "max_umbilicity": st.max_umbilicity,
        "max_shape_norm": st.max_shape,
    }
    if isinstance(space, HomogeneousSpace):
        diagnostics["tau"] = space.tau
    else:
        diagnostics["max_abs_log_derivative"] = st.max_log_derivative
    canonical = FamilyLaw.canonical()
    maxima: dict[str, float] = {}
    skipped = 0
    for d in data:
        try:
            if isinstance(space, HomogeneousSpace):
                values = obstruction_homogeneous(
                    d, space.kappa, space.tau, canonical, REFERENCE_THETA, tol_case=tols.case
                )
            else:
                values = obstruction_warped(
                    d, space, canonical, REFERENCE_THETA, tol_case=tols.case
                )
        except FamilyError:
            skipped += 1
            continue
        for key, value in values.items():
            maxima[key] = max(maxima.get(key, 0.0), abs(value))
    diagnostics.update({f"obstruction.{key}": value for key, value in maxima.items()})
    notes = []
    if skipped:
        notes.append(
            f"obstructions at theta=pi/4 skipped at {skipped} point(s) outside their case"
        )
    gap = abs(maxima.get("gauss_rotated", 0.0) - maxima.get("gauss_rotated_printed", 0.0))
    if gap > tols.residual:
        logger.warning("the two rotated Gauss displays differ by %.3g", gap)
        notes.append(f"rotated Gauss displays differ by {gap:.3g}")
    return diagnostics, notes


def _spaceform_note(w: WarpedProduct) -> str:
    family, eps, c = w.warp.family, w.eps, w.c
    name = "a space form"
    if eps * c == -1 and family == "cosh":
        name = "de Sitter space" if eps == -1 else "hyperbolic space"
    elif eps * c == 1 and family == "sin":
        name = "the round sphere"
    elif eps * c == 1 and family == "sinh":
        name = "hyperbolic space"
    elif eps * c == 1 and family == "linear":
        name = "Euclidean space" if eps == 1 else "Minkowski space"
    elif c == 0 and family == "exp":
        name = "hyperbolic space"
    return f"{w.describe()} is {name}: a'' a - a'^2 + eps c = 0 on I"


def classify(
    imm: Immersion,
    grid: GridSpec | None = None,
    tolerances: Tolerances | None = None,
    *,
    threads: int | None = None,
) -> Verdict:
    """Decide whether ``imm`` admits a generalized associate family.

    The surface must pass its own structure equations and the ambient space
    must not be a space form; the case of the surface then selects the
    conditions that decide existence (``tau = 0``, minimality, umbilicity,
    ``a' = 0``). Mixed surfaces are ``Undetermined`` with a sub-verdict per
    region.
    """
    grid = grid or GridSpec()
    tols = tolerances or Tolerances()
    space = imm.space
    samples = sample_grid(imm, grid, threads)
    report = report_from_samples(samples, space, imm.name, grid, tols.residual)
    label = format_space(space)
    data = [item for _, item in samples if isinstance(item, SurfaceData)]
    split = case_split(data, tols.case) if data else CaseSplit([], "mixed")

    if not report.passed:
        verdict = Verdict(
            "Undetermined",
            "residualSuite",
            split.aggregate,
            magnitude=report.max_residual(),
            notes=[
                f"structure equations fail (max residual {report.max_residual():.3g}, "
                f"{len(report.failures)} failed point(s))"
            ],
            space=label,
            surface=imm.name,
        )
        logger.info("%s: %s (%s)", imm.name, verdict.outcome, verdict.obstruction)
        return verdict
    if isinstance(space, WarpedProduct) and is_spaceform(space):
        return Verdict(
            "SpaceFormExcluded",
            "spaceform",
            split.aggregate,
            notes=[_spaceform_note(space)],
            space=label,
            surface=imm.name,
        )

    stats = _stats(data, space)
    diagnostics, notes = _diagnostics(data, stats, space, tols)
    if split.aggregate == "mixed":
        regions: dict[str, Verdict] = {}
        for tag in _REGION_TAGS:
            subset = [d for d, t in zip(data, split.tags) if t == tag]
            if subset:
                outcome, obstruction, magnitude = _decide(
                    tag, _stats(subset, space), space, tols.classify
                )
                regions[tag] = Verdict(
                    outcome, obstruction, tag, magnitude=magnitude, space=label, surface=imm.name
                )
        notes.append("the surface changes case on the grid; see the per-region verdicts")
        verdict = Verdict(
            "Undetermined",
            "mixedCase",
            "mixed",
            diagnostics=diagnostics,
            regions=regions,
            notes=notes,
            space=label,
            surface=imm.name,
        )
    else:
        outcome, obstruction, magnitude = _decide(split.aggregate, stats, space, tols.classify)
        verdict = Verdict(
            outcome,
            obstruction,
            split.aggregate,
            magnitude=magnitude,
            diagnostics=diagnostics,
            notes=notes,
            space=label,
            surface=imm.name,
        )
    logger.info(
        "%s: %s (%s, case %s)", imm.name, verdict.outcome, verdict.obstruction, verdict.case
    )
    return verdict
