"""Truncated Taylor jets in two chart variables.

A :class:`Jet2` holds the Taylor coefficients ``c[i, j]`` of a function of
``(u, v)`` about an implicit base point, truncated at total degree ``deg``::

    f(u0 + du, v0 + dv) = sum c[i, j] du**i dv**j      (i + j <= deg)

Arithmetic is closed at fixed degree, so every derivative up to ``deg`` that
the geometry needs is exact up to rounding. Coefficients are stored densely in
graded order ``(0,0), (1,0), (0,1), (2,0), (1,1), (0,2), ...``.

Elementary functions are composed through their univariate Taylor
coefficients about the base value (:func:`jet_lift_scalar`); :func:`lift`
dispatches to the same functions on plain floats so formulas can be written
once for both.
"""

from __future__ import annotations

import functools
import math
from typing import Literal, Union

import numpy as np

from .exceptions import ContractViolation, DomainError

__all__ = [
    "MAX_DEG",
    "Jet2",
    "JetLike",
    "ScalarFn",
    "ncoeffs",
    "coeff_index",
    "jet_mul",
    "jet_lift_scalar",
    "jet_partial",
    "jet_variable",
    "jet_constant",
    "lift",
    "value_of",
]

MAX_DEG = 3

ScalarFn = Literal["sin", "cos", "sinh", "cosh", "exp", "log", "pow", "sqrt", "recip"]
JetLike = Union["Jet2", float]

_SCALAR_FNS = frozenset({"sin", "cos", "sinh", "cosh", "exp", "log", "pow", "sqrt", "recip"})
_REALS = (int, float, np.integer, np.floating)


def ncoeffs(deg: int) -> int:
    return (deg + 1) * (deg + 2) // 2


def coeff_index(i: int, j: int) -> int:
    """Position of the ``du**i dv**j`` coefficient in graded storage."""
    n = i + j
    return n * (n + 1) // 2 + j


def _monomials(deg: int) -> list[tuple[int, int]]:
    return [(n - j, j) for n in range(deg + 1) for j in range(n + 1)]


@functools.lru_cache(maxsize=None)
def _product_table(deg: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    left: list[int] = []
    right: list[int] = []
    target: list[int] = []
    monos = _monomials(deg)
    for pa, (i1, j1) in enumerate(monos):
        for pb, (i2, j2) in enumerate(monos):
            if i1 + j1 + i2 + j2 <= deg:
                left.append(pa)
                right.append(pb)
                target.append(coeff_index(i1 + i2, j1 + j2))
    return (
        np.asarray(left, dtype=np.intp),
        np.asarray(right, dtype=np.intp),
        np.asarray(target, dtype=np.intp),
    )


@functools.lru_cache(maxsize=None)
def _derivative_table(deg: int, axis: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    src: list[int] = []
    dst: list[int] = []
    factor: list[float] = []
    for i, j in _monomials(deg):
        power = i if axis == 0 else j
        if power == 0:
            continue
        src.append(coeff_index(i, j))
        dst.append(coeff_index(i - 1, j) if axis == 0 else coeff_index(i, j - 1))
        factor.append(float(power))
    return (
        np.asarray(src, dtype=np.intp),
        np.asarray(dst, dtype=np.intp),
        np.asarray(factor, dtype=np.float64),
    )


class Jet2:
    """Bivariate Taylor polynomial truncated at total degree ``deg``."""

    __slots__ = ("coeffs", "deg")
    # Let numpy scalars defer to the reflected operators below.
    __array_ufunc__ = None

    def __init__(self, coeffs: np.ndarray | list[float], deg: int = MAX_DEG) -> None:
        if not 0 <= deg <= MAX_DEG:
            raise ContractViolation(f"jet degree must be in [0, {MAX_DEG}], got {deg}")
        array = np.asarray(coeffs, dtype=np.float64)
        if array.shape != (ncoeffs(deg),):
            raise ContractViolation(
                f"degree-{deg} jet needs {ncoeffs(deg)} coefficients, got shape {array.shape}"
            )
        self.coeffs = array
        self.deg = deg

    def __repr__(self) -> str:
        return f"Jet2(deg={self.deg}, coeffs={self.coeffs.tolist()!r})"

    def value(self) -> float:
        return float(self.coeffs[0])

    def coefficient(self, i: int, j: int) -> float:
        if i < 0 or j < 0 or i + j > self.deg:
            raise ContractViolation(f"index ({i}, {j}) beyond degree {self.deg}")
        return float(self.coeffs[coeff_index(i, j)])

    def partial(self, i: int, j: int) -> float:
        """Exact mixed partial derivative at the base point."""
        return math.factorial(i) * math.factorial(j) * self.coefficient(i, j)

    def derivative(self, axis: int) -> Jet2:
        """Jet of ``d/du`` (axis 0) or ``d/dv`` (axis 1), one degree lower."""
        if axis not in (0, 1):
            raise ContractViolation(f"axis must be 0 or 1, got {axis}")
        if self.deg == 0:
            raise ContractViolation("cannot differentiate a degree-0 jet")
        src, dst, factor = _derivative_table(self.deg, axis)
        out = np.zeros(ncoeffs(self.deg - 1))
        out[dst] = self.coeffs[src] * factor
        return Jet2(out, self.deg - 1)

    def truncate(self, deg: int) -> Jet2:
        if deg > self.deg:
            raise ContractViolation(f"cannot raise a degree-{self.deg} jet to degree {deg}")
        return Jet2(self.coeffs[: ncoeffs(deg)].copy(), deg)

    def _check(self, other: Jet2) -> None:
        if other.deg != self.deg:
            raise ContractViolation(f"jet degree mismatch: {self.deg} vs {other.deg}")

    def __add__(self, other: object) -> Jet2:
        if isinstance(other, Jet2):
            self._check(other)
            return Jet2(self.coeffs + other.coeffs, self.deg)
        if isinstance(other, _REALS):
            out = self.coeffs.copy()
            out[0] += float(other)
            return Jet2(out, self.deg)
        return NotImplemented

    __radd__ = __add__

    def __neg__(self) -> Jet2:
        return Jet2(-self.coeffs, self.deg)

    def __pos__(self) -> Jet2:
        return self

    def __sub__(self, other: object) -> Jet2:
        if isinstance(other, (Jet2, *_REALS)):
            return self + (-other)  # type: ignore[operator]
        return NotImplemented

    def __rsub__(self, other: object) -> Jet2:
        if isinstance(other, _REALS):
            return (-self) + other
        return NotImplemented

    def __mul__(self, other: object) -> Jet2:
        if isinstance(other, Jet2):
            return jet_mul(self, other)
        if isinstance(other, _REALS):
            return Jet2(self.coeffs * float(other), self.deg)
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, other: object) -> Jet2:
        if isinstance(other, Jet2):
            return jet_mul(self, jet_lift_scalar("recip", other))
        if isinstance(other, _REALS):
            if other == 0:
                raise DomainError("division of a jet by zero")
            return Jet2(self.coeffs / float(other), self.deg)
        return NotImplemented

    def __rtruediv__(self, other: object) -> Jet2:
        if isinstance(other, _REALS):
            return jet_lift_scalar("recip", self) * float(other)
        return NotImplemented

    def __pow__(self, exponent: object) -> Jet2:
        if isinstance(exponent, (int, np.integer)) and exponent >= 0:
            result = jet_constant(1.0, self.deg)
            base = self
            n = int(exponent)
            while n:
                if n & 1:
                    result = jet_mul(result, base)
                n >>= 1
                if n:
                    base = jet_mul(base, base)
            return result
        if isinstance(exponent, _REALS):
            return jet_lift_scalar("pow", self, float(exponent))
        return NotImplemented


def jet_mul(a: Jet2, b: Jet2) -> Jet2:
    """Truncated Cauchy product of two jets of equal degree."""
    if a.deg != b.deg:
        raise ContractViolation(f"jet degree mismatch: {a.deg} vs {b.deg}")
    left, right, target = _product_table(a.deg)
    out = np.bincount(target, weights=a.coeffs[left] * b.coeffs[right], minlength=ncoeffs(a.deg))
    return Jet2(out, a.deg)


def jet_partial(a: Jet2, index: tuple[int, int]) -> float:
    """``i! j! c[i, j]``: the exact mixed partial of ``a`` at its base point."""
    i, j = index
    return a.partial(i, j)


def jet_variable(axis: int, value: float, deg: int = MAX_DEG) -> Jet2:
    """The chart coordinate ``u`` (axis 0) or ``v`` (axis 1) based at ``value``."""
    if axis not in (0, 1):
        raise ContractViolation(f"axis must be 0 or 1, got {axis}")
    if deg < 1:
        raise ContractViolation("a variable needs degree at least 1")
    coeffs = np.zeros(ncoeffs(deg))
    coeffs[0] = value
    coeffs[coeff_index(1, 0) if axis == 0 else coeff_index(0, 1)] = 1.0
    return Jet2(coeffs, deg)


def jet_constant(value: float, deg: int = MAX_DEG) -> Jet2:
    coeffs = np.zeros(ncoeffs(deg))
    coeffs[0] = value
    return Jet2(coeffs, deg)


def _is_integral(p: float) -> bool:
    return float(p).is_integer()


def _check_domain(fn: str, x0: float, exponent: float | None) -> None:
    if fn == "log" and x0 <= 0:
        raise DomainError(f"log is not analytic at {x0!r}", value=x0)
    if fn == "sqrt" and x0 <= 0:
        raise DomainError(f"sqrt is not analytic at {x0!r}", value=x0)
    if fn == "recip" and x0 == 0:
        raise DomainError("recip at 0", value=x0)
    if fn == "pow":
        assert exponent is not None
        if not _is_integral(exponent) and x0 <= 0:
            raise DomainError(f"pow(x, {exponent!r}) is not analytic at {x0!r}", value=x0)
        if exponent < 0 and x0 == 0:
            raise DomainError(f"pow(x, {exponent!r}) at 0", value=x0)


def _taylor_coefficients(
    fn: str, x0: float, deg: int, exponent: float | None
) -> list[float]:
    """``f^(k)(x0) / k!`` for ``k = 0..deg``."""
    if fn in ("sin", "cos", "sinh", "cosh"):
        if fn == "sin":
            cycle = [math.sin(x0), math.cos(x0), -math.sin(x0), -math.cos(x0)]
        elif fn == "cos":
            cycle = [math.cos(x0), -math.sin(x0), -math.cos(x0), math.sin(x0)]
        elif fn == "sinh":
            cycle = [math.sinh(x0), math.cosh(x0)] * 2
        else:
            cycle = [math.cosh(x0), math.sinh(x0)] * 2
        return [cycle[k % 4] / math.factorial(k) for k in range(deg + 1)]
    if fn == "exp":
        e = math.exp(x0)
        return [e / math.factorial(k) for k in range(deg + 1)]
    if fn == "log":
        return [math.log(x0)] + [(-1.0) ** (k + 1) / (k * x0**k) for k in range(1, deg + 1)]
    p = {"sqrt": 0.5, "recip": -1.0}.get(fn, exponent)
    assert p is not None
    coefficients = []
    binom = 1.0
    for k in range(deg + 1):
        if k:
            binom *= (p - k + 1) / k
        coefficients.append(0.0 if binom == 0.0 else binom * x0 ** (p - k))
    return coefficients


def jet_lift_scalar(fn: ScalarFn | str, a: Jet2, exponent: float | None = None) -> Jet2:
    """Compose an elementary function with a jet.

    ``fn(a)`` is evaluated as ``sum c_k h**k`` with ``h = a - a.value()`` and
    ``c_k`` the univariate Taylor coefficients of ``fn`` at ``a.value()``.
    """
    if fn not in _SCALAR_FNS:
        raise ContractViolation(f"unknown elementary function {fn!r}")
    if fn == "pow" and exponent is None:
        raise ContractViolation("pow needs an exponent")
    x0 = a.value()
    _check_domain(fn, x0, exponent)
    c = _taylor_coefficients(fn, x0, a.deg, exponent)
    h_coeffs = a.coeffs.copy()
    h_coeffs[0] = 0.0
    h = Jet2(h_coeffs, a.deg)
    result = jet_constant(c[-1], a.deg)
    for ck in reversed(c[:-1]):
        result = jet_mul(result, h) + ck
    return result


def lift(fn: ScalarFn | str, x: JetLike, exponent: float | None = None) -> JetLike:
    """Apply an elementary function to a jet or a plain real number."""
    if isinstance(x, Jet2):
        return jet_lift_scalar(fn, x, exponent)
    if fn not in _SCALAR_FNS:
        raise ContractViolation(f"unknown elementary function {fn!r}")
    x = float(x)
    if fn == "pow":
        if exponent is None:
            raise ContractViolation("pow needs an exponent")
        if x < 0 and not _is_integral(exponent):
            raise DomainError(f"pow(x, {exponent!r}) undefined at {x!r}", value=x)
        if x == 0 and exponent < 0:
            raise DomainError(f"pow(x, {exponent!r}) at 0", value=x)
        return float(x**exponent)
    if fn == "recip":
        if x == 0:
            raise DomainError("recip at 0", value=x)
        return 1.0 / x
    if fn == "sqrt" and x < 0:
        raise DomainError(f"sqrt of {x!r}", value=x)
    if fn == "log" and x <= 0:
        raise DomainError(f"log of {x!r}", value=x)
    func = getattr(math, fn)
    return float(func(x))


def value_of(x: JetLike) -> float:
    """Base value of a jet, or the number itself."""
    return x.value() if isinstance(x, Jet2) else float(x)
