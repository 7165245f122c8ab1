"""Parity-basis (Walsh) spectra and multilinear interpolation on the cube.

The parity character indexed by a mask r is chi_r(x) = (-1)^{popcount(x & r)};
a spectrum stores the averages E_x[g(x) chi_r(x)].  The monomial basis
(products prod_{i in S} x_i) is kept only as interpolation output; both bases
share the same degree filtration.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .boolfunc import RealFunction

DEFAULT_ZERO_TOL = 1e-9


def popcounts(size: int) -> np.ndarray:
    """popcount(r) for r = 0..size-1."""
    return np.bitwise_count(np.arange(size, dtype=np.uint64)).astype(np.int64)


def walsh_transform(values: np.ndarray) -> np.ndarray:
    """Unnormalized fast Walsh transform along the last axis, out of place.

    Output entry r is sum_x a[x] (-1)^{popcount(x & r)}; applying the
    transform twice multiplies by 2^n.
    """
    a = np.array(values, dtype=np.float64)
    size = a.shape[-1]
    if size & (size - 1):
        raise ValueError("length must be a power of two")
    h = 1
    while h < size:
        a = a.reshape(a.shape[:-1] + (size // (2 * h), 2, h))
        even = a[..., 0, :].copy()
        a[..., 0, :] += a[..., 1, :]
        a[..., 1, :] = even - a[..., 1, :]
        a = a.reshape(a.shape[:-3] + (size,))
        h *= 2
    return a


def mobius_transform(values: np.ndarray) -> np.ndarray:
    """Monomial coefficients of the multilinear interpolant, along the last axis."""
    a = np.array(values, dtype=np.float64)
    size = a.shape[-1]
    if size & (size - 1):
        raise ValueError("length must be a power of two")
    h = 1
    while h < size:
        a = a.reshape(a.shape[:-1] + (size // (2 * h), 2, h))
        a[..., 1, :] -= a[..., 0, :]
        a = a.reshape(a.shape[:-3] + (size,))
        h *= 2
    return a


def zeta_transform(coeffs: np.ndarray) -> np.ndarray:
    """Inverse of mobius_transform: cube values from monomial coefficients."""
    a = np.array(coeffs, dtype=np.float64)
    size = a.shape[-1]
    h = 1
    while h < size:
        a = a.reshape(a.shape[:-1] + (size // (2 * h), 2, h))
        a[..., 1, :] += a[..., 0, :]
        a = a.reshape(a.shape[:-3] + (size,))
        h *= 2
    return a


def _support_degree(coeffs: np.ndarray, zero_tol: float) -> int:
    sizes = popcounts(coeffs.shape[-1])
    heavy = np.abs(coeffs) > zero_tol
    if not heavy.any():
        return 0
    return int(sizes[heavy].max())


@dataclass(frozen=True, eq=False)
class Spectrum:
    """Parity-basis coefficients of a real function on {0,1}^n."""

    n: int
    coeffs: np.ndarray
    zero_tol: float = DEFAULT_ZERO_TOL

    def __post_init__(self):
        coeffs = np.asarray(self.coeffs, dtype=np.float64)
        if coeffs.shape != (1 << self.n,):
            raise ValueError(f"expected {1 << self.n} coefficients")
        coeffs = coeffs.copy()
        coeffs.setflags(write=False)
        object.__setattr__(self, "coeffs", coeffs)

    def degree(self, zero_tol: float | None = None) -> int:
        return _support_degree(self.coeffs, self.zero_tol if zero_tol is None else zero_tol)

    def values(self) -> RealFunction:
        """Evaluate back on the cube (exact inverse of wht)."""
        return RealFunction(self.n, walsh_transform(self.coeffs))


@dataclass(frozen=True, eq=False)
class MultilinearPoly:
    """Monomial-basis coefficients, entry S holding the weight of prod_{i in S} x_i."""

    n: int
    coeffs: np.ndarray
    zero_tol: float = DEFAULT_ZERO_TOL

    def __post_init__(self):
        coeffs = np.asarray(self.coeffs, dtype=np.float64)
        if coeffs.shape != (1 << self.n,):
            raise ValueError(f"expected {1 << self.n} coefficients")
        coeffs = coeffs.copy()
        coeffs.setflags(write=False)
        object.__setattr__(self, "coeffs", coeffs)

    def degree(self, zero_tol: float | None = None) -> int:
        return _support_degree(self.coeffs, self.zero_tol if zero_tol is None else zero_tol)

    def values(self) -> RealFunction:
        """Evaluate on all of {0,1}^n."""
        return RealFunction(self.n, zeta_transform(self.coeffs))

    def evaluate(self, point) -> float:
        """Evaluate at an arbitrary real point (x_1, ..., x_n)."""
        point = np.asarray(point, dtype=np.float64)
        if point.shape != (self.n,):
            raise ValueError(f"expected point of dimension {self.n}")
        total = 0.0
        for mask in np.flatnonzero(self.coeffs):
            term = self.coeffs[mask]
            for i in range(self.n):
                if (mask >> i) & 1:
                    term *= point[i]
            total += term
        return float(total)


def wht(g: RealFunction, zero_tol: float = DEFAULT_ZERO_TOL) -> Spectrum:
    """Normalized Walsh spectrum: coefficient r is E_x[g(x) (-1)^{popcount(x & r)}]."""
    return Spectrum(g.n, walsh_transform(g.values) / g.values.size, zero_tol)


def interpolate(g: RealFunction, zero_tol: float = DEFAULT_ZERO_TOL) -> MultilinearPoly:
    """The unique multilinear polynomial agreeing with g on {0,1}^n."""
    return MultilinearPoly(g.n, mobius_transform(g.values), zero_tol)


def degree(obj: Spectrum | MultilinearPoly, zero_tol: float | None = None) -> int:
    """Largest character/monomial size carrying a coefficient above tolerance."""
    return obj.degree(zero_tol)


def fourier_sensitivity(s: Spectrum) -> float:
    """Average sensitivity computed spectrally: (4/n) sum_r popcount(r) coeff_r^2."""
    sizes = popcounts(s.coeffs.size)
    return float(4.0 / s.n * np.dot(sizes, s.coeffs * s.coeffs))
