"""FBDF2 boundary locus and the scalar fractional test equation.

For the test problem D^alpha y = lam y the method is stable at h^alpha lam
outside the curve

    z(theta) = sum_{k<n} varpi_k e^{-ik theta} + (varpi_n - b_n) e^{-in theta},

traced for theta in [0, 2 pi].  With a few hundred terms the curve winds
around small loops (of radius about b_n) near theta = pi, so its shoelace
sum is not a reliable area.  ``enclosed_area`` measures the point set
that the curve encloses instead.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from rfaded.discretization import dominance_margin
from rfaded.errors import DomainError, SingularMatrixError
from rfaded.weights import fbdf2_weights, start_correction

__all__ = [
    "StabilityLocus",
    "boundary_locus",
    "locus_sensitivity",
    "shoelace_area",
    "enclosed_area",
    "stability_region_area",
    "scalar_test_solve",
    "scalar_system_matrix",
    "scalar_dominance",
]


@dataclass(frozen=True, eq=False)
class StabilityLocus:
    """Closed polyline; ``points[m] = (theta_m, re z, im z)``."""

    alpha: float
    n: int
    points: np.ndarray

    @property
    def z(self) -> np.ndarray:
        return self.points[:, 1] + 1j * self.points[:, 2]

    @property
    def theta(self) -> np.ndarray:
        return self.points[:, 0]


def _locus_coefficients(alpha, n):
    c = fbdf2_weights(alpha, n + 1).coeffs.copy()
    c[n] -= n ** (-float(alpha)) * special.rgamma(1.0 - float(alpha))
    return c


def boundary_locus(alpha: float, n: int = 500, n_theta: int = 4096) -> StabilityLocus:
    """Sample the boundary locus at theta_m = 2 pi m / n_theta, m = 0..n_theta.

    The last sample (theta = 2 pi) is evaluated, not copied, so closure
    is a genuine check.
    """
    if not 0.0 < alpha <= 1.0:
        raise DomainError(f"alpha must lie in (0, 1], got {alpha}")
    if n < 4:
        raise DomainError(f"need n >= 4 terms, got {n}")
    if n_theta < 64:
        raise DomainError(f"need n_theta >= 64 samples, got {n_theta}")
    c = _locus_coefficients(alpha, n)
    theta = 2.0 * math.pi * np.arange(n_theta + 1) / n_theta
    k = np.arange(n + 1)
    z = np.empty(n_theta + 1, dtype=complex)
    chunk = max(1, 2_000_000 // (n + 1))
    for a in range(0, n_theta + 1, chunk):
        th = theta[a : a + chunk]
        z[a : a + chunk] = np.exp(-1j * np.outer(th, k)) @ c
    pts = np.column_stack([theta, z.real, z.imag])
    pts.setflags(write=False)
    return StabilityLocus(float(alpha), int(n), pts)


def locus_sensitivity(alpha: float, n: int = 500, n_theta: int = 4096) -> float:
    """Max pointwise shift of the locus between truncations n/2 and n."""
    a = boundary_locus(alpha, n // 2, n_theta).z
    b = boundary_locus(alpha, n, n_theta).z
    return float(np.max(np.abs(a - b)))


def shoelace_area(locus: StabilityLocus) -> float:
    """Signed area sum of the polyline (negative for clockwise traversal)."""
    x, y = locus.points[:, 1], locus.points[:, 2]
    return 0.5 * float(np.dot(x[:-1], y[1:]) - np.dot(x[1:], y[:-1]))


def _polygon(locus):
    from shapely.geometry import Polygon
    from shapely import make_valid

    # 'structure' keeps every loop the curve closes as filled area; the
    # default linework repair is far slower on the densely noded curves
    # of small alpha.
    return make_valid(Polygon(locus.points[:-1, 1:3]), method="structure")


def enclosed_area(locus: StabilityLocus) -> float:
    """Area of the set enclosed by the (self-intersecting) locus."""
    return float(_polygon(locus).area)


def stability_region_area(locus: StabilityLocus, window=(-2.0, 6.0, -4.0, 4.0)) -> float:
    """Area of the stability region (outside the locus) inside ``window``.

    ``window`` is (re_min, re_max, im_min, im_max).
    """
    from shapely.geometry import box

    x0, x1, y0, y1 = window
    win = box(x0, y0, x1, y1)
    return float(win.area - _polygon(locus).intersection(win).area)


def scalar_system_matrix(alpha: float, lam, h: float, n: int) -> np.ndarray:
    """Lower-triangular Toeplitz matrix of the discrete test equation.

    Row j (j = 1..n) reads (varpi_0 - lam h^alpha) y_j + sum_{k=1}^{j-1} varpi_k y_{j-k}.
    """
    w = fbdf2_weights(alpha, n).coeffs
    col = w.astype(np.result_type(w, lam)).copy()
    col[0] = w[0] - lam * h**alpha
    from scipy.linalg import toeplitz

    return toeplitz(col, np.zeros(n, dtype=col.dtype))


def scalar_test_solve(alpha: float, lam, h: float, y0, n: int) -> np.ndarray:
    """Solve sum_k varpi_k y_{j-k} - b_j y_0 = lam h^alpha y_j for j = 1..n.

    Returns y_0..y_n.  Forward substitution; complex ``lam`` is allowed.
    """
    if not 0.0 < alpha < 1.0:
        raise DomainError(f"alpha must lie in (0, 1), got {alpha}")
    if not h > 0:
        raise DomainError("step must be positive")
    if n < 1:
        raise DomainError("need n >= 1")
    w = fbdf2_weights(alpha, n + 1).coeffs
    b = start_correction(alpha, n).values
    diag = w[0] - lam * h**alpha
    if diag == 0:
        raise SingularMatrixError("lam h^alpha equals varpi_0; the system is singular")
    dtype = np.result_type(float, lam, y0)
    y = np.zeros(n + 1, dtype=dtype)
    y[0] = y0
    for j in range(1, n + 1):
        hist = np.dot(w[1 : j + 1], y[j - 1 :: -1])
        y[j] = (b[j - 1] * y0 - hist) / diag
    return y


def scalar_dominance(alpha: float, lam, h: float, n: int) -> float:
    """Worst row margin of :func:`scalar_system_matrix`."""
    return float(np.min(dominance_margin(np.abs(scalar_system_matrix(alpha, lam, h, n)))))
