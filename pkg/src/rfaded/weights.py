"""Convolution weights: Grunwald, FBDF2, WSGD, and the b_j start correction.

* Grunwald: coefficients of (1 - xi)^zeta.
* FBDF2: coefficients of (3/2 - 2 xi + xi^2/2)^alpha, generated by Miller's
  two-term recurrence for the base factor (1 - 4/3 xi + 1/3 xi^2)^alpha and
  then scaled by (3/2)^alpha.
* WSGD, (p, q) = (1, 0): theta_k = beta/2 w_k + (2-beta)/2 w_{k-1}.

Sequences are cached per (kind, order); a request for a shorter prefix is
served as a read-only view of the longest sequence computed so far (the
recurrences make every prefix identical to a fresh computation).
"""

from __future__ import annotations

import enum
import threading
from dataclasses import dataclass

import numpy as np
from scipy import special

from rfaded.errors import DomainError

__all__ = [
    "Kind",
    "WeightSeq",
    "StartCorrection",
    "grunwald_weights",
    "fbdf2_base",
    "fbdf2_weights",
    "wsgd_weights",
    "start_correction",
    "fbdf2_apply",
    "clear_cache",
]


class Kind(str, enum.Enum):
    GRUNWALD = "grunwald"
    FBDF2 = "fbdf2"
    WSGD = "wsgd"


@dataclass(frozen=True, eq=False)
class WeightSeq:
    """A finite prefix of a convolution-weight sequence."""

    kind: Kind
    order: float
    coeffs: np.ndarray

    def __len__(self):
        return len(self.coeffs)

    def __getitem__(self, k):
        return self.coeffs[k]

    def partial_sums(self) -> np.ndarray:
        return np.cumsum(self.coeffs)


@dataclass(frozen=True, eq=False)
class StartCorrection:
    """b_j = j^{-alpha}/Gamma(1-alpha); ``values[j-1]`` holds b_j."""

    order: float
    values: np.ndarray

    def at(self, j: int) -> float:
        if j < 1 or j > len(self.values):
            raise IndexError(f"b_j defined for 1 <= j <= {len(self.values)}, got {j}")
        return float(self.values[j - 1])


_cache: dict = {}
_lock = threading.Lock()


def clear_cache():
    with _lock:
        _cache.clear()


def _cached(key, n, build):
    hit = _cache.get(key)
    if hit is None or len(hit) < n:
        # grow geometrically so marching loops do not rebuild at every step
        arr = build(n if hit is None else max(n, 2 * len(hit)))
        arr.setflags(write=False)
        with _lock:
            hit = _cache.get(key)
            if hit is None or len(hit) < n:
                _cache[key] = hit = arr
    return hit[:n]


def _check_count(n, least):
    if int(n) != n or n < least:
        raise DomainError(f"need at least {least} weights, got {n}")


def _grunwald(zeta: float, n: int) -> np.ndarray:
    factors = np.empty(n)
    factors[0] = 1.0
    k = np.arange(1, n, dtype=float)
    factors[1:] = 1.0 - (zeta + 1.0) / k
    return np.cumprod(factors)


def grunwald_weights(zeta: float, n: int) -> WeightSeq:
    """First ``n`` Grunwald weights (-1)^k C(zeta, k), 0 < zeta <= 2."""
    if not 0.0 < zeta <= 2.0:
        raise DomainError(f"Grunwald order must lie in (0, 2], got {zeta}")
    _check_count(n, 1)
    zeta, n = float(zeta), int(n)
    c = _cached((Kind.GRUNWALD, zeta), n, lambda m: _grunwald(zeta, m))
    return WeightSeq(Kind.GRUNWALD, zeta, c)


def _fbdf2_base(alpha: float, n: int) -> np.ndarray:
    w = np.zeros(n)
    w[0] = 1.0
    if n > 1:
        w[1] = -4.0 / 3.0 * alpha
    for k in range(2, n):
        w[k] = (4.0 / 3.0) * (1.0 - (alpha + 1.0) / k) * w[k - 1] + (1.0 / 3.0) * (
            2.0 * (1.0 + alpha) / k - 1.0
        ) * w[k - 2]
    return w


def _check_alpha(alpha):
    if not 0.0 < alpha <= 1.0:
        raise DomainError(f"FBDF2 order must lie in (0, 1], got {alpha}")


def fbdf2_base(alpha: float, n: int) -> np.ndarray:
    """Unscaled FBDF2 weights: coefficients of (1 - 4/3 xi + 1/3 xi^2)^alpha."""
    _check_alpha(alpha)
    _check_count(n, 2)
    alpha, n = float(alpha), int(n)
    return _cached(("fbdf2-base", alpha), n, lambda m: _fbdf2_base(alpha, m))


def fbdf2_weights(alpha: float, n: int) -> WeightSeq:
    """First ``n`` scaled FBDF2 weights (3/2)^alpha * omega_k."""
    _check_alpha(alpha)
    _check_count(n, 2)
    alpha = float(alpha)
    c = _cached((Kind.FBDF2, alpha), int(n), lambda m: 1.5**alpha * fbdf2_base(alpha, m))
    return WeightSeq(Kind.FBDF2, alpha, c)


def wsgd_weights(beta: float, n: int) -> WeightSeq:
    """First ``n`` WSGD weights for the (1, 0)-shifted operator, 1 < beta <= 2."""
    if not 1.0 < beta <= 2.0:
        raise DomainError(f"WSGD order must lie in (1, 2], got {beta}")
    _check_count(n, 3)
    beta, n = float(beta), int(n)

    def build(m):
        g = grunwald_weights(beta, m).coeffs
        t = 0.5 * beta * g
        t[1:] += 0.5 * (2.0 - beta) * g[:-1]
        return t

    return WeightSeq(Kind.WSGD, beta, _cached((Kind.WSGD, beta), n, build))


def start_correction(alpha: float, j_max: int) -> StartCorrection:
    """Caputo start correction b_j = j^{-alpha}/Gamma(1-alpha), j = 1..j_max.

    Uses 1/Gamma directly so that alpha = 1 gives exactly zero.
    """
    if not 0.0 < alpha <= 1.0:
        raise DomainError(f"start correction order must lie in (0, 1], got {alpha}")
    _check_count(j_max, 1)
    j = np.arange(1, int(j_max) + 1, dtype=float)
    vals = j ** (-float(alpha)) * special.rgamma(1.0 - float(alpha))
    vals.setflags(write=False)
    return StartCorrection(float(alpha), vals)


def fbdf2_apply(samples, alpha: float, h: float) -> float:
    """Discrete Caputo derivative at the last sample t_j.

    Returns h^{-alpha} (sum_k varpi_k y_{j-k} - b_j y_0) for samples
    y_0..y_j on a uniform grid with spacing ``h``.
    """
    y = np.asarray(samples, dtype=float)
    if y.ndim != 1 or y.size < 2:
        raise ValueError("fbdf2_apply needs a 1-D sequence y_0..y_j with j >= 1")
    if not h > 0:
        raise DomainError(f"step must be positive, got {h}")
    j = y.size - 1
    w = fbdf2_weights(alpha, j + 1).coeffs
    b = j ** (-float(alpha)) * special.rgamma(1.0 - float(alpha))
    acc = float(np.dot(w, y[::-1])) - b * y[0]
    return acc * h ** (-float(alpha))
