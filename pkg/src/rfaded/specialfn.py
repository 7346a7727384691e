"""Gamma, two-parameter Mittag-Leffler and generalized delay exponential.

The delay exponential

    G^{lam,tau,m}_{a,b}(t) = sum_j C(j+m, j) lam^j (t-(m+j)tau)^{a(m+j)+b-1}
                             / Gamma(a(m+j)+b) * H(t-(m+j)tau)

is a finite sum for every finite t because of the Heaviside gate.  Each
summand is a single shifted power, which the analytic module exploits to
build singularity-aware quadrature one block at a time.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from rfaded.errors import ConvergenceError, DomainError, PoleError

__all__ = [
    "MLParams",
    "DelayExpParams",
    "gamma_fn",
    "mittag_leffler",
    "delay_exp",
    "delay_exp_block",
    "delay_exp_block_base",
    "delay_exp_exponent",
    "delay_exp_terms",
    "delay_exp_term_count",
]


CANCEL_TOL = 1.5e-8


def _is_pole(z: float) -> bool:
    return z <= 0.0 and float(z).is_integer()


def gamma_fn(z: float) -> float:
    """Euler's Gamma function for real ``z``.

    Delegates to :func:`math.gamma` (correctly rounded to a few ulp over
    the whole real line) and reports the poles explicitly.  Returns
    ``inf`` where the result overflows a double (z > 171.62).
    """
    z = float(z)
    if not math.isfinite(z):
        raise DomainError(f"gamma_fn needs a finite argument, got {z}")
    if _is_pole(z):
        raise PoleError(f"Gamma has a pole at z={z:g}")
    try:
        return math.gamma(z)
    except OverflowError:
        return math.inf


@dataclass(frozen=True)
class MLParams:
    """Orders and truncation controls for E_{alpha,beta}."""

    alpha: float
    beta: float
    max_terms: int = 500
    tol: float = 1e-15

    def __post_init__(self):
        if not self.alpha > 0:
            raise DomainError(f"Mittag-Leffler alpha must be > 0, got {self.alpha}")
        if not self.tol > 0:
            raise DomainError(f"tol must be positive, got {self.tol}")
        if self.max_terms < 1:
            raise DomainError(f"max_terms must be >= 1, got {self.max_terms}")


def mittag_leffler(p: MLParams, x):
    """Two-parameter Mittag-Leffler function by direct Taylor summation.

    Terms ``x**k / Gamma(alpha*k + beta)`` are formed in the log domain so
    that neither the power nor the Gamma overflows on the way.  The sum
    stops once two consecutive terms fall below ``p.tol`` past the region
    where 1/Gamma can vanish accidentally.  Accepts scalars or arrays.

    For large negative x the alternating terms cancel; once the rounding
    bound 8 eps max|term| exceeds CANCEL_TOL max(1, |E|) the value has too
    few correct digits and ConvergenceError is raised instead.
    """
    xa = np.asarray(x, dtype=float)
    scalar = xa.ndim == 0
    xa = np.atleast_1d(xa)
    total = np.zeros_like(xa)
    absx = np.abs(xa)
    with np.errstate(divide="ignore"):
        logx = np.log(absx)
    neg = xa < 0
    prev_small = False
    last = np.inf
    peak = np.zeros_like(xa)
    for k in range(p.max_terms):
        arg = p.alpha * k + p.beta
        if _is_pole(arg):
            mag = np.zeros_like(xa)
            sgn = 1.0
        else:
            if k == 0:
                mag = np.full_like(xa, math.exp(-special.gammaln(arg)))
            else:
                with np.errstate(over="ignore"):
                    mag = np.exp(k * logx - special.gammaln(arg))
            sgn = special.gammasgn(arg)
        term = sgn * mag * np.where(neg & (k % 2 == 1), -1.0, 1.0)
        total += term
        np.maximum(peak, np.abs(term), out=peak)
        last = float(np.max(np.abs(term)))
        small = last < p.tol
        if small and prev_small and arg > 2.0:
            break
        prev_small = small
    else:
        if not last < p.tol:
            raise ConvergenceError(
                f"E_{{{p.alpha},{p.beta}}} did not converge in {p.max_terms} terms "
                f"(last term {last:.3e})"
            )
    lost = 8.0 * np.finfo(float).eps * peak > CANCEL_TOL * np.maximum(1.0, np.abs(total))
    if np.any(lost):
        bad = xa[lost]
        raise ConvergenceError(
            f"E_{{{p.alpha},{p.beta}}}: cancellation at x = {bad[np.argmax(np.abs(bad))]:g} "
            "leaves too few correct digits for direct summation"
        )
    return float(total[0]) if scalar else total


@dataclass(frozen=True)
class DelayExpParams:
    """Parameters (alpha, beta, lambda, tau, m) of G^{lam,tau,m}_{alpha,beta}."""

    alpha: float
    beta: float
    lam: float
    tau: float
    m: int = 0

    def __post_init__(self):
        if not self.tau > 0:
            raise DomainError(f"delay tau must be positive, got {self.tau}")
        if self.m < 0 or int(self.m) != self.m:
            raise DomainError(f"m must be a nonnegative integer, got {self.m}")


def delay_exp_exponent(p: DelayExpParams, j: int) -> float:
    """Power carried by block ``j``: alpha*(m+j) + beta - 1."""
    return p.alpha * (p.m + j) + p.beta - 1.0


def _block_log_coef(p: DelayExpParams, j: int):
    """log|C(j+m, j) lam^j| and its sign; ``None`` if the coefficient is 0."""
    if j > 0 and p.lam == 0.0:
        return None
    logc = special.gammaln(p.m + j + 1) - special.gammaln(j + 1) - special.gammaln(p.m + 1)
    if j > 0:
        logc += j * math.log(abs(p.lam))
    sign = -1.0 if (p.lam < 0 and j % 2 == 1) else 1.0
    return logc, sign


def delay_exp_block(p: DelayExpParams, j: int, t):
    """Single summand ``j`` of the delay exponential, vectorized over ``t``.

    Zero wherever the Heaviside gate is closed.  A Gamma pole in the
    denominator annihilates the block, unless the power itself is
    infinite (base 0 with negative exponent), which raises PoleError.
    """
    ta = np.asarray(t, dtype=float)
    return delay_exp_block_base(p, j, ta - (p.m + j) * p.tau)


def delay_exp_block_base(p: DelayExpParams, j: int, base):
    """Block ``j`` as a function of its shifted argument t - (m+j) tau.

    Lets callers that already know the shifted argument avoid the
    cancellation in forming t - (m+j) tau."""
    base = np.asarray(base, dtype=float)
    scalar = base.ndim == 0
    base = np.atleast_1d(base)
    out = np.zeros_like(base)
    active = base >= 0
    if not np.any(active):
        return float(out[0]) if scalar else out
    coef = _block_log_coef(p, j)
    if coef is None:
        return float(out[0]) if scalar else out
    logc, sign = coef
    e = delay_exp_exponent(p, j)
    b = base[active]
    if _is_pole(e + 1.0):
        if e < 0 and np.any(b == 0):
            raise PoleError(f"block {j}: 0**{e:g}/Gamma({e + 1:g}) is undefined")
        return float(out[0]) if scalar else out
    sgn = sign * special.gammasgn(e + 1.0)
    lg = special.gammaln(e + 1.0)
    with np.errstate(divide="ignore", over="ignore"):
        if e == 0.0:
            val = np.full_like(b, math.exp(logc - lg))
        else:
            val = np.exp(logc + e * np.log(b) - lg)
    out[active] = sgn * val
    return float(out[0]) if scalar else out


def delay_exp_term_count(p: DelayExpParams, t: float) -> int:
    """Number of open Heaviside gates at ``t``: floor(t/tau) - m + 1, or 0."""
    t = float(t)
    J = math.floor(t / p.tau) - p.m
    # guard the floor against rounding right at a breakpoint
    while t - (p.m + J + 1) * p.tau >= 0:
        J += 1
    while J >= 0 and t - (p.m + J) * p.tau < 0:
        J -= 1
    return max(J + 1, 0)


def delay_exp_terms(p: DelayExpParams, t: float) -> np.ndarray:
    """All nonvanishing-gate summands at a scalar ``t`` (possibly empty)."""
    if not math.isfinite(t):
        raise DomainError(f"delay_exp needs a finite t, got {t}")
    n = delay_exp_term_count(p, t)
    return np.array([delay_exp_block(p, j, t) for j in range(n)], dtype=float)


def delay_exp(p: DelayExpParams, t):
    """Generalized delay exponential G^{lam,tau,m}_{alpha,beta}(t).

    Exact finite sum; 0 for t < m*tau.  Accepts scalars or arrays.
    """
    ta = np.asarray(t, dtype=float)
    if not np.all(np.isfinite(ta)):
        raise DomainError("delay_exp needs finite t")
    if ta.ndim == 0:
        return float(np.sum(delay_exp_terms(p, float(ta))))
    out = np.zeros_like(ta)
    if ta.size == 0:
        return out
    n = delay_exp_term_count(p, float(np.max(ta)))
    for j in range(n):
        out += delay_exp_block(p, j, ta)
    return out
