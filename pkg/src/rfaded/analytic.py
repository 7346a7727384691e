"""Mittag-Leffler series solution used as an independent oracle.

Expanding W = u - V in sin(n pi x / L), with V the linear boundary lift,
each coefficient solves the delayed scalar problem

    B' + D^gamma[B(. - tau)] + Theta_n B = f_n,     B = phi_n on [-tau, 0],

where D^gamma is the Caputo derivative in elapsed time.  Laplace inversion
with a = 1 - gamma and the delay exponential G_b = G^{-1,tau,k}_{a,b} gives

    B(t) = sum_k (-Theta)^k [ int_0^t G_{k gamma + 1}(t - p + k tau) f(p) dp
                              - int_0^{min(t,tau)} G_{(k-1) gamma + 1}(t - p + k tau) phi(p - tau) dp
                              + phi(0) G_{k gamma + 1}(t + k tau)
                              + phi(-tau) G_{(k-1) gamma + 2}(t + k tau) ].

The history enters through psi(p) = phi(p - tau) on [0, tau], which is the
function whose transform is exp(-s tau) times the finite-window transform of
phi.

Convolutions are split into the Heaviside blocks of G.  Block j of every
kernel is a single power (t - j tau - p)^e, with e growing by exactly 1 from
one k to the next, so each block uses a single Gauss-Jacobi rule (weight
u^{e_0}) shared by all k.  The alternating k-sum loses digits when
Theta_n t is large (terms of size exp(Theta_n t)); that case raises
ConvergenceError rather than returning a number with no correct digits.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Optional

import numpy as np
from scipy import special

from rfaded.errors import ConvergenceError, DomainError
from rfaded.problem import ProblemSpec
from rfaded.specialfn import DelayExpParams, delay_exp, delay_exp_block_base, delay_exp_term_count

__all__ = [
    "ModeData",
    "SeriesTruncation",
    "sine_coefficients",
    "mode_series_terms",
    "mode_solution",
    "analytic_solution",
    "power_weighted_rule",
]

EPS = np.finfo(float).eps


@dataclass(frozen=True)
class ModeData:
    """Eigendata of mode n.

    ``convention="linear"`` takes lambda_n = n pi / L, so that the
    fractional powers act as (n pi/L)^alpha.  ``"squared"`` uses
    lambda_n = (n pi / L)^2 inside the powers instead.
    """

    n: int
    L: float = 1.0
    K_alpha: float = 1.0
    K_beta: float = 1.0
    alpha: float = 0.5
    beta: float = 1.5
    convention: str = "linear"

    def __post_init__(self):
        if self.n < 1:
            raise DomainError(f"mode index must be >= 1, got {self.n}")
        if self.convention not in ("linear", "squared"):
            raise DomainError(f"unknown eigenvalue convention {self.convention!r}")

    @classmethod
    def from_spec(cls, n: int, spec: ProblemSpec, convention: str = "linear") -> "ModeData":
        return cls(n, spec.L, spec.K_alpha, spec.K_beta, spec.alpha, spec.beta, convention)

    @property
    def lambda_n(self) -> float:
        lam = self.n * math.pi / self.L
        return lam if self.convention == "linear" else lam * lam

    @property
    def Theta_n(self) -> float:
        lam = self.lambda_n
        return self.K_alpha * lam**self.alpha + self.K_beta * lam**self.beta


@dataclass(frozen=True)
class SeriesTruncation:
    """Cutoffs of the double series.

    quad_nodes is the Gauss rule size per time panel; quad_points the
    number of spatial nodes for sine coefficients (default 16 n_max).
    """

    n_max: int = 50
    k_max: int = 60
    tol: float = 1e-12
    quad_nodes: int = 48
    quad_points: Optional[int] = None

    def __post_init__(self):
        if self.n_max < 1 or self.k_max < 1:
            raise DomainError("n_max and k_max must be >= 1")
        if not self.tol > 0:
            raise DomainError("tol must be positive")
        if self.quad_nodes < 4:
            raise DomainError("quad_nodes must be >= 4")
        if self.quad_points is not None and self.quad_points < 8 * self.n_max:
            raise DomainError("quad_points must be >= 8 n_max")

    @property
    def points(self) -> int:
        return self.quad_points if self.quad_points is not None else 16 * self.n_max


# ---------------------------------------------------------------- quadrature


@lru_cache(maxsize=None)
def _legendre(n):
    x, w = special.roots_legendre(n)
    return x, w


@lru_cache(maxsize=None)
def _jacobi(n, e):
    # weight (1 + x)^e on [-1, 1]
    x, w = special.roots_jacobi(n, 0.0, e)
    return x, w


def power_weighted_rule(e: float, u0: float, u1: float, n: int):
    """Nodes and weights for int_{u0}^{u1} u^e F(u) du ~ sum w_i F(u_i).

    u0 = 0 uses Gauss-Jacobi; otherwise Gauss-Legendre on panels that
    double in length away from u0, which keeps u^e smooth on each panel
    even when u0 is tiny.
    """
    if not u1 > u0 >= 0.0:
        raise DomainError(f"need 0 <= u0 < u1, got [{u0}, {u1}]")
    if u0 == 0.0:
        if e < -1.0 + 1e-12:
            raise DomainError(f"weight exponent {e} is not integrable at 0")
        x, w = _jacobi(n, float(e))
        half = 0.5 * u1
        return half * (1.0 + x), w * half ** (e + 1.0)
    edges = [u0]
    while edges[-1] < u1:
        edges.append(min(2.0 * edges[-1], u1) if edges[-1] * 2.0 < u1 * (1 + 1e-12) else u1)
        if len(edges) > 200:
            edges[-1] = u1
            break
    x, w = _legendre(n)
    nodes, weights = [], []
    for a, b in zip(edges[:-1], edges[1:]):
        mid, rad = 0.5 * (a + b), 0.5 * (b - a)
        u = mid + rad * x
        nodes.append(u)
        weights.append(rad * w * u**e)
    return np.concatenate(nodes), np.concatenate(weights)


@lru_cache(maxsize=64)
def _sine_matrix(L: float, n_max: int, quad_points: int):
    panels = max(1, quad_points // 8)
    x8, w8 = _legendre(8)
    edges = np.linspace(0.0, L, panels + 1)
    mid = 0.5 * (edges[:-1] + edges[1:])[:, None]
    rad = 0.5 * (edges[1] - edges[0])
    x = (mid + rad * x8[None, :]).ravel()
    w = np.tile(rad * w8, panels)
    n = np.arange(1, n_max + 1)[:, None]
    S = (2.0 / L) * np.sin(n * math.pi * x[None, :] / L) * w[None, :]
    x.setflags(write=False)
    S.setflags(write=False)
    return x, S


def sine_coefficients(fn: Callable, L: float, n_max: int, quad_points: int) -> np.ndarray:
    """(2/L) int_0^L fn(x) sin(n pi x / L) dx for n = 1..n_max.

    Composite 8-point Gauss-Legendre on quad_points/8 equal panels.
    """
    if quad_points < 8 * n_max:
        raise DomainError(f"quad_points={quad_points} cannot resolve {n_max} modes (need >= 8 n_max)")
    x, S = _sine_matrix(float(L), int(n_max), int(quad_points))
    vals = np.broadcast_to(np.asarray(fn(x), dtype=float), x.shape)
    return S @ vals


# ------------------------------------------------------------ mode solution


def _kernel(gamma, tau, k, shift):
    """G^{-1,tau,k}_{1-gamma, b} with b = k gamma + shift."""
    return DelayExpParams(1.0 - gamma, k * gamma + shift, -1.0, tau, k)


@dataclass
class _Block:
    """Quadrature for one Heaviside block of one convolution family."""

    j: int
    e0: float
    u: np.ndarray
    w: np.ndarray
    data: np.ndarray


def _convolution_blocks(t, tau, gamma, n, data_fn, hi, e_shift):
    """Blocks for int_0^hi K(t - p + k tau) data(p) dp.

    Block j covers p in [0, min(hi, t - j tau)], i.e. u = t - j tau - p in
    [t - j tau - min(hi, t - j tau), t - j tau].
    """
    blocks = []
    count = delay_exp_term_count(DelayExpParams(1.0 - gamma, 1.0, -1.0, tau, 0), t)
    for j in range(count):
        top = t - j * tau
        if top <= 0.0:
            continue
        p_hi = min(hi, top)
        if p_hi <= 0.0:
            continue
        u0 = top - p_hi
        e0 = e_shift + (1.0 - gamma) * j
        u, w = power_weighted_rule(e0, u0 if u0 > 1e-14 * top else 0.0, top, n)
        p = top - u
        blocks.append(_Block(j, e0, u, w, np.asarray(data_fn(p), dtype=float)))
    return blocks


def _convolve(blocks, gamma, tau, k, shift):
    """sum_j int block_j(K_k) data with the Heaviside block decomposition."""
    par = _kernel(gamma, tau, k, shift)
    total = 0.0
    for b in blocks:
        ker = delay_exp_block_base(par, b.j, b.u)
        total += float(np.dot(b.w, ker / b.u**b.e0 * b.data))
    return total


def mode_series_terms(mode: ModeData, phi: Callable, f_wn: Callable, trunc: SeriesTruncation, t: float, *, gamma: float, tau: float):
    """Terms (-Theta)^k [...] of the mode series, k = 0, 1, ...

    Stops after two consecutive terms below ``trunc.tol``; raises
    ConvergenceError at k_max or when cancellation between terms would
    exceed the tolerance.  Returns an empty array when all data are below
    the tolerance, since the mode then contributes nothing measurable.
    """
    if t < 0:
        raise DomainError(f"the series is defined for t >= 0, got {t}")
    if not 0.0 < gamma < 1.0:
        raise DomainError(f"gamma must lie in (0, 1), got {gamma}")
    theta = mode.Theta_n
    n = trunc.quad_nodes
    phi0 = float(np.asarray(phi(np.array([0.0])), dtype=float)[0])
    phim = float(np.asarray(phi(np.array([-tau])), dtype=float)[0])
    fb = _convolution_blocks(t, tau, gamma, n, f_wn, t, 0.0)
    hb = _convolution_blocks(t, tau, gamma, n, lambda p: phi(p - tau), min(t, tau), -gamma)
    scale = max(
        [abs(phi0), abs(phim)] + [float(np.max(np.abs(b.data), initial=0.0)) for b in fb + hb]
    )
    if scale <= trunc.tol:
        return np.zeros(0)

    terms = []
    below = 0
    for k in range(trunc.k_max + 1):
        c = (-theta) ** k
        if c == 0.0 and k > 0:
            break
        val = _convolve(fb, gamma, tau, k, 1.0) - _convolve(hb, gamma, tau, k, 1.0 - gamma)
        val += phi0 * delay_exp(_kernel(gamma, tau, k, 1.0), t + k * tau)
        val += phim * delay_exp(_kernel(gamma, tau, k, 2.0 - gamma), t + k * tau)
        term = c * val
        if not math.isfinite(term):
            raise ConvergenceError(f"mode {mode.n}: term {k} overflowed (Theta t = {theta * t:.3g})")
        terms.append(term)
        below = below + 1 if abs(term) < trunc.tol else 0
        if below >= 2:
            break
    else:
        raise ConvergenceError(
            f"mode {mode.n}: k_max={trunc.k_max} reached with term {terms[-1]:.3e} above tol"
        )
    terms = np.array(terms)
    peak = float(np.max(np.abs(terms)))
    if peak * 8 * EPS > trunc.tol:
        raise ConvergenceError(
            f"mode {mode.n}: alternating terms peak at {peak:.3e}; cancellation would exceed "
            f"tol={trunc.tol:g} (Theta t = {theta * t:.3g})"
        )
    return terms


def mode_solution(mode: ModeData, phi: Callable, f_wn: Callable, trunc: SeriesTruncation, t: float, *, gamma: float, tau: float) -> float:
    """Truncated series value of B_n(t).

    ``phi`` maps history times in [-tau, 0] and ``f_wn`` elapsed times in
    [0, t] (both arrays) to the mode's coefficients.
    """
    terms = mode_series_terms(mode, phi, f_wn, trunc, t, gamma=gamma, tau=tau)
    return float(math.fsum(terms))


# ------------------------------------------------------- full-field series


def _boundary_fns(spec: ProblemSpec):
    """mu1, mu2 extended to t < 0 by the history at the two ends."""

    def left(s):
        s = np.atleast_1d(np.asarray(s, dtype=float))
        return np.array([spec.mu1(v) if v >= 0 else float(np.asarray(spec.history(np.array([0.0]), v))[0]) for v in s])

    def right(s):
        s = np.atleast_1d(np.asarray(s, dtype=float))
        return np.array([spec.mu2(v) if v >= 0 else float(np.asarray(spec.history(np.array([spec.L]), v))[0]) for v in s])

    return left, right


def _caputo_delayed(fn, gamma, p, tau, n=32, dt=1e-6):
    """Caputo derivative of sigma -> fn(sigma - tau) at elapsed times p."""
    out = np.zeros_like(p)
    for i, pi in enumerate(p):
        if pi <= 0:
            continue
        u, w = power_weighted_rule(-gamma, 0.0, pi, n)
        s = pi - u - tau
        d = (fn(s + dt) - fn(s - dt)) / (2 * dt)
        out[i] = np.dot(w, d) / special.gamma(1.0 - gamma)
    return out


class _ModalData:
    """Sine coefficients of the lifted history and forcing, cached per time grid."""

    def __init__(self, spec: ProblemSpec, trunc: SeriesTruncation, convention: str):
        self.spec, self.trunc = spec, trunc
        self.n_max, self.P = trunc.n_max, trunc.points
        self.left, self.right = _boundary_fns(spec)
        L = spec.L
        n = np.arange(1, self.n_max + 1)
        self.lift_l = 2.0 / (n * math.pi)
        self.lift_r = 2.0 * (-1.0) ** (n + 1) / (n * math.pi)
        self.theta = np.array([ModeData.from_spec(k, spec, convention).Theta_n for k in n])
        self._cache = {}
        self._L = L
        probe = np.linspace(-spec.tau, spec.T, 9)
        self.lifted = bool(np.any(self.left(probe) != 0) or np.any(self.right(probe) != 0))

    def _coeffs(self, fn2d, s):
        cols = [sine_coefficients(lambda x, v=v: fn2d(x, v), self._L, self.n_max, self.P) for v in s]
        return np.array(cols).T.reshape(self.n_max, len(s))

    def _lift_mode(self, s):
        return np.outer(self.lift_l, self.left(s)) + np.outer(self.lift_r, self.right(s))

    def _memo(self, tag, s, build):
        s = np.atleast_1d(np.asarray(s, dtype=float))
        key = (tag, s.tobytes())
        hit = self._cache.get(key)
        if hit is None:
            hit = self._cache[key] = build(s)
        return hit

    def phi(self, s):
        return self._memo("phi", s, self._phi)

    def forcing(self, p):
        return self._memo("f", p, self._forcing)

    def _phi(self, s):
        c = self._coeffs(self.spec.history, s)
        return c - self._lift_mode(s) if self.lifted else c

    def _forcing(self, p):
        c = self._coeffs(self.spec.forcing, p)
        if not self.lifted:
            return c
        tau, dt = self.spec.tau, 1e-6
        dV = (self._lift_mode(p + dt) - self._lift_mode(p - dt)) / (2 * dt)
        g = self.spec.gamma
        cap = np.outer(self.lift_l, _caputo_delayed(self.left, g, p, tau)) + np.outer(
            self.lift_r, _caputo_delayed(self.right, g, p, tau)
        )
        return c - dV - cap - self.theta[:, None] * self._lift_mode(p)


def analytic_solution(spec: ProblemSpec, trunc: SeriesTruncation, x, t: float, convention: str = "linear"):
    """Series solution V(x, t) + sum_n B_n(t) sin(n pi x / L).

    Boundaries may be inhomogeneous; they are lifted by the linear
    interpolant V of mu1 and mu2, extended to t < 0 by the history.
    Modes are evaluated in increasing n and summed in that order.
    """
    xa = np.asarray(x, dtype=float)
    if np.any((xa < 0) | (xa > spec.L)):
        raise DomainError("x must lie in [0, L]")
    if t < 0:
        raise DomainError("the series is defined for t >= 0; the history gives u on [-tau, 0]")
    data = _ModalData(spec, trunc, convention)
    total = np.zeros_like(xa)
    for n in range(1, trunc.n_max + 1):
        mode = ModeData.from_spec(n, spec, convention)
        b = mode_solution(
            mode,
            lambda s, n=n: data.phi(s)[n - 1],
            lambda p, n=n: data.forcing(p)[n - 1],
            trunc,
            t,
            gamma=spec.gamma,
            tau=spec.tau,
        )
        total = total + b * np.sin(n * math.pi * xa / spec.L)
    if data.lifted:
        lt, rt = data.left(t)[0], data.right(t)[0]
        total = total + lt * (1.0 - xa / spec.L) + rt * xa / spec.L
    return float(total) if xa.ndim == 0 else total
