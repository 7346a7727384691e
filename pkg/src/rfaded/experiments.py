"""Manufactured test problems, error tables and solver-oracle comparisons.

Both bundled problems live on [0, 1] x [0, 1] with tau = 1, homogeneous
Dirichlet data and the spatial profile p(x) = x^2 (1-x)^2:

* example 1: u = p(x) exp(gamma t),
* example 2: u = p(x) t^2.

The forcing carries the closed-form Riesz derivatives of p through

    R_z(x) = [24 P_{4-z} / Gamma(5-z) - 12 P_{3-z} / Gamma(4-z)
              + 2 P_{2-z} / Gamma(3-z)] / (2 cos(pi z / 2)),
    P_q(x) = (1-x)^q + x^q,

and the delayed Caputo term gbar appears in f with the same closed form
that the solver subtracts, so the pair cancels exactly.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from rfaded.errors import DomainError
from rfaded.problem import ProblemSpec
from rfaded.solver import SolverOptions, solve
from rfaded.specialfn import MLParams, gamma_fn, mittag_leffler
from rfaded.discretization import riesz_operator

__all__ = [
    "ErrorRow",
    "ManufacturedProblem",
    "EXAMPLE1",
    "EXAMPLE2",
    "example_problem",
    "riesz_bracket",
    "forcing_example1",
    "forcing_example2",
    "sine_test_spec",
    "observed_orders",
    "convergence_table",
    "pde_residual",
    "cross_validate",
]


def _profile(x):
    return x * x * (1.0 - x) ** 2


def _check_x(x):
    x = np.asarray(x, dtype=float)
    if np.any((x < 0.0) | (x > 1.0)):
        raise DomainError("manufactured problems live on x in [0, 1]")
    return x


def _check_t(t):
    if not t > 0:
        raise DomainError(f"this term is singular at t <= 0, got t={t}")


def riesz_bracket(z: float, x) -> np.ndarray:
    """R_z(x) = -d^z p/d|x|^z for the profile p(x) = x^2 (1-x)^2."""
    x = _check_x(x)
    a = 1.0 - x

    def P(q):
        return a**q + x**q

    br = 24.0 * P(4 - z) / gamma_fn(5 - z) - 12.0 * P(3 - z) / gamma_fn(4 - z) + 2.0 * P(2 - z) / gamma_fn(3 - z)
    return br / (2.0 * math.cos(z * math.pi / 2.0))


def _balance(alpha, beta, x, K_alpha, K_beta):
    return K_alpha * riesz_bracket(alpha, x) + K_beta * riesz_bracket(beta, x)


def delayed_example1(gamma, x, t):
    """p(x) t^-gamma E_{1,1-gamma}(gamma t)."""
    x = _check_x(x)
    _check_t(t)
    return _profile(x) * t ** (-gamma) * mittag_leffler(MLParams(1.0, 1.0 - gamma), gamma * t)


def forcing_example1(gamma, alpha, beta, x, t, K_alpha=1.0, K_beta=1.0):
    """Forcing of example 1 (u = p(x) exp(gamma t))."""
    x = _check_x(x)
    _check_t(t)
    e = math.exp(gamma * t)
    return gamma * _profile(x) * e + delayed_example1(gamma, x, t) + e * _balance(alpha, beta, x, K_alpha, K_beta)


def delayed_example2(gamma, x, t):
    """2/Gamma(3-gamma) p(x) t^(2-gamma)."""
    x = _check_x(x)
    if t < 0:
        raise DomainError(f"elapsed time must be nonnegative, got {t}")
    return 2.0 / gamma_fn(3.0 - gamma) * _profile(x) * t ** (2.0 - gamma)


def forcing_example2(gamma, alpha, beta, x, t, K_alpha=1.0, K_beta=1.0):
    """Forcing of example 2 (u = p(x) t^2); vanishes at t = 0."""
    x = _check_x(x)
    if t < 0:
        raise DomainError(f"elapsed time must be nonnegative, got {t}")
    return 2.0 * _profile(x) * t + delayed_example2(gamma, x, t) + t * t * _balance(alpha, beta, x, K_alpha, K_beta)


@dataclass(frozen=True)
class ManufacturedProblem:
    """Closed forms of one bundled problem; ``history`` is ``exact`` on t <= 0.

    Signatures: exact(x, t, gamma), exact_dt(x, t, gamma),
    forcing(gamma, alpha, beta, x, t, K_alpha, K_beta), delayed_term(gamma, x, t).
    """

    id: int
    exact: Callable
    exact_dt: Callable
    forcing: Callable
    delayed_term: Callable

    def history(self, x, t, gamma):
        return self.exact(x, t, gamma)

    def spec(self, gamma, alpha, beta, K_alpha=1.0, K_beta=1.0) -> ProblemSpec:
        return ProblemSpec(
            gamma=gamma,
            alpha=alpha,
            beta=beta,
            K_alpha=K_alpha,
            K_beta=K_beta,
            history=lambda x, t: self.exact(x, t, gamma),
            forcing=lambda x, t: self.forcing(gamma, alpha, beta, x, t, K_alpha, K_beta),
            delayed_term=lambda x, t: self.delayed_term(gamma, x, t),
            label=f"example {self.id}",
        )


EXAMPLE1 = ManufacturedProblem(
    id=1,
    exact=lambda x, t, gamma: _profile(np.asarray(x, dtype=float)) * math.exp(gamma * t),
    exact_dt=lambda x, t, gamma: gamma * _profile(np.asarray(x, dtype=float)) * math.exp(gamma * t),
    forcing=forcing_example1,
    delayed_term=delayed_example1,
)

EXAMPLE2 = ManufacturedProblem(
    id=2,
    exact=lambda x, t, gamma: _profile(np.asarray(x, dtype=float)) * t * t,
    exact_dt=lambda x, t, gamma: 2.0 * _profile(np.asarray(x, dtype=float)) * t,
    forcing=forcing_example2,
    delayed_term=delayed_example2,
)


def example_problem(example_id: int) -> ManufacturedProblem:
    try:
        return {1: EXAMPLE1, 2: EXAMPLE2}[int(example_id)]
    except (KeyError, ValueError):
        raise DomainError(f"unknown example {example_id!r}; choose 1 or 2") from None


def sine_test_spec(gamma=0.5, alpha=0.5, beta=1.5, K_alpha=1.0, K_beta=1.0, tau=1.0, T=1.0) -> ProblemSpec:
    """Single-mode problem g = sin(pi x)(1 + t), f = 0, zero boundaries.

    The delayed term is the Caputo derivative of sigma -> 1 + sigma - tau,
    i.e. sin(pi x) t^(1-gamma)/Gamma(2-gamma).
    """
    c = 1.0 / gamma_fn(2.0 - gamma)
    return ProblemSpec(
        gamma=gamma,
        alpha=alpha,
        beta=beta,
        K_alpha=K_alpha,
        K_beta=K_beta,
        tau=tau,
        T=T,
        history=lambda x, t: np.sin(np.pi * np.asarray(x, dtype=float)) * (1.0 + t),
        forcing=lambda x, t: np.zeros_like(np.asarray(x, dtype=float)),
        delayed_term=lambda x, t: c * np.sin(np.pi * np.asarray(x, dtype=float)) * t ** (1.0 - gamma),
        label="sine",
    )


@dataclass(frozen=True)
class ErrorRow:
    h: float
    max_abs_error: float
    observed_order: Optional[float] = None


def observed_orders(hs: Sequence[float], errors: Sequence[float]) -> list:
    """Rows with order log(E_prev/E)/log(h_prev/h); None where undefined."""
    rows = []
    for k, (h, e) in enumerate(zip(hs, errors)):
        order = None
        if k > 0:
            hp, ep = hs[k - 1], errors[k - 1]
            if ep > 0 and e > 0:
                order = math.log(ep / e) / math.log(hp / h)
        rows.append(ErrorRow(float(h), float(e), order))
    return rows


def _check_grids(grids):
    grids = [int(m) for m in grids]
    if not grids:
        raise DomainError("need at least one grid")
    for a, b in zip(grids, grids[1:]):
        if b <= a:
            raise DomainError("grids must be strictly increasing")
    for m in grids:
        r = m / grids[0]
        if r != int(r) or int(r) & (int(r) - 1):
            raise DomainError("each grid must be a power-of-two multiple of the first")
    return grids


def convergence_table(
    problem: ManufacturedProblem,
    gamma: float,
    alpha: float,
    beta: float,
    grids: Sequence[int],
    *,
    K_alpha: float = 1.0,
    K_beta: float = 1.0,
    options: SolverOptions = SolverOptions(),
    workers: Optional[int] = None,
) -> list:
    """Max interior error at T = 1 on M = N grids (kappa = h), with orders."""
    grids = _check_grids(grids)
    spec = problem.spec(gamma, alpha, beta, K_alpha, K_beta)

    def run(M):
        field = solve(spec, spec.mesh(M, M), options)
        return field.max_error(lambda x, t: problem.exact(x, t, gamma))

    if workers and workers > 1 and len(grids) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            errors = list(pool.map(run, grids))
    else:
        errors = [run(M) for M in grids]
    return observed_orders([1.0 / M for M in grids], errors)


def pde_residual(problem: ManufacturedProblem, gamma, alpha, beta, M: int, t: float, window=(0.0, 1.0)) -> float:
    """Max residual u_t + gbar - R_h u - f of the exact solution on ``window``.

    R_h is the discrete two-term Riesz operator of the scheme, so the
    residual is its spatial truncation error.  That error is O(h^2) on any
    window bounded away from the ends; at the first interior node the WSGD
    part only reaches O(h^(2-beta)) because the zero extension of p(x)
    has a jump in its second derivative.
    """
    x = np.linspace(0.0, 1.0, M + 1)
    R = riesz_operator(alpha, beta, M)
    u = problem.exact(x, t, gamma)
    xi = x[1:-1]
    r = (
        problem.exact_dt(xi, t, gamma)
        + problem.delayed_term(gamma, xi, t)
        - R @ u
        - problem.forcing(gamma, alpha, beta, xi, t, 1.0, 1.0)
    )
    keep = (xi >= window[0]) & (xi <= window[1])
    return float(np.max(np.abs(r[keep])))


def cross_validate(spec: ProblemSpec, grids: Sequence[int], points, trunc=None, options=SolverOptions(), convention="linear"):
    """Max |numeric - analytic| over ``points`` for each grid (M = N).

    ``convention`` selects the eigenvalue exponent of the series oracle.
    """
    from rfaded.analytic import SeriesTruncation, analytic_solution

    trunc = trunc or SeriesTruncation()
    points = list(points)
    ref = {(x, t): analytic_solution(spec, trunc, x, t, convention) for x, t in points}
    out = []
    for M in grids:
        mesh = spec.mesh(M, M)
        field = solve(spec, mesh, options)
        worst = 0.0
        for (x, t), v in ref.items():
            i, j = round(x / mesh.h), round(t / mesh.kappa)
            if not (math.isclose(i * mesh.h, x, abs_tol=1e-12) and math.isclose(j * mesh.kappa, t, abs_tol=1e-12)):
                raise DomainError(f"point ({x}, {t}) is not a node of the M={M} grid")
            worst = max(worst, abs(field.values[j, i] - v))
        out.append((M, worst))
    return out
