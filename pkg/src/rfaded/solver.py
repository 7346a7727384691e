"""Time marching for the Crank-Nicolson scheme.

Per step the interior unknowns solve

    (I + D) U^j = (I - D) U^{j-1} + Q^j,
    Q^j = kappa/2 (f^j + f^{j-1}) - kappa/2 (gbar^j + gbar^{j-1}) - Lambda^j,

where gbar is the delayed Caputo term and Lambda moves the known boundary
columns of the discrete operator to the right-hand side.  Since T <= tau
the delayed argument always lies in the history window, so gbar is data
and the step stays linear in U^j alone.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from rfaded.discretization import (
    CNSystem,
    DominanceReport,
    assemble,
    check_diagonal_dominance,
    h_threshold,
)
from rfaded.errors import DomainError, SolverError
from rfaded.problem import Mesh, ProblemSpec
from rfaded.weights import grunwald_weights

__all__ = [
    "SolverOptions",
    "SolutionField",
    "assemble_source",
    "step",
    "solve",
    "delayed_term_numeric",
]

RESIDUAL_TOL = 1e-10


@dataclass(frozen=True)
class SolverOptions:
    """Toggles for the time marcher.

    t0_offset: the first step evaluates f and gbar at t_0 + t0_offset*kappa
        instead of t_0, which sidesteps t^-gamma type singularities at the
        origin.  ``None`` evaluates at t_0 exactly.
    delayed_steps: sub-grid size for the numeric delayed term, used only
        when the problem supplies no closed form.
    check_residual: verify every linear solve against RESIDUAL_TOL.
    """

    t0_offset: Optional[float] = 1e-3
    delayed_steps: int = 1024
    check_residual: bool = True

    def __post_init__(self):
        if self.t0_offset is not None and not 0.0 <= self.t0_offset < 1.0:
            raise DomainError(f"t0_offset must lie in [0, 1), got {self.t0_offset}")
        if self.delayed_steps < 16:
            raise DomainError("delayed_steps must be >= 16")


@dataclass(frozen=True, eq=False)
class SolutionField:
    """Grid solution ``values[j, i]`` = U at (x_i, t_j)."""

    values: np.ndarray
    mesh: Mesh
    dominance: DominanceReport
    metadata: dict = field(default_factory=dict)

    @property
    def final(self) -> np.ndarray:
        return self.values[-1]

    def max_error(self, exact: Callable[[np.ndarray, float], np.ndarray], j: int = -1) -> float:
        """Max interior error against ``exact(x, t)`` at time level ``j``."""
        jj = j % (self.mesh.N + 1)
        x = self.mesh.x[1:-1]
        ref = np.asarray(exact(x, self.mesh.t_at(jj)), dtype=float)
        return float(np.max(np.abs(self.values[jj, 1:-1] - ref)))


def delayed_term_numeric(g, gamma: float, x, t: float, steps: int = 1024, tau: float = 1.0):
    """Caputo gamma-derivative of sigma -> g(x, sigma - tau) at sigma = t.

    The integral runs over the elapsed window [0, t], whose shifted
    arguments sigma - tau stay inside the history interval [-tau, 0].
    First-order Grunwald sum on ``steps`` uniform sub-intervals:

        t_h^-gamma sum_k w_k (v(t - k t_h) - v(0)),   v(s) = g(x, s - tau).
    """
    if steps < 16:
        raise DomainError(f"need at least 16 sub-steps, got {steps}")
    if not 0.0 < gamma < 1.0:
        raise DomainError(f"gamma must lie in (0, 1), got {gamma}")
    if t - tau > 1e-14 * max(1.0, tau):
        raise DomainError(f"t - tau = {t - tau:g} > 0 lies outside the history window")
    if t < 0:
        raise DomainError(f"elapsed time must be nonnegative, got {t}")
    x = np.asarray(x, dtype=float)
    if t == 0:
        return np.zeros_like(x)
    dt = t / steps
    w = grunwald_weights(gamma, steps + 1).coeffs
    s = (t - tau) - dt * np.arange(steps + 1)
    s[-1] = -tau
    base = np.asarray(g(x, -tau), dtype=float)
    acc = np.zeros(np.broadcast(x, base).shape)
    for k in range(steps + 1):
        acc = acc + w[k] * (np.asarray(g(x, s[k]), dtype=float) - base)
    return acc * dt ** (-gamma)


def _load(spec: ProblemSpec, x: np.ndarray, t: float, options: SolverOptions) -> np.ndarray:
    f = np.asarray(spec.forcing(x, t), dtype=float)
    if spec.delayed_term is not None:
        gbar = np.asarray(spec.delayed_term(x, t), dtype=float)
    else:
        gbar = delayed_term_numeric(spec.history, spec.gamma, x, t, options.delayed_steps, spec.tau)
    return np.broadcast_to(f - gbar, x.shape)


def _source_time(mesh: Mesh, j: int, options: SolverOptions) -> float:
    if j == 0 and options.t0_offset is not None:
        return options.t0_offset * mesh.kappa
    return mesh.t_at(j)


def _combine(sys: CNSystem, load_prev, load_now, bnd_prev, bnd_now) -> np.ndarray:
    half = 0.5 * sys.mesh.kappa
    lam = sys.left_coupling * (bnd_now[0] + bnd_prev[0]) + sys.right_coupling * (bnd_now[1] + bnd_prev[1])
    return half * (load_now + load_prev) - lam


def assemble_source(
    spec: ProblemSpec,
    mesh: Mesh,
    sys: CNSystem,
    j: int,
    u_prev,
    options: SolverOptions = SolverOptions(),
) -> np.ndarray:
    """Right-hand side vector Q^j (length M-1) of step ``j``.

    ``u_prev`` is the boundary-inclusive row U^{j-1}; its end entries give
    the old boundary values, the new ones come from mu1 and mu2.
    """
    if not 1 <= j <= mesh.N:
        raise IndexError(f"time index must lie in 1..{mesh.N}, got {j}")
    u_prev = np.asarray(u_prev, dtype=float)
    if u_prev.shape != (mesh.M + 1,):
        raise ValueError(f"u_prev must have length M+1 = {mesh.M + 1}")
    x = mesh.x[1:-1]
    t_now = mesh.t_at(j)
    lp = _load(spec, x, _source_time(mesh, j - 1, options), options)
    ln = _load(spec, x, t_now, options)
    return _combine(sys, lp, ln, (u_prev[0], u_prev[-1]), (spec.mu1(t_now), spec.mu2(t_now)))


def step(sys: CNSystem, u_prev_interior, q, check_residual: bool = True) -> np.ndarray:
    """One Crank-Nicolson step with the cached factorization of I + D."""
    u = np.asarray(u_prev_interior, dtype=float)
    q = np.asarray(q, dtype=float)
    rhs = sys.apply_rhs(u) + q
    new = sys.solve_lhs(rhs)
    if check_residual:
        res = np.max(np.abs(new + sys.D @ new - rhs), initial=0.0)
        bound = RESIDUAL_TOL * (1.0 + np.max(np.abs(q), initial=0.0))
        if not res < bound:
            raise SolverError(f"linear-solve residual {res:.3e} exceeds {bound:.3e}")
    return new


def solve(spec: ProblemSpec, mesh: Mesh, options: SolverOptions = SolverOptions()) -> SolutionField:
    """March the scheme from the history at t = 0 to T."""
    sys = assemble(spec, mesh)
    M, N = mesh.M, mesh.N
    x = mesh.x
    xi = x[1:-1]
    U = np.empty((N + 1, M + 1))
    U[0] = np.asarray(spec.history(x, 0.0), dtype=float)
    U[0, 0], U[0, M] = spec.mu1(0.0), spec.mu2(0.0)

    try:
        load_prev = _load(spec, xi, _source_time(mesh, 0, options), options)
    except (ArithmeticError, ValueError) as exc:
        raise SolverError(f"source at the first time level: {exc}", step=1) from exc
    if not np.all(np.isfinite(load_prev)):
        raise SolverError("source is not finite at the first time level; enable t0_offset", step=1)
    for j in range(1, N + 1):
        t = mesh.t_at(j)
        try:
            load_now = _load(spec, xi, t, options)
            bnd = (spec.mu1(t), spec.mu2(t))
            q = _combine(sys, load_prev, load_now, (U[j - 1, 0], U[j - 1, M]), bnd)
            if not np.all(np.isfinite(q)):
                raise SolverError("non-finite source vector")
            U[j, 1:M] = step(sys, U[j - 1, 1:M], q, options.check_residual)
        except SolverError as exc:
            raise SolverError(str(exc), step=j) from exc
        except (ArithmeticError, ValueError) as exc:
            raise SolverError(f"{type(exc).__name__}: {exc}", step=j) from exc
        U[j, 0], U[j, M] = bnd
        load_prev = load_now

    U.setflags(write=False)
    report = check_diagonal_dominance(sys)
    meta = {
        "t0_offset": options.t0_offset,
        "delayed_term": "closed form" if spec.delayed_term is not None else "numeric",
        "delayed_steps": options.delayed_steps if spec.delayed_term is None else None,
        "h": mesh.h,
        "kappa": mesh.kappa,
        "h_threshold": h_threshold(spec.alpha, spec.beta),
        "dominant": report.dominant,
        "dominance_margin": report.worst_row_margin,
        "eta_alpha": sys.eta_alpha,
        "eta_beta": sys.eta_beta,
    }
    return SolutionField(U, mesh, report, meta)
