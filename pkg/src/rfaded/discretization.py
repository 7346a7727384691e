"""Crank-Nicolson matrices for the two Riesz terms.

With c_z = 1/(2 cos(pi z/2)), the scheme reads

    (I + D) U^j = (I - D) U^{j-1} + Q^j,
    D = eta_a (A + A^T) + eta_b (B + B^T),
    eta_a = c_alpha kappa K_alpha h^-alpha / 2,
    eta_b = c_beta kappa K_beta h^-beta / 2,

where A is the lower-triangular Toeplitz matrix of FBDF2 weights and B
the Toeplitz matrix of WSGD weights with one superdiagonal.  D is built
from its first column, so it is symmetric bit for bit.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

from rfaded.errors import DomainError, PoleError, SingularMatrixError
from rfaded.problem import Mesh, ProblemSpec
from rfaded.weights import WeightSeq, fbdf2_weights, wsgd_weights

__all__ = [
    "CNSystem",
    "DominanceReport",
    "riesz_coefficient",
    "assemble",
    "assemble_system",
    "riesz_operator",
    "h_threshold",
    "dominance_margin",
    "check_diagonal_dominance",
]


def riesz_coefficient(zeta: float) -> float:
    """c_zeta = 1/(2 cos(pi zeta/2)) for zeta in (0, 2], zeta != 1."""
    if not 0.0 < zeta <= 2.0:
        raise DomainError(f"Riesz order must lie in (0, 2], got {zeta}")
    if zeta == 1.0:
        raise PoleError("c_zeta is singular at zeta = 1")
    return 1.0 / (2.0 * math.cos(math.pi * zeta / 2.0))


@dataclass(frozen=True, eq=False)
class CNSystem:
    """Assembled Crank-Nicolson operator for one (orders, mesh) pair.

    ``left_coupling[s-1]`` and ``right_coupling[s-1]`` multiply
    (u_0^j + u_0^{j-1}) and (u_M^j + u_M^{j-1}) in the boundary
    correction of row s.
    """

    mesh: Mesh
    alpha: float
    beta: float
    eta_alpha: float
    eta_beta: float
    varpi: WeightSeq
    theta: WeightSeq
    A: np.ndarray
    B: np.ndarray
    D: np.ndarray
    left_coupling: np.ndarray
    right_coupling: np.ndarray
    lhs_factorization: tuple

    @property
    def size(self) -> int:
        return self.mesh.M - 1

    def solve_lhs(self, rhs: np.ndarray) -> np.ndarray:
        return sla.lu_solve(self.lhs_factorization, rhs, check_finite=False)

    def apply_rhs(self, u_interior: np.ndarray) -> np.ndarray:
        return u_interior - self.D @ u_interior


def assemble_system(alpha, beta, mesh: Mesh, K_alpha=1.0, K_beta=1.0) -> CNSystem:
    """Assemble A, B, D and factor I + D for given orders and mesh."""
    M = mesh.M
    h, kappa = mesh.h, mesh.kappa
    if not 0.0 < alpha < 1.0:
        raise DomainError(f"alpha must lie in (0, 1), got {alpha}")
    if not 1.0 < beta <= 2.0:
        raise DomainError(f"beta must lie in (1, 2], got {beta}")
    ca, cb = riesz_coefficient(alpha), riesz_coefficient(beta)
    eta_a = ca * kappa * K_alpha * h ** (-alpha) / 2.0
    eta_b = cb * kappa * K_beta * h ** (-beta) / 2.0
    if not (math.isfinite(eta_a) and math.isfinite(eta_b)):
        raise SingularMatrixError("scale factors overflow; h is too small")

    w = fbdf2_weights(alpha, M + 1)
    th = wsgd_weights(beta, M + 2)
    wc, tc = w.coeffs, th.coeffs
    n = M - 1
    zeros = np.zeros(n)

    A = sla.toeplitz(wc[:n], zeros)
    brow = zeros.copy()
    brow[0] = tc[1]
    if n > 1:
        brow[1] = tc[0]
    B = sla.toeplitz(tc[1 : n + 1], brow)

    d = eta_a * wc[:n] + eta_b * tc[1 : n + 1]
    d[0] = 2.0 * eta_a * wc[0] + 2.0 * eta_b * tc[1]
    if n > 1:
        d[1] = eta_a * wc[1] + eta_b * (tc[0] + tc[2])
    D = sla.toeplitz(d)

    s = np.arange(1, M)
    left = eta_a * wc[s] + eta_b * tc[s + 1]
    right = eta_a * wc[M - s] + eta_b * tc[M - s + 1]
    left[0] += eta_b * tc[0]
    right[-1] += eta_b * tc[0]

    lhs = np.eye(n) + D
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", sla.LinAlgWarning)
        lu = sla.lu_factor(lhs, check_finite=False)
    piv = np.abs(np.diag(lu[0]))
    if not np.all(np.isfinite(lu[0])) or np.min(piv) == 0.0:
        raise SingularMatrixError(
            f"I + D is singular for alpha={alpha}, beta={beta}, M={M}, N={mesh.N}"
        )
    for arr in (A, B, D, left, right):
        arr.setflags(write=False)
    return CNSystem(mesh, float(alpha), float(beta), eta_a, eta_b, w, th, A, B, D, left, right, lu)


def assemble(spec: ProblemSpec, mesh: Mesh) -> CNSystem:
    """Assemble the Crank-Nicolson system for ``spec`` on ``mesh``."""
    if not (math.isclose(mesh.L, spec.L) and math.isclose(mesh.T, spec.T)):
        raise DomainError("mesh extent does not match the problem's L and T")
    return assemble_system(spec.alpha, spec.beta, mesh, spec.K_alpha, spec.K_beta)


def riesz_operator(alpha, beta, M, L=1.0, K_alpha=1.0, K_beta=1.0) -> np.ndarray:
    """Discrete K_a d^a/d|x|^a + K_b d^b/d|x|^b on interior rows.

    Returns an (M-1) x (M+1) matrix acting on the boundary-inclusive grid
    vector.  Built entry by entry from the one-sided sums, so it serves as
    an independent check of the Toeplitz assembly: the interior columns
    equal -(2/kappa) D and the outer columns give the boundary couplings.
    """
    h = L / M
    ca, cb = riesz_coefficient(alpha), riesz_coefficient(beta)
    w = fbdf2_weights(alpha, M + 1).coeffs
    th = wsgd_weights(beta, M + 2).coeffs
    i = np.arange(1, M)[:, None]
    j = np.arange(M + 1)[None, :]
    lag = i - j
    Sa = np.where(lag >= 0, w[np.clip(lag, 0, M)], 0.0) + np.where(lag <= 0, w[np.clip(-lag, 0, M)], 0.0)
    Sb = np.where(lag >= -1, th[np.clip(lag + 1, 0, M + 1)], 0.0) + np.where(
        lag <= 1, th[np.clip(1 - lag, 0, M + 1)], 0.0
    )
    return -(ca * K_alpha * h ** (-alpha) * Sa + cb * K_beta * h ** (-beta) * Sb)


def h_threshold(alpha: float, beta: float) -> float:
    """Sufficient mesh bound for diagonal dominance of D.

    Returns +inf for alpha <= 5/8, where dominance holds for every h, and
    at beta = 2, where the bound degenerates and dominance must be checked
    numerically.  Evaluated in the log domain because the exponent
    1/(beta - alpha) can be huge.  The bound compares the k = 2 diagonal
    with K_alpha = K_beta; :func:`check_diagonal_dominance` is the ground
    truth.
    """
    if not 0.0 < alpha < 1.0:
        raise DomainError(f"alpha must lie in (0, 1), got {alpha}")
    if not 1.0 < beta <= 2.0:
        raise DomainError(f"beta must lie in (1, 2], got {beta}")
    if alpha <= 5.0 / 8.0 or beta == 2.0:
        return math.inf
    log_num = math.log(3.0 * beta * (beta - 1.0) * (2.0 - beta) * (3.0 + beta) * math.cos(alpha * math.pi / 2))
    log_den = math.log(
        4.0 * 1.5**alpha * alpha * (8.0 * alpha - 5.0) * abs(math.cos(beta * math.pi / 2))
    )
    expo = (log_num - log_den) / (beta - alpha)
    if expo > 709.0:
        return math.inf
    return math.exp(expo)


@dataclass(frozen=True)
class DominanceReport:
    dominant: bool
    worst_row_margin: float


def dominance_margin(matrix: np.ndarray) -> np.ndarray:
    """Row margins |a_ii| - sum_{j != i} |a_ij|."""
    a = np.abs(np.asarray(matrix, dtype=float))
    diag = np.diag(a)
    return diag - (a.sum(axis=1) - diag)


def check_diagonal_dominance(sys_or_matrix) -> DominanceReport:
    """Strict row dominance of D (or of any square matrix passed in)."""
    mat = sys_or_matrix.D if isinstance(sys_or_matrix, CNSystem) else sys_or_matrix
    m = dominance_margin(mat)
    worst = float(np.min(m))
    return DominanceReport(bool(worst > 0.0), worst)
