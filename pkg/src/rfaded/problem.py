"""Continuous problem data and the uniform space-time mesh.

    u_t + d^gamma u(x, t - tau)/dt^gamma
        = K_alpha d^alpha u/d|x|^alpha + K_beta d^beta u/d|x|^beta + f,

on (0, L) x (0, T] with u = g on [0, L] x [-tau, 0] and Dirichlet data
u(0, t) = mu1(t), u(L, t) = mu2(t).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from rfaded.errors import DomainError

__all__ = ["Mesh", "ProblemSpec", "zero_boundary"]

SpaceTimeFn = Callable[[np.ndarray, float], np.ndarray]


def zero_boundary(t: float) -> float:
    return 0.0


@dataclass(frozen=True)
class Mesh:
    """Uniform grid x_i = i*h (i = 0..M), t_j = j*kappa (j = 0..N)."""

    M: int
    N: int
    L: float = 1.0
    T: float = 1.0

    def __post_init__(self):
        if int(self.M) != self.M or self.M < 3:
            raise DomainError(f"need M >= 3 space intervals, got {self.M}")
        if int(self.N) != self.N or self.N < 1:
            raise DomainError(f"need N >= 1 time steps, got {self.N}")
        if not (self.L > 0 and self.T > 0):
            raise DomainError("L and T must be positive")

    @property
    def h(self) -> float:
        return self.L / self.M

    @property
    def kappa(self) -> float:
        return self.T / self.N

    @property
    def x(self) -> np.ndarray:
        return np.arange(self.M + 1) * self.h

    @property
    def t(self) -> np.ndarray:
        return np.arange(self.N + 1) * self.kappa

    def x_at(self, i: int) -> float:
        return i * self.h

    def t_at(self, j: int) -> float:
        return j * self.kappa


def _in(lo, v, hi, lo_open=True, hi_open=True):
    a = v > lo if lo_open else v >= lo
    b = v < hi if hi_open else v <= hi
    return a and b


@dataclass(frozen=True)
class ProblemSpec:
    """Orders, coefficients, domain and data functions of one problem.

    ``history(x, t)`` is g on t in [-tau, 0]; ``forcing(x, t)`` is f.
    ``delayed_term(x, t)``, when given, is the value of the delayed Caputo
    term at elapsed time t; otherwise the solver approximates it from the
    history numerically.  All space-time callables take an array ``x``.
    """

    gamma: float
    alpha: float
    beta: float
    history: SpaceTimeFn
    forcing: SpaceTimeFn
    mu1: Callable[[float], float] = zero_boundary
    mu2: Callable[[float], float] = zero_boundary
    delayed_term: Optional[SpaceTimeFn] = None
    K_alpha: float = 1.0
    K_beta: float = 1.0
    tau: float = 1.0
    L: float = 1.0
    T: float = 1.0
    label: str = field(default="", compare=False)

    def __post_init__(self):
        if not _in(0.0, self.gamma, 1.0):
            raise DomainError(f"gamma must lie in (0, 1), got {self.gamma}")
        if not _in(0.0, self.alpha, 1.0):
            raise DomainError(f"alpha must lie in (0, 1), got {self.alpha}")
        if not _in(1.0, self.beta, 2.0, hi_open=False):
            raise DomainError(f"beta must lie in (1, 2], got {self.beta}")
        if self.K_alpha < 0 or self.K_beta < 0:
            raise DomainError("diffusion coefficients must be nonnegative")
        if not (self.tau > 0 and self.L > 0 and self.T > 0):
            raise DomainError("tau, L and T must be positive")
        if self.T > self.tau * (1 + 1e-14):
            raise DomainError(f"T = {self.T} exceeds the delay tau = {self.tau}")
        ends = np.asarray(self.history(np.array([0.0, self.L]), 0.0), dtype=float)
        for side, want, got in (("left", self.mu1(0.0), ends[0]), ("right", self.mu2(0.0), ends[1])):
            if not math.isclose(got, want, rel_tol=1e-12, abs_tol=1e-12):
                raise DomainError(f"{side} boundary value {want} does not match history {got} at t=0")

    def mesh(self, M: int, N: int) -> Mesh:
        return Mesh(M, N, self.L, self.T)
