import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from rfaded.discretization import (
    assemble,
    assemble_system,
    check_diagonal_dominance,
    h_threshold,
    riesz_coefficient,
    riesz_operator,
)
from rfaded.errors import DomainError, PoleError
from rfaded.experiments import EXAMPLE1
from rfaded.problem import Mesh
from oracles import riesz_rows, smallest_eig_power, spectral_norm_power

orders = st.tuples(st.floats(0.05, 0.95), st.floats(1.05, 2.0))


class TestCoefficient:
    def test_values(self):
        assert riesz_coefficient(2.0) == pytest.approx(-0.5, abs=1e-15)
        assert riesz_coefficient(0.5) == pytest.approx(1 / math.sqrt(2), rel=1e-15)

    def test_pole(self):
        with pytest.raises(PoleError):
            riesz_coefficient(1.0)

    @pytest.mark.parametrize("z", [0.0, 2.01, -1.0])
    def test_domain(self, z):
        with pytest.raises(DomainError):
            riesz_coefficient(z)

    @given(st.floats(0.01, 0.99), st.floats(1.01, 2.0))
    def test_signs(self, a, b):
        assert riesz_coefficient(a) > 0 > riesz_coefficient(b)


class TestAssembly:
    @given(orders, st.integers(3, 40), st.integers(1, 40))
    def test_structure(self, ab, M, N):
        a, b = ab
        s = assemble_system(a, b, Mesh(M, N))
        assert np.array_equal(s.D, s.D.T)
        ref = s.eta_alpha * (s.A + s.A.T) + s.eta_beta * (s.B + s.B.T)
        assert np.max(np.abs(s.D - ref)) <= 1e-14 * max(1.0, np.max(np.abs(ref)))
        assert s.eta_alpha > 0 and s.eta_beta < 0
        # Toeplitz: entries depend on |i - j| only
        n = M - 1
        for i in range(n):
            for j in range(n):
                assert s.D[i, j] == s.D[0, abs(i - j)]

    def test_A_B_layout(self):
        s = assemble_system(0.3, 1.7, Mesh(8, 8))
        w, t = s.varpi.coeffs, s.theta.coeffs
        for i in range(7):
            for j in range(7):
                assert s.A[i, j] == (w[i - j] if j <= i else 0.0)
                assert s.B[i, j] == (t[i - j + 1] if j <= i + 1 else 0.0)

    def test_small_system_entry(self):
        s = assemble_system(0.4, 1.5, Mesh(4, 4))
        w, t = s.varpi.coeffs, s.theta.coeffs
        want = s.eta_alpha * w[1] + s.eta_beta * (t[0] + t[2])
        assert s.D.shape == (3, 3)
        assert s.D[0, 1] == pytest.approx(want, rel=1e-15) and s.D[1, 0] == s.D[0, 1]

    def test_classical_diffusion_limit(self):
        s = assemble_system(0.5, 2.0, Mesh(6, 6), K_alpha=0.0)
        stencil = np.diag(np.full(5, 2.0)) - np.diag(np.ones(4), 1) - np.diag(np.ones(4), -1)
        # 2|eta_beta| = kappa / (2 h^2), the usual Crank-Nicolson factor
        assert np.allclose(s.D, 2 * abs(s.eta_beta) * stencil, rtol=1e-14, atol=0)
        assert 2 * abs(s.eta_beta) == pytest.approx(s.mesh.kappa / (2 * s.mesh.h**2), rel=1e-14)

    def test_zero_coefficients(self):
        s = assemble_system(0.5, 1.5, Mesh(6, 6), K_alpha=0.0, K_beta=0.0)
        assert np.all(s.D == 0)
        rep = check_diagonal_dominance(s)
        assert not rep.dominant and rep.worst_row_margin == 0.0
        u = np.linspace(0, 1, 5)
        assert np.array_equal(s.solve_lhs(s.apply_rhs(u)), u)

    @given(orders, st.integers(3, 24))
    def test_against_entrywise_operator(self, ab, M):
        a, b = ab
        mesh = Mesh(M, M)
        s = assemble_system(a, b, mesh)
        op = riesz_rows(s.varpi.coeffs, s.theta.coeffs, s.eta_alpha, s.eta_beta, M)
        assert np.allclose(op[:, 1:-1], s.D, rtol=1e-13, atol=1e-13)
        assert np.allclose(op[:, 0], s.left_coupling, rtol=1e-13, atol=1e-13)
        assert np.allclose(op[:, -1], s.right_coupling, rtol=1e-13, atol=1e-13)
        R = riesz_operator(a, b, M)
        assert np.allclose(-0.5 * mesh.kappa * R, op, rtol=1e-12, atol=1e-12)

    def test_mismatched_mesh(self):
        spec = EXAMPLE1.spec(0.6, 0.2, 1.6)
        with pytest.raises(DomainError):
            assemble(spec, Mesh(8, 8, T=0.5))

    def test_domain(self):
        with pytest.raises(DomainError):
            assemble_system(1.0, 1.5, Mesh(4, 4))
        with pytest.raises(DomainError):
            assemble_system(0.5, 1.0, Mesh(4, 4))


class TestThreshold:
    def test_infinite_regimes(self):
        assert h_threshold(0.5, 1.5) == math.inf
        assert h_threshold(0.625, 1.5) == math.inf
        assert h_threshold(0.8, 2.0) == math.inf

    def test_regression_values(self):
        assert h_threshold(0.8, 1.9) == pytest.approx(0.1531167142076561, rel=1e-13)
        assert h_threshold(0.9, 1.1) == pytest.approx(1.3857e-5, rel=1e-4)

    def test_extreme_exponent(self):
        v = h_threshold(0.999, 1.001)
        assert math.isfinite(v) and v >= 0.0

    @pytest.mark.parametrize("a,b", [(0.0, 1.5), (0.5, 1.0), (0.5, 2.5)])
    def test_domain(self, a, b):
        with pytest.raises(DomainError):
            h_threshold(a, b)

    def test_sufficient(self):
        hmax = h_threshold(0.8, 1.9)
        for M in (7, 16, 64):
            assert 1 / M < hmax
            assert check_diagonal_dominance(assemble_system(0.8, 1.9, Mesh(M, M))).dominant

    def test_scan_across_threshold(self):
        # the bound is only sufficient: coarser grids are checked, not assumed
        margins = {M: check_diagonal_dominance(assemble_system(0.8, 1.9, Mesh(M, M))).worst_row_margin for M in (4, 5, 6)}
        assert all(math.isfinite(m) for m in margins.values())


class TestDominance:
    def test_example_config(self):
        rep = check_diagonal_dominance(assemble_system(0.2, 1.6, Mesh(32, 32)))
        assert rep.dominant and rep.worst_row_margin > 0

    def test_plain_matrix(self):
        rep = check_diagonal_dominance(np.array([[2.0, -1.0], [-1.0, 1.0]]))
        assert not rep.dominant and rep.worst_row_margin == 0.0

    @given(st.floats(0.05, 0.625), st.floats(1.05, 1.99), st.integers(3, 48))
    def test_sign_pattern_low_alpha(self, a, b, M):
        D = assemble_system(a, b, Mesh(M, M)).D
        assert np.all(np.diag(D) > 0)
        far = np.abs(np.subtract.outer(np.arange(M - 1), np.arange(M - 1))) >= 2
        assert np.all(D[far] <= 0)

    @pytest.mark.parametrize("a,b,M", [(0.3, 1.4, 16), (0.6, 1.9, 32), (0.8, 1.9, 64)])
    def test_gershgorin_vs_eigen(self, a, b, M):
        D = assemble_system(a, b, Mesh(M, M)).D
        rep = check_diagonal_dominance(D)
        assert rep.dominant
        lam = smallest_eig_power(D)
        assert lam >= rep.worst_row_margin - 1e-10
        assert lam == pytest.approx(np.linalg.eigvalsh(D)[0], rel=1e-6)

    @pytest.mark.parametrize("a,b,M", [(0.3, 1.4, 16), (0.8, 1.9, 64)])
    def test_amplification(self, a, b, M):
        s = assemble_system(a, b, Mesh(M, M))
        G = s.solve_lhs(np.eye(M - 1) - s.D)
        assert spectral_norm_power(G) <= 1 + 1e-12
