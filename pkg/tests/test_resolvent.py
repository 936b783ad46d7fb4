"""
Tests for the energy-space resolvent norm and its sweep summary
"""
import logging
import math

import numpy as np
import pytest
import scipy.linalg

from src.exceptions import DomainError
from src.simulation.assembly import Variant, discretize
from src.simulation.oracle import largest_frequency
from src.simulation.resolvent import (
    EnergyFactors,
    beta_grid,
    resolvent_norm,
    resolvent_norm_sweep,
    sweep_summary,
    trust_horizon,
)


def dense_resolvent_norm(sys, beta):
    """Energy norm of (i beta - A)^-1 from dense matrices, for small systems with nonsingular K"""
    n = sys.n_dofs
    M, K, D = sys.M.toarray(), sys.K.toarray(), sys.D.toarray()
    M_inv = np.linalg.inv(M)
    A = np.block([[np.zeros((n, n)), np.eye(n)], [-M_inv @ K, -M_inv @ D]])
    R = np.linalg.inv(1j * beta * np.eye(2 * n) - A)
    G = scipy.linalg.block_diag(K, M)
    values = scipy.linalg.eigh(R.conj().T @ G @ R, G, eigvals_only=True)
    return math.sqrt(float(np.max(values)))


@pytest.fixture
def small_p2(single_pair):
    return discretize(single_pair, 0.25, Variant.P2)


class TestEnergyFactors:
    """Factorized energy inner product"""

    def test_full_rank_without_zero_modes(self, small_p2):
        factors = EnergyFactors(small_p2)
        assert factors.rank == small_p2.n_dofs
        assert factors.dimension == 2 * small_p2.n_dofs

    def test_measure_gives_energy_norm(self, small_p2):
        factors = EnergyFactors(small_p2)
        rng = np.random.default_rng(7)
        u, v = rng.standard_normal(small_p2.n_dofs), rng.standard_normal(small_p2.n_dofs)
        y = factors.measure(u, v)
        expected = u @ (small_p2.K @ u) + v @ (small_p2.M @ v)
        assert float(y @ y) == pytest.approx(float(expected), rel=1e-10)

    def test_lift_inverts_measure(self, small_p2):
        factors = EnergyFactors(small_p2)
        rng = np.random.default_rng(8)
        y = rng.standard_normal(factors.dimension)
        np.testing.assert_allclose(factors.measure(*factors.lift(y)), y, atol=1e-9)

    def test_kernel_dropped(self, two_pairs):
        sys = discretize(two_pairs, 0.1, Variant.P2)
        factors = EnergyFactors(sys)
        assert factors.rank == sys.n_dofs - 1


class TestResolventNorm:
    """Matrix-free norm against a dense computation"""

    @pytest.mark.parametrize("beta", [1.5, 6.0])
    def test_matches_dense(self, small_p2, beta):
        factors = EnergyFactors(small_p2)
        assert resolvent_norm(small_p2, beta, factors) == pytest.approx(
            dense_resolvent_norm(small_p2, beta), rel=1e-5)

    def test_p1_matches_dense(self, single_pair):
        sys = discretize(single_pair, 0.25, Variant.P1)
        assert resolvent_norm(sys, 3.0, EnergyFactors(sys)) == pytest.approx(
            dense_resolvent_norm(sys, 3.0), rel=1e-5)

    def test_spectral_lower_bound(self, small_p2):
        n = small_p2.n_dofs
        M_inv = np.linalg.inv(small_p2.M.toarray())
        A = np.block([[np.zeros((n, n)), np.eye(n)],
                      [-M_inv @ small_p2.K.toarray(), -M_inv @ small_p2.D.toarray()]])
        distance = np.min(np.abs(4.0j - np.linalg.eigvals(A)))
        norm = resolvent_norm(small_p2, 4.0, EnergyFactors(small_p2))
        assert norm >= (1.0 - 1e-6) / distance


class TestSweep:
    """Sweeps over beta"""

    def test_rows(self, small_p2):
        rows = resolvent_norm_sweep(small_p2, [1.0, 2.0, 3.0], horizon=100.0, max_workers=2)
        assert [row['beta'] for row in rows] == [1.0, 2.0, 3.0]
        for row in rows:
            assert row['norm'] > 0.0
            assert row['norm_over_beta'] == pytest.approx(row['norm'] / row['beta'])

    def test_warns_beyond_horizon(self, small_p2, caplog):
        with caplog.at_level(logging.WARNING):
            resolvent_norm_sweep(small_p2, [1.0, 2.0], horizon=1.5, max_workers=1)
        assert "trust horizon" in caplog.text

    def test_rejects_conservative(self, single_pair):
        with pytest.raises(DomainError):
            resolvent_norm_sweep(discretize(single_pair, 0.25, Variant.PC), [1.0])

    @pytest.mark.parametrize("betas", [[], [1.0, -2.0], [0.0]])
    def test_rejects_bad_betas(self, small_p2, betas):
        with pytest.raises(DomainError):
            resolvent_norm_sweep(small_p2, betas, horizon=10.0)

    def test_trust_horizon(self, small_p2):
        assert trust_horizon(small_p2) == pytest.approx(0.25 * largest_frequency(small_p2))

    def test_beta_grid(self):
        grid = beta_grid(10.0, 1000.0, 3)
        np.testing.assert_allclose(grid, [10.0, 100.0, 1000.0])
        with pytest.raises(DomainError):
            beta_grid(10.0, 5.0, 4)
        with pytest.raises(DomainError):
            beta_grid(1.0, 5.0, 1)


class TestSweepSummary:
    """Boundedness indicators of norm/beta"""

    @staticmethod
    def rows(betas, ratios):
        return [{'beta': b, 'norm': r * b, 'norm_over_beta': r} for b, r in zip(betas, ratios)]

    def test_flat(self):
        summary = sweep_summary(self.rows([10, 20, 40, 80, 160], [1.0] * 5))
        assert summary['count'] == 5
        assert summary['max_over_median'] == pytest.approx(1.0)
        assert summary['last_window_slope'] == pytest.approx(0.0, abs=1e-12)
        assert not summary['last_window_monotone_growth']

    def test_growth_in_last_window(self):
        betas = [10, 20, 40, 80, 100, 120, 160]
        summary = sweep_summary(self.rows(betas, [1.0, 1.0, 1.0, 1.0, 1.2, 1.5, 2.0]))
        assert summary['last_window_monotone_growth']
        assert summary['last_window_slope'] > 0.0

    def test_below_beta_lo_ignored(self):
        summary = sweep_summary(self.rows([1, 2, 20, 40], [50.0, 50.0, 1.0, 1.0]), beta_lo=10.0)
        assert summary['count'] == 2
        assert summary['max_over_median'] == pytest.approx(1.0)

    def test_too_few_rows(self):
        summary = sweep_summary(self.rows([20], [1.0]))
        assert summary['count'] == 1
        assert math.isnan(summary['max_over_median'])
