"""
Tests for finite element assembly, midpoint integration and the discrete oracle
"""
import math

import numpy as np
import pytest

from src.exceptions import DomainError, EigSolverFailure, MeshTooCoarse
from src.modes.eigenmode import build_eigenmode
from src.simulation.assembly import (
    Variant,
    beam_element,
    discretize,
    interpolate,
    interpolate_to_mesh,
    stiffness_kernel,
    string_element,
    zero_mode_matrix,
)
from src.simulation.integrator import (
    MidpointIntegrator,
    State,
    energy,
    graph_norm,
    initial_state,
    project_out_zero_modes,
    simulate,
    step,
)
from src.simulation.oracle import oracle_spectrum_discrete, richardson_spectrum
from src.spectrum.roots import find_spectrum


class TestElements:
    """Local element matrices"""

    def test_string_element(self):
        k, m = string_element(0.5)
        np.testing.assert_allclose(k, [[2.0, -2.0], [-2.0, 2.0]])
        assert m.sum() == pytest.approx(0.5)

    def test_beam_element_rigid_motions(self):
        k, m = beam_element(0.3)
        # translation and rotation about the left node carry no strain energy
        translation = np.array([1.0, 0.0, 1.0, 0.0])
        rotation = np.array([0.0, 1.0, 0.3, 1.0])
        np.testing.assert_allclose(k @ translation, 0.0, atol=1e-10)
        np.testing.assert_allclose(k @ rotation, 0.0, atol=1e-10)
        assert translation @ m @ translation == pytest.approx(0.3)


class TestDiscretize:
    """Global assembly and damping terms"""

    def test_dof_count(self, single_pair):
        sys = discretize(single_pair, 0.25, Variant.P1)
        # string: 3 interior + junction; beam: 3 interior displacements + 5 slopes
        assert sys.n_dofs == 12
        assert sys.edges[0].w_dofs[0] == -1
        assert sys.edges[1].w_dofs[-1] == -1
        assert sys.edges[1].w_dofs[0] == sys.edges[0].w_dofs[-1]

    def test_symmetric_operators(self, two_pairs):
        sys = discretize(two_pairs, 0.1, Variant.P2)
        for matrix in (sys.M, sys.K, sys.D):
            assert abs(matrix - matrix.T).max() < 1e-12

    def test_p1_damping_rank(self, single_pair):
        sys = discretize(single_pair, 0.25, Variant.P1)
        assert [label for label, _ in sys.damped_terms] == ["node_1"]
        assert np.linalg.matrix_rank(sys.D.toarray()) == 1

    def test_p2_damping_terms(self, single_pair, two_pairs):
        assert [label for label, _ in discretize(single_pair, 0.25, Variant.P2).damped_terms] == [
            "node_1", "slope_start_2"
        ]
        labels = [label for label, _ in discretize(two_pairs, 0.1, Variant.P2).damped_terms]
        assert labels == ["node_1", "node_2", "node_3", "slope_start_2", "slope_start_4", "slope_end_2"]

    def test_conservative_has_no_damping(self, single_pair):
        sys = discretize(single_pair, 0.25, Variant.PC)
        assert sys.D.nnz == 0
        assert sys.damped_terms == []

    def test_mesh_too_coarse(self, single_pair):
        with pytest.raises(MeshTooCoarse) as info:
            discretize(single_pair, 0.5, Variant.P1)
        assert info.value.edge == 1
        assert info.value.elements == 2
        assert info.value.minimum == 4

    def test_mass_measures_length(self, two_pairs):
        sys = discretize(two_pairs, 0.1, Variant.PC)
        ones = interpolate(sys, lambda edge, x: np.ones_like(x))
        # the two clamped end elements are only partly covered
        total = float(ones @ (sys.M @ ones))
        assert 3.5 < total < two_pairs.total_length()


class TestStiffnessKernel:
    """Discrete kernel against the exact zero modes"""

    def test_single_pair_nonsingular(self, single_pair):
        kernel = stiffness_kernel(discretize(single_pair, 0.25, Variant.PC))
        assert kernel['nullity'] == 0

    def test_two_pairs_kernel_matches(self, two_pairs):
        kernel = stiffness_kernel(discretize(two_pairs, 0.1, Variant.PC))
        assert kernel['nullity'] == 1
        assert kernel['match_error'] < 1e-6

    def test_zero_modes_are_exact_in_the_mesh(self, two_pairs):
        sys = discretize(two_pairs, 0.1, Variant.PC)
        Z = zero_mode_matrix(sys)
        assert Z.shape == (sys.n_dofs, 1)
        assert np.max(np.abs(sys.K @ Z)) < 1e-8


class TestIntegrator:
    """Implicit midpoint energy behaviour"""

    def test_conservative_energy_preserved(self, two_pairs):
        sys = discretize(two_pairs, 0.1, Variant.PC)
        trace = simulate(sys, initial_state(sys, "bump"), 5.0, 0.05)
        energies = np.array(trace.energy)
        assert np.max(np.abs(energies - energies[0])) / energies[0] < 1e-10

    @pytest.mark.parametrize("variant", [Variant.P1, Variant.P2])
    def test_damped_energy_balance(self, two_pairs, variant):
        sys = discretize(two_pairs, 0.1, variant)
        trace = simulate(sys, initial_state(sys, "bump"), 5.0, 0.05)
        energies = np.array(trace.energy)
        assert np.all(np.diff(energies) <= 1e-14 * energies[0])
        assert np.max(np.abs(trace.balance_residual)) < 1e-10
        assert energies[-1] < energies[0]

    def test_bump_has_unit_graph_norm(self, single_pair):
        sys = discretize(single_pair, 0.1, Variant.P2)
        assert graph_norm(sys, initial_state(sys, "bump")) == pytest.approx(1.0, rel=1e-10)

    def test_single_step_matches_integrator(self, single_pair):
        sys = discretize(single_pair, 0.1, Variant.P1)
        start = initial_state(sys, "bump")
        one = step(sys, start, 0.05)
        other = MidpointIntegrator(sys, 0.05).step(start)
        np.testing.assert_allclose(one.u, other.u)
        assert one.t == pytest.approx(0.05)

    def test_sampling(self, single_pair):
        sys = discretize(single_pair, 0.25, Variant.P2)
        trace = simulate(sys, initial_state(sys, "bump"), 1.0, 0.1, sample_every=3)
        assert trace.t[0] == 0.0
        assert trace.t[-1] == pytest.approx(1.0)
        assert len(trace.t) == 5
        assert trace.final_state is not None

    def test_geometric_sampling(self, single_pair):
        sys = discretize(single_pair, 0.25, Variant.P2)
        trace = simulate(sys, initial_state(sys, "bump"), 10.0, 0.01, samples_per_decade=5)
        t = np.array(trace.t[1:])
        assert t[-1] == pytest.approx(10.0)
        ratios = t[1:-1] / t[:-2]
        assert np.all(ratios > 1.0)
        assert len(trace.t) < 30

    def test_trace_frame_columns(self, single_pair):
        sys = discretize(single_pair, 0.25, Variant.P2)
        frame = simulate(sys, initial_state(sys, "bump"), 0.5, 0.1).to_frame()
        assert list(frame.columns) == ['t', 'E', 'diss_total', 'diss_term_1', 'diss_term_2', 'balance_residual']

    def test_invalid_arguments(self, single_pair):
        sys = discretize(single_pair, 0.25, Variant.P2)
        start = initial_state(sys, "bump")
        with pytest.raises(DomainError):
            MidpointIntegrator(sys, 0.0)
        with pytest.raises(DomainError):
            simulate(sys, start, -1.0, 0.1)
        with pytest.raises(DomainError):
            simulate(sys, start, 1.0, 0.1, sample_every=0)

    def test_energy_of_zero_state(self, single_pair):
        sys = discretize(single_pair, 0.25, Variant.P2)
        assert energy(sys, State.zeros(sys)) == 0.0


class TestZeroModeProjection:
    """Invariant complements of the zero eigenspace"""

    def test_damped_projection(self, two_pairs):
        sys = discretize(two_pairs, 0.1, Variant.P2)
        Z = zero_mode_matrix(sys)
        rng = np.random.default_rng(3)
        state = State(u=rng.standard_normal(sys.n_dofs), v=rng.standard_normal(sys.n_dofs))
        projected = project_out_zero_modes(sys, state, Z)
        residual = Z.T @ (sys.M @ projected.v + sys.D @ projected.u)
        assert np.max(np.abs(residual)) < 1e-10
        np.testing.assert_array_equal(projected.v, state.v)

    def test_conservative_projection(self, two_pairs):
        sys = discretize(two_pairs, 0.1, Variant.PC)
        Z = zero_mode_matrix(sys)
        rng = np.random.default_rng(4)
        state = State(u=rng.standard_normal(sys.n_dofs), v=rng.standard_normal(sys.n_dofs))
        projected = project_out_zero_modes(sys, state, Z)
        assert np.max(np.abs(Z.T @ (sys.M @ projected.u))) < 1e-10
        assert np.max(np.abs(Z.T @ (sys.M @ projected.v))) < 1e-10

    def test_single_pair_untouched(self, single_pair):
        sys = discretize(single_pair, 0.25, Variant.P2)
        state = initial_state(sys, "bump")
        assert project_out_zero_modes(sys, state) is state

    def test_zero_mode_does_not_decay(self, two_pairs):
        sys = discretize(two_pairs, 0.1, Variant.P1)
        start = initial_state(sys, "zero_mode")
        trace = simulate(sys, start, 5.0, 0.05, project=False)
        assert trace.energy[0] == pytest.approx(0.0, abs=1e-8)
        np.testing.assert_allclose(trace.final_state.u, start.u, atol=1e-7)

    def test_zero_mode_needs_two_pairs(self, single_pair):
        sys = discretize(single_pair, 0.25, Variant.P1)
        with pytest.raises(DomainError):
            initial_state(sys, "zero_mode")

    def test_unknown_selector(self, single_pair):
        sys = discretize(single_pair, 0.25, Variant.P1)
        with pytest.raises(DomainError):
            initial_state(sys, "sawtooth")


class TestOracle:
    """Discrete spectrum against transfer-matrix roots"""

    def test_matches_roots(self, single_pair):
        roots = find_spectrum(single_pair, 0.5, 4.0, 4000)
        exact = np.array([root.lambda_im for root in roots[:3]])
        coarse = np.array(oracle_spectrum_discrete(discretize(single_pair, 0.05, Variant.PC), 3))
        extrapolated = np.array(richardson_spectrum(single_pair, 0.05, 3))
        assert np.all(np.abs(coarse - exact) / exact < 0.05)
        assert np.all(np.abs(extrapolated - exact) <= np.abs(coarse - exact) + 1e-9)

    def test_kernel_dropped(self, two_pairs):
        values = oracle_spectrum_discrete(discretize(two_pairs, 0.1, Variant.PC), 3)
        assert min(values) > 0.5

    def test_requires_conservative(self, single_pair):
        with pytest.raises(DomainError):
            oracle_spectrum_discrete(discretize(single_pair, 0.1, Variant.P1), 2)

    def test_too_many_requested(self, single_pair):
        sys = discretize(single_pair, 0.25, Variant.PC)
        with pytest.raises(EigSolverFailure):
            oracle_spectrum_discrete(sys, sys.n_dofs)

    def test_eigenmode_rayleigh_quotient(self, single_pair):
        roots = find_spectrum(single_pair, 0.5, 4.0, 4000)
        sys = discretize(single_pair, 0.05, Variant.PC)
        u = interpolate_to_mesh(sys, build_eigenmode(single_pair, roots[0].z))
        quotient = math.sqrt(float(u @ (sys.K @ u)) / float(u @ (sys.M @ u)))
        assert quotient == pytest.approx(roots[0].lambda_im, rel=0.02)
