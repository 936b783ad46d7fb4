"""
Tests for the acceptance checks behind `chainwave verify`
"""
import math

from config import VERIFY_ZERO_MODE_TOL
from src.cli.verify import VerifySuite
from src.runconfig.loader import loads_config


def coarse_config(lengths):
    return loads_config(f"[geometry]\nlengths = {list(lengths)}\n\n[simulate]\nh = 0.1\n")


class TestZeroModeNonDecay:
    """Kernel modes keep their energy under feedback"""

    def test_two_pairs_pass(self):
        result = VerifySuite(coarse_config([1.0, 0.8, 1.3, 0.9])).check_zero_mode_non_decay()
        assert result['passed']
        assert set(result['drift']) == {'P1', 'P2'}
        for drift in result['drift'].values():
            assert drift['energy'] < VERIFY_ZERO_MODE_TOL
            assert drift['displacement'] < VERIFY_ZERO_MODE_TOL

    def test_single_pair_skipped(self):
        result = VerifySuite(coarse_config([1.0, 1.0])).check_zero_mode_non_decay()
        assert result['passed']
        assert 'skipped' in result


class TestStrongStability:
    """Node traces of the low modes"""

    def test_node_traces_reported_positive(self):
        result = VerifySuite(coarse_config([1.0, math.sqrt(2.0)])).check_strong_stability()
        assert result['modes'] == 20
        assert result['min_node_trace_sum'] > 0.0
        assert result['min_node_trace_sum_p2'] >= result['min_node_trace_sum']
        assert all(0.0 < ratio <= 1.0 for ratio in result['energy_ratio'].values())
