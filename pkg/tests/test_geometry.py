"""
Tests for chain validation and the rationality witnesses
"""
import math

import pytest

from src.chain.geometry import EdgeKind, validate_chain
from src.chain.rationality import (
    best_rational_approximation,
    partial_quotients,
    rationality_witness,
    square_over_integer_test,
    stability_witness,
)
from src.exceptions import DomainError, EmptyInput, GeometryError, NonPositiveLength, OddEdgeCount


class TestValidateChain:
    """Edge list validation"""

    def test_pairs_and_kinds(self, two_pairs):
        assert two_pairs.n_pairs == 2
        assert two_pairs.edge_count == 4
        assert [two_pairs.kind(j) for j in range(1, 5)] == [
            EdgeKind.STRING, EdgeKind.BEAM, EdgeKind.STRING, EdgeKind.BEAM
        ]
        assert two_pairs.string_lengths() == [1.0, 1.3]
        assert two_pairs.beam_lengths() == [0.8, 0.9]
        assert two_pairs.length(3) == 1.3
        assert two_pairs.total_length() == pytest.approx(4.0)

    def test_kind_outside_chain(self, single_pair):
        with pytest.raises(IndexError):
            single_pair.kind(3)

    def test_empty(self):
        with pytest.raises(EmptyInput):
            validate_chain([])

    def test_odd_count(self):
        with pytest.raises(OddEdgeCount) as info:
            validate_chain([1.0, 2.0, 3.0])
        assert info.value.count == 3

    @pytest.mark.parametrize("bad", [0.0, -1.0, math.inf, math.nan])
    def test_non_positive_length(self, bad):
        with pytest.raises(NonPositiveLength) as info:
            validate_chain([1.0, bad])
        assert info.value.index == 2

    def test_geometry_errors_are_value_errors(self):
        with pytest.raises(ValueError):
            validate_chain([1.0])
        assert issubclass(OddEdgeCount, GeometryError)

    def test_frozen(self, single_pair):
        with pytest.raises(Exception):
            single_pair.n_pairs = 3


class TestContinuedFractions:
    """Partial quotients and best approximations"""

    def test_sqrt2_quotients(self):
        coeffs = list(partial_quotients(math.sqrt(2.0)))
        assert coeffs[:6] == [1, 2, 2, 2, 2, 2]

    def test_integer_terminates(self):
        assert list(partial_quotients(2.0)) == [2]

    def test_sqrt2_bounded_denominator(self):
        p, q, _ = best_rational_approximation(math.sqrt(2.0), 50)
        assert (p, q) == (41, 29)

    def test_pi_bounded_denominator(self):
        p, q, _ = best_rational_approximation(math.pi, 200)
        assert (p, q) == (355, 113)


class TestRationalityWitness:
    """Plausibly-rational reports"""

    def test_exact_integer_ratio(self):
        report = rationality_witness(2.0, 1.0)
        assert (report.p, report.q) == (2, 1)
        assert report.error == 0.0
        assert report.plausibly_rational

    def test_equal_lengths(self):
        report = rationality_witness(math.pi, math.pi)
        assert (report.p, report.q) == (1, 1)
        assert report.plausibly_rational

    def test_irrational_ratio_not_flagged(self):
        report = rationality_witness(math.sqrt(2.0), 1.0, max_denominator=1000, tol=1e-9)
        assert not report.plausibly_rational
        assert report.q <= 1000
        assert report.error > 1e-9

    @pytest.mark.parametrize("a, b, max_den, tol", [
        (0.0, 1.0, 10, 1e-9),
        (1.0, -1.0, 10, 1e-9),
        (1.0, 1.0, 0, 1e-9),
        (1.0, 1.0, 10, 0.0),
    ])
    def test_domain(self, a, b, max_den, tol):
        with pytest.raises(DomainError):
            rationality_witness(a, b, max_den, tol)


class TestSquareTest:
    """p^2/q search"""

    def test_exact_match(self):
        test = square_over_integer_test(2.0, 10, 1e-9)
        assert test.p * test.p / test.q == pytest.approx(2.0)
        assert test.flagged

    def test_no_match_under_bound(self):
        test = square_over_integer_test(1.0 / math.pi, 1000, 1e-9)
        assert not test.flagged


class TestStabilityWitness:
    """Length conditions for strong stability of the P1 chain"""

    def test_generic_single_pair(self, single_pair):
        witness = stability_witness(single_pair)
        assert witness['string_pairs'] == []
        assert witness['beam_pairs'] == []
        assert len(witness['square_pairs']) == 1
        assert witness['consistent_with_strong_stability']

    def test_square_condition_flags_single_pair(self):
        witness = stability_witness(validate_chain([1.0 / math.pi, 1.0]))
        assert witness['square_pairs'][0]['test'].flagged
        assert not witness['consistent_with_strong_stability']

    def test_pair_counts(self, two_pairs):
        witness = stability_witness(two_pairs)
        assert [entry['edges'] for entry in witness['string_pairs']] == [(1, 3)]
        assert [entry['edges'] for entry in witness['beam_pairs']] == [(2, 4)]
        assert len(witness['square_pairs']) == 4
        assert witness['string_pairs'][0]['report'].plausibly_rational
