"""
Tests for the root search, family classification and gap statistics
"""
import math

import numpy as np
import pytest

from config import ROOT_RESIDUAL_LIMIT
from src.exceptions import InsufficientRoots, InvalidRange
from src.spectrum.roots import (
    AsymptoticFamily,
    FamilyClassifier,
    FamilyKind,
    SpectralRoot,
    asymptotic_families,
    classification_summary,
    classify_roots,
    family_predictions,
    find_spectrum,
    generalized_gap,
    simple_gap,
)
from src.spectrum.transfer import char_fn


def make_roots(zs):
    return [SpectralRoot(index=i, z=z, lambda_im=z * z, residual=0.0) for i, z in enumerate(zs, start=1)]


class TestFamilies:
    """Closed-form asymptotic sequences"""

    def test_labels(self, two_pairs):
        labels = [family.label for family in asymptotic_families(two_pairs)]
        assert labels == ["StringEdge(1)", "StringEdge(2)", "InteriorBeam(1)", "LastBeam"]

    def test_count_is_twice_pairs(self, two_pairs, single_pair):
        assert len(asymptotic_families(two_pairs)) == 4
        assert len(asymptotic_families(single_pair)) == 2

    def test_predictions(self):
        string = AsymptoticFamily(kind=FamilyKind.STRING_EDGE, j=1, length=2.0)
        interior = AsymptoticFamily(kind=FamilyKind.INTERIOR_BEAM, j=1, length=0.5)
        last = AsymptoticFamily(kind=FamilyKind.LAST_BEAM, length=1.0)
        assert string.predicted_z(3) == pytest.approx(math.sqrt(1.5 * math.pi))
        assert interior.predicted_z(2) == pytest.approx(5.0 * math.pi)
        assert last.predicted_z(1) == pytest.approx(1.25 * math.pi)

    @pytest.mark.parametrize("k", [1, 7, 40])
    def test_nearest_k_inverts_prediction(self, two_pairs, k):
        for family in asymptotic_families(two_pairs):
            assert family.nearest_k(family.predicted_z(k)) == k

    def test_family_predictions_sorted(self, single_pair):
        predictions = family_predictions(single_pair, 3.0)
        assert [(label, k) for label, k, _ in predictions] == [("StringEdge(1)", 1), ("StringEdge(1)", 2)]
        assert predictions[0][2] == pytest.approx(math.sqrt(math.pi))


class TestFindSpectrum:
    """Scan, bracket and bisect"""

    def test_roots_are_refined(self, two_pairs):
        roots = find_spectrum(two_pairs, 0.5, 6.0, 6000)
        assert roots
        assert [root.index for root in roots] == list(range(1, len(roots) + 1))
        z = np.array([root.z for root in roots])
        assert np.all(np.diff(z) > 0.0)
        for root in roots:
            assert root.residual <= ROOT_RESIDUAL_LIMIT
            assert abs(char_fn(two_pairs, root.z)) <= ROOT_RESIDUAL_LIMIT
            assert root.lambda_im == pytest.approx(root.z ** 2)

    def test_refinement_independent_of_scan(self, single_pair):
        coarse = find_spectrum(single_pair, 0.5, 8.0, 4000)
        fine = find_spectrum(single_pair, 0.5, 8.0, 16000)
        assert len(coarse) == len(fine)
        np.testing.assert_allclose([r.z for r in coarse], [r.z for r in fine], atol=1e-10)

    def test_resonant_root(self, resonant_pair):
        roots = find_spectrum(resonant_pair, 6.2, 6.35, 2000)
        assert any(abs(root.z - 2.0 * math.pi) < 1e-9 for root in roots)

    @pytest.mark.parametrize("z_min, z_max, points, tol", [
        (0.0, 5.0, 100, 1e-12),
        (5.0, 4.0, 100, 1e-12),
        (1.0, 5.0, 1, 1e-12),
        (1.0, 5.0, 100, 0.0),
    ])
    def test_invalid_range(self, single_pair, z_min, z_max, points, tol):
        with pytest.raises(InvalidRange):
            find_spectrum(single_pair, z_min, z_max, points, tol)


class TestClassification:
    """Nearest-prediction tagging"""

    def test_prediction_classifies_to_its_family(self, single_pair):
        classifier = FamilyClassifier(single_pair)
        last = asymptotic_families(single_pair)[-1]
        result = classifier.classify(last.predicted_z(10))
        assert result['family'] == "LastBeam"
        assert result['k'] == 10
        assert result['distance'] == pytest.approx(0.0, abs=1e-12)

    def test_beyond_k_max_is_unclassified(self, single_pair):
        classifier = FamilyClassifier(single_pair, k_max=1)
        assert classifier.classify(50.0)['family'] is None

    def test_large_roots_mostly_classified(self, single_pair):
        roots = classify_roots(single_pair, find_spectrum(single_pair, 20.0, 30.0, 40000))
        summary = classification_summary(roots, z_min=20.0)
        assert summary['roots_above'] == len(roots)
        assert summary['classified_fraction'] >= 0.9
        assert set(summary['per_family']) <= {"StringEdge(1)", "LastBeam"}

    def test_summary_without_large_roots(self):
        summary = classification_summary(make_roots([1.0, 2.0]), z_min=20.0)
        assert summary['roots_above'] == 0
        assert math.isnan(summary['classified_fraction'])

    def test_duplicates_reported(self):
        roots = [root.model_copy(update={'family': "LastBeam", 'family_k': 3})
                 for root in make_roots([21.0, 22.0])]
        assert classification_summary(roots)['duplicates'] == [("LastBeam", 3)]


class TestGaps:
    """Generalized and simple gaps on lambda = z^2"""

    def test_generalized_gap(self):
        roots = make_roots([1.0, 2.0, 3.0, 3.1, 4.0])
        # lambdas 1, 4, 9, 9.61, 16; differences two apart: 8, 5.61, 7
        assert generalized_gap(roots, 1) == pytest.approx(5.61)

    def test_simple_gap(self):
        roots = make_roots([1.0, 2.0, 3.0, 3.1, 4.0])
        assert simple_gap(roots) == pytest.approx(0.61)

    def test_insufficient_roots(self):
        with pytest.raises(InsufficientRoots):
            generalized_gap(make_roots([1.0, 2.0, 3.0, 4.0]), 2)
        with pytest.raises(InsufficientRoots):
            simple_gap(make_roots([1.0]))
