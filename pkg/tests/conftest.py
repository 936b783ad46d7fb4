"""
Shared fixtures: small chains used across the suite
"""
import math
import sys
from pathlib import Path

import pytest

ROOT = Path(__file__).resolve().parent.parent
if str(ROOT) not in sys.path:
    sys.path.insert(0, str(ROOT))

from src.chain.geometry import validate_chain  # noqa: E402


@pytest.fixture
def single_pair():
    return validate_chain([1.0, 1.0])


@pytest.fixture
def two_pairs():
    return validate_chain([1.0, 0.8, 1.3, 0.9])


@pytest.fixture
def resonant_pair():
    """String length 1/(2 pi): at z = 2 pi both edges complete whole periods"""
    return validate_chain([1.0 / (2.0 * math.pi), 1.0])
