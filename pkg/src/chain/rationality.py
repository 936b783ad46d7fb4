"""
Continued-fraction witnesses for the number-theoretic length conditions
"""
import itertools
import logging
import math
from typing import Dict, Generator, List, Tuple

import numpy as np
from pydantic import BaseModel

from config import DEFAULT_MAX_DENOMINATOR, DEFAULT_RATIONAL_TOL
from ..exceptions import DomainError
from .geometry import ChainGeometry

logger = logging.getLogger(__name__)

# Partial quotients beyond this carry only float noise
MAX_PARTIAL_QUOTIENTS = 40
REMAINDER_EPS = 1e-12


class SquareTest(BaseModel):
    """Best p^2/q match for a^2/(b*pi) found by bounded search"""

    value: float
    p: int
    q: int
    error: float
    flagged: bool
    search_bound: int


class RationalityReport(BaseModel):
    """Approximation quality of a/b by rationals with bounded denominator"""

    a: float
    b: float
    ratio: float
    p: int
    q: int
    error: float
    plausibly_rational: bool
    partial_quotients: List[int]
    max_denominator: int
    square_test: SquareTest


def partial_quotients(x: float, eps: float = REMAINDER_EPS) -> Generator[int, None, None]:
    """Euclidean algorithm on a positive real, yielding continued fraction coefficients"""
    for _ in range(MAX_PARTIAL_QUOTIENTS):
        n, rem = divmod(x, 1.0)
        yield int(n)
        if rem < eps:
            return
        x = 1.0 / rem


def best_rational_approximation(x: float, max_denominator: int) -> Tuple[int, int, List[int]]:
    """
    Closest p/q to x with q <= max_denominator

    Walks the convergents and, when the next one would exceed the bound,
    compares the last convergent against the admissible semiconvergent.

    Returns:
        (p, q, partial quotients consumed)
    """
    coeffs = list(partial_quotients(x))
    p_prev, q_prev = 1, 0
    p, q = coeffs[0], 1
    used = [coeffs[0]]

    for a in coeffs[1:]:
        p_next = a * p + p_prev
        q_next = a * q + q_prev
        if q_next > max_denominator:
            t = (max_denominator - q_prev) // q
            p_semi = p_prev + t * p
            q_semi = q_prev + t * q
            if t > 0 and abs(x - p_semi / q_semi) < abs(x - p / q):
                return p_semi, q_semi, used
            return p, q, used
        p_prev, q_prev, p, q = p, q, p_next, q_next
        used.append(a)

    return p, q, used


def square_over_integer_test(value: float, max_denominator: int, tol: float) -> SquareTest:
    """Search q <= max_denominator, p^2 <= q*value*(1+tol) for the p^2/q closest to value"""
    q = np.arange(1, max_denominator + 1, dtype=np.float64)
    p = np.floor(np.sqrt(q * value * (1.0 + tol)))
    errors = np.where(p >= 1.0, np.abs(value - p * p / q), np.inf)
    best = int(np.argmin(errors))
    error = float(errors[best])

    return SquareTest(
        value=value,
        p=int(p[best]),
        q=int(q[best]),
        error=error,
        flagged=bool(error < tol),
        search_bound=max_denominator
    )


def rationality_witness(a: float, b: float,
                        max_denominator: int = DEFAULT_MAX_DENOMINATOR,
                        tol: float = DEFAULT_RATIONAL_TOL) -> RationalityReport:
    """
    Report how well a/b is approximated by rationals

    Floating-point input can never certify irrationality: a report that is
    not flagged only says no small-denominator fraction is within tol.

    Args:
        a: Numerator length
        b: Denominator length
        max_denominator: Largest admissible q
        tol: Absolute error below which the ratio counts as plausibly rational

    Returns:
        RationalityReport including the squares-over-integers test on a^2/(b*pi)
    """
    if not (a > 0 and b > 0 and math.isfinite(a) and math.isfinite(b)):
        raise DomainError(f"lengths must be positive and finite, got a={a!r}, b={b!r}")
    if max_denominator < 1:
        raise DomainError(f"max_denominator must be >= 1, got {max_denominator}")
    if not tol > 0:
        raise DomainError(f"tol must be positive, got {tol!r}")

    ratio = a / b
    p, q, used = best_rational_approximation(ratio, max_denominator)
    error = abs(ratio - p / q)

    return RationalityReport(
        a=a,
        b=b,
        ratio=ratio,
        p=p,
        q=q,
        error=error,
        plausibly_rational=bool(error < tol),
        partial_quotients=used,
        max_denominator=max_denominator,
        square_test=square_over_integer_test(a * a / (b * math.pi), max_denominator, tol)
    )


def stability_witness(geom: ChainGeometry,
                      max_denominator: int = DEFAULT_MAX_DENOMINATOR,
                      tol: float = DEFAULT_RATIONAL_TOL) -> Dict:
    """
    Check the length conditions behind strong stability of the P1 chain

    Every pair of string lengths and every pair of beam lengths is tested for
    rational ratios, and every (beam, string) pair for l_beam^2 / l_string
    being a square-over-integer multiple of pi. One pair that escapes its
    test is enough for the lengths to be consistent with strong stability.

    Returns:
        Dictionary with per-pair reports and a 'consistent_with_strong_stability' flag
    """
    strings = geom.string_lengths()
    beams = geom.beam_lengths()
    string_pairs = []
    beam_pairs = []
    square_pairs = []

    for i, j in itertools.combinations(range(len(strings)), 2):
        report = rationality_witness(strings[i], strings[j], max_denominator, tol)
        string_pairs.append({'edges': (2 * i + 1, 2 * j + 1), 'report': report})

    for i, j in itertools.combinations(range(len(beams)), 2):
        report = rationality_witness(beams[i], beams[j], max_denominator, tol)
        beam_pairs.append({'edges': (2 * i + 2, 2 * j + 2), 'report': report})

    for i, beam in enumerate(beams):
        for j, string in enumerate(strings):
            test = square_over_integer_test(beam * beam / (string * math.pi), max_denominator, tol)
            square_pairs.append({'edges': (2 * i + 2, 2 * j + 1), 'test': test})

    consistent = (
        any(not entry["report"].plausibly_rational for entry in string_pairs)
        or any(not entry["report"].plausibly_rational for entry in beam_pairs)
        or any(not entry["test"].flagged for entry in square_pairs)
    )

    if not consistent:
        logger.warning("Length ratios look rational; strong stability of P1 not supported by this witness")

    return {
        'string_pairs': string_pairs,
        'beam_pairs': beam_pairs,
        'square_pairs': square_pairs,
        'consistent_with_strong_stability': consistent,
        'max_denominator': max_denominator,
        'tol': tol
    }
