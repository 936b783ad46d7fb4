"""
Polynomial decay fit of a sampled energy trace
"""
import logging
from typing import List, Tuple

import numpy as np
from pydantic import BaseModel

from config import BOUNDED_GROWTH_LIMIT
from ..exceptions import NonpositiveEnergy, WindowOutOfRange
from .integrator import EnergyTrace

logger = logging.getLogger(__name__)


class DecayFit(BaseModel):
    """Fitted decay law and boundedness verdict of E(t) t^2 / ln^4 t"""

    t_window: Tuple[float, float]
    samples: int
    slope: float
    intercept: float
    c_hat: float
    last_window_increase: float
    verdict: str
    running_max: List[float]

    @property
    def bounded(self) -> bool:
        return self.verdict == "bounded"


def decay_envelope(t: np.ndarray, energy: np.ndarray) -> np.ndarray:
    """E(t) t^2 / ln^4(t), defined for t > 1"""
    return energy * t * t / np.log(t) ** 4


def fit_polynomial_decay(trace: EnergyTrace, t_window: Tuple[float, float],
                         growth_limit: float = BOUNDED_GROWTH_LIMIT) -> DecayFit:
    """
    Fit log E against log t and track the envelope constant on a window

    Args:
        trace: Energy trace covering the window
        t_window: (t_lo, t_hi) with 1 < t_lo < t_hi
        growth_limit: Largest relative increase of the running maximum over
            the last dyadic window [t_hi/2, t_hi] still called bounded

    Returns:
        DecayFit

    Raises:
        WindowOutOfRange: window malformed, starts at t <= 1, not covered, or holds < 2 samples
        NonpositiveEnergy: E <= 0 somewhere on the window
    """
    t_lo, t_hi = float(t_window[0]), float(t_window[1])
    if not (1.0 < t_lo < t_hi):
        raise WindowOutOfRange(f"window ({t_lo}, {t_hi}) must satisfy 1 < t_lo < t_hi")

    t = np.asarray(trace.t, dtype=np.float64)
    energy = np.asarray(trace.energy, dtype=np.float64)
    if t.size == 0 or t[0] > t_lo or t[-1] < t_hi * (1.0 - 1e-9):
        covered = (float(t[0]), float(t[-1])) if t.size else None
        raise WindowOutOfRange(f"trace covers {covered}, window is ({t_lo}, {t_hi})")

    inside = (t >= t_lo) & (t <= t_hi * (1.0 + 1e-9))
    t, energy = t[inside], energy[inside]
    if t.size < 2:
        raise WindowOutOfRange(f"only {t.size} samples inside ({t_lo}, {t_hi})")
    if np.any(energy <= 0.0):
        first = float(t[np.argmax(energy <= 0.0)])
        raise NonpositiveEnergy(f"energy is not positive at t={first}")

    slope, intercept = np.polyfit(np.log(t), np.log(energy), 1)
    running = np.maximum.accumulate(decay_envelope(t, energy))

    # running max at the start of the last dyadic window
    midpoint = np.searchsorted(t, t[-1] / 2.0, side='right') - 1
    reference = running[max(midpoint, 0)]
    increase = float(running[-1] / reference - 1.0)
    verdict = "bounded" if increase < growth_limit else "unbounded"

    logger.info(f"Decay fit on [{t_lo}, {t_hi}]: slope {slope:.4f}, C_hat {running[-1]:.4e}, "
                f"last-window increase {increase:.3%} -> {verdict}")

    return DecayFit(
        t_window=(t_lo, t_hi),
        samples=int(t.size),
        slope=float(slope),
        intercept=float(intercept),
        c_hat=float(running[-1]),
        last_window_increase=increase,
        verdict=verdict,
        running_max=running.tolist()
    )
