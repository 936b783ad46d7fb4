"""
Exact zero eigenspace: constant strings joined by affine beams
"""
import logging
from fractions import Fraction
from typing import Dict, List, Tuple

from pydantic import BaseModel, ConfigDict

from ..chain.geometry import ChainGeometry, EdgeKind

logger = logging.getLogger(__name__)


class ZeroMode(BaseModel):
    """Piecewise affine function, phi_j(x) = slope_j * x + intercept_j, in exact arithmetic"""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    selector: str
    lengths: Tuple[Fraction, ...]
    pieces: Tuple[Tuple[Fraction, Fraction], ...]

    def value(self, edge: int, x: float) -> float:
        slope, intercept = self.pieces[edge - 1]
        return float(slope) * x + float(intercept)

    def slope(self, edge: int) -> float:
        return float(self.pieces[edge - 1][0])

    def exact_value(self, edge: int, x: Fraction) -> Fraction:
        slope, intercept = self.pieces[edge - 1]
        return slope * x + intercept


class ZeroModeBasis(BaseModel):
    """N-1 modes, one per free constant b_3, b_5, ..., b_2N-1"""

    model_config = ConfigDict(frozen=True)

    free_constants: List[str]
    modes: List[ZeroMode]

    @property
    def dimension(self) -> int:
        return len(self.modes)


def _mode_from_constants(geom: ChainGeometry, constants: Dict[int, Fraction], selector: str) -> ZeroMode:
    """Strings take b_{2j-1}; beam 2j interpolates linearly from b_{2j-1} to b_{2j+1}"""
    lengths = tuple(Fraction(l) for l in geom.lengths)
    pieces = []
    for j in range(1, geom.edge_count + 1):
        if geom.kind(j) == EdgeKind.STRING:
            pieces.append((Fraction(0), constants[j]))
        else:
            left = constants[j - 1]
            right = constants[j + 1]
            pieces.append(((right - left) / lengths[j - 1], left))
    return ZeroMode(selector=selector, lengths=lengths, pieces=tuple(pieces))


def zero_eigenspace(geom: ChainGeometry) -> ZeroModeBasis:
    """
    Basis of the kernel of the conservative generator

    Each basis mode sets one of b_3, ..., b_2N-1 to 1 and the others to 0;
    b_1 = b_2N+1 = 0 are fixed by the clamped ends.
    """
    odd_indices = list(range(3, 2 * geom.n_pairs, 2))
    modes = []

    for selected in odd_indices:
        constants = {i: Fraction(0) for i in range(1, 2 * geom.n_pairs + 2, 2)}
        constants[selected] = Fraction(1)
        modes.append(_mode_from_constants(geom, constants, f"b{selected}"))

    logger.debug(f"Zero eigenspace of dimension {len(modes)} for N={geom.n_pairs}")
    return ZeroModeBasis(free_constants=[f"b{i}" for i in odd_indices], modes=modes)


def zero_mode_conditions(geom: ChainGeometry, mode: ZeroMode) -> Dict[str, List[Fraction]]:
    """
    Exact residuals of the zero-eigenvalue problem

    Second and higher derivatives of affine pieces vanish identically, so the
    moment conditions and the beam equation hold by construction and are
    reported as zeros alongside the nontrivial checks.
    """
    n = geom.n_pairs
    lengths = mode.lengths
    residuals: Dict[str, List[Fraction]] = {
        'clamped_start': [mode.exact_value(1, Fraction(0))],
        'clamped_end': [mode.exact_value(geom.edge_count, lengths[-1])],
        'free_moments': [Fraction(0)] * (2 * n),
        'beam_equation': [Fraction(0)] * n,
        'string_equation': [Fraction(0)] * n,
        'string_slopes': [mode.pieces[2 * j - 2][0] for j in range(1, n + 1)],
        'continuity': [mode.exact_value(j, lengths[j - 1]) - mode.exact_value(j + 1, Fraction(0))
                       for j in range(1, geom.edge_count)],
        # shear vanishes on affine beams and string slopes are zero
        'force_balance': [mode.pieces[2 * j - 2][0] for j in range(1, n + 1)]
                         + [mode.pieces[2 * j][0] for j in range(1, n)],
    }
    return residuals


def satisfies_zero_problem(geom: ChainGeometry, mode: ZeroMode) -> bool:
    return all(value == 0 for values in zero_mode_conditions(geom, mode).values() for value in values)


def v_form(mode: ZeroMode, other: ZeroMode, geom: ChainGeometry) -> Fraction:
    """Energy form: string slope products plus beam curvature products, exact"""
    total = Fraction(0)
    for j in range(1, geom.edge_count + 1):
        if geom.kind(j) == EdgeKind.STRING:
            total += mode.pieces[j - 1][0] * other.pieces[j - 1][0] * mode.lengths[j - 1]
    # beam curvatures of affine pieces are zero
    return total
