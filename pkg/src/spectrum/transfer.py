"""
Transfer matrices of string and beam edges and the chain characteristic function
"""
import logging
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np
from pydantic import BaseModel

from config import POLE_THRESHOLD
from ..chain.geometry import ChainGeometry
from ..exceptions import DomainError, InvalidRange, PoleEncountered

logger = logging.getLogger(__name__)

# A Mat2 is a real (2, 2) array; vectorized calls return (n, 2, 2) stacks.
Mat2 = np.ndarray
ZLike = Union[float, np.ndarray]


class GapReport(BaseModel):
    """Asymptotic remainder sampled on a grid with dyadic window maxima"""

    z: List[float]
    g: List[float]
    windows: List[Tuple[float, float, float]]
    decreasing: bool


def _as_positive_array(z: ZLike) -> np.ndarray:
    arr = np.asarray(z, dtype=np.float64)
    if np.any(~np.isfinite(arr)) or np.any(arr <= 0.0):
        raise DomainError("z must be positive and finite")
    return arr


def _stack(m11, m12, m21, m22) -> np.ndarray:
    """Assemble entry arrays into (..., 2, 2) matrices"""
    return np.stack([np.stack([m11, m12], axis=-1), np.stack([m21, m22], axis=-1)], axis=-2)


def string_matrix(z: ZLike, l: float) -> Mat2:
    """
    Transfer matrix of a string edge acting on (phi, phi'/z^2)

    Args:
        z: Frequency parameter (scalar or array)
        l: Edge length

    Returns:
        [[c, s], [-s, c]] with c = cos(l z^2), s = sin(l z^2)
    """
    zz = _as_positive_array(z)
    phase = l * zz * zz
    c = np.cos(phase)
    s = np.sin(phase)
    return _stack(c, s, -s, c)


def beam_denominator(z: ZLike, l: float) -> np.ndarray:
    """Rescaled beam denominator 1 - 2 e^{-lz} sin(lz) - e^{-2lz}"""
    zz = np.asarray(z, dtype=np.float64)
    x = l * zz
    e = np.exp(-x)
    return 1.0 - 2.0 * e * np.sin(x) - e * e


def _beam_entries(z: np.ndarray, l: float):
    x = l * z
    c = np.cos(x)
    s = np.sin(x)
    e = np.exp(-x)
    e2 = e * e
    denom = 1.0 - 2.0 * e * s - e2

    # Guard the division; callers decide whether a tiny denominator is fatal.
    safe = np.where(np.abs(denom) < np.finfo(float).tiny, np.finfo(float).tiny, denom)
    diag = ((c - s) - e2 * (c + s)) / safe
    upper = 2.0 * s * (e2 - 1.0) / safe
    lower = (c - 2.0 * e + c * e2) / safe
    return diag, upper, lower, denom


def beam_matrix(z: ZLike, l: float, edge: Optional[int] = None,
                threshold: float = POLE_THRESHOLD) -> Mat2:
    """
    Transfer matrix of a beam edge acting on (phi, phi'''/z^3)

    Numerator and denominator are multiplied by e^{-2lz}, so only e^{-lz}
    and e^{-2lz} appear. The large-z limit is [[c-s, -2s], [c, c-s]].

    Args:
        z: Frequency parameter (scalar or array)
        l: Edge length
        edge: Edge index, reported in PoleEncountered
        threshold: Smallest admissible rescaled denominator

    Raises:
        PoleEncountered: if any denominator falls below threshold
    """
    zz = _as_positive_array(z)
    diag, upper, lower, denom = _beam_entries(zz, l)

    small = np.abs(denom) < threshold
    if np.any(small):
        where = np.flatnonzero(np.atleast_1d(small))[0]
        raise PoleEncountered(float(np.atleast_1d(zz)[where]), edge, float(np.atleast_1d(denom)[where]))

    return _stack(diag, upper, lower, diag)


def coupling_T(z: ZLike) -> Mat2:
    """String-end to beam-start coupling diag(1, -1/z)"""
    zz = _as_positive_array(z)
    one = np.ones_like(zz)
    zero = np.zeros_like(zz)
    return _stack(one, zero, zero, -1.0 / zz)


def coupling_T_inv(z: ZLike) -> Mat2:
    """Beam-end to string-start coupling diag(1, -z)"""
    zz = _as_positive_array(z)
    one = np.ones_like(zz)
    zero = np.zeros_like(zz)
    return _stack(one, zero, zero, -zz)


def transfer_product(geom: ChainGeometry, z: ZLike) -> Tuple[np.ndarray, np.ndarray]:
    """
    Chain product M(z) without pole checks

    Returns:
        (M, min_denominator): the (..., 2, 2) product and, per z, the smallest
        rescaled beam denominator met along the chain
    """
    zz = _as_positive_array(z)
    M = np.broadcast_to(np.eye(2), zz.shape + (2, 2)).copy()
    min_denom = np.full(zz.shape, np.inf)
    T = coupling_T(zz)
    T_inv = coupling_T_inv(zz)

    for j in range(1, geom.edge_count + 1):
        l = geom.length(j)
        if j % 2 == 1:
            if j > 1:
                M = T_inv @ M
            M = string_matrix(zz, l) @ M
        else:
            M = T @ M
            diag, upper, lower, denom = _beam_entries(zz, l)
            M = _stack(diag, upper, lower, diag) @ M
            min_denom = np.minimum(min_denom, np.abs(denom))

    return M, min_denom


def eval_M(geom: ChainGeometry, z: ZLike, threshold: float = POLE_THRESHOLD) -> Mat2:
    """
    Ordered product A_2N T A_2N-1 ... T^-1 A_2 T A_1

    Raises:
        PoleEncountered: if a beam denominator is below threshold
    """
    zz = _as_positive_array(z)
    for j in range(2, geom.edge_count + 1, 2):
        denom = np.abs(beam_denominator(zz, geom.length(j)))
        if np.any(denom < threshold):
            where = int(np.argmin(np.atleast_1d(denom)))
            raise PoleEncountered(float(np.atleast_1d(zz)[where]), j, float(np.atleast_1d(denom)[where]))

    M, _ = transfer_product(geom, zz)
    return M


def char_fn(geom: ChainGeometry, z: ZLike, threshold: float = POLE_THRESHOLD) -> ZLike:
    """Characteristic function f(z) = m12(z); its positive roots give eigenvalues i z^2"""
    M = eval_M(geom, z, threshold)
    value = M[..., 0, 1]
    return float(value) if np.ndim(value) == 0 else value


def asymptotic_char_fn(geom: ChainGeometry, z: ZLike) -> ZLike:
    """
    Leading-order characteristic function

    s_1 c_2 s_3 c_4 ... s_2N-1 (c_2N - s_2N), strings evaluated at l z^2
    and beams at l z.
    """
    zz = _as_positive_array(z)
    value = np.ones_like(zz)

    for j in range(1, geom.edge_count + 1):
        l = geom.length(j)
        if j % 2 == 1:
            value = value * np.sin(l * zz * zz)
        elif j < geom.edge_count:
            value = value * np.cos(l * zz)
        else:
            value = value * (np.cos(l * zz) - np.sin(l * zz))

    return float(value) if np.ndim(value) == 0 else value


def asymptotic_remainder(geom: ChainGeometry, z: ZLike) -> ZLike:
    """g(z) = f(z) / (-z)^(N-1) - f_inf(z)"""
    zz = _as_positive_array(z)
    scale = (-zz) ** (geom.n_pairs - 1)
    return char_fn(geom, zz) / scale - asymptotic_char_fn(geom, zz)


def dyadic_windows(z_lo: float, z_hi: float) -> List[Tuple[float, float]]:
    """Successive [a, 2a] windows covering [z_lo, z_hi]"""
    windows = []
    a = z_lo
    while 2.0 * a <= z_hi * (1.0 + 1e-12):
        windows.append((a, 2.0 * a))
        a *= 2.0
    return windows


def asymptotic_gap_check(geom: ChainGeometry, z_grid: Sequence[float],
                         windows: Optional[Sequence[Tuple[float, float]]] = None) -> GapReport:
    """
    Sample the asymptotic remainder and summarize its trend

    Args:
        geom: Chain geometry
        z_grid: Strictly increasing positive grid
        windows: Windows for the max |g| summary; dyadic from the grid start by default

    Returns:
        GapReport with g on the grid and (lo, hi, max |g|) per window
    """
    grid = np.asarray(z_grid, dtype=np.float64)
    if grid.ndim != 1 or grid.size < 2 or np.any(np.diff(grid) <= 0.0):
        raise InvalidRange("z_grid must be a strictly increasing list of at least two points")

    g = asymptotic_remainder(geom, grid)

    if windows is None:
        windows = dyadic_windows(float(grid[0]), float(grid[-1]))

    summary = []
    for lo, hi in windows:
        mask = (grid >= lo) & (grid <= hi)
        if not np.any(mask):
            logger.warning(f"Window [{lo}, {hi}] holds no grid points, skipped")
            continue
        summary.append((float(lo), float(hi), float(np.max(np.abs(g[mask])))))

    maxima = [entry[2] for entry in summary]
    decreasing = all(b < a for a, b in zip(maxima, maxima[1:]))

    return GapReport(z=grid.tolist(), g=np.asarray(g).tolist(), windows=summary, decreasing=decreasing)


def propagate_node_vectors(geom: ChainGeometry, z: float,
                           v0: Sequence[float] = (0.0, 1.0)) -> List[Tuple[np.ndarray, np.ndarray]]:
    """
    Node vectors edge by edge from V_1(0)

    Strings carry (phi, phi'/z^2), beams (phi, phi'''/z^3). The start vector of
    each edge is obtained from the previous end vector through T or T^-1.

    Returns:
        List of (V_j(0), V_j(l_j)) for j = 1..2N
    """
    vectors = []
    current = np.asarray(v0, dtype=np.float64)
    T = coupling_T(z)
    T_inv = coupling_T_inv(z)

    for j in range(1, geom.edge_count + 1):
        l = geom.length(j)
        if j % 2 == 1:
            if j > 1:
                current = T_inv @ current
            end = string_matrix(z, l) @ current
        else:
            current = T @ current
            end = beam_matrix(z, l, edge=j) @ current
        vectors.append((current.copy(), end.copy()))
        current = end

    return vectors
