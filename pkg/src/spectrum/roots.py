"""
Spectral root search, asymptotic family classification and gap statistics
"""
import logging
import math
from collections import Counter
from enum import Enum
from typing import Dict, List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict

from config import (
    CLASSIFICATION_WINDOW,
    DEFAULT_K_MAX,
    DEFAULT_ROOT_TOL,
    FLAT_CROSSING_RATIO,
    MAX_WORKERS,
    POLE_THRESHOLD,
    ROOT_RESIDUAL_LIMIT,
)
from ..chain.geometry import ChainGeometry
from ..exceptions import InsufficientRoots, InvalidRange
from ..utils.parallel import chunk_bounds, parallel_map
from .transfer import transfer_product

logger = logging.getLogger(__name__)

MAX_BISECTIONS = 200


class FamilyKind(str, Enum):
    STRING_EDGE = "StringEdge"
    INTERIOR_BEAM = "InteriorBeam"
    LAST_BEAM = "LastBeam"


class AsymptoticFamily(BaseModel):
    """One of the 2N closed-form sequences approached by large roots"""

    model_config = ConfigDict(frozen=True)

    kind: FamilyKind
    j: Optional[int] = None
    length: float

    @property
    def label(self) -> str:
        if self.kind == FamilyKind.LAST_BEAM:
            return self.kind.value
        return f"{self.kind.value}({self.j})"

    def predicted_z(self, k: int) -> float:
        if self.kind == FamilyKind.STRING_EDGE:
            return math.sqrt(k * math.pi / self.length)
        if self.kind == FamilyKind.INTERIOR_BEAM:
            return (math.pi + 2.0 * k * math.pi) / (2.0 * self.length)
        return (math.pi / 4.0 + k * math.pi) / self.length

    def nearest_k(self, z: float) -> int:
        """Index of the prediction closest to z (k >= 1)"""
        if self.kind == FamilyKind.STRING_EDGE:
            k = round(z * z * self.length / math.pi)
            # predictions are not evenly spaced in z; check neighbours
            candidates = [c for c in (k - 1, k, k + 1) if c >= 1]
            return min(candidates, key=lambda c: abs(z - self.predicted_z(c)))
        if self.kind == FamilyKind.INTERIOR_BEAM:
            k = round((2.0 * z * self.length - math.pi) / (2.0 * math.pi))
        else:
            k = round(z * self.length / math.pi - 0.25)
        return max(1, k)

    def spacing(self, k: int) -> float:
        """Distance to the next prediction, the local window scale"""
        return self.predicted_z(k + 1) - self.predicted_z(k)


class SpectralRoot(BaseModel):
    """Refined positive root of the characteristic function"""

    model_config = ConfigDict(frozen=True)

    index: int
    z: float
    lambda_im: float
    residual: float
    family: Optional[str] = None
    family_k: Optional[int] = None
    min_denominator: float = math.inf


def asymptotic_families(geom: ChainGeometry) -> List[AsymptoticFamily]:
    """The 2N families: one per string, one per interior beam, and the last beam"""
    families = []
    for j in range(1, geom.n_pairs + 1):
        families.append(AsymptoticFamily(kind=FamilyKind.STRING_EDGE, j=j, length=geom.length(2 * j - 1)))
    for j in range(1, geom.n_pairs):
        families.append(AsymptoticFamily(kind=FamilyKind.INTERIOR_BEAM, j=j, length=geom.length(2 * j)))
    families.append(AsymptoticFamily(kind=FamilyKind.LAST_BEAM, length=geom.length(geom.edge_count)))
    return families


def family_predictions(geom: ChainGeometry, z_max: float) -> List[Tuple[str, int, float]]:
    """Every family prediction (label, k, z) with z <= z_max, sorted by z"""
    predictions = []
    for family in asymptotic_families(geom):
        k = 1
        while True:
            z = family.predicted_z(k)
            if z > z_max:
                break
            predictions.append((family.label, k, z))
            k += 1
    return sorted(predictions, key=lambda item: item[2])


def _scan(geom: ChainGeometry, grid: np.ndarray, threshold: float) -> Tuple[np.ndarray, np.ndarray]:
    """Evaluate f and pole flags on a grid, chunked across worker threads"""

    def evaluate(part: slice):
        M, min_denom = transfer_product(geom, grid[part])
        return M[:, 0, 1], min_denom

    results = parallel_map(evaluate, chunk_bounds(grid.size, MAX_WORKERS))
    values = np.concatenate([r[0] for r in results])
    denoms = np.concatenate([r[1] for r in results])
    return values, denoms < threshold


def _rescan_poles(geom: ChainGeometry, grid: np.ndarray, values: np.ndarray,
                  poles: np.ndarray, step: float, threshold: float):
    """Replace pole-flagged grid points by half-step neighbours that are pole-free"""
    flagged = grid[poles]
    logger.warning(f"{flagged.size} scan points hit beam-matrix poles; rescanning at half step")

    extra = np.concatenate([flagged - 0.5 * step, flagged + 0.5 * step])
    extra = extra[(extra > 0.0) & (extra >= grid[0]) & (extra <= grid[-1])]
    keep_grid = grid[~poles]
    keep_values = values[~poles]

    if extra.size:
        M, denom = transfer_product(geom, extra)
        ok = denom >= threshold
        keep_grid = np.concatenate([keep_grid, extra[ok]])
        keep_values = np.concatenate([keep_values, M[ok, 0, 1]])

    order = np.argsort(keep_grid)
    return keep_grid[order], keep_values[order]


def _warn_flat_crossings(grid: np.ndarray, values: np.ndarray) -> int:
    """Log local minima of |f| without sign change, where a root pair may hide"""
    a = np.abs(values)
    inner = slice(1, -1)
    same_sign = (np.sign(values[:-2]) == np.sign(values[1:-1])) & (np.sign(values[1:-1]) == np.sign(values[2:]))
    local_min = (a[inner] < a[:-2]) & (a[inner] < a[2:])
    shallow = a[inner] < FLAT_CROSSING_RATIO * np.maximum(a[:-2], a[2:])
    suspects = np.flatnonzero(same_sign & local_min & shallow) + 1

    for i in suspects:
        logger.warning(f"Possible missed root pair near z={grid[i]:.6g} (|f|={a[i]:.3e}, no sign change)")
    return int(suspects.size)


def _bisect(geom: ChainGeometry, lo: np.ndarray, hi: np.ndarray, f_lo: np.ndarray, tol: float):
    """Vectorized bisection of all brackets at once"""
    lo = lo.copy()
    hi = hi.copy()
    f_lo = f_lo.copy()

    for _ in range(MAX_BISECTIONS):
        width = hi - lo
        if np.all(width < tol):
            break
        mid = 0.5 * (lo + hi)
        # brackets already one ulp wide cannot shrink further
        active = (width >= tol) & (mid > lo) & (mid < hi)
        if not np.any(active):
            break
        M, _ = transfer_product(geom, mid)
        f_mid = M[:, 0, 1]
        left = np.sign(f_mid) == np.sign(f_lo)
        lo = np.where(active & left, mid, lo)
        f_lo = np.where(active & left, f_mid, f_lo)
        hi = np.where(active & ~left, mid, hi)

    z = 0.5 * (lo + hi)
    M, denom = transfer_product(geom, z)
    return z, np.abs(M[:, 0, 1]), denom


def find_spectrum(geom: ChainGeometry, z_min: float, z_max: float,
                  scan_points: int, tol: float = DEFAULT_ROOT_TOL,
                  threshold: float = POLE_THRESHOLD) -> List[SpectralRoot]:
    """
    Locate the roots of f in (z_min, z_max)

    Scans f on a uniform grid, brackets sign changes and bisects each bracket
    to width below tol.

    Args:
        geom: Chain geometry
        z_min: Lower end of the scan, > 0
        z_max: Upper end of the scan
        scan_points: Number of grid points, >= 2
        tol: Final bracket width in z
        threshold: Beam denominator magnitude that flags a pole

    Returns:
        Sorted list of SpectralRoot (family untagged)
    """
    if not (0.0 < z_min < z_max) or not math.isfinite(z_max):
        raise InvalidRange(f"need 0 < z_min < z_max, got ({z_min}, {z_max})")
    if scan_points < 2:
        raise InvalidRange(f"scan_points must be >= 2, got {scan_points}")
    if not tol > 0:
        raise InvalidRange(f"tol must be positive, got {tol}")

    grid = np.linspace(z_min, z_max, scan_points)
    step = (z_max - z_min) / (scan_points - 1)
    values, poles = _scan(geom, grid, threshold)

    if np.any(poles):
        grid, values = _rescan_poles(geom, grid, values, poles, step, threshold)

    suspects = _warn_flat_crossings(grid, values)

    exact = np.flatnonzero(values == 0.0)
    change = np.flatnonzero(np.sign(values[:-1]) * np.sign(values[1:]) < 0)

    roots_z = [grid[exact]]
    residuals = [np.zeros(exact.size)]
    denoms = [transfer_product(geom, grid[exact])[1] if exact.size else np.zeros(0)]

    if change.size:
        z, residual, denom = _bisect(geom, grid[change], grid[change + 1], values[change], tol)
        roots_z.append(z)
        residuals.append(residual)
        denoms.append(denom)

    z_all = np.concatenate(roots_z)
    residual_all = np.concatenate(residuals)
    denom_all = np.concatenate(denoms)
    order = np.argsort(z_all)

    roots = []
    for i in order:
        if residual_all[i] > ROOT_RESIDUAL_LIMIT:
            logger.warning(f"Discarding sign change at z={z_all[i]:.12g}: residual {residual_all[i]:.3e} "
                           f"(pole crossing, not a root)")
            continue
        z = float(z_all[i])
        roots.append(SpectralRoot(
            index=len(roots) + 1,
            z=z,
            lambda_im=z * z,
            residual=float(residual_all[i]),
            min_denominator=float(denom_all[i])
        ))

    logger.info(f"Found {len(roots)} roots in ({z_min}, {z_max}) from {scan_points} scan points"
                f"{f', {suspects} suspected missed pairs' if suspects else ''}")
    return roots


class FamilyClassifier:
    """Tag roots with the asymptotic family whose prediction lies nearest"""

    def __init__(self, geom: ChainGeometry, window: float = CLASSIFICATION_WINDOW,
                 k_max: int = DEFAULT_K_MAX):
        """
        Initialize classifier

        Args:
            geom: Chain geometry defining the 2N families
            window: Acceptance radius as a fraction of the local family spacing
            k_max: Largest family index considered
        """
        self.geom = geom
        self.window = window
        self.k_max = k_max
        self.families = asymptotic_families(geom)

    def classify(self, z: float) -> Dict:
        """
        Nearest prediction in units of local spacing

        Returns:
            Dictionary with family label, k and normalized distance;
            family is None when no prediction lies within the window
        """
        best = None
        for family in self.families:
            k = family.nearest_k(z)
            if k > self.k_max:
                continue
            distance = abs(z - family.predicted_z(k)) / family.spacing(k)
            if best is None or distance < best['distance']:
                best = {'family': family.label, 'k': k, 'distance': distance}

        if best is None or best['distance'] >= self.window:
            return {'family': None, 'k': None, 'distance': best['distance'] if best else math.inf}

        return best

    def batch_classify(self, roots: List[SpectralRoot]) -> List[SpectralRoot]:
        tagged = []
        for root in roots:
            result = self.classify(root.z)
            tagged.append(root.model_copy(update={'family': result['family'], 'family_k': result['k']}))
        return tagged


def classify_roots(geom: ChainGeometry, roots: List[SpectralRoot],
                   k_max: int = DEFAULT_K_MAX) -> List[SpectralRoot]:
    """Assign each root its nearest family prediction, or leave it Unclassified (None)"""
    classifier = FamilyClassifier(geom, k_max=k_max)
    tagged = classifier.batch_classify(roots)
    unclassified = sum(1 for root in tagged if root.family is None)
    logger.info(f"Classified {len(tagged) - unclassified}/{len(tagged)} roots")
    return tagged


def classification_summary(roots: List[SpectralRoot], z_min: float = 20.0) -> Dict:
    """Share of classified roots above z_min, per-family counts, duplicate (family, k) tags"""
    large = [root for root in roots if root.z > z_min]
    classified = [root for root in large if root.family is not None]
    counts = Counter(root.family for root in classified)
    keys = Counter((root.family, root.family_k) for root in classified)
    duplicates = sorted(key for key, count in keys.items() if count > 1)

    return {
        'z_min': z_min,
        'roots_above': len(large),
        'classified_fraction': len(classified) / len(large) if large else math.nan,
        'per_family': dict(sorted(counts.items())),
        'duplicates': duplicates
    }


def _sorted_lambdas(roots: List[SpectralRoot]) -> np.ndarray:
    return np.sort(np.array([root.lambda_im for root in roots], dtype=np.float64))


def generalized_gap(roots: List[SpectralRoot], n_pairs: int) -> float:
    """min over n of lambda_{n+2N} - lambda_n on z^2 values"""
    lam = _sorted_lambdas(roots)
    window = 2 * n_pairs
    if lam.size < window + 1:
        raise InsufficientRoots(f"generalized gap needs at least {window + 1} roots, got {lam.size}")
    return float(np.min(lam[window:] - lam[:-window]))


def simple_gap(roots: List[SpectralRoot]) -> float:
    """min over n of lambda_{n+1} - lambda_n"""
    lam = _sorted_lambdas(roots)
    if lam.size < 2:
        raise InsufficientRoots(f"simple gap needs at least 2 roots, got {lam.size}")
    return float(np.min(np.diff(lam)))
