"""
Discrete spectral oracle: shift-invert generalized eigenproblem K x = mu M x
"""
import logging
import math
from typing import List, Tuple

import numpy as np
import scipy.sparse.linalg as spla

from config import ZERO_EIGEN_REL_TOL
from ..chain.geometry import ChainGeometry
from ..exceptions import DomainError, EigSolverFailure
from .assembly import DiscreteSystem, Variant, discretize

logger = logging.getLogger(__name__)


def discrete_eigenpairs(sys: DiscreteSystem, count: int) -> Tuple[np.ndarray, np.ndarray]:
    """
    Smallest positive generalized eigenpairs of the stiffness/mass pencil

    The N-1 kernel eigenvalues are requested along with the rest and dropped.

    Returns:
        (mu, vectors) with M-normalized eigenvectors as columns

    Raises:
        EigSolverFailure
    """
    nullity = sys.geom.n_pairs - 1
    requested = count + nullity
    if count < 1 or requested >= sys.n_dofs - 1:
        raise EigSolverFailure(f"cannot compute {count} eigenvalues from {sys.n_dofs} DOFs")

    try:
        mu, vectors = spla.eigsh(sys.K.tocsc(), k=requested, M=sys.M.tocsc(), sigma=-1.0, which='LM')
    except (spla.ArpackNoConvergence, spla.ArpackError, RuntimeError) as e:
        logger.error(f"Shift-invert eigensolve failed: {e}")
        raise EigSolverFailure(str(e)) from e

    order = np.argsort(mu)
    mu = mu[order]
    vectors = vectors[:, order]
    keep = mu > ZERO_EIGEN_REL_TOL * max(1.0, float(mu[-1]))
    dropped = int(np.sum(~keep))
    if dropped != nullity:
        logger.warning(f"Dropped {dropped} near-zero eigenvalues, expected {nullity}")

    mu = mu[keep][:count]
    vectors = vectors[:, keep][:, :count]
    if mu.size < count:
        raise EigSolverFailure(f"only {mu.size} positive eigenvalues converged, {count} requested")

    mass_norms = np.sqrt(np.einsum('ij,ij->j', vectors, sys.M @ vectors))
    return mu, vectors / mass_norms


def oracle_spectrum_discrete(sys: DiscreteSystem, count: int) -> List[float]:
    """sqrt(mu) for the smallest count positive eigenvalues, comparable to root z^2"""
    if sys.variant != Variant.PC:
        raise DomainError(f"discrete oracle needs the conservative variant, got {sys.variant.value}")
    mu, _ = discrete_eigenpairs(sys, count)
    return np.sqrt(mu).tolist()


def richardson_spectrum(geom: ChainGeometry, h: float, count: int) -> List[float]:
    """
    Oracle at h and h/2 with one Richardson step on mu

    Assumes the O(h^2) error of the linear string elements dominates.
    """
    coarse = np.square(oracle_spectrum_discrete(discretize(geom, h, Variant.PC), count))
    fine = np.square(oracle_spectrum_discrete(discretize(geom, h / 2.0, Variant.PC), count))
    extrapolated = (4.0 * fine - coarse) / 3.0
    return np.sqrt(extrapolated).tolist()


def largest_frequency(sys: DiscreteSystem) -> float:
    """sqrt of the largest eigenvalue of the pencil"""
    try:
        mu = spla.eigsh(sys.K.tocsc(), k=1, M=sys.M.tocsc(), which='LM', return_eigenvectors=False)
    except (spla.ArpackNoConvergence, spla.ArpackError) as e:
        logger.error(f"Largest eigenvalue solve failed: {e}")
        raise EigSolverFailure(str(e)) from e
    return math.sqrt(float(mu[0]))
