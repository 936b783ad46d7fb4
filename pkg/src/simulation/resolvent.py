"""
Resolvent norm sweep of the damped first-order generator on the energy space
"""
import logging
import math
from typing import Dict, List, Optional, Sequence

import numpy as np
import scipy.linalg
import scipy.sparse.linalg as spla

from config import KERNEL_REL_TOL, RESOLVENT_TOL, TRUST_HORIZON_FRACTION
from ..exceptions import DomainError, SolverFailure
from ..utils.parallel import parallel_map
from .assembly import DiscreteSystem, Variant
from .oracle import largest_frequency

logger = logging.getLogger(__name__)

SVD_SEED = 20240611


class EnergyFactors:
    """
    Factors of the energy inner product on the quotient by the zero modes

    K = Lu^T Lu with Lu = diag(sqrt(lambda)) U^T over the nonzero spectrum of K,
    and M = Cv^T Cv (Cholesky). Energy norms become Euclidean norms of
    (Lu u, Cv v), and the kernel of K drops out.
    """

    def __init__(self, sys: DiscreteSystem, rel_tol: float = KERNEL_REL_TOL):
        eigenvalues, vectors = scipy.linalg.eigh(sys.K.toarray())
        keep = eigenvalues > rel_tol * max(float(eigenvalues[-1]), 1.0)
        root = np.sqrt(eigenvalues[keep])
        self.U = vectors[:, keep]
        self.root = root
        self.Cv = scipy.linalg.cholesky(sys.M.toarray(), lower=False)
        self.rank = int(root.size)
        self.n = sys.n_dofs

    @property
    def dimension(self) -> int:
        return self.rank + self.n

    def lift(self, y: np.ndarray):
        """Preimage (u, v) of energy coordinates y"""
        y_u, y_v = y[:self.rank], y[self.rank:]
        x_u = self.U @ (y_u / self.root)
        x_v = scipy.linalg.solve_triangular(self.Cv, y_v, lower=False)
        return x_u, x_v

    def measure(self, u: np.ndarray, v: np.ndarray) -> np.ndarray:
        return np.concatenate([self.root * (self.U.T @ u), self.Cv @ v])

    def measure_adjoint(self, y: np.ndarray):
        y_u, y_v = y[:self.rank], y[self.rank:]
        return self.U @ (self.root * y_u), self.Cv.T @ y_v

    def lift_adjoint(self, p_u: np.ndarray, p_v: np.ndarray) -> np.ndarray:
        return np.concatenate([(self.U.T @ p_u) / self.root,
                               scipy.linalg.solve_triangular(self.Cv, p_v, lower=False, trans='T')])


def resolvent_norm(sys: DiscreteSystem, beta: float, factors: EnergyFactors,
                   tol: float = RESOLVENT_TOL) -> float:
    """
    Energy-space norm of (i beta - A)^-1

    Each application of the resolvent is one sparse solve with
    K - beta^2 M + i beta D; the largest singular value comes from svds.
    """
    M = sys.M
    D = sys.D
    shifted = (sys.K - beta * beta * M + 1j * beta * D).astype(np.complex128).tocsc()
    try:
        lu = spla.splu(shifted)
    except RuntimeError as e:
        logger.error(f"Shifted generator singular at beta={beta}: {e}")
        raise SolverFailure(f"resolvent solve failed at beta={beta}: {e}") from e

    def matvec(y):
        x_u, x_v = factors.lift(np.asarray(y, dtype=np.complex128).ravel())
        w_u = lu.solve(M @ x_v + 1j * beta * (M @ x_u) + D @ x_u)
        w_v = 1j * beta * w_u - x_u
        return factors.measure(w_u, w_v)

    def rmatvec(q):
        a_u, a_v = factors.measure_adjoint(np.asarray(q, dtype=np.complex128).ravel())
        r = lu.solve(a_u - 1j * beta * a_v, trans='H')
        p_v = M @ r
        p_u = -1j * beta * (M @ r) + D @ r - a_v
        return factors.lift_adjoint(p_u, p_v)

    dim = factors.dimension
    operator = spla.LinearOperator((dim, dim), matvec=matvec, rmatvec=rmatvec, dtype=np.complex128)
    rng = np.random.default_rng(SVD_SEED)
    v0 = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)

    try:
        singular = spla.svds(operator, k=1, tol=tol, v0=v0, return_singular_vectors=False)
    except (spla.ArpackNoConvergence, spla.ArpackError) as e:
        logger.error(f"Resolvent SVD failed at beta={beta}: {e}")
        raise SolverFailure(f"resolvent SVD failed at beta={beta}: {e}") from e

    norm = float(np.max(singular))
    if not math.isfinite(norm):
        raise SolverFailure(f"non-finite resolvent norm at beta={beta}")
    return norm


def trust_horizon(sys: DiscreteSystem) -> float:
    """Largest beta the mesh resolves: a fixed fraction of the top discrete frequency"""
    return TRUST_HORIZON_FRACTION * largest_frequency(sys)


def beta_grid(beta_min: float, beta_max: float, count: int) -> List[float]:
    """Log-spaced sweep points"""
    if not (0.0 < beta_min < beta_max) or count < 2:
        raise DomainError(f"invalid beta range ({beta_min}, {beta_max}) with {count} points")
    return np.geomspace(beta_min, beta_max, count).tolist()


def resolvent_norm_sweep(sys: DiscreteSystem, betas: Sequence[float],
                         horizon: Optional[float] = None,
                         max_workers: Optional[int] = None) -> List[Dict]:
    """
    Resolvent norms over a list of frequencies

    Args:
        sys: Damped discrete system (P1 or P2)
        betas: Positive frequencies
        horizon: Trust horizon; computed from the mesh when omitted

    Returns:
        Rows with beta, norm and norm_over_beta
    """
    if sys.variant == Variant.PC:
        raise DomainError("the conservative generator has spectrum on the imaginary axis")
    if not betas or any(not b > 0 for b in betas):
        raise DomainError("betas must be a non-empty list of positive values")

    horizon = trust_horizon(sys) if horizon is None else horizon
    beyond = [b for b in betas if b > horizon]
    if beyond:
        logger.warning(f"{len(beyond)} betas exceed the trust horizon {horizon:.4g}; "
                       f"those norms measure the mesh")

    factors = EnergyFactors(sys)
    logger.info(f"Resolvent sweep over {len(betas)} betas, energy space dimension {factors.dimension}")

    norms = parallel_map(lambda b: resolvent_norm(sys, b, factors), list(betas),
                         max_workers=max_workers, desc="resolvent")

    return [{'beta': float(b), 'norm': n, 'norm_over_beta': n / b} for b, n in zip(betas, norms)]


def sweep_summary(rows: List[Dict], beta_lo: float = 10.0) -> Dict:
    """
    Boundedness indicators for norm/beta on [beta_lo, max beta]

    Returns:
        max/median ratio, the log-log slope of norm/beta over the last dyadic
        window and whether norm/beta rises at every step of that window
    """
    selected = sorted((row for row in rows if row['beta'] >= beta_lo), key=lambda row: row['beta'])
    if len(selected) < 2:
        return {'count': len(selected), 'max_over_median': math.nan,
                'last_window_slope': math.nan, 'last_window_monotone_growth': False}

    ratios = np.array([row['norm_over_beta'] for row in selected])
    betas = np.array([row['beta'] for row in selected])
    last = betas >= betas[-1] / 2.0
    slope = math.nan
    monotone = False
    if np.sum(last) >= 2:
        slope = float(np.polyfit(np.log(betas[last]), np.log(ratios[last]), 1)[0])
        monotone = bool(np.sum(last) >= 3 and np.all(np.diff(ratios[last]) > 0.0))

    return {
        'count': len(selected),
        'max_over_median': float(np.max(ratios) / np.median(ratios)),
        'last_window_slope': slope,
        'last_window_monotone_growth': monotone
    }
