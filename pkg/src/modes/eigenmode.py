"""
Eigenfunction reconstruction from characteristic roots
"""
import logging
import math
from typing import Dict, List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict

from config import (
    EDGE_CONDITION_LIMIT,
    EXP_BASIS_THRESHOLD,
    NULLITY_TOL,
    QUADRATURE_PANELS,
    QUADRATURE_POINTS,
    MODE_RESIDUAL_LIMIT,
    ROOT_RESIDUAL_LIMIT,
)
from ..chain.geometry import ChainGeometry, EdgeKind
from ..exceptions import IllConditionedEdgeSolve, NotARoot
from ..spectrum.transfer import char_fn, propagate_node_vectors
from ..utils.parallel import parallel_map

logger = logging.getLogger(__name__)


class EdgeModeCoeffs(BaseModel):
    """
    Closed-form coefficients of phi on one edge

    Strings: basis 'trig', coeffs (a, b) for a sin(z^2 x) + b cos(z^2 x).
    Beams: basis 'hyperbolic', coeffs (p, q, r, s) over sin, cos, sinh, cosh of z x,
    or basis 'exponential' with r, s multiplying e^{z(x-l)} and e^{-zx}.
    """

    model_config = ConfigDict(frozen=True)

    edge: int
    kind: EdgeKind
    basis: str
    z: float
    length: float
    coeffs: Tuple[float, ...]

    def evaluate(self, x, derivative: int = 0) -> np.ndarray:
        """phi or one of its derivatives at x"""
        x = np.asarray(x, dtype=np.float64)
        shift = derivative * math.pi / 2.0

        if self.kind == EdgeKind.STRING:
            a, b = self.coeffs
            w = self.z * self.z
            return w ** derivative * (a * np.sin(w * x + shift) + b * np.cos(w * x + shift))

        p, q, r, s = self.coeffs
        z = self.z
        trig = p * np.sin(z * x + shift) + q * np.cos(z * x + shift)

        if self.basis == "hyperbolic":
            even = derivative % 2 == 0
            growing = r * (np.sinh(z * x) if even else np.cosh(z * x))
            growing += s * (np.cosh(z * x) if even else np.sinh(z * x))
            return z ** derivative * (trig + growing)

        exps = r * np.exp(z * (x - self.length)) + s * (-1.0) ** derivative * np.exp(-z * x)
        return z ** derivative * (trig + exps)

    def scaled(self, factor: float) -> "EdgeModeCoeffs":
        return self.model_copy(update={'coeffs': tuple(factor * c for c in self.coeffs)})


class Eigenmode(BaseModel):
    """Normalized eigenfunction of the conservative chain"""

    model_config = ConfigDict(frozen=True)

    z: float
    per_edge: List[EdgeModeCoeffs]
    node_values: List[float]
    node_slopes_beam: List[Tuple[float, float]]
    residuals: Dict[str, float]
    seminorm_scale: float

    @property
    def n_pairs(self) -> int:
        return len(self.per_edge) // 2

    def max_residual(self) -> float:
        return max(self.residuals.values())


def _beam_basis(z: float, l: float, threshold: float) -> str:
    return "exponential" if z * l > threshold else "hyperbolic"


def _beam_condition_rows(z: float, l: float, basis: str) -> np.ndarray:
    """Rows phi(0), phi'''(0)/z^3, phi''(0)/z^2, phi''(l)/z^2 in the chosen basis"""
    sn = math.sin(z * l)
    cs = math.cos(z * l)
    if basis == "hyperbolic":
        return np.array([
            [0.0, 1.0, 0.0, 1.0],
            [-1.0, 0.0, 1.0, 0.0],
            [0.0, -1.0, 0.0, 1.0],
            [-sn, -cs, math.sinh(z * l), math.cosh(z * l)],
        ])
    e = math.exp(-z * l)
    return np.array([
        [0.0, 1.0, e, 1.0],
        [-1.0, 0.0, e, -1.0],
        [0.0, -1.0, e, 1.0],
        [-sn, -cs, 1.0, e],
    ])


def _solve_beam(edge: int, z: float, l: float, start: np.ndarray, threshold: float) -> EdgeModeCoeffs:
    basis = _beam_basis(z, l, threshold)
    A = _beam_condition_rows(z, l, basis)
    condition = float(np.linalg.cond(A))
    if not np.isfinite(condition) or condition > EDGE_CONDITION_LIMIT:
        logger.error(f"Edge {edge} solve ill-conditioned at z={z}: cond={condition:.3e}")
        raise IllConditionedEdgeSolve(edge, condition)

    rhs = np.array([start[0], start[1], 0.0, 0.0])
    coeffs = np.linalg.solve(A, rhs)
    return EdgeModeCoeffs(edge=edge, kind=EdgeKind.BEAM, basis=basis, z=z, length=l,
                          coeffs=tuple(float(c) for c in coeffs))


def _gauss_legendre_integral(func, l: float, panels: int) -> float:
    nodes, weights = np.polynomial.legendre.leggauss(QUADRATURE_POINTS)
    edges = np.linspace(0.0, l, panels + 1)
    half = 0.5 * np.diff(edges)
    mids = 0.5 * (edges[:-1] + edges[1:])
    x = (mids[:, None] + half[:, None] * nodes[None, :]).ravel()
    w = (half[:, None] * weights[None, :]).ravel()
    return float(np.sum(w * func(x)))


def v_seminorm_squared(per_edge: List[EdgeModeCoeffs]) -> float:
    """Sum of string integrals of phi'^2 and beam integrals of phi''^2"""
    total = 0.0
    for coeffs in per_edge:
        if coeffs.kind == EdgeKind.STRING:
            order, freq = 1, coeffs.z * coeffs.z
        else:
            order, freq = 2, coeffs.z
        panels = max(QUADRATURE_PANELS, int(math.ceil(2.0 * freq * coeffs.length)))
        total += _gauss_legendre_integral(lambda x: coeffs.evaluate(x, order) ** 2, coeffs.length, panels)
    return total


def mode_residuals(geom: ChainGeometry, per_edge: List[EdgeModeCoeffs]) -> Dict[str, float]:
    """
    Residuals of every boundary and transmission condition

    Values are in node-vector units: displacements as is, string slopes over
    z^2, beam moments over z^2, shear forces over z^3.
    """
    z = per_edge[0].z
    n = geom.n_pairs
    ends = [(c.evaluate(0.0), c.evaluate(c.length)) for c in per_edge]

    residuals = {
        'clamped_start': abs(float(ends[0][0])),
        'clamped_end': abs(float(ends[-1][1])),
    }

    moments = []
    for j in range(1, n + 1):
        beam = per_edge[2 * j - 1]
        moments.append(abs(float(beam.evaluate(0.0, 2))) / z ** 2)
        moments.append(abs(float(beam.evaluate(beam.length, 2))) / z ** 2)
    residuals['free_moments'] = max(moments)

    residuals['continuity'] = max(abs(float(ends[j][1] - ends[j + 1][0])) for j in range(2 * n - 1))

    forces = []
    for j in range(1, n + 1):
        string = per_edge[2 * j - 2]
        beam = per_edge[2 * j - 1]
        forces.append(abs(float(beam.evaluate(0.0, 3) + string.evaluate(string.length, 1))) / z ** 3)
    residuals['force_string_to_beam'] = max(forces)

    forces = [0.0]
    for j in range(1, n):
        beam = per_edge[2 * j - 1]
        string = per_edge[2 * j]
        forces.append(abs(float(beam.evaluate(beam.length, 3) + string.evaluate(0.0, 1))) / z ** 3)
    residuals['force_beam_to_string'] = max(forces)

    return residuals


def edge_coefficients(geom: ChainGeometry, z: float, seed: Tuple[float, float] = (0.0, 1.0),
                      threshold: float = EXP_BASIS_THRESHOLD) -> List[EdgeModeCoeffs]:
    """Unnormalized per-edge coefficients from node vectors propagated out of V_1(0) = seed"""
    vectors = propagate_node_vectors(geom, z, seed)
    per_edge = []

    for j, (start, _) in enumerate(vectors, start=1):
        l = geom.length(j)
        if geom.kind(j) == EdgeKind.STRING:
            # V(0) = (b, a) for a sin + b cos in (phi, phi'/z^2) units
            per_edge.append(EdgeModeCoeffs(edge=j, kind=EdgeKind.STRING, basis="trig", z=z, length=l,
                                           coeffs=(float(start[1]), float(start[0]))))
        else:
            per_edge.append(_solve_beam(j, z, l, start, threshold))

    return per_edge


def build_eigenmode(geom: ChainGeometry, z: float, tol: float = ROOT_RESIDUAL_LIMIT,
                    threshold: float = EXP_BASIS_THRESHOLD) -> Eigenmode:
    """
    Reconstruct the eigenfunction for a refined root z

    Seeds V_1(0) = (0, 1), propagates node vectors, solves each edge for its
    coefficients, then rescales to unit V-seminorm.

    Args:
        geom: Chain geometry
        z: Refined root of the characteristic function
        tol: Largest admissible |f(z)|
        threshold: z*l above which beams switch to the scaled exponential basis

    Returns:
        Eigenmode with residuals of all boundary and transmission conditions

    Raises:
        NotARoot, IllConditionedEdgeSolve
    """
    residual = abs(char_fn(geom, z))
    if residual > tol:
        raise NotARoot(z, residual)

    per_edge = edge_coefficients(geom, z, (0.0, 1.0), threshold)
    scale = 1.0 / math.sqrt(v_seminorm_squared(per_edge))
    per_edge = [coeffs.scaled(scale) for coeffs in per_edge]

    node_values = [float(c.evaluate(c.length)) for c in per_edge[:-1]]
    node_slopes = [(float(c.evaluate(0.0, 1)), float(c.evaluate(c.length, 1)))
                   for c in per_edge if c.kind == EdgeKind.BEAM]

    residuals = mode_residuals(geom, per_edge)
    worst = max(residuals.values())
    if worst > MODE_RESIDUAL_LIMIT:
        logger.warning(f"Mode at z={z:.12g} has condition residual {worst:.3e}")

    return Eigenmode(
        z=z,
        per_edge=per_edge,
        node_values=node_values,
        node_slopes_beam=node_slopes,
        residuals=residuals,
        seminorm_scale=scale
    )


def node_trace_sum(mode: Eigenmode) -> float:
    """Sum of phi_j(l_j)^2 over the 2N-1 interior nodes"""
    return float(sum(value * value for value in mode.node_values))


def node_trace_sum_p2(mode: Eigenmode) -> float:
    """node_trace_sum plus beam slopes squared at x=0 (all beams) and x=l (all but the last)"""
    total = node_trace_sum(mode)
    n = len(mode.node_slopes_beam)
    for j, (slope_start, slope_end) in enumerate(mode.node_slopes_beam, start=1):
        total += slope_start * slope_start
        if j < n:
            total += slope_end * slope_end
    return float(total)


def sample_mode(mode: Eigenmode, points_per_edge: int = 101) -> List[Dict]:
    """Rows (edge, kind, x, phi) on a uniform grid per edge"""
    rows = []
    for coeffs in mode.per_edge:
        x = np.linspace(0.0, coeffs.length, points_per_edge)
        phi = coeffs.evaluate(x)
        rows.extend({'edge': coeffs.edge, 'kind': coeffs.kind.value, 'x': float(xi), 'phi': float(pi)}
                    for xi, pi in zip(x, phi))
    return rows


def edge_values(mode: Eigenmode, edge: int, x, derivative: int = 0) -> np.ndarray:
    """phi_edge or its derivative at x"""
    return mode.per_edge[edge - 1].evaluate(x, derivative)


def condition_matrix(geom: ChainGeometry, z: float,
                     threshold: float = EXP_BASIS_THRESHOLD) -> np.ndarray:
    """
    Square 6N x 6N map from all edge coefficients to all conditions

    Column order: (a, b) per string, (p, q, r, s) per beam. Columns are
    normalized to unit length; nullity is unaffected.
    """
    n = geom.n_pairs
    offsets = []
    col = 0
    for j in range(1, geom.edge_count + 1):
        offsets.append(col)
        col += 2 if geom.kind(j) == EdgeKind.STRING else 4

    def basis_row(j: int, x: float, derivative: int) -> np.ndarray:
        """Row of phi_j^(derivative)(x) / z^scale over edge j's coefficients"""
        l = geom.length(j)
        row = np.zeros(col)
        if geom.kind(j) == EdgeKind.STRING:
            size = 2
            unit = [EdgeModeCoeffs(edge=j, kind=EdgeKind.STRING, basis="trig", z=z, length=l, coeffs=e)
                    for e in ((1.0, 0.0), (0.0, 1.0))]
            scale = z ** (2 * derivative)
        else:
            size = 4
            basis = _beam_basis(z, l, threshold)
            unit = [EdgeModeCoeffs(edge=j, kind=EdgeKind.BEAM, basis=basis, z=z, length=l,
                                   coeffs=tuple(float(i == k) for i in range(4))) for k in range(4)]
            scale = z ** derivative
        for k in range(size):
            row[offsets[j - 1] + k] = float(unit[k].evaluate(x, derivative)) / scale
        return row

    rows = [basis_row(1, 0.0, 0), basis_row(geom.edge_count, geom.length(geom.edge_count), 0)]

    for j in range(1, n + 1):
        rows.append(basis_row(2 * j, 0.0, 2))
        rows.append(basis_row(2 * j, geom.length(2 * j), 2))

    for j in range(1, geom.edge_count):
        rows.append(basis_row(j, geom.length(j), 0) - basis_row(j + 1, 0.0, 0))

    # shear over z^3 against string slope over z^2, hence the 1/z
    for j in range(1, n + 1):
        rows.append(basis_row(2 * j, 0.0, 3) + basis_row(2 * j - 1, geom.length(2 * j - 1), 1) / z)
    for j in range(1, n):
        rows.append(basis_row(2 * j, geom.length(2 * j), 3) + basis_row(2 * j + 1, 0.0, 1) / z)

    matrix = np.vstack(rows)
    norms = np.linalg.norm(matrix, axis=0)
    return matrix / np.where(norms > 0.0, norms, 1.0)


def multiplicity_check(geom: ChainGeometry, z: float, strict: bool = False,
                       tol: float = ROOT_RESIDUAL_LIMIT, nullity_tol: float = NULLITY_TOL) -> int:
    """
    Numerical dimension of the eigenspace at z

    Counts singular values of the full condition matrix below
    nullity_tol times the largest. Off the spectrum the count is 0.
    The relative cut resolves a shift off a root only at the
    ROOT_RESIDUAL_LIMIT scale; shifts near DEFAULT_ROOT_TOL still
    count as roots.

    Args:
        strict: Raise NotARoot instead of returning 0 when |f(z)| > tol
    """
    if strict:
        residual = abs(char_fn(geom, z))
        if residual > tol:
            raise NotARoot(z, residual)

    singular = np.linalg.svd(condition_matrix(geom, z), compute_uv=False)
    nullity = int(np.sum(singular < nullity_tol * singular[0]))
    logger.debug(f"Multiplicity at z={z:.12g}: {nullity} (smallest singular value {singular[-1]:.3e})")
    return nullity


def build_eigenmodes(geom: ChainGeometry, roots: List[float], tol: float = ROOT_RESIDUAL_LIMIT,
                     max_workers: Optional[int] = None) -> List[Eigenmode]:
    """Modes for many roots, one task per root"""
    return parallel_map(lambda z: build_eigenmode(geom, z, tol), roots, max_workers=max_workers)
