"""
Finite element assembly: linear elements on strings, cubic Hermite elements on beams
"""
import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, List, Optional, Tuple, Union

import numpy as np
import scipy.linalg
import scipy.sparse as sp

from config import KERNEL_REL_TOL, MIN_ELEMENTS_PER_EDGE, VARIANTS
from ..chain.geometry import ChainGeometry, EdgeKind
from ..exceptions import MeshTooCoarse
from ..modes.eigenmode import Eigenmode
from ..modes.zero_modes import ZeroMode, ZeroModeBasis, zero_eigenspace

logger = logging.getLogger(__name__)


class Variant(str, Enum):
    """Boundary feedback configuration"""

    P1 = "P1"
    P2 = "P2"
    PC = "Pc"


@dataclass(frozen=True)
class EdgeMesh:
    """Nodes of one edge and the global DOFs attached to them (-1 = eliminated)"""

    edge: int
    kind: EdgeKind
    x: np.ndarray
    w_dofs: np.ndarray
    theta_dofs: Optional[np.ndarray] = None

    @property
    def element_count(self) -> int:
        return self.x.size - 1


@dataclass(frozen=True)
class DiscreteSystem:
    """Assembled mass, stiffness and damping operators of one variant"""

    geom: ChainGeometry
    h: float
    variant: Variant
    edges: List[EdgeMesh]
    n_dofs: int
    M: sp.csr_matrix
    K: sp.csr_matrix
    D: sp.csr_matrix
    damped_terms: List[Tuple[str, int]] = field(default_factory=list)

    def zero_vector(self) -> np.ndarray:
        return np.zeros(self.n_dofs)


def string_element(length: float) -> Tuple[np.ndarray, np.ndarray]:
    """Linear element stiffness and consistent mass"""
    k = np.array([[1.0, -1.0], [-1.0, 1.0]]) / length
    m = length / 6.0 * np.array([[2.0, 1.0], [1.0, 2.0]])
    return k, m


def beam_element(length: float) -> Tuple[np.ndarray, np.ndarray]:
    """Hermite element stiffness and consistent mass, DOF order (w1, theta1, w2, theta2)"""
    L = length
    k = np.array([
        [12.0, 6.0 * L, -12.0, 6.0 * L],
        [6.0 * L, 4.0 * L ** 2, -6.0 * L, 2.0 * L ** 2],
        [-12.0, -6.0 * L, 12.0, -6.0 * L],
        [6.0 * L, 2.0 * L ** 2, -6.0 * L, 4.0 * L ** 2],
    ]) / L ** 3
    m = L / 420.0 * np.array([
        [156.0, 22.0 * L, 54.0, -13.0 * L],
        [22.0 * L, 4.0 * L ** 2, 13.0 * L, -3.0 * L ** 2],
        [54.0, 13.0 * L, 156.0, -22.0 * L],
        [-13.0 * L, -3.0 * L ** 2, -22.0 * L, 4.0 * L ** 2],
    ])
    return k, m


def _number_dofs(geom: ChainGeometry, h: float) -> Tuple[List[EdgeMesh], int]:
    """Junction displacements are shared, beam slopes stay on their beam, clamped ends are dropped"""
    edges = []
    counter = 0
    junction = -1

    for j in range(1, geom.edge_count + 1):
        l = geom.length(j)
        elements = int(math.ceil(l / h - 1e-9))
        if elements < MIN_ELEMENTS_PER_EDGE:
            raise MeshTooCoarse(j, elements, MIN_ELEMENTS_PER_EDGE)

        x = np.linspace(0.0, l, elements + 1)
        w = np.empty(elements + 1, dtype=np.int64)
        w[0] = junction
        w[1:-1] = np.arange(counter, counter + elements - 1)
        counter += elements - 1

        if j == geom.edge_count:
            w[-1] = -1
        else:
            w[-1] = counter
            junction = counter
            counter += 1

        theta = None
        if geom.kind(j) == EdgeKind.BEAM:
            theta = np.arange(counter, counter + elements + 1)
            counter += elements + 1

        edges.append(EdgeMesh(edge=j, kind=geom.kind(j), x=x, w_dofs=w, theta_dofs=theta))

    return edges, counter


def _scatter(rows: list, cols: list, vals: list, dofs: np.ndarray, local: np.ndarray):
    for a, ga in enumerate(dofs):
        if ga < 0:
            continue
        for b, gb in enumerate(dofs):
            if gb < 0:
                continue
            rows.append(ga)
            cols.append(gb)
            vals.append(local[a, b])


def _damped_terms(edges: List[EdgeMesh], variant: Variant) -> List[Tuple[str, int]]:
    """Velocity traces at interior nodes, plus beam end slopes for P2"""
    if variant == Variant.PC:
        return []

    terms = []
    for mesh in edges[:-1]:
        terms.append((f"node_{mesh.edge}", int(mesh.w_dofs[-1])))

    if VARIANTS[variant.value]['damped_slopes']:
        beams = [mesh for mesh in edges if mesh.kind == EdgeKind.BEAM]
        for mesh in beams:
            terms.append((f"slope_start_{mesh.edge}", int(mesh.theta_dofs[0])))
        for mesh in beams[:-1]:
            terms.append((f"slope_end_{mesh.edge}", int(mesh.theta_dofs[-1])))

    return terms


def discretize(geom: ChainGeometry, h: float, variant: Variant) -> DiscreteSystem:
    """
    Assemble the finite element model of one variant

    Args:
        geom: Chain geometry
        h: Target element size; every edge gets ceil(l/h) elements
        variant: P1, P2 or Pc

    Returns:
        DiscreteSystem with sparse M, K, D

    Raises:
        MeshTooCoarse: if an edge would get fewer than the minimum elements
    """
    variant = Variant(variant)
    if not h > 0:
        raise MeshTooCoarse(0, 0, MIN_ELEMENTS_PER_EDGE)

    edges, n_dofs = _number_dofs(geom, h)
    k_rows, k_cols, k_vals = [], [], []
    m_rows, m_cols, m_vals = [], [], []

    for mesh in edges:
        for e in range(mesh.element_count):
            length = mesh.x[e + 1] - mesh.x[e]
            if mesh.kind == EdgeKind.STRING:
                k_loc, m_loc = string_element(length)
                dofs = np.array([mesh.w_dofs[e], mesh.w_dofs[e + 1]])
            else:
                k_loc, m_loc = beam_element(length)
                dofs = np.array([mesh.w_dofs[e], mesh.theta_dofs[e],
                                 mesh.w_dofs[e + 1], mesh.theta_dofs[e + 1]])
            _scatter(k_rows, k_cols, k_vals, dofs, k_loc)
            _scatter(m_rows, m_cols, m_vals, dofs, m_loc)

    shape = (n_dofs, n_dofs)
    K = sp.coo_matrix((k_vals, (k_rows, k_cols)), shape=shape).tocsr()
    M = sp.coo_matrix((m_vals, (m_rows, m_cols)), shape=shape).tocsr()

    terms = _damped_terms(edges, variant)
    damped = [dof for _, dof in terms]
    D = sp.coo_matrix((np.ones(len(damped)), (damped, damped)), shape=shape).tocsr()

    logger.info(f"Assembled {variant.value} system: {n_dofs} DOFs, h={h}, "
                f"{sum(m.element_count for m in edges)} elements, {len(terms)} damped traces")

    return DiscreteSystem(geom=geom, h=h, variant=variant, edges=edges, n_dofs=n_dofs,
                          M=M, K=K, D=D, damped_terms=terms)


def interpolate(sys: DiscreteSystem,
                value_fn: Callable[[int, np.ndarray], np.ndarray],
                slope_fn: Optional[Callable[[int, np.ndarray], np.ndarray]] = None) -> np.ndarray:
    """
    Nodal interpolant of a function given edge by edge

    Args:
        sys: Discrete system
        value_fn: (edge, x) -> displacement values
        slope_fn: (edge, x) -> slopes, evaluated on beams only; zero when omitted

    Returns:
        Displacement DOF vector
    """
    u = sys.zero_vector()
    for mesh in sys.edges:
        values = np.asarray(value_fn(mesh.edge, mesh.x), dtype=np.float64)
        free = mesh.w_dofs >= 0
        u[mesh.w_dofs[free]] = values[free]
        if mesh.theta_dofs is not None and slope_fn is not None:
            u[mesh.theta_dofs] = np.asarray(slope_fn(mesh.edge, mesh.x), dtype=np.float64)
    return u


def interpolate_to_mesh(sys: DiscreteSystem, mode: Union[ZeroMode, Eigenmode]) -> np.ndarray:
    """Nodal values and beam slopes of an exact zero mode or eigenmode"""
    if isinstance(mode, Eigenmode):
        return interpolate(sys,
                           lambda edge, x: mode.per_edge[edge - 1].evaluate(x),
                           lambda edge, x: mode.per_edge[edge - 1].evaluate(x, 1))
    return interpolate(sys,
                       lambda edge, x: np.array([mode.value(edge, xi) for xi in x]),
                       lambda edge, x: np.full(x.shape, mode.slope(edge)))


def zero_mode_matrix(sys: DiscreteSystem, basis: Optional[ZeroModeBasis] = None) -> np.ndarray:
    """Columns are interpolants of the exact zero modes (n_dofs x (N-1))"""
    basis = basis or zero_eigenspace(sys.geom)
    if not basis.modes:
        return np.zeros((sys.n_dofs, 0))
    return np.column_stack([interpolate_to_mesh(sys, mode) for mode in basis.modes])


def stiffness_kernel(sys: DiscreteSystem, rel_tol: float = KERNEL_REL_TOL) -> dict:
    """
    Numerical kernel of K and its distance from the exact zero modes

    Returns:
        Dictionary with nullity, kernel basis and the worst relative M-norm
        error of projecting each exact zero mode onto the kernel
    """
    eigenvalues, vectors = scipy.linalg.eigh(sys.K.toarray())
    cutoff = rel_tol * max(abs(eigenvalues[-1]), 1.0)
    kernel = vectors[:, eigenvalues < cutoff]
    nullity = kernel.shape[1]

    Z = zero_mode_matrix(sys)
    M = sys.M
    worst = 0.0
    if nullity and Z.shape[1]:
        gram = kernel.T @ (M @ kernel)
        for col in Z.T:
            coeffs = np.linalg.solve(gram, kernel.T @ (M @ col))
            diff = col - kernel @ coeffs
            worst = max(worst, math.sqrt(diff @ (M @ diff)) / math.sqrt(col @ (M @ col)))
    elif Z.shape[1]:
        worst = 1.0

    logger.info(f"Stiffness nullity {nullity}, expected {sys.geom.n_pairs - 1}, kernel match {worst:.2e}")
    return {'nullity': nullity, 'basis': kernel, 'match_error': worst}
