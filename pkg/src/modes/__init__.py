"""
Eigenfunctions of the conservative chain and its zero eigenspace
"""
from .eigenmode import (
    EdgeModeCoeffs,
    Eigenmode,
    build_eigenmode,
    build_eigenmodes,
    edge_values,
    multiplicity_check,
    node_trace_sum,
    node_trace_sum_p2,
    sample_mode,
)
from .zero_modes import ZeroMode, ZeroModeBasis, satisfies_zero_problem, v_form, zero_eigenspace

__all__ = [
    "EdgeModeCoeffs",
    "Eigenmode",
    "build_eigenmode",
    "build_eigenmodes",
    "edge_values",
    "multiplicity_check",
    "node_trace_sum",
    "node_trace_sum_p2",
    "sample_mode",
    "ZeroMode",
    "ZeroModeBasis",
    "satisfies_zero_problem",
    "v_form",
    "zero_eigenspace",
]
