"""
Finite element model, time integration, oracle, resolvent sweep and decay fit
"""
from .assembly import (
    DiscreteSystem,
    EdgeMesh,
    Variant,
    discretize,
    interpolate,
    interpolate_to_mesh,
    stiffness_kernel,
    zero_mode_matrix,
)
from .decay import DecayFit, fit_polynomial_decay
from .integrator import (
    EnergyTrace,
    MidpointIntegrator,
    State,
    dissipation_rate,
    energy,
    graph_norm,
    initial_state,
    project_out_zero_modes,
    simulate,
    step,
)
from .oracle import discrete_eigenpairs, largest_frequency, oracle_spectrum_discrete, richardson_spectrum
from .resolvent import beta_grid, resolvent_norm_sweep, sweep_summary, trust_horizon

__all__ = [
    "DiscreteSystem",
    "EdgeMesh",
    "Variant",
    "discretize",
    "interpolate",
    "interpolate_to_mesh",
    "stiffness_kernel",
    "zero_mode_matrix",
    "DecayFit",
    "fit_polynomial_decay",
    "EnergyTrace",
    "MidpointIntegrator",
    "State",
    "dissipation_rate",
    "energy",
    "graph_norm",
    "initial_state",
    "project_out_zero_modes",
    "simulate",
    "step",
    "discrete_eigenpairs",
    "largest_frequency",
    "oracle_spectrum_discrete",
    "richardson_spectrum",
    "beta_grid",
    "resolvent_norm_sweep",
    "sweep_summary",
    "trust_horizon",
]
