"""Steady-state covariance simulator for multi-pump parametric circuits."""

__version__ = "0.1.0"

from .core import (
    CovarianceMatrix,
    ModeSet,
    TwoModeMetrics,
    check_physical,
    load_covariance,
    log_negativity,
    partial_trace,
    purity,
    save_covariance,
    symplectic_eigenvalues,
    symplectic_form,
)
from .dynamics import (
    DriftDiffusion,
    GaussianChannel,
    MeasurementMatrix,
    SteadyStateResult,
    ThresholdExceededError,
    assemble_drift_diffusion,
    attenuator_channel,
    dual_map,
    effective_measurement,
    riccati_rhs,
    scenario_metrics,
    solve_lyapunov_steady,
    solve_riccati_steady,
)
from .graph import (
    AdjacencyMatrix,
    HamiltonianMatrix,
    PumpTone,
    adjacency_to_hamiltonian,
    build_asymmetric_adjacency,
    build_symmetric_adjacency,
    enumerate_tms_pairs,
    export_graph_dot,
    standard_mode_set,
    symmetric_pump_positions,
)
