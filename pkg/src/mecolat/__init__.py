"""Latency-minimal joint communication/computation resource allocation
for multi-user TDMA edge offloading."""

from .channel import (ChannelStats, TransmissionTrace, expected_rate,
                      instantaneous_rate, mean_snr, simulate_transmission)
from .closed_form import DualState, solve_edge, solve_local, solve_partial_special
from .delay import (Allocation, DelayBreakdown, INFINITE_DELAY, edge_delay,
                    local_delay, optimal_lambda, optimal_partial_delay,
                    partial_delay, special_case)
from .errors import BracketingError, ConvergenceError, SolverError, ValidationError
from .oracle import GridSpec, KktReport, kkt_residuals, oracle_allocation, oracle_lambda
from .scenario import (DeviceProfile, Scenario, SystemParams, load_scenario,
                       sample_scenario, save_scenario, scenario_hash,
                       table2_scenario, validate_scenario)
# The sub-gradient vector itself stays at mecolat.subgradient.subgradient
# so the module attribute is not shadowed by the function.
from .subgradient import (ConvexityReport, SolverConfig, SolverReport,
                          convexity_diagnostics, objective, solve)

__version__ = "0.1.0"

__all__ = [
    "Allocation", "BracketingError", "ChannelStats", "ConvergenceError",
    "ConvexityReport", "DelayBreakdown", "DeviceProfile", "DualState",
    "GridSpec", "INFINITE_DELAY", "KktReport", "Scenario", "SolverConfig",
    "SolverError", "SolverReport", "SystemParams", "TransmissionTrace",
    "ValidationError", "convexity_diagnostics", "edge_delay", "expected_rate",
    "instantaneous_rate", "kkt_residuals", "load_scenario", "local_delay",
    "mean_snr", "objective", "optimal_lambda", "optimal_partial_delay",
    "oracle_allocation", "oracle_lambda", "partial_delay", "sample_scenario",
    "save_scenario", "scenario_hash", "simulate_transmission", "solve",
    "solve_edge", "solve_local", "solve_partial_special", "special_case",
    "table2_scenario", "validate_scenario",
]
