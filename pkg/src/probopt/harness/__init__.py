"""Monte Carlo experiments, process diagnostics and complexity bounds."""

from .diagnostics import ProcessDiagnostics, check_arc_lemmas, check_ls_lemmas, diagnose_trace, process_counts
from .experiment import ExperimentSpec, ProblemSpec, setup
from .montecarlo import HittingTimeStats, ScalingFit, fit_scaling_exponent, run_monte_carlo
from .theory import (
    TheoryConstants,
    complexity_constant,
    compute_C,
    compute_h,
    constants_for,
    progress_cap,
    theoretical_bound,
)

__all__ = [
    "ExperimentSpec", "HittingTimeStats", "ProblemSpec", "ProcessDiagnostics", "ScalingFit", "TheoryConstants",
    "check_arc_lemmas", "check_ls_lemmas", "complexity_constant", "compute_C", "compute_h", "constants_for",
    "diagnose_trace", "fit_scaling_exponent", "process_counts", "progress_cap", "run_monte_carlo", "setup",
    "theoretical_bound",
]
