"""Line search and adaptive cubic regularization with probabilistically accurate models."""

from .arc import ArcConfig, run_arc, run_arc_fully_quadratic
from .cubic import CubicStep, CubicSubproblem, solve_cubic, verify_step_conditions
from .errors import (
    ConfigError,
    DomainExitError,
    LemmaViolation,
    MalformedTraceError,
    NonFiniteError,
    SolverError,
)
from .linesearch import LsConfig, StoppingRule, make_general_direction, run_linesearch, run_ls_fully_linear
from .oracles import (
    BatchGradientOracle,
    FiniteDifferenceOracle,
    FullyLinearOracle,
    FullyQuadraticOracle,
    LinearOracle,
    OracleConfig,
    QuadraticOracle,
)
from .problems import (
    FiniteSumObjective,
    Objective,
    make_finite_sum,
    make_pseudo_huber,
    make_quadratic,
    make_rosenbrock,
)
from .rng import stream
from .trace import IterationRecord, Trace

__all__ = [
    "ArcConfig", "BatchGradientOracle", "ConfigError", "CubicStep", "CubicSubproblem", "DomainExitError",
    "FiniteDifferenceOracle", "FiniteSumObjective", "FullyLinearOracle", "FullyQuadraticOracle",
    "IterationRecord", "LemmaViolation", "LinearOracle", "LsConfig", "MalformedTraceError", "NonFiniteError",
    "Objective", "OracleConfig", "QuadraticOracle", "SolverError", "StoppingRule", "Trace",
    "make_finite_sum", "make_general_direction", "make_pseudo_huber", "make_quadratic", "make_rosenbrock",
    "run_arc", "run_arc_fully_quadratic", "run_linesearch", "run_ls_fully_linear", "solve_cubic", "stream",
    "verify_step_conditions",
]
