"""Experiment descriptors and single-run dispatch."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Any

import numpy as np

from ..arc import ArcConfig, run_arc, run_arc_fully_quadratic
from ..errors import ConfigError
from ..linesearch import LsConfig, StoppingRule, run_linesearch, run_ls_fully_linear
from ..oracles import (
    BatchGradientOracle,
    FiniteDifferenceOracle,
    FullyLinearOracle,
    FullyQuadraticOracle,
    LinearOracle,
    OracleConfig,
    QuadraticOracle,
)
from ..problems import (
    FiniteSumObjective,
    Objective,
    make_finite_sum,
    make_pseudo_huber,
    make_quadratic,
    make_rosenbrock,
)
from ..trace import Trace
from .theory import TheoryConstants, constants_for

ALGORITHMS = ("ls_steepest", "ls_general", "ls_fully_linear", "arc", "arc_fully_quadratic")
ORACLE_MODELS = ("default", "finite_difference", "batch")
# Accuracy constant delivered by Chebyshev-sized batches; see BatchGradientOracle.
BATCH_KAPPA = 2.0


@dataclass(frozen=True)
class ProblemSpec:
    """Problem name plus builder keyword arguments."""

    name: str
    params: dict[str, Any] = field(default_factory=dict)

    def build(self) -> Objective | FiniteSumObjective:
        try:
            return self._build()
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"cannot build {self.name}: {exc}") from exc

    def _build(self) -> Objective | FiniteSumObjective:
        kw = dict(self.params)
        if self.name == "quadratic":
            return make_quadratic(kw.pop("dim", 5), kw.pop("condition_number", 10.0), kw.pop("seed", 0), **kw)
        if self.name == "pseudo_huber":
            return make_pseudo_huber(kw.pop("dim", 2), **kw)
        if self.name == "rosenbrock":
            return make_rosenbrock(kw.pop("dim", 2), kw.pop("domain_box", None), **kw)
        if self.name == "finite_sum":
            return make_finite_sum(kw.pop("dim", 5), kw.pop("num_terms", 20), kw.pop("heterogeneity", 1.0),
                                   kw.pop("seed", 0), **kw)
        raise ConfigError(f"unknown problem {self.name!r}")


@dataclass(frozen=True)
class ExperimentSpec:
    """A Monte Carlo experiment over a ``(p, eps)`` grid.

    Attributes:
        problem: Problem descriptor.
        algorithm: One of ``ALGORITHMS``.
        cfg: Line-search or ARC configuration.
        oracle: Oracle configuration; its ``p`` is replaced by each grid value.
        p_grid: Accuracy probabilities, each in (1/2, 1].
        eps_grid: Tolerances. All of them are read off the same run.
        replications: Runs per ``p``.
        master_seed: Seed from which every run's stream is derived.
        regime: Line-search regime; defaults to the problem's convexity class.
        oracle_model: ``default``, ``finite_difference`` (fully linear line
            search) or ``batch`` (subsampled gradients of a finite sum).
        check_lemmas: Also run the iteration-level lemma checks.
    """

    problem: ProblemSpec
    algorithm: str
    cfg: LsConfig | ArcConfig
    oracle: OracleConfig
    p_grid: tuple[float, ...]
    eps_grid: tuple[float, ...]
    replications: int = 200
    master_seed: int = 0
    regime: str | None = None
    oracle_model: str = "default"
    check_lemmas: bool = False

    def __post_init__(self):
        if self.algorithm not in ALGORITHMS:
            raise ConfigError(f"unknown algorithm {self.algorithm!r}")
        if self.oracle_model not in ORACLE_MODELS:
            raise ConfigError(f"unknown oracle model {self.oracle_model!r}")
        if not self.p_grid or any(not 0.5 < p <= 1.0 for p in self.p_grid):
            raise ConfigError("p_grid entries must lie in (1/2, 1]")
        if not self.eps_grid or any(e <= 0 for e in self.eps_grid):
            raise ConfigError("eps_grid entries must be positive")
        if self.replications < 1:
            raise ConfigError("replications must be positive")
        is_arc = self.algorithm.startswith("arc")
        if is_arc != isinstance(self.cfg, ArcConfig):
            raise ConfigError(f"{self.algorithm} needs a {'ArcConfig' if is_arc else 'LsConfig'}")
        if self.algorithm == "ls_general" and self.cfg.direction is None:
            raise ConfigError("ls_general needs a direction transform")
        if self.algorithm != "ls_general" and not is_arc and self.cfg.direction is not None:
            raise ConfigError("direction transforms are only used by ls_general")


@dataclass
class Setup:
    """Built objects shared by all runs of an experiment."""

    spec: ExperimentSpec
    obj: Objective
    source: Objective | FiniteSumObjective
    regime: str
    constants: TheoryConstants

    def oracle(self, p: float):
        spec = self.spec
        ocfg = replace(spec.oracle, p=p)
        if spec.algorithm in ("ls_steepest", "ls_general"):
            if spec.oracle_model == "batch":
                if not isinstance(self.source, FiniteSumObjective):
                    raise ConfigError("batch oracles need a finite_sum problem")
                return BatchGradientOracle(self.source, p, kappa=BATCH_KAPPA)
            return LinearOracle(ocfg)
        if spec.algorithm == "ls_fully_linear":
            if spec.oracle_model == "finite_difference":
                return FiniteDifferenceOracle(ocfg)
            return FullyLinearOracle(ocfg)
        if spec.algorithm == "arc":
            return QuadraticOracle(ocfg)
        return FullyQuadraticOracle(ocfg)

    def run(self, p: float, rng: np.random.Generator, eps_grid=None) -> Trace:
        spec = self.spec
        eps = tuple(spec.eps_grid if eps_grid is None else eps_grid)
        oracle = self.oracle(p)
        if spec.algorithm == "arc":
            return run_arc(self.obj, oracle, spec.cfg, eps, rng)
        if spec.algorithm == "arc_fully_quadratic":
            return run_arc_fully_quadratic(self.obj, oracle, spec.cfg, eps, rng)
        stop = StoppingRule.for_regime(self.regime, eps)
        if spec.algorithm == "ls_fully_linear":
            return run_ls_fully_linear(self.obj, oracle, spec.cfg, stop, rng)
        return run_linesearch(self.obj, oracle, spec.cfg, stop, rng)


def setup(spec: ExperimentSpec) -> Setup:
    source = spec.problem.build()
    obj = source.aggregate if isinstance(source, FiniteSumObjective) else source
    if spec.algorithm.startswith("arc"):
        regime = "arc"
        if spec.regime not in (None, "arc"):
            raise ConfigError("ARC experiments use the arc regime")
    else:
        regime = spec.regime or obj.convexity
    kappa = BATCH_KAPPA if spec.oracle_model == "batch" else None
    constants = constants_for(obj, spec.cfg, spec.oracle, None if regime == "arc" else regime, kappa=kappa)
    return Setup(spec, obj, source, regime, constants)
