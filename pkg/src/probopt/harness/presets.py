"""Standard experiment scenarios used by ``verify`` and the acceptance suite.

Step-parameter grids are chosen so that ``alpha_max`` (or ``1/sigma_min``) is
``alpha0`` times a power of ``1/gamma``; the process diagnostics need every
step parameter on that grid.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..arc import ArcConfig
from ..linesearch import LsConfig
from ..oracles import OracleConfig
from .experiment import ExperimentSpec, ProblemSpec

QUADRATIC = ProblemSpec("quadratic", {"dim": 5, "condition_number": 10.0})
PSEUDO_HUBER = ProblemSpec("pseudo_huber", {"dim": 2})
ROSENBROCK = ProblemSpec("rosenbrock", {"dim": 2})

# Spectrum on [1e-6, 1] with the start spread so that every eigen-direction
# carries comparable gradient mass; on such problems first-order methods show
# their worst-case tolerance dependence over several decades.
POWER_LAW = {"dim": 20, "condition_number": 1e6, "smallest_eigenvalue": 1e-6,
             "start_decay": 0.5, "start_scale": 1e3}
POWER_LAW_FLAT_START = {"dim": 20, "condition_number": 1e6, "smallest_eigenvalue": 1e-6, "start_decay": 0.0}
POWER_LAW_SMALL = dict(POWER_LAW, dim=6)

LS_CFG = {
    "quadratic": LsConfig(alpha0=0.2, alpha_max=1.6),
    "pseudo_huber": LsConfig(alpha0=0.25, alpha_max=2.0),
    "rosenbrock": LsConfig(alpha0=2.0**-8, alpha_max=2.0**-2),
}
ARC_CFG = ArcConfig(sigma0=1.0, sigma_min=0.125)
ORACLE = OracleConfig(kappa=1.0, kappa_g=1.0, kappa_h=1.0, eta=0.5)
EXACT = OracleConfig(eta=0.0)

BOUND_P = (0.6, 0.75, 0.9, 1.0)
LEMMA_P = (0.6, 0.8, 1.0)
P_DEPENDENCE = (0.55, 0.6, 0.7, 0.8, 0.9, 1.0)
PROBLEMS = {"quadratic": QUADRATIC, "pseudo_huber": PSEUDO_HUBER, "rosenbrock": ROSENBROCK}


def _ls(problem: str, p_grid, eps_grid, replications, **kw) -> ExperimentSpec:
    return ExperimentSpec(PROBLEMS[problem], "ls_steepest", LS_CFG[problem], ORACLE,
                          tuple(p_grid), tuple(eps_grid), replications, **kw)


def _arc(problem: ProblemSpec, p_grid, eps_grid, replications, **kw) -> ExperimentSpec:
    return ExperimentSpec(problem, "arc", ARC_CFG, ORACLE, tuple(p_grid), tuple(eps_grid), replications, **kw)


def lemma_suite(seeds: int = 30, p_grid=LEMMA_P, eps: float = 1e-3) -> list[ExperimentSpec]:
    """Both algorithms on all three problems with iteration-level checks enabled."""
    specs = [_ls(name, p_grid, (eps,), seeds, check_lemmas=True) for name in PROBLEMS]
    specs += [_arc(prob, p_grid, (eps,), seeds, check_lemmas=True) for prob in PROBLEMS.values()]
    return specs


def bound_cells(replications: int = 200, eps: float = 1e-3) -> dict[str, ExperimentSpec]:
    """Scenarios compared against the expected hitting-time bound."""
    return {
        "ls quadratic (strongly convex)": _ls("quadratic", BOUND_P, (eps,), replications),
        "ls pseudo-Huber (convex)": _ls("pseudo_huber", BOUND_P, (eps,), replications),
        "ls Rosenbrock (nonconvex)": _ls("rosenbrock", BOUND_P, (eps,), replications),
        "arc quadratic": _arc(QUADRATIC, BOUND_P, (eps,), replications),
        "arc Rosenbrock": _arc(ROSENBROCK, BOUND_P, (eps,), replications),
    }


@dataclass(frozen=True)
class ScalingCase:
    spec: ExperimentSpec
    model: str
    low: float
    high: float | None
    min_r2: float | None = None


def scaling_cases(replications: int = 200, p: float = 0.8) -> dict[str, ScalingCase]:
    """Tolerance-scaling experiments with their target slope ranges."""
    ls = LsConfig(alpha0=0.25, alpha_max=1.0)
    nonconvex = ExperimentSpec(ProblemSpec("quadratic", POWER_LAW), "ls_steepest", ls, ORACLE, (p,),
                               tuple(np.geomspace(0.3, 0.003, 5)), replications, regime="nonconvex")
    convex = ExperimentSpec(ProblemSpec("quadratic", POWER_LAW_FLAT_START), "ls_steepest", ls, ORACLE, (p,),
                            tuple(np.geomspace(1e-2, 1e-4, 5)), replications, regime="convex")
    strongly = _ls("quadratic", (p,), tuple(np.geomspace(1e-1, 1e-8, 8)), replications)
    arc_rosen = _arc(ROSENBROCK, (p,), tuple(np.geomspace(1e-1, 1e-3, 5)), replications)
    arc_power = _arc(ProblemSpec("quadratic", POWER_LAW_SMALL), (p,), tuple(np.geomspace(1e-1, 1e-3, 5)),
                     replications)
    return {
        "nonconvex line search": ScalingCase(nonconvex, "power", 1.6, 2.4),
        "convex line search": ScalingCase(convex, "power", 0.6, 1.4),
        "arc Rosenbrock": ScalingCase(arc_rosen, "power", 1.1, 1.9),
        "arc power-law quadratic": ScalingCase(arc_power, "power", 1.1, 1.9),
        "strongly convex line search": ScalingCase(strongly, "log", 0.0, None, min_r2=0.9),
    }


def p_dependence(replications: int = 200, eps: float = 1e-3) -> ExperimentSpec:
    return _ls("quadratic", P_DEPENDENCE, (eps,), replications)


def adaptive_pairs(eps: float = 1e-3, xi0: float = 100.0, kappa_delta: float = 2.0):
    """(problem, fixed-accuracy spec, adaptive-radius spec) triples with exact models."""
    out = []
    for name in ("quadratic", "rosenbrock"):
        base = LS_CFG[name]
        cfg = LsConfig(gamma=base.gamma, theta=base.theta, alpha0=base.alpha0, alpha_max=base.alpha_max,
                       xi0=xi0, kappa_delta=kappa_delta)
        fixed = ExperimentSpec(PROBLEMS[name], "ls_steepest", cfg, EXACT, (1.0,), (eps,), 1, regime="nonconvex")
        adapt = ExperimentSpec(PROBLEMS[name], "ls_fully_linear", cfg, EXACT, (1.0,), (eps,), 1,
                               regime="nonconvex")
        out.append((f"ls {name}", fixed, adapt))
    for name in ("quadratic", "rosenbrock"):
        cfg = ArcConfig(sigma0=ARC_CFG.sigma0, sigma_min=ARC_CFG.sigma_min, xi0=xi0, kappa_delta=kappa_delta)
        fixed = ExperimentSpec(PROBLEMS[name], "arc", cfg, EXACT, (1.0,), (eps,), 1)
        adapt = ExperimentSpec(PROBLEMS[name], "arc_fully_quadratic", cfg, EXACT, (1.0,), (eps,), 1)
        out.append((f"arc {name}", fixed, adapt))
    return out
