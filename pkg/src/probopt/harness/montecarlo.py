"""Seeded Monte Carlo estimation of expected hitting times."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy import stats

from ..errors import ConfigError, LemmaViolation
from ..rng import stream
from .diagnostics import check_arc_lemmas, check_ls_lemmas, diagnose_trace, hard
from .experiment import ExperimentSpec, setup
from .theory import theoretical_bound

Z95 = float(stats.norm.ppf(0.975))


@dataclass
class HittingTimeStats:
    """Aggregates for one ``(p, eps)`` cell.

    Non-hitting replications are excluded from ``mean_N`` and counted in
    ``nonhits``. ``ci_half`` is the 95% normal-approximation half-width and is
    None when it is undefined (fewer than two hits).
    """

    p: float
    eps: float
    replications: int
    mean_N: float
    std_N: float
    ci_half: float | None
    bound: float
    nonhits: int
    values: np.ndarray = field(repr=False, default=None)
    small_steps: np.ndarray = field(repr=False, default=None)
    M1: np.ndarray = field(repr=False, default=None)
    M2: np.ndarray = field(repr=False, default=None)
    soft_violations: int = 0

    @property
    def ci_upper(self) -> float:
        return self.mean_N + (self.ci_half or 0.0)

    @property
    def ci_lower(self) -> float:
        return self.mean_N - (self.ci_half or 0.0)


def _summarize(p, eps, values, bound, extra) -> HittingTimeStats:
    hit = np.array([v for v in values if v is not None], dtype=float)
    n = hit.size
    mean = float(hit.mean()) if n else math.nan
    std = float(hit.std(ddof=1)) if n > 1 else (0.0 if n == 1 else math.nan)
    half = Z95 * std / math.sqrt(n) if n > 1 else None
    return HittingTimeStats(
        p=p, eps=eps, replications=len(values), mean_N=mean, std_N=std, ci_half=half,
        bound=bound, nonhits=len(values) - n, values=hit, **extra,
    )


def run_monte_carlo(spec: ExperimentSpec) -> list[HittingTimeStats]:
    """Run every replication of every ``p`` and aggregate per ``(p, eps)``.

    Replication ``r`` at grid position ``i`` of ``p_grid`` uses the stream
    ``stream(master_seed, i, r)``. All tolerances are read off the same run, so
    cells sharing ``p`` use common random numbers.

    Raises:
        LemmaViolation: If ``spec.check_lemmas`` and a per-realization
            inequality fails; the message names ``p`` and the replication.
    """
    st = setup(spec)
    eps_grid = tuple(sorted(set(float(e) for e in spec.eps_grid), reverse=True))
    rows = []
    for i, p in enumerate(spec.p_grid):
        if not 0.5 < p <= 1.0:
            raise ConfigError("p must lie in (1/2, 1]")
        hits = {e: [] for e in eps_grid}
        small = {e: [] for e in eps_grid}
        m1 = {e: [] for e in eps_grid}
        m2 = {e: [] for e in eps_grid}
        soft = 0
        for r in range(spec.replications):
            trace = st.run(p, stream(spec.master_seed, i, r), eps_grid)
            where = f"p={p}, replication={r}, seed key=({spec.master_seed}, {i}, {r})"
            if spec.check_lemmas:
                if st.regime == "arc":
                    with warnings.catch_warnings():
                        warnings.simplefilter("ignore")
                        found = check_arc_lemmas(trace, st.obj, st.constants)
                else:
                    found = check_ls_lemmas(trace, st.obj, st.constants)
                soft += len(found) - len(hard(found))
                if hard(found):
                    raise LemmaViolation(f"{where}: " + "; ".join(map(str, hard(found))))
            for e in eps_grid:
                hits[e].append(trace.hits[e])
                d = diagnose_trace(trace, st.constants, e)
                if spec.check_lemmas and d.violations:
                    raise LemmaViolation(f"{where}, eps={e}: " + "; ".join(map(str, d.violations)))
                small[e].append(d.small_steps)
                m1[e].append(d.M1)
                m2[e].append(d.M2)
        for e in eps_grid:
            bound = theoretical_bound(st.regime, st.constants, p, e)
            extra = dict(small_steps=np.array(small[e]), M1=np.array(m1[e]), M2=np.array(m2[e]),
                         soft_violations=soft)
            rows.append(_summarize(p, e, hits[e], bound, extra))
    rows.sort(key=lambda s: (s.p, -s.eps))
    return rows


@dataclass(frozen=True)
class ScalingFit:
    slope: float
    intercept: float
    r2: float


def fit_scaling_exponent(eps_grid, means, model: str = "power") -> ScalingFit:
    """Least-squares fit of mean hitting times against the tolerance.

    ``power``: ``log(mean)`` against ``log(1/eps)``, slope is the exponent.
    ``log``: ``mean`` against ``log(1/eps)``.
    """
    eps = np.asarray(eps_grid, dtype=float)
    y = np.asarray(means, dtype=float)
    if eps.size < 3 or eps.size != y.size:
        raise ValueError("need at least three (eps, mean) pairs")
    if np.any(y <= 0) or np.any(eps <= 0):
        raise ValueError("tolerances and means must be positive")
    x = np.log(1.0 / eps)
    if model == "power":
        y = np.log(y)
    elif model != "log":
        raise ValueError(f"unknown model {model!r}")
    res = stats.linregress(x, y)
    return ScalingFit(float(res.slope), float(res.intercept), float(res.rvalue**2))
