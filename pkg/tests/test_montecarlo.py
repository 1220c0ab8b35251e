import math
from dataclasses import replace

import numpy as np
import pytest

from probopt.errors import ConfigError
from probopt.harness import presets
from probopt.harness.csvio import summary_csv
from probopt.harness.experiment import ExperimentSpec, ProblemSpec
from probopt.harness.montecarlo import fit_scaling_exponent, run_monte_carlo
from probopt.linesearch import LsConfig
from probopt.oracles import OracleConfig

QUAD = ProblemSpec("quadratic", {"dim": 5, "condition_number": 10.0})
CFG = LsConfig(alpha0=0.2, alpha_max=1.6)


def quad_spec(**kw):
    base = dict(problem=QUAD, algorithm="ls_steepest", cfg=CFG, oracle=OracleConfig(eta=0.5),
                p_grid=(0.7,), eps_grid=(1e-3,), replications=20, master_seed=11)
    base.update(kw)
    return ExperimentSpec(**base)


def test_single_replication():
    (row,) = run_monte_carlo(quad_spec(replications=1))
    assert row.ci_half is None
    assert row.mean_N == row.values[0]
    assert row.replications == 1 and row.nonhits == 0


def test_same_seed_same_csv():
    spec = quad_spec(p_grid=(0.6, 0.9), eps_grid=(1e-2, 1e-4))
    assert summary_csv(run_monte_carlo(spec)) == summary_csv(run_monte_carlo(spec))
    other = summary_csv(run_monte_carlo(replace(spec, master_seed=12)))
    assert other != summary_csv(run_monte_carlo(spec))


def test_exact_models_give_identical_hitting_times():
    (row,) = run_monte_carlo(quad_spec(oracle=OracleConfig(eta=0.0), p_grid=(1.0,), replications=10))
    assert np.all(row.values == row.values[0])
    assert row.std_N == 0.0


def test_rows_cover_grid_in_order():
    rows = run_monte_carlo(quad_spec(p_grid=(0.9, 0.6), eps_grid=(1e-4, 1e-2), replications=3))
    assert [(r.p, r.eps) for r in rows] == [(0.6, 1e-2), (0.6, 1e-4), (0.9, 1e-2), (0.9, 1e-4)]
    assert all(r.bound > r.mean_N for r in rows)


def test_nonhits_excluded():
    spec = quad_spec(cfg=LsConfig(alpha0=0.2, alpha_max=1.6, max_iters=5), replications=4)
    (row,) = run_monte_carlo(spec)
    assert row.nonhits == 4 and math.isnan(row.mean_N)


def test_spec_validation():
    with pytest.raises(ConfigError):
        quad_spec(p_grid=(0.5,))
    with pytest.raises(ConfigError):
        quad_spec(algorithm="arc")
    with pytest.raises(ConfigError):
        quad_spec(eps_grid=())


def test_expectation_lemmas_hold_on_average():
    p = 0.7
    (row,) = run_monte_carlo(quad_spec(p_grid=(p,), replications=200))
    n = row.values.size

    def mean_ci(v):
        v = np.asarray(v, dtype=float)
        return v.mean(), 1.96 * v.std(ddof=1) / math.sqrt(n)

    small, small_ci = mean_ci(row.small_steps)
    assert small - small_ci <= row.mean_N / (2 * p) + row.ci_half
    m1, m1_ci = mean_ci(row.M1)
    m2, m2_ci = mean_ci(row.M2)
    assert m1 - m1_ci <= (1 - p) / p * (m2 + m2_ci)


def test_fit_examples():
    eps = np.geomspace(1e-1, 1e-4, 6)
    fit = fit_scaling_exponent(eps, 3.0 / eps**2)
    assert fit.slope == pytest.approx(2.0) and fit.r2 == pytest.approx(1.0)
    fit = fit_scaling_exponent(eps, 5.0 * np.log(1.0 / eps), model="log")
    assert fit.slope == pytest.approx(5.0) and fit.r2 == pytest.approx(1.0)
    noise = np.random.default_rng(2024).standard_normal(eps.size)
    fit = fit_scaling_exponent(eps, 7.0 / eps**1.5 * (1 + 0.05 * noise))
    assert 1.35 <= fit.slope <= 1.65


def test_fit_errors():
    with pytest.raises(ValueError):
        fit_scaling_exponent([1e-1, 1e-2], [1.0, 2.0])
    with pytest.raises(ValueError):
        fit_scaling_exponent([1e-1, 1e-2, 1e-3], [1.0, 0.0, 2.0])
    with pytest.raises(ValueError):
        fit_scaling_exponent([1e-1, 1e-2, 1e-3], [1.0, 2.0, 3.0], model="cubic")


def test_lemma_suite_specs_are_well_formed():
    specs = presets.lemma_suite(seeds=2)
    assert len(specs) == 6
    assert {s.algorithm for s in specs} == {"ls_steepest", "arc"}
    for s in specs:
        run_monte_carlo(replace(s, replications=2))
