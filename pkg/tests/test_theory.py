import math

import numpy as np
import pytest

from probopt.arc import ArcConfig
from probopt.errors import ConfigError
from probopt.harness.theory import (
    TheoryConstants,
    complexity_constant,
    compute_C,
    compute_h,
    constants_for,
    log_term,
    probability_factor,
    progress_cap,
    theoretical_bound,
)
from probopt.linesearch import LsConfig, make_general_direction
from probopt.oracles import OracleConfig
from probopt.problems import make_pseudo_huber, make_quadratic, make_rosenbrock


def ls_constants(regime="nonconvex", **kw):
    base = dict(regime=regime, theta=0.5, gamma=0.5, alpha0=0.25, alpha_max=1.0, L=1.0, f0=10.0,
                f_star=0.0, kappa=0.5, mu=0.5, D=2.0)
    base.update(kw)
    return TheoryConstants(**base)


def arc_constants(**kw):
    base = dict(regime="arc", theta=0.3, gamma=0.5, alpha0=1.0, alpha_max=8.0, L=1.0, f0=10.0, f_star=0.0,
                L_H=1.0, kappa_g=0.0, kappa_h=0.0, kappa_theta=0.5, sigma_min=0.125)
    base.update(kw)
    return TheoryConstants(**base)


def test_C_examples():
    assert compute_C("nonconvex", ls_constants()) == pytest.approx(0.5)
    assert compute_C("arc", arc_constants()) == pytest.approx(0.45)


def test_general_descent_identity_reduces_to_steepest():
    obj = make_quadratic(3, 4.0)
    oc = OracleConfig(kappa=0.5)
    plain = constants_for(obj, LsConfig(), oc, "nonconvex")
    ident = constants_for(obj, LsConfig(direction=make_general_direction(np.eye(3))), oc, "nonconvex")
    assert compute_C("nonconvex", plain) == compute_C("nonconvex", ident)


def test_probability_factor():
    assert probability_factor(0.75) == pytest.approx(6.0)
    assert probability_factor(1.0) == pytest.approx(2.0)
    for p in (0.5, 0.3, 1.2):
        with pytest.raises(ConfigError):
            probability_factor(p)
    with pytest.raises(ConfigError):
        theoretical_bound("nonconvex", ls_constants(), 0.5, 1e-3)


def test_nonconvex_eps_homogeneity():
    c = ls_constants()
    lt = log_term(compute_C("nonconvex", c), c.alpha0, c.gamma)
    fac = probability_factor(0.8)
    main = lambda e: theoretical_bound("nonconvex", c, 0.8, e) - fac * lt
    assert main(5e-4) == pytest.approx(4.0 * main(1e-3))


def test_arc_eps_homogeneity():
    c = arc_constants()
    lt = log_term(compute_C("arc", c), c.alpha0, c.gamma)
    fac = probability_factor(0.8)
    main = lambda e: theoretical_bound("arc", c, 0.8, e) - fac * lt
    assert main(1e-3 / 4) == pytest.approx(8.0 * main(1e-3))


def test_log_term_clamped():
    assert log_term(1.0, 0.5, 0.5) == 0.0
    assert log_term(0.125, 1.0, 0.5) == pytest.approx(3.0)


def test_progress_caps():
    c = ls_constants()
    assert progress_cap("nonconvex", c, 1e-3) == 10.0
    assert progress_cap("convex", c, 1e-3) == pytest.approx(1e3)
    assert progress_cap("strongly_convex", c, 1e-3) == pytest.approx(math.log(1e4))
    assert progress_cap("strongly_convex", ls_constants(f0=0.5), 1e-3) == pytest.approx(math.log(1e3))


@pytest.mark.parametrize("regime", ["nonconvex", "convex", "strongly_convex", "arc"])
def test_h_positive_nondecreasing(regime):
    c = arc_constants() if regime == "arc" else ls_constants(regime)
    h = compute_h(regime, c, 1e-3)
    grid = np.geomspace(1e-6, c.alpha_max, 50)
    vals = np.array([h(a) for a in grid])
    assert np.all(vals > 0) and np.all(np.diff(vals) >= 0)


def test_strongly_convex_gate():
    # large mu and theta push C past the admissible range
    c = ls_constants("strongly_convex", mu=50.0, kappa=0.01, theta=0.9, L=0.1, alpha_max=0.5)
    with pytest.raises(ConfigError):
        compute_h("strongly_convex", c, 1e-3)
    with pytest.raises(ConfigError):
        compute_h("strongly_convex", ls_constants("strongly_convex", mu=0.0), 1e-3)


def test_complexity_constant_matches_bound():
    for regime in ("nonconvex", "convex", "arc"):
        c = arc_constants() if regime == "arc" else ls_constants(regime)
        eps = 1e-3
        C = compute_C(regime, c)
        main = progress_cap(regime, c, eps) / compute_h(regime, c, eps)(C)
        rate = {"nonconvex": eps**-2, "convex": eps**-1, "arc": eps**-1.5}[regime]
        assert complexity_constant(regime, c) * rate == pytest.approx(main, rel=1e-12)
    c = ls_constants("strongly_convex")
    C = compute_C("strongly_convex", c)
    assert complexity_constant("strongly_convex", c) == pytest.approx(compute_h("strongly_convex", c, 1e-3)(C))


def test_constants_for_problems():
    q = constants_for(make_quadratic(5, 10.0), LsConfig(), OracleConfig())
    assert q.regime == "strongly_convex" and q.mu == pytest.approx(1.0)
    ph = constants_for(make_pseudo_huber(2), LsConfig(), OracleConfig())
    assert ph.regime == "convex" and ph.D > 0
    rb = constants_for(make_rosenbrock(2), ArcConfig(), OracleConfig())
    assert rb.regime == "arc" and rb.alpha_max == 8.0
    with pytest.raises(ConfigError):
        constants_for(make_rosenbrock(2), LsConfig(), OracleConfig(), "strongly_convex")
