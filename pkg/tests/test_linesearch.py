import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from probopt.errors import ConfigError, DomainExitError, NonFiniteError
from probopt.harness.theory import compute_C, constants_for, theoretical_bound
from probopt.linesearch import (
    LsConfig,
    StoppingRule,
    armijo_check,
    make_general_direction,
    run_linesearch,
    run_ls_fully_linear,
)
from probopt.oracles import OracleConfig
from probopt.problems import Objective, make_pseudo_huber, make_quadratic, make_rosenbrock
from probopt.rng import stream

EXACT = OracleConfig(eta=0.0)


def half_square():
    return Objective(
        name="half_square",
        dim=1,
        value=lambda x: 0.5 * float(x @ x),
        grad=lambda x: np.array(x, dtype=float),
        hess=lambda x: np.eye(1),
        lip_grad=1.0,
        f_star=0.0,
        x0=np.array([1.0]),
        convexity="strongly_convex",
        strong_mu=1.0,
    )


def test_armijo_examples():
    g = np.array([1.0])
    assert armijo_check(0.5, 0.125, 0.5, 0.5, g)
    assert not armijo_check(0.5, 0.5, 0.5, 0.5, g)
    assert armijo_check(0.5, 0.5, 0.5, 0.5, np.zeros(1))


def test_armijo_general_direction():
    g = np.array([1.0, 0.0])
    d = -g
    assert armijo_check(1.0, 0.74, 0.5, 0.5, g, d)
    assert not armijo_check(1.0, 0.76, 0.5, 0.5, g, d)


def test_general_direction_examples():
    ident = make_general_direction(np.eye(3))
    assert ident.beta == ident.kappa1 == ident.kappa2 == 1.0
    g = np.array([0.3, -1.0, 2.0])
    np.testing.assert_array_equal(ident(g), -g)

    T = make_general_direction(np.diag([1.0, 4.0]))
    assert T.beta == pytest.approx(0.25)
    g = np.array([1.0, 0.0])
    d = T(g)
    np.testing.assert_array_equal(d, [-1.0, 0.0])
    assert d @ g / (np.linalg.norm(d) * np.linalg.norm(g)) <= -T.beta
    g = np.array([0.0, 1.0])
    assert np.linalg.norm(T(g)) == pytest.approx(T.kappa2 * np.linalg.norm(g))


@settings(max_examples=200, deadline=None)
@given(st.lists(st.floats(-100, 100), min_size=2, max_size=2).filter(lambda v: np.hypot(*v) > 1e-6))
def test_general_direction_conditions(v):
    T = make_general_direction([np.diag([1.0, 4.0]), np.array([[2.0, 0.5], [0.5, 1.5]])])
    g = np.array(v)
    for k in range(2):
        d = T(g, k)
        gn, dn = np.linalg.norm(g), np.linalg.norm(d)
        assert d @ g <= -T.beta * dn * gn * (1 - 1e-12)
        assert T.kappa1 * gn * (1 - 1e-12) <= dn <= T.kappa2 * gn * (1 + 1e-12)


def test_general_direction_rejects_non_pd():
    with pytest.raises(ValueError):
        make_general_direction(np.diag([1.0, -1.0]))
    with pytest.raises(ValueError):
        make_general_direction(np.array([[1.0, 2.0], [0.0, 1.0]]))


def test_config_validation():
    with pytest.raises(ConfigError):
        LsConfig(gamma=1.0)
    with pytest.raises(ConfigError):
        LsConfig(alpha0=2.0, alpha_max=1.0)
    with pytest.raises(ConfigError):
        StoppingRule(0.0)
    with pytest.raises(ConfigError):
        StoppingRule(1e-3, event="bogus")


def test_already_converged_gives_zero():
    obj = make_quadratic(3, 5.0)
    gn = np.linalg.norm(obj.grad(obj.x0))
    tr = run_linesearch(obj, EXACT, LsConfig(), StoppingRule(gn * 1.01), stream(0))
    assert tr.n_eps == 0
    assert len(tr) == 0


def test_small_steps_always_succeed_with_exact_models():
    obj = half_square()
    for kappa in (0.1, 0.5, 2.0):
        cfg = LsConfig(theta=0.5, alpha0=1.5, alpha_max=3.0)
        ocfg = OracleConfig(kappa=kappa, eta=0.0)
        C = compute_C("nonconvex", constants_for(obj, cfg, ocfg, "nonconvex"))
        assert C == pytest.approx(0.5 / (0.5 + kappa))
        tr = run_linesearch(obj, ocfg, cfg, StoppingRule(1e-10), stream(1))
        alpha, succ = tr.columns["alpha"], tr.columns["is_successful"]
        assert np.all(succ[alpha <= C])


def test_pseudo_huber_exact_run_within_bound():
    obj = make_pseudo_huber(2)
    cfg = LsConfig(alpha0=0.25, alpha_max=2.0)
    tr = run_linesearch(obj, EXACT, cfg, StoppingRule(1e-6, "fgap"), stream(2))
    assert tr.n_eps is not None
    f = tr.columns["f"]
    assert np.all(np.diff(f) <= 0)
    c = constants_for(obj, cfg, EXACT, "convex")
    assert tr.n_eps <= theoretical_bound("convex", c, 1.0, 1e-6)


def test_step_size_updates():
    obj = make_rosenbrock(2)
    cfg = LsConfig(alpha0=2.0**-8, alpha_max=2.0**-2)
    tr = run_linesearch(obj, OracleConfig(p=0.7, eta=0.5), cfg, StoppingRule(1e-2), stream(3))
    a, s = tr.columns["alpha"], tr.columns["is_successful"]
    assert a[0] == cfg.alpha0
    expect = np.where(s[:-1], np.minimum(cfg.alpha_max, a[:-1] / cfg.gamma), a[:-1] * cfg.gamma)
    np.testing.assert_allclose(a[1:], expect, rtol=1e-15)
    f = tr.columns["f"]
    assert np.all(np.diff(f) <= 0)
    assert np.all(np.diff(f)[~s[:-1]] == 0)


def test_general_direction_run_reaches_tolerance():
    obj = make_quadratic(2, 10.0)
    cfg = LsConfig(alpha0=0.05, alpha_max=0.4, direction=make_general_direction(np.diag([1.0, 4.0])))
    tr = run_linesearch(obj, OracleConfig(p=0.8, eta=0.5), cfg, StoppingRule(1e-6), stream(4))
    assert tr.n_eps is not None
    assert tr.algorithm == "ls_general"


def test_hold_model_matches_classical_backtracking():
    obj = make_quadratic(4, 20.0, seed=3)
    cfg = LsConfig(theta=0.3, alpha0=0.5, alpha_max=1.0, hold_model_on_failure=True)
    tr = run_linesearch(obj, EXACT, cfg, StoppingRule(1e-8), stream(5))

    x = obj.x0.copy()
    alpha, gamma = cfg.alpha0, cfg.gamma
    seen = []
    for _ in range(len(tr)):
        g = obj.grad(x)
        seen.append(alpha)
        xt = x - alpha * g
        if obj.value(xt) <= obj.value(x) - cfg.theta * alpha * g @ g:
            x, alpha = xt, min(cfg.alpha_max, alpha / gamma)
        else:
            alpha *= gamma
    np.testing.assert_allclose(tr.columns["alpha"], seen)
    np.testing.assert_allclose(tr.x_final, x, rtol=1e-12)


def test_nonfinite_aborts():
    obj = half_square()
    blow = Objective(**{**obj.__dict__, "value": lambda x: math.inf if abs(x[0]) < 0.5 else 0.5 * x[0] ** 2})
    with pytest.raises(NonFiniteError):
        run_linesearch(blow, EXACT, LsConfig(alpha0=0.5, alpha_max=1.0), StoppingRule(1e-6), stream(6))


def test_domain_exit_raises():
    obj = half_square()
    obj = Objective(**{**obj.__dict__, "domain_box": np.array([[0.5, 2.0]])})
    with pytest.raises(DomainExitError):
        run_linesearch(obj, EXACT, LsConfig(alpha0=0.25, alpha_max=1.0), StoppingRule(1e-6), stream(7))


def test_fully_linear_first_step_is_shrink():
    obj = make_quadratic(3, 5.0)
    cfg = LsConfig(xi0=1e6, kappa_delta=2.0)
    tr = run_ls_fully_linear(obj, EXACT, cfg, StoppingRule(1e-6), stream(8))
    shrink = tr.columns["shrink"].astype(bool)
    xi = tr.columns["xi"]
    assert shrink[0]
    assert xi[1] == pytest.approx(xi[0] / 2.0)
    assert tr.columns["f"][1] == tr.columns["f"][0]
    assert np.all(np.diff(xi) <= 0)
    # shrink steps leave alpha unchanged
    a = tr.columns["alpha"]
    assert np.all(a[1:][shrink[:-1]] == a[:-1][shrink[:-1]])


def test_fully_linear_shrink_count_matches_geometry():
    obj = make_quadratic(3, 5.0)
    gn = np.linalg.norm(obj.grad(obj.x0))
    xi0, kd = 1e6, 2.0
    tr = run_ls_fully_linear(obj, EXACT, LsConfig(xi0=xi0, kappa_delta=kd), StoppingRule(1e-6), stream(9))
    lead = int(np.argmin(tr.columns["shrink"].astype(bool)))
    # with exact models the gate opens once kd * xi <= ||grad f(x0)||
    assert lead == math.ceil(math.log(xi0 / (gn / kd)) / math.log(kd))
    assert tr.n_eps is not None
