"""Adaptive cubic regularization driven by random second-order models.

Each iteration minimizes the cubic model globally, compares actual and
predicted decrease through ``rho`` and either accepts the step (decreasing
``sigma`` by ``gamma`` down to ``sigma_min``) or rejects it (increasing
``sigma`` by ``1/gamma``). The harness sees the step parameter ``1/sigma``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .cubic import CubicSubproblem, solve_cubic
from .errors import ConfigError, DomainExitError, NonFiniteError
from .oracles import FullyQuadraticOracle, OracleConfig, QuadraticOracle
from .problems import Objective
from .rng import stream
from .trace import Trace, TraceBuilder


@dataclass(frozen=True)
class ArcConfig:
    """ARC parameters.

    Attributes:
        gamma: Regularization update factor in (0, 1).
        theta: Acceptance threshold for ``rho`` in (0, 1).
        sigma_min: Lower bound on ``sigma``.
        sigma0: Initial ``sigma``, above ``sigma_min``.
        kappa_theta: Relative tolerance of the subproblem stopping rule.
        max_iters: Iteration cap.
        kappa_delta: Radius shrink factor (adaptive-radius variant only).
        xi0: Initial radius parameter (adaptive-radius variant only).
    """

    gamma: float = 0.5
    theta: float = 0.1
    sigma_min: float = 0.125
    sigma0: float = 1.0
    kappa_theta: float = 0.5
    max_iters: int = 1_000_000
    kappa_delta: float = 2.0
    xi0: float = 1.0

    def __post_init__(self):
        if not 0 < self.gamma < 1:
            raise ConfigError("gamma must lie in (0, 1)")
        if not 0 < self.theta < 1:
            raise ConfigError("theta must lie in (0, 1)")
        if not 0 < self.kappa_theta < 1:
            raise ConfigError("kappa_theta must lie in (0, 1)")
        if not 0 < self.sigma_min < self.sigma0:
            raise ConfigError("need 0 < sigma_min < sigma0")
        if self.max_iters < 1:
            raise ConfigError("max_iters must be positive")
        if self.kappa_delta <= 1:
            raise ConfigError("kappa_delta must exceed 1")
        if self.xi0 <= 0:
            raise ConfigError("xi0 must be positive")


def rho(f_x: float, f_trial: float, model_decrease: float) -> float:
    """Ratio of actual to predicted decrease."""
    if not model_decrease > 0:
        raise ValueError("model decrease must be positive")
    return (f_x - f_trial) / model_decrease


def kappa_s(kappa_g: float, kappa_h: float, L: float, L_H: float) -> float:
    return 2.0 * kappa_g + kappa_h + L + L_H


def sigma_c(kappa_g: float, kappa_h: float, L: float, L_H: float, theta: float) -> float:
    """Regularization level above which accurate iterations always succeed."""
    return kappa_s(kappa_g, kappa_h, L, L_H) / (1.0 - theta / 3.0)


def kappa_f(theta: float, kappa_theta: float, sigma_min: float) -> float:
    return theta / (12.0 * math.sqrt(2.0)) * (1.0 - kappa_theta) ** 1.5 * sigma_min


def xi_epsilon(eps: float, kappa_theta: float, sigma_min: float, kappa_g: float,
               kappa_h: float, L: float, L_H: float) -> float:
    """Radius parameter below which accurate fully quadratic steps pass the length gate."""
    return (1.0 - kappa_theta) * sigma_min * eps / max(2.0 * (2.0 * kappa_g + kappa_h), L + L_H + sigma_min)


def _run(obj, oracle, cfg, eps, rng, x0, adaptive):
    if rng is None:
        rng = stream(getattr(getattr(oracle, "cfg", None), "seed", 0))
    x = obj.start() if x0 is None else np.array(x0, dtype=float)
    fx = obj.value(x)
    f0 = fx
    grad = obj.grad(x)
    hess = obj.hess(x)
    if not (math.isfinite(fx) and np.all(np.isfinite(grad))):
        raise NonFiniteError("non-finite data at the starting point")
    sigma = cfg.sigma0
    xi = cfg.xi0
    gamma, theta, smin = cfg.gamma, cfg.theta, cfg.sigma_min
    tols = (float(eps),) if isinstance(eps, (int, float)) else tuple(float(e) for e in eps)
    if any(e <= 0 for e in tols):
        raise ConfigError("tolerances must be positive")
    pending = sorted(tols, reverse=True)
    hits: dict[float, int | None] = {e: None for e in pending}
    extra = ("sigma", "rho", "model_decrease", "trial_grad_norm")
    if adaptive:
        extra += ("xi", "shrink", "model_ok")
    builder = TraceBuilder(extra)
    append = builder.append
    capped = True

    for k in range(cfg.max_iters):
        gn = math.sqrt(grad @ grad)
        if adaptive:
            delta = xi / sigma
            model = oracle.sample(obj, x, rng, true_grad=grad, true_hess=hess, radius=delta)
        else:
            model = oracle.sample(obj, x, rng, true_grad=grad, true_hess=hess)
        g, B = model.g, model.B
        if not (np.all(np.isfinite(g)) and np.all(np.isfinite(B))):
            raise NonFiniteError(f"non-finite model at iteration {k}")
        step = solve_cubic(CubicSubproblem(g, B, sigma, cfg.kappa_theta))
        s = step.s
        sn = math.sqrt(s @ s)
        is_true = oracle.accurate(g, B, grad, hess, s)
        model_ok = oracle.fully_quadratic(g, B, grad, hess, delta) if adaptive else None

        if adaptive and sn < cfg.kappa_delta * delta:
            append(alpha=1.0 / sigma, f=fx, grad_norm=gn, step_norm=sn, is_true=is_true,
                   is_successful=False, f_trial=fx, sigma=sigma, rho=None,
                   model_decrease=step.model_decrease, trial_grad_norm=None,
                   xi=xi, shrink=True, model_ok=model_ok)
            xi /= cfg.kappa_delta
            continue

        xt = x + s
        ft = obj.value(xt)
        gt = obj.grad(xt)
        if not (math.isfinite(ft) and np.all(np.isfinite(gt))):
            raise NonFiniteError(f"non-finite trial data at iteration {k}")
        tgn = math.sqrt(gt @ gt)
        md = step.model_decrease
        if md <= 1e-14 * abs(fx) or md <= 0.0:
            r = None
            success = False
        else:
            r = (fx - ft) / md
            success = r >= theta
        row = dict(alpha=1.0 / sigma, f=fx, grad_norm=gn, step_norm=sn, is_true=is_true,
                   is_successful=success, f_trial=ft, sigma=sigma, rho=r,
                   model_decrease=md, trial_grad_norm=tgn)
        if adaptive:
            row.update(xi=xi, shrink=False, model_ok=model_ok)
        append(**row)

        if success:
            if obj.domain_box is not None and not obj.in_domain(xt):
                raise DomainExitError(f"iterate left the domain box at iteration {k}: {xt}")
            x, fx, grad = xt, ft, gt
            hess = obj.hess(x)
            sigma = max(gamma * sigma, smin)
            while pending and tgn <= pending[0]:
                hits[pending.pop(0)] = k
            if not pending:
                capped = False
                break
        else:
            sigma /= gamma

    return Trace.from_builder(
        builder,
        algorithm="arc_fully_quadratic" if adaptive else "arc",
        event="arc_grad",
        hits=hits,
        capped=capped,
        x_final=x,
        f_final=fx,
        config=cfg,
        f0=f0,
    )


def run_arc(
    obj: Objective,
    oracle,
    cfg: ArcConfig,
    eps,
    rng: np.random.Generator | None = None,
    *,
    x0: np.ndarray | None = None,
) -> Trace:
    """Run probabilistic ARC.

    ``N_eps`` is the index of the first successful iteration whose new point
    has gradient norm at most ``eps``. Several tolerances may be passed at
    once; the run stops when the smallest is reached.

    Args:
        obj: Objective with Hessians.
        oracle: :class:`OracleConfig` or an object with ``sample`` and ``accurate``.
        cfg: ARC parameters.
        eps: Tolerance or sequence of tolerances.
        rng: Random stream, defaults to one seeded from the oracle config.
        x0: Starting point, defaults to ``obj.x0``.
    """
    if isinstance(oracle, OracleConfig):
        oracle = QuadraticOracle(oracle)
    return _run(obj, oracle, cfg, eps, rng, x0, adaptive=False)


def run_arc_fully_quadratic(
    obj: Objective,
    fq_oracle,
    cfg: ArcConfig,
    eps,
    rng: np.random.Generator | None = None,
    *,
    x0: np.ndarray | None = None,
    validate: bool = True,
) -> Trace:
    """ARC with fully quadratic models on the ball of radius ``xi_k / sigma_k``.

    A step shorter than ``kappa_delta * xi_k / sigma_k`` is discarded, ``xi``
    is divided by ``kappa_delta`` and the iteration is recorded as a shrink.

    Raises:
        ConfigError: If ``validate`` and the tolerance or problem constants fall
            outside the range where the step-length guarantee is stated
            (``eps`` in (0, 1] and ``max(L, L_H) >= 1``).
    """
    if isinstance(fq_oracle, OracleConfig):
        fq_oracle = FullyQuadraticOracle(fq_oracle)
    if validate:
        tols = (eps,) if isinstance(eps, (int, float)) else tuple(eps)
        if any(not 0 < e <= 1 for e in tols):
            raise ConfigError("tolerances must lie in (0, 1] for the adaptive-radius ARC")
        if max(obj.lip_grad, obj.lip_hess or 0.0) < 1:
            raise ConfigError("adaptive-radius ARC requires max(L, L_H) >= 1")
    return _run(obj, fq_oracle, cfg, eps, rng, x0, adaptive=True)
