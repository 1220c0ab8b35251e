"""Line search driven by random gradient models.

Every iteration draws a fresh model, tries the step ``alpha * d`` and accepts
it if the sufficient-decrease test passes. The step size grows by ``1/gamma``
after a success (capped at ``alpha_max``) and shrinks by ``gamma`` after a
failure. The adaptive-radius variant additionally maintains ``xi`` and skips
the step whenever the model gradient is too short to be trusted.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import ConfigError, DomainExitError, NonFiniteError
from .oracles import FullyLinearOracle, LinearOracle, OracleConfig
from .problems import Objective
from .rng import stream
from .trace import Trace, TraceBuilder


class GeneralDirection:
    """Direction ``d = -T g`` for a fixed family of SPD matrices ``T``.

    The matrices are cycled through by iteration index. With ``lambda_min`` and
    ``lambda_max`` the extreme eigenvalues over the family,
    ``d^T g <= -beta ||d|| ||g||`` holds with ``beta = lambda_min/lambda_max``
    and ``kappa_1 ||g|| <= ||d|| <= kappa_2 ||g||`` with ``kappa_1 = lambda_min``,
    ``kappa_2 = lambda_max``.
    """

    def __init__(self, transforms: Sequence[np.ndarray]):
        mats = [np.array(T, dtype=float) for T in transforms]
        if not mats:
            raise ValueError("need at least one transform")
        lo, hi = math.inf, 0.0
        for T in mats:
            if T.ndim != 2 or T.shape[0] != T.shape[1]:
                raise ValueError("transforms must be square matrices")
            if not np.allclose(T, T.T, rtol=0, atol=1e-12 * max(1.0, np.abs(T).max())):
                raise ValueError("transforms must be symmetric")
            ev = np.linalg.eigvalsh(T)
            if ev[0] <= 0:
                raise ValueError("transforms must be positive definite")
            lo, hi = min(lo, ev[0]), max(hi, ev[-1])
        self.transforms = mats
        self.kappa1 = float(lo)
        self.kappa2 = float(hi)
        self.beta = float(lo / hi)

    def __call__(self, g: np.ndarray, k: int = 0) -> np.ndarray:
        return -(self.transforms[k % len(self.transforms)] @ g)


def make_general_direction(transform) -> GeneralDirection:
    """Build a direction transform from one SPD matrix or a sequence of them."""
    arr = np.asarray(transform, dtype=float) if not isinstance(transform, (list, tuple)) else None
    if arr is not None and arr.ndim == 2:
        return GeneralDirection([arr])
    return GeneralDirection(list(transform))


@dataclass(frozen=True)
class LsConfig:
    """Line-search parameters.

    Attributes:
        gamma: Step-size contraction factor in (0, 1).
        theta: Sufficient-decrease constant in (0, 1).
        alpha_max: Largest step size.
        alpha0: Initial step size, below ``alpha_max``.
        max_iters: Iteration cap.
        direction: None for steepest descent, else a :class:`GeneralDirection`.
        kappa_delta: Radius shrink factor (adaptive-radius variant only).
        xi0: Initial radius parameter (adaptive-radius variant only).
        hold_model_on_failure: Reuse the last model after a failed step
            instead of redrawing. Only meant for regression against classical
            backtracking.
    """

    gamma: float = 0.5
    theta: float = 0.5
    alpha_max: float = 1.0
    alpha0: float = 0.25
    max_iters: int = 1_000_000
    direction: GeneralDirection | None = None
    kappa_delta: float = 2.0
    xi0: float = 1.0
    hold_model_on_failure: bool = False

    def __post_init__(self):
        if not 0 < self.gamma < 1:
            raise ConfigError("gamma must lie in (0, 1)")
        if not 0 < self.theta < 1:
            raise ConfigError("theta must lie in (0, 1)")
        if not 0 < self.alpha0 < self.alpha_max:
            raise ConfigError("need 0 < alpha0 < alpha_max")
        if self.max_iters < 1:
            raise ConfigError("max_iters must be positive")
        if self.kappa_delta <= 1:
            raise ConfigError("kappa_delta must exceed 1")
        if self.xi0 <= 0:
            raise ConfigError("xi0 must be positive")

    @property
    def beta(self) -> float:
        return 1.0 if self.direction is None else self.direction.beta

    @property
    def kappa1(self) -> float:
        return 1.0 if self.direction is None else self.direction.kappa1

    @property
    def kappa2(self) -> float:
        return 1.0 if self.direction is None else self.direction.kappa2


@dataclass(frozen=True)
class StoppingRule:
    """Tolerances and hitting event for a line-search run.

    Attributes:
        eps: One tolerance or several; the run continues until the smallest is hit.
        event: ``grad`` for ``||grad f(x^k)|| <= eps`` or ``fgap`` for
            ``f(x^k) - f* <= eps``.
        max_iters: Optional override of the configuration's iteration cap.
    """

    eps: float | tuple[float, ...]
    event: str = "grad"
    max_iters: int | None = None

    def __post_init__(self):
        if self.event not in ("grad", "fgap"):
            raise ConfigError(f"unknown hitting event {self.event!r}")
        if any(e <= 0 for e in self.tolerances):
            raise ConfigError("tolerances must be positive")

    @property
    def tolerances(self) -> tuple[float, ...]:
        if isinstance(self.eps, (int, float)):
            return (float(self.eps),)
        return tuple(float(e) for e in self.eps)

    @classmethod
    def for_regime(cls, regime: str, eps, max_iters: int | None = None) -> "StoppingRule":
        event = "grad" if regime == "nonconvex" else "fgap"
        return cls(eps if isinstance(eps, (int, float)) else tuple(eps), event, max_iters)


def armijo_check(f_x: float, f_trial: float, alpha: float, theta: float, g: np.ndarray,
                 d: np.ndarray | None = None) -> bool:
    """Sufficient-decrease test.

    Steepest descent (``d`` omitted): ``f_trial <= f_x - alpha theta ||g||^2``.
    General direction: ``f_trial <= f_x + alpha theta d^T g``.
    """
    if d is None:
        return f_trial <= f_x - alpha * theta * float(g @ g)
    return f_trial <= f_x + alpha * theta * float(d @ g)


def _as_oracle(oracle):
    return LinearOracle(oracle) if isinstance(oracle, OracleConfig) else oracle


def _nonfinite(k: int, **values: float) -> NonFiniteError:
    bad = ", ".join(name for name, v in values.items() if not math.isfinite(v))
    return NonFiniteError(f"non-finite {bad} at iteration {k}")


def _run(obj, oracle, cfg, stop, rng, x0, adaptive):
    oracle = _as_oracle(oracle)
    if rng is None:
        rng = stream(getattr(getattr(oracle, "cfg", None), "seed", 0))
    x = obj.start() if x0 is None else np.array(x0, dtype=float)
    fx = obj.value(x)
    f0 = fx
    gamma, theta, amax = cfg.gamma, cfg.theta, cfg.alpha_max
    alpha = cfg.alpha0
    xi = cfg.xi0
    direction = cfg.direction
    max_iters = cfg.max_iters if stop.max_iters is None else stop.max_iters
    pending = sorted(stop.tolerances, reverse=True)
    hits: dict[float, int | None] = {e: None for e in pending}
    use_gap = stop.event == "fgap"
    f_star = obj.f_star
    builder = TraceBuilder(("xi", "shrink", "model_ok") if adaptive else ())
    append = builder.append
    cols = builder.data
    c_alpha, c_f, c_gn, c_sn, c_true, c_succ, c_ft = (
        cols[c].append for c in ("alpha", "f", "grad_norm", "step_norm", "is_true", "is_successful", "f_trial"))
    held = None
    capped = True

    for k in range(max_iters + 1):
        grad = obj.grad(x)
        gn = math.sqrt(grad @ grad)
        if not (math.isfinite(fx) and math.isfinite(gn)):
            raise _nonfinite(k, f=fx, gradient=gn)
        measure = fx - f_star if use_gap else gn
        while pending and measure <= pending[0]:
            hits[pending.pop(0)] = k
        if not pending:
            capped = False
            break
        if k == max_iters:
            break

        if held is not None:
            g = held
            model_true = None
        elif adaptive:
            model = oracle.sample(obj, x, alpha, rng, true_grad=grad, radius=alpha * xi)
            g = model.g
        else:
            model = oracle.sample(obj, x, alpha, rng, true_grad=grad)
            g = model.g
        gg = float(g @ g)
        if not math.isfinite(gg):
            raise _nonfinite(k, model=gg)
        is_true = oracle.accurate(g, grad, alpha)

        if adaptive:
            model_true = oracle.fully_linear(g, grad, alpha * xi) if hasattr(oracle, "fully_linear") else None
            if math.sqrt(gg) < cfg.kappa_delta * xi:
                append(alpha=alpha, f=fx, grad_norm=gn, step_norm=0.0, is_true=is_true,
                       is_successful=False, f_trial=fx, xi=xi, shrink=True, model_ok=model_true)
                xi /= cfg.kappa_delta
                continue

        if direction is None:
            d = -g
            target = theta * alpha * gg
        else:
            d = direction(g, k)
            target = -theta * alpha * float(d @ g)
        xt = x + alpha * d
        ft = obj.value(xt)
        if not math.isfinite(ft):
            raise _nonfinite(k, trial_value=ft)
        success = ft <= fx - target
        if adaptive:
            append(alpha=alpha, f=fx, grad_norm=gn, step_norm=alpha * math.sqrt(d @ d),
                   is_true=is_true, is_successful=success, f_trial=ft, xi=xi, shrink=False,
                   model_ok=model_true)
        else:
            # hot path: write the base columns directly
            c_alpha(alpha)
            c_f(fx)
            c_gn(gn)
            c_sn(alpha * math.sqrt(d @ d))
            c_true(is_true)
            c_succ(success)
            c_ft(ft)
        if success:
            if obj.domain_box is not None and not obj.in_domain(xt):
                raise DomainExitError(f"iterate left the domain box at iteration {k}: {xt}")
            x = xt
            fx = ft
            alpha = min(amax, alpha / gamma)
            held = None
        else:
            alpha *= gamma
            held = g if cfg.hold_model_on_failure else None

    name = "ls_fully_linear" if adaptive else ("ls_general" if direction is not None else "ls_steepest")
    return Trace.from_builder(
        builder,
        algorithm=name,
        event=stop.event,
        hits=hits,
        capped=capped,
        x_final=x,
        f_final=fx,
        config=cfg,
        f0=f0,
    )


def run_linesearch(
    obj: Objective,
    oracle,
    cfg: LsConfig,
    stop: StoppingRule,
    rng: np.random.Generator | None = None,
    *,
    x0: np.ndarray | None = None,
) -> Trace:
    """Run the random-model line search until the hitting event or the cap.

    Args:
        obj: Objective to minimize.
        oracle: An :class:`OracleConfig` or an oracle object with ``sample``
            and ``accurate`` methods.
        cfg: Line-search parameters.
        stop: Tolerances and hitting event. The event is checked on the
            incumbent before each model draw, so ``N_eps = 0`` if ``x0``
            already satisfies it.
        rng: Random stream. Defaults to one seeded from the oracle config.
        x0: Starting point, defaults to ``obj.x0``.

    Raises:
        NonFiniteError: On non-finite values or models.
        DomainExitError: If an accepted iterate leaves ``obj.domain_box``.
    """
    return _run(obj, oracle, cfg, stop, rng, x0, adaptive=False)


def run_ls_fully_linear(
    obj: Objective,
    fl_oracle,
    cfg: LsConfig,
    stop: StoppingRule,
    rng: np.random.Generator | None = None,
    *,
    x0: np.ndarray | None = None,
) -> Trace:
    """Adaptive-radius line search with fully linear models.

    Models are built on the ball of radius ``alpha_k * xi_k``. If the model
    gradient is shorter than ``kappa_delta * xi_k`` the iteration only divides
    ``xi`` by ``kappa_delta`` and is recorded with ``shrink = True``.
    """
    if isinstance(fl_oracle, OracleConfig):
        fl_oracle = FullyLinearOracle(fl_oracle)
    return _run(obj, fl_oracle, cfg, stop, rng, x0, adaptive=True)
