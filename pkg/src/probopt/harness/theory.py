"""Threshold ``C``, progress function ``h`` and expected hitting-time bounds.

Regimes are ``nonconvex``, ``convex`` and ``strongly_convex`` for the line
search and ``arc`` for cubic regularization. For ARC the step parameter is
``alpha = 1/sigma``, so ``alpha0 = 1/sigma0`` and ``alpha_max = 1/sigma_min``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from ..arc import ArcConfig, kappa_f, kappa_s, sigma_c
from ..errors import ConfigError
from ..linesearch import LsConfig
from ..oracles import OracleConfig
from ..problems import Objective

LS_REGIMES = ("nonconvex", "convex", "strongly_convex")
REGIMES = LS_REGIMES + ("arc",)


@dataclass(frozen=True)
class TheoryConstants:
    """Everything the bounds depend on for one problem/algorithm/oracle triple."""

    regime: str
    theta: float
    gamma: float
    alpha0: float
    alpha_max: float
    L: float
    f0: float
    f_star: float
    kappa: float = 1.0
    beta: float = 1.0
    kappa1: float = 1.0
    kappa2: float = 1.0
    mu: float = 0.0
    D: float | None = None
    L_H: float = 0.0
    kappa_g: float = 1.0
    kappa_h: float = 1.0
    kappa_theta: float = 0.5
    sigma_min: float | None = None

    def __post_init__(self):
        if self.regime not in REGIMES:
            raise ConfigError(f"unknown regime {self.regime!r}")


def constants_for(
    obj: Objective,
    cfg: LsConfig | ArcConfig,
    oracle: OracleConfig,
    regime: str | None = None,
    x0: np.ndarray | None = None,
    *,
    kappa: float | None = None,
) -> TheoryConstants:
    """Collect theory constants; ``regime`` defaults to the problem's convexity class (or ``arc``)."""
    x0 = obj.start() if x0 is None else np.asarray(x0, dtype=float)
    f0 = obj.value(x0)
    if isinstance(cfg, ArcConfig):
        if regime not in (None, "arc"):
            raise ConfigError("ARC runs use the arc regime")
        return TheoryConstants(
            regime="arc",
            theta=cfg.theta,
            gamma=cfg.gamma,
            alpha0=1.0 / cfg.sigma0,
            alpha_max=1.0 / cfg.sigma_min,
            L=obj.lip_grad,
            f0=f0,
            f_star=obj.f_star,
            L_H=obj.lip_hess if obj.lip_hess is not None else math.nan,
            kappa_g=oracle.kappa_g,
            kappa_h=oracle.kappa_h,
            kappa_theta=cfg.kappa_theta,
            sigma_min=cfg.sigma_min,
        )
    regime = obj.convexity if regime is None else regime
    if regime not in LS_REGIMES:
        raise ConfigError(f"unknown line-search regime {regime!r}")
    if regime == "strongly_convex" and obj.strong_mu <= 0:
        raise ConfigError("strongly convex regime needs mu > 0")
    if regime == "convex" and obj.level_diameter is None:
        raise ConfigError("convex regime needs a level-set diameter")
    D = obj.level_diameter(x0) if obj.level_diameter is not None else None
    return TheoryConstants(
        regime=regime,
        theta=cfg.theta,
        gamma=cfg.gamma,
        alpha0=cfg.alpha0,
        alpha_max=cfg.alpha_max,
        L=obj.lip_grad,
        f0=f0,
        f_star=obj.f_star,
        kappa=oracle.kappa if kappa is None else kappa,
        beta=cfg.beta,
        kappa1=cfg.kappa1,
        kappa2=cfg.kappa2,
        mu=obj.strong_mu,
        D=D,
    )


def arc_sigma_c(c: TheoryConstants) -> float:
    return sigma_c(c.kappa_g, c.kappa_h, c.L, c.L_H, c.theta)


def compute_C(regime: str, c: TheoryConstants) -> float:
    """Step-parameter threshold below which accurate iterations succeed."""
    if regime == "arc":
        return 1.0 / arc_sigma_c(c)
    if regime not in LS_REGIMES:
        raise ConfigError(f"unknown regime {regime!r}")
    return c.beta * (1.0 - c.theta) / (0.5 * c.L * c.kappa2 + c.kappa)


def progress_cap(regime: str, c: TheoryConstants, eps: float) -> float:
    """Upper bound ``F_eps`` on the progress measure before the hit.

    For the strongly convex measure ``log(1/(f - f*))`` the starting value can
    be negative, so the budget is ``log(max(1, f0 - f*)/eps)``.
    """
    if regime in ("nonconvex", "arc"):
        return c.f0 - c.f_star
    if regime == "convex":
        return 1.0 / eps
    if regime == "strongly_convex":
        return math.log(max(1.0, c.f0 - c.f_star) / eps)
    raise ConfigError(f"unknown regime {regime!r}")


def compute_h(regime: str, c: TheoryConstants, eps: float, *, validate: bool = True) -> Callable[[float], float]:
    """Guaranteed progress of an accurate successful iteration as a function of ``alpha``.

    Raises:
        ConfigError: If ``h`` is not positive on ``(0, alpha_max]`` or, in the
            strongly convex regime, if ``C > (1 + kappa alpha_max)^2 / (2 mu theta)``.
    """
    q = (1.0 + c.kappa * c.alpha_max) ** 2
    if regime == "nonconvex":
        a = c.theta * c.kappa1 * c.beta * eps * eps / q

        def h(alpha):
            return a * alpha
    elif regime == "convex":
        if not c.D:
            raise ConfigError("convex regime needs a positive level-set diameter")
        a = c.theta / (c.D * c.D * q)

        def h(alpha):
            return a * alpha
    elif regime == "strongly_convex":
        if c.mu <= 0:
            raise ConfigError("strongly convex regime needs mu > 0")
        if compute_C(regime, c) > q / (2.0 * c.mu * c.theta):
            raise ConfigError("threshold C exceeds (1 + kappa alpha_max)^2 / (2 mu theta)")
        a = 2.0 * c.mu * c.theta / q

        def h(alpha):
            arg = 1.0 - a * alpha
            if arg <= 0:
                raise ConfigError("strongly convex progress function undefined at this step size")
            return -math.log1p(-a * alpha)
    elif regime == "arc":
        Cx = compute_C(regime, c)
        kf = kappa_f(c.theta, c.kappa_theta, c.sigma_min)
        e15 = eps**1.5

        def h(alpha):
            return kf * min(alpha, Cx) ** 1.5 * e15
    else:
        raise ConfigError(f"unknown regime {regime!r}")

    if validate:
        grid = np.geomspace(c.alpha_max * 1e-6, c.alpha_max, 64)
        vals = [h(float(a_)) for a_ in grid]
        if not all(v > 0 for v in vals) or any(b < a_ for a_, b in zip(vals, vals[1:])):
            raise ConfigError("progress function must be positive and nondecreasing on (0, alpha_max]")
    return h


def probability_factor(p: float) -> float:
    """``2p / (2p - 1)^2``."""
    if not 0.5 < p <= 1.0:
        raise ConfigError("bounds need 1/2 < p <= 1")
    return 2.0 * p / (2.0 * p - 1.0) ** 2


def log_term(C: float, alpha0: float, gamma: float) -> float:
    """``log_gamma(C / alpha0)`` clamped below at 0."""
    return max(0.0, math.log(C / alpha0) / math.log(gamma))


def theoretical_bound(regime: str, c: TheoryConstants, p: float, eps: float) -> float:
    """Expected hitting-time bound ``2p/(2p-1)^2 (2 F_eps / h(C) + log_gamma(C/alpha0))``."""
    if eps <= 0:
        raise ConfigError("eps must be positive")
    fac = probability_factor(p)
    C = compute_C(regime, c)
    h = compute_h(regime, c, eps)
    return fac * (2.0 * progress_cap(regime, c, eps) / h(C) + log_term(C, c.alpha0, c.gamma))


def complexity_constant(regime: str, c: TheoryConstants) -> float:
    """Leading constant ``M`` of the regime's rate (``M/eps^2``, ``M/eps``, ``log(1/eps)/M``, ``M/eps^1.5``).

    Equals ``F_eps / h(C)`` with the tolerance factored out, which is
    half of the corresponding term in :func:`theoretical_bound`.
    """
    q = (1.0 + c.kappa * c.alpha_max) ** 2
    s = 0.5 * c.L * c.kappa2 + c.kappa
    if regime == "nonconvex":
        return (c.f0 - c.f_star) * q * s / (c.theta * (1 - c.theta) * c.kappa1 * c.beta**2)
    if regime == "convex":
        return q * c.D**2 * s / (c.theta * (1 - c.theta) * c.beta)
    if regime == "strongly_convex":
        return -math.log(1 - 2 * c.mu * c.theta * (1 - c.theta) * c.beta / (q * s))
    if regime == "arc":
        ks = kappa_s(c.kappa_g, c.kappa_h, c.L, c.L_H)
        kf = kappa_f(c.theta, c.kappa_theta, c.sigma_min)
        return (c.f0 - c.f_star) * ks**1.5 / (kf * (1 - c.theta / 3) ** 1.5)
    raise ConfigError(f"unknown regime {regime!r}")
