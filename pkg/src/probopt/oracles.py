"""Random model oracles and post-hoc accuracy indicators.

An oracle returns model data that is sufficiently accurate with probability
``p``, independently of the past. On the remaining draws it returns a
corrupted model chosen by ``corruption_mode``, which can be arbitrarily bad.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError
from .problems import FiniteSumObjective, Objective

CORRUPTION_MODES = ("zero_vector", "negated_gradient", "random_huge", "scaled_noise")
ARC_RTOL = 1e-12


@dataclass(frozen=True)
class OracleConfig:
    """Oracle parameters.

    Attributes:
        p: Probability of drawing an accurate model.
        corruption_mode: What to return on inaccurate draws.
        kappa: Line-search accuracy constant.
        kappa_g: Gradient accuracy constant for second-order models.
        kappa_h: Hessian accuracy constant for second-order models.
        eta: Fraction of the admissible error radius used on accurate draws.
            ``eta = 0`` gives exact models.
        seed: Seed used when a run is started without an explicit stream.
    """

    p: float = 1.0
    corruption_mode: str = "zero_vector"
    kappa: float = 1.0
    kappa_g: float = 1.0
    kappa_h: float = 1.0
    eta: float = 0.5
    seed: int = 0

    def __post_init__(self):
        if not 0.0 < self.p <= 1.0:
            raise ConfigError(f"p must lie in (0, 1], got {self.p}")
        if not 0.0 <= self.eta < 1.0:
            raise ConfigError(f"eta must lie in [0, 1), got {self.eta}")
        if self.corruption_mode not in CORRUPTION_MODES:
            raise ConfigError(f"unknown corruption mode {self.corruption_mode!r}")
        if min(self.kappa, self.kappa_g, self.kappa_h) <= 0:
            raise ConfigError("accuracy constants must be positive")


@dataclass(frozen=True)
class LinearModel:
    g: np.ndarray
    intended_true: bool


@dataclass(frozen=True)
class QuadraticModel:
    g: np.ndarray
    B: np.ndarray
    intended_true: bool


def _unit(rng: np.random.Generator, n: int) -> np.ndarray:
    u = rng.standard_normal(n)
    return u / math.sqrt(u @ u)


def _corrupt_vector(grad: np.ndarray, mode: str, rng: np.random.Generator) -> np.ndarray:
    gn = math.sqrt(grad @ grad)
    if mode == "zero_vector":
        return np.zeros_like(grad)
    if mode == "negated_gradient":
        return -grad
    if mode == "random_huge":
        return 1e3 * (1.0 + gn) * _unit(rng, grad.size)
    # scaled_noise: right magnitude, random direction
    return gn * _unit(rng, grad.size)


def _corrupt_matrix(hess: np.ndarray, mode: str, rng: np.random.Generator) -> np.ndarray:
    if mode == "zero_vector":
        return np.zeros_like(hess)
    if mode == "negated_gradient":
        return -hess
    n = hess.shape[0]
    E = rng.standard_normal((n, n))
    E = 0.5 * (E + E.T)
    E /= max(np.linalg.norm(E, 2), 1e-300)
    if mode == "random_huge":
        return hess + 1e3 * (1.0 + np.linalg.norm(hess, 2)) * E
    return np.linalg.norm(hess, 2) * E


def check_ls_accuracy(g: np.ndarray, true_grad: np.ndarray, kappa: float, alpha: float) -> bool:
    """Line-search accuracy indicator ``||g - grad f|| <= kappa * alpha * ||g||``."""
    e = g - true_grad
    return bool(math.sqrt(e @ e) <= kappa * alpha * math.sqrt(g @ g))


def check_arc_accuracy(
    g: np.ndarray,
    B: np.ndarray,
    true_grad: np.ndarray,
    true_hess: np.ndarray,
    s: np.ndarray,
    kappa_g: float,
    kappa_h: float,
) -> bool:
    """Second-order accuracy indicator along the step ``s``.

    Checks ``||grad f - g|| <= kappa_g ||s||^2`` and
    ``||(H - B) s|| <= kappa_h ||s||^2`` up to a relative rounding allowance of
    ``1e-12``, so cases that hold with equality in exact arithmetic count as
    accurate. At ``s = 0`` both right-hand sides vanish, so the indicator
    holds only if ``g`` matches the gradient to that allowance.
    """
    s2 = float(s @ s)
    eg = true_grad - g
    if s2 == 0.0:
        return bool(math.sqrt(eg @ eg) <= ARC_RTOL * math.sqrt(true_grad @ true_grad))
    tol = 1.0 + ARC_RTOL
    if math.sqrt(eg @ eg) > kappa_g * s2 * tol:
        return False
    eh = (true_hess - B) @ s
    return bool(math.sqrt(eh @ eh) <= kappa_h * s2 * tol)


def sample_linear_model(
    obj: Objective,
    x: np.ndarray,
    alpha: float,
    cfg: OracleConfig,
    rng: np.random.Generator,
    *,
    true_grad: np.ndarray | None = None,
) -> LinearModel:
    """Draw a gradient model that is sufficiently accurate with probability ``p``.

    Accurate draws perturb the gradient by a uniformly random vector of length
    ``eta * kappa * alpha * ||grad f|| / (1 + kappa * alpha)``. Any such vector
    ``g`` satisfies the indicator because ``||g|| >= ||grad f|| / (1 + kappa alpha)``.
    """
    grad = obj.grad(x) if true_grad is None else true_grad
    if rng.random() < cfg.p:
        gn = math.sqrt(grad @ grad)
        if cfg.eta == 0.0 or gn == 0.0:
            return LinearModel(grad.copy(), True)
        r = cfg.eta * cfg.kappa * alpha * gn / (1.0 + cfg.kappa * alpha)
        return LinearModel(grad + r * _unit(rng, grad.size), True)
    return LinearModel(_corrupt_vector(grad, cfg.corruption_mode, rng), False)


def sample_quadratic_model(
    obj: Objective,
    x: np.ndarray,
    cfg: OracleConfig,
    rng: np.random.Generator,
    *,
    true_grad: np.ndarray | None = None,
    true_hess: np.ndarray | None = None,
) -> QuadraticModel:
    """Return the exact ``(grad, Hessian)`` with probability ``p``, else a corrupted pair."""
    grad = obj.grad(x) if true_grad is None else true_grad
    hess = obj.hess(x) if true_hess is None else true_hess
    if rng.random() < cfg.p:
        return QuadraticModel(grad, hess, True)
    mode = cfg.corruption_mode
    return QuadraticModel(_corrupt_vector(grad, mode, rng), _corrupt_matrix(hess, mode, rng), False)


class LinearOracle:
    """Stateless wrapper binding :func:`sample_linear_model` to a config."""

    def __init__(self, cfg: OracleConfig):
        self.cfg = cfg

    def sample(self, obj, x, alpha, rng, *, true_grad=None, radius=None) -> LinearModel:
        return sample_linear_model(obj, x, alpha, self.cfg, rng, true_grad=true_grad)

    def accurate(self, g, true_grad, alpha) -> bool:
        return check_ls_accuracy(g, true_grad, self.cfg.kappa, alpha)


class QuadraticOracle:
    """Stateless wrapper binding :func:`sample_quadratic_model` to a config."""

    def __init__(self, cfg: OracleConfig):
        self.cfg = cfg

    def sample(self, obj, x, rng, *, true_grad=None, true_hess=None, radius=None) -> QuadraticModel:
        return sample_quadratic_model(obj, x, self.cfg, rng, true_grad=true_grad, true_hess=true_hess)

    def accurate(self, g, B, true_grad, true_hess, s) -> bool:
        return check_arc_accuracy(g, B, true_grad, true_hess, s, self.cfg.kappa_g, self.cfg.kappa_h)


class FullyLinearOracle(LinearOracle):
    """Gradient models that are fully linear on a ball of radius ``radius``.

    Accurate draws return ``grad f + e`` with ``||e|| = eta * kappa_g * radius``;
    with ``eta = 0`` the model is exact and only the radius gate matters.
    """

    def sample(self, obj, x, alpha, rng, *, true_grad=None, radius=None) -> LinearModel:
        if radius is None:
            raise ValueError("fully linear models need a radius")
        grad = obj.grad(x) if true_grad is None else true_grad
        if rng.random() < self.cfg.p:
            if self.cfg.eta == 0.0:
                return LinearModel(grad.copy(), True)
            r = self.cfg.eta * self.cfg.kappa_g * radius
            return LinearModel(grad + r * _unit(rng, grad.size), True)
        return LinearModel(_corrupt_vector(grad, self.cfg.corruption_mode, rng), False)

    def fully_linear(self, g, true_grad, radius) -> bool:
        e = g - true_grad
        return bool(math.sqrt(e @ e) <= self.cfg.kappa_g * radius * (1 + 1e-12))


class FiniteDifferenceOracle(LinearOracle):
    """Central-difference gradients on the ball of radius ``radius``.

    Each of the ``2n`` function evaluations fails independently with
    probability ``q`` chosen so that all succeed with probability ``p``; a
    failed evaluation returns 0. Without failures the error is at most
    ``sqrt(n) L radius / 2``, which is the fully-linear constant ``kappa_g``.
    """

    def sample(self, obj, x, alpha, rng, *, true_grad=None, radius=None) -> LinearModel:
        if radius is None:
            raise ValueError("finite-difference models need a radius")
        n = x.size
        q = 1.0 - self.cfg.p ** (1.0 / (2 * n))
        fails = rng.random(2 * n) < q
        g = np.empty(n)
        for i in range(n):
            e = np.zeros(n)
            e[i] = radius
            fp = 0.0 if fails[2 * i] else obj.value(x + e)
            fm = 0.0 if fails[2 * i + 1] else obj.value(x - e)
            g[i] = (fp - fm) / (2.0 * radius)
        return LinearModel(g, not fails.any())

    @staticmethod
    def kappa_g_for(obj: Objective) -> float:
        return math.sqrt(obj.dim) * obj.lip_grad / 2.0


class FullyQuadraticOracle(QuadraticOracle):
    """Second-order models that are fully quadratic on a ball of radius ``radius``.

    Accurate draws return ``grad f + e`` and ``H + E`` with
    ``||e|| = eta * kappa_g * radius^2`` and ``||E|| = eta * kappa_h * radius``.
    """

    def sample(self, obj, x, rng, *, true_grad=None, true_hess=None, radius=None) -> QuadraticModel:
        if radius is None:
            raise ValueError("fully quadratic models need a radius")
        grad = obj.grad(x) if true_grad is None else true_grad
        hess = obj.hess(x) if true_hess is None else true_hess
        cfg = self.cfg
        if rng.random() < cfg.p:
            if cfg.eta == 0.0:
                return QuadraticModel(grad, hess, True)
            n = grad.size
            E = rng.standard_normal((n, n))
            E = 0.5 * (E + E.T)
            E *= cfg.eta * cfg.kappa_h * radius / max(np.linalg.norm(E, 2), 1e-300)
            g = grad + cfg.eta * cfg.kappa_g * radius**2 * _unit(rng, n)
            return QuadraticModel(g, hess + E, True)
        mode = cfg.corruption_mode
        return QuadraticModel(_corrupt_vector(grad, mode, rng), _corrupt_matrix(hess, mode, rng), False)

    def fully_quadratic(self, g, B, true_grad, true_hess, radius) -> bool:
        eg = np.linalg.norm(true_grad - g)
        eh = np.linalg.norm(true_hess - B, 2)
        tol = 1 + 1e-12
        return bool(eg <= self.cfg.kappa_g * radius**2 * tol and eh <= self.cfg.kappa_h * radius * tol)


def subsampled_gradient(
    fs: FiniteSumObjective,
    x: np.ndarray,
    batch_size: int,
    rng: np.random.Generator,
) -> np.ndarray:
    """Scaled batch gradient ``(N/|S|) sum_{i in S} grad f_i(x)``.

    ``S`` is drawn uniformly without replacement, so the estimator is unbiased
    for the aggregate gradient.
    """
    N = fs.num_terms
    if not 1 <= batch_size <= N:
        raise ValueError(f"batch_size must lie in [1, {N}]")
    idx = rng.choice(N, size=batch_size, replace=False)
    total = np.zeros(fs.aggregate.dim)
    for i in idx:
        total += fs.components[i].grad(x)
    return (N / batch_size) * total


def required_batch_size(
    fs: FiniteSumObjective,
    x: np.ndarray,
    alpha: float,
    target_prob: float,
) -> int:
    """Smallest ``|S|`` with ``w / (min(1/2, alpha)^2 ||grad f||^2 |S|) <= 1 - target_prob``, capped at ``N``."""
    if not 0.0 < target_prob < 1.0:
        raise ValueError("target_prob must lie in (0, 1)")
    gn2 = float(np.sum(fs.aggregate.grad(x) ** 2))
    if gn2 == 0.0:
        raise ValueError("gradient vanishes at x; no batch size is needed")
    if fs.variance_bound == 0.0:
        return 1
    t2 = min(0.5, alpha) ** 2 * gn2
    need = fs.variance_bound / (t2 * (1.0 - target_prob))
    # Guard against rounding pushing an exact integer just above itself.
    size = math.ceil(need * (1 - 1e-12))
    return int(min(max(size, 1), fs.num_terms))


class BatchGradientOracle:
    """Line-search oracle built from subsampled gradients of a finite sum.

    The batch size follows :func:`required_batch_size`. The Chebyshev event
    ``||e|| <= m ||grad f||`` with ``m = min(1/2, alpha)`` implies
    ``||e|| <= m/(1-m) ||g|| <= 2 alpha ||g||``, so the default ``kappa`` is 2.
    """

    def __init__(self, fs: FiniteSumObjective, target_prob: float, kappa: float = 2.0):
        self.fs = fs
        self.target_prob = target_prob
        self.kappa = kappa

    def sample(self, obj, x, alpha, rng, *, true_grad=None, radius=None) -> LinearModel:
        grad = self.fs.aggregate.grad(x) if true_grad is None else true_grad
        if not np.any(grad):
            return LinearModel(grad.copy(), True)
        if self.target_prob >= 1.0:
            size = self.fs.num_terms
        else:
            size = required_batch_size(self.fs, x, alpha, self.target_prob)
        g = subsampled_gradient(self.fs, x, size, rng)
        m = min(0.5, alpha)
        return LinearModel(g, bool(np.linalg.norm(g - grad) <= m * np.linalg.norm(grad)))

    def accurate(self, g, true_grad, alpha) -> bool:
        return check_ls_accuracy(g, true_grad, self.kappa, alpha)
