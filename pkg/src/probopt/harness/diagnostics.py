"""Per-realization checks on traces.

The process counts classify iterations by accuracy (``I``), success
(``Theta``) and whether the step parameter sits above the threshold ``C``.
The counting arguments behind them assume ``C = gamma^c alpha0`` for an
integer ``c >= 1``; :func:`grid_threshold` rounds the formula value of ``C``
down onto that grid, which keeps every implication that needs ``alpha <= C``
intact.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from ..errors import LemmaViolation, MalformedTraceError
from ..problems import Objective
from ..trace import Trace
from .theory import TheoryConstants, arc_sigma_c, compute_C, compute_h, progress_cap

RTOL = 1e-9


@dataclass(frozen=True)
class Violation:
    lemma: str
    k: int
    detail: str
    soft: bool = False

    def __str__(self) -> str:
        tag = " (constant estimate)" if self.soft else ""
        return f"{self.lemma} at k={self.k}{tag}: {self.detail}"


@dataclass
class ProcessDiagnostics:
    """Process counts over the iterations before the hit.

    ``N1``: false successful, ``M1``: false, ``N2``: true successful and
    ``M2``: true, all with ``alpha >= C``. ``N3``: true unsuccessful and
    ``M3``: unsuccessful, both with ``alpha > C``. ``small_steps`` counts
    iterations with ``alpha <= C`` and ``small_successes`` the successful ones
    among them.
    """

    C: float
    level: int
    F_eps: float
    h_C: float
    n: int
    N1: int = 0
    M1: int = 0
    N2: int = 0
    M2: int = 0
    N3: int = 0
    M3: int = 0
    small_steps: int = 0
    small_successes: int = 0
    violations: list[Violation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def raise_if_violated(self) -> None:
        if self.violations:
            raise LemmaViolation("; ".join(str(v) for v in self.violations))


def grid_threshold(C: float, alpha0: float, gamma: float) -> tuple[float, int]:
    """Largest ``gamma^c alpha0 <= C`` with integer ``c >= 1``; returns ``(C_grid, c)``."""
    c = max(1, math.ceil(math.log(C / alpha0) / math.log(gamma) - 1e-9))
    return alpha0 * gamma**c, c


def step_levels(alpha: np.ndarray, alpha0: float, gamma: float) -> np.ndarray:
    """Integer ``j`` with ``alpha = alpha0 gamma^j``.

    Raises:
        MalformedTraceError: If some ``alpha`` is off that grid, which happens
            when ``alpha_max`` (or ``1/sigma_min``) is not ``alpha0`` times a
            power of ``gamma``.
    """
    j = np.log(alpha / alpha0) / math.log(gamma)
    jr = np.round(j)
    if alpha.size and np.max(np.abs(j - jr)) > 1e-6:
        raise MalformedTraceError("step parameters are off the gamma-grid through alpha0")
    return jr.astype(np.int64)


def _step_params(trace: Trace) -> tuple[float, float]:
    cfg = trace.config
    if trace.algorithm.startswith("arc"):
        return 1.0 / cfg.sigma0, cfg.gamma
    return cfg.alpha0, cfg.gamma


def process_counts(trace: Trace, C: float, F_eps: float, h: Callable[[float], float],
                   *, eps: float | None = None) -> ProcessDiagnostics:
    """Count the process events on the prefix before the hit and check the counting lemmas.

    Checks: at most half of any prefix consists of successful iterations with
    ``alpha <= C``; ``N2 <= F_eps / h(C)``; ``M2 <= N2 + M3``;
    ``M3 <= N1 + N2 + c`` where ``C = gamma^c alpha0``.
    """
    n_hit = trace.hits[trace.eps if eps is None else eps]
    if n_hit is None and not trace.capped:
        raise MalformedTraceError("trace neither hit its tolerance nor reached the iteration cap")
    alpha0, gamma = _step_params(trace)
    Cg, level = grid_threshold(C, alpha0, gamma)
    h_C = h(Cg)
    n = trace.prefix_length(eps)
    cols = trace.columns
    keep = slice(0, n)
    alpha = cols["alpha"][keep]
    I = cols["is_true"][keep].astype(bool)
    S = cols["is_successful"][keep].astype(bool)
    if "shrink" in cols:
        real = ~cols["shrink"][keep].astype(bool)
        alpha, I, S = alpha[real], I[real], S[real]
    diag = ProcessDiagnostics(C=Cg, level=level, F_eps=F_eps, h_C=h_C, n=int(alpha.size))
    if alpha.size == 0:
        return diag
    j = step_levels(alpha, alpha0, gamma)
    lam = j < level
    lam_bar = j <= level
    nI, nS = ~I, ~S
    diag.N1 = int(np.sum(lam_bar & nI & S))
    diag.M1 = int(np.sum(lam_bar & nI))
    diag.N2 = int(np.sum(lam_bar & I & S))
    diag.M2 = int(np.sum(lam_bar & I))
    diag.N3 = int(np.sum(lam & I & nS))
    diag.M3 = int(np.sum(lam & nS))
    small = ~lam
    diag.small_steps = int(np.sum(small))
    diag.small_successes = int(np.sum(small & S))

    run = np.cumsum(small & S)
    bad = np.nonzero(run > (np.arange(run.size) + 1) / 2.0)[0]
    if bad.size:
        l = int(bad[0])
        diag.violations.append(Violation(
            "small-step success fraction", l, f"{int(run[l])} successes with alpha <= C in {l + 1} iterations"))
    if diag.N2 > F_eps / h_C * (1 + RTOL) + RTOL:
        diag.violations.append(Violation(
            "true successful count", n, f"N2={diag.N2} > F_eps/h(C)={F_eps / h_C:.6g}"))
    if diag.M2 > diag.N2 + diag.M3:
        diag.violations.append(Violation(
            "true count split", n, f"M2={diag.M2} > N2+M3={diag.N2 + diag.M3}"))
    if diag.M3 > diag.N1 + diag.N2 + level:
        diag.violations.append(Violation(
            "large-step failure count", n, f"M3={diag.M3} > N1+N2+c={diag.N1 + diag.N2 + level}"))
    return diag


def diagnose_trace(trace: Trace, constants: TheoryConstants, eps: float | None = None) -> ProcessDiagnostics:
    """Process counts for ``trace`` using the regime's ``C``, ``F_eps`` and ``h``."""
    eps = trace.eps if eps is None else eps
    regime = constants.regime
    C = compute_C(regime, constants)
    h = compute_h(regime, constants, eps)
    return process_counts(trace, C, progress_cap(regime, constants, eps), h, eps=eps)


def _leq(a: float, b: float, scale: float = 1.0) -> bool:
    return a <= b + RTOL * max(abs(a), abs(b), scale) + 1e-14 * scale


def _leq_arr(a: np.ndarray, b: np.ndarray, scale: np.ndarray) -> np.ndarray:
    tol = RTOL * np.maximum(np.maximum(np.abs(a), np.abs(b)), scale) + 1e-14 * scale
    return a <= b + tol


def _collect(out: list, name: str, bad: np.ndarray, detail, limit: int = 5, soft: bool = False) -> None:
    for k in np.nonzero(bad)[0][:limit]:
        out.append(Violation(name, int(k), detail(int(k)), soft))


def check_ls_lemmas(trace: Trace, obj: Objective, c: TheoryConstants) -> list[Violation]:
    """Iteration-level checks for line-search traces.

    * Accurate iterations with ``alpha <= C`` succeed.
    * Accurate successful iterations decrease ``f`` by at least
      ``theta kappa1 beta alpha ||grad f||^2 / (1 + kappa alpha_max)^2``.
    * Convex problems: ``1/Delta_{k+1} - 1/Delta_k >= theta alpha / (D^2 (1 + kappa alpha_max)^2)``
      on accurate successful iterations, ``Delta = f - f*`` (steepest descent).
    * Strongly convex problems: ``Delta_{k+1} <= (1 - 2 mu theta alpha / (1 + kappa alpha_max)^2) Delta_k``
      on accurate successful iterations (steepest descent).

    At most five violations per check are reported.
    """
    out: list[Violation] = []
    if len(trace) == 0:
        return out
    C = compute_C("nonconvex", c)
    q = (1.0 + c.kappa * c.alpha_max) ** 2
    cols = trace.columns
    alpha = cols["alpha"]
    f, ft, gn = cols["f"], cols["f_trial"], cols["grad_norm"]
    S = cols["is_successful"].astype(bool)
    acc = cols["is_true"].astype(bool)
    if "shrink" in cols:
        acc &= ~cols["shrink"].astype(bool)
    _collect(out, "accurate small step must succeed", acc & (alpha <= C) & ~S,
             lambda k: f"alpha={alpha[k]:.6g} <= C={C:.6g}")
    ts = acc & S
    scale = np.maximum(1.0, np.abs(f))
    need = c.theta * c.kappa1 * c.beta * alpha * gn * gn / q
    _collect(out, "sufficient decrease on accurate step", ts & ~_leq_arr(need, f - ft, scale),
             lambda k: f"decrease {f[k] - ft[k]:.6g} < {need[k]:.6g}")
    if not (c.beta == 1.0 and c.kappa1 == 1.0 and c.kappa2 == 1.0):
        return out
    d0, d1 = f - obj.f_star, ft - obj.f_star
    pos = ts & (d0 > 0) & (d1 > 0)
    with np.errstate(divide="ignore", invalid="ignore"):
        if obj.convexity in ("convex", "strongly_convex") and c.D:
            gain = c.theta * alpha / (c.D * c.D * q)
            got = 1.0 / d1 - 1.0 / d0
            _collect(out, "convex reciprocal-gap gain", pos & ~_leq_arr(gain, got, 1.0 / d1),
                     lambda k: f"{got[k]:.6g} < {gain[k]:.6g}")
        if obj.convexity == "strongly_convex" and c.mu > 0:
            factor = 1.0 - 2.0 * c.mu * c.theta * alpha / q
            _collect(out, "strongly convex contraction", pos & ~_leq_arr(d1, factor * d0, d0),
                     lambda k: f"{d1[k]:.6g} > {factor[k]:.6g} * {d0[k]:.6g}")
    return out


def check_arc_lemmas(trace: Trace, obj: Objective, c: TheoryConstants, *, warn: bool = True) -> list[Violation]:
    """Iteration-level checks for ARC traces.

    Model decrease at least ``sigma ||s||^3 / 6`` everywhere and actual
    decrease at least ``theta`` times that on successful steps are exact
    properties of the subproblem solution. The remaining checks depend on
    ``L`` and ``L_H`` and are flagged ``soft`` when those are estimates:

    * accurate iterations with ``sigma >= sigma_c`` succeed,
    * accurate steps satisfy ``||s|| >= sqrt((1 - kappa_theta) ||grad f(x+s)|| / (sigma + kappa_s))``,
    * accurate successful steps decrease ``f`` by at least
      ``kappa_f ||grad f(x+s)||^1.5 / max(sigma, sigma_c)^1.5``,
    * adaptive-radius runs: on fully quadratic iterations
      ``(1 - kappa_theta) ||grad f(x+s)|| <= (2 kappa_g + kappa_h) delta max(delta, 1) + (L + L_H + sigma) ||s||^2``.
    """
    from ..arc import kappa_f, kappa_s

    out: list[Violation] = []
    soft = obj.constants_estimated
    sc = arc_sigma_c(c)
    ks = kappa_s(c.kappa_g, c.kappa_h, c.L, c.L_H)
    kf = kappa_f(c.theta, c.kappa_theta, c.sigma_min)
    cols = trace.columns
    n = len(trace)
    shrink = cols.get("shrink")
    model_ok = cols.get("model_ok")
    xi = cols.get("xi")
    for k in range(n):
        if shrink is not None and shrink[k]:
            continue
        sigma = float(cols["sigma"][k])
        sn = float(cols["step_norm"][k])
        md = float(cols["model_decrease"][k])
        f, ft = float(cols["f"][k]), float(cols["f_trial"][k])
        tgn = float(cols["trial_grad_norm"][k])
        succ = bool(cols["is_successful"][k])
        true = bool(cols["is_true"][k])
        scale = max(1.0, abs(f))
        cube = sigma * sn**3 / 6.0
        if not _leq(cube, md, scale):
            out.append(Violation("model decrease", k, f"{md:.6g} < sigma||s||^3/6 = {cube:.6g}"))
        if succ and not _leq(c.theta * cube, f - ft, scale):
            out.append(Violation("actual decrease", k, f"{f - ft:.6g} < theta sigma||s||^3/6 = {c.theta * cube:.6g}"))
        if true:
            if sigma >= sc and not succ:
                out.append(Violation("accurate step with sigma >= sigma_c must succeed", k,
                                     f"sigma={sigma:.6g}, sigma_c={sc:.6g}", soft))
            low = math.sqrt((1.0 - c.kappa_theta) * tgn / (sigma + ks))
            if not _leq(low, sn, max(sn, 1e-300)):
                out.append(Violation("step length lower bound", k, f"||s||={sn:.6g} < {low:.6g}", soft))
            if succ:
                need = kf * tgn**1.5 / max(sigma, sc) ** 1.5
                if not _leq(need, f - ft, scale):
                    out.append(Violation("decrease in terms of new gradient", k, f"{f - ft:.6g} < {need:.6g}", soft))
        if model_ok is not None and bool(model_ok[k]):
            delta = float(xi[k]) / sigma
            rhs = (2 * c.kappa_g + c.kappa_h) * delta * max(delta, 1.0) + (c.L + c.L_H + sigma) * sn * sn
            if not _leq((1.0 - c.kappa_theta) * tgn, rhs, max(rhs, 1e-300)):
                out.append(Violation("fully quadratic step length", k, f"{(1 - c.kappa_theta) * tgn:.6g} > {rhs:.6g}", soft))
    if warn:
        for v in out:
            if v.soft:
                warnings.warn(str(v), RuntimeWarning, stacklevel=2)
    return out


def hard(violations: list[Violation]) -> list[Violation]:
    return [v for v in violations if not v.soft]
