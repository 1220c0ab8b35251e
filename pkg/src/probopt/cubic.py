"""Global minimization of the cubic-regularized model.

The model is ``m(s) = g^T s + 0.5 s^T B s + (sigma/3) ||s||^3``. Its global
minimizer satisfies ``(B + nu I) s = -g`` with ``nu = sigma ||s||`` and
``B + nu I`` positive semidefinite. We diagonalize ``B`` once and solve the
scalar secular equation ``phi(nu) = sigma ||s(nu)|| - nu = 0``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import SolverError


@dataclass(frozen=True)
class CubicSubproblem:
    g: np.ndarray
    B: np.ndarray
    sigma: float
    kappa_theta: float = 0.5


@dataclass(frozen=True)
class CubicStep:
    """Solution of a cubic subproblem.

    Attributes:
        s: The step.
        model_decrease: ``m(0) - m(s)``.
        multiplier: ``nu = sigma ||s||``.
        stationarity: ``s^T g + s^T B s + sigma ||s||^3``.
        curvature: ``s^T B s + sigma ||s||^3`` (nonnegative at the solution).
        gradient_norm: ``||grad m(s)||``.
        hard_case: Whether the eigenvector correction was used.
        iterations: Root-solve iterations.
    """

    s: np.ndarray
    model_decrease: float
    multiplier: float
    stationarity: float
    curvature: float
    gradient_norm: float
    hard_case: bool = False
    iterations: int = 0

    @property
    def step_norm(self) -> float:
        return float(np.linalg.norm(self.s))


@dataclass(frozen=True)
class StepReport:
    eq42_res1: float
    eq42_ineq_holds: bool
    eq43_holds: bool
    decrease_bound_holds: bool
    model_grad_norm: float
    model_decrease: float

    @property
    def ok(self) -> bool:
        return self.eq42_ineq_holds and self.eq43_holds and self.decrease_bound_holds


def model_value(sub: CubicSubproblem, s: np.ndarray) -> float:
    ns = math.sqrt(s @ s)
    return float(sub.g @ s + 0.5 * s @ (sub.B @ s) + sub.sigma / 3.0 * ns**3)


def model_gradient(sub: CubicSubproblem, s: np.ndarray) -> np.ndarray:
    return sub.g + sub.B @ s + sub.sigma * math.sqrt(s @ s) * s


def _scale(sub: CubicSubproblem, s: np.ndarray) -> float:
    ns = float(np.linalg.norm(s))
    return max(1.0, float(np.linalg.norm(sub.g)) * ns, sub.sigma * ns**3,
               float(np.linalg.norm(sub.B, 2)) * ns * ns)


def verify_step_conditions(sub: CubicSubproblem, s: np.ndarray, rtol: float = 1e-8) -> StepReport:
    """Evaluate the step conditions for ``s``.

    ``eq42_res1`` is the absolute residual of ``s^T g + s^T B s + sigma||s||^3 = 0``;
    it is compared against ``rtol`` times a problem scale. The relative model
    gradient bound uses ``kappa_theta`` from ``sub``.
    """
    ns = math.sqrt(s @ s)
    sBs = float(s @ (sub.B @ s))
    cub = sub.sigma * ns**3
    res1 = abs(float(s @ sub.g) + sBs + cub)
    scale = _scale(sub, s)
    ineq = sBs + cub >= -1e-10 * scale
    gm = float(np.linalg.norm(model_gradient(sub, s)))
    gn = float(np.linalg.norm(sub.g))
    # Rounding floor: the magnitude of the terms that cancel in grad m(s).
    floor = 1e-12 * max(1.0, gn, float(np.linalg.norm(sub.B, 2)) * ns, sub.sigma * ns * ns)
    eq43 = gm <= sub.kappa_theta * min(1.0, ns) * gn + floor
    dec = -model_value(sub, s)
    dec_ok = dec >= cub / 6.0 - 1e-10 * scale
    return StepReport(
        eq42_res1=res1,
        eq42_ineq_holds=bool(ineq and res1 <= rtol * scale),
        eq43_holds=bool(eq43),
        decrease_bound_holds=bool(dec_ok),
        model_grad_norm=gm,
        model_decrease=dec,
    )


def _finish(sub, s, nu, hard, it) -> CubicStep:
    ns = math.sqrt(s @ s)
    Bs = sub.B @ s
    sBs = float(s @ Bs)
    cub = sub.sigma * ns**3
    grad_m = sub.g + Bs + sub.sigma * ns * s
    return CubicStep(
        s=s,
        model_decrease=-(float(sub.g @ s) + 0.5 * sBs + cub / 3.0),
        multiplier=float(nu),
        stationarity=float(sub.g @ s) + sBs + cub,
        curvature=sBs + cub,
        gradient_norm=float(math.sqrt(grad_m @ grad_m)),
        hard_case=hard,
        iterations=it,
    )


def solve_cubic(sub: CubicSubproblem, max_iter: int = 200) -> CubicStep:
    """Global minimizer of the cubic model via eigendecomposition and a secular solve.

    Raises:
        ValueError: On non-finite data or ``sigma <= 0``.
        SolverError: If the root solve does not converge in ``max_iter`` steps.
    """
    g = np.asarray(sub.g, dtype=float)
    B = np.asarray(sub.B, dtype=float)
    sigma = float(sub.sigma)
    if not (np.all(np.isfinite(g)) and np.all(np.isfinite(B)) and math.isfinite(sigma)):
        raise ValueError("cubic subproblem data must be finite")
    if sigma <= 0:
        raise ValueError("sigma must be positive")

    lam, V = np.linalg.eigh(0.5 * (B + B.T))
    c = V.T @ g
    gnorm = math.sqrt(g @ g)
    lam1 = float(lam[0])
    lo = max(0.0, -lam1)
    span = max(1.0, float(np.abs(lam).max()))
    in_min = lam - lam1 <= 1e-12 * span
    c_min = math.sqrt(float(c[in_min] @ c[in_min]))

    if gnorm == 0.0 and lam1 >= 0.0:
        return _finish(sub, np.zeros_like(g), 0.0, False, 0)

    if lam1 < 0.0 and c_min <= 1e-12 * gnorm:
        # Possible hard case: evaluate the secular function at the pole
        # with the leading eigencomponents dropped.
        d = lam[~in_min] + lo
        y = np.zeros_like(c)
        y[~in_min] = -c[~in_min] / d
        ny = math.sqrt(y @ y)
        if sigma * ny <= lo:
            tau = math.sqrt(max((lo / sigma) ** 2 - ny * ny, 0.0))
            s = V @ y + tau * V[:, int(np.argmax(in_min))]
            return _finish(sub, s, lo, True, 0)

    # Solve in the shift t = nu - lo so that nu + lambda_1 keeps full relative
    # precision when the root sits just right of the pole.
    d0 = lam + lo if lam1 >= 0.0 else lam - lam1
    a = 0.0
    # Upper end of the bracket, from nu (lambda_1 + nu) <= sigma ||g||, written
    # without cancellation.
    b = 2.0 * sigma * gnorm / (math.sqrt(lam1 * lam1 + 4.0 * sigma * gnorm) + abs(lam1))
    t = b
    it = 0
    for it in range(1, max_iter + 1):
        den = d0 + t
        if den[0] <= 0.0:
            t = 0.5 * (a + b) if b > a else t * (1 + 1e-15) + 1e-300
            continue
        w = c / den
        ns = math.sqrt(float(w @ w))
        phi = sigma * ns - (lo + t)
        if abs(phi) <= 1e-14 * max(1.0, lo + t) or b - a <= 4e-16 * b:
            break
        if phi > 0:
            a = t
        else:
            b = t
        dphi = -sigma * float(np.sum(w * w / den)) / ns - 1.0 if ns > 0 else -1.0
        step = t - phi / dphi
        t = step if a < step < b else 0.5 * (a + b)
    else:
        raise SolverError(
            f"secular equation not solved in {max_iter} iterations "
            f"(sigma={sigma:g}, ||g||={gnorm:g}, lambda_min={lam1:g}, bracket=[{lo + a:g}, {lo + b:g}])"
        )
    nu = lo + t
    s = V @ (-c / (d0 + t))
    return _finish(sub, s, nu, False, it)


def random_subproblems(count: int, seed: int = 0, dims=(2, 5, 20), kappa_theta: float = 0.5):
    """Seeded random test instances, cycling through ``dims``.

    ``B`` is an indefinite symmetric matrix, ``g`` and ``sigma`` span several
    orders of magnitude.
    """
    rng = np.random.default_rng([seed, 0xC0B1C])
    for i in range(count):
        n = dims[i % len(dims)]
        A = rng.standard_normal((n, n))
        B = 0.5 * (A + A.T) * rng.uniform(0.1, 10.0)
        g = rng.standard_normal(n) * 10.0 ** rng.uniform(-3, 2)
        yield CubicSubproblem(g, B, float(10.0 ** rng.uniform(-2, 2)), kappa_theta)
