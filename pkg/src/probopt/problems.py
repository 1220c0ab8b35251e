"""Test objectives with the constants the complexity theory consumes.

Each builder returns an immutable :class:`Objective` holding value, gradient
and Hessian callables together with ``L``, ``L_H``, ``mu``, ``f*`` and, when
available, a level-set diameter function.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.stats import ortho_group

CONVEXITY_CLASSES = ("nonconvex", "convex", "strongly_convex")


@dataclass(frozen=True)
class Objective:
    """Smooth objective with analytic derivatives and theory constants.

    Attributes:
        name: Short identifier used in logs and configs.
        dim: Number of variables.
        value: Function value callable.
        grad: Gradient callable.
        hess: Hessian callable, returns a symmetric matrix.
        f_star: Global minimum value.
        lip_grad: Lipschitz constant ``L`` of the gradient.
        convexity: One of ``nonconvex``, ``convex``, ``strongly_convex``.
        x_star: A global minimizer when known.
        lip_hess: Lipschitz constant ``L_H`` of the Hessian when known.
        strong_mu: Strong convexity modulus, 0 otherwise.
        level_diameter: ``x0 -> D`` bounding ``||x - x*||`` on the sublevel set.
        domain_box: ``(dim, 2)`` array of bounds on which the constants hold.
        x0: Default starting point.
        constants_estimated: True when ``L`` and ``L_H`` come from sampling.
    """

    name: str
    dim: int
    value: Callable[[np.ndarray], float]
    grad: Callable[[np.ndarray], np.ndarray]
    hess: Callable[[np.ndarray], np.ndarray]
    f_star: float
    lip_grad: float
    convexity: str
    x_star: np.ndarray | None = None
    lip_hess: float | None = None
    strong_mu: float = 0.0
    level_diameter: Callable[[np.ndarray], float] | None = None
    domain_box: np.ndarray | None = None
    x0: np.ndarray | None = None
    constants_estimated: bool = False

    def __post_init__(self):
        if self.convexity not in CONVEXITY_CLASSES:
            raise ValueError(f"unknown convexity class {self.convexity!r}")

    def in_domain(self, x: np.ndarray) -> bool:
        """Whether ``x`` lies inside the declared domain box (always true if none)."""
        if self.domain_box is None:
            return True
        box = self.domain_box
        return bool((x >= box[:, 0]).all() and (x <= box[:, 1]).all())

    def start(self) -> np.ndarray:
        """Copy of the default starting point (all ones if none was declared)."""
        if self.x0 is None:
            return np.ones(self.dim)
        return np.array(self.x0, dtype=float)


@dataclass(frozen=True)
class FiniteSumObjective:
    """Sum of ``N`` component objectives.

    Attributes:
        components: The terms ``f_i``.
        aggregate: Objective for ``f = sum_i f_i``.
        variance_bound: ``w`` such that ``E||grad f_S - grad f||^2 <= w/|S|`` for
            the scaled batch estimator ``(N/|S|) sum_{i in S} grad f_i``.
    """

    components: tuple[Objective, ...]
    aggregate: Objective
    variance_bound: float
    centers: np.ndarray = field(repr=False, default=None)

    @property
    def num_terms(self) -> int:
        return len(self.components)


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


def make_quadratic(
    dim: int,
    condition_number: float,
    seed: int = 0,
    *,
    start_decay: float | None = None,
    start_scale: float = 1.0,
    smallest_eigenvalue: float = 1.0,
) -> Objective:
    """Strongly convex quadratic ``0.5 x^T Q x``.

    The eigenvalues of ``Q`` are geometrically spaced on ``[mu, mu * condition_number]``
    (``mu = 1`` unless ``smallest_eigenvalue`` says otherwise) and rotated by a seeded Haar-random orthogonal matrix. ``smallest_eigenvalue``
    rescales the whole spectrum, which is useful for ill-conditioned problems
    whose flat directions should look nearly singular at moderate tolerances.

    Args:
        dim: Number of variables.
        condition_number: Ratio of the largest to the smallest eigenvalue.
        seed: Seed for the rotation.
        start_decay: If given, the default start is
            ``start_scale * sum_i (lambda_i/mu)**(-start_decay) v_i``. Larger decay puts
            more weight on flat directions, which slows first-order methods
            down to their worst-case rate. If None the start is ``start_scale``
            times the all-ones vector.
        start_scale: Multiplier for the default start.
        smallest_eigenvalue: Spectrum lower end ``mu``; the upper end is
            ``mu * condition_number``.

    Raises:
        ValueError: If ``condition_number < 1`` or ``dim < 1``.
    """
    if dim < 1:
        raise ValueError("dim must be positive")
    if not condition_number >= 1:
        raise ValueError("condition_number must be >= 1")
    if not smallest_eigenvalue > 0:
        raise ValueError("smallest_eigenvalue must be positive")
    lam = np.geomspace(1.0, condition_number, dim) if dim > 1 else np.array([1.0])
    lam = lam * smallest_eigenvalue
    rng = np.random.default_rng(seed)
    V = ortho_group.rvs(dim, random_state=rng) if dim > 1 else np.ones((1, 1))
    if lam[0] == lam[-1]:
        Q = np.eye(dim) * lam[0]
    else:
        Q = (V * lam) @ V.T
        Q = 0.5 * (Q + Q.T)
    Q = _readonly(Q)
    mu, L = float(lam[0]), float(lam[-1])

    if start_decay is None:
        x0 = start_scale * np.ones(dim)
    else:
        x0 = start_scale * (V @ (lam / lam[0]) ** (-float(start_decay)))

    def value(x):
        return 0.5 * float(x @ (Q @ x))

    def grad(x):
        return Q @ x

    def hess(x):
        return Q

    def diameter(x0_):
        return math.sqrt(2.0 * value(np.asarray(x0_, dtype=float)) / mu)

    return Objective(
        name="quadratic",
        dim=dim,
        value=value,
        grad=grad,
        hess=hess,
        f_star=0.0,
        lip_grad=L,
        convexity="strongly_convex",
        x_star=_readonly(np.zeros(dim)),
        lip_hess=0.0,
        strong_mu=mu,
        level_diameter=diameter,
        x0=_readonly(x0),
    )


# Largest operator norm of the Hessian derivative of sqrt(1+|x|^2) is about
# 0.859 (attained radially at |x| ~ 0.41); 1.0 is a clean upper bound.
PSEUDO_HUBER_LIP_HESS = 1.0


def make_pseudo_huber(dim: int, *, x0: np.ndarray | None = None) -> Objective:
    """Convex pseudo-Huber function ``sqrt(1 + ||x||^2)`` with ``L = 1``."""
    if dim < 1:
        raise ValueError("dim must be positive")
    eye = np.eye(dim)

    def value(x):
        return math.sqrt(1.0 + float(x @ x))

    def grad(x):
        return x / math.sqrt(1.0 + float(x @ x))

    def hess(x):
        q = 1.0 + float(x @ x)
        return (eye - np.outer(x, x) / q) / math.sqrt(q)

    def diameter(x0_):
        fx = value(np.asarray(x0_, dtype=float))
        return math.sqrt(max(fx * fx - 1.0, 0.0))

    start = np.full(dim, 3.0) if x0 is None else np.asarray(x0, dtype=float)
    return Objective(
        name="pseudo_huber",
        dim=dim,
        value=value,
        grad=grad,
        hess=hess,
        f_star=1.0,
        lip_grad=1.0,
        convexity="convex",
        x_star=_readonly(np.zeros(dim)),
        lip_hess=PSEUDO_HUBER_LIP_HESS,
        level_diameter=diameter,
        x0=_readonly(start),
    )


def rosenbrock_default_box(dim: int, margin: float = 0.1) -> np.ndarray:
    """Box containing the sublevel set ``{f <= f(0)}`` of the chained Rosenbrock function.

    From ``f(0) = dim - 1`` every term is at most ``r^2`` with ``r = sqrt(dim-1)``,
    so ``|1 - x_i| <= r`` for leading coordinates and ``x_{i+1} >= x_i^2 - r/10``
    for trailing ones.
    """
    r = math.sqrt(dim - 1)
    box = np.empty((dim, 2))
    box[:, 0] = np.maximum(1.0 - r, -0.1 * r)
    box[:, 1] = 1.0 + r
    box[0, 0] = 1.0 - r
    box[-1] = (-0.1 * r, (1.0 + r) ** 2 + 0.1 * r)
    box[:, 0] -= margin
    box[:, 1] += margin
    return box


def _rosen_value(x):
    t = x[1:] - x[:-1] ** 2
    u = 1.0 - x[:-1]
    return float(100.0 * (t @ t) + u @ u)


def _rosen_grad(x):
    t = x[1:] - x[:-1] ** 2
    g = np.zeros_like(x)
    g[:-1] = -400.0 * x[:-1] * t - 2.0 * (1.0 - x[:-1])
    g[1:] += 200.0 * t
    return g


def _rosen2_value(x):
    # scalar path for the common 2-D case; several times faster than the vector form
    a, b = float(x[0]), float(x[1])
    t = b - a * a
    return 100.0 * t * t + (1.0 - a) ** 2


def _rosen2_grad(x):
    a, b = float(x[0]), float(x[1])
    t = b - a * a
    return np.array((-400.0 * a * t - 2.0 * (1.0 - a), 200.0 * t))


def _rosen_hess(x):
    n = x.size
    H = np.zeros((n, n))
    i = np.arange(n - 1)
    H[i, i] = 1200.0 * x[:-1] ** 2 - 400.0 * x[1:] + 2.0
    H[i + 1, i + 1] += 200.0
    H[i, i + 1] = H[i + 1, i] = -400.0 * x[:-1]
    return H


def _rosen_hess_batch(X):
    m, n = X.shape
    H = np.zeros((m, n, n))
    i = np.arange(n - 1)
    H[:, i, i] = 1200.0 * X[:, :-1] ** 2 - 400.0 * X[:, 1:] + 2.0
    H[:, i + 1, i + 1] += 200.0
    H[:, i, i + 1] = H[:, i + 1, i] = -400.0 * X[:, :-1]
    return H


def _rosen_dhess_batch(X, U):
    """Directional derivative of the Hessian at rows of X along rows of U."""
    m, n = X.shape
    D = np.zeros((m, n, n))
    i = np.arange(n - 1)
    D[:, i, i] = 2400.0 * X[:, :-1] * U[:, :-1] - 400.0 * U[:, 1:]
    D[:, i, i + 1] = D[:, i + 1, i] = -400.0 * U[:, :-1]
    return D


def _sample_box(box: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    dim = box.shape[0]
    lo, hi = box[:, 0], box[:, 1]
    if dim == 2:
        axes = [np.linspace(lo[j], hi[j], 201) for j in range(2)]
        return np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, 2)
    pts = [lo + (hi - lo) * rng.random((20000, dim))]
    if dim <= 12:
        corners = np.array(np.meshgrid(*[[0.0, 1.0]] * dim, indexing="ij")).reshape(dim, -1).T
        pts.append(lo + (hi - lo) * corners)
    return np.vstack(pts)


@functools.lru_cache(maxsize=32)
def _rosen_constants(dim: int, box_key: tuple) -> tuple[float, float]:
    box = np.array(box_key).reshape(dim, 2)
    rng = np.random.default_rng(0)
    X = _sample_box(box, rng)
    L = 0.0
    for chunk in np.array_split(X, max(1, X.shape[0] // 5000)):
        L = max(L, float(np.abs(np.linalg.eigvalsh(_rosen_hess_batch(chunk))).max()))
    if dim == 2:
        t = np.linspace(0.0, np.pi, 181)
        U = np.stack([np.cos(t), np.sin(t)], axis=1)
        # Closed-form spectral norm of the 2x2 symmetric derivative matrix.
        a = 2400.0 * X[:, :1] * U[None, :, 0] - 400.0 * U[None, :, 1]
        b = -400.0 * U[None, :, 0]
        LH = float((np.abs(a) / 2 + np.sqrt(a * a / 4 + b * b)).max())
    else:
        pts = X[rng.choice(X.shape[0], size=min(X.shape[0], 2000), replace=False)]
        U = rng.standard_normal((64, dim))
        U = np.vstack([U / np.linalg.norm(U, axis=1, keepdims=True), np.eye(dim)])
        LH = 0.0
        for u in U:
            D = _rosen_dhess_batch(pts, np.broadcast_to(u, pts.shape))
            LH = max(LH, float(np.abs(np.linalg.eigvalsh(D)).max()))
    return 1.1 * L, 1.1 * LH


def make_rosenbrock(
    dim: int = 2,
    domain_box: np.ndarray | None = None,
    *,
    x0: np.ndarray | None = None,
) -> Objective:
    """Chained Rosenbrock function ``sum_i 100 (x_{i+1} - x_i^2)^2 + (1 - x_i)^2``.

    ``L`` and ``L_H`` are sampled maxima over ``domain_box`` inflated by 1.1.

    Args:
        dim: Number of variables, at least 2.
        domain_box: ``(dim, 2)`` array or a pair of per-coordinate bound vectors.
            Defaults to a box containing the sublevel set of the origin.
        x0: Default start, the origin if omitted.

    Raises:
        ValueError: If ``dim < 2`` or the box is degenerate.
    """
    if dim < 2:
        raise ValueError("Rosenbrock needs dim >= 2")
    if domain_box is None:
        box = rosenbrock_default_box(dim)
    else:
        box = np.array(domain_box, dtype=float)
        if box.shape == (2, dim) and dim != 2:
            box = box.T
        if box.shape != (dim, 2):
            raise ValueError(f"domain_box must have shape ({dim}, 2)")
    if np.any(box[:, 1] <= box[:, 0]):
        raise ValueError("domain_box has zero or negative width")
    L, LH = _rosen_constants(dim, tuple(box.ravel().tolist()))
    start = np.zeros(dim) if x0 is None else np.asarray(x0, dtype=float)
    return Objective(
        name="rosenbrock",
        dim=dim,
        value=_rosen2_value if dim == 2 else _rosen_value,
        grad=_rosen2_grad if dim == 2 else _rosen_grad,
        hess=_rosen_hess,
        f_star=0.0,
        lip_grad=L,
        convexity="nonconvex",
        x_star=_readonly(np.ones(dim)),
        lip_hess=LH,
        domain_box=_readonly(box),
        x0=_readonly(start),
        constants_estimated=True,
    )


def make_finite_sum(
    dim: int,
    num_terms: int,
    heterogeneity: float,
    seed: int = 0,
    *,
    condition_number: float = 10.0,
) -> FiniteSumObjective:
    """Finite sum of quadratics ``f_i(x) = 0.5 (x - c_i)^T A (x - c_i)``.

    All components share the Hessian ``A`` and differ in their centers
    ``c_i = heterogeneity * z_i`` with ``z_i`` standard normal. Because the
    component gradients then differ by constant vectors, the dispersion and
    hence ``w`` do not depend on ``x``.
    """
    if num_terms < 1:
        raise ValueError("num_terms must be positive")
    if heterogeneity < 0:
        raise ValueError("heterogeneity must be nonnegative")
    rng = np.random.default_rng(seed)
    lam = np.geomspace(1.0, condition_number, dim) if dim > 1 else np.array([1.0])
    V = ortho_group.rvs(dim, random_state=rng) if dim > 1 else np.ones((1, 1))
    A = (V * lam) @ V.T
    A = _readonly(0.5 * (A + A.T))
    centers = _readonly(heterogeneity * rng.standard_normal((num_terms, dim)))
    N = num_terms

    def component(c):
        def value(x):
            d = x - c
            return 0.5 * float(d @ (A @ d))

        def grad(x):
            return A @ (x - c)

        return Objective(
            name="quadratic_term",
            dim=dim,
            value=value,
            grad=grad,
            hess=lambda x: A,
            f_star=0.0,
            lip_grad=float(lam[-1]),
            convexity="strongly_convex",
            x_star=c,
            lip_hess=0.0,
            strong_mu=float(lam[0]),
        )

    comps = tuple(component(centers[i]) for i in range(N))
    cbar = centers.mean(axis=0)
    dev = (centers - cbar) @ A
    f_star = 0.5 * float(np.einsum("ij,ij->", centers - cbar, dev))
    w = N * float(np.einsum("ij,ij->", dev, dev))
    AN = _readonly(N * A)
    mu, L = N * float(lam[0]), N * float(lam[-1])

    def value(x):
        d = x - centers
        return 0.5 * float(np.einsum("ij,ij->", d @ A, d))

    def grad(x):
        return AN @ x - A @ centers.sum(axis=0)

    def diameter(x0_):
        gap = value(np.asarray(x0_, dtype=float)) - f_star
        return math.sqrt(2.0 * max(gap, 0.0) / mu)

    aggregate = Objective(
        name="finite_sum",
        dim=dim,
        value=value,
        grad=grad,
        hess=lambda x: AN,
        f_star=f_star,
        lip_grad=L,
        convexity="strongly_convex",
        x_star=_readonly(cbar),
        lip_hess=0.0,
        strong_mu=mu,
        level_diameter=diameter,
        x0=_readonly(np.ones(dim)),
    )
    return FiniteSumObjective(comps, aggregate, w, centers)


def fd_gradient(fun: Callable[[np.ndarray], float], x: np.ndarray, h: float = 1e-5) -> np.ndarray:
    """Central finite-difference gradient of a scalar function."""
    x = np.asarray(x, dtype=float)
    g = np.empty_like(x)
    for i in range(x.size):
        e = np.zeros_like(x)
        e[i] = h * max(1.0, abs(x[i]))
        g[i] = (fun(x + e) - fun(x - e)) / (2.0 * e[i])
    return g


def fd_jacobian(fun: Callable[[np.ndarray], np.ndarray], x: np.ndarray, h: float = 1e-5) -> np.ndarray:
    """Central finite-difference Jacobian of a vector function (columns are partials)."""
    x = np.asarray(x, dtype=float)
    cols = []
    for i in range(x.size):
        e = np.zeros_like(x)
        e[i] = h * max(1.0, abs(x[i]))
        cols.append((fun(x + e) - fun(x - e)) / (2.0 * e[i]))
    return np.column_stack(cols)


def relative_error(a: np.ndarray, b: np.ndarray) -> float:
    """``||a - b|| / max(1, ||b||)``, the yardstick for derivative checks."""
    return float(np.linalg.norm(np.asarray(a) - np.asarray(b)) / max(1.0, np.linalg.norm(b)))
