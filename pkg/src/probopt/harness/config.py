"""Flat ``key = value`` experiment configuration files.

Keys are dotted (``algo.gamma``); ``#`` and ``;`` start comments. Lists are
comma separated. Every key is listed in ``KEYS``; anything else is an error.
"""

from __future__ import annotations

import configparser
from pathlib import Path

import numpy as np

from ..arc import ArcConfig
from ..errors import ConfigError
from ..linesearch import LsConfig, make_general_direction
from ..oracles import OracleConfig
from .experiment import ExperimentSpec, ProblemSpec


def _floats(text: str) -> tuple[float, ...]:
    return tuple(float(t) for t in text.replace(";", ",").split(",") if t.strip())


def _bool(text: str) -> bool:
    t = text.strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _int(text: str) -> int:
    v = float(text)
    if v != int(v):
        raise ValueError(f"not an integer: {text!r}")
    return int(v)


# key -> (parser, description)
KEYS: dict[str, tuple] = {
    "problem.name": (str, "quadratic, pseudo_huber, rosenbrock or finite_sum"),
    "problem.dim": (_int, "dimension"),
    "problem.condition_number": (float, "quadratic and finite_sum: eigenvalue ratio"),
    "problem.seed": (_int, "quadratic and finite_sum: construction seed"),
    "problem.smallest_eigenvalue": (float, "quadratic: smallest eigenvalue (default 1)"),
    "problem.start_decay": (float, "quadratic: start components scale as (lambda_i/lambda_1)^-decay"),
    "problem.start_scale": (float, "quadratic: start scale"),
    "problem.num_terms": (_int, "finite_sum: number of components"),
    "problem.heterogeneity": (float, "finite_sum: spread of component centers"),
    "problem.x0": (_floats, "pseudo_huber and rosenbrock: start point"),
    "algo.name": (str, "ls_steepest, ls_general, ls_fully_linear, arc or arc_fully_quadratic"),
    "algo.regime": (str, "line search: nonconvex, convex or strongly_convex (default: problem class)"),
    "algo.gamma": (float, "step-parameter update factor"),
    "algo.theta": (float, "sufficient-decrease / acceptance constant"),
    "algo.alpha0": (float, "line search: initial step size"),
    "algo.alpha_max": (float, "line search: largest step size"),
    "algo.sigma0": (float, "ARC: initial regularization"),
    "algo.sigma_min": (float, "ARC: smallest regularization"),
    "algo.kappa_theta": (float, "ARC: subproblem stopping tolerance"),
    "algo.max_iters": (_int, "iteration cap (default 1000000)"),
    "algo.kappa_delta": (float, "adaptive-radius variants: shrink factor"),
    "algo.xi0": (float, "adaptive-radius variants: initial radius parameter"),
    "algo.direction_diag": (_floats, "ls_general: diagonal of the SPD direction transform"),
    "oracle.p": (float, "accuracy probability when grid.p is absent"),
    "oracle.model": (str, "default, finite_difference or batch"),
    "oracle.corruption_mode": (str, "zero_vector, negated_gradient, random_huge or scaled_noise"),
    "oracle.kappa": (float, "line-search accuracy constant"),
    "oracle.kappa_g": (float, "ARC gradient accuracy constant"),
    "oracle.kappa_h": (float, "ARC Hessian accuracy constant"),
    "oracle.eta": (float, "fraction of the error radius used on accurate draws, in [0, 1)"),
    "oracle.seed": (_int, "seed for standalone oracle use"),
    "grid.eps": (_floats, "tolerances"),
    "grid.p": (_floats, "accuracy probabilities, each in (1/2, 1]"),
    "mc.replications": (_int, "runs per p (default 200)"),
    "mc.master_seed": (_int, "master seed (default 0)"),
    "mc.check_lemmas": (_bool, "also run iteration-level lemma checks (default false)"),
}

_LS_FIELDS = ("gamma", "theta", "alpha0", "alpha_max", "max_iters", "kappa_delta", "xi0")
_ARC_FIELDS = ("gamma", "theta", "sigma0", "sigma_min", "kappa_theta", "max_iters", "kappa_delta", "xi0")
_ORACLE_FIELDS = ("corruption_mode", "kappa", "kappa_g", "kappa_h", "eta", "seed")


def parse_text(text: str) -> dict:
    """Parse and type-convert config text; unknown or malformed keys raise ConfigError."""
    cp = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"),
                                   delimiters=("=", ":"))
    cp.optionxform = str
    try:
        cp.read_string("[root]\n" + text)
    except configparser.Error as exc:
        raise ConfigError(f"cannot parse config: {exc}") from exc
    if len(cp.sections()) != 1:
        raise ConfigError("config files are flat; section headers are not allowed")
    out = {}
    for key, raw in cp["root"].items():
        if key not in KEYS:
            raise ConfigError(f"unknown config key {key!r}")
        try:
            out[key] = KEYS[key][0](raw.strip())
        except ValueError as exc:
            raise ConfigError(f"bad value for {key}: {exc}") from exc
    return out


def spec_from_mapping(values: dict) -> ExperimentSpec:
    """Build an :class:`ExperimentSpec` from parsed keys."""
    for req in ("problem.name", "algo.name", "grid.eps"):
        if req not in values:
            raise ConfigError(f"missing required key {req}")
    sub = {k.split(".", 1)[1]: v for k, v in values.items() if k.startswith("problem.") and k != "problem.name"}
    if "x0" in sub:
        sub["x0"] = np.array(sub["x0"])
    problem = ProblemSpec(values["problem.name"], sub)

    algo = values["algo.name"]
    algo_kw = {k.split(".", 1)[1]: v for k, v in values.items() if k.startswith("algo.")}
    algo_kw.pop("name")
    regime = algo_kw.pop("regime", None)
    diag = algo_kw.pop("direction_diag", None)
    allowed = _ARC_FIELDS if algo.startswith("arc") else _LS_FIELDS
    extra = sorted(set(algo_kw) - set(allowed))
    if extra:
        raise ConfigError(f"keys not used by {algo}: {', '.join('algo.' + e for e in extra)}")
    if algo.startswith("arc"):
        cfg = ArcConfig(**algo_kw)
    else:
        if diag is not None:
            try:
                algo_kw["direction"] = make_general_direction(np.diag(diag))
            except ValueError as exc:
                raise ConfigError(str(exc)) from exc
        cfg = LsConfig(**algo_kw)

    okw = {f: values["oracle." + f] for f in _ORACLE_FIELDS if "oracle." + f in values}
    p_grid = values.get("grid.p") or (values.get("oracle.p", 1.0),)
    oracle = OracleConfig(p=p_grid[0], **okw)
    return ExperimentSpec(
        problem=problem,
        algorithm=algo,
        cfg=cfg,
        oracle=oracle,
        p_grid=tuple(p_grid),
        eps_grid=tuple(values["grid.eps"]),
        replications=values.get("mc.replications", 200),
        master_seed=values.get("mc.master_seed", 0),
        regime=regime,
        oracle_model=values.get("oracle.model", "default"),
        check_lemmas=values.get("mc.check_lemmas", False),
    )


def load_spec(path: str | Path) -> ExperimentSpec:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc
    return spec_from_mapping(parse_text(text))


def describe_keys() -> str:
    width = max(map(len, KEYS))
    return "\n".join(f"{k.ljust(width)}  {doc}" for k, (_, doc) in KEYS.items())
