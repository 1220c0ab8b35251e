"""Per-iteration records of one algorithm realization.

Runs append to a :class:`TraceBuilder`, which stores columns in plain lists
so the inner loops stay cheap. The finished :class:`Trace` exposes numpy
columns and, on demand, :class:`IterationRecord` objects.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np

BASE_COLUMNS = ("k", "alpha", "f", "grad_norm", "step_norm", "is_true", "is_successful", "f_trial")
OPTIONAL_COLUMNS = ("sigma", "rho", "xi", "model_decrease", "trial_grad_norm", "shrink", "model_ok")


@dataclass(frozen=True)
class IterationRecord:
    """One iteration.

    ``alpha`` is the step parameter: the step size for line search and
    ``1/sigma`` for ARC. ``below_c`` is filled by diagnostics.
    """

    k: int
    alpha: float
    f: float
    grad_norm: float
    step_norm: float
    is_true: bool
    is_successful: bool
    f_trial: float
    sigma: float | None = None
    rho: float | None = None
    xi: float | None = None
    model_decrease: float | None = None
    trial_grad_norm: float | None = None
    shrink: bool = False
    model_ok: bool | None = None
    below_c: bool | None = None


class TraceBuilder:
    def __init__(self, columns: tuple[str, ...] = ()):
        # "k" is implied by position
        self.names = BASE_COLUMNS[1:] + tuple(columns)
        self.data: dict[str, list] = {name: [] for name in self.names}

    def append(self, **values: Any) -> None:
        for name in self.names:
            self.data[name].append(values.get(name))

    def __len__(self) -> int:
        return len(self.data["alpha"])


def _as_array(values: list) -> np.ndarray:
    if values and all(isinstance(v, (bool, np.bool_)) for v in values):
        return np.array(values, dtype=bool)
    return np.array([np.nan if v is None else v for v in values], dtype=float)


@dataclass
class Trace:
    """Record stream and outcome of one run.

    Attributes:
        algorithm: Name of the algorithm that produced the trace.
        event: Hitting event, ``grad`` (gradient norm at the incumbent),
            ``fgap`` (optimality gap at the incumbent) or ``arc_grad``
            (gradient norm at the point produced by a successful step).
        hits: Hitting index for every requested tolerance, None if not reached.
        columns: Per-iteration columns, see ``BASE_COLUMNS``.
        capped: True if the iteration limit stopped the run.
        x_final: Last incumbent.
        f_final: Its value.
        config: Algorithm configuration used.
    """

    algorithm: str
    event: str
    hits: dict[float, int | None]
    columns: dict[str, np.ndarray]
    capped: bool
    x_final: np.ndarray
    f_final: float
    config: Any = None
    f0: float = math.nan
    meta: dict = field(default_factory=dict)

    @classmethod
    def from_builder(cls, builder: TraceBuilder, **kw) -> "Trace":
        cols = {"k": np.arange(len(builder), dtype=np.int64)}
        cols.update((name, _as_array(vals)) for name, vals in builder.data.items())
        return cls(columns=cols, **kw)

    @property
    def eps(self) -> float:
        return min(self.hits)

    @property
    def n_eps(self) -> int | None:
        """Hitting index for the smallest requested tolerance."""
        return self.hits[self.eps]

    def __len__(self) -> int:
        return int(self.columns["k"].size)

    def col(self, name: str) -> np.ndarray | None:
        return self.columns.get(name)

    def prefix_length(self, eps: float | None = None) -> int:
        """Number of records that precede the hit for ``eps``, or all if it was not hit."""
        n = self.n_eps if eps is None else self.hits[eps]
        return len(self) if n is None else min(n, len(self))

    def record(self, i: int) -> IterationRecord:
        out = {}
        for name, arr in self.columns.items():
            v = arr[i]
            if arr.dtype == bool:
                out[name] = bool(v)
            elif name == "k":
                out[name] = int(v)
            else:
                out[name] = None if math.isnan(v) else float(v)
        for flag in ("is_true", "is_successful"):
            out[flag] = bool(out[flag])
        out["shrink"] = bool(out.get("shrink") or False)
        if out.get("model_ok") is not None:
            out["model_ok"] = bool(out["model_ok"])
        return IterationRecord(**out)

    @property
    def records(self) -> list[IterationRecord]:
        return [self.record(i) for i in range(len(self))]
