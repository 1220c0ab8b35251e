"""CSV emission for traces and Monte Carlo summaries.

Floats are written with ``repr`` so values round-trip exactly and output is
byte-stable across runs. Missing values are empty fields; booleans are 0/1.
"""

from __future__ import annotations

import csv
import io
import math
from typing import Iterable, TextIO

from ..trace import Trace
from .montecarlo import HittingTimeStats

TRACE_COLUMNS = ("k", "alpha_or_inv_sigma", "sigma", "f", "grad_norm", "step_norm",
                 "is_true", "is_successful", "xi", "rho")
SUMMARY_COLUMNS = ("p", "eps", "replications", "mean_N", "std_N", "ci_half", "bound", "nonhits")


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "1" if v else "0"
    if isinstance(v, int):
        return str(v)
    v = float(v)
    return "" if math.isnan(v) else repr(v)


def trace_rows(trace: Trace) -> Iterable[list[str]]:
    cols = trace.columns
    n = len(trace)
    empty = [None] * n

    def get(name):
        arr = cols.get(name)
        return empty if arr is None else arr.tolist()

    k, alpha, sigma, f = get("k"), get("alpha"), get("sigma"), get("f")
    gn, sn, tr, su, xi, rh = (get(c) for c in ("grad_norm", "step_norm", "is_true", "is_successful", "xi", "rho"))
    for i in range(n):
        yield [_fmt(int(k[i])), _fmt(alpha[i]), _fmt(sigma[i]), _fmt(f[i]), _fmt(gn[i]), _fmt(sn[i]),
               _fmt(bool(tr[i])), _fmt(bool(su[i])), _fmt(xi[i]), _fmt(rh[i])]


def write_trace_csv(trace: Trace, out: TextIO) -> None:
    w = csv.writer(out, lineterminator="\n")
    w.writerow(TRACE_COLUMNS)
    w.writerows(trace_rows(trace))


def write_summary_csv(rows: Iterable[HittingTimeStats], out: TextIO) -> None:
    w = csv.writer(out, lineterminator="\n")
    w.writerow(SUMMARY_COLUMNS)
    for s in rows:
        w.writerow([_fmt(s.p), _fmt(s.eps), _fmt(int(s.replications)), _fmt(s.mean_N), _fmt(s.std_N),
                    _fmt(s.ci_half), _fmt(s.bound), _fmt(int(s.nonhits))])


def trace_csv(trace: Trace) -> str:
    buf = io.StringIO()
    write_trace_csv(trace, buf)
    return buf.getvalue()


def summary_csv(rows: Iterable[HittingTimeStats]) -> str:
    buf = io.StringIO()
    write_summary_csv(rows, buf)
    return buf.getvalue()
