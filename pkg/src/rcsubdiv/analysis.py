"""Error norms, grid-refinement order studies, and numerical regularity.

A refinement study runs one scheme over a dyadic ladder of resolutions,
measures the error of the level-``comparison_level`` reconstruction against
the exact test function, and reports observed orders
``log2(E_k / E_{k+1})``.  Error conventions follow the reconstruction kind:

* corner singularities (point values): sup norm against the exact function,
  excluding the fine cell containing the located singularity;
* function jumps (point values): the located jump sits at a cell midpoint, so
  the comparison relocates the exact discontinuity there and excludes one fine
  cell on each side;
* cell averages: sup norm over fine-level averages excluding cells that touch
  the interval between the true and the located singularity; the L1 norm is
  taken over the whole domain with no exclusion.

The linear scheme is always measured with no exclusion.

Resolution labels for the cell framework follow the published grid-label
convention: a row labelled N runs on N/2 cells.  Point-value rows use N
literally.

Numerical regularity estimates the Hoelder exponent of a scheme's output from
the decay of undivided differences across consecutive levels:

    beta_k = -log2( 2**k * ||D^{k+1} f^L||_inf / ||D^{k+1} f^{L-1}||_inf )

measured over a window on one smooth side of the singularity.  beta_1 near 1
indicates an (almost) C^2 limit; beta_2 near 0 the C^2- barrier of the
4-point scheme.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .detect import DetectionParams
from .grid import (
    CellAverageSeries,
    PiecewiseTestFunction,
    SampleSeries,
    UniformGrid1D,
    average,
    sample,
)
from .rc import RCResult, rc_cell_averages, rc_point_values

__all__ = [
    "RefinementReport",
    "RegularityReport",
    "error_inf",
    "error_l1",
    "relocated_evaluator",
    "refinement_study",
    "numerical_regularity",
    "report_csv_lines",
    "report_text_table",
    "regularity_csv_lines",
]

_ERROR_FLOOR = 1e-13  # below this, observed orders are meaningless


@dataclass
class RefinementReport:
    """Errors and observed orders of one scheme over a resolution ladder."""

    function_id: str
    framework: str
    scheme: str
    norm: str
    resolutions: list
    errors: list
    orders: list
    exclusion: str
    comparison_level: int
    notes: list = field(default_factory=list)


@dataclass
class RegularityReport:
    """Numerical Hoelder exponents per subdivision level."""

    function_id: str
    framework: str
    scheme: str
    levels: list
    beta1: list
    beta2: list
    window: tuple


def error_inf(exact, approx: SampleSeries, exclusions=()):
    """Max |exact(x) - approx| over the nodes outside the excluded intervals."""
    x = approx.grid.nodes()
    err = np.abs(np.asarray(exact(x), dtype=float) - approx.values)
    mask = np.ones(x.shape, dtype=bool)
    for lo, hi in exclusions:
        mask &= ~((x >= lo) & (x <= hi))
    if not np.any(mask):
        raise ValueError("exclusions remove every node")
    return float(np.max(err[mask]))


def error_l1(exact_fn: PiecewiseTestFunction, approx: CellAverageSeries):
    """h * sum |exact averages - approx averages| over all cells (no exclusion)."""
    exact = average(exact_fn, approx.grid).averages
    return float(approx.grid.spacing * np.sum(np.abs(exact - approx.averages)))


def relocated_evaluator(fn: PiecewiseTestFunction, new_breakpoints):
    """Exact function with its discontinuities moved to the located positions.

    Used for the jump convention: a jump reconstructed at the cell midpoint is
    compared against the exact pieces split at that midpoint.
    """
    new_breakpoints = tuple(float(b) for b in new_breakpoints)
    if len(new_breakpoints) != len(fn.breakpoints):
        raise ValueError("need one relocated position per breakpoint")

    def evaluate(x):
        x = np.asarray(x, dtype=float)
        idx = np.searchsorted(new_breakpoints, x, side="right")
        out = np.empty(x.shape, dtype=float)
        for i in range(len(fn.pieces)):
            mask = idx == i
            if np.any(mask):
                out[mask] = fn.pieces[i].value(x[mask])
        return out

    return evaluate


def _point_row(fn, n, scheme, comparison_level, params):
    grid = UniformGrid1D(0.0, 1.0 / n, n + 1)
    result = rc_point_values(sample(fn, grid), comparison_level, params,
                             detect_singularities=(scheme == "rc"))
    fine = result.levels[-1].series
    hf = fine.grid.spacing
    if scheme != "rc" or not result.hypotheses:
        return error_inf(fn, fine), "none", result
    located = [h.location for h in result.hypotheses]
    kinds = {h.kind for h in result.hypotheses}
    exclusions = [(loc - hf, loc + hf) for loc in located]
    if "function_jump" in kinds and len(located) == len(fn.breakpoints):
        exact = relocated_evaluator(fn, located)
        return error_inf(exact, fine, exclusions), "one fine cell each side; jumps relocated to x*", result
    return error_inf(fn, fine, exclusions), "fine cell containing x*", result


def _cell_row(fn, n_label, scheme, comparison_level, norm, params):
    cells = n_label // 2  # published grid-label convention
    grid = UniformGrid1D(0.0, 1.0 / cells, cells + 1)
    result = rc_cell_averages(average(fn, grid), comparison_level, params,
                              detect_singularities=(scheme == "rc"))
    approx = result.fine_averages
    if norm == "l1":
        return error_l1(fn, approx), "whole domain", result
    exact = average(fn, approx.grid).averages
    err = np.abs(exact - approx.averages)
    if scheme == "rc" and result.hypotheses and fn.breakpoints:
        x_star = result.hypotheses[0].location
        s_star = fn.breakpoints[0]
        lo, hi = min(x_star, s_star), max(x_star, s_star)
        edges = approx.grid.nodes()
        keep = (edges[1:] <= lo) | (edges[:-1] >= hi)
        return float(np.max(err[keep])), "cells off [s*, x*]", result
    return float(np.max(err)), "none", result


def refinement_study(
    fn: PiecewiseTestFunction,
    framework: str,
    scheme: str,
    resolutions,
    comparison_level: int = 10,
    norm: str = "inf",
    params: DetectionParams = DetectionParams(),
) -> RefinementReport:
    """Run one scheme over a resolution ladder and report errors and orders.

    Rows that fail (detection or fit errors) record a NaN error and a note
    instead of aborting the study.  Worker threads are capped by the
    RC_SUBDIV_THREADS environment variable (default 1); results are assembled
    in resolution order either way.
    """
    if framework not in ("point", "cell"):
        raise ValueError("framework must be 'point' or 'cell'")
    if scheme not in ("linear", "rc"):
        raise ValueError("scheme must be 'linear' or 'rc'")
    if norm not in ("inf", "l1"):
        raise ValueError("norm must be 'inf' or 'l1'")
    if norm == "l1" and framework != "cell":
        raise ValueError("the l1 norm applies to the cell framework")
    resolutions = [int(n) for n in resolutions]
    if any(b <= a for a, b in zip(resolutions, resolutions[1:])):
        raise ValueError("resolutions must be ascending")

    def run(n):
        try:
            if framework == "point":
                err, excl, _ = _point_row(fn, n, scheme, comparison_level, params)
            else:
                err, excl, _ = _cell_row(fn, n, scheme, comparison_level, norm, params)
            return err, excl, None
        except Exception as exc:
            return float("nan"), None, f"N={n}: {type(exc).__name__}: {exc}"

    workers = max(1, int(os.environ.get("RC_SUBDIV_THREADS", "1")))
    if workers == 1:
        rows = [run(n) for n in resolutions]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(run, resolutions))

    errors, notes, exclusion = [], [], "none"
    for err, excl, note in rows:
        errors.append(err)
        if excl is not None:
            exclusion = excl
        if note is not None:
            notes.append(note)

    orders = []
    for a, b in zip(errors, errors[1:]):
        if not (np.isfinite(a) and np.isfinite(b)) or a < _ERROR_FLOOR or b < _ERROR_FLOOR:
            orders.append(float("nan"))
        else:
            orders.append(math.log2(a / b))
    return RefinementReport(
        fn.identifier, framework, scheme, norm, resolutions, errors, orders,
        exclusion, comparison_level, notes,
    )


def numerical_regularity(
    fn: PiecewiseTestFunction,
    framework: str,
    scheme: str,
    levels=(5, 6, 7, 8, 9, 10),
    initial: int = 100,
    x_max: float | None = None,
    params: DetectionParams = DetectionParams(),
) -> RegularityReport:
    """Estimate beta_1, beta_2 of a scheme's output on a smooth window.

    The window keeps undivided-difference stencils whose nodes all lie left of
    ``x_max`` (default: the first breakpoint) and that do not straddle any
    correction anchor.  For the cell framework the measurement applies to the
    refined primitive, whose regularity exceeds the averages' by one order.
    """
    levels = sorted(int(l) for l in levels)
    if levels[0] < 1:
        raise ValueError("levels must be >= 1 (each estimate uses the level below)")
    if framework == "point":
        grid = UniformGrid1D(0.0, 1.0 / initial, initial + 1)
        result = rc_point_values(sample(fn, grid), levels[-1], params,
                                 detect_singularities=(scheme == "rc"))
    elif framework == "cell":
        grid = UniformGrid1D(0.0, 1.0 / initial, initial + 1)
        result = rc_cell_averages(average(fn, grid), levels[-1], params,
                                  detect_singularities=(scheme == "rc"))
    else:
        raise ValueError("framework must be 'point' or 'cell'")
    if x_max is None:
        x_max = fn.breakpoints[0] if fn.breakpoints else grid.node(grid.node_count - 1)
    anchors = [v.location for v in result.correction.vectors]

    def sup_diff(level_data, order):
        series = level_data.series
        x = series.grid.nodes()
        dd = np.abs(np.diff(series.values, n=order))
        left = x[: dd.shape[0]]
        width = order * series.grid.spacing
        keep = left + width < x_max
        for a in anchors:
            keep &= ~((left < a) & (a < left + width))
        if not np.any(keep):
            return float("nan")
        return float(np.max(dd[keep]))

    by_level = {lv.level: lv for lv in result.levels}
    beta1, beta2 = [], []
    for L in levels:
        row = []
        for k in (1, 2):
            hi = sup_diff(by_level[L], k + 1)
            lo = sup_diff(by_level[L - 1], k + 1)
            if not (np.isfinite(hi) and np.isfinite(lo)) or hi < _ERROR_FLOOR or lo < _ERROR_FLOOR:
                row.append(float("nan"))
            else:
                row.append(-math.log2(2.0 ** k * hi / lo))
        beta1.append(row[0])
        beta2.append(row[1])
    return RegularityReport(fn.identifier, framework, scheme, levels, beta1, beta2,
                            (grid.origin, float(x_max)))


# ---------------------------------------------------------------------------
# Report emission
# ---------------------------------------------------------------------------

_FMT = "{:.17g}"


def _cell_text(v, fmt="{:.4e}"):
    return "-" if v is None or not np.isfinite(v) else fmt.format(v)


def report_csv_lines(reports):
    """CSV lines for one or more reports sharing a resolution ladder.

    Layout matches the published tables: one block of (error, order) columns
    per scheme.
    """
    reports = list(reports)
    base = reports[0].resolutions
    for rep in reports:
        if rep.resolutions != base:
            raise ValueError("reports must share the resolution ladder")
    header = ["N"]
    for rep in reports:
        header += [f"E_{rep.scheme}_{rep.norm}", f"order_{rep.scheme}"]
    lines = [",".join(header)]
    for i, n in enumerate(base):
        row = [str(n)]
        for rep in reports:
            err = rep.errors[i]
            row.append("" if not np.isfinite(err) else _FMT.format(err))
            if i == 0:
                row.append("")
            else:
                order = rep.orders[i - 1]
                row.append("" if not np.isfinite(order) else _FMT.format(order))
        lines.append(",".join(row))
    return lines


def report_text_table(reports):
    """Human-readable fixed-width table for one or more reports."""
    reports = list(reports)
    lines = []
    head = f"{'N':>6}"
    for rep in reports:
        head += f" | {rep.scheme + ' E_' + rep.norm:>14} {'order':>8}"
    lines.append(head)
    lines.append("-" * len(head))
    for i, n in enumerate(reports[0].resolutions):
        row = f"{n:>6}"
        for rep in reports:
            order = "" if i == 0 else _cell_text(rep.orders[i - 1], "{:.4f}")
            row += f" | {_cell_text(rep.errors[i]):>14} {order:>8}"
        lines.append(row)
    for rep in reports:
        for note in rep.notes:
            lines.append(f"note [{rep.scheme}]: {note}")
    return lines


def regularity_csv_lines(reports):
    """CSV lines for regularity reports: one row per (beta, scheme)."""
    reports = list(reports)
    base = reports[0].levels
    for rep in reports:
        if rep.levels != base:
            raise ValueError("reports must share the level list")
    lines = ["quantity,scheme," + ",".join(f"L{L}" for L in base)]
    for which, attr in (("beta1", "beta1"), ("beta2", "beta2")):
        for rep in reports:
            vals = getattr(rep, attr)
            cells = ["" if not np.isfinite(v) else _FMT.format(v) for v in vals]
            lines.append(f"{which},{rep.scheme}," + ",".join(cells))
    return lines
