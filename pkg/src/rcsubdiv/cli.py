"""Command-line front end.

Subcommands
-----------
gen    write sampled test data (1D series or 2D matrix CSV)
rc     run a reconstruction pipeline on a series CSV, write a result directory
table  run a published convergence/regularity study and write its CSV
fig    write plot-ready CSV bundles for the published figures

Exit codes: 0 ok, 2 input error, 3 detection failure, 4 numerical failure.
All data outputs are deterministic; wall-clock timings go to separate files
that can be excluded from golden comparisons.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
import time

import numpy as np

from . import analysis
from .detect import DetectionParams
from .errors import DegenerateSmoothness, DetectionError, IllConditioned, RCError
from .errors import TooFewNodes
from .grid import (
    CellAverageSeries,
    SampleSeries,
    UniformGrid1D,
    average,
    circle_split_values,
    primitive,
    quadrant_cell_averages,
    read_series,
    sample,
    test_function,
    write_series,
)
from .rc import rc_cell_averages, rc_point_values, save_result
from .tensor2d import Grid2DSamples, rc2d_cell_averages, rc2d_point_values, write_matrix

_FMT = "{:.17g}"
_TABLE_IDS = (1, 2, 3, 4, 5)
_FIG_IDS = tuple(range(1, 11))


class _InputError(Exception):
    pass


def _params(threshold):
    if threshold is None:
        return DetectionParams()
    return DetectionParams(score_threshold=threshold)


def _read_config(path, allowed):
    if path is None:
        return {}
    out = {}
    try:
        with open(path, "r", encoding="ascii") as fh:
            for line in fh:
                line = line.strip()
                if not line or line.startswith("#"):
                    continue
                key, sep, val = line.partition("=")
                if not sep:
                    raise _InputError(f"config line {line!r} is not key=value")
                key = key.strip()
                if key not in allowed:
                    raise _InputError(f"unknown config key {key!r} (allowed: {sorted(allowed)})")
                out[key] = val.strip()
    except OSError as exc:
        raise _InputError(f"cannot read config: {exc}") from exc
    return out


# ---------------------------------------------------------------------------
# gen
# ---------------------------------------------------------------------------

def _cmd_gen(args):
    n = args.n
    if n is None or n < 2:
        raise _InputError(f"bad n: {n}")
    if args.function in ("exp1", "exp2", "exp3", "exp4"):
        fn = test_function(args.function, a=args.a)
        grid = UniformGrid1D(0.0, 1.0 / n, n + 1)
        series = sample(fn, grid) if args.framework == "point" else average(fn, grid)
        write_series(args.out, series)
        return 0
    if args.function == "exp2D_point":
        if args.framework != "point":
            raise _InputError("exp2D_point provides point values only")
        grid = UniformGrid1D(0.0, 1.0 / n, n + 1)
        xs = grid.nodes()
        write_matrix(args.out, circle_split_values(xs[None, :], xs[:, None]), grid, grid, "point2d")
        return 0
    if args.function == "exp2D":
        if args.framework != "cell":
            raise _InputError("exp2D provides cell averages only")
        grid = UniformGrid1D(0.0, 1.0 / n, n + 1)
        write_matrix(args.out, quadrant_cell_averages(n), grid, grid, "cell2d")
        return 0
    raise _InputError(f"unknown function {args.function!r}")


# ---------------------------------------------------------------------------
# rc
# ---------------------------------------------------------------------------

def _cmd_rc(args):
    try:
        series = read_series(args.infile)
    except (OSError, ValueError) as exc:
        raise _InputError(f"cannot read input series: {exc}") from exc
    params = _params(args.threshold)
    t0 = time.perf_counter()
    if isinstance(series, SampleSeries):
        result = rc_point_values(series, args.levels, params,
                                 detect_singularities=not args.no_detect)
    else:
        result = rc_cell_averages(series, args.levels, params,
                                  detect_singularities=not args.no_detect)
    elapsed = time.perf_counter() - t0
    save_result(result, args.out_dir, timings={"pipeline_seconds": elapsed})
    return 0


# ---------------------------------------------------------------------------
# table
# ---------------------------------------------------------------------------

def _run_table(table_id, config):
    comparison = int(config.get("comparison_level", 10))
    params = _params(float(config["threshold"]) if "threshold" in config else None)
    if table_id == 1:
        initial = int(config.get("initial", 100))
        fn = test_function("exp1", a=0.0)
        x_max = fn.breakpoints[0]
        reports = [
            analysis.numerical_regularity(fn, "point", scheme, levels=(5, 6, 7, 8, 9, 10),
                                          initial=initial, x_max=x_max, params=params)
            for scheme in ("rc", "linear")
        ]
        return analysis.regularity_csv_lines(reports), None
    resolutions = [int(v) for v in config.get("resolutions", "").split()] or None
    if table_id == 2:
        fn = test_function("exp1", a=0.0)
        ns = resolutions or [16, 32, 64, 128, 256, 512, 1024, 2048]
        reports = [analysis.refinement_study(fn, "point", s, ns, comparison, "inf", params)
                   for s in ("rc", "linear")]
    elif table_id == 3:
        fn = test_function("exp1", a=10.0)
        ns = resolutions or [16, 32, 64, 128, 256, 512, 1024, 2048]
        reports = [analysis.refinement_study(fn, "point", "rc", ns, comparison, "inf", params)]
    elif table_id == 4:
        fn = test_function("exp3")
        ns = resolutions or [64, 128, 256, 512, 1024, 2048]
        reports = [analysis.refinement_study(fn, "cell", s, ns, comparison, "inf", params)
                   for s in ("rc", "linear")]
    elif table_id == 5:
        fn = test_function("exp3")
        ns = resolutions or [64, 128, 256, 512, 1024, 2048]
        reports = [analysis.refinement_study(fn, "cell", s, ns, comparison, "l1", params)
                   for s in ("rc", "linear")]
    else:
        raise _InputError(f"unknown table {table_id}")
    return analysis.report_csv_lines(reports), analysis.report_text_table(reports)


def _cmd_table(args):
    if args.table_id not in _TABLE_IDS:
        raise _InputError(f"unknown table {args.table_id} (have {_TABLE_IDS})")
    config = _read_config(args.config, {"comparison_level", "threshold", "initial", "resolutions"})
    t0 = time.perf_counter()
    csv_lines, text_lines = _run_table(args.table_id, config)
    elapsed = time.perf_counter() - t0
    with open(args.out, "w", encoding="ascii") as fh:
        fh.write("\n".join(csv_lines) + "\n")
    if text_lines:
        with open(args.out + ".txt", "w", encoding="ascii") as fh:
            fh.write("\n".join(text_lines) + "\n")
        print("\n".join(text_lines))
    with open(args.out + ".timings.txt", "w", encoding="ascii") as fh:
        fh.write(f"table_seconds={elapsed:.6f}\n")
    return 0


# ---------------------------------------------------------------------------
# fig
# ---------------------------------------------------------------------------

def _write_xy(path, x, y):
    with open(path, "w", encoding="ascii") as fh:
        fh.write("x,value\n")
        for xi, yi in zip(x, y):
            fh.write(f"{_FMT.format(xi)},{_FMT.format(yi)}\n")


def _series_bundle(out_dir, fn, n, levels, schemes, window=None):
    grid = UniformGrid1D(0.0, 1.0 / n, n + 1)
    series = sample(fn, grid)
    results = {s: rc_point_values(series, levels, detect_singularities=(s == "rc")) for s in schemes}
    fine_grid = results[schemes[0]].levels[-1].series.grid
    xf = fine_grid.nodes()
    keep = np.ones(xf.shape, bool) if window is None else (xf >= window[0]) & (xf <= window[1])
    _write_xy(os.path.join(out_dir, "exact.csv"), xf[keep], np.asarray(fn(xf))[keep])
    xc = grid.nodes()
    keep_c = np.ones(xc.shape, bool) if window is None else (xc >= window[0]) & (xc <= window[1])
    _write_xy(os.path.join(out_dir, "data.csv"), xc[keep_c], series.values[keep_c])
    for s, res in results.items():
        _write_xy(os.path.join(out_dir, f"{s}.csv"), xf[keep], res.levels[-1].series.values[keep])


def _cell_bundle(out_dir, fn, n, levels, schemes, window=None):
    grid = UniformGrid1D(0.0, 1.0 / n, n + 1)
    cells = average(fn, grid)
    mids = grid.cell_midpoints()
    keep_c = np.ones(mids.shape, bool) if window is None else (mids >= window[0]) & (mids <= window[1])
    _write_xy(os.path.join(out_dir, "data.csv"), mids[keep_c], cells.averages[keep_c])
    dense = UniformGrid1D(0.0, 1.0 / (n * 2 ** levels), n * 2 ** levels + 1)
    xd = dense.cell_midpoints()
    keep_d = np.ones(xd.shape, bool) if window is None else (xd >= window[0]) & (xd <= window[1])
    _write_xy(os.path.join(out_dir, "exact.csv"), xd[keep_d], np.asarray(fn(xd))[keep_d])
    for s in schemes:
        res = rc_cell_averages(cells, levels, detect_singularities=(s == "rc"))
        fm = res.fine_averages.grid.cell_midpoints()
        keep_f = np.ones(fm.shape, bool) if window is None else (fm >= window[0]) & (fm <= window[1])
        _write_xy(os.path.join(out_dir, f"{s}.csv"), fm[keep_f], res.fine_averages.averages[keep_f])


def _run_fig(fig_id, out_dir, config):
    os.makedirs(out_dir, exist_ok=True)
    n = int(config["n"]) if "n" in config else None
    levels = int(config["levels"]) if "levels" in config else None
    zoom = (0.35, 0.7)
    if fig_id == 1:
        fn = test_function("exp1", a=0.0)
        grid = UniformGrid1D(0.0, 1.0 / (n or 16), (n or 16) + 1)
        series = sample(fn, grid)
        result = rc_point_values(series, 0)
        _write_xy(os.path.join(out_dir, "original.csv"), grid.nodes(), series.values)
        _write_xy(os.path.join(out_dir, "smoothed.csv"), grid.nodes(),
                  result.smoothed_levels[0].series.values)
    elif fig_id == 2:
        fn = test_function("exp3")
        nn = n or 20
        grid = UniformGrid1D(0.0, 1.0 / nn, nn + 1)
        cells = average(fn, grid)
        result = rc_cell_averages(cells, levels or 5)
        _write_xy(os.path.join(out_dir, "averages.csv"), grid.cell_midpoints(), cells.averages)
        prim = primitive(cells)
        _write_xy(os.path.join(out_dir, "primitive.csv"), grid.nodes(), prim.values)
        _write_xy(os.path.join(out_dir, "smoothed_primitive.csv"), grid.nodes(),
                  result.smoothed_levels[0].series.values)
        fine = result.fine_averages
        _write_xy(os.path.join(out_dir, "reconstruction.csv"),
                  fine.grid.cell_midpoints(), fine.averages)
    elif fig_id in (3, 4):
        _series_bundle(out_dir, test_function("exp1", a=0.0), n or 16, levels or 5,
                       ("linear", "rc"), window=None if fig_id == 3 else zoom)
    elif fig_id == 5:
        _series_bundle(out_dir, test_function("exp2"), n or 100, levels or 5, ("rc",))
    elif fig_id == 6:
        _series_bundle(out_dir, test_function("exp4"), n or 100, levels or 5, ("rc",))
    elif fig_id == 7:
        nn = n or 32
        grid = UniformGrid1D(0.0, 1.0 / nn, nn + 1)
        xs = grid.nodes()
        data = Grid2DSamples(grid, grid, circle_split_values(xs[None, :], xs[:, None]))
        result = rc2d_point_values(data, levels or 1)
        write_matrix(os.path.join(out_dir, "data.csv"), data.values, grid, grid, "point2d")
        out = result.values
        write_matrix(os.path.join(out_dir, "subdivided.csv"), out.values,
                     out.x_grid, out.y_grid, "point2d")
        write_matrix(os.path.join(out_dir, "correction.csv"), result.correction.values,
                     out.x_grid, out.y_grid, "point2d")
        write_matrix(os.path.join(out_dir, "masked.csv"), result.masked_correction.values,
                     out.x_grid, out.y_grid, "point2d")
    elif fig_id in (8, 9):
        _cell_bundle(out_dir, test_function("exp3"), n or 20, levels or 5,
                     ("linear", "rc"), window=None if fig_id == 8 else zoom)
    elif fig_id == 10:
        nn = n or 32
        lv = levels or 1
        grid = UniformGrid1D(0.0, 1.0 / nn, nn + 1)
        data = quadrant_cell_averages(nn)
        write_matrix(os.path.join(out_dir, "data.csv"), data, grid, grid, "cell2d")
        fine = rc2d_cell_averages(data, grid, grid, lv)
        fgrid = grid
        for _ in range(lv):
            fgrid = fgrid.refined()
        write_matrix(os.path.join(out_dir, "rc.csv"), fine, fgrid, fgrid, "cell2d")
    else:
        raise _InputError(f"unknown figure {fig_id} (have {_FIG_IDS})")
    return 0


def _cmd_fig(args):
    if args.fig_id not in _FIG_IDS:
        raise _InputError(f"unknown figure {args.fig_id} (have {_FIG_IDS})")
    config = _read_config(args.config, {"n", "levels", "threshold"})
    t0 = time.perf_counter()
    _run_fig(args.fig_id, args.out_dir, config)
    with open(os.path.join(args.out_dir, "timings.txt"), "w", encoding="ascii") as fh:
        fh.write(f"fig_seconds={time.perf_counter() - t0:.6f}\n")
    return 0


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------

def _build_parser():
    parser = argparse.ArgumentParser(prog="rcsubdiv", description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="generate test data")
    gen.add_argument("function", help="exp1|exp2|exp3|exp4|exp2D_point|exp2D")
    gen.add_argument("--a", type=float, default=0.0, help="jump size for exp1")
    mode = gen.add_mutually_exclusive_group(required=True)
    mode.add_argument("--point", dest="framework", action="store_const", const="point")
    mode.add_argument("--cell", dest="framework", action="store_const", const="cell")
    gen.add_argument("--n", type=int, required=True, help="number of cells")
    gen.add_argument("--out", required=True)
    gen.set_defaults(func=_cmd_gen)

    rc = sub.add_parser("rc", help="run a reconstruction pipeline")
    rc.add_argument("--in", dest="infile", required=True)
    rc.add_argument("--levels", type=int, default=5)
    rc.add_argument("--threshold", type=float, default=None)
    rc.add_argument("--no-detect", action="store_true", help="linear scheme (boundary handling only)")
    rc.add_argument("--out-dir", required=True)
    rc.set_defaults(func=_cmd_rc)

    table = sub.add_parser("table", help="reproduce a published study table")
    table.add_argument("table_id", type=int)
    table.add_argument("--out", required=True)
    table.add_argument("--config", default=None, help="key=value overrides")
    table.set_defaults(func=_cmd_table)

    fig = sub.add_parser("fig", help="write plot-ready CSV for a published figure")
    fig.add_argument("fig_id", type=int)
    fig.add_argument("--out-dir", required=True)
    fig.add_argument("--config", default=None, help="key=value overrides")
    fig.set_defaults(func=_cmd_fig)
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except _InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (IllConditioned, DegenerateSmoothness) as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return 4
    except DetectionError as exc:
        print(f"detection error: {exc}", file=sys.stderr)
        return 3
    except TooFewNodes as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 2
    except RCError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (KeyError, ValueError, OSError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
