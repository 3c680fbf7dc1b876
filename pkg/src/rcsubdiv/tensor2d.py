"""Bivariate reconstruction via tensor-product subdivision with level-set masking.

Point values: each row is processed with the 1D machinery (detect, localize,
estimate jumps).  The per-row crossings define a singularity curve x = c(y),
fitted by least squares under the assumption that the curve crosses every row
exactly once and is nowhere parallel to the x-axis.  Rows are smoothed with
their own one-sided corrections and the smoothed matrix is refined by the
tensor-product 4-point scheme.  The correction field itself, stored as the
full cubic of every row (no one-sided cutoff), is analytic along x and is
refined along y by the same subdivision; the one-sided structure is restored
at the end by masking the refined field to zero on one side of the fitted
curve and adding it to the refined smooth part.

Cell averages: plain alternate-direction processing; every row is run through
the 1D cell-average pipeline for one level, then every column of the result,
repeated per level.  No curve fitting is involved.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .detect import DetectionParams, classify_kind, detect_cells, locate_corner, locate_jump_pointvalues
from .errors import RCError, RowWithMultipleSingularities, RowWithoutSingularity
from .grid import CellAverageSeries, SampleSeries, UniformGrid1D, cell_averages_from_primitive
from .jumps import CorrectionTerm, estimate_jumps, evaluate_correction
from .rc import _boundary_vectors, rc_cell_averages
from .subdivision import dd4_step_values

__all__ = [
    "Grid2DSamples",
    "SingularityCurve",
    "RC2DResult",
    "fit_curve",
    "rc2d_point_values",
    "rc2d_cell_averages",
    "write_matrix",
    "read_matrix",
]

_EXTENSION = 4

# Cubic extrapolation weights: value at offsets -1..-4 of the cubic through
# values at offsets 0..3 (offset 0 is the boundary value, increasing inward).
_EXTRAP = np.array(
    [
        [4.0, -6.0, 4.0, -1.0],
        [10.0, -20.0, 15.0, -4.0],
        [20.0, -45.0, 36.0, -10.0],
        [35.0, -84.0, 70.0, -20.0],
    ]
)


@dataclass(frozen=True)
class Grid2DSamples:
    """Point values on a tensor grid; ``values[r, i]`` sits at (x_i, y_r)."""

    x_grid: UniformGrid1D
    y_grid: UniformGrid1D
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        expected = (self.y_grid.node_count, self.x_grid.node_count)
        if values.shape != expected:
            raise ValueError(f"values must have shape {expected}, got {values.shape}")
        if not np.all(np.isfinite(values)):
            raise ValueError("values must be finite")
        object.__setattr__(self, "values", values)


@dataclass
class SingularityCurve:
    """Graph representation x = c(y) of the singularity curve.

    ``crossings`` are the per-row located positions; ``coefficients`` the
    least-squares polynomial in y (lowest degree first).
    """

    y_values: np.ndarray
    crossings: np.ndarray
    coefficients: np.ndarray
    residual: float

    def __call__(self, y):
        return np.polynomial.polynomial.polyval(np.asarray(y, dtype=float), self.coefficients)

    def signed_distance(self, x, y):
        """Positive right of the curve, negative left of it."""
        return np.asarray(x, dtype=float) - self(y)


@dataclass
class RC2DResult:
    """Refined surface plus the correction field diagnostics."""

    values: Grid2DSamples
    correction: Grid2DSamples | None
    masked_correction: Grid2DSamples | None
    curve: SingularityCurve | None
    row_hypotheses: list


def _row_pipeline(data: Grid2DSamples, params):
    """Detect/classify/locate/estimate per row; None when no row detects anything."""
    rows = []
    empty = 0
    for r in range(data.y_grid.node_count):
        series = SampleSeries(data.x_grid, data.values[r])
        hyps = detect_cells(series, params)
        if len(hyps) == 0:
            rows.append(None)
            empty += 1
            continue
        if len(hyps) > 1:
            raise RowWithMultipleSingularities(r, len(hyps))
        hyp = classify_kind(series, hyps[0])
        if hyp.kind == "function_jump":
            hyp = locate_jump_pointvalues(series, hyp)
        else:
            hyp = locate_corner(series, hyp, params)
        vec = estimate_jumps(series, hyp)
        left, right = _boundary_vectors(series)
        rows.append((hyp, vec, CorrectionTerm((left, vec, right))))
    if empty == len(rows):
        return None
    for r, row in enumerate(rows):
        if row is None:
            raise RowWithoutSingularity(r)
    return rows


def fit_curve(data: Grid2DSamples, params: DetectionParams = DetectionParams(), degree: int = 4) -> SingularityCurve:
    """Least-squares polynomial fit of the per-row singularity positions."""
    rows = _row_pipeline(data, params)
    if rows is None:
        raise RowWithoutSingularity(0, "no row produced a singularity hypothesis")
    y = data.y_grid.nodes()
    crossings = np.array([row[0].location for row in rows])
    return _fit_curve_from_crossings(y, crossings, degree)


def _fit_curve_from_crossings(y, crossings, degree):
    deg = min(degree, len(y) - 1)
    coeffs = np.polynomial.polynomial.polyfit(y, crossings, deg)
    resid = float(np.max(np.abs(np.polynomial.polynomial.polyval(y, coeffs) - crossings)))
    return SingularityCurve(y, crossings, coeffs, resid)


def _extend_ends(arr, axis):
    """Cubic extrapolation pads, 4 on each end along the given axis."""
    m = np.moveaxis(np.asarray(arr, dtype=float), axis, 0)
    head = _EXTRAP @ m[:4]
    tail = _EXTRAP @ m[-1:-5:-1]
    out = np.concatenate([head[::-1], m, tail], axis=0)
    return np.moveaxis(out, 0, axis)


def _dd4_matrix_axis(m, axis):
    """One zero-padded refinement step along an axis of a matrix."""
    m = np.moveaxis(np.asarray(m, dtype=float), axis, 0)
    n = m.shape[0]
    ext = np.concatenate([np.zeros((1,) + m.shape[1:]), m, np.zeros((1,) + m.shape[1:])], axis=0)
    out = np.empty((2 * n - 1,) + m.shape[1:])
    out[0::2] = m
    out[1::2] = (-ext[0:n - 1] + 9.0 * ext[1:n] + 9.0 * ext[2:n + 1] - ext[3:n + 2]) / 16.0
    return np.moveaxis(out, 0, axis)


def _refine_axis(matrix, axis, levels, trim=True):
    """Refine one axis ``levels`` times and trim the extension margin."""
    cur = matrix
    for _ in range(levels):
        cur = _dd4_matrix_axis(cur, axis)
    if trim:
        margin = _EXTENSION * 2 ** levels
        sl = [slice(None)] * cur.ndim
        sl[axis] = slice(margin, cur.shape[axis] - margin)
        cur = cur[tuple(sl)]
    return cur


def rc2d_point_values(
    data: Grid2DSamples,
    levels: int,
    params: DetectionParams = DetectionParams(),
    curve_degree: int = 4,
    zero_side: str = "left",
) -> RC2DResult:
    """Refine bivariate point values with row-wise correction and curve masking.

    ``zero_side`` selects on which side of the fitted curve the correction
    field is zeroed ("left": zero where x < c(y), mirroring the one-sided
    convention of the 1D correction).
    """
    if levels < 0:
        raise ValueError("levels must be non-negative")
    if zero_side not in ("left", "right"):
        raise ValueError("zero_side must be 'left' or 'right'")
    rows = _row_pipeline(data, params)
    ny, nx = data.values.shape
    hx, hy = data.x_grid.spacing, data.y_grid.spacing
    fine_x_grid = UniformGrid1D(data.x_grid.origin, hx * 0.5 ** levels, (nx - 1) * 2 ** levels + 1)
    fine_y_grid = UniformGrid1D(data.y_grid.origin, hy * 0.5 ** levels, (ny - 1) * 2 ** levels + 1)
    fine_x = fine_x_grid.nodes()

    if rows is None:
        # Smooth data: boundary handling only, no curve, no mask.
        terms = []
        for r in range(ny):
            series = SampleSeries(data.x_grid, data.values[r])
            left, right = _boundary_vectors(series)
            terms.append(CorrectionTerm((left, right)))
        curve = None
        correction_rows = np.zeros((ny, fine_x.shape[0]))
    else:
        terms = [row[2] for row in rows]
        curve = _fit_curve_from_crossings(
            data.y_grid.nodes(), np.array([row[0].location for row in rows]), curve_degree
        )
        correction_rows = np.vstack([row[1].cubic(fine_x) for row in rows])

    # Subtract the interior and boundary parts separately, mirroring the order
    # they are added back, so coarse nodes cancel to rounding error.
    x_nodes = data.x_grid.nodes()
    interior_eval = np.zeros((ny, nx))
    if rows is not None:
        interior_eval = np.vstack(
            [evaluate_correction(CorrectionTerm((row[1],)), x_nodes) for row in rows]
        )
    boundary_eval = np.vstack(
        [evaluate_correction(CorrectionTerm(_strip_interior(terms[r])), x_nodes) for r in range(ny)]
    )
    smoothed = (data.values - interior_eval) - boundary_eval
    x_left = data.x_grid.origin + np.arange(-_EXTENSION, 0) * hx
    x_right = data.x_grid.node(nx - 1) + np.arange(1, _EXTENSION + 1) * hx
    ext = np.hstack([
        np.vstack([-evaluate_correction(terms[r], x_left) for r in range(ny)]),
        smoothed,
        np.vstack([-evaluate_correction(terms[r], x_right) for r in range(ny)]),
    ])
    ext = _extend_ends(ext, axis=0)
    cur = ext
    for _ in range(levels):
        cur = _dd4_matrix_axis(cur, axis=1)
        cur = _dd4_matrix_axis(cur, axis=0)
    margin = _EXTENSION * 2 ** levels
    smooth_fine = cur[margin:cur.shape[0] - margin, margin:cur.shape[1] - margin]

    boundary_rows = np.vstack(
        [evaluate_correction(CorrectionTerm(_strip_interior(terms[r])), fine_x) for r in range(ny)]
    )
    boundary_fine = _refine_axis(_extend_ends(boundary_rows, axis=0), 0, levels)

    if rows is None:
        out = smooth_fine + boundary_fine
        values = Grid2DSamples(fine_x_grid, fine_y_grid, out)
        return RC2DResult(values, None, None, None, [])

    correction_fine = _refine_axis(_extend_ends(correction_rows, axis=0), 0, levels)
    sd = curve.signed_distance(fine_x[None, :], fine_y_grid.nodes()[:, None])
    off = sd < 0.0 if zero_side == "left" else sd > 0.0
    masked = np.where(off, 0.0, correction_fine)
    out = smooth_fine + boundary_fine + masked
    return RC2DResult(
        Grid2DSamples(fine_x_grid, fine_y_grid, out),
        Grid2DSamples(fine_x_grid, fine_y_grid, correction_fine),
        Grid2DSamples(fine_x_grid, fine_y_grid, masked),
        curve,
        [row[0] for row in rows],
    )


def _strip_interior(term: CorrectionTerm):
    vecs = term.vectors
    return (vecs[0], vecs[-1]) if len(vecs) > 2 else vecs


def rc2d_cell_averages(
    averages: np.ndarray,
    x_grid: UniformGrid1D,
    y_grid: UniformGrid1D,
    levels: int,
    params: DetectionParams = DetectionParams(),
) -> np.ndarray:
    """Alternate-direction cell-average reconstruction.

    ``averages[r, i]`` is the mean over x-cell i and y-cell r.  Each level
    runs the 1D cell-average pipeline over every row, then over every column
    of the result.  Per-line failures are re-raised with the line annotated.
    """
    cur = np.asarray(averages, dtype=float)
    if cur.shape != (y_grid.cell_count, x_grid.cell_count):
        raise ValueError("averages shape must match the cell counts of the grids")
    gx, gy = x_grid, y_grid
    for _ in range(levels):
        rows = []
        for r in range(cur.shape[0]):
            try:
                res = rc_cell_averages(CellAverageSeries(gx, cur[r]), 1, params)
            except RCError as exc:
                raise RCError(f"row {r}: {exc}") from exc
            rows.append(res.fine_averages.averages)
        gx = gx.refined()
        cur = np.vstack(rows)
        cols = []
        for i in range(cur.shape[1]):
            try:
                res = rc_cell_averages(CellAverageSeries(gy, cur[:, i]), 1, params)
            except RCError as exc:
                raise RCError(f"column {i}: {exc}") from exc
            cols.append(res.fine_averages.averages)
        gy = gy.refined()
        cur = np.vstack(cols).T
    return cur


# ---------------------------------------------------------------------------
# Matrix CSV
# ---------------------------------------------------------------------------

_FMT = "{:.17g}"


def write_matrix(path, values, x_grid: UniformGrid1D, y_grid: UniformGrid1D, kind="point2d"):
    """Row-major matrix CSV with both grids in the header."""
    values = np.asarray(values, dtype=float)
    header = (
        f"# kind={kind}"
        f", x_origin={_FMT.format(x_grid.origin)}, x_h={_FMT.format(x_grid.spacing)}, x_count={x_grid.node_count}"
        f", y_origin={_FMT.format(y_grid.origin)}, y_h={_FMT.format(y_grid.spacing)}, y_count={y_grid.node_count}"
    )
    with open(path, "w", encoding="ascii") as fh:
        fh.write(header + "\n")
        for row in values:
            fh.write(",".join(_FMT.format(v) for v in row) + "\n")


def read_matrix(path):
    """Read a matrix written by :func:`write_matrix`; returns (values, x_grid, y_grid, kind)."""
    with open(path, "r", encoding="ascii") as fh:
        header = fh.readline().strip()
        if not header.startswith("#"):
            raise ValueError("missing matrix header line")
        fields = {}
        for item in header.lstrip("#").split(","):
            key, _, val = item.strip().partition("=")
            fields[key] = val
        kind = fields["kind"]
        x_grid = UniformGrid1D(float(fields["x_origin"]), float(fields["x_h"]), int(fields["x_count"]))
        y_grid = UniformGrid1D(float(fields["y_origin"]), float(fields["y_h"]), int(fields["y_count"]))
        values = np.array([[float(v) for v in line.split(",")] for line in fh if line.strip()])
    return values, x_grid, y_grid, kind
