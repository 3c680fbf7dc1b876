"""End-to-end regularization-correction pipelines.

Point values: detect suspicious cells, classify and localize each singularity,
estimate its jump vector, subtract the summed one-sided cubic correction from
the data, refine the smoothed data with the linear 4-point scheme, and add the
correction back at every fine node.  The output interpolates the input, keeps
the linear scheme's smoothness away from singularities, and reproduces
piecewise cubics exactly.

Cell averages: the same pipeline applied to the primitive (running integral)
of the averages.  A jump in the function appears as a corner of the primitive,
so localization always goes through the corner root-finder; fine-scale
averages are recovered from divided differences of the refined primitive.

Both domain endpoints are treated as known discontinuities against a zero
exterior: the data is conceptually extended by zero outside the domain, the
one-sided cubic fit at each end supplies the corresponding jump vector, and
the smoothed extension (zero on the left, the negated correction tail on the
right) is what the subdivision stencils see near the ends.  The right-end
vector is marked inactive at its own anchor so it never alters values inside
the domain; it only shapes the virtual exterior.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, replace

import numpy as np

from .detect import (
    DetectionParams,
    SingularityHypothesis,
    classify_kind,
    detect_cells,
    locate_corner,
    locate_jump_pointvalues,
)
from .errors import TooFewNodes
from .grid import (
    CellAverageSeries,
    SampleSeries,
    UniformGrid1D,
    cell_averages_from_primitive,
    primitive,
    write_series,
)
from .jumps import (
    CorrectionTerm,
    JumpVector,
    estimate_jumps,
    evaluate_correction,
    one_sided_cubic_fit,
    smooth_data,
)
from .subdivision import SubdivisionLevelData, dd4_step_values

__all__ = ["RCResult", "rc_point_values", "rc_cell_averages", "save_result"]

_EXTENSION = 4  # virtual nodes kept on each side of the domain during refinement


@dataclass
class RCResult:
    """Everything a pipeline run produced.

    ``levels[k]`` holds the corrected reconstruction at spacing ``h * 2**-k``;
    ``smoothed_levels`` the refined smoothed data (diagnostics).  For the
    cell-average pipeline the level data approximates the primitive and
    ``fine_averages`` carries the recovered averages at the finest level.
    """

    levels: list
    smoothed_levels: list
    hypotheses: list
    correction: CorrectionTerm
    fine_averages: CellAverageSeries | None = None


def _boundary_vectors(samples: SampleSeries):
    """Jump vectors for the two domain ends, treated as known discontinuities.

    Fitting the outermost four samples gives the one-sided expansion of the
    data at each end; against a zero exterior the jump vector at the left end
    is that expansion itself and at the right end its negative.  The right
    vector is inactive at its own location, so it contributes nothing at any
    node inside the domain.
    """
    grid = samples.grid
    n = grid.node_count
    left_fit = one_sided_cubic_fit(samples, -1, grid.origin, "right")
    right_fit = one_sided_cubic_fit(samples, n - 1, grid.node(n - 1), "left")
    left = JumpVector(grid.origin, *left_fit)
    right = JumpVector(grid.node(n - 1), *(-c for c in right_fit), include_at_location=False)
    return left, right


def _locate(samples, hyp, params):
    if hyp.kind == "function_jump":
        return locate_jump_pointvalues(samples, hyp)
    return locate_corner(samples, hyp, params)


def _build_correction(samples, located_hypotheses):
    interior = [estimate_jumps(samples, hyp) for hyp in located_hypotheses]
    left, right = _boundary_vectors(samples)
    return CorrectionTerm((left, *interior, right))


def _refine_corrected(smoothed: SampleSeries, term: CorrectionTerm, levels: int):
    """Refine smoothed data with the zero-extended stencil picture.

    The smoothed data is extended by ``_EXTENSION`` virtual nodes per side
    holding the smoothed values of the zero exterior, i.e. minus the
    correction tail (identically zero on the left).  Plain zero padding
    beyond the extension cannot reach back into the domain: the contaminated
    margin shrinks by two cells of the current spacing per step and never
    crosses the extension width.
    """
    grid = smoothed.grid
    n_cells = grid.cell_count
    h = grid.spacing
    x_left = grid.origin + np.arange(-_EXTENSION, 0) * h
    x_right = grid.node(grid.node_count - 1) + np.arange(1, _EXTENSION + 1) * h
    ext = np.concatenate([
        -evaluate_correction(term, x_left),
        smoothed.values,
        -evaluate_correction(term, x_right),
    ])

    smoothed_levels = [SubdivisionLevelData(0, smoothed)]
    corrected_levels = [
        SubdivisionLevelData(
            0, SampleSeries(grid, smoothed.values + evaluate_correction(term, grid.nodes()))
        )
    ]
    cur = ext
    for k in range(1, levels + 1):
        cur = dd4_step_values(cur)
        margin = _EXTENSION * 2 ** k
        count = n_cells * 2 ** k + 1
        grid_k = UniformGrid1D(grid.origin, h * 0.5 ** k, count)
        vals = cur[margin:margin + count]
        smoothed_levels.append(SubdivisionLevelData(k, SampleSeries(grid_k, vals)))
        corrected = vals + evaluate_correction(term, grid_k.nodes())
        corrected_levels.append(SubdivisionLevelData(k, SampleSeries(grid_k, corrected)))
    return corrected_levels, smoothed_levels


def rc_point_values(
    samples: SampleSeries,
    levels: int,
    params: DetectionParams = DetectionParams(),
    detect_singularities: bool = True,
) -> RCResult:
    """Run the full pipeline on point values.

    With ``detect_singularities=False`` (or when detection finds nothing) the
    correction holds only the two boundary vectors and the result is the
    linear 4-point scheme on boundary-corrected data.
    """
    if samples.grid.node_count < 8:
        raise TooFewNodes("pipeline needs at least 8 nodes")
    if levels < 0:
        raise ValueError("levels must be non-negative")
    hypotheses = detect_cells(samples, params) if detect_singularities else []
    located = []
    for hyp in hypotheses:
        hyp = classify_kind(samples, hyp)
        located.append(_locate(samples, hyp, params))
    term = _build_correction(samples, located)
    corrected_levels, smoothed_levels = _refine_corrected(smooth_data(samples, term), term, levels)
    return RCResult(corrected_levels, smoothed_levels, located, term)


def rc_cell_averages(
    cells: CellAverageSeries,
    levels: int,
    params: DetectionParams = DetectionParams(),
    detect_singularities: bool = True,
) -> RCResult:
    """Run the pipeline on cell averages through the primitive.

    Function jumps become corners of the primitive, so every hypothesis is
    localized with the corner root-finder (the intersection of the two
    one-sided cubics).  ``fine_averages`` holds the averages recovered at the
    finest level.
    """
    prim = primitive(cells)
    if prim.grid.node_count < 8:
        raise TooFewNodes("pipeline needs at least 8 cells")
    if levels < 0:
        raise ValueError("levels must be non-negative")
    hypotheses = detect_cells(prim, params) if detect_singularities else []
    located = []
    for hyp in hypotheses:
        hyp = classify_kind(prim, hyp)
        located.append(locate_corner(prim, replace(hyp, kind="corner"), params))
    term = _build_correction(prim, located)
    corrected_levels, smoothed_levels = _refine_corrected(smooth_data(prim, term), term, levels)
    fine = cell_averages_from_primitive(corrected_levels[-1].series)
    return RCResult(corrected_levels, smoothed_levels, located, term, fine_averages=fine)


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------

_FMT = "{:.17g}"


def save_result(result: RCResult, directory, timings: dict | None = None):
    """Write a result to a directory: levels/*.csv, hypotheses.csv, jumps.csv, meta.

    Timings (if given) go to a separate file so the data files stay
    byte-reproducible across runs.
    """
    os.makedirs(os.path.join(directory, "levels"), exist_ok=True)
    for lv in result.levels:
        write_series(os.path.join(directory, "levels", f"level_{lv.level:02d}.csv"), lv.series)
    if result.fine_averages is not None:
        write_series(os.path.join(directory, "fine_averages.csv"), result.fine_averages)

    with open(os.path.join(directory, "hypotheses.csv"), "w", encoding="ascii") as fh:
        fh.write("cell_index,kind,x_star,score\n")
        for hyp in result.hypotheses:
            loc = "" if hyp.location is None else _FMT.format(hyp.location)
            fh.write(f"{hyp.cell_index},{hyp.kind},{loc},{_FMT.format(hyp.detection_score)}\n")

    with open(os.path.join(directory, "jumps.csv"), "w", encoding="ascii") as fh:
        fh.write("x_star,j0,j1,j2,j3\n")
        for vec in result.correction.vectors:
            fh.write(
                ",".join(_FMT.format(v) for v in (vec.location, vec.jump0, vec.jump1, vec.jump2, vec.jump3))
                + "\n"
            )

    base = result.levels[0].series.grid
    with open(os.path.join(directory, "meta.txt"), "w", encoding="ascii") as fh:
        fh.write(f"levels={result.levels[-1].level}\n")
        fh.write(f"origin={_FMT.format(base.origin)}\n")
        fh.write(f"h={_FMT.format(base.spacing)}\n")
        fh.write(f"nodes={base.node_count}\n")
        fh.write("policy=boundary_as_discontinuity\n")
        fh.write(f"singularities={len(result.hypotheses)}\n")
    if timings:
        with open(os.path.join(directory, "timings.txt"), "w", encoding="ascii") as fh:
            for key, val in timings.items():
                fh.write(f"{key}={val:.6f}\n")
