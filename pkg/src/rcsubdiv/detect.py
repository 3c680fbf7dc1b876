"""Singularity detection, classification, and localization on sampled data.

Detection compares second-order differences ``d_j = |f_{j-1} - 2 f_j + f_{j+1}|``
against their median over all interior nodes: across a corner (jump in f')
``d_j`` scales like ``h * |[f']|`` while smooth regions contribute
``h^2 * |f''|``, so singular cells stand out ever more strongly as the grid is
refined.  A node is flagged when its difference is a strict local maximum
exceeding ``score_threshold`` times the median (plus a small absolute floor
that ignores pure rounding noise).  The flagged node is converted to a cell by
picking the side whose neighbouring difference is also elevated: the two
dominant differences bracket the singular cell.

Corners are then localized as the root of the difference between the cubic
interpolants built from four samples on each side of the suspicious cell; the
root is found by bisection and is exact for piecewise-cubic data.  Function
jumps cannot be localized from point samples at all, so their location is
taken to be the cell midpoint by convention.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .errors import DegenerateSmoothness, DetectionError, MultipleSingularitiesTooClose
from .grid import SampleSeries
from .jumps import one_sided_cubic_fit

__all__ = [
    "DetectionParams",
    "SingularityHypothesis",
    "critical_scale_corner",
    "critical_scale_jump",
    "detect_cells",
    "classify_kind",
    "locate_corner",
    "locate_jump_pointvalues",
]

# Relative floor under which second differences are treated as rounding noise.
_NOISE_FLOOR = 1e-10


@dataclass(frozen=True)
class DetectionParams:
    """Tunable knobs for detection and localization.

    The default threshold 2.5 separates the strongest smooth-region local
    maxima observed on the built-in test family (ratio <= 2.2) from genuine
    singular cells, which score 3.3 already at 16 samples and grow like 1/h.
    """

    score_threshold: float = 2.5
    min_separation_cells: int = 8
    bisection_tolerance: float = 1e-14

    def __post_init__(self):
        if not self.score_threshold > 1.0:
            raise ValueError("score_threshold must exceed 1")
        if self.min_separation_cells < 8:
            raise ValueError("min_separation_cells must be at least 8")
        if not self.bisection_tolerance > 0.0:
            raise ValueError("bisection_tolerance must be positive")


@dataclass(frozen=True)
class SingularityHypothesis:
    """A suspicious cell ``(x_j, x_{j+1})`` with optional kind and location."""

    cell_index: int
    kind: str | None = None
    location: float | None = None
    true_location_known: float | None = None
    detection_score: float = 0.0


def critical_scale_corner(jump_f_prime: float, sup_f2: float) -> float:
    """Resolution below which a corner is distinguishable: |[f']| / (4 sup|f''|)."""
    if sup_f2 < 0.0:
        raise ValueError("sup_f2 must be non-negative")
    if jump_f_prime == 0.0:
        return 0.0
    if sup_f2 == 0.0:
        raise DegenerateSmoothness("sup|f''| is zero; critical scale is unbounded")
    return abs(jump_f_prime) / (4.0 * sup_f2)


def critical_scale_jump(jump_f: float, sup_f1: float) -> float:
    """Resolution below which a function jump is distinguishable: |[f]| / (4 sup|f'|)."""
    if sup_f1 < 0.0:
        raise ValueError("sup_f1 must be non-negative")
    if jump_f == 0.0:
        return 0.0
    if sup_f1 == 0.0:
        raise DegenerateSmoothness("sup|f'| is zero; critical scale is unbounded")
    return abs(jump_f) / (4.0 * sup_f1)


def detect_cells(samples: SampleSeries, params: DetectionParams = DetectionParams()):
    """Flag cells suspected of containing a singularity (locations left unset).

    Returns hypotheses sorted by cell index.  Raises
    MultipleSingularitiesTooClose when two flagged cells violate the
    separation rule, and DetectionError when a flagged cell sits too close to
    the boundary to leave four clean samples on each side.
    """
    v = samples.values
    n = samples.grid.node_count
    if n < 3:
        raise ValueError("need at least 3 nodes to form second differences")
    d = np.abs(v[:-2] - 2.0 * v[1:-1] + v[2:])  # d[j-1] is the difference at node j
    floor = _NOISE_FLOOR * max(1.0, float(np.max(np.abs(v))))
    if not np.any(d > floor):
        return []
    med = float(np.median(d))
    cutoff = max(params.score_threshold * med, floor)

    flagged = []
    for j in range(1, n - 1):
        dj = d[j - 1]
        if dj <= cutoff:
            continue
        if j - 2 >= 0 and not dj > d[j - 2]:
            continue
        if j <= n - 3 and not dj > d[j]:
            continue
        flagged.append(j)

    hypotheses = []
    for j in flagged:
        left_nb = d[j - 2] if j - 2 >= 0 else -np.inf
        right_nb = d[j] if j <= n - 3 else -np.inf
        cell = j if right_nb >= left_nb else j - 1
        score = float(d[j - 1] / med) if med > 0.0 else float("inf")
        hypotheses.append(SingularityHypothesis(cell_index=cell, detection_score=score))

    hypotheses.sort(key=lambda hyp: hyp.cell_index)
    for a, b in zip(hypotheses, hypotheses[1:]):
        if b.cell_index - a.cell_index < params.min_separation_cells:
            raise MultipleSingularitiesTooClose(
                f"cells {a.cell_index} and {b.cell_index} are closer than "
                f"{params.min_separation_cells} cells"
            )
    for hyp in hypotheses:
        if hyp.cell_index < 3 or hyp.cell_index > n - 5:
            raise DetectionError(
                f"cell {hyp.cell_index} leaves fewer than 4 clean samples on one side"
            )
    return hypotheses


def _taylor_coeffs(samples, cell, x_star, side):
    c0, c1, c2, c3 = one_sided_cubic_fit(samples, cell, x_star, side)
    return np.array([c0, c1, c2, c3])


def classify_kind(samples: SampleSeries, hyp: SingularityHypothesis) -> SingularityHypothesis:
    """Decide corner vs function jump from jump estimates at the cell midpoint.

    A genuine function jump keeps |[f]| of order one while a corner's [f]
    estimate decays like h^4, so comparing against ``h * (|[f']| + 1)``
    separates the two at any usable resolution.
    """
    grid = samples.grid
    xm = grid.origin + (hyp.cell_index + 0.5) * grid.spacing
    left = _taylor_coeffs(samples, hyp.cell_index, xm, "left")
    right = _taylor_coeffs(samples, hyp.cell_index, xm, "right")
    j0, j1 = right[0] - left[0], right[1] - left[1]
    kind = "function_jump" if abs(j0) > grid.spacing * (abs(j1) + 1.0) else "corner"
    return replace(hyp, kind=kind)


def locate_corner(
    samples: SampleSeries,
    hyp: SingularityHypothesis,
    params: DetectionParams = DetectionParams(),
) -> SingularityHypothesis:
    """Localize a corner as the root of the difference of one-sided cubics.

    The two interpolating cubics are expanded about the cell midpoint and
    their difference H is bisected inside the cell to the configured absolute
    tolerance.  A root sitting on a cell endpoint (corner aligned with a node)
    is snapped exactly.  If H has no sign change across the cell the midpoint
    is used instead and the hypothesis is marked degraded (negative detection
    score).
    """
    grid = samples.grid
    h = grid.spacing
    xm = grid.origin + (hyp.cell_index + 0.5) * h
    diff = _taylor_coeffs(samples, hyp.cell_index, xm, "right") - _taylor_coeffs(
        samples, hyp.cell_index, xm, "left"
    )

    def big_h(t):
        return diff[0] + t * (diff[1] + t * (diff[2] / 2.0 + t * (diff[3] / 6.0)))

    lo, hi = -0.5 * h, 0.5 * h
    h_lo, h_hi = big_h(lo), big_h(hi)
    scale = abs(diff[0]) + abs(diff[1]) * 0.5 * h + abs(diff[2]) * (0.5 * h) ** 2 + abs(diff[3]) * (0.5 * h) ** 3
    snap = 64.0 * np.finfo(float).eps * max(scale, 1e-300)
    if abs(h_lo) <= snap:
        return replace(hyp, location=xm + lo)
    if abs(h_hi) <= snap:
        return replace(hyp, location=xm + hi)
    if h_lo * h_hi > 0.0:
        return replace(hyp, location=xm, detection_score=-abs(hyp.detection_score))
    while hi - lo > params.bisection_tolerance:
        mid = 0.5 * (lo + hi)
        h_mid = big_h(mid)
        if h_lo * h_mid <= 0.0:
            hi, h_hi = mid, h_mid
        else:
            lo, h_lo = mid, h_mid
    return replace(hyp, location=xm + 0.5 * (lo + hi))


def locate_jump_pointvalues(samples: SampleSeries, hyp: SingularityHypothesis) -> SingularityHypothesis:
    """Place a function jump at the midpoint of its cell (point values carry no more)."""
    grid = samples.grid
    xm = grid.origin + (hyp.cell_index + 0.5) * grid.spacing
    return replace(hyp, location=xm)
