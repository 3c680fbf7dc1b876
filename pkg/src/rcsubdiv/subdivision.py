"""Linear 4-point interpolatory subdivision.

One refinement step keeps every node value and inserts midpoint values with
the stencil ``(-1/16, 9/16, 9/16, -1/16)``.  The rule reproduces cubic
polynomials, so interior errors on smooth data decay at fourth order under
repeated refinement.

Two boundary policies are provided.  ``zero_pad`` supplies literal zeros for
the missing stencil neighbours; it is the right choice when the caller has
already arranged for the data to blend smoothly into zero outside the domain
(see :mod:`rcsubdiv.rc`, which treats each boundary as a known discontinuity
and corrects for it).  ``boundary_as_discontinuity`` instead extrapolates each
end with the cubic through the four outermost values, which is the same
construction expressed directly in data space; a bare ``zero_pad`` run on data
that does not vanish at the ends will show boundary artifacts.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import TooFewNodes
from .grid import SampleSeries, UniformGrid1D

__all__ = [
    "BoundaryPolicy",
    "ZERO_PAD",
    "BOUNDARY_AS_DISCONTINUITY",
    "SubdivisionLevelData",
    "dd4_step",
    "dd4_refine",
    "dd4_step_values",
]

_MODES = ("zero_pad", "boundary_as_discontinuity")


@dataclass(frozen=True)
class BoundaryPolicy:
    """How to supply the virtual neighbours a boundary stencil needs."""

    mode: str = "zero_pad"

    def __post_init__(self):
        if self.mode not in _MODES:
            raise ValueError(f"mode must be one of {_MODES}")


ZERO_PAD = BoundaryPolicy("zero_pad")
BOUNDARY_AS_DISCONTINUITY = BoundaryPolicy("boundary_as_discontinuity")


@dataclass(frozen=True)
class SubdivisionLevelData:
    """Data at one refinement level; level k lives on spacing h * 2**-k."""

    level: int
    series: SampleSeries


def _cubic_end_pad(v0, v1, v2, v3):
    # cubic through four consecutive values, evaluated one step before v0
    return 4.0 * v0 - 6.0 * v1 + 4.0 * v2 - v3


def dd4_step_values(values: np.ndarray, pad_left: float = 0.0, pad_right: float = 0.0) -> np.ndarray:
    """One refinement step on a bare value array with explicit single-node pads."""
    values = np.asarray(values, dtype=float)
    n = values.shape[0]
    if n < 4:
        raise TooFewNodes(f"need at least 4 nodes for the 4-point stencil, got {n}")
    ext = np.empty(n + 2)
    ext[0] = pad_left
    ext[1:-1] = values
    ext[-1] = pad_right
    out = np.empty(2 * n - 1)
    out[0::2] = values
    out[1::2] = (-ext[0:n - 1] + 9.0 * ext[1:n] + 9.0 * ext[2:n + 1] - ext[3:n + 2]) / 16.0
    return out


def dd4_step(series: SampleSeries, policy: BoundaryPolicy = ZERO_PAD) -> SampleSeries:
    """One subdivision step; node values are copied bit-exactly, midpoints inserted."""
    v = series.values
    if series.grid.node_count < 4:
        raise TooFewNodes(f"need at least 4 nodes, got {series.grid.node_count}")
    if policy.mode == "zero_pad":
        pl = pr = 0.0
    else:
        pl = _cubic_end_pad(v[0], v[1], v[2], v[3])
        pr = _cubic_end_pad(v[-1], v[-2], v[-3], v[-4])
    return SampleSeries(series.grid.refined(), dd4_step_values(v, pl, pr))


def dd4_refine(series: SampleSeries, levels: int, policy: BoundaryPolicy = ZERO_PAD):
    """Iterate :func:`dd4_step`; returns SubdivisionLevelData for levels 0..levels."""
    if levels < 0:
        raise ValueError("levels must be non-negative")
    out = [SubdivisionLevelData(0, series)]
    for k in range(levels):
        out.append(SubdivisionLevelData(k + 1, dd4_step(out[-1].series, policy)))
    return out
