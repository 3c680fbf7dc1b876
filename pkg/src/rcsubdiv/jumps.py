"""Jump estimation via one-sided cubic Taylor fits, and the correction term.

Around an anchor ``x*`` inside cell ``(x_j, x_{j+1})`` the four samples on each
side determine two cubic Taylor expansions.  Writing each sample as

    f_i = c0 + c1*(x_i - x*) + c2/2*(x_i - x*)^2 + c3/6*(x_i - x*)^3

gives a 4x4 Vandermonde system per side whose unknowns are the one-sided value
and first three derivatives at ``x*``.  The right-minus-left differences
estimate the jumps of f, f', f'', f''' with accuracies O(h^4), O(h^3), O(h^2),
O(h).  The offsets are solved in units of h so the system's conditioning does
not degrade as h -> 0.

A jump vector defines the one-sided cubic correction

    T(x) = j0 + j1*(x - x*) + j2/2*(x - x*)^2 + j3/6*(x - x*)^3   for x >= x*,

and zero to the left.  Subtracting the summed correction of all known
singularities from sampled data removes the jumps up to the estimation error,
leaving data that a linear scheme can refine without oscillation; adding the
same term back afterwards restores the singularity structure.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import IllConditioned
from .grid import SampleSeries

__all__ = [
    "JumpVector",
    "CorrectionTerm",
    "one_sided_cubic_fit",
    "estimate_jumps",
    "evaluate_correction",
    "smooth_data",
]

_FACTORIALS = np.array([1.0, 1.0, 2.0, 6.0])
_COND_LIMIT = 1e12


@dataclass(frozen=True)
class JumpVector:
    """Estimated jumps of f, f', f'', f''' anchored at ``location``.

    ``include_at_location`` controls whether the correction is active at the
    anchor itself (half-open convention).  Interior singularities and the left
    domain end use True; the right domain end uses False so the correction
    never touches the last sample.
    """

    location: float
    jump0: float
    jump1: float
    jump2: float
    jump3: float
    side_values: tuple | None = None
    include_at_location: bool = True

    def __post_init__(self):
        vals = (self.location, self.jump0, self.jump1, self.jump2, self.jump3)
        if not all(np.isfinite(vals)):
            raise ValueError("jump vector entries must be finite")

    def cubic(self, x):
        """The correction cubic (without the one-sided cutoff)."""
        d = np.asarray(x, dtype=float) - self.location
        return self.jump0 + d * (self.jump1 + d * (self.jump2 / 2.0 + d * (self.jump3 / 6.0)))


@dataclass(frozen=True)
class CorrectionTerm:
    """Ordered collection of jump vectors; locations strictly increasing."""

    vectors: tuple = field(default=())

    def __post_init__(self):
        vectors = tuple(self.vectors)
        locs = [v.location for v in vectors]
        if any(b <= a for a, b in zip(locs, locs[1:])):
            raise ValueError("jump vector locations must be strictly increasing")
        object.__setattr__(self, "vectors", vectors)

    def __len__(self):
        return len(self.vectors)


def one_sided_cubic_fit(samples: SampleSeries, anchor_index: int, x_star: float, side: str):
    """Cubic Taylor fit of four samples on one side of ``x*``.

    ``anchor_index`` is the index j of the cell ``(x_j, x_{j+1})`` holding the
    anchor; the left fit uses samples j-3..j, the right fit samples j+1..j+4.
    Returns ``(value, d1, d2, d3)`` at ``x*``.
    """
    if side == "left":
        lo, hi = anchor_index - 3, anchor_index + 1
    elif side == "right":
        lo, hi = anchor_index + 1, anchor_index + 5
    else:
        raise ValueError("side must be 'left' or 'right'")
    n = samples.grid.node_count
    if lo < 0 or hi > n:
        raise IndexError(f"one-sided fit needs samples {lo}..{hi - 1}, have 0..{n - 1}")
    h = samples.grid.spacing
    idx = np.arange(lo, hi)
    t = (samples.grid.origin + idx * h - x_star) / h
    vander = np.vander(t, 4, increasing=True)
    cond = np.linalg.cond(vander)
    if not np.isfinite(cond) or cond > _COND_LIMIT:
        raise IllConditioned(f"offset matrix condition {cond:.3e} exceeds {_COND_LIMIT:.0e}")
    scaled = np.linalg.solve(vander, samples.values[lo:hi])
    coeffs = scaled * _FACTORIALS / h ** np.arange(4)
    return tuple(float(c) for c in coeffs)


def estimate_jumps(samples: SampleSeries, hyp) -> JumpVector:
    """Jump vector at a localized hypothesis: right fit minus left fit."""
    if hyp.location is None:
        raise ValueError("hypothesis must be localized before jump estimation")
    left = one_sided_cubic_fit(samples, hyp.cell_index, hyp.location, "left")
    right = one_sided_cubic_fit(samples, hyp.cell_index, hyp.location, "right")
    diffs = tuple(r - l for r, l in zip(right, left))
    return JumpVector(hyp.location, *diffs, side_values=(left[0], right[0]))


def evaluate_correction(term: CorrectionTerm, x):
    """Sum of the one-sided cubics of all jump vectors at (or left of) ``x``.

    Identically zero left of the first location.  Vectors are accumulated in
    location order, lowest first, so results are deterministic.
    """
    xq = np.asarray(x, dtype=float)
    total = np.zeros(xq.shape, dtype=float)
    for vec in term.vectors:
        d = xq - vec.location
        active = (d > 0.0) if not vec.include_at_location else (d >= 0.0)
        if np.any(active):
            total = total + np.where(active, vec.cubic(xq), 0.0)
    if np.ndim(x) == 0:
        return float(total)
    return total


def smooth_data(samples: SampleSeries, term: CorrectionTerm) -> SampleSeries:
    """Subtract the correction at every node, removing the known jumps."""
    for vec in term.vectors:
        lo, hi = samples.grid.origin, samples.grid.node(samples.grid.node_count - 1)
        if not (lo <= vec.location <= hi):
            raise ValueError(f"correction location {vec.location} outside the sample domain")
    return SampleSeries(samples.grid, samples.values - evaluate_correction(term, samples.grid.nodes()))
