"""Uniform-grid data model, sampling frameworks, and closed-form test functions.

Two discretizations of a function on ``[a, a + N*h]`` are used throughout:

* point values ``f_j = f(x_j)`` at the ``N + 1`` nodes ``x_j = a + j*h``;
* cell averages ``(1/h) * integral of f over [x_{j-1}, x_j]`` for the ``N``
  cells bounded by those nodes.

The two are linked by the primitive function ``F(x) = integral_a^x f``:
node values of ``F`` are exact scaled partial sums of the cell averages, and
divided differences of ``F`` recover the averages.  Node coordinates are always
computed as ``origin + j * spacing`` so that positions are reproducible
bit-for-bit across resolutions and runs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "UniformGrid1D",
    "SampleSeries",
    "CellAverageSeries",
    "SmoothPiece",
    "PiecewiseTestFunction",
    "primitive",
    "cell_averages_from_primitive",
    "sample",
    "average",
    "test_function",
    "TEST_FUNCTIONS",
    "circle_split_values",
    "circle_split_curve",
    "quadrant_function",
    "quadrant_cell_averages",
    "write_series",
    "read_series",
]


@dataclass(frozen=True)
class UniformGrid1D:
    """Uniform 1D grid: nodes ``x_j = origin + j*spacing``, ``j = 0..node_count-1``."""

    origin: float
    spacing: float
    node_count: int

    def __post_init__(self):
        if not (math.isfinite(self.origin) and math.isfinite(self.spacing)):
            raise ValueError("grid origin and spacing must be finite")
        if self.spacing <= 0.0:
            raise ValueError("grid spacing must be positive")
        if self.node_count < 2:
            raise ValueError("grid needs at least 2 nodes")

    @property
    def cell_count(self) -> int:
        return self.node_count - 1

    def node(self, j: int) -> float:
        return self.origin + j * self.spacing

    def nodes(self) -> np.ndarray:
        return self.origin + np.arange(self.node_count) * self.spacing

    def cell_midpoints(self) -> np.ndarray:
        return self.origin + (np.arange(self.cell_count) + 0.5) * self.spacing

    def refined(self) -> "UniformGrid1D":
        """Grid with halved spacing covering the same interval."""
        return UniformGrid1D(self.origin, self.spacing * 0.5, 2 * self.node_count - 1)


def _check_values(values, expected_len, what):
    values = np.asarray(values, dtype=float)
    if values.ndim != 1 or values.shape[0] != expected_len:
        raise ValueError(f"{what} must be a 1D array of length {expected_len}")
    if not np.all(np.isfinite(values)):
        raise ValueError(f"{what} must be finite")
    return values


@dataclass(frozen=True)
class SampleSeries:
    """Point values on a uniform grid (one value per node)."""

    grid: UniformGrid1D
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        object.__setattr__(self, "values", _check_values(self.values, self.grid.node_count, "values"))

    def __len__(self) -> int:
        return self.grid.node_count


@dataclass(frozen=True)
class CellAverageSeries:
    """Per-cell mean values on a uniform partition (one value per cell)."""

    grid: UniformGrid1D
    averages: np.ndarray = field(repr=False)

    def __post_init__(self):
        object.__setattr__(self, "averages", _check_values(self.averages, self.grid.cell_count, "averages"))

    def __len__(self) -> int:
        return self.grid.cell_count


def primitive(cells: CellAverageSeries) -> SampleSeries:
    """Node values of the running integral of a cell-average series.

    ``F_0 = 0`` and ``F_j = h * (avg_1 + ... + avg_j)``, accumulated strictly
    left to right (``np.cumsum``) so results are reproducible bit-for-bit.
    """
    h = cells.grid.spacing
    values = np.concatenate([[0.0], h * np.cumsum(cells.averages)])
    return SampleSeries(cells.grid, values)


def cell_averages_from_primitive(samples: SampleSeries) -> CellAverageSeries:
    """Recover cell averages from node values of a primitive: ``(F_j - F_{j-1})/h``."""
    h = samples.grid.spacing
    return CellAverageSeries(samples.grid, np.diff(samples.values) / h)


# ---------------------------------------------------------------------------
# Closed-form piecewise test functions
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SmoothPiece:
    """One smooth piece given in closed form.

    ``derivs[k]`` evaluates the k-th derivative for k = 0..4 and
    ``antiderivative`` is any fixed antiderivative of ``derivs[0]``.
    Every callable accepts scalars or arrays.
    """

    derivs: tuple
    antiderivative: object

    def value(self, x):
        return self.derivs[0](x)

    def derivative(self, x, order: int):
        return self.derivs[order](x)


def _poly_sin_piece(offset=0.0, shift=None, slope=0.0) -> SmoothPiece:
    # Pieces of the form  offset + (x-s)(x-s-c) + x^2 + sin(10x)  with the
    # quadratic bump omitted when shift is None.
    s, c = shift, slope

    if shift is None:
        d0 = lambda x: offset + np.asarray(x) ** 2 + np.sin(10.0 * np.asarray(x))
        d1 = lambda x: 2.0 * np.asarray(x) + 10.0 * np.cos(10.0 * np.asarray(x))
        d2 = lambda x: 2.0 - 100.0 * np.sin(10.0 * np.asarray(x))
        anti = lambda x: offset * np.asarray(x) + np.asarray(x) ** 3 / 3.0 - np.cos(10.0 * np.asarray(x)) / 10.0
    else:
        d0 = lambda x: (offset + (np.asarray(x) - s) * (np.asarray(x) - s - c)
                        + np.asarray(x) ** 2 + np.sin(10.0 * np.asarray(x)))
        d1 = lambda x: (2.0 * (np.asarray(x) - s) - c
                        + 2.0 * np.asarray(x) + 10.0 * np.cos(10.0 * np.asarray(x)))
        d2 = lambda x: 4.0 - 100.0 * np.sin(10.0 * np.asarray(x))
        anti = lambda x: (offset * np.asarray(x) + (np.asarray(x) - s) ** 3 / 3.0
                          - 0.5 * c * (np.asarray(x) - s) ** 2
                          + np.asarray(x) ** 3 / 3.0 - np.cos(10.0 * np.asarray(x)) / 10.0)
    d3 = lambda x: -1000.0 * np.cos(10.0 * np.asarray(x))
    d4 = lambda x: 10000.0 * np.sin(10.0 * np.asarray(x))
    return SmoothPiece((d0, d1, d2, d3, d4), anti)


class PiecewiseTestFunction:
    """Piecewise-smooth test function with closed-form pieces.

    Evaluation at a breakpoint uses the right-hand piece (pieces are defined on
    half-open intervals closed on the left).  One-sided values, derivatives up
    to fourth order, exact jumps, and a continuous primitive anchored at
    ``domain[0]`` are all available in closed form.
    """

    def __init__(self, identifier, breakpoints, pieces, domain=(0.0, 1.0)):
        breakpoints = tuple(float(b) for b in breakpoints)
        if list(breakpoints) != sorted(set(breakpoints)):
            raise ValueError("breakpoints must be strictly increasing")
        if len(pieces) != len(breakpoints) + 1:
            raise ValueError("need exactly one more piece than breakpoints")
        if breakpoints and not (domain[0] < breakpoints[0] and breakpoints[-1] < domain[1]):
            raise ValueError("breakpoints must be interior to the domain")
        self.identifier = identifier
        self.breakpoints = breakpoints
        self.pieces = tuple(pieces)
        self.domain = (float(domain[0]), float(domain[1]))
        # Additive constants making the primitive continuous with F(domain[0]) = 0.
        shifts = [-self.pieces[0].antiderivative(self.domain[0])]
        for i, b in enumerate(breakpoints):
            left = self.pieces[i].antiderivative(b) + shifts[i]
            shifts.append(left - self.pieces[i + 1].antiderivative(b))
        self._primitive_shifts = tuple(shifts)

    def _piece_index(self, x):
        return np.searchsorted(self.breakpoints, np.asarray(x, dtype=float), side="right")

    def _select(self, x, evaluate):
        x = np.asarray(x, dtype=float)
        idx = self._piece_index(x)
        out = np.empty(np.broadcast(x, idx).shape, dtype=float)
        for i in range(len(self.pieces)):
            mask = idx == i
            if np.any(mask):
                out[mask] = evaluate(i, np.asarray(x)[mask] if x.ndim else x)
        return out if out.ndim else float(out)

    def __call__(self, x):
        return self._select(x, lambda i, xs: self.pieces[i].value(xs))

    def derivative(self, x, order: int):
        return self._select(x, lambda i, xs: self.pieces[i].derivative(xs, order))

    def primitive_value(self, x):
        """Continuous antiderivative with value 0 at the left end of the domain."""
        return self._select(
            x, lambda i, xs: self.pieces[i].antiderivative(xs) + self._primitive_shifts[i]
        )

    def one_sided(self, x, side: str, order: int = 0):
        """Derivative of the given order using the piece on one side of ``x``."""
        i = int(np.searchsorted(self.breakpoints, float(x), side="right" if side == "right" else "left"))
        return float(self.pieces[i].derivative(float(x), order))

    def jumps_at(self, s, orders=(0, 1, 2, 3)):
        """Jumps (right minus left piece) of f and its derivatives at ``s``."""
        return tuple(self.one_sided(s, "right", k) - self.one_sided(s, "left", k) for k in orders)


def _exp1(a=0.0) -> PiecewiseTestFunction:
    s = math.pi / 6.0
    return PiecewiseTestFunction(
        f"exp1(a={a:g})",
        (s,),
        (_poly_sin_piece(offset=a, shift=s, slope=10.0), _poly_sin_piece()),
    )


def _exp2() -> PiecewiseTestFunction:
    s1, s2 = math.pi / 12.0, 3.0 * math.pi / 12.0
    return PiecewiseTestFunction(
        "exp2",
        (s1, s2),
        (_poly_sin_piece(shift=s1, slope=10.0), _poly_sin_piece(), _poly_sin_piece(shift=s2, slope=5.0)),
    )


def _exp3() -> PiecewiseTestFunction:
    s = math.pi / 6.0
    return PiecewiseTestFunction(
        "exp3",
        (s,),
        (_poly_sin_piece(offset=10.0, shift=s, slope=10.0), _poly_sin_piece()),
    )


def _exp4() -> PiecewiseTestFunction:
    s1, s2 = math.pi / 12.0, 3.0 * math.pi / 12.0
    return PiecewiseTestFunction(
        "exp4",
        (s1, s2),
        (
            _poly_sin_piece(offset=1.0, shift=s1, slope=10.0),
            _poly_sin_piece(),
            _poly_sin_piece(offset=2.0, shift=s2, slope=5.0),
        ),
    )


TEST_FUNCTIONS = {
    "exp1": _exp1,
    "exp2": _exp2,
    "exp3": _exp3,
    "exp4": _exp4,
}


def test_function(identifier: str, a: float = 0.0) -> PiecewiseTestFunction:
    """Look up a 1D test function by identifier (``a`` applies to exp1 only)."""
    try:
        factory = TEST_FUNCTIONS[identifier]
    except KeyError:
        raise KeyError(f"unknown test function {identifier!r}") from None
    return factory(a) if identifier == "exp1" else factory()


def sample(fn, grid: UniformGrid1D) -> SampleSeries:
    """Point values of ``fn`` at the grid nodes (right limit on a breakpoint)."""
    return SampleSeries(grid, np.asarray(fn(grid.nodes()), dtype=float))


def average(fn: PiecewiseTestFunction, grid: UniformGrid1D) -> CellAverageSeries:
    """Exact cell averages of a test function via its continuous primitive."""
    nodes = grid.nodes()
    prim = fn.primitive_value(nodes)
    return CellAverageSeries(grid, np.diff(prim) / grid.spacing)


# ---------------------------------------------------------------------------
# Bivariate test data
# ---------------------------------------------------------------------------


def circle_split_values(x, y):
    """Bivariate function split along the circular arc (x+1/2)^2 + (y-1/2)^2 = 1.

    Inside the circle the value is cos(pi x) cos(pi y); outside it is
    1 - cos(pi x) sin(pi y).
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    inside = (x + 0.5) ** 2 + (y - 0.5) ** 2 < 1.0
    return np.where(inside, np.cos(np.pi * x) * np.cos(np.pi * y), 1.0 - np.cos(np.pi * x) * np.sin(np.pi * y))


def circle_split_curve(y):
    """Crossing abscissa of the circular split: x = -1/2 + sqrt(1 - (y-1/2)^2)."""
    y = np.asarray(y, dtype=float)
    return -0.5 + np.sqrt(1.0 - (y - 0.5) ** 2)


def quadrant_function(x, y):
    """Quadrant function with jumps across x = 1/2 and y = 1/2.

    Lower-left quadrant: cos(pi x) cos(pi y); lower-right and upper-left:
    -cos(pi x) cos(pi y) + 2; upper-right: -cos(pi x) cos(pi y) + 4.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    base = np.cos(np.pi * x) * np.cos(np.pi * y)
    right = x >= 0.5
    top = y >= 0.5
    lower_left = ~right & ~top
    sign = np.where(lower_left, 1.0, -1.0)
    lift = np.where(lower_left, 0.0, np.where(right & top, 4.0, 2.0))
    return sign * base + lift


def quadrant_cell_averages(n: int) -> np.ndarray:
    """Exact cell averages of :func:`quadrant_function` on an n-by-n partition of [0,1]^2.

    Rows index y-cells, columns x-cells.  Cells straddling the split lines are
    integrated piece by piece (the pieces are separable products).
    """
    if n < 2:
        raise ValueError("need at least a 2x2 partition")
    h = 1.0 / n
    edges = np.arange(n + 1) * h

    def s(t):  # antiderivative of cos(pi t)
        return np.sin(np.pi * np.asarray(t)) / np.pi

    def seg(lo, hi, cut):
        # integral of cos(pi t) over [lo,hi] split at the cut, per side
        lo = np.asarray(lo)
        hi = np.asarray(hi)
        below = s(np.minimum(hi, cut)) - s(np.minimum(lo, cut))
        above = s(np.maximum(hi, cut)) - s(np.maximum(lo, cut))
        return below, above

    xb, xa = seg(edges[:-1], edges[1:], 0.5)
    yb, ya = seg(edges[:-1], edges[1:], 0.5)
    wxb = np.clip(np.minimum(edges[1:], 0.5) - np.minimum(edges[:-1], 0.5), 0.0, None)
    wxa = np.clip(np.maximum(edges[1:], 0.5) - np.maximum(edges[:-1], 0.5), 0.0, None)
    wyb, wya = wxb.copy(), wxa.copy()

    out = np.empty((n, n), dtype=float)
    for r in range(n):
        # lower-left: +xb*yb; lower-right: -xa*yb + 2; upper-left: -xb*ya + 2; upper-right: -xa*ya + 4
        cell = (
            xb * yb[r]
            + (-xa * yb[r] + 2.0 * wxa * wyb[r])
            + (-xb * ya[r] + 2.0 * wxb * wya[r])
            + (-xa * ya[r] + 4.0 * wxa * wya[r])
        )
        out[r, :] = cell / (h * h)
    return out


# ---------------------------------------------------------------------------
# Series CSV
# ---------------------------------------------------------------------------

_FMT = "{:.17g}"


def write_series(path, series):
    """Write a series as CSV: a `# kind=..., origin=..., h=...` header, one value per line."""
    if isinstance(series, SampleSeries):
        kind, data = "point", series.values
    elif isinstance(series, CellAverageSeries):
        kind, data = "cell", series.averages
    else:
        raise TypeError("expected SampleSeries or CellAverageSeries")
    g = series.grid
    lines = [f"# kind={kind}, origin={_FMT.format(g.origin)}, h={_FMT.format(g.spacing)}"]
    lines += [_FMT.format(v) for v in data]
    with open(path, "w", encoding="ascii") as fh:
        fh.write("\n".join(lines) + "\n")


def read_series(path):
    """Read a series written by :func:`write_series`."""
    with open(path, "r", encoding="ascii") as fh:
        header = fh.readline().strip()
        if not header.startswith("#"):
            raise ValueError("missing series header line")
        fields = {}
        for item in header.lstrip("#").split(","):
            key, _, val = item.strip().partition("=")
            fields[key] = val
        try:
            kind = fields["kind"]
            origin = float(fields["origin"])
            h = float(fields["h"])
        except KeyError as exc:
            raise ValueError(f"series header missing {exc}") from None
        data = np.array([float(line) for line in fh if line.strip()], dtype=float)
    if kind == "point":
        return SampleSeries(UniformGrid1D(origin, h, len(data)), data)
    if kind == "cell":
        return CellAverageSeries(UniformGrid1D(origin, h, len(data) + 1), data)
    raise ValueError(f"unknown series kind {kind!r}")
