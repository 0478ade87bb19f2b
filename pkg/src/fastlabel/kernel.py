"""Per-cell-offset conflict programs.

For a pair of features whose cells are (d_row, d_col) apart, the set of
conflicting candidate pairs is a function of at most two scalar
comparisons: the horizontal and/or vertical displacement against a single
precomputed threshold each.  The programs are generated analytically from
the candidate-rect geometry (interval arithmetic per offset), never
transcribed from anywhere, and are validated exhaustively against the
brute-force overlap oracle in the test suite.

Why this works: a feature's position inside its cell is bounded by the
half-label cell size, so for a fixed cell offset the displacement between
two features is confined to an open interval one label wide (tall).  Each
candidate-pair overlap condition is an open interval of displacements two
labels wide, so at most one interval endpoint can fall inside the
displacement range -- one comparison per axis decides every pair at once.

Floating-point contract: the programs compare the rounded displacement
(xb - xa) against a threshold, while the brute predicate rounds each rect
bound separately, so the two can disagree only when a displacement lands
within one ulp of a threshold without being exactly on it.  Whenever the
coordinate arithmetic is exact (integer or dyadic positions, which covers
every cell-boundary and two-label-separation configuration) the agreement
is exact; on continuous random data the disagreement set has measure zero.
No compression to two comparisons could do better, because the sixteen
brute inequalities round independently.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping

import numpy as np

from .geometry import Corner, Feature, LabelDims, Viewport
from .trellis import NEIGHBOR_RADIUS, build_trellis

#: Per-corner label extents relative to the feature point, as (lo, hi)
#: factors of (width, height).  x: right-extending corners span [0, w],
#: left-extending span [-w, 0]; y: up-extending span [-h, 0], down [0, h].
_X_SPAN = {Corner.UR: (0, 1), Corner.LR: (0, 1), Corner.UL: (-1, 0), Corner.LL: (-1, 0)}
_Y_SPAN = {Corner.UR: (-1, 0), Corner.LR: (0, 1), Corner.UL: (-1, 0), Corner.LL: (0, 1)}

_CORNERS = (Corner.UR, Corner.LR, Corner.UL, Corner.LL)


@dataclass(frozen=True)
class CellOffset:
    """Cell displacement from feature A's cell to feature B's cell."""

    d_row: int
    d_col: int


@dataclass(frozen=True)
class PairTestProgram:
    """Conflict-pair resolution for one cell offset.

    ``x_threshold``/``y_threshold`` are the displacement comparison values
    (None when the axis needs no test).  ``pairs_by_outcome`` maps the
    comparison outcomes -- sign(dx - x_threshold), sign(dy - y_threshold),
    with 0 for exact ties or untested axes -- to the conflicting
    (corner_a, corner_b) pairs.
    """

    x_threshold: float | None
    y_threshold: float | None
    pairs_by_outcome: Mapping[tuple[int, int], tuple[tuple[Corner, Corner], ...]]

    @property
    def n_tests(self) -> int:
        return (self.x_threshold is not None) + (self.y_threshold is not None)

    @property
    def pair_superset(self) -> frozenset[tuple[Corner, Corner]]:
        """Every pair that can conflict at this offset, over all outcomes."""
        out: set[tuple[Corner, Corner]] = set()
        for pairs in self.pairs_by_outcome.values():
            out.update(pairs)
        return frozenset(out)

    def evaluate(self, dx: float, dy: float) -> tuple[tuple[Corner, Corner], ...]:
        sx = 0
        if self.x_threshold is not None:
            d = dx - self.x_threshold
            sx = -1 if d < 0 else (1 if d > 0 else 0)
        sy = 0
        if self.y_threshold is not None:
            d = dy - self.y_threshold
            sy = -1 if d < 0 else (1 if d > 0 else 0)
        return self.pairs_by_outcome[(sx, sy)]


def _axis_program(d: int, cell: float, spans: dict, size: float) -> tuple[float | None, dict]:
    """Test threshold and per-outcome truth table for one axis.

    For cell offset ``d`` the displacement lies in the open interval
    ((d-1)*cell, (d+1)*cell).  Each ordered corner-class pair (a, b)
    conflicts on this axis iff the displacement lies in the open interval
    (lo_a - hi_b, hi_a - lo_b).  At most one interval endpoint falls
    strictly inside the displacement range; testing against it resolves
    every pair.

    Returns (threshold or None, {outcome: {(class_a, class_b): bool}}).
    """
    dom_lo, dom_hi = (d - 1) * cell, (d + 1) * cell
    intervals: dict[tuple[int, int], tuple[float, float]] = {}
    for ca in _CORNERS:
        for cb in _CORNERS:
            (alo, ahi), (blo, bhi) = spans[ca], spans[cb]
            intervals[(ca, cb)] = ((alo - bhi) * size, (ahi - blo) * size)

    inside = sorted(
        {e for lo, hi in intervals.values() for e in (lo, hi) if dom_lo < e < dom_hi}
    )
    if len(inside) > 1:  # geometrically impossible: intervals are two cells wide
        raise AssertionError(f"multiple thresholds {inside} inside ({dom_lo}, {dom_hi})")

    if not inside:
        reps = {0: (dom_lo + dom_hi) / 2.0}
        threshold = None
    else:
        threshold = inside[0]
        reps = {
            -1: (dom_lo + threshold) / 2.0,
            0: threshold,
            1: (threshold + dom_hi) / 2.0,
        }

    truth = {
        outcome: {pair: lo < rep < hi for pair, (lo, hi) in intervals.items()}
        for outcome, rep in reps.items()
    }
    return threshold, truth


class DispatchTable:
    """All 81 per-offset programs for one label size.

    The structure depends only on the cell offset; the comparison
    thresholds scale with the label dims.  Immutable after construction.
    """

    def __init__(self, dims: LabelDims, programs: dict[tuple[int, int], PairTestProgram]):
        self.dims = dims
        self.programs = programs

        # Flattened arrays for the selection sweep: offset index is
        # (d_row + 4) * 9 + (d_col + 4); outcome index is sign + 1.
        n = (2 * NEIGHBOR_RADIUS + 1) ** 2
        self._tx_flag = np.zeros(n, dtype=np.uint8)
        self._tx_val = np.zeros(n, dtype=np.float64)
        self._ty_flag = np.zeros(n, dtype=np.uint8)
        self._ty_val = np.zeros(n, dtype=np.float64)
        self._masks = np.zeros((n, 3, 3), dtype=np.int64)
        for (dr, dc), prog in programs.items():
            k = (dr + NEIGHBOR_RADIUS) * 9 + (dc + NEIGHBOR_RADIUS)
            if prog.x_threshold is not None:
                self._tx_flag[k] = 1
                self._tx_val[k] = prog.x_threshold
            if prog.y_threshold is not None:
                self._ty_flag[k] = 1
                self._ty_val[k] = prog.y_threshold
            for i in range(3):
                for j in range(3):
                    sx = (i - 1) if prog.x_threshold is not None else 0
                    sy = (j - 1) if prog.y_threshold is not None else 0
                    bits = 0
                    for ca, cb in prog.pairs_by_outcome[(sx, sy)]:
                        bits |= 1 << (int(ca) * 4 + int(cb))
                    self._masks[k, i, j] = bits

    def program(self, off: CellOffset) -> PairTestProgram:
        return self.programs[(off.d_row, off.d_col)]

    @property
    def total_tests(self) -> int:
        """Comparisons needed with one feature pair per offset (worst case)."""
        return sum(p.n_tests for p in self.programs.values())


def build_dispatch_table(dims: LabelDims) -> DispatchTable:
    """Generate the conflict programs for every offset in the 9x9 neighborhood."""
    if not isinstance(dims, LabelDims):
        dims = LabelDims(*dims)
    cw, ch = dims.width / 2.0, dims.height / 2.0

    programs: dict[tuple[int, int], PairTestProgram] = {}
    rng = range(-NEIGHBOR_RADIUS, NEIGHBOR_RADIUS + 1)
    for dr in rng:
        ty, truth_y = _axis_program(dr, ch, _Y_SPAN, dims.height)
        for dc in rng:
            tx, truth_x = _axis_program(dc, cw, _X_SPAN, dims.width)
            pairs_by_outcome = {}
            for sx, tx_truth in truth_x.items():
                for sy, ty_truth in truth_y.items():
                    pairs = tuple(
                        (ca, cb)
                        for ca in _CORNERS
                        for cb in _CORNERS
                        if tx_truth[(ca, cb)] and ty_truth[(ca, cb)]
                    )
                    pairs_by_outcome[(sx, sy)] = pairs
            programs[(dr, dc)] = PairTestProgram(tx, ty, pairs_by_outcome)
    return DispatchTable(dims, programs)


def conflict_pairs(
    table: DispatchTable, fa: Feature, fb: Feature, off: CellOffset
) -> frozenset[tuple[Corner, Corner]]:
    """Exact conflicting candidate pairs between two features.

    ``off`` must be fb's cell minus fa's cell.  Offsets beyond the 9x9
    neighborhood have no possible conflicts and yield the empty set.
    """
    if max(abs(off.d_row), abs(off.d_col)) > NEIGHBOR_RADIUS:
        return frozenset()
    prog = table.programs[(off.d_row, off.d_col)]
    dx = fb.position.x - fa.position.x
    dy = fb.position.y - fa.position.y
    return frozenset(prog.evaluate(dx, dy))


def conflict_edges(
    features: list[Feature],
    view: Viewport,
    dims: LabelDims,
    table: DispatchTable | None = None,
) -> set[tuple[tuple[int, Corner], tuple[int, Corner]]]:
    """Full conflict graph via the trellis, as canonically ordered edges.

    Each edge is ((id_a, corner_a), (id_b, corner_b)) with the slots sorted
    by (id, corner).  Covers exactly the features the trellis indexes.
    """
    t = build_trellis(features, view, dims)
    if table is None or table.dims != t.dims:
        table = build_dispatch_table(t.dims)

    edges: set[tuple[tuple[int, Corner], tuple[int, Corner]]] = set()
    keys, ranks = t.cell_keys, t.cell_ranks
    xs, ys, rows, cols, ids = t.xs, t.ys, t.rows, t.cols, t.ids
    for a in range(t.count):
        ra, ca = int(rows[a]), int(cols[a])
        for dr in range(-NEIGHBOR_RADIUS, NEIGHBOR_RADIUS + 1):
            rr = ra + dr
            if rr < t.row_min or rr > t.row_max:
                continue
            base = (rr - t.row_min) * t.total_cols
            lo = base + max(ca - NEIGHBOR_RADIUS, t.col_min) - t.col_min
            hi = base + min(ca + NEIGHBOR_RADIUS, t.col_max) - t.col_min
            i0 = int(np.searchsorted(keys, lo, side="left"))
            i1 = int(np.searchsorted(keys, hi, side="right"))
            for i in range(i0, i1):
                b = int(ranks[i])
                if b <= a:
                    continue
                prog = table.programs[(dr, int(cols[b]) - ca)]
                for corner_a, corner_b in prog.evaluate(xs[b] - xs[a], ys[b] - ys[a]):
                    sa = (int(ids[a]), corner_a)
                    sb = (int(ids[b]), corner_b)
                    edges.add((sa, sb) if sa <= sb else (sb, sa))
    return edges


def format_table(table: DispatchTable, offsets: Iterable[CellOffset] | None = None) -> str:
    """Human-readable dump of the dispatch programs (debugging aid)."""
    lines = [f"dispatch table for {table.dims.width}x{table.dims.height} labels"]
    if offsets is None:
        items = sorted(table.programs.items())
    else:
        items = [((o.d_row, o.d_col), table.programs[(o.d_row, o.d_col)]) for o in offsets]
    for (dr, dc), prog in items:
        tests = []
        if prog.x_threshold is not None:
            tests.append(f"dx vs {prog.x_threshold:g}")
        if prog.y_threshold is not None:
            tests.append(f"dy vs {prog.y_threshold:g}")
        lines.append(f"offset (d_row={dr:+d}, d_col={dc:+d}): tests [{', '.join(tests) or 'none'}]")
        for (sx, sy), pairs in sorted(prog.pairs_by_outcome.items()):
            if not pairs:
                continue
            body = ", ".join(f"A.{a.name}:B.{b.name}" for a, b in pairs)
            lines.append(f"    outcome (sx={sx:+d}, sy={sy:+d}): {body}")
    return "\n".join(lines)
