"""Grid index over the viewport built from half-label-size cells.

Each cell is exactly one quarter of the label area with the label's aspect
ratio (half the width, half the height).  With that cell size, two features
can have conflicting label candidates only when their cells are at most
four rows and four columns apart, so all conflict detection is confined to
the 9x9 cell neighborhood around a feature.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .geometry import Feature, LabelDims, Rect, ScreenPoint, Viewport

#: Chebyshev cell radius within which label conflicts are possible.
NEIGHBOR_RADIUS = 4


@dataclass(frozen=True)
class CellCoord:
    """Grid cell address: row = floor(y / cell_height), col = floor(x / cell_width).

    Cells are addressed in viewport coordinates, so cell (0, 0) has its
    top-left corner at the viewport origin.  Features in the off-screen
    margin band get negative (or past-the-edge) coordinates.
    """

    row: int
    col: int


class Trellis:
    """Immutable spatial index; build with :func:`build_trellis`.

    Feature storage is ordered by descending priority (ties by ascending
    id); per-cell queries return ids in that same order.  The grid also
    indexes features up to one label width/height outside the viewport,
    because their labels can extend into view.
    """

    def __init__(
        self,
        features: list[Feature],
        view: Viewport,
        dims: LabelDims,
        order: np.ndarray,
        xs: np.ndarray,
        ys: np.ndarray,
        ids: np.ndarray,
        priorities: np.ndarray,
        rows: np.ndarray,
        cols: np.ndarray,
        in_view: np.ndarray,
    ):
        self.view = view
        self.dims = dims
        self.cell_width = dims.width / 2.0
        self.cell_height = dims.height / 2.0
        self.n_cols = math.ceil(view.width / self.cell_width)
        self.n_rows = math.ceil(view.height / self.cell_height)

        # Features, rank-ordered (descending priority, ascending id on ties);
        # order maps rank -> index into the input list.
        self.order = order
        self.features = [features[i] for i in order]
        self.xs = xs
        self.ys = ys
        self.ids = ids
        self.priorities = priorities
        self.rows = rows
        self.cols = cols
        self.in_view = in_view

        # Stored extent includes the margin band (2 cells each side, plus
        # whatever the closed margin bound can reach past the last column).
        self.row_min = int(math.floor(-dims.height / self.cell_height))
        self.col_min = int(math.floor(-dims.width / self.cell_width))
        self.row_max = int(math.floor((view.height + dims.height) / self.cell_height))
        self.col_max = int(math.floor((view.width + dims.width) / self.cell_width))
        self.total_cols = self.col_max - self.col_min + 1

        # CSR-style lookup: cell keys sorted ascending, ties keeping rank
        # order, so every per-cell slice is already priority-ordered.
        keys = (rows - self.row_min) * self.total_cols + (cols - self.col_min)
        by_cell = np.argsort(keys, kind="stable")
        self.cell_keys = keys[by_cell]
        self.cell_ranks = by_cell.astype(np.int64)

        # Dense per-row offsets into cell_keys: column lookups then search
        # only within one row's segment.
        total_rows = self.row_max - self.row_min + 1
        row_edges = np.arange(total_rows + 1, dtype=np.int64) * self.total_cols
        self.row_start = np.searchsorted(self.cell_keys, row_edges, side="left")

    @property
    def count(self) -> int:
        """Number of indexed (in-margin) features."""
        return len(self.features)

    @property
    def in_view_count(self) -> int:
        return int(self.in_view.sum())

    @property
    def cell_count(self) -> int:
        """Number of cells covering the viewport proper (margin band excluded)."""
        return self.n_rows * self.n_cols

    def cell_of(self, p: ScreenPoint) -> CellCoord:
        return CellCoord(
            int(math.floor(p.y / self.cell_height)),
            int(math.floor(p.x / self.cell_width)),
        )

    def cell_key(self, c: CellCoord) -> int:
        return (c.row - self.row_min) * self.total_cols + (c.col - self.col_min)

    def features_in(self, c: CellCoord) -> list[int]:
        """Feature ids in a cell, ordered by descending priority."""
        if not (self.row_min <= c.row <= self.row_max and self.col_min <= c.col <= self.col_max):
            return []
        key = self.cell_key(c)
        lo = int(np.searchsorted(self.cell_keys, key, side="left"))
        hi = int(np.searchsorted(self.cell_keys, key, side="right"))
        return [int(self.ids[r]) for r in self.cell_ranks[lo:hi]]


def build_trellis(features: list[Feature], view: Viewport, dims: LabelDims) -> Trellis:
    """Index features into half-label-size cells; linear in feature count.

    Features more than one label width/height outside the viewport are
    excluded: their labels cannot reach into view.
    """
    if not isinstance(dims, LabelDims):
        dims = LabelDims(*dims)  # raises on non-positive extents

    n = len(features)
    xs = np.fromiter((f.position.x for f in features), dtype=np.float64, count=n)
    ys = np.fromiter((f.position.y for f in features), dtype=np.float64, count=n)
    ids = np.fromiter((f.id for f in features), dtype=np.int64, count=n)
    priorities = np.fromiter((f.priority for f in features), dtype=np.float64, count=n)

    w, h = dims.width, dims.height
    keep = (xs >= -w) & (xs <= view.width + w) & (ys >= -h) & (ys <= view.height + h)
    kept = np.flatnonzero(keep)

    # Rank order: descending priority, ascending id on ties.
    order_local = np.lexsort((ids[kept], -priorities[kept]))
    order = kept[order_local]

    xs, ys, ids, priorities = xs[order], ys[order], ids[order], priorities[order]
    rows = np.floor(ys / (h / 2.0)).astype(np.int64)
    cols = np.floor(xs / (w / 2.0)).astype(np.int64)
    in_view = (xs >= 0.0) & (xs <= view.width) & (ys >= 0.0) & (ys <= view.height)

    return Trellis(features, view, dims, order, xs, ys, ids, priorities, rows, cols, in_view)


def neighborhood(t: Trellis, c: CellCoord) -> list[CellCoord]:
    """All cells within four rows and four columns of ``c``, clipped to the
    viewport grid: the only cells whose features can conflict with a feature
    in ``c``.  At most 81 cells (9x9)."""
    r_lo = max(c.row - NEIGHBOR_RADIUS, 0)
    r_hi = min(c.row + NEIGHBOR_RADIUS, t.n_rows - 1)
    c_lo = max(c.col - NEIGHBOR_RADIUS, 0)
    c_hi = min(c.col + NEIGHBOR_RADIUS, t.n_cols - 1)
    return [
        CellCoord(r, q) for r in range(r_lo, r_hi + 1) for q in range(c_lo, c_hi + 1)
    ]


def rad_dist(a: CellCoord, b: CellCoord) -> int:
    """Chebyshev cell distance: rows or columns of separation, whichever is
    greater.  Only meaningful inside a neighborhood (result in 0..4)."""
    return max(abs(a.row - b.row), abs(a.col - b.col))


def cells_covering(t: Trellis, r: Rect) -> list[CellCoord]:
    """Cells whose area intersects the rect's interior.

    A label-sized rect covers at most 3x3 cells; one anchored exactly at a
    cell corner covers exactly 2x2.
    """
    col_lo = int(math.floor(r.left / t.cell_width))
    col_hi = int(math.ceil(r.right / t.cell_width)) - 1
    row_lo = int(math.floor(r.top / t.cell_height))
    row_hi = int(math.ceil(r.bottom / t.cell_height)) - 1
    col_lo = max(col_lo, t.col_min)
    col_hi = min(col_hi, t.col_max)
    row_lo = max(row_lo, t.row_min)
    row_hi = min(row_hi, t.row_max)
    return [
        CellCoord(row, col)
        for row in range(row_lo, row_hi + 1)
        for col in range(col_lo, col_hi + 1)
    ]
