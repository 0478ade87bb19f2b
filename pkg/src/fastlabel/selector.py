"""The merged selection sweep.

Conflict detection, expense accumulation, and candidate selection happen
in one pass over the features in descending priority order.  Two
refinements keep the pass cheap: a feature whose four candidates are
already occluded is skipped without touching its neighborhood, and
neighbors of higher priority are never examined because any conflict with
them was already resolved at their own turn.

Expense terms accumulate in ascending (processing rank, corner) order with
plain sequential floating-point adds.  The brute-force reference
implementation follows the same contract, which makes the two code paths
agree bit-for-bit, not just approximately.
"""

from __future__ import annotations

import operator
import time
from dataclasses import dataclass, field

import numpy as np

from .cost import RAW_PRIORITY, CostConfig, assign_feature_values
from .geometry import Corner, Feature, LabelDims, Rect, Viewport, candidate_rect, project_features
from .kernel import DispatchTable, build_dispatch_table
from .trellis import build_trellis

_STATE_AVAILABLE = 0
_STATE_SELECTED = 1
_STATE_DESELECTED = 2
_STATE_OCCLUDED = 3


@dataclass(slots=True)
class Placement:
    """Final outcome for one feature (screen space)."""

    id: int
    x: float
    y: float
    priority: float
    text: str
    corner: Corner | None
    rect: Rect | None
    labeled: bool


@dataclass
class LayoutStats:
    total: int = 0
    labeled: int = 0
    unlabeled: int = 0
    in_view: int = 0
    margin: int = 0
    excluded: int = 0
    predicate_evals: int = 0
    elapsed_ms: float = 0.0


@dataclass
class Layout:
    """Placements for every input feature plus run statistics.

    Placed rects never strictly overlap each other, and each one touches
    its feature at the declared corner exactly.  Placements are ordered by
    ascending feature id.
    """

    placements: list[Placement] = field(default_factory=list)
    stats: LayoutStats = field(default_factory=LayoutStats)

    def placed(self) -> list[Placement]:
        return [p for p in self.placements if p.labeled]


def _sweep(
    xs,
    ys,
    rows,
    cols,
    bases,
    values,
    feat_vals,
    state,
    navail,
    keys,
    ranks,
    row_start,
    row_min,
    row_max,
    col_min,
    col_max,
    total_cols,
    tx_flag,
    tx_val,
    ty_flag,
    ty_val,
    masks,
    prox_wt,
    cover_wt,
    label_w,
    label_h,
    chosen,
):
    """Array-level greedy sweep; returns the predicate-evaluation count.

    Arrays are indexed by processing rank (descending priority).  Written
    to compile under numba nopython mode; the interpreted fallback runs the
    identical statements, so both produce the same bits.
    """
    n = xs.shape[0]
    nb_buf = np.empty(n, np.int64)
    exp_buf = np.empty(4, np.float64)
    cov_buf = np.empty(4, np.float64)
    cnt = np.empty(4, np.int64)
    rect_l = np.empty(4, np.float64)
    rect_t = np.empty(4, np.float64)
    rect_r = np.empty(4, np.float64)
    rect_b = np.empty(4, np.float64)
    cap = 4 * n + 4
    prt_b = np.empty((4, cap), np.int64)
    prt_c = np.empty((4, cap), np.int64)
    pe = 0
    do_cover = cover_wt != 0.0

    for a in range(n):
        if navail[a] == 0:
            chosen[a] = -1
            continue

        ra = rows[a]
        ca = cols[a]
        xa = xs[a]
        ya = ys[a]

        # Gather lower-priority neighbors from the 9x9 cell block, then
        # sort so expenses accumulate in ascending rank order.
        m = 0
        for dr in range(-4, 5):
            rr = ra + dr
            if rr < row_min or rr > row_max:
                continue
            ri = rr - row_min
            s0 = row_start[ri]
            s1 = row_start[ri + 1]
            if s0 == s1:
                continue
            clo = ca - 4
            if clo < col_min:
                clo = col_min
            chi = ca + 4
            if chi > col_max:
                chi = col_max
            if clo > chi:
                continue
            base_key = ri * total_cols - col_min
            i0 = s0 + np.searchsorted(keys[s0:s1], base_key + clo, side="left")
            i1 = s0 + np.searchsorted(keys[s0:s1], base_key + chi, side="right")
            for i in range(i0, i1):
                b = ranks[i]
                if b > a:
                    nb_buf[m] = b
                    m += 1
        if m > 1:
            nb_buf[:m].sort()

        for c in range(4):
            exp_buf[c] = 0.0
            cov_buf[c] = 0.0
            cnt[c] = 0
        if do_cover:
            # Candidate rect bounds in corner order UR, LR, UL, LL.
            rect_l[0] = xa
            rect_l[1] = xa
            rect_l[2] = xa - label_w
            rect_l[3] = xa - label_w
            rect_r[0] = xa + label_w
            rect_r[1] = xa + label_w
            rect_r[2] = xa
            rect_r[3] = xa
            rect_t[0] = ya - label_h
            rect_t[1] = ya
            rect_t[2] = ya - label_h
            rect_t[3] = ya
            rect_b[0] = ya
            rect_b[1] = ya + label_h
            rect_b[2] = ya
            rect_b[3] = ya + label_h

        for ii in range(m):
            b = nb_buf[ii]
            if do_cover:
                xb = xs[b]
                yb = ys[b]
                for cA in range(4):
                    if state[a, cA] != _STATE_AVAILABLE:
                        continue
                    if rect_l[cA] < xb < rect_r[cA] and rect_t[cA] < yb < rect_b[cA]:
                        cov_buf[cA] += feat_vals[b]
            if navail[b] == 0:
                continue

            dr = rows[b] - ra
            dc = cols[b] - ca
            off = (dr + 4) * 9 + (dc + 4)
            sx = 1
            if tx_flag[off] == 1:
                d = (xs[b] - xa) - tx_val[off]
                if d < 0.0:
                    sx = 0
                elif d > 0.0:
                    sx = 2
                pe += 1
            sy = 1
            if ty_flag[off] == 1:
                d = (ys[b] - ya) - ty_val[off]
                if d < 0.0:
                    sy = 0
                elif d > 0.0:
                    sy = 2
                pe += 1
            msk = masks[off, sx, sy]
            if msk == 0:
                continue

            adr = dr if dr >= 0 else -dr
            adc = dc if dc >= 0 else -dc
            cheb = adr if adr >= adc else adc
            p = prox_wt * (5.0 - cheb)
            for cA in range(4):
                if state[a, cA] != _STATE_AVAILABLE:
                    continue
                shift = cA * 4
                for cB in range(4):
                    if (msk >> (shift + cB)) & 1:
                        if state[b, cB] == _STATE_AVAILABLE:
                            exp_buf[cA] += values[b, cB] * p
                            k = cnt[cA]
                            prt_b[cA, k] = b
                            prt_c[cA, k] = cB
                            cnt[cA] = k + 1

        # Least expensive available slot; strict < keeps the most preferred
        # corner on ties.
        best = -1
        beste = 0.0
        for cA in range(4):
            if state[a, cA] != _STATE_AVAILABLE:
                continue
            e = exp_buf[cA]
            if do_cover:
                e = e + cover_wt * cov_buf[cA]
            if best < 0 or e < beste:
                best = cA
                beste = e
        chosen[a] = best
        state[a, best] = _STATE_SELECTED
        for c in range(4):
            if c != best and state[a, c] == _STATE_AVAILABLE:
                state[a, c] = _STATE_DESELECTED
        navail[a] = 0

        # Occlude the partners of the selected slot (recorded in ascending
        # rank/corner order) and bump their surviving siblings.
        kmax = cnt[best]
        for k in range(kmax):
            b = prt_b[best, k]
            cB = prt_c[best, k]
            if state[b, cB] == _STATE_AVAILABLE:
                state[b, cB] = _STATE_OCCLUDED
                navail[b] -= 1
                bump = bases[b, cB]
                for t in range(4):
                    if state[b, t] == _STATE_AVAILABLE:
                        values[b, t] += bump
    return pe


try:  # the interpreted fallback runs the same function object
    from numba import njit

    _sweep_impl = njit(cache=True, nogil=True)(_sweep)
except ImportError:  # pragma: no cover
    _sweep_impl = _sweep

_TABLE_CACHE: dict[tuple[float, float], DispatchTable] = {}

_placement_id = operator.attrgetter("id")


def _table_for(dims: LabelDims) -> DispatchTable:
    key = (dims.width, dims.height)
    table = _TABLE_CACHE.get(key)
    if table is None:
        table = build_dispatch_table(dims)
        if len(_TABLE_CACHE) > 64:
            _TABLE_CACHE.clear()
        _TABLE_CACHE[key] = table
    return table


def place_labels(
    features: list[Feature],
    view: Viewport,
    dims: LabelDims,
    cfg: CostConfig | None = None,
) -> Layout:
    """Select a maximal-value set of non-overlapping labels.

    Features are projected through the viewport transform, indexed into
    the trellis, and processed in descending priority (ties by ascending
    id).  Each feature takes its least-expensive available candidate; a
    feature goes unlabeled only when all four of its candidates were
    occluded by higher-priority labels before its turn.
    """
    t0 = time.perf_counter()
    if not isinstance(dims, LabelDims):
        dims = LabelDims(*dims)
    if cfg is None:
        cfg = CostConfig()
    if not features:
        return Layout(stats=LayoutStats())

    projected = project_features(features, view)
    tr = build_trellis(projected, view, dims)
    table = _table_for(dims)
    n = tr.count

    chosen_all = np.full(len(projected), -1, dtype=np.int64)
    pe = 0
    if n:
        # Ascending-priority order is exactly the reverse of rank order.
        if cfg.base_value_mode == RAW_PRIORITY:
            feat_vals = tr.priorities.copy()
        else:
            asc = assign_feature_values(tr.features[::-1], cfg.base_value_mode)
            feat_vals = np.array(asc[::-1], dtype=np.float64)
        mults = np.array(cfg.preference_multipliers, dtype=np.float64)
        bases = feat_vals[:, None] * mults[None, :]
        values = bases.copy()
        state = np.zeros((n, 4), dtype=np.uint8)
        navail = np.full(n, 4, dtype=np.int64)
        chosen = np.empty(n, dtype=np.int64)

        pe = int(
            _sweep_impl(
                tr.xs,
                tr.ys,
                tr.rows,
                tr.cols,
                bases,
                values,
                feat_vals,
                state,
                navail,
                tr.cell_keys,
                tr.cell_ranks,
                tr.row_start,
                tr.row_min,
                tr.row_max,
                tr.col_min,
                tr.col_max,
                tr.total_cols,
                table._tx_flag,
                table._tx_val,
                table._ty_flag,
                table._ty_val,
                table._masks,
                cfg.prox_wt,
                cfg.cover_wt,
                dims.width,
                dims.height,
                chosen,
            )
        )
        chosen_all[tr.order] = chosen

    corners = (Corner.UR, Corner.LR, Corner.UL, Corner.LL)
    placements = []
    labeled = 0
    for idx, c in enumerate(chosen_all.tolist()):
        f = projected[idx]
        pos = f.position
        if c >= 0:
            corner = corners[c]
            placements.append(
                Placement(
                    f.id, pos.x, pos.y, f.priority, f.text, corner,
                    candidate_rect(pos, dims, corner), True,
                )
            )
            labeled += 1
        else:
            placements.append(Placement(f.id, pos.x, pos.y, f.priority, f.text, None, None, False))
    placements.sort(key=_placement_id)

    total = len(features)
    in_view = tr.in_view_count
    stats = LayoutStats(
        total=total,
        labeled=labeled,
        unlabeled=total - labeled,
        in_view=in_view,
        margin=n - in_view,
        excluded=total - n,
        predicate_evals=pe,
        elapsed_ms=(time.perf_counter() - t0) * 1000.0,
    )
    return Layout(placements=placements, stats=stats)


def precompute_zoom_levels(
    features_world: list[Feature],
    base_view: Viewport,
    dims: LabelDims,
    levels: int,
    zoom_factor: float,
    cfg: CostConfig | None = None,
) -> list[Layout]:
    """Layouts for progressively deeper zoom levels.

    Zooming in by a factor is equivalent to a universal expansion of the
    distances between points with the label size held fixed, so level k is
    computed against the unchanged world coordinates with the label dims
    shrunk by factor**k.  Level 0 is the base layout.
    """
    if levels < 1:
        raise ValueError(f"levels must be >= 1, got {levels}")
    if not zoom_factor > 1.0:
        raise ValueError(f"zoom factor must be > 1, got {zoom_factor}")
    if not isinstance(dims, LabelDims):
        dims = LabelDims(*dims)
    out = []
    for k in range(levels):
        scale = zoom_factor**k
        level_dims = LabelDims(dims.width / scale, dims.height / scale)
        out.append(place_labels(features_world, base_view, level_dims, cfg))
    return out


def check_no_overlaps(layout: Layout) -> bool:
    """True iff no two placed rects strictly overlap (validation helper)."""
    placed = layout.placed()
    if len(placed) < 2:
        return True
    l = np.array([p.rect.left for p in placed])
    t = np.array([p.rect.top for p in placed])
    r = np.array([p.rect.right for p in placed])
    b = np.array([p.rect.bottom for p in placed])
    # Sweep by left edge; only candidates with overlapping x-extent matter.
    order = np.argsort(l, kind="stable")
    l, t, r, b = l[order], t[order], r[order], b[order]
    for i in range(len(l) - 1):
        j = i + 1
        while j < len(l) and l[j] < r[i]:
            if r[j] > l[i] and t[i] < b[j] and b[i] > t[j]:
                return False
            j += 1
    return True


def margin_bounds(view: Viewport, dims: LabelDims) -> tuple[float, float, float, float]:
    """The participation region: one label width/height beyond the view."""
    return (-dims.width, -dims.height, view.width + dims.width, view.height + dims.height)
