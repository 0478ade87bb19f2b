"""Brute-force reference implementations used as ground truth.

The conflict graph here is computed by testing all candidate pairs of all
feature pairs with the strict rectangle-overlap predicate -- no spatial
pruning, no per-offset programs -- so a bug in the grid index or in the
dispatch-table generation cannot validate itself.  The reference selection
re-runs the greedy sweep on top of that graph using the shared cost rules
and must reproduce the production selector's output exactly.
"""

from __future__ import annotations

import math
import time

import numpy as np

from .cost import CandidateSlot, CostConfig, SlotState, candidate_expense, feature_values, make_slots, occlusion_bump
from .geometry import Corner, Feature, LabelDims, Viewport, candidate_rect, project_features
from .selector import Layout, LayoutStats, Placement

_CORNERS = (Corner.UR, Corner.LR, Corner.UL, Corner.LL)

Slot = tuple[int, Corner]


class ConflictGraph:
    """Adjacency of strictly-overlapping candidate slots.

    Symmetric; never connects two slots of the same feature (sibling
    candidates share only edges and corner points).
    """

    def __init__(self, adjacency: dict[Slot, set[Slot]]):
        self.adjacency = adjacency

    def partners(self, feature_id: int, corner: Corner) -> set[Slot]:
        return self.adjacency.get((feature_id, corner), set())

    def edge_set(self) -> set[tuple[Slot, Slot]]:
        """Edges with endpoints canonically ordered by (id, corner)."""
        out: set[tuple[Slot, Slot]] = set()
        for sa, nbrs in self.adjacency.items():
            for sb in nbrs:
                out.add((sa, sb) if sa <= sb else (sb, sa))
        return out

    @property
    def edge_count(self) -> int:
        return len(self.edge_set())


def brute_conflict_graph(features: list[Feature], dims: LabelDims) -> ConflictGraph:
    """All-pairs 16-way candidate overlap testing.

    Quadratic and proud of it; the point is independence, not speed.  The
    pairwise comparisons are vectorized but are exactly the four strict
    inequalities of the overlap predicate applied to every candidate pair.
    """
    if not isinstance(dims, LabelDims):
        dims = LabelDims(*dims)
    n = len(features)
    adjacency: dict[Slot, set[Slot]] = {}
    if n == 0:
        return ConflictGraph(adjacency)

    xs = np.fromiter((f.position.x for f in features), dtype=np.float64, count=n)
    ys = np.fromiter((f.position.y for f in features), dtype=np.float64, count=n)
    ids = [f.id for f in features]
    w, h = dims.width, dims.height

    # Flattened candidate rects, slot index = feature_index * 4 + corner.
    m = 4 * n
    left = np.empty(m)
    top = np.empty(m)
    right = np.empty(m)
    bottom = np.empty(m)
    for c in _CORNERS:
        sl = slice(int(c), m, 4)
        left[sl] = xs if c in (Corner.UR, Corner.LR) else xs - w
        right[sl] = xs + w if c in (Corner.UR, Corner.LR) else xs
        top[sl] = ys - h if c in (Corner.UR, Corner.UL) else ys
        bottom[sl] = ys if c in (Corner.UR, Corner.UL) else ys + h

    idx = np.arange(m)
    chunk = max(1, int(4_000_000 // max(m, 1)))
    for start in range(0, m, chunk):
        stop = min(start + chunk, m)
        block = slice(start, stop)
        olap = (
            (left[block, None] < right[None, :])
            & (right[block, None] > left[None, :])
            & (top[block, None] < bottom[None, :])
            & (bottom[block, None] > top[None, :])
        )
        olap[idx[block] - start, idx[block]] = False  # a rect always overlaps itself
        for i_local, j in np.argwhere(olap):
            i = start + int(i_local)
            j = int(j)
            sa = (ids[i // 4], Corner(i % 4))
            sb = (ids[j // 4], Corner(j % 4))
            adjacency.setdefault(sa, set()).add(sb)
    return ConflictGraph(adjacency)


def reference_selection(
    features: list[Feature],
    view: Viewport,
    dims: LabelDims,
    cfg: CostConfig | None = None,
) -> Layout:
    """The greedy sweep re-implemented over the brute-force graph.

    Must match ``selector.place_labels`` placement-for-placement on every
    input; the cost rules are shared, the conflict machinery is not.
    """
    t0 = time.perf_counter()
    if not isinstance(dims, LabelDims):
        dims = LabelDims(*dims)
    if cfg is None:
        cfg = CostConfig()
    if not features:
        return Layout(stats=LayoutStats())

    projected = project_features(features, view)
    w, h = dims.width, dims.height
    participants = [
        f
        for f in projected
        if -w <= f.position.x <= view.width + w and -h <= f.position.y <= view.height + h
    ]
    # Processing order: descending priority, ascending id on ties.
    participants.sort(key=lambda f: (-f.priority, f.id))
    rank_of = {f.id: i for i, f in enumerate(participants)}

    cw, ch = w / 2.0, h / 2.0
    cells = {f.id: (math.floor(f.position.y / ch), math.floor(f.position.x / cw)) for f in participants}

    graph = brute_conflict_graph(participants, dims)
    vals = feature_values(participants, cfg)
    slots: dict[int, list[CandidateSlot]] = {
        f.id: make_slots(f.id, vals[f.id], cfg) for f in participants
    }

    chosen_by_id: dict[int, int] = {}
    for a_rank, fa in enumerate(participants):
        my_slots = slots[fa.id]
        if all(s.state != SlotState.AVAILABLE for s in my_slots):
            continue

        row_a, col_a = cells[fa.id]
        best: CandidateSlot | None = None
        best_expense = 0.0
        best_partners: list[tuple[CandidateSlot, int]] = []
        for slot in my_slots:
            if slot.state != SlotState.AVAILABLE:
                continue
            raw = sorted(
                graph.partners(fa.id, slot.corner),
                key=lambda s: (rank_of[s[0]], int(s[1])),
            )
            partners = []
            for bid, corner_b in raw:
                if rank_of[bid] <= a_rank:
                    continue
                partner = slots[bid][int(corner_b)]
                if partner.state != SlotState.AVAILABLE:
                    continue
                row_b, col_b = cells[bid]
                dist = max(abs(row_a - row_b), abs(col_a - col_b))
                partners.append((partner, dist))
            covered: list[float] = []
            if cfg.cover_wt != 0.0:
                rect = candidate_rect(fa.position, dims, slot.corner)
                for fb in participants[a_rank + 1 :]:
                    if rect.contains_strictly(fb.position.x, fb.position.y):
                        covered.append(vals[fb.id])
            expense = candidate_expense(slot, partners, covered, cfg)
            if best is None or expense < best_expense:
                best = slot
                best_expense = expense
                best_partners = partners

        assert best is not None
        best.state = SlotState.SELECTED
        for s in my_slots:
            if s.state == SlotState.AVAILABLE:
                s.state = SlotState.DESELECTED
        for partner, _ in best_partners:
            if partner.state == SlotState.AVAILABLE:
                partner.state = SlotState.OCCLUDED
                occlusion_bump(slots[partner.feature_id], partner)
        chosen_by_id[fa.id] = int(best.corner)

    placements = []
    labeled = 0
    for f in projected:
        c = chosen_by_id.get(f.id, -1)
        if c >= 0:
            corner = Corner(c)
            placements.append(
                Placement(
                    f.id,
                    f.position.x,
                    f.position.y,
                    f.priority,
                    f.text,
                    corner,
                    candidate_rect(f.position, dims, corner),
                    True,
                )
            )
            labeled += 1
        else:
            placements.append(
                Placement(f.id, f.position.x, f.position.y, f.priority, f.text, None, None, False)
            )
    placements.sort(key=lambda p: p.id)

    total = len(features)
    in_view = sum(
        1
        for f in participants
        if 0.0 <= f.position.x <= view.width and 0.0 <= f.position.y <= view.height
    )
    stats = LayoutStats(
        total=total,
        labeled=labeled,
        unlabeled=total - labeled,
        in_view=in_view,
        margin=len(participants) - in_view,
        excluded=total - len(participants),
        predicate_evals=0,
        elapsed_ms=(time.perf_counter() - t0) * 1000.0,
    )
    return Layout(placements=placements, stats=stats)
