import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from fastlabel.geometry import (
    Corner,
    Feature,
    LabelDims,
    ScreenPoint,
    Viewport,
    candidate_rect,
    rects_conflict,
)
from fastlabel.kernel import (
    CellOffset,
    build_dispatch_table,
    conflict_edges,
    conflict_pairs,
    format_table,
)
from fastlabel.oracle import brute_conflict_graph
from fastlabel.selector import margin_bounds

from conftest import random_features

DIMS = LabelDims(150, 12)
TABLE = build_dispatch_table(DIMS)


def brute_pairs(fa: Feature, fb: Feature, dims: LabelDims) -> frozenset:
    return frozenset(
        (ca, cb)
        for ca in Corner
        for cb in Corner
        if rects_conflict(candidate_rect(fa.position, dims, ca), candidate_rect(fb.position, dims, cb))
    )


def features_at(ax, ay, bx, by):
    return Feature(0, ScreenPoint(ax, ay), 2.0), Feature(1, ScreenPoint(bx, by), 1.0)


def offset_between(fa, fb, dims):
    cw, ch = dims.width / 2, dims.height / 2
    return CellOffset(
        int(np.floor(fb.position.y / ch)) - int(np.floor(fa.position.y / ch)),
        int(np.floor(fb.position.x / cw)) - int(np.floor(fa.position.x / cw)),
    )


def test_left_distance_offset_program():
    # B four cells (two label widths) to the left: one distance test against
    # -2w plus one vertical test against 0 resolve a four-pair superset.
    prog = TABLE.programs[(0, -4)]
    assert prog.x_threshold == -2 * DIMS.width
    assert prog.y_threshold == 0.0
    assert prog.n_tests == 2
    assert len(prog.pair_superset) == 4
    assert prog.pair_superset == frozenset(
        {(Corner.UL, Corner.UR), (Corner.UL, Corner.LR), (Corner.LL, Corner.UR), (Corner.LL, Corner.LR)}
    )


def test_coincident_features_conflict_on_same_corners_only():
    fa, fb = features_at(300, 300, 300, 300)
    got = conflict_pairs(TABLE, fa, fb, CellOffset(0, 0))
    assert got == frozenset({(c, c) for c in Corner})
    assert got == brute_pairs(fa, fb, DIMS)


def test_exact_two_label_width_separation_is_conflict_free():
    fa, fb = features_at(300, 300, 300 - 2 * DIMS.width, 300)
    off = offset_between(fa, fb, DIMS)
    assert off == CellOffset(0, -4)
    assert conflict_pairs(TABLE, fa, fb, off) == frozenset()
    assert brute_pairs(fa, fb, DIMS) == frozenset()


def test_one_and_a_half_width_left_displacement():
    fa, fb = features_at(450, 300, 450 - 1.5 * DIMS.width, 300)
    off = offset_between(fa, fb, DIMS)
    got = conflict_pairs(TABLE, fa, fb, off)
    assert got == brute_pairs(fa, fb, DIMS)
    assert got == frozenset({(Corner.UL, Corner.UR), (Corner.LL, Corner.LR)})


def test_far_offsets_are_empty():
    fa, fb = features_at(0, 0, 10_000, 10_000)
    assert conflict_pairs(TABLE, fa, fb, CellOffset(20, 20)) == frozenset()


def test_program_budget():
    progs = TABLE.programs
    assert len(progs) == 81
    assert all(p.n_tests <= 2 for p in progs.values())
    assert TABLE.total_tests == 90  # <= the stated worst case
    two = sum(1 for p in progs.values() if p.n_tests == 2)
    one = sum(1 for p in progs.values() if p.n_tests == 1)
    zero = sum(1 for p in progs.values() if p.n_tests == 0)
    # tests are needed exactly on even-offset axes
    assert (two, one, zero) == (25, 40, 16)


def test_thresholds_scale_with_dims_but_structure_does_not():
    other = build_dispatch_table(LabelDims(30, 7))
    for key, prog in TABLE.programs.items():
        oprog = other.programs[key]
        assert prog.pairs_by_outcome == oprog.pairs_by_outcome
        assert (prog.x_threshold is None) == (oprog.x_threshold is None)
        assert (prog.y_threshold is None) == (oprog.y_threshold is None)
        if prog.x_threshold is not None:
            assert oprog.x_threshold == prog.x_threshold / 150 * 30
        if prog.y_threshold is not None:
            assert oprog.y_threshold == prog.y_threshold / 12 * 7


# Sub-cell positions on a 1/512 grid: every coordinate, rect bound, and
# displacement is exactly representable, so the program and the brute
# predicate evaluate the same real-arithmetic truth.  Exact cell corners
# and exact threshold ties are included.
subcell = st.integers(min_value=0, max_value=511).map(lambda j: j / 512.0)


@given(
    st.integers(min_value=-4, max_value=4),
    st.integers(min_value=-4, max_value=4),
    subcell,
    subcell,
    subcell,
    subcell,
)
@settings(deadline=None, max_examples=300)
def test_pairs_match_brute_force_and_are_symmetric(dr, dc, ax, ay, bx, by):
    cw, ch = DIMS.width / 2, DIMS.height / 2
    fa = Feature(0, ScreenPoint((10 + ax) * cw, (10 + ay) * ch), 2.0)
    fb = Feature(1, ScreenPoint((10 + dc + bx) * cw, (10 + dr + by) * ch), 1.0)
    off = offset_between(fa, fb, DIMS)
    got = conflict_pairs(TABLE, fa, fb, off)
    assert got == brute_pairs(fa, fb, DIMS)
    mirrored = conflict_pairs(TABLE, fb, fa, CellOffset(-off.d_row, -off.d_col))
    assert mirrored == frozenset({(cb, ca) for ca, cb in got})


def test_pairs_match_brute_force_on_continuous_random_data():
    rng = np.random.default_rng(2024)
    cw, ch = DIMS.width / 2, DIMS.height / 2
    for _ in range(2000):
        dr, dc = rng.integers(-4, 5), rng.integers(-4, 5)
        fa = Feature(0, ScreenPoint((10 + rng.random()) * cw, (10 + rng.random()) * ch), 2.0)
        fb = Feature(
            1, ScreenPoint((10 + dc + rng.random()) * cw, (10 + dr + rng.random()) * ch), 1.0
        )
        off = offset_between(fa, fb, DIMS)
        assert conflict_pairs(TABLE, fa, fb, off) == brute_pairs(fa, fb, DIMS)


def test_conflict_edges_equal_brute_graph_edges():
    rng = np.random.default_rng(17)
    view = Viewport(770, 840)
    dims = LabelDims(90, 14)
    features = random_features(rng, 150, width=1200, height=1000, x0=-200, y0=-80)
    x_lo, y_lo, x_hi, y_hi = margin_bounds(view, dims)
    participants = [
        f for f in features if x_lo <= f.position.x <= x_hi and y_lo <= f.position.y <= y_hi
    ]
    assert conflict_edges(features, view, dims) == brute_conflict_graph(participants, dims).edge_set()


def test_format_table_dump():
    text = format_table(TABLE, [CellOffset(0, -4)])
    assert "offset (d_row=+0, d_col=-4)" in text
    assert "dx vs -300" in text
    assert "A.UL:B.UR" in text
    full = format_table(TABLE)
    assert full.count("offset (") == 81
