import dataclasses

import numpy as np
import pytest

from fastlabel.cost import RAW_PRIORITY, CostConfig
from fastlabel.geometry import Corner, Feature, ScreenPoint, Viewport, rects_conflict
from fastlabel.oracle import reference_selection
from fastlabel.selector import (
    Layout,
    check_no_overlaps,
    place_labels,
    precompute_zoom_levels,
)

from conftest import DIMS, VIEW, clustered_features, random_features


def feat(i, x, y, prio, text=""):
    return Feature(i, ScreenPoint(x, y), prio, text)


def stats_without_timing(layout: Layout) -> dict:
    d = dataclasses.asdict(layout.stats)
    d.pop("elapsed_ms")
    return d


def test_single_feature_gets_preferred_corner():
    lay = place_labels([feat(0, 400, 400, 1.0, "solo")], VIEW, DIMS)
    (p,) = lay.placements
    assert p.labeled and p.corner == Corner.UR
    assert (p.rect.left, p.rect.bottom) == (400, 400)
    assert lay.stats.labeled == 1 and lay.stats.unlabeled == 0


def test_two_distant_features_both_get_upper_right():
    fs = [feat(0, 100, 100, 2.0), feat(1, 500, 500, 1.0)]
    lay = place_labels(fs, VIEW, DIMS)
    assert [p.corner for p in lay.placements] == [Corner.UR, Corner.UR]


def test_coincident_pair_selection():
    # Same-corner conflicts only.  With strictly decreasing preference
    # multipliers the cheapest pile under the high-priority feature is the
    # least-preferred corner, freeing the preferred corner for the loser.
    fs = [feat(0, 300, 300, 2.0), feat(1, 300, 300, 1.0)]
    lay = place_labels(fs, VIEW, DIMS)
    ref = reference_selection(fs, VIEW, DIMS)
    assert lay.placements == ref.placements
    assert [p.corner for p in lay.placements] == [Corner.LL, Corner.UR]
    assert not rects_conflict(lay.placements[0].rect, lay.placements[1].rect)


def test_identical_position_and_priority_processed_by_id():
    fs = [feat(1, 300, 300, 1.0), feat(0, 300, 300, 1.0)]
    lay = place_labels(fs, VIEW, DIMS)
    by_id = {p.id: p for p in lay.placements}
    assert by_id[0].labeled and by_id[1].labeled
    assert by_id[0].corner != by_id[1].corner
    assert by_id[0].corner == Corner.LL  # lower id processed first


def test_coincident_stack_of_five():
    fs = [feat(i, 300, 300, 10.0 - i) for i in range(5)]
    lay = place_labels(fs, VIEW, DIMS)
    by_id = {p.id: p for p in lay.placements}
    assert [by_id[i].corner for i in range(4)] == [Corner.LL, Corner.UL, Corner.LR, Corner.UR]
    assert not by_id[4].labeled  # all four slots occluded before its turn
    assert lay.stats.labeled == 4 and lay.stats.unlabeled == 1


def test_empty_input():
    lay = place_labels([], VIEW, DIMS)
    assert lay.placements == [] and lay.stats.total == 0


def test_invalid_dims_rejected():
    with pytest.raises(ValueError):
        place_labels([feat(0, 1, 1, 1.0)], VIEW, (0.0, 5.0))


def test_determinism():
    rng = np.random.default_rng(5)
    fs = random_features(rng, 300)
    a = place_labels(fs, VIEW, DIMS)
    b = place_labels(fs, VIEW, DIMS)
    assert a.placements == b.placements
    assert stats_without_timing(a) == stats_without_timing(b)


def test_margin_feature_participates_and_is_counted():
    # High-priority feature outside the view but inside the one-label margin
    # still claims space that reaches into the view.
    fs = [feat(0, -50, 300, 5.0), feat(1, 40, 300, 1.0)]
    lay = place_labels(fs, VIEW, DIMS)
    assert lay.stats.margin == 1 and lay.stats.in_view == 1 and lay.stats.excluded == 0
    by_id = {p.id: p for p in lay.placements}
    assert by_id[0].labeled and by_id[1].labeled
    assert not rects_conflict(by_id[0].rect, by_id[1].rect)


def test_out_of_margin_features_are_excluded_but_reported():
    fs = [feat(0, 400, 400, 2.0), feat(1, 5000, 5000, 9.0)]
    lay = place_labels(fs, VIEW, DIMS)
    by_id = {p.id: p for p in lay.placements}
    assert by_id[0].labeled
    assert not by_id[1].labeled and by_id[1].rect is None
    assert lay.stats.excluded == 1
    assert lay.stats.total == 2 and lay.stats.labeled == 1


def test_anchoring_is_exact():
    rng = np.random.default_rng(11)
    fs = random_features(rng, 400)
    lay = place_labels(fs, VIEW, DIMS)
    for p in lay.placed():
        r = p.rect
        if p.corner == Corner.UR:
            assert (r.left, r.bottom) == (p.x, p.y)
        elif p.corner == Corner.LR:
            assert (r.left, r.top) == (p.x, p.y)
        elif p.corner == Corner.UL:
            assert (r.right, r.bottom) == (p.x, p.y)
        else:
            assert (r.right, r.top) == (p.x, p.y)


def test_no_overlaps_on_dense_instances():
    rng = np.random.default_rng(23)
    for fs in (random_features(rng, 1500), clustered_features(rng, 1500, sigma=30)):
        lay = place_labels(fs, VIEW, DIMS)
        assert check_no_overlaps(lay)


def test_viewport_projection_equivalence():
    # Labeling world features through a transform equals labeling the
    # pre-projected coordinates with an identity viewport.
    rng = np.random.default_rng(31)
    world = random_features(rng, 250, width=77000, height=84000)
    vp = Viewport(770, 840, offset_x=500.0, offset_y=-300.0, scale=0.01)
    direct = place_labels(world, vp, DIMS)
    pre = [
        Feature(f.id, ScreenPoint(*vp.project(f.position.x, f.position.y)), f.priority, f.text)
        for f in world
    ]
    identity = place_labels(pre, Viewport(770, 840), DIMS)
    assert direct.placements == identity.placements


def test_raw_priority_scaling_leaves_selection_unchanged():
    rng = np.random.default_rng(13)
    fs = random_features(rng, 350)
    cfg = CostConfig(base_value_mode=RAW_PRIORITY)
    base = place_labels(fs, VIEW, DIMS, cfg)
    for k in (2.0, 0.5, 64.0):
        scaled = [Feature(f.id, f.position, f.priority * k, f.text) for f in fs]
        lay = place_labels(scaled, VIEW, DIMS, cfg)
        assert [(p.id, p.corner) for p in lay.placements] == [
            (p.id, p.corner) for p in base.placements
        ]


def test_zoom_levels_validation_and_degenerate_case():
    fs = [feat(0, 100, 100, 1.0)]
    with pytest.raises(ValueError):
        precompute_zoom_levels(fs, VIEW, DIMS, 0, 2.0)
    with pytest.raises(ValueError):
        precompute_zoom_levels(fs, VIEW, DIMS, 3, 1.0)
    single = precompute_zoom_levels(fs, VIEW, DIMS, 1, 2.0)
    assert len(single) == 1
    assert single[0].placements == place_labels(fs, VIEW, DIMS).placements


def test_zoom_level_zero_matches_base_layout():
    rng = np.random.default_rng(2)
    fs = random_features(rng, 400)
    levels = precompute_zoom_levels(fs, VIEW, DIMS, 3, 1.5)
    assert levels[0].placements == place_labels(fs, VIEW, DIMS).placements


@pytest.mark.parametrize("seed,kind", [(1, "clusters"), (2, "clusters"), (3, "clusters"), (1, "uniform"), (5, "uniform")])
def test_zoom_labeled_count_non_decreasing(seed, kind):
    rng = np.random.default_rng(seed)
    if kind == "clusters":
        fs = clustered_features(rng, 900, clusters=12, sigma=60)
    else:
        fs = random_features(rng, 1200)
    counts = [l.stats.labeled for l in precompute_zoom_levels(fs, VIEW, DIMS, 6, 1.5)]
    assert all(a <= b for a, b in zip(counts, counts[1:])), counts


def test_stats_add_up():
    rng = np.random.default_rng(8)
    fs = random_features(rng, 500, width=1400, height=1400, x0=-300, y0=-300)
    lay = place_labels(fs, VIEW, DIMS)
    st = lay.stats
    assert st.total == 500
    assert st.labeled + st.unlabeled == st.total
    assert st.in_view + st.margin + st.excluded == st.total
    assert len(lay.placements) == 500
    assert [p.id for p in lay.placements] == sorted(p.id for p in lay.placements)
    assert st.predicate_evals > 0
