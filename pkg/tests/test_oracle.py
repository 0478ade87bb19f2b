import numpy as np

from fastlabel.geometry import Corner, Feature, LabelDims, ScreenPoint, Viewport
from fastlabel.kernel import CellOffset, build_dispatch_table, conflict_pairs
from fastlabel.oracle import brute_conflict_graph, reference_selection
from fastlabel.selector import place_labels
from fastlabel.trellis import build_trellis

from conftest import DIMS, VIEW, clustered_features, random_features


def feat(i, x, y, prio):
    return Feature(i, ScreenPoint(x, y), prio)


def test_empty_graph():
    g = brute_conflict_graph([], DIMS)
    assert g.edge_set() == set() and g.edge_count == 0


def test_coincident_pair_graph():
    g = brute_conflict_graph([feat(0, 5, 5, 2.0), feat(1, 5, 5, 1.0)], DIMS)
    assert g.edge_set() == {(((0, c)), ((1, c))) for c in Corner}
    assert g.partners(0, Corner.UR) == {(1, Corner.UR)}


def test_graph_symmetric_no_self_or_sibling_edges():
    rng = np.random.default_rng(4)
    features = clustered_features(rng, 120, clusters=5, sigma=25)
    g = brute_conflict_graph(features, DIMS)
    for (ida, ca), nbrs in g.adjacency.items():
        for idb, cb in nbrs:
            assert idb != ida  # no self or sibling edges
            assert (ida, ca) in g.adjacency[(idb, cb)]  # symmetry


def test_graph_matches_dispatch_table_on_neighborhood_pairs():
    rng = np.random.default_rng(9)
    features = random_features(rng, 180, width=500, height=400)
    dims = LabelDims(80, 22)
    table = build_dispatch_table(dims)
    t = build_trellis(features, Viewport(500, 400), dims)
    by_id = {f.id: f for f in features}

    edges = set()
    ids = [int(i) for i in t.ids]
    for i in range(t.count):
        for j in range(t.count):
            if i == j:
                continue
            dr = int(t.rows[j] - t.rows[i])
            dc = int(t.cols[j] - t.cols[i])
            if max(abs(dr), abs(dc)) > 4:
                continue
            for ca, cb in conflict_pairs(table, by_id[ids[i]], by_id[ids[j]], CellOffset(dr, dc)):
                sa, sb = (ids[i], ca), (ids[j], cb)
                edges.add((sa, sb) if sa <= sb else (sb, sa))

    assert edges == brute_conflict_graph(features, dims).edge_set()


def test_reference_selection_single_feature():
    lay = reference_selection([feat(0, 200, 200, 1.0)], VIEW, DIMS)
    (p,) = lay.placements
    assert p.labeled and p.corner == Corner.UR


def test_reference_selection_equals_engine():
    rng = np.random.default_rng(77)
    for fs in (
        random_features(rng, 240),
        clustered_features(rng, 240, clusters=6, sigma=35),
    ):
        fast = place_labels(fs, VIEW, DIMS)
        ref = reference_selection(fs, VIEW, DIMS)
        assert fast.placements == ref.placements
