"""Real-time point-feature label placement.

Given prioritized screen-space points and a uniform label size, selects a
maximal-value set of non-overlapping corner-anchored labels at interactive
speeds, using a half-label-size grid index and precomputed per-offset
conflict programs instead of rectangle intersection tests.
"""

from .cost import CandidateSlot, CostConfig, SlotState, assign_feature_values, candidate_expense, occlusion_bump, proximity_factor
from .datasets import Dataset, DatasetError, generate_synthetic, load_points, serialize_layout
from .geometry import Corner, Feature, LabelDims, Rect, ScreenPoint, Viewport, candidate_rect, rects_conflict
from .kernel import CellOffset, DispatchTable, PairTestProgram, build_dispatch_table, conflict_pairs
from .oracle import ConflictGraph, brute_conflict_graph, reference_selection
from .selector import Layout, LayoutStats, Placement, place_labels, precompute_zoom_levels
from .trellis import CellCoord, Trellis, build_trellis, cells_covering, neighborhood, rad_dist

__version__ = "0.1.0"

__all__ = [
    "CandidateSlot",
    "CellCoord",
    "CellOffset",
    "ConflictGraph",
    "Corner",
    "CostConfig",
    "Dataset",
    "DatasetError",
    "DispatchTable",
    "Feature",
    "LabelDims",
    "Layout",
    "LayoutStats",
    "PairTestProgram",
    "Placement",
    "Rect",
    "ScreenPoint",
    "SlotState",
    "Trellis",
    "Viewport",
    "assign_feature_values",
    "brute_conflict_graph",
    "build_dispatch_table",
    "build_trellis",
    "candidate_expense",
    "candidate_rect",
    "cells_covering",
    "conflict_pairs",
    "generate_synthetic",
    "load_points",
    "neighborhood",
    "occlusion_bump",
    "place_labels",
    "precompute_zoom_levels",
    "proximity_factor",
    "rad_dist",
    "rects_conflict",
    "reference_selection",
    "serialize_layout",
    "__version__",
]
