"""Candidate values, dynamic value adjustments, and selection expense.

The selection strategy treats every candidate as resting on a "pile" of
the lower-priority candidates it would occlude; the pile's cost is the
proximity-weighted sum of their current values.  Values are dynamic: each
time a candidate is occluded, its siblings gain its initial value, so an
only-child candidate carries the combined worth of all four originals.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import IntEnum
from pathlib import Path
from typing import Iterable, Sequence

from .geometry import Corner, Feature

RANK_SPREAD = "rank_spread"
RAW_PRIORITY = "raw_priority"


class SlotState(IntEnum):
    AVAILABLE = 0
    SELECTED = 1
    DESELECTED = 2
    OCCLUDED = 3


@dataclass
class CandidateSlot:
    """One corner candidate of a feature, with its mutable value and state.

    ``base_value`` freezes the value assigned at initialization; sibling
    occlusion bumps add base values, so the bumps commute and an
    only-child's value is exactly the sum of the four initial values.
    """

    feature_id: int
    corner: Corner
    value: float
    state: SlotState = SlotState.AVAILABLE
    base_value: float = field(default=0.0)

    def __post_init__(self) -> None:
        if self.base_value == 0.0:
            self.base_value = self.value


@dataclass(frozen=True)
class CostConfig:
    """Tunables for the cost model.

    ``prox_wt`` weights conflict-partner values by cell proximity (nearer
    partners need more zoom steps to de-conflict, so they cost more to
    occlude).  ``preference_multipliers`` scale candidate values in
    UR, LR, UL, LL order and must be strictly decreasing.  ``cover_wt``
    optionally charges for feature points a label would over-post;
    0 disables the term.
    """

    prox_wt: float = 0.5
    preference_multipliers: tuple[float, float, float, float] = (1.0, 0.95, 0.90, 0.85)
    cover_wt: float = 0.0
    base_value_mode: str = RANK_SPREAD

    def __post_init__(self) -> None:
        if not self.prox_wt > 0:
            raise ValueError(f"prox_wt must be positive, got {self.prox_wt}")
        m = self.preference_multipliers
        if len(m) != 4 or not (m[0] > m[1] > m[2] > m[3]):
            raise ValueError(f"preference multipliers must be strictly decreasing, got {m}")
        if self.cover_wt < 0:
            raise ValueError(f"cover_wt must be non-negative, got {self.cover_wt}")
        if self.base_value_mode not in (RANK_SPREAD, RAW_PRIORITY):
            raise ValueError(f"unknown base_value_mode {self.base_value_mode!r}")

    @classmethod
    def from_file(cls, path: str | Path) -> "CostConfig":
        """Load from a flat key=value file ('#' starts a comment).

        Keys: prox_wt, mult_ur, mult_lr, mult_ul, mult_ll, cover_wt,
        base_value_mode.
        """
        values: dict[str, str] = {}
        for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected key=value, got {raw!r}")
            key, _, val = line.partition("=")
            values[key.strip()] = val.strip()

        known = {"prox_wt", "mult_ur", "mult_lr", "mult_ul", "mult_ll", "cover_wt", "base_value_mode"}
        unknown = set(values) - known
        if unknown:
            raise ValueError(f"{path}: unknown config keys {sorted(unknown)}")

        defaults = cls()
        mults = list(defaults.preference_multipliers)
        for i, key in enumerate(("mult_ur", "mult_lr", "mult_ul", "mult_ll")):
            if key in values:
                mults[i] = float(values[key])
        return cls(
            prox_wt=float(values.get("prox_wt", defaults.prox_wt)),
            preference_multipliers=tuple(mults),
            cover_wt=float(values.get("cover_wt", defaults.cover_wt)),
            base_value_mode=values.get("base_value_mode", defaults.base_value_mode),
        )


def assign_feature_values(
    features_ascending: Sequence[Feature], mode: str = RANK_SPREAD
) -> list[float]:
    """Per-feature values for features sorted ascending by priority.

    RANK_SPREAD ignores raw priority magnitudes and spreads ranks
    super-linearly: value(0) = 1 and value(i) = value(i-1) + (i+1)/n, so
    high-priority features get increasingly greater weight and a cluster
    of low-priority candidates cannot cheaply outweigh one high-priority
    candidate.  RAW_PRIORITY uses the priority field verbatim.
    """
    n = len(features_ascending)
    if n == 0:
        return []
    if mode == RAW_PRIORITY:
        return [float(f.priority) for f in features_ascending]
    values = [1.0]
    for i in range(1, n):
        values.append(values[i - 1] + (i + 1) / n)
    return values


def feature_values(features: Iterable[Feature], cfg: CostConfig) -> dict[int, float]:
    """Canonical value assignment keyed by feature id.

    Ascending order is the exact reverse of processing order: priority
    ascending with id descending on ties.
    """
    ordered = sorted(features, key=lambda f: (f.priority, -f.id))
    vals = assign_feature_values(ordered, cfg.base_value_mode)
    return {f.id: v for f, v in zip(ordered, vals)}


def make_slots(feature_id: int, value: float, cfg: CostConfig) -> list[CandidateSlot]:
    """The four candidate slots of a feature, preference-scaled."""
    return [
        CandidateSlot(feature_id, c, value * cfg.preference_multipliers[int(c)])
        for c in (Corner.UR, Corner.LR, Corner.UL, Corner.LL)
    ]


def proximity_factor(d: int, cfg: CostConfig) -> float:
    """Occlusion weight for a conflict partner ``d`` cells away (0..4).

    Linear in the Chebyshev cell distance: nearest partners weigh
    prox_wt * 5, the outermost ring weighs prox_wt * 1.
    """
    return cfg.prox_wt * (5.0 - d)


def occlusion_bump(slots: Sequence[CandidateSlot], occluded: CandidateSlot) -> None:
    """Raise the surviving siblings after one slot is occluded.

    Each still-available sibling gains the occluded slot's initial value;
    occluded and deselected slots are left unchanged.
    """
    for s in slots:
        if s is not occluded and s.state == SlotState.AVAILABLE:
            s.value += occluded.base_value


def candidate_expense(
    slot: CandidateSlot,
    partners: Sequence[tuple[CandidateSlot, int]],
    covered: Sequence[float],
    cfg: CostConfig,
) -> float:
    """Cost of selecting ``slot``: what its label would destroy.

    ``partners`` are the slot's live conflict partners among lower-priority
    features, as (partner_slot, cell_distance) in ascending processing-rank
    order; ``covered`` are the values of lower-priority features whose
    points the label would over-post.  Terms accumulate in the given order
    (the selection sweep relies on this being reproducible).
    """
    total = 0.0
    for partner, d in partners:
        total += partner.value * proximity_factor(d, cfg)
    if cfg.cover_wt == 0.0:
        return total
    cov = 0.0
    for v in covered:
        cov += v
    return total + cfg.cover_wt * cov
