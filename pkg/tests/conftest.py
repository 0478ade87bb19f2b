from __future__ import annotations

import numpy as np
import pytest

from fastlabel import Feature, LabelDims, ScreenPoint, Viewport, generate_synthetic, place_labels

VIEW = Viewport(770, 840)
DIMS = LabelDims(150, 12)


@pytest.fixture(scope="session", autouse=True)
def warm_engine():
    """Absorb one-time JIT compilation before anything is timed."""
    ds = generate_synthetic("uniform", 64, 0)
    place_labels(ds.features, VIEW, DIMS)


def random_features(
    rng: np.random.Generator,
    n: int,
    width: float = 770.0,
    height: float = 840.0,
    x0: float = 0.0,
    y0: float = 0.0,
) -> list[Feature]:
    """Uniform points with distinct shuffled priorities."""
    xs = rng.uniform(x0, x0 + width, n)
    ys = rng.uniform(y0, y0 + height, n)
    prios = rng.permutation(n) + 1
    return [
        Feature(i, ScreenPoint(float(xs[i]), float(ys[i])), float(prios[i]), f"f{i}")
        for i in range(n)
    ]


def clustered_features(
    rng: np.random.Generator,
    n: int,
    clusters: int = 8,
    sigma: float = 50.0,
    width: float = 770.0,
    height: float = 840.0,
) -> list[Feature]:
    centers = rng.uniform((0.0, 0.0), (width, height), size=(clusters, 2))
    assign = rng.integers(0, clusters, n)
    pos = centers[assign] + rng.normal(0.0, sigma, size=(n, 2))
    prios = rng.permutation(n) + 1
    return [
        Feature(i, ScreenPoint(float(pos[i, 0]), float(pos[i, 1])), float(prios[i]), f"f{i}")
        for i in range(n)
    ]
