"""Dataset loading, synthetic generation, and layout serialization."""

from __future__ import annotations

import csv
import json
from dataclasses import asdict, dataclass
from pathlib import Path
from xml.sax.saxutils import escape

import numpy as np

from .geometry import Corner, Feature, Rect, ScreenPoint, Viewport
from .selector import Layout, LayoutStats, Placement

UNIFORM = "uniform"
GAUSSIAN_CLUSTERS = "gaussian_clusters"

CSV_FORMAT = "csv"
JSON_FORMAT = "json"
XY_FORMAT = "xy"

_SUFFIXES = {".csv": CSV_FORMAT, ".json": JSON_FORMAT, ".xy": XY_FORMAT, ".txt": XY_FORMAT}


class DatasetError(ValueError):
    """Malformed or inconsistent input data."""


@dataclass(frozen=True)
class Dataset:
    """A named collection of features in world coordinates."""

    name: str
    features: list[Feature]
    bounds: tuple[float, float, float, float]  # min_x, min_y, max_x, max_y

    @property
    def count(self) -> int:
        return len(self.features)


def _bounds(features: list[Feature]) -> tuple[float, float, float, float]:
    if not features:
        return (0.0, 0.0, 0.0, 0.0)
    xs = [f.position.x for f in features]
    ys = [f.position.y for f in features]
    return (min(xs), min(ys), max(xs), max(ys))


def make_dataset(name: str, features: list[Feature]) -> Dataset:
    seen: set[int] = set()
    for f in features:
        if f.id in seen:
            raise DatasetError(f"duplicate feature id {f.id}")
        seen.add(f.id)
    return Dataset(name, features, _bounds(features))


def _default_priorities(rows: int) -> list[float]:
    # Earlier rows are more important when no priority is given.
    return [float(rows - i) for i in range(rows)]


def _load_csv(path: Path) -> list[Feature]:
    with path.open(newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            raise DatasetError(f"{path}: empty file, header required")
        cols = [c.strip() for c in reader.fieldnames]
        for required in ("id", "x", "y"):
            if required not in cols:
                raise DatasetError(f"{path}: missing required column {required!r}")
        has_priority = "priority" in cols
        has_text = "text" in cols

        raw: list[tuple[int, float, float, float | None, str]] = []
        for lineno, row in enumerate(reader, start=2):
            try:
                fid = int(row["id"])
                x = float(row["x"])
                y = float(row["y"])
                priority = float(row["priority"]) if has_priority and row["priority"] != "" else None
                text = row["text"] if has_text and row["text"] is not None else ""
            except (TypeError, ValueError, KeyError) as exc:
                raise DatasetError(f"{path}: line {lineno}: malformed row ({exc})") from exc
            raw.append((fid, x, y, priority, text))

    defaults = _default_priorities(len(raw))
    return [
        Feature(fid, ScreenPoint(x, y), priority if priority is not None else defaults[i], text)
        for i, (fid, x, y, priority, text) in enumerate(raw)
    ]


def _load_json(path: Path) -> list[Feature]:
    try:
        data = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise DatasetError(f"{path}: invalid JSON ({exc})") from exc
    if not isinstance(data, list):
        raise DatasetError(f"{path}: expected a JSON array of feature objects")
    raw = []
    for i, obj in enumerate(data):
        try:
            raw.append(
                (
                    int(obj["id"]),
                    float(obj["x"]),
                    float(obj["y"]),
                    float(obj["priority"]) if "priority" in obj else None,
                    str(obj.get("text", "")),
                )
            )
        except (TypeError, ValueError, KeyError) as exc:
            raise DatasetError(f"{path}: entry {i}: malformed feature ({exc})") from exc
    defaults = _default_priorities(len(raw))
    return [
        Feature(fid, ScreenPoint(x, y), priority if priority is not None else defaults[i], text)
        for i, (fid, x, y, priority, text) in enumerate(raw)
    ]


def _load_xy(path: Path) -> list[Feature]:
    """Whitespace-separated ``x y [weight]`` rows (benchmark-site style).

    The optional weight becomes the priority; without one, earlier rows
    rank higher.  Row order is the id order, which also breaks priority
    ties deterministically.
    """
    raw: list[tuple[float, float, float | None]] = []
    with path.open() as fh:
        for lineno, line in enumerate(fh, start=1):
            parts = line.split()
            if not parts or parts[0].startswith("#"):
                continue
            if len(parts) not in (2, 3):
                raise DatasetError(f"{path}: line {lineno}: expected 'x y [weight]', got {line!r}")
            try:
                x, y = float(parts[0]), float(parts[1])
                weight = float(parts[2]) if len(parts) == 3 else None
            except ValueError as exc:
                raise DatasetError(f"{path}: line {lineno}: malformed number ({exc})") from exc
            raw.append((x, y, weight))
    defaults = _default_priorities(len(raw))
    return [
        Feature(i, ScreenPoint(x, y), weight if weight is not None else defaults[i], str(i))
        for i, (x, y, weight) in enumerate(raw)
    ]


def load_points(path: str | Path, format: str | None = None) -> Dataset:
    """Load a dataset; the format defaults from the file suffix."""
    path = Path(path)
    if not path.exists():
        raise DatasetError(f"no such file: {path}")
    fmt = (format or _SUFFIXES.get(path.suffix.lower(), "")).lower()
    if fmt == CSV_FORMAT:
        features = _load_csv(path)
    elif fmt == JSON_FORMAT:
        features = _load_json(path)
    elif fmt == XY_FORMAT:
        features = _load_xy(path)
    else:
        raise DatasetError(f"{path}: unknown dataset format {format or path.suffix!r}")
    return make_dataset(path.stem, features)


def save_dataset(dataset: Dataset, path: str | Path) -> None:
    """Write a dataset as CSV with the full column set."""
    path = Path(path)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["id", "x", "y", "priority", "text"])
        for f in dataset.features:
            writer.writerow([f.id, repr(f.position.x), repr(f.position.y), repr(f.priority), f.text])


def generate_synthetic(
    kind: str,
    n: int,
    seed: int,
    params: dict | None = None,
) -> Dataset:
    """Deterministic synthetic point clouds.

    UNIFORM draws i.i.d. positions over a width x height domain;
    GAUSSIAN_CLUSTERS draws cluster centers uniformly and scatters points
    around them with the given sigma.  Priorities are a random permutation
    of 1..n.  Params: width, height (default 1000), clusters (default 10),
    sigma (default min(width, height) / 20).
    """
    if n < 0:
        raise ValueError(f"n must be >= 0, got {n}")
    p = dict(params or {})
    width = float(p.pop("width", 1000.0))
    height = float(p.pop("height", 1000.0))
    clusters = int(p.pop("clusters", 10))
    sigma = p.pop("sigma", None)
    if p:
        raise ValueError(f"unknown params {sorted(p)}")
    if width <= 0 or height <= 0:
        raise ValueError("width/height must be positive")

    rng = np.random.default_rng(seed)
    kind = kind.lower()
    if kind == UNIFORM:
        xs = rng.uniform(0.0, width, n)
        ys = rng.uniform(0.0, height, n)
    elif kind == GAUSSIAN_CLUSTERS:
        if clusters < 1:
            raise ValueError(f"clusters must be >= 1, got {clusters}")
        sig = float(sigma) if sigma is not None else min(width, height) / 20.0
        if sig <= 0:
            raise ValueError(f"sigma must be positive, got {sig}")
        centers = rng.uniform((0.0, 0.0), (width, height), size=(clusters, 2))
        assign = rng.integers(0, clusters, n)
        offsets = rng.normal(0.0, sig, size=(n, 2))
        xs = centers[assign, 0] + offsets[:, 0]
        ys = centers[assign, 1] + offsets[:, 1]
    else:
        raise ValueError(f"unknown synthetic kind {kind!r}")

    priorities = rng.permutation(n) + 1
    features = [
        Feature(i, ScreenPoint(float(xs[i]), float(ys[i])), float(priorities[i]), f"f{i}")
        for i in range(n)
    ]
    name = f"{kind}_n{n}_s{seed}"
    return make_dataset(name, features)


# --- layout serialization ---------------------------------------------------


def placement_to_dict(p: Placement) -> dict:
    return {
        "id": p.id,
        "x": p.x,
        "y": p.y,
        "priority": p.priority,
        "text": p.text,
        "corner": p.corner.name if p.corner is not None else None,
        "rect": [p.rect.left, p.rect.top, p.rect.right, p.rect.bottom] if p.rect else None,
        "labeled": p.labeled,
    }


def layout_to_dict(layout: Layout) -> dict:
    return {
        "placements": [placement_to_dict(p) for p in layout.placements],
        "stats": asdict(layout.stats),
    }


def layout_from_dict(data: dict) -> Layout:
    placements = []
    for rec in data["placements"]:
        corner = Corner[rec["corner"]] if rec["corner"] is not None else None
        rect = Rect(*rec["rect"]) if rec["rect"] is not None else None
        placements.append(
            Placement(
                int(rec["id"]),
                float(rec["x"]),
                float(rec["y"]),
                float(rec["priority"]),
                rec["text"],
                corner,
                rect,
                bool(rec["labeled"]),
            )
        )
    return Layout(placements=placements, stats=LayoutStats(**data["stats"]))


def _svg_font_size(height: float) -> float:
    return 0.8 * height


def layout_to_svg(layout: Layout, view: Viewport | None = None) -> str:
    """Figure-style rendering: feature dots, label boxes, clipped text.

    Text is truncated to an assumed glyph width (0.6 em) so rendering never
    depends on real font metrics.
    """
    if view is not None:
        width, height = view.width, view.height
    else:
        xs = [p.x for p in layout.placements] or [0.0]
        ys = [p.y for p in layout.placements] or [0.0]
        width, height = max(xs) + 10.0, max(ys) + 10.0

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width:g}" height="{height:g}" '
        f'viewBox="0 0 {width:g} {height:g}">',
        '<g fill="#444">',
    ]
    for p in layout.placements:
        parts.append(f'<circle cx="{p.x:g}" cy="{p.y:g}" r="1.2"/>')
    parts.append("</g>")

    for p in layout.placements:
        if not p.labeled or p.rect is None:
            continue
        r = p.rect
        font = _svg_font_size(r.height)
        max_chars = max(1, int(r.width / (0.6 * font))) if font > 0 else 1
        text = escape(p.text[:max_chars])
        parts.append(
            f'<rect x="{r.left:g}" y="{r.top:g}" width="{r.width:g}" height="{r.height:g}" '
            f'fill="white" fill-opacity="0.85" stroke="#1f77b4" stroke-width="0.5"/>'
        )
        baseline = r.bottom - 0.2 * r.height
        parts.append(
            f'<text x="{r.left + 1:g}" y="{baseline:g}" font-family="monospace" '
            f'font-size="{font:g}">{text}</text>'
        )
    parts.append("</svg>")
    return "\n".join(parts)


def serialize_layout(layout: Layout, format: str = "json", view: Viewport | None = None) -> bytes:
    fmt = format.lower()
    if fmt == "json":
        return json.dumps(layout_to_dict(layout)).encode("utf-8")
    if fmt == "svg":
        return layout_to_svg(layout, view).encode("utf-8")
    raise ValueError(f"unknown layout format {format!r}")


def deserialize_layout(data: bytes | str) -> Layout:
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    return layout_from_dict(json.loads(data))
