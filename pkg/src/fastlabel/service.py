"""Stateless layout endpoint for the interactive viewer loop.

Datasets are loaded once at startup and held immutable; every request
projects the world coordinates through the requested viewport, computes a
fresh layout, and returns it.  Nothing is persisted between requests, so
concurrent requests are independent by construction.
"""

from __future__ import annotations

import json
import sys
import time
from pathlib import Path

from fastapi import FastAPI, HTTPException, Response
from fastapi.middleware.cors import CORSMiddleware
from pydantic import BaseModel, Field

from .cost import CostConfig
from .datasets import Dataset, DatasetError, layout_to_dict, load_points, make_dataset
from .geometry import Feature, ScreenPoint, Viewport
from .selector import place_labels

DATASET_SUFFIXES = (".csv", ".json", ".xy")


class ViewportSpec(BaseModel):
    offset_x: float = 0.0
    offset_y: float = 0.0
    scale: float = 1.0


class SizeSpec(BaseModel):
    width: float
    height: float


class FeatureSpec(BaseModel):
    id: int
    x: float
    y: float
    priority: float
    text: str = ""


class ConfigSpec(BaseModel):
    prox_wt: float | None = None
    mult_ur: float | None = None
    mult_lr: float | None = None
    mult_ul: float | None = None
    mult_ll: float | None = None
    cover_wt: float | None = None
    base_value_mode: str | None = None


class LayoutRequest(BaseModel):
    dataset: str | None = None
    features: list[FeatureSpec] | None = None
    viewport: ViewportSpec = Field(default_factory=ViewportSpec)
    view: SizeSpec
    label: SizeSpec
    config: ConfigSpec | None = None


def load_data_dir(data_dir: str | Path) -> dict[str, Dataset]:
    """Load every recognized dataset file in a directory, keyed by stem.

    Files that fail to parse (e.g. layout output living next to the data)
    are skipped with a warning rather than taking the service down.
    """
    out: dict[str, Dataset] = {}
    root = Path(data_dir)
    if not root.is_dir():
        return out
    for path in sorted(root.iterdir()):
        if path.suffix.lower() in DATASET_SUFFIXES and path.is_file():
            try:
                out[path.stem] = load_points(path)
            except DatasetError as exc:
                print(f"warning: skipping {path.name}: {exc}", file=sys.stderr)
    return out


def _merge_config(spec: ConfigSpec | None) -> CostConfig:
    base = CostConfig()
    if spec is None:
        return base
    mults = list(base.preference_multipliers)
    for i, key in enumerate(("mult_ur", "mult_lr", "mult_ul", "mult_ll")):
        v = getattr(spec, key)
        if v is not None:
            mults[i] = v
    try:
        return CostConfig(
            prox_wt=spec.prox_wt if spec.prox_wt is not None else base.prox_wt,
            preference_multipliers=tuple(mults),
            cover_wt=spec.cover_wt if spec.cover_wt is not None else base.cover_wt,
            base_value_mode=spec.base_value_mode or base.base_value_mode,
        )
    except ValueError as exc:
        raise HTTPException(status_code=400, detail=str(exc)) from exc


def create_app(
    data_dir: str | Path | None = None,
    datasets: dict[str, Dataset] | None = None,
) -> FastAPI:
    loaded: dict[str, Dataset] = {}
    if data_dir is not None:
        loaded.update(load_data_dir(data_dir))
    if datasets:
        loaded.update(datasets)

    app = FastAPI(title="fastlabel layout service")
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )

    @app.get("/datasets")
    def list_datasets() -> list[dict]:
        return [
            {"name": ds.name, "count": ds.count, "bounds": list(ds.bounds)}
            for ds in loaded.values()
        ]

    @app.post("/layout")
    def layout(req: LayoutRequest) -> Response:
        if req.view.width <= 0 or req.view.height <= 0:
            raise HTTPException(status_code=400, detail="view extent must be positive")
        if req.label.width <= 0 or req.label.height <= 0:
            raise HTTPException(status_code=400, detail="label dims must be positive")
        if req.viewport.scale <= 0:
            raise HTTPException(status_code=400, detail="viewport scale must be positive")

        if req.dataset is not None:
            ds = loaded.get(req.dataset)
            if ds is None:
                raise HTTPException(status_code=404, detail=f"unknown dataset {req.dataset!r}")
            features = ds.features
        elif req.features is not None:
            try:
                features = [
                    Feature(f.id, ScreenPoint(f.x, f.y), f.priority, f.text)
                    for f in req.features
                ]
                make_dataset("inline", features)  # id uniqueness check
            except (DatasetError, ValueError) as exc:
                raise HTTPException(status_code=400, detail=str(exc)) from exc
        else:
            raise HTTPException(status_code=400, detail="request needs a dataset name or features")

        view = Viewport(
            width=req.view.width,
            height=req.view.height,
            offset_x=req.viewport.offset_x,
            offset_y=req.viewport.offset_y,
            scale=req.viewport.scale,
        )
        cfg = _merge_config(req.config)

        t0 = time.perf_counter()
        result = place_labels(features, view, (req.label.width, req.label.height), cfg)
        elapsed_ms = (time.perf_counter() - t0) * 1000.0

        payload = layout_to_dict(result)
        payload["elapsed_ms"] = elapsed_ms
        return Response(
            content=json.dumps(payload),
            media_type="application/json",
            headers={"X-Compute-Ms": f"{elapsed_ms:.3f}"},
        )

    return app
