"""Command-line interface: labeling, benchmarking, zoom precompute, data
generation, the debug table dump, and the layout service."""

from __future__ import annotations

import argparse
import json
import platform
import sys
import time
from dataclasses import dataclass
from pathlib import Path

from .cost import CostConfig
from .datasets import (
    DatasetError,
    generate_synthetic,
    load_points,
    save_dataset,
    serialize_layout,
)
from .geometry import LabelDims, Viewport
from .kernel import CellOffset, build_dispatch_table, format_table
from .oracle import reference_selection
from .selector import place_labels, precompute_zoom_levels

EXIT_OK = 0
EXIT_INTERNAL = 1
EXIT_USAGE = 2


@dataclass
class BenchRow:
    n: int
    label: str
    elapsed_s: float
    labels_placed: int


@dataclass
class BenchReport:
    environment: str
    view: str
    seed: int
    kind: str
    rows: list[BenchRow]

    def to_json(self) -> str:
        return json.dumps(
            {
                "environment": self.environment,
                "view": self.view,
                "seed": self.seed,
                "kind": self.kind,
                "rows": [vars(r) for r in self.rows],
            }
        )


def _parse_wh(text: str) -> tuple[float, float]:
    """Parse '<real>x<real>' (e.g. 770x840 or 1.0x0.4)."""
    parts = text.lower().split("x")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError(f"expected WxH, got {text!r}")
    try:
        w, h = float(parts[0]), float(parts[1])
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected WxH, got {text!r}") from exc
    return (w, h)


def _parse_size(text: str) -> int:
    t = text.strip().lower()
    mult = 1
    if t.endswith("k"):
        mult, t = 1000, t[:-1]
    try:
        return int(float(t) * mult)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad size {text!r}") from exc


def _load_config(path: str | None) -> CostConfig:
    return CostConfig.from_file(path) if path else CostConfig()


def _add_view_label_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--view", type=_parse_wh, default=(770.0, 840.0), help="view WxH in pixels")
    sub.add_argument("--label", type=_parse_wh, default=(150.0, 12.0), help="label WxH in pixels")


def cmd_label(args: argparse.Namespace) -> int:
    dataset = load_points(args.input)
    view = Viewport(*args.view)
    dims = LabelDims(*args.label)
    cfg = _load_config(args.config)

    t0 = time.perf_counter()
    if args.engine == "oracle":
        layout = reference_selection(dataset.features, view, dims, cfg)
    else:
        layout = place_labels(dataset.features, view, dims, cfg)
    elapsed_ms = (time.perf_counter() - t0) * 1000.0

    data = serialize_layout(layout, args.format, view)
    if args.out:
        Path(args.out).write_bytes(data)
    else:
        sys.stdout.write(data.decode("utf-8") + "\n")
    print(f"{layout.stats.labeled}/{layout.stats.total} {elapsed_ms:.3f}ms", file=sys.stderr)
    return EXIT_OK


def cmd_bench(args: argparse.Namespace) -> int:
    sizes = [_parse_size(s) for s in args.sizes.split(",") if s.strip()]
    labels = [_parse_wh(s) for s in args.labels.split(",") if s.strip()]
    if not sizes or not labels:
        raise DatasetError("bench needs at least one size and one label dims")
    view = Viewport(*args.view)

    # Absorb one-time JIT cost outside the timed cells.
    warm = generate_synthetic(args.kind, 64, args.seed)
    place_labels(warm.features, view, LabelDims(*labels[0]))

    rows: list[BenchRow] = []
    for n in sizes:
        ds = generate_synthetic(
            args.kind, n, args.seed, {"width": view.width, "height": view.height}
        )
        for w, h in labels:
            t0 = time.perf_counter()
            layout = place_labels(ds.features, view, LabelDims(w, h))
            elapsed = time.perf_counter() - t0
            rows.append(BenchRow(n, f"{w:g}x{h:g}", elapsed, layout.stats.labeled))

    env = f"{platform.python_version()} / {platform.machine()} / {platform.system()}"
    report = BenchReport(env, f"{view.width:g}x{view.height:g}", args.seed, args.kind, rows)

    col_names = [f"{w:g}x{h:g}" for w, h in labels]
    widths = [max(8, len(c) + 2) for c in col_names]
    header = "# pts".ljust(8) + "".join(c.rjust(w) for c, w in zip(col_names, widths))
    print(header)
    by_cell = {(r.n, r.label): r for r in rows}
    for n in sizes:
        cells = [by_cell[(n, c)].elapsed_s for c in col_names]
        print(str(n).ljust(8) + "".join(f"{v:.3f}".rjust(w) for v, w in zip(cells, widths)))
    print()
    print(report.to_json())
    return EXIT_OK


def cmd_zoom(args: argparse.Namespace) -> int:
    dataset = load_points(args.input)
    view = Viewport(*args.view)
    dims = LabelDims(*args.label)
    cfg = _load_config(args.config)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)

    t0 = time.perf_counter()
    layouts = precompute_zoom_levels(dataset.features, view, dims, args.levels, args.factor, cfg)
    total_s = time.perf_counter() - t0

    manifest = {"dataset": dataset.name, "levels": [], "total_seconds": total_s}
    for k, layout in enumerate(layouts):
        name = f"level_{k}.{args.format}"
        (out_dir / name).write_bytes(serialize_layout(layout, args.format, view))
        manifest["levels"].append(
            {
                "level": k,
                "file": name,
                "scale_factor": args.factor**k,
                "label": f"{dims.width / args.factor**k:g}x{dims.height / args.factor**k:g}",
                "labeled": layout.stats.labeled,
            }
        )
    (out_dir / "manifest.json").write_text(json.dumps(manifest, indent=2))
    print(f"{args.levels} levels in {total_s:.3f}s -> {out_dir}", file=sys.stderr)
    return EXIT_OK


def cmd_gen(args: argparse.Namespace) -> int:
    params = {"width": args.width, "height": args.height}
    if args.kind == "gaussian_clusters":
        params["clusters"] = args.clusters
        if args.sigma is not None:
            params["sigma"] = args.sigma
    ds = generate_synthetic(args.kind, args.n, args.seed, params)
    save_dataset(ds, args.out)
    print(f"wrote {ds.count} features -> {args.out}", file=sys.stderr)
    return EXIT_OK


def cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .service import create_app

    app = create_app(data_dir=args.data)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return EXIT_OK


def cmd_dump_table(args: argparse.Namespace) -> int:
    table = build_dispatch_table(LabelDims(*args.label))
    offsets = None
    if args.offset:
        dr, dc = (int(v) for v in args.offset.split(","))
        offsets = [CellOffset(dr, dc)]
    print(format_table(table, offsets))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fastlabel", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("label", help="compute one layout for a dataset file")
    p.add_argument("input", help="dataset file (.csv/.json/.xy)")
    _add_view_label_flags(p)
    p.add_argument("--engine", choices=("trellis", "oracle"), default="trellis")
    p.add_argument("--config", help="cost config file (flat key=value)")
    p.add_argument("--out", help="output path (default: stdout)")
    p.add_argument("--format", choices=("json", "svg"), default="json")
    p.set_defaults(func=cmd_label)

    p = sub.add_parser("bench", help="time layouts over synthetic datasets")
    p.add_argument("--sizes", default="1k,3k,5k,11k,25k,50k,75k", help="comma list (k suffix ok)")
    p.add_argument("--labels", default="50x8,100x10,150x12,200x14", help="comma list of WxH")
    p.add_argument("--view", type=_parse_wh, default=(770.0, 840.0))
    p.add_argument("--seed", type=int, default=7)
    p.add_argument("--kind", choices=("uniform", "gaussian_clusters"), default="uniform")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("zoom", help="precompute layouts for multiple zoom levels")
    p.add_argument("input")
    p.add_argument("--levels", type=int, default=8)
    p.add_argument("--factor", type=float, default=1.5)
    _add_view_label_flags(p)
    p.add_argument("--config")
    p.add_argument("--out", default="zoom_out", help="output directory")
    p.add_argument("--format", choices=("json", "svg"), default="json")
    p.set_defaults(func=cmd_zoom)

    p = sub.add_parser("gen", help="generate a synthetic dataset file (CSV)")
    p.add_argument("--kind", choices=("uniform", "gaussian_clusters"), default="uniform")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.add_argument("--width", type=float, default=770.0)
    p.add_argument("--height", type=float, default=840.0)
    p.add_argument("--clusters", type=int, default=40)
    p.add_argument("--sigma", type=float, default=None)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("serve", help="run the layout service")
    p.add_argument("--port", type=int, default=8008)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--data", default="data", help="directory of dataset files")
    p.set_defaults(func=cmd_serve)

    p = sub.add_parser("dump-table", help="print the conflict dispatch table")
    p.add_argument("--label", type=_parse_wh, default=(150.0, 12.0))
    p.add_argument("--offset", help="single offset as 'd_row,d_col'")
    p.set_defaults(func=cmd_dump_table)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (DatasetError, FileNotFoundError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except KeyboardInterrupt:
        return EXIT_INTERNAL
    except Exception as exc:  # pragma: no cover - defensive
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
