"""Command-line entry point.

Subcommands: convert, dist, palette, eval, serve, simulate. Exit codes:
0 success, 2 usage error, 1 runtime error. Results go to stdout, diagnostics
to stderr, and numbers print with 4 decimal places so outputs are stable for
a fixed seed.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from . import __version__
from . import metrics as metrics_mod
from .colors import ColorSpace, Srgb8, convert, format_hex, parse_color

PALETTE_SHEET_SPACES = ("srgb8", "hsv", "hsl", "xyz", "lab", "luv")


class UsageError(Exception):
    """Bad user input that argparse could not catch on its own."""


def _fmt(value: float) -> str:
    # round first so values a hair below zero do not print as -0.0000
    return f"{round(float(value), 4) + 0.0:.4f}"


def data_dir() -> Path:
    """Directory with the bundled reference data and demo image."""
    return Path(__file__).resolve().parent / "data"


def bundled_dataset_dir() -> Path:
    """Directory of bundled color-pair datasets served by default."""
    return data_dir() / "datasets"


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="chromadiff",
        description="Perceptual color difference toolkit",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("convert", help="convert a color literal to another space")
    p.add_argument("color", help="color literal: #RRGGBB or r,g,b")
    p.add_argument("--to", required=True, dest="space",
                   choices=[s.value for s in ColorSpace], help="target color space")

    p = sub.add_parser("dist", help="distance between two colors under a metric")
    p.add_argument("color_a")
    p.add_argument("color_b")
    p.add_argument("--metric", required=True, help="metric id (see `eval --help`)")

    p = sub.add_parser("palette", help="extract a dominant palette from an image")
    p.add_argument("image")
    p.add_argument("--space", default="lab", choices=[s.value for s in ColorSpace])
    p.add_argument("--k", type=int, default=6)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-iters", type=int, default=100)
    p.add_argument("--tol", type=float, default=1e-6)
    p.add_argument("--sheet", metavar="OUT.png",
                   help="write a side-by-side swatch sheet over --spaces")
    p.add_argument("--spaces", default=",".join(PALETTE_SHEET_SPACES),
                   help="comma-separated spaces for --sheet")

    p = sub.add_parser("eval", help="correlation/MAE report of metrics vs human scores")
    p.add_argument("dataset", help="color-pair dataset csv (or distance table with --precomputed)")
    p.add_argument("--metrics", default=",".join(metrics_mod.TABLE_METRICS),
                   help="comma-separated metric ids")
    p.add_argument("--out", metavar="REPORT.csv")
    p.add_argument("--heatmap", metavar="OUT.svg")
    p.add_argument("--judgments", metavar="LOG.jsonl",
                   help="take human scores from an exported judgment log")
    p.add_argument("--precomputed", action="store_true",
                   help="dataset file is a precomputed distance table with a human column")

    # serve flags fall back to environment variables for container setups
    env = os.environ
    p = sub.add_parser("serve", help="run the survey HTTP service")
    p.add_argument("--addr", default=env.get("CHROMADIFF_ADDR", "127.0.0.1:8077"))
    p.add_argument("--data-dir", default=env.get("CHROMADIFF_DATA_DIR"),
                   required="CHROMADIFF_DATA_DIR" not in env)
    p.add_argument("--datasets", default=env.get("CHROMADIFF_DATASETS"),
                   help="directory of dataset csv files (default: bundled datasets)")
    p.add_argument("--ui-dir", default=env.get("CHROMADIFF_UI_DIR"),
                   help="static frontend assets to serve at /")
    p.add_argument("--afc-cap", type=int, default=20)

    p = sub.add_parser("simulate", help="drive synthetic respondents through a live service")
    p.add_argument("dataset", help="dataset name known to the service")
    p.add_argument("--url", default="http://127.0.0.1:8077")
    p.add_argument("--respondents", type=int, default=5)
    p.add_argument("--noise", type=float, default=0.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--oracle-metric", default="lab_cie2000")

    return parser


def cmd_convert(args) -> int:
    try:
        color = parse_color(args.color)
        out = convert(color, args.space)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    if isinstance(out, Srgb8):
        print(format_hex(out))
    else:
        print(" ".join(_fmt(v) for v in out))
    return 0


def cmd_dist(args) -> int:
    try:
        a = parse_color(args.color_a)
        b = parse_color(args.color_b)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    try:
        value = metrics_mod.evaluate(args.metric, a, b)
    except KeyError as exc:
        raise UsageError(exc.args[0]) from exc
    print(_fmt(value))
    return 0


def cmd_palette(args) -> int:
    from .palette import KmeansConfig, extract_palette, format_report, render_swatch_sheet

    try:
        cfg = KmeansConfig(k=args.k, seed=args.seed, max_iters=args.max_iters, tol=args.tol)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc

    if args.sheet:
        spaces = [s.strip() for s in args.spaces.split(",") if s.strip()]
        if not spaces:
            raise UsageError("--spaces must name at least one color space")
        results = {}
        blocks = []
        for space in spaces:
            try:
                res = extract_palette(args.image, space, cfg)
            except ValueError as exc:
                raise UsageError(str(exc)) from exc
            results[space] = res
            blocks.append(format_report(res, seed=args.seed))
        render_swatch_sheet(results, args.sheet)
        print("\n\n".join(blocks))
        print(f"sheet written to {args.sheet}", file=sys.stderr)
    else:
        try:
            res = extract_palette(args.image, args.space, cfg)
        except ValueError as exc:
            raise UsageError(str(exc)) from exc
        print(format_report(res, seed=args.seed))
    return 0


def cmd_eval(args) -> int:
    import json

    from . import evaluation as ev

    metric_ids = [m.strip() for m in args.metrics.split(",") if m.strip()]
    if not metric_ids:
        raise UsageError("--metrics must name at least one metric")

    if args.precomputed:
        table, human = ev.load_reference_table(args.dataset)
        unknown = [m for m in metric_ids if m not in table.columns]
        if set(metric_ids) != set(table.metric_ids):
            if unknown:
                raise UsageError(f"metrics {unknown} not in precomputed table "
                                 f"(has: {table.metric_ids})")
            table = ev.DistanceTable(
                table.pair_ids, {m: table.columns[m] for m in metric_ids}
            )
        report = ev.build_report(human, table, source=args.dataset)
    else:
        for mid in metric_ids:
            try:
                metrics_mod.registry_lookup(mid)
            except KeyError as exc:
                raise UsageError(exc.args[0]) from exc
        ds = ev.load_dataset(args.dataset)
        if args.judgments:
            records = []
            with open(args.judgments, encoding="utf-8") as fh:
                for line in fh:
                    if line.strip():
                        records.append(json.loads(line))
            modes = ev.aggregate_judgments(records, ds)
            scores = modes.get("rating") or modes.get("2afc")
            scored_ids = [pid for pid in ds.pair_ids if pid in scores]
            if len(scored_ids) < len(ds.pair_ids):
                print(f"note: {len(ds.pair_ids) - len(scored_ids)} pairs have no "
                      "judgments and are excluded", file=sys.stderr)
            ds = ev.ColorPairDataset(
                [p for p in ds.pairs if p.id in scores],
                {pid: scores[pid] for pid in scored_ids},
                source=ds.source,
            )
        elif ds.human is None:
            raise UsageError(
                f"dataset {args.dataset} has no human scores; "
                "provide them in the file or via --judgments"
            )
        table = ev.compute_distance_table(ds, metric_ids)
        report = ev.build_report(ds, table)

    for rank, s in enumerate(report.ranking(), 1):
        if s.error is None:
            print(f"{rank} {s.metric} r={_fmt(s.pearson_r)} mae={_fmt(s.mae)}")
        else:
            print(f"{rank} {s.metric} unavailable ({s.error})")
    if args.out:
        ev.write_report_csv(report, args.out)
        print(f"report written to {args.out}", file=sys.stderr)
    if args.heatmap:
        ev.render_heatmap(report, args.heatmap)
        print(f"heatmap written to {args.heatmap}", file=sys.stderr)
    return 0


def _parse_addr(addr: str) -> tuple[str, int]:
    host, sep, port = addr.rpartition(":")
    if not sep or not host:
        raise UsageError(f"bad address {addr!r}: expected host:port")
    try:
        port_num = int(port)
    except ValueError:
        raise UsageError(f"bad port in address {addr!r}") from None
    if not 0 < port_num < 65536:
        raise UsageError(f"port out of range in address {addr!r}")
    return host, port_num


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    host, port = _parse_addr(args.addr)
    dataset_dir = Path(args.datasets) if args.datasets else bundled_dataset_dir()
    if not dataset_dir.is_dir():
        raise UsageError(f"dataset directory not found: {dataset_dir}")
    data_path = Path(args.data_dir)
    try:
        data_path.mkdir(parents=True, exist_ok=True)
        probe = data_path / ".write-probe"
        probe.touch()
        probe.unlink()
    except OSError as exc:
        raise UsageError(f"data directory not writable: {data_path}: {exc}") from exc

    app = create_app(data_path, dataset_dir, afc_cap=args.afc_cap, ui_dir=args.ui_dir)
    config = uvicorn.Config(app, host=host, port=port, log_level="warning")
    server = uvicorn.Server(config)
    server.run()
    return 0


def cmd_simulate(args) -> int:
    import httpx

    from .simulate import run_simulation

    try:
        metrics_mod.registry_lookup(args.oracle_metric)
    except KeyError as exc:
        raise UsageError(exc.args[0]) from exc
    if args.respondents < 1:
        raise UsageError("--respondents must be >= 1")
    if args.noise < 0:
        raise UsageError("--noise must be non-negative")
    try:
        result = run_simulation(
            args.url, args.dataset, args.respondents, args.noise,
            args.seed, args.oracle_metric,
        )
    except httpx.TransportError as exc:
        raise RuntimeError(f"survey service unreachable at {args.url}: {exc}") from exc
    print(
        f"submitted {result.judgments} judgments from {result.respondents} respondents "
        f"(dataset={result.dataset} oracle={result.oracle_metric} "
        f"noise={args.noise:g} seed={args.seed})"
    )
    return 0


_HANDLERS = {
    "convert": cmd_convert,
    "dist": cmd_dist,
    "palette": cmd_palette,
    "eval": cmd_eval,
    "serve": cmd_serve,
    "simulate": cmd_simulate,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return _HANDLERS[args.command](args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except KeyboardInterrupt:
        return 130
    except Exception as exc:  # runtime failures: I/O, network, image decode
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
