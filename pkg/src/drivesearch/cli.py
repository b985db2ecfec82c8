"""Command-line interface.

Subcommands mirror the pipeline: ``ingest`` builds the catalog and unified
signal tables, ``describe`` generates descriptions, ``index`` embeds them,
``query`` searches, ``metrics`` evaluates distance series, ``report``
renders figures and delimited output, ``serve`` runs the HTTP API.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .corpus import (
    CorpusCatalog,
    FrameRef,
    Modality,
    SignalKind,
    TimeSpan,
    load_descriptions,
    load_manifest,
    save_descriptions,
    save_manifest,
)
from .describer import (
    FixtureBackend,
    RemoteBackend,
    describe_video,
    get_prompt,
    interpret_signals,
    load_regions,
    load_rules,
)
from .engine import EngineConfig, Query, Weights, load_engine
from .errors import DriveSearchError, EmptySpan, EmptyTable, MissingFixture, NoRulesApplied
from .ingest import (
    ChannelFilter,
    align_and_concat,
    load_signal_table,
    prune_channels,
    read_unified_csv,
    sample_frames,
    write_signal_csv,
)
from .metrics import compute_metrics, export_plot_data, make_series
from .similarity import HashedBagProvider, build_index, save_index

logger = logging.getLogger("drivesearch")

_TABLE_FILES = {
    SignalKind.VEHICLE_DATA: "vehicle_data",
    SignalKind.VEHICLE_CONTROL_DATA: "vehicle_control_data",
    SignalKind.SATELLITE_DATA: "satellite_data",
}

_IMAGE_SUFFIXES = (".jpg", ".jpeg", ".png", ".bmp")


def _read_allowlist(path: str | None) -> set[str] | None:
    if path is None:
        return None
    text = Path(path).read_text(encoding="utf-8").strip()
    if text.startswith("["):
        return set(json.loads(text))
    return {line.strip() for line in text.splitlines() if line.strip()}


def _find_table(record_dir: Path, stem: str):
    for suffix in (".csv", ".parquet"):
        p = record_dir / f"{stem}{suffix}"
        if p.is_file():
            return p
    return None


def _frame_refs(record: str, frame_dir: Path, fps: float) -> list[FrameRef]:
    files = sorted(p for p in frame_dir.iterdir()
                   if p.suffix.lower() in _IMAGE_SUFFIXES)
    return [
        FrameRef(record=record, index=i, timestamp=i / fps, uri=str(p))
        for i, p in enumerate(files)
    ]


def cmd_ingest(args) -> int:
    signals_root = Path(args.signals)
    frames_root = Path(args.frames) if args.frames else None
    allowlist = _read_allowlist(args.allowlist)
    filt = ChannelFilter(allowlist=allowlist, drop_constant=not args.keep_constant)
    unified_dir = Path(args.unified_dir) if args.unified_dir else Path(args.out).parent / "unified"
    unified_dir.mkdir(parents=True, exist_ok=True)

    record_ids = {p.name for p in signals_root.iterdir() if p.is_dir()}
    if frames_root and frames_root.is_dir():
        record_ids |= {p.name for p in frames_root.iterdir() if p.is_dir()}

    catalog = CorpusCatalog()
    for record in sorted(record_ids):
        frames: list[FrameRef] = []
        if frames_root:
            frame_dir = frames_root / record
            if frame_dir.is_dir():
                frames = _frame_refs(record, frame_dir, args.fps)

        tables = {}
        record_dir = signals_root / record
        if record_dir.is_dir():
            for kind, stem in _TABLE_FILES.items():
                path = _find_table(record_dir, stem)
                if path is not None:
                    tables[kind] = load_signal_table(path, kind)

        if frames:
            span = TimeSpan(frames[0].timestamp, frames[-1].timestamp + 1.0 / args.fps)
        elif tables:
            lo = min(t.timestamps[0] for t in tables.values())
            hi = max(t.timestamps[-1] for t in tables.values())
            span = TimeSpan(lo, hi if hi > lo else lo + 1.0)
        else:
            logger.warning("record %s has neither signals nor frames; skipped", record)
            continue

        unified_rows = 0
        if len(tables) == len(_TABLE_FILES):
            try:
                pruned = {k: prune_channels(t, filt) for k, t in tables.items()}
                unified = align_and_concat(
                    pruned[SignalKind.VEHICLE_DATA],
                    pruned[SignalKind.VEHICLE_CONTROL_DATA],
                    pruned[SignalKind.SATELLITE_DATA],
                    span, record=record,
                )
                write_signal_csv(unified, unified_dir / f"{record}.csv")
                unified_rows = len(unified)
            except (EmptyTable, EmptySpan) as exc:
                logger.warning("record %s: %s; flagged signal-less", record, exc)
        elif tables:
            logger.warning("record %s is missing %d signal table(s); flagged signal-less",
                           record, len(_TABLE_FILES) - len(tables))

        catalog.add(record, span, frames, unified_signal_rows=unified_rows)
        if not frames:
            logger.warning("record %s has no video frames; flagged video-less", record)

    save_manifest(catalog, args.out)
    print(f"ingested {len(catalog)} records -> {args.out} (unified tables in {unified_dir})")
    return 0


def cmd_describe(args) -> int:
    catalog = load_manifest(args.catalog)
    descriptions = []
    skipped = 0

    if args.source == "video":
        prompt = get_prompt(args.prompt)
        if args.backend == "fixture":
            if not args.fixtures:
                print("error: --backend fixture requires --fixtures", file=sys.stderr)
                return 2
            backend = FixtureBackend.from_jsonl(args.fixtures)
        else:
            if not args.url:
                print("error: --backend remote requires --url", file=sys.stderr)
                return 2
            backend = RemoteBackend(args.url, send_base64=args.base64)
        for record, entry in catalog.items():
            if not entry.frames:
                continue
            frames = sample_frames(entry.frames, args.max_frames)
            try:
                descriptions.append(describe_video(frames, prompt, backend))
            except MissingFixture:
                skipped += 1
    else:
        rules = load_rules(args.rules)
        regions = load_regions(args.regions)
        unified_dir = Path(args.unified_dir)
        for record, entry in catalog.items():
            path = unified_dir / f"{record}.csv"
            if not path.is_file():
                continue
            unified = read_unified_csv(path, record)
            try:
                descriptions.append(interpret_signals(unified, rules, regions))
            except NoRulesApplied:
                skipped += 1

    save_descriptions(descriptions, args.out)
    note = f" ({skipped} skipped)" if skipped else ""
    print(f"wrote {len(descriptions)} {args.source} descriptions -> {args.out}{note}")
    return 0


def cmd_index(args) -> int:
    descriptions = load_descriptions(args.descriptions)
    source = Modality(args.source)
    selected = [d for d in descriptions if d.source is source]
    if source is Modality.VIDEO and args.prompt_id is not None:
        selected = [d for d in selected if d.prompt_id == args.prompt_id]
    provider = HashedBagProvider(dim=args.dim)
    index = build_index(selected, source, provider)
    save_index(index, args.out)
    print(f"indexed {len(index)} {source.value} descriptions -> {args.out}")
    return 0


def _parse_weights(raw: str | None) -> Weights:
    if not raw:
        return Weights()
    parts = raw.split(",")
    if len(parts) != 2:
        raise ValueError(f"--weights wants 'video,signal', got {raw!r}")
    return Weights(video=float(parts[0]), signal=float(parts[1]))


def cmd_query(args) -> int:
    config = EngineConfig(dim=args.dim, catalog_path=args.catalog, index_dir=args.index_dir)
    engine = load_engine(config)
    q = Query(text=args.text, top_n=args.top_n,
              weights=_parse_weights(args.weights), prompt_id=args.prompt_id)
    response = engine.query(q)

    if args.json:
        print(json.dumps(response.as_dict(), indent=2))
        return 0

    print(f"query: {args.text!r}  ({len(response.curve)} records scored, "
          f"{len(response.excluded)} excluded)")
    print(f"{'rank':>4}  {'record':<10} {'combined':>9} {'video':>8} {'signal':>8}  band")
    for rank, r in enumerate(response.results, start=1):
        print(f"{rank:>4}  {r.record:<10} {r.combined:>9.4f} {r.s_video:>8.4f} "
              f"{r.s_signal:>8.4f}  {r.band.value}")
    m = response.metrics
    print(f"metrics: largest_gap={m.largest_gap:.4f} min={m.min_distance:.4f} "
          f"max={m.max_distance:.4f} range={m.distance_range:.4f} "
          f"std_dev={m.std_dev:.4f} relative_gap={m.relative_gap_pct:.2f}%")
    print(f"verdict: {m.verdict.value}")
    return 0


def _load_series_file(path: str) -> list[float]:
    raw = json.loads(Path(path).read_text(encoding="utf-8"))
    if isinstance(raw, dict):
        raw = raw.get("distances", raw.get("curve"))
    if not isinstance(raw, list):
        raise ValueError(f"{path}: expected a JSON array of distances")
    return [float(v) for v in raw]


def cmd_metrics(args) -> int:
    if args.table3 is not None:
        return _run_published_suite(args.table3)
    if not args.series:
        print("error: need --series <file> or --table3 [csv]", file=sys.stderr)
        return 2
    series = make_series(_load_series_file(args.series))
    report = compute_metrics(series)
    for name, value in report.as_dict().items():
        print(f"{name}: {value}")
    return 0


def _run_published_suite(csv_path: str) -> int:
    """Identity checks over the vendored published-metrics table:
    range == max - min (5e-4) and relative gap == 100*lgap/range (0.05 pp)."""
    import csv as csv_mod

    failures = 0
    rows = 0
    with Path(csv_path).open("r", encoding="utf-8") as f:
        for row in csv_mod.DictReader(f):
            rows += 1
            rid = f"{row['scenario']}-{row['prompt']}"
            lgap, mn, mx = (float(row[k]) for k in ("lgap", "min_d", "max_d"))
            rng, rlgap = float(row["range"]), float(row["rlgap_pct"])
            range_ok = abs(rng - (mx - mn)) <= 5e-4
            rlgap_ok = abs(rlgap - 100.0 * lgap / (mx - mn)) <= 0.05
            status = "PASS" if (range_ok and rlgap_ok) else "FAIL"
            if status == "FAIL":
                failures += 1
            print(f"{status} {rid}: range {rng} vs {mx - mn:.4f}, "
                  f"relative gap {rlgap} vs {100.0 * lgap / (mx - mn):.2f}")
    print(f"{rows - failures}/{rows} rows satisfy the metric identities")
    return 1 if failures else 0


def cmd_report(args) -> int:
    from .report import write_report

    if args.response:
        payload = json.loads(Path(args.response).read_text(encoding="utf-8"))
        distances = [float(v) for v in payload["curve"]]
    else:
        distances = _load_series_file(args.series)
    series = make_series(distances)
    report = compute_metrics(series)
    doc = export_plot_data(series, report)
    paths = write_report(doc, args.out_dir, stem=args.stem, title=args.title or "")
    for name, path in paths.items():
        print(f"{name}: {path}")
    return 0


def cmd_serve(args) -> int:
    from .service import serve

    if args.config:
        config = EngineConfig.from_file(args.config)
    else:
        config = EngineConfig()
    if args.catalog:
        config.catalog_path = args.catalog
    if args.index_dir:
        config.index_dir = args.index_dir
    serve(config, host=args.host, port=args.port)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="drivesearch",
                                     description="scenario retrieval over test-drive logs")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="build the catalog and unified signal tables")
    p.add_argument("--signals", required=True, help="directory of per-record signal tables")
    p.add_argument("--frames", help="directory of per-record frame images")
    p.add_argument("--allowlist", help="channel allowlist file (JSON array or one name per line)")
    p.add_argument("--out", required=True, help="catalog manifest to write (JSONL)")
    p.add_argument("--unified-dir", help="where to write unified tables (default: <out dir>/unified)")
    p.add_argument("--fps", type=float, default=10.0, help="frame rate for frame timestamps")
    p.add_argument("--keep-constant", action="store_true",
                   help="keep constant channels instead of dropping them as noise")
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("describe", help="generate descriptions for catalog records")
    p.add_argument("--source", choices=["video", "signal"], default="video")
    p.add_argument("--catalog", required=True)
    p.add_argument("--out", required=True, help="descriptions JSONL to write")
    p.add_argument("--prompt", type=int, default=4, help="prompt catalog id (video)")
    p.add_argument("--backend", choices=["fixture", "remote"], default="fixture")
    p.add_argument("--fixtures", help="description fixture JSONL (fixture backend)")
    p.add_argument("--url", help="describer service base URL (remote backend)")
    p.add_argument("--base64", action="store_true", help="send frame bytes instead of URIs")
    p.add_argument("--max-frames", type=int, default=32, help="frames sampled per record")
    p.add_argument("--unified-dir", help="unified signal tables directory (signal source)")
    p.add_argument("--rules", help="interpreter rules JSON (default: bundled)")
    p.add_argument("--regions", help="geo regions JSON (default: bundled)")
    p.set_defaults(func=cmd_describe)

    p = sub.add_parser("index", help="embed descriptions into a vector index")
    p.add_argument("--source", choices=["video", "signal"], required=True)
    p.add_argument("--descriptions", required=True, help="descriptions JSONL")
    p.add_argument("--out", required=True, help="index file to write")
    p.add_argument("--prompt-id", type=int, help="video descriptions to index (by prompt)")
    p.add_argument("--dim", type=int, default=384)
    p.set_defaults(func=cmd_index)

    p = sub.add_parser("query", help="run a scenario query")
    p.add_argument("--text", required=True)
    p.add_argument("--top-n", type=int, default=10)
    p.add_argument("--weights", help="video,signal weights (default 1,1)")
    p.add_argument("--prompt-id", type=int, help="which video index to query")
    p.add_argument("--catalog", required=True)
    p.add_argument("--index-dir", required=True)
    p.add_argument("--dim", type=int, default=384)
    p.add_argument("--json", action="store_true", help="print the full response as JSON")
    p.set_defaults(func=cmd_query)

    p = sub.add_parser("metrics", help="evaluate a distance series or the published rows")
    p.add_argument("--series", help="JSON file with a distance array")
    p.add_argument("--table3", nargs="?",
                   const=str(Path(__file__).parent / "data" / "published_metrics.csv"),
                   help="run the published-row identity suite (default: vendored CSV)")
    p.set_defaults(func=cmd_metrics)

    p = sub.add_parser("report", help="write figures and delimited output for a series")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--series", help="JSON file with a distance array")
    group.add_argument("--response", help="query response JSON (uses its curve)")
    p.add_argument("--out-dir", required=True)
    p.add_argument("--stem", default="query")
    p.add_argument("--title", help="figure title")
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--catalog")
    p.add_argument("--index-dir")
    p.add_argument("--config", help="engine config JSON")
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s")
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except DriveSearchError as exc:
        print(f"error [{exc.code}]: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
