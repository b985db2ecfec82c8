"""Query orchestration: embed the free-text query, score each record per
modality, combine, rank, and attach reliability metrics.

The two modality similarities are combined as a weighted mean rather than a
raw sum: for fixed weights the ranking is identical, but the mean keeps the
combined score inside [-1, 1] so the relevance-band cutoffs stay
meaningful. Records missing a modality are excluded and reported by
default; a ``zero`` policy (missing modality scores 0) is selectable.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path

from .corpus import CorpusCatalog, FrameRef, RecordId
from .errors import EmptyCorpus, FingerprintMismatch, NotFound
from .ingest import sample_frames
from .metrics import (
    BandThresholds,
    MetricsReport,
    RelevanceBand,
    VerdictConfig,
    band,
    compute_metrics,
    export_plot_data,
    make_series,
)
from .similarity import EmbeddingProvider, VectorIndex, embed

MISSING_MODALITY_POLICIES = ("exclude", "zero")


@dataclass
class Weights:
    video: float = 1.0
    signal: float = 1.0

    def __post_init__(self):
        if self.video < 0 or self.signal < 0:
            raise ValueError("weights must be >= 0")
        if self.video == 0 and self.signal == 0:
            raise ValueError("weights must not both be zero")


@dataclass
class Query:
    text: str
    top_n: int = 10
    weights: Weights = field(default_factory=Weights)
    prompt_id: int | None = None

    def __post_init__(self):
        if self.top_n < 1:
            raise ValueError(f"top_n must be >= 1, got {self.top_n}")


@dataclass
class RankedResult:
    record: RecordId
    s_video: float
    s_signal: float
    combined: float
    distance: float
    band: RelevanceBand
    frames: list[FrameRef] = field(default_factory=list)

    def as_dict(self) -> dict:
        return {
            "record_id": self.record,
            "s_video": self.s_video,
            "s_signal": self.s_signal,
            "combined": self.combined,
            "distance": self.distance,
            "band": self.band.value,
            "frames": [
                {"index": fr.index, "timestamp": fr.timestamp, "uri": fr.uri}
                for fr in self.frames
            ],
        }


@dataclass
class QueryResponse:
    results: list[RankedResult]
    metrics: MetricsReport
    curve: list[float]
    excluded: list[tuple[RecordId, str]]
    query_hash: str = ""

    def as_dict(self) -> dict:
        return {
            "results": [r.as_dict() for r in self.results],
            "metrics": self.metrics.as_dict(),
            "curve": self.curve,
            "excluded": [
                {"record_id": rid, "reason": reason} for rid, reason in self.excluded
            ],
            "query_hash": self.query_hash,
        }


def query_hash(text: str) -> str:
    """Stable lookup key for a query's plot document."""
    return hashlib.sha256(text.encode("utf-8")).hexdigest()[:16]


def run_query(q: Query, video_index: VectorIndex, signal_index: VectorIndex,
              provider: EmbeddingProvider,
              thresholds: BandThresholds = BandThresholds(),
              verdict_cfg: VerdictConfig = VerdictConfig(),
              catalog: CorpusCatalog | None = None,
              missing_modality: str = "exclude",
              display_frames: int = 4) -> QueryResponse:
    """Score every record against the query and rank.

    Records present in both indexes get a cosine similarity per modality;
    the combined score is the weighted mean. Results are sorted by combined
    score descending (ties by ascending record id) and truncated to
    ``top_n``; metrics and the curve cover all included records, not just
    the returned page. Read-only throughout.
    """
    if missing_modality not in MISSING_MODALITY_POLICIES:
        raise ValueError(f"unknown missing-modality policy {missing_modality!r}")
    for index, label in ((video_index, "video"), (signal_index, "signal")):
        if index.provider_fingerprint != provider.fingerprint:
            raise FingerprintMismatch(
                f"{label} index fingerprint {index.provider_fingerprint!r} does not "
                f"match active provider {provider.fingerprint!r}"
            )
    all_records = set(video_index.record_ids()) | set(signal_index.record_ids())
    if catalog is not None:
        all_records |= set(catalog)
    if not all_records:
        raise EmptyCorpus("no records in either index")

    query_vector = embed(q.text, provider)
    s_video = video_index.similarities(query_vector)
    s_signal = signal_index.similarities(query_vector)

    w = q.weights
    scored: list[RankedResult] = []
    excluded: list[tuple[RecordId, str]] = []
    for rid in sorted(all_records):
        has_v, has_s = rid in s_video, rid in s_signal
        if not has_v and not has_s:
            excluded.append((rid, "missing_video_and_signal"))
            continue
        if not (has_v and has_s) and missing_modality == "exclude":
            excluded.append((rid, "missing_video" if not has_v else "missing_signal"))
            continue
        sv = s_video.get(rid, 0.0)
        ss = s_signal.get(rid, 0.0)
        combined = (w.video * sv + w.signal * ss) / (w.video + w.signal)
        dist = 1.0 - combined
        frames: list[FrameRef] = []
        if catalog is not None and rid in catalog:
            entry = catalog.lookup(rid)
            if entry.frames and display_frames > 0:
                frames = sample_frames(entry.frames, display_frames)
        scored.append(RankedResult(
            record=rid, s_video=sv, s_signal=ss, combined=combined,
            distance=dist, band=band(combined, thresholds), frames=frames,
        ))

    if not scored:
        raise EmptyCorpus("every record was excluded by the missing-modality policy")

    scored.sort(key=lambda r: (-r.combined, r.record))
    series = make_series([r.distance for r in scored], query=q.text)
    report = compute_metrics(series, thresholds, verdict_cfg)
    return QueryResponse(
        results=scored[: q.top_n],
        metrics=report,
        curve=series.values,
        excluded=excluded,
        query_hash=query_hash(q.text),
    )


@dataclass
class EngineConfig:
    """Runtime configuration, loadable from a JSON file."""

    provider_kind: str = "builtin"
    provider_url: str | None = None
    dim: int = 384
    thresholds: BandThresholds = field(default_factory=BandThresholds)
    verdict_cfg: VerdictConfig = field(default_factory=VerdictConfig)
    missing_modality: str = "exclude"
    display_frames: int = 4
    catalog_path: str | None = None
    index_dir: str | None = None

    @classmethod
    def from_file(cls, path: str | Path) -> "EngineConfig":
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
        provider = raw.get("provider", {})
        thresholds = raw.get("thresholds", {})
        verdict = raw.get("verdict", {})
        paths = raw.get("paths", {})
        return cls(
            provider_kind=provider.get("kind", "builtin"),
            provider_url=provider.get("url"),
            dim=int(provider.get("dim", 384)),
            thresholds=BandThresholds(
                high=float(thresholds.get("high", 0.9)),
                low=float(thresholds.get("low", 0.4)),
            ),
            verdict_cfg=VerdictConfig(
                min_high=int(verdict.get("min_high", 1)),
                min_low=int(verdict.get("min_low", 1)),
                min_records=int(verdict.get("min_records", 5)),
                variance_floor=float(verdict.get("variance_floor", 0.01)),
                cluster_gap_fraction=float(verdict.get("cluster_gap_fraction", 0.15)),
            ),
            missing_modality=raw.get("missing_modality", "exclude"),
            display_frames=int(raw.get("display_frames", 4)),
            catalog_path=paths.get("catalog"),
            index_dir=paths.get("index_dir"),
        )

    def make_provider(self) -> EmbeddingProvider:
        if self.provider_kind == "builtin":
            from .similarity import HashedBagProvider

            return HashedBagProvider(dim=self.dim)
        if self.provider_kind == "remote":
            from .similarity import RemoteProvider

            if not self.provider_url:
                raise ValueError("remote provider requires a url")
            return RemoteProvider(self.provider_url, dim=self.dim)
        raise ValueError(f"unknown provider kind {self.provider_kind!r}")


class Engine:
    """An immutable snapshot of catalog + indexes + provider.

    The service swaps whole Engine instances atomically on reload, so
    in-flight queries finish on the snapshot they started with.
    """

    def __init__(self, catalog: CorpusCatalog, video_indexes: dict[int | None, VectorIndex],
                 signal_index: VectorIndex, provider: EmbeddingProvider,
                 config: EngineConfig):
        self.catalog = catalog
        self.video_indexes = video_indexes
        self.signal_index = signal_index
        self.provider = provider
        self.config = config
        self._plots: dict[str, dict] = {}

    @property
    def record_count(self) -> int:
        return len(self.catalog)

    def default_video_index(self) -> VectorIndex:
        if None in self.video_indexes:
            return self.video_indexes[None]
        # lone prompt-specific index doubles as the default
        if len(self.video_indexes) == 1:
            return next(iter(self.video_indexes.values()))
        raise NotFound("no default video index loaded")

    def video_index_for(self, prompt_id: int | None) -> VectorIndex:
        if prompt_id is None:
            return self.default_video_index()
        try:
            return self.video_indexes[prompt_id]
        except KeyError:
            raise NotFound(f"no video index for prompt {prompt_id}") from None

    def query(self, q: Query) -> QueryResponse:
        response = run_query(
            q,
            video_index=self.video_index_for(q.prompt_id),
            signal_index=self.signal_index,
            provider=self.provider,
            thresholds=self.config.thresholds,
            verdict_cfg=self.config.verdict_cfg,
            catalog=self.catalog,
            missing_modality=self.config.missing_modality,
            display_frames=self.config.display_frames,
        )
        series = make_series(response.curve, query=q.text)
        self._plots[response.query_hash] = export_plot_data(
            series, response.metrics, self.config.thresholds
        )
        while len(self._plots) > 128:  # bound the per-snapshot plot cache
            self._plots.pop(next(iter(self._plots)))
        return response

    def plot_document(self, key: str) -> dict:
        try:
            return self._plots[key]
        except KeyError:
            raise NotFound(f"no plot document for query hash {key!r}") from None

    def get_record(self, record: RecordId) -> dict:
        """All stored descriptions plus span and frame references for one
        record."""
        entry = self.catalog.lookup(record)
        descriptions = []
        for index in self.video_indexes.values():
            e = index.entries.get(record)
            if e is not None:
                descriptions.append({
                    "source": "video", "prompt_id": e.prompt_id, "text": e.text,
                })
        e = self.signal_index.entries.get(record)
        if e is not None:
            descriptions.append({"source": "signal", "prompt_id": None, "text": e.text})
        return {
            "record_id": record,
            "span": {"start": entry.span.start, "end": entry.span.end},
            "descriptions": descriptions,
            "frames": [
                {"index": fr.index, "timestamp": fr.timestamp, "uri": fr.uri}
                for fr in entry.frames
            ],
        }

    def frame(self, record: RecordId, index: int) -> FrameRef:
        entry = self.catalog.lookup(record)
        for fr in entry.frames:
            if fr.index == index:
                return fr
        raise NotFound(f"record {record!r} has no frame {index}")


def load_engine(config: EngineConfig) -> Engine:
    """Build an Engine snapshot from the paths in ``config``.

    The index directory holds ``signal.jsonl`` plus one or more video
    indexes (``video.jsonl`` or ``video_p<N>.jsonl``); each video index is
    keyed by the uniform prompt id of its entries.
    """
    from .corpus import load_manifest
    from .similarity import load_index

    if not config.catalog_path or not config.index_dir:
        raise ValueError("engine config needs catalog and index_dir paths")
    provider = config.make_provider()
    catalog = load_manifest(config.catalog_path)
    index_dir = Path(config.index_dir)

    signal_index = load_index(index_dir / "signal.jsonl", provider=provider)
    video_indexes: dict[int | None, VectorIndex] = {}
    video_paths = sorted(index_dir.glob("video*.jsonl"))
    if not video_paths:
        raise FileNotFoundError(f"no video index files in {index_dir}")
    for path in video_paths:
        index = load_index(path, provider=provider)
        video_indexes[index.prompt_id] = index
        if path.name == "video.jsonl":
            video_indexes[None] = index
    if None not in video_indexes and len(video_indexes) == 1:
        video_indexes[None] = next(iter(video_indexes.values()))
    return Engine(catalog, video_indexes, signal_index, provider, config)
