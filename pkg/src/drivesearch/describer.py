"""Description generation for both modalities.

Signal tables are interpreted by deterministic template rules: most signal
properties have fixed meanings, so a rule interpreter is faster and more
accurate than model-based generation. Video descriptions come from an
external vision-language service behind a small HTTP adapter, with an
offline fixture backend that replays stored texts so the whole pipeline is
testable without model inference.
"""

from __future__ import annotations

import base64
import json
from collections import Counter
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np

from .corpus import Description, FrameRef, Modality, RecordId
from .errors import (
    BackendUnavailable,
    EmptyDescription,
    EmptyVideo,
    MissingFixture,
    NoRulesApplied,
    UnknownPrompt,
)
from .ingest import UnifiedSignalTable

# --- prompt catalog ----------------------------------------------------------

@dataclass(frozen=True)
class PromptSpec:
    """One catalog prompt: ordered conversation turns for the video
    describer. Single-turn prompts have one turn; multi-run prompts are
    delivered as several turns in order."""

    id: int
    turns: tuple[str, ...]
    multi_run: bool

    @property
    def full_text(self) -> str:
        return " ".join(self.turns)


def _parse_catalog(payload: dict) -> dict[int, PromptSpec]:
    catalog: dict[int, PromptSpec] = {}
    for entry in payload["prompts"]:
        spec = PromptSpec(id=int(entry["id"]), turns=tuple(entry["turns"]),
                          multi_run=bool(entry["multi_run"]))
        if not spec.turns or any(not t for t in spec.turns):
            raise ValueError(f"prompt {spec.id} has empty turns")
        catalog[spec.id] = spec
    return catalog


def load_prompt_catalog(path: str | Path | None = None) -> dict[int, PromptSpec]:
    """Load a prompt catalog file; defaults to the vendored catalog."""
    if path is None:
        text = resources.files("drivesearch.data").joinpath("prompt_catalog.json").read_text("utf-8")
    else:
        text = Path(path).read_text(encoding="utf-8")
    return _parse_catalog(json.loads(text))


_DEFAULT_CATALOG: dict[int, PromptSpec] | None = None


def get_prompt(prompt_id: int) -> PromptSpec:
    """Return the catalog entry for ``prompt_id`` (1-6)."""
    global _DEFAULT_CATALOG
    if _DEFAULT_CATALOG is None:
        _DEFAULT_CATALOG = load_prompt_catalog()
    try:
        return _DEFAULT_CATALOG[prompt_id]
    except KeyError:
        raise UnknownPrompt(f"no prompt with id {prompt_id}") from None


# --- signal interpreter ------------------------------------------------------

@dataclass(frozen=True)
class GeoRegion:
    """Named geographic bounding box in degrees."""

    name: str
    min_lat: float
    max_lat: float
    min_lon: float
    max_lon: float

    def __post_init__(self):
        if not (self.min_lat < self.max_lat and self.min_lon < self.max_lon):
            raise ValueError(f"degenerate bbox for region {self.name!r}")

    def contains(self, lat: float, lon: float) -> bool:
        return (self.min_lat <= lat <= self.max_lat
                and self.min_lon <= lon <= self.max_lon)


@dataclass(frozen=True)
class InterpreterRule:
    """One template rule over a unified-table channel.

    kind 'threshold': fires when any row satisfies ``op value``; the
        template receives the most extreme matching value.
    kind 'range': fires when the per-record mean lies in [min, max); the
        template receives the mean.
    kind 'categorical': fires when the most frequent value has a label in
        the mapping; the template receives the label.
    kind 'geo': fires when some region's bbox contains the per-record mean
        (lat, lon); the template receives the first such region's name.
    """

    channel: str
    kind: str
    parameters: dict
    template: str

    def __post_init__(self):
        if self.kind not in ("threshold", "range", "categorical", "geo"):
            raise ValueError(f"unknown rule kind {self.kind!r}")


_THRESHOLD_OPS = {
    ">": lambda v, t: v > t,
    ">=": lambda v, t: v >= t,
    "<": lambda v, t: v < t,
    "<=": lambda v, t: v <= t,
}


def _apply_rule(rule: InterpreterRule, table: UnifiedSignalTable,
                regions: list[GeoRegion]) -> str | None:
    values = table.channels.get(rule.channel)
    if values is None or not values:
        return None

    if rule.kind == "threshold":
        op = rule.parameters["op"]
        bound = float(rule.parameters["value"])
        matched = [v for v in values if _THRESHOLD_OPS[op](v, bound)]
        if not matched:
            return None
        extreme = max(matched) if op in (">", ">=") else min(matched)
        return rule.template.format(value=extreme)

    if rule.kind == "range":
        mean = float(np.mean(values))
        lo = float(rule.parameters["min"])
        hi = float(rule.parameters["max"])
        if not (lo <= mean < hi):
            return None
        return rule.template.format(value=mean)

    if rule.kind == "categorical":
        mapping = rule.parameters["mapping"]
        counts = Counter(values)
        # ties break toward the smaller value for determinism
        top = max(counts.values())
        mode = min(v for v, c in counts.items() if c == top)
        keys = [str(mode)]
        if isinstance(mode, float) and mode.is_integer():
            keys.append(str(int(mode)))
        label = next((mapping[k] for k in keys if k in mapping), None)
        if label is None:
            return None
        return rule.template.format(value=label)

    # geo: per-record mean position against the region list, first match wins
    lon_channel = rule.parameters.get("lon_channel", "longitude")
    lons = table.channels.get(lon_channel)
    if lons is None or not lons:
        return None
    lat = float(np.mean(values))
    lon = float(np.mean(lons))
    for region in regions:
        if region.contains(lat, lon):
            return rule.template.format(value=region.name)
    return None


def interpret_signals(table: UnifiedSignalTable, rules: list[InterpreterRule],
                      regions: list[GeoRegion] | None = None) -> Description:
    """Render one signal description: one sentence per matched rule, joined
    in rule order. Pure: identical inputs always yield identical text."""
    if not len(table):
        raise ValueError("cannot interpret an empty table")
    if not rules:
        raise ValueError("rule list must be non-empty")
    regions = regions or []
    sentences = []
    for rule in rules:
        rendered = _apply_rule(rule, table, regions)
        if rendered:
            sentences.append(rendered)
    if not sentences:
        raise NoRulesApplied(
            f"no rule matched any channel of record {table.record!r}"
        )
    return Description(record=table.record, source=Modality.SIGNAL,
                       text=" ".join(sentences), generator="signal-interpreter-v1")


def load_rules(path: str | Path | None = None) -> list[InterpreterRule]:
    """Load interpreter rules from a JSON list; defaults to the bundled set
    covering velocity, acceleration, pedals, and geolocation."""
    if path is None:
        text = resources.files("drivesearch.data").joinpath("signal_rules.json").read_text("utf-8")
    else:
        text = Path(path).read_text(encoding="utf-8")
    return [
        InterpreterRule(channel=o["channel"], kind=o["kind"],
                        parameters=o["parameters"], template=o["template"])
        for o in json.loads(text)
    ]


def load_regions(path: str | Path | None = None) -> list[GeoRegion]:
    """Load geo regions from a JSON list; defaults to bundled coarse
    bounding boxes for European countries (the corpus is European).
    Pluggable: swap the file for a real reverse-geocoder export."""
    if path is None:
        text = resources.files("drivesearch.data").joinpath("geo_regions.json").read_text("utf-8")
    else:
        text = Path(path).read_text(encoding="utf-8")
    return [
        GeoRegion(name=o["name"], min_lat=o["min_lat"], max_lat=o["max_lat"],
                  min_lon=o["min_lon"], max_lon=o["max_lon"])
        for o in json.loads(text)
    ]


# --- video describer backends ------------------------------------------------

class FixtureBackend:
    """Offline describer: replays stored texts keyed by (record, prompt id).

    Performs no network activity, ever.
    """

    name = "fixture"

    def __init__(self, store: dict[tuple[RecordId, int], str] | None = None):
        self._store = dict(store or {})

    @classmethod
    def from_jsonl(cls, path: str | Path) -> "FixtureBackend":
        """Load a description fixture file (JSON Lines with record_id /
        source / prompt_id / text), keeping the video entries."""
        store: dict[tuple[RecordId, int], str] = {}
        with Path(path).open("r", encoding="utf-8") as f:
            for line in f:
                line = line.strip()
                if not line:
                    continue
                obj = json.loads(line)
                if obj.get("source") != Modality.VIDEO.value:
                    continue
                store[(obj["record_id"], int(obj["prompt_id"]))] = obj["text"]
        return cls(store)

    def describe(self, record: RecordId, frames: list[FrameRef],
                 prompt: PromptSpec) -> str:
        try:
            return self._store[(record, prompt.id)]
        except KeyError:
            raise MissingFixture(
                f"no fixture text for record {record!r}, prompt {prompt.id}"
            ) from None


class RemoteBackend:
    """Adapter to an out-of-process vision-language service.

    Wire contract: ``POST {base_url}/describe`` with
    ``{"frames": [uri-or-base64, ...], "turns": [...]}`` returning
    ``{"text": "..."}``. All sampled frames plus the prompt turns are sent
    in order; the final reply is returned verbatim.
    """

    name = "remote"

    def __init__(self, base_url: str, send_base64: bool = False,
                 timeout: float = 120.0):
        self.base_url = base_url.rstrip("/")
        self.send_base64 = send_base64
        self.timeout = timeout

    def _frame_payload(self, frames: list[FrameRef]) -> list[str]:
        if not self.send_base64:
            return [fr.uri for fr in frames]
        return [
            base64.b64encode(Path(fr.uri).read_bytes()).decode("ascii")
            for fr in frames
        ]

    def describe(self, record: RecordId, frames: list[FrameRef],
                 prompt: PromptSpec) -> str:
        import httpx

        body = {"frames": self._frame_payload(frames), "turns": list(prompt.turns)}
        try:
            resp = httpx.post(f"{self.base_url}/describe", json=body,
                              timeout=self.timeout)
        except httpx.HTTPError as exc:
            raise BackendUnavailable(f"describer backend unreachable: {exc}") from exc
        if not 200 <= resp.status_code < 300:
            raise BackendUnavailable(
                f"describer backend returned {resp.status_code}",
                status=resp.status_code,
            )
        return str(resp.json().get("text", ""))


def describe_video(frames: list[FrameRef], prompt: PromptSpec, backend) -> Description:
    """Generate the video description for one record's sampled frames."""
    if not frames:
        raise EmptyVideo("cannot describe a record with no frames")
    record = frames[0].record
    text = backend.describe(record, frames, prompt)
    if not text or not text.strip():
        raise EmptyDescription(
            f"backend {backend.name!r} returned an empty description for {record!r}"
        )
    return Description(record=record, source=Modality.VIDEO, text=text,
                       prompt_id=prompt.id, generator=backend.name)
