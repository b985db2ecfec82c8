"""Domain types and the record catalog.

A *record* is one test-drive sequence: a zero-padded string id binding signal
tables, video frame references, and generated descriptions. The catalog is
built single-writer during ingest, then frozen; frozen catalogs are safe to
read from any number of threads.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Iterator

from .errors import DuplicateRecord, InvalidFrame, NotFound

RecordId = str
"""Zero-padded decimal string identifier, e.g. ``"000005"``.

Kept as a string (not an int) to preserve the zero padding used in dataset
file names.
"""


class Modality(str, Enum):
    """Which data source a description was generated from."""

    VIDEO = "video"
    SIGNAL = "signal"


class SignalKind(str, Enum):
    """The three source signal tables recorded during a test drive."""

    VEHICLE_DATA = "vd"
    VEHICLE_CONTROL_DATA = "vcd"
    SATELLITE_DATA = "sd"


@dataclass(frozen=True)
class TimeSpan:
    """Closed time interval in seconds (epoch-relative or absolute per corpus
    config; all modules treat the values opaquely)."""

    start: float
    end: float

    def __post_init__(self):
        if not self.end > self.start:
            raise ValueError(f"TimeSpan end must exceed start: [{self.start}, {self.end}]")

    def contains(self, t: float) -> bool:
        return self.start <= t <= self.end


@dataclass(frozen=True)
class FrameRef:
    """Reference to one video frame image on disk."""

    record: RecordId
    index: int
    timestamp: float
    uri: str

    def __post_init__(self):
        if self.index < 0:
            raise ValueError(f"frame index must be >= 0, got {self.index}")


@dataclass
class SignalTable:
    """One source table of time-stamped numeric channels.

    Invariants: timestamps strictly ascending; every channel holds exactly one
    value per timestamp.
    """

    kind: SignalKind
    timestamps: list[float]
    channels: dict[str, list[float]]

    def __post_init__(self):
        n = len(self.timestamps)
        for prev, cur in zip(self.timestamps, self.timestamps[1:]):
            if not cur > prev:
                raise ValueError(f"{self.kind.value} timestamps not strictly ascending at {cur}")
        for name, values in self.channels.items():
            if len(values) != n:
                raise ValueError(
                    f"channel {name!r} has {len(values)} values for {n} timestamps"
                )

    def __len__(self) -> int:
        return len(self.timestamps)


@dataclass(frozen=True)
class Description:
    """One generated text per (record, modality); the unit that gets embedded."""

    record: RecordId
    source: Modality
    text: str
    prompt_id: int | None = None
    generator: str = ""

    def __post_init__(self):
        if not self.text:
            raise ValueError("description text must be non-empty")
        if self.source is Modality.SIGNAL and self.prompt_id is not None:
            raise ValueError("signal descriptions carry no prompt_id")


@dataclass
class CatalogEntry:
    span: TimeSpan
    frames: list[FrameRef] = field(default_factory=list)
    unified_signal_rows: int = 0

    @property
    def has_video(self) -> bool:
        return bool(self.frames)

    @property
    def has_signals(self) -> bool:
        return self.unified_signal_rows > 0


class CorpusCatalog:
    """Record catalog keyed by id.

    Iteration is always in ascending record-id order so index builds and
    manifests are reproducible.
    """

    def __init__(self) -> None:
        self._entries: dict[RecordId, CatalogEntry] = {}

    def __len__(self) -> int:
        return len(self._entries)

    def __contains__(self, record: RecordId) -> bool:
        return record in self._entries

    def __iter__(self) -> Iterator[RecordId]:
        return iter(sorted(self._entries))

    def add(self, record: RecordId, span: TimeSpan, frames: list[FrameRef],
            unified_signal_rows: int = 0) -> CatalogEntry:
        """Insert a record. Duplicate ids are rejected, and every frame
        timestamp must fall inside the span."""
        if not record:
            raise ValueError("record id must be non-empty")
        if record in self._entries:
            raise DuplicateRecord(f"record {record!r} already in catalog")
        for fr in frames:
            if not span.contains(fr.timestamp):
                raise InvalidFrame(
                    f"frame {fr.index} of {record!r} at t={fr.timestamp} outside "
                    f"span [{span.start}, {span.end}]"
                )
        if unified_signal_rows < 0:
            raise ValueError("unified_signal_rows must be >= 0")
        entry = CatalogEntry(span=span, frames=list(frames),
                             unified_signal_rows=unified_signal_rows)
        self._entries[record] = entry
        return entry

    def lookup(self, record: RecordId) -> CatalogEntry:
        """Return the exact entry inserted for ``record``; never a default."""
        try:
            return self._entries[record]
        except KeyError:
            raise NotFound(f"record {record!r} not in catalog") from None

    def items(self) -> Iterator[tuple[RecordId, CatalogEntry]]:
        for rid in self:
            yield rid, self._entries[rid]


def save_manifest(catalog: CorpusCatalog, path: str | Path) -> None:
    """Write the catalog manifest: JSON Lines, one object per record,
    ascending record id, LF line endings."""
    path = Path(path)
    with path.open("w", encoding="utf-8", newline="\n") as f:
        for rid, entry in catalog.items():
            obj = {
                "record_id": rid,
                "start": entry.span.start,
                "end": entry.span.end,
                "frames": [
                    {"index": fr.index, "timestamp": fr.timestamp, "uri": fr.uri}
                    for fr in entry.frames
                ],
                "unified_signal_rows": entry.unified_signal_rows,
            }
            f.write(json.dumps(obj, ensure_ascii=False) + "\n")


def load_manifest(path: str | Path) -> CorpusCatalog:
    """Read a catalog manifest written by :func:`save_manifest`.

    ``unified_signal_rows`` is an additive key; manifests without it load
    with zero rows.
    """
    catalog = CorpusCatalog()
    path = Path(path)
    with path.open("r", encoding="utf-8") as f:
        for line in f:
            line = line.strip()
            if not line:
                continue
            obj = json.loads(line)
            rid = obj["record_id"]
            span = TimeSpan(start=float(obj["start"]), end=float(obj["end"]))
            frames = [
                FrameRef(record=rid, index=int(fr["index"]),
                         timestamp=float(fr["timestamp"]), uri=str(fr["uri"]))
                for fr in obj.get("frames", [])
            ]
            catalog.add(rid, span, frames,
                        unified_signal_rows=int(obj.get("unified_signal_rows", 0)))
    return catalog


def load_descriptions(path: str | Path) -> list[Description]:
    """Read a description file: JSON Lines with record_id / source /
    prompt_id / text / generator keys."""
    out: list[Description] = []
    with Path(path).open("r", encoding="utf-8") as f:
        for line in f:
            line = line.strip()
            if not line:
                continue
            obj = json.loads(line)
            pid = obj.get("prompt_id")
            out.append(Description(
                record=obj["record_id"],
                source=Modality(obj["source"]),
                text=obj["text"],
                prompt_id=None if pid is None else int(pid),
                generator=obj.get("generator", ""),
            ))
    return out


def save_descriptions(descriptions: list[Description], path: str | Path) -> None:
    """Write descriptions as JSON Lines, the inverse of :func:`load_descriptions`."""
    with Path(path).open("w", encoding="utf-8", newline="\n") as f:
        for d in descriptions:
            obj = {
                "record_id": d.record,
                "source": d.source.value,
                "prompt_id": d.prompt_id,
                "text": d.text,
                "generator": d.generator,
            }
            f.write(json.dumps(obj, ensure_ascii=False) + "\n")
