"""Catalog and domain-type behavior."""

from __future__ import annotations

import random

import pytest

from drivesearch.corpus import (
    CorpusCatalog,
    Description,
    FrameRef,
    Modality,
    SignalKind,
    SignalTable,
    TimeSpan,
    load_manifest,
    save_manifest,
)
from drivesearch.errors import DuplicateRecord, InvalidFrame, NotFound


def _frames(record: str, n: int, fps: float = 10.0) -> list[FrameRef]:
    return [FrameRef(record=record, index=i, timestamp=i / fps, uri=f"{record}/{i}.jpg")
            for i in range(n)]


def test_add_record_with_200_frames():
    catalog = CorpusCatalog()
    entry = catalog.add("000005", TimeSpan(0.0, 20.0), _frames("000005", 200))
    assert len(entry.frames) == 200
    assert entry.has_video


def test_add_record_without_video_is_flagged():
    catalog = CorpusCatalog()
    entry = catalog.add("000001", TimeSpan(0.0, 20.0), [])
    assert entry.frames == []
    assert not entry.has_video


def test_duplicate_insert_rejected():
    catalog = CorpusCatalog()
    catalog.add("000001", TimeSpan(0.0, 20.0), [])
    with pytest.raises(DuplicateRecord):
        catalog.add("000001", TimeSpan(0.0, 20.0), [])


def test_frame_outside_span_rejected():
    catalog = CorpusCatalog()
    bad = [FrameRef(record="000002", index=0, timestamp=25.0, uri="x.jpg")]
    with pytest.raises(InvalidFrame):
        catalog.add("000002", TimeSpan(0.0, 20.0), bad)


def test_lookup_round_trip():
    catalog = CorpusCatalog()
    entry = catalog.add("000007", TimeSpan(0.0, 20.0), _frames("000007", 5))
    assert catalog.lookup("000007") is entry


def test_lookup_unknown_id():
    catalog = CorpusCatalog()
    catalog.add("000001", TimeSpan(0.0, 20.0), [])
    with pytest.raises(NotFound):
        catalog.lookup("999999")


def test_lookup_at_corpus_scale():
    catalog = CorpusCatalog()
    for i in range(1473):
        catalog.add(f"{i:06d}", TimeSpan(0.0, 20.0), [], unified_signal_rows=i)
    assert len(catalog) == 1473
    assert catalog.lookup("000777").unified_signal_rows == 777


def test_insert_then_lookup_randomized():
    rng = random.Random(20240811)
    catalog = CorpusCatalog()
    inserted: dict[str, int] = {}
    ids = rng.sample(range(10_000_000), 10_000)
    for n in ids:
        rid = f"{n:07d}"
        rows = rng.randrange(0, 5000)
        catalog.add(rid, TimeSpan(0.0, 20.0), [], unified_signal_rows=rows)
        inserted[rid] = rows
    for rid, rows in inserted.items():
        assert catalog.lookup(rid).unified_signal_rows == rows


def test_iteration_order_is_ascending():
    catalog = CorpusCatalog()
    for rid in ["000500", "000002", "001473", "000010"]:
        catalog.add(rid, TimeSpan(0.0, 20.0), [])
    assert list(catalog) == ["000002", "000010", "000500", "001473"]


def test_manifest_round_trip(tmp_path):
    catalog = CorpusCatalog()
    catalog.add("000001", TimeSpan(0.0, 20.0), _frames("000001", 3), unified_signal_rows=97)
    catalog.add("000002", TimeSpan(5.0, 25.0), [], unified_signal_rows=0)
    path = tmp_path / "catalog.jsonl"
    save_manifest(catalog, path)

    loaded = load_manifest(path)
    assert list(loaded) == ["000001", "000002"]
    entry = loaded.lookup("000001")
    assert entry.unified_signal_rows == 97
    assert [f.uri for f in entry.frames] == ["000001/0.jpg", "000001/1.jpg", "000001/2.jpg"]
    assert loaded.lookup("000002").span == TimeSpan(5.0, 25.0)


def test_manifest_format_one_json_object_per_line(tmp_path):
    catalog = CorpusCatalog()
    catalog.add("000009", TimeSpan(0.0, 2.0), _frames("000009", 1))
    path = tmp_path / "catalog.jsonl"
    save_manifest(catalog, path)
    raw = path.read_bytes().decode("utf-8")
    assert raw.endswith("\n") and "\r" not in raw
    import json

    obj = json.loads(raw.splitlines()[0])
    assert obj["record_id"] == "000009"
    assert obj["start"] == 0.0 and obj["end"] == 2.0
    assert obj["frames"][0] == {"index": 0, "timestamp": 0.0, "uri": "000009/0.jpg"}


def test_timespan_requires_positive_duration():
    with pytest.raises(ValueError):
        TimeSpan(5.0, 5.0)


def test_signal_table_validation():
    with pytest.raises(ValueError):
        SignalTable(kind=SignalKind.VEHICLE_DATA, timestamps=[0.0, 0.0],
                    channels={"v": [1.0, 2.0]})
    with pytest.raises(ValueError):
        SignalTable(kind=SignalKind.VEHICLE_DATA, timestamps=[0.0, 1.0],
                    channels={"v": [1.0]})


def test_signal_description_rejects_prompt_id():
    with pytest.raises(ValueError):
        Description(record="000001", source=Modality.SIGNAL, text="x", prompt_id=2)


def test_description_text_must_be_non_empty():
    with pytest.raises(ValueError):
        Description(record="000001", source=Modality.VIDEO, text="", prompt_id=1)
