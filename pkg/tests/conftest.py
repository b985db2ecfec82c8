"""Shared fixtures: a synthetic desk-scale corpus with known query targets.

The corpus seeds 50 records with fixture descriptions so that each of nine
scenario-style queries has exactly one intended target record whose texts
carry the query's distinctive tokens. Everything is deterministic and
offline (built-in hashed-bag provider).
"""

from __future__ import annotations

import base64
from dataclasses import dataclass
from pathlib import Path

import pytest

from drivesearch.corpus import (
    CorpusCatalog,
    Description,
    FrameRef,
    Modality,
    TimeSpan,
    save_manifest,
)
from drivesearch.similarity import HashedBagProvider, build_index, save_index

# one intended target per scenario-style query
QUERY_TARGETS: list[tuple[str, str]] = [
    ("driving in heavy snow", "000004"),
    ("driving through a tunnel", "000009"),
    ("driving in France with pedestrians visible", "000013"),
    ("driving on a bridge with a car ahead", "000017"),
    ("rain with a car ahead before a right turn", "000022"),
    ("cloudy day approaching a bridge with no other cars in sight", "000026"),
    ("lane marking changes from dashed to solid when exiting a tunnel", "000031"),
    ("driving on a highway with an exit ramp ahead", "000038"),
    ("rural road in the afternoon with vertical acceleration greater than 9", "000044"),
]

_TARGET_VIDEO_TEXT = {
    "000004": "Heavy snow falls on the road. The snow covers both lanes and "
              "snowfall reduces visibility while the vehicle keeps driving in snow.",
    "000009": "The vehicle is driving through a tunnel. Inside the tunnel the "
              "lighting is artificial, and the tunnel walls pass on both sides "
              "while the vehicle keeps driving through.",
    "000013": "Several pedestrians are visible near a crossing, and the "
              "pedestrians wait while the vehicle passes them while driving.",
    "000017": "The vehicle is driving on a bridge with a car ahead. The bridge "
              "deck stretches forward and the car ahead keeps its distance.",
    "000022": "Rain streaks the windshield while a car ahead brakes before a "
              "right turn; the vehicle follows through the rain and makes the turn.",
    "000026": "On a cloudy day the vehicle is approaching a bridge with no "
              "other cars in sight; the cloudy sky hangs over the empty bridge.",
    "000031": "The lane marking changes from a dashed line to a solid line "
              "when exiting a tunnel, and the solid marking continues past the exit.",
    "000038": "The vehicle is driving on a highway and an exit ramp is ahead; "
              "the highway signage announces the ramp well before the exit.",
    "000044": "A rural road in the afternoon; the afternoon light is low over "
              "the rural fields as the ride gets bumpy.",
}

_TARGET_SIGNAL_TEXT = {
    "000004": "The vehicle drove at low speed, averaging 6.0 m/s. The wipers "
              "and heating ran throughout, consistent with snow on the road.",
    "000009": "The vehicle drove at a moderate speed, averaging 15.0 m/s. "
              "Satellite reception dropped out mid-drive, consistent with a tunnel passage.",
    "000013": "The drive took place in France. The vehicle was essentially "
              "stationary, with a mean speed of 1.2 m/s, yielding while pedestrians crossed.",
    "000017": "The vehicle drove at a moderate speed, averaging 17.5 m/s, "
              "holding constant headway behind the car ahead across the bridge segment.",
    "000022": "The driver pressed the brake pedal behind a car ahead, up to "
              "0.55 of full travel. The wipers ran continuously, indicating rain, "
              "and the final maneuver was a right turn.",
    "000026": "The vehicle drove at a moderate speed, averaging 16.8 m/s, "
              "approaching a bridge with no braking events and no other cars on radar.",
    "000031": "The vehicle drove at a moderate speed, averaging 18.9 m/s; "
              "lane keeping tracked a dashed line changing to a solid line.",
    "000038": "The vehicle drove at highway speed, averaging 27.4 m/s, on a "
              "highway segment before slowing toward an exit ramp.",
    "000044": "Vertical acceleration exceeded 9 m/s^2 at least once, peaking "
              "at 9.8 m/s^2, suggesting a rough rural road. The drive took place "
              "in Sweden in the afternoon.",
}

# neutral filler for the other records: avoids every distinctive query token
_FILLER_VIDEO = [
    "The vehicle proceeds along a quiet suburban street in daylight with "
    "light traffic and steady progress.",
    "A calm urban drive past parked vehicles and storefronts; nothing "
    "notable happens and the pace stays even.",
    "The vehicle follows a gentle curve between hedgerows under a clear sky, "
    "keeping a constant pace throughout.",
    "An uneventful stretch of asphalt with intermittent trees on both sides; "
    "the vehicle maintains its course.",
    "The vehicle moves through a residential area, pausing briefly at an "
    "intersection before continuing smoothly.",
]

_FILLER_SIGNAL = [
    "The vehicle drove at low speed, averaging 7.5 m/s. The driver used the "
    "accelerator pedal, up to 0.22 of full travel.",
    "The vehicle drove at a moderate speed, averaging 13.4 m/s. No hard "
    "braking events were recorded.",
    "The vehicle was essentially stationary, with a mean speed of 0.8 m/s. "
    "The drive took place in Germany.",
    "The vehicle drove at a moderate speed, averaging 14.9 m/s. The driver "
    "pressed the brake pedal during the drive, up to 0.18 of full travel.",
]

# minimal valid 1x1 PNG (used as a frame image fixture)
TINY_PNG = base64.b64decode(
    "iVBORw0KGgoAAAANSUhEUgAAAAEAAAABCAYAAAAfFcSJAAAADUlEQVR4nGNgYGBg"
    "AAAABQABijPjAAAAAABJRU5ErkJggg=="
)


@dataclass
class DemoCorpus:
    root: Path
    catalog: CorpusCatalog
    catalog_path: Path
    index_dir: Path
    video_descriptions: list[Description]
    signal_descriptions: list[Description]
    provider: HashedBagProvider
    frame_records: list[str]


def build_demo_corpus(root: Path, n_records: int = 50, dim: int = 384,
                      frames_for: int = 3, prompt_id: int = 4) -> DemoCorpus:
    root.mkdir(parents=True, exist_ok=True)
    frames_dir = root / "frames"
    index_dir = root / "indexes"
    index_dir.mkdir(exist_ok=True)

    records = [f"{i:06d}" for i in range(n_records)]
    catalog = CorpusCatalog()
    frame_records: list[str] = []
    for i, rid in enumerate(records):
        span = TimeSpan(0.0, 20.0)
        frames: list[FrameRef] = []
        if i < frames_for:
            rec_dir = frames_dir / rid
            rec_dir.mkdir(parents=True, exist_ok=True)
            for idx in range(8):
                img = rec_dir / f"{idx:04d}.png"
                img.write_bytes(TINY_PNG)
                frames.append(FrameRef(record=rid, index=idx, timestamp=idx * 2.0,
                                       uri=str(img)))
            frame_records.append(rid)
        catalog.add(rid, span, frames, unified_signal_rows=100)

    video_descriptions = []
    signal_descriptions = []
    for i, rid in enumerate(records):
        vtext = _TARGET_VIDEO_TEXT.get(rid, _FILLER_VIDEO[i % len(_FILLER_VIDEO)])
        stext = _TARGET_SIGNAL_TEXT.get(rid, _FILLER_SIGNAL[i % len(_FILLER_SIGNAL)])
        video_descriptions.append(Description(
            record=rid, source=Modality.VIDEO, text=vtext,
            prompt_id=prompt_id, generator="fixture"))
        signal_descriptions.append(Description(
            record=rid, source=Modality.SIGNAL, text=stext,
            generator="signal-interpreter-v1"))

    provider = HashedBagProvider(dim=dim)
    video_index = build_index(video_descriptions, Modality.VIDEO, provider)
    signal_index = build_index(signal_descriptions, Modality.SIGNAL, provider)
    save_index(video_index, index_dir / "video.jsonl")
    save_index(signal_index, index_dir / "signal.jsonl")

    catalog_path = root / "catalog.jsonl"
    save_manifest(catalog, catalog_path)
    return DemoCorpus(
        root=root,
        catalog=catalog,
        catalog_path=catalog_path,
        index_dir=index_dir,
        video_descriptions=video_descriptions,
        signal_descriptions=signal_descriptions,
        provider=provider,
        frame_records=frame_records,
    )


@pytest.fixture(scope="session")
def demo_corpus(tmp_path_factory) -> DemoCorpus:
    return build_demo_corpus(tmp_path_factory.mktemp("demo_corpus"))
