"""Seed a small corpus for the console's live round-trip test.

Usage: python3 scripts/seed_corpus.py <output-dir>
Writes catalog.jsonl, indexes/{video,signal}.jsonl, and frame images.
"""

from __future__ import annotations

import base64
import sys
from pathlib import Path

from drivesearch.corpus import (
    CorpusCatalog,
    Description,
    FrameRef,
    Modality,
    TimeSpan,
    save_manifest,
)
from drivesearch.similarity import HashedBagProvider, build_index, save_index

TINY_PNG = base64.b64decode(
    "iVBORw0KGgoAAAANSUhEUgAAAAEAAAABCAYAAAAfFcSJAAAADUlEQVR4nGNgYGBg"
    "AAAABQABijPjAAAAAABJRU5ErkJggg=="
)

VIDEO_TEXTS = {
    "000001": "The vehicle is driving through a tunnel with artificial lighting.",
    "000002": "Snow covers the road while the vehicle drives slowly.",
    "000003": "An open motorway stretches ahead under a bright sky.",
    "000004": "A quiet residential street with parked cars on both sides.",
    "000005": "The vehicle crosses a long bridge over calm water.",
    "000006": "Rain falls steadily as the wipers sweep the windshield.",
}

SIGNAL_TEXTS = {
    "000001": "The vehicle drove at a moderate speed, averaging 16.0 m/s. "
              "Satellite reception dropped out mid-drive.",
    "000002": "The vehicle drove at low speed, averaging 5.5 m/s. The wipers ran.",
    "000003": "The vehicle drove at highway speed, averaging 28.0 m/s.",
    "000004": "The vehicle was essentially stationary, with a mean speed of 1.0 m/s.",
    "000005": "The vehicle drove at a moderate speed, averaging 18.0 m/s.",
    "000006": "The driver pressed the brake pedal during the drive, up to 0.4 of full travel.",
}


def main() -> int:
    out = Path(sys.argv[1])
    out.mkdir(parents=True, exist_ok=True)
    index_dir = out / "indexes"
    index_dir.mkdir(exist_ok=True)

    catalog = CorpusCatalog()
    for rid in VIDEO_TEXTS:
        frame_dir = out / "frames" / rid
        frame_dir.mkdir(parents=True, exist_ok=True)
        frames = []
        for i in range(4):
            path = frame_dir / f"{i:04d}.png"
            path.write_bytes(TINY_PNG)
            frames.append(FrameRef(record=rid, index=i, timestamp=i * 5.0, uri=str(path)))
        catalog.add(rid, TimeSpan(0.0, 20.0), frames, unified_signal_rows=50)
    save_manifest(catalog, out / "catalog.jsonl")

    provider = HashedBagProvider()
    video = build_index(
        [Description(record=r, source=Modality.VIDEO, text=t, prompt_id=4,
                     generator="seed") for r, t in VIDEO_TEXTS.items()],
        Modality.VIDEO, provider)
    signal = build_index(
        [Description(record=r, source=Modality.SIGNAL, text=t,
                     generator="seed") for r, t in SIGNAL_TEXTS.items()],
        Modality.SIGNAL, provider)
    save_index(video, index_dir / "video.jsonl")
    save_index(signal, index_dir / "signal.jsonl")
    print(f"seeded {len(catalog)} records under {out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
