"""Per-record data processing pipeline.

Drops noise channels, downsamples the three signal tables onto the
least-frequent one, restricts everything to the video's time span,
concatenates the result into one table, and uniformly samples video frames.
All transformations are pure per record, so records can be ingested in
parallel.
"""

from __future__ import annotations

import bisect
import csv
from dataclasses import dataclass
from pathlib import Path

from .corpus import FrameRef, RecordId, SignalKind, SignalTable, TimeSpan
from .errors import EmptySpan, EmptyTable, EmptyVideo, UnsupportedFormat

DEFAULT_FRAME_SAMPLE = 32


@dataclass
class UnifiedSignalTable:
    """The concatenated per-record signal table after alignment.

    Row count equals the least-frequent source table's row count inside the
    video span; channel names are unique (source-kind prefix applied on
    collision).
    """

    record: RecordId
    timestamps: list[float]
    channels: dict[str, list[float]]

    def __len__(self) -> int:
        return len(self.timestamps)


@dataclass
class ChannelFilter:
    """Channel selection policy: drop constant-valued channels, then keep
    only the allowlist when one is given."""

    allowlist: set[str] | None = None
    drop_constant: bool = True


def prune_channels(table: SignalTable, filt: ChannelFilter) -> SignalTable:
    """Remove noise channels from a table.

    Channels whose value never changes are treated as noise when
    ``drop_constant`` is set; the allowlist is applied afterwards.
    Timestamps are untouched. Raises ``EmptyTable`` if nothing survives.
    """
    channels: dict[str, list[float]] = {}
    for name, values in table.channels.items():
        if filt.drop_constant and values and all(v == values[0] for v in values):
            continue
        if filt.allowlist is not None and name not in filt.allowlist:
            continue
        channels[name] = values
    if not channels:
        raise EmptyTable(f"all channels of {table.kind.value} table removed by filter")
    return SignalTable(kind=table.kind, timestamps=table.timestamps, channels=channels)


def _restrict_to_span(table: SignalTable, span: TimeSpan) -> SignalTable:
    lo = bisect.bisect_left(table.timestamps, span.start)
    hi = bisect.bisect_right(table.timestamps, span.end)
    if hi <= lo:
        raise EmptySpan(
            f"{table.kind.value} table has no rows inside span "
            f"[{span.start}, {span.end}]"
        )
    return SignalTable(
        kind=table.kind,
        timestamps=table.timestamps[lo:hi],
        channels={name: vals[lo:hi] for name, vals in table.channels.items()},
    )


def _nearest_row(timestamps: list[float], t: float) -> int:
    """Index of the row whose timestamp is nearest to ``t``; ties go to the
    earlier row."""
    pos = bisect.bisect_left(timestamps, t)
    if pos == 0:
        return 0
    if pos == len(timestamps):
        return len(timestamps) - 1
    before, after = timestamps[pos - 1], timestamps[pos]
    # strict '<' keeps the earlier row on an exact tie
    if after - t < t - before:
        return pos
    return pos - 1


def align_and_concat(vd: SignalTable, vcd: SignalTable, sd: SignalTable,
                     span: TimeSpan, record: RecordId = "") -> UnifiedSignalTable:
    """Downsample all tables onto the least-frequent one and concatenate.

    Target timestamps are the in-span timestamps of whichever table has the
    fewest rows inside the span. Every other table contributes, per target
    timestamp, its nearest row (ties toward the earlier row). Channel-name
    collisions are resolved by prefixing with the table kind, e.g.
    ``sd.longitude``.
    """
    restricted = [_restrict_to_span(t, span) for t in (vd, vcd, sd)]
    target = min(restricted, key=len)

    name_counts: dict[str, int] = {}
    for t in restricted:
        for name in t.channels:
            name_counts[name] = name_counts.get(name, 0) + 1

    channels: dict[str, list[float]] = {}
    for t in restricted:
        if t is target:
            picked = list(range(len(t)))
        else:
            picked = [_nearest_row(t.timestamps, ts) for ts in target.timestamps]
        for name, values in t.channels.items():
            out_name = f"{t.kind.value}.{name}" if name_counts[name] > 1 else name
            channels[out_name] = [values[i] for i in picked]

    return UnifiedSignalTable(record=record, timestamps=list(target.timestamps),
                              channels=channels)


def sample_frames(frames: list[FrameRef], k: int) -> list[FrameRef]:
    """Uniformly sample ``k`` frames, always keeping the first and last.

    Uses endpoint-inclusive linear spacing: index ``round(i*(N-1)/(k-1))``
    for i in 0..k-1, computed in integer arithmetic (round half up) so the
    result is platform-stable. Fewer than ``k`` frames are returned as-is.
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if not frames:
        raise EmptyVideo("cannot sample frames from an empty video")
    n = len(frames)
    if n <= k:
        return list(frames)
    if k == 1:
        return [frames[0]]
    step_num = n - 1
    step_den = k - 1
    indices = [(2 * i * step_num + step_den) // (2 * step_den) for i in range(k)]
    return [frames[i] for i in indices]


# --- table loading -----------------------------------------------------------

def read_signal_csv(path: str | Path, kind: SignalKind) -> SignalTable:
    """Read the CSV fixture format: UTF-8, header row, first column
    ``timestamp`` (float seconds), remaining columns float channels."""
    path = Path(path)
    with path.open("r", encoding="utf-8", newline="") as f:
        reader = csv.reader(f)
        try:
            header = next(reader)
        except StopIteration:
            raise EmptyTable(f"{path} is empty") from None
        if not header or header[0] != "timestamp":
            raise UnsupportedFormat(f"{path}: first column must be 'timestamp'")
        names = header[1:]
        timestamps: list[float] = []
        columns: list[list[float]] = [[] for _ in names]
        for row in reader:
            if not row:
                continue
            timestamps.append(float(row[0]))
            for i, cell in enumerate(row[1:]):
                columns[i].append(float(cell))
    if not timestamps:
        raise EmptyTable(f"{path} has a header but no rows")
    return SignalTable(kind=kind, timestamps=timestamps,
                       channels=dict(zip(names, columns)))


def read_unified_csv(path: str | Path, record: RecordId) -> UnifiedSignalTable:
    """Read a unified table previously written by :func:`write_signal_csv`."""
    table = read_signal_csv(path, SignalKind.SATELLITE_DATA)
    return UnifiedSignalTable(record=record, timestamps=table.timestamps,
                              channels=table.channels)


def write_signal_csv(table: SignalTable | UnifiedSignalTable, path: str | Path) -> None:
    """Write a table in the CSV fixture format (inverse of
    :func:`read_signal_csv`)."""
    names = sorted(table.channels)
    with Path(path).open("w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(["timestamp"] + names)
        for i, ts in enumerate(table.timestamps):
            writer.writerow([repr(ts)] + [repr(table.channels[n][i]) for n in names])


def _read_signal_parquet(path: Path, kind: SignalKind) -> SignalTable:
    try:
        import polars as pl
    except ImportError:
        raise UnsupportedFormat(
            f"{path}: parquet support requires the 'parquet' extra (polars)"
        ) from None
    df = pl.read_parquet(path)
    if "timestamp" not in df.columns:
        raise UnsupportedFormat(f"{path}: parquet table must carry a 'timestamp' column")
    timestamps = [float(v) for v in df["timestamp"].to_list()]
    channels = {
        name: [float(v) for v in df[name].to_list()]
        for name in df.columns if name != "timestamp"
    }
    if not timestamps:
        raise EmptyTable(f"{path} has no rows")
    return SignalTable(kind=kind, timestamps=timestamps, channels=channels)


def load_signal_table(path: str | Path, kind: SignalKind) -> SignalTable:
    """Load a signal table, dispatching on file suffix (.csv or .parquet)."""
    path = Path(path)
    suffix = path.suffix.lower()
    if suffix == ".csv":
        return read_signal_csv(path, kind)
    if suffix == ".parquet":
        return _read_signal_parquet(path, kind)
    raise UnsupportedFormat(f"{path}: unsupported signal table format {suffix!r}")
