"""Embedding providers, cosine similarity, and the per-modality vector index.

Descriptions and queries are embedded with a pluggable provider and compared
by cosine similarity; distance is defined as ``1 - similarity`` so scores in
[-1, 1] map to distances in [0, 2]. Indexes are brute-force exact: at corpus
scale (thousands of records, a few hundred dims) a linear scan is
microseconds, so no ANN structure is used.

The built-in provider is a hashed bag-of-words. It exists to make every test
deterministic and offline: lowercase, split on non-alphanumeric ASCII, hash
each token with a fixed 64-bit hash (blake2b/8) modulo the dimension,
accumulate counts, L2-normalize. Same text, same vector, on any platform.
"""

from __future__ import annotations

import hashlib
import json
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Protocol

import numpy as np

from .corpus import Description, Modality, RecordId
from .errors import (
    CorruptIndex,
    DimMismatch,
    DuplicateEntry,
    EmptyText,
    FingerprintMismatch,
    MixedSource,
    ProviderUnavailable,
)

DEFAULT_DIM = 384

_TOKEN_RE = re.compile(r"[a-z0-9]+")


class EmbeddingProvider(Protocol):
    """Anything that can turn text into fixed-dimension vectors."""

    @property
    def dim(self) -> int: ...

    @property
    def fingerprint(self) -> str: ...

    def embed_text(self, text: str) -> np.ndarray: ...


def _token_bucket(token: str, dim: int) -> int:
    digest = hashlib.blake2b(token.encode("utf-8"), digest_size=8).digest()
    return int.from_bytes(digest, "big") % dim


class HashedBagProvider:
    """Deterministic offline embedding provider (hashed bag-of-words)."""

    def __init__(self, dim: int = DEFAULT_DIM):
        if dim < 1:
            raise ValueError(f"dim must be >= 1, got {dim}")
        self._dim = dim

    @property
    def dim(self) -> int:
        return self._dim

    @property
    def fingerprint(self) -> str:
        return f"hashed-bag-v1:blake2b64:dim={self._dim}"

    def embed_text(self, text: str) -> np.ndarray:
        return embed(text, self)

    def _raw_vector(self, text: str) -> np.ndarray:
        vec = np.zeros(self._dim, dtype=np.float64)
        for token in _TOKEN_RE.findall(text.lower()):
            vec[_token_bucket(token, self._dim)] += 1.0
        return vec


class RemoteProvider:
    """Embedding provider backed by an HTTP service.

    Wire contract: ``POST {base_url}/embed {"texts": [...]}`` returning
    ``{"vectors": [[...], ...]}``. Vectors are L2-normalized on receipt.
    """

    def __init__(self, base_url: str, dim: int = DEFAULT_DIM, timeout: float = 30.0):
        self.base_url = base_url.rstrip("/")
        self._dim = dim
        self.timeout = timeout

    @property
    def dim(self) -> int:
        return self._dim

    @property
    def fingerprint(self) -> str:
        return f"remote:{self.base_url}:dim={self._dim}"

    def embed_text(self, text: str) -> np.ndarray:
        return embed(text, self)

    def _raw_vector(self, text: str) -> np.ndarray:
        import httpx

        try:
            resp = httpx.post(f"{self.base_url}/embed", json={"texts": [text]},
                              timeout=self.timeout)
        except httpx.HTTPError as exc:
            raise ProviderUnavailable(f"embedding provider unreachable: {exc}") from exc
        if resp.status_code != 200:
            raise ProviderUnavailable(
                f"embedding provider returned {resp.status_code}",
                status=resp.status_code,
            )
        vectors = resp.json().get("vectors")
        if not vectors or len(vectors[0]) != self._dim:
            raise ProviderUnavailable(
                f"embedding provider returned malformed vectors for dim {self._dim}"
            )
        return np.asarray(vectors[0], dtype=np.float64)


def embed(text: str, provider: EmbeddingProvider) -> np.ndarray:
    """Embed ``text`` into a unit-norm vector of the provider's dimension.

    Degenerate input (no tokens at all) yields the zero vector rather than an
    error; cosine against it is 0.
    """
    if not text or not text.strip():
        raise EmptyText("cannot embed empty or whitespace-only text")
    raw = provider._raw_vector(text)
    norm = float(np.linalg.norm(raw))
    if norm == 0.0:
        return raw
    return raw / norm


def cosine(a: np.ndarray, b: np.ndarray) -> float:
    """Cosine similarity of two unit vectors, clamped to [-1, 1].

    The clamp absorbs float rounding only; genuinely negative similarities
    are preserved (distances above 1 are meaningful).
    """
    if a.shape != b.shape:
        raise DimMismatch(f"vector dims differ: {a.shape[0]} vs {b.shape[0]}")
    return float(np.clip(np.dot(a, b), -1.0, 1.0))


def distance(similarity: float) -> float:
    """Cosine distance: exactly ``1 - similarity``."""
    return 1.0 - similarity


@dataclass(frozen=True)
class IndexEntry:
    vector: np.ndarray
    text: str
    prompt_id: int | None = None

    def __eq__(self, other) -> bool:  # ndarray needs explicit comparison
        if not isinstance(other, IndexEntry):
            return NotImplemented
        return (self.text == other.text and self.prompt_id == other.prompt_id
                and np.array_equal(self.vector, other.vector))


@dataclass
class VectorIndex:
    """Immutable-after-build vector index for one modality."""

    source: Modality
    dim: int
    provider_fingerprint: str
    entries: dict[RecordId, IndexEntry] = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.entries)

    def __contains__(self, record: RecordId) -> bool:
        return record in self.entries

    def record_ids(self) -> list[RecordId]:
        return sorted(self.entries)

    @property
    def prompt_id(self) -> int | None:
        """The uniform prompt id of the indexed descriptions, if any."""
        ids = {e.prompt_id for e in self.entries.values()}
        if len(ids) == 1:
            return next(iter(ids))
        return None

    def similarities(self, query_vector: np.ndarray) -> dict[RecordId, float]:
        """Cosine similarity of the query against every entry."""
        if query_vector.shape[0] != self.dim:
            raise DimMismatch(
                f"query dim {query_vector.shape[0]} != index dim {self.dim}"
            )
        ids = self.record_ids()
        if not ids:
            return {}
        matrix = np.stack([self.entries[r].vector for r in ids])
        scores = np.clip(matrix @ query_vector, -1.0, 1.0)
        return {r: float(s) for r, s in zip(ids, scores)}


def build_index(descriptions: list[Description], source: Modality,
                provider: EmbeddingProvider) -> VectorIndex:
    """Embed one description per record into a fresh index."""
    index = VectorIndex(source=source, dim=provider.dim,
                        provider_fingerprint=provider.fingerprint)
    for desc in descriptions:
        if desc.source is not source:
            raise MixedSource(
                f"description for {desc.record!r} has source {desc.source.value}, "
                f"index is {source.value}"
            )
        if desc.record in index.entries:
            raise DuplicateEntry(
                f"record {desc.record!r} already indexed for {source.value}"
            )
        vector = embed(desc.text, provider)
        index.entries[desc.record] = IndexEntry(
            vector=vector, text=desc.text, prompt_id=desc.prompt_id
        )
    return index


_INDEX_FORMAT = "ssx-1"


def save_index(index: VectorIndex, path: str | Path) -> None:
    """Persist an index: JSON Lines, header line then one line per entry in
    ascending record-id order. Saving a loaded index reproduces the file
    byte-for-byte."""
    path = Path(path)
    with path.open("w", encoding="utf-8", newline="\n") as f:
        header = {
            "format": _INDEX_FORMAT,
            "source": index.source.value,
            "dim": index.dim,
            "provider_fingerprint": index.provider_fingerprint,
        }
        f.write(json.dumps(header, ensure_ascii=False) + "\n")
        for rid in index.record_ids():
            entry = index.entries[rid]
            obj = {
                "record_id": rid,
                "prompt_id": entry.prompt_id,
                "text": entry.text,
                "vector": [float(v) for v in entry.vector],
            }
            f.write(json.dumps(obj, ensure_ascii=False) + "\n")


def load_index(path: str | Path, provider: EmbeddingProvider | None = None,
               force: bool = False) -> VectorIndex:
    """Load an index file.

    When ``provider`` is given, its fingerprint must match the one the index
    was built with (``force=True`` overrides; mixing providers silently would
    make every similarity meaningless).
    """
    path = Path(path)
    try:
        with path.open("r", encoding="utf-8") as f:
            header_line = f.readline()
            if not header_line:
                raise CorruptIndex(f"{path}: empty index file")
            header = json.loads(header_line)
            if header.get("format") != _INDEX_FORMAT:
                raise CorruptIndex(f"{path}: unknown index format {header.get('format')!r}")
            dim = int(header["dim"])
            index = VectorIndex(
                source=Modality(header["source"]),
                dim=dim,
                provider_fingerprint=str(header["provider_fingerprint"]),
            )
            for line in f:
                line = line.rstrip("\n")
                if not line:
                    continue
                obj = json.loads(line)
                vector = np.asarray(obj["vector"], dtype=np.float64)
                if vector.shape[0] != dim:
                    raise CorruptIndex(
                        f"{path}: entry {obj.get('record_id')!r} has dim "
                        f"{vector.shape[0]}, header says {dim}"
                    )
                rid = obj["record_id"]
                if rid in index.entries:
                    raise CorruptIndex(f"{path}: duplicate record {rid!r}")
                pid = obj.get("prompt_id")
                index.entries[rid] = IndexEntry(
                    vector=vector, text=obj["text"],
                    prompt_id=None if pid is None else int(pid),
                )
    except (json.JSONDecodeError, KeyError, ValueError, TypeError) as exc:
        raise CorruptIndex(f"{path}: cannot parse index file: {exc}") from exc

    if provider is not None and not force:
        if index.provider_fingerprint != provider.fingerprint:
            raise FingerprintMismatch(
                f"{path} was built with {index.provider_fingerprint!r}, active "
                f"provider is {provider.fingerprint!r} (use force to override)"
            )
    return index
