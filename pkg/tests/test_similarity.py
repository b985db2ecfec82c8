"""Embedding providers, cosine, and index persistence."""

from __future__ import annotations

import hashlib
import json
import random
import threading
from http.server import BaseHTTPRequestHandler, HTTPServer

import numpy as np
import pytest

from drivesearch.corpus import Description, Modality
from drivesearch.errors import (
    CorruptIndex,
    DimMismatch,
    DuplicateEntry,
    EmptyText,
    FingerprintMismatch,
    MixedSource,
    ProviderUnavailable,
)
from drivesearch.similarity import (
    HashedBagProvider,
    RemoteProvider,
    build_index,
    cosine,
    distance,
    embed,
    load_index,
    save_index,
    _token_bucket,
)

PROVIDER = HashedBagProvider(dim=384)


# --- embed ---

def test_embed_is_deterministic():
    a = embed("a car overtakes on the left", PROVIDER)
    b = embed("a car overtakes on the left", PROVIDER)
    assert np.array_equal(a, b)


def test_repeated_token_scales_out_under_normalization():
    assert cosine(embed("snow snow", PROVIDER), embed("snow", PROVIDER)) == pytest.approx(1.0, abs=1e-9)


def test_embed_rejects_empty_text():
    with pytest.raises(EmptyText):
        embed("", PROVIDER)
    with pytest.raises(EmptyText):
        embed("   \t\n", PROVIDER)


def test_embed_output_is_unit_norm():
    rng = random.Random(31)
    words = ["snow", "tunnel", "bridge", "rain", "car", "ahead", "road", "exit"]
    for _ in range(200):
        text = " ".join(rng.choices(words, k=rng.randint(1, 12)))
        v = embed(text, PROVIDER)
        assert abs(np.linalg.norm(v) - 1.0) <= 1e-9


def test_hash_buckets_are_frozen_across_processes():
    # pinned values guard against locale- or platform-dependent tokenization
    assert _token_bucket("snow", 384) == 170
    assert _token_bucket("tunnel", 384) == 150
    v = embed("Driving on a bridge with a car ahead", PROVIDER)
    assert hashlib.sha256(v.tobytes()).hexdigest() == (
        "d35e27f149278a1145438f000381d128c09693bbe0634d3ef769f8826cb0926c"
    )


# --- cosine / distance ---

def test_cosine_identity():
    v = embed("driving in the snow", PROVIDER)
    assert cosine(v, v) == pytest.approx(1.0, abs=1e-12)


def test_cosine_orthogonal_one_hots():
    a = np.zeros(8)
    b = np.zeros(8)
    a[1] = 1.0
    b[5] = 1.0
    assert cosine(a, b) == 0.0


def test_cosine_hand_computed():
    a = np.array([1.0, 2.0, 2.0]) / 3.0
    b = np.array([2.0, 1.0, 2.0]) / 3.0
    assert cosine(a, b) == pytest.approx(8.0 / 9.0, abs=1e-9)


def test_cosine_dim_mismatch():
    with pytest.raises(DimMismatch):
        cosine(np.zeros(3), np.zeros(4))


def test_cosine_symmetry_and_bounds_randomized():
    rng = np.random.default_rng(202)
    for _ in range(1000):
        a = rng.normal(size=16)
        a /= np.linalg.norm(a)
        b = rng.normal(size=16)
        b /= np.linalg.norm(b)
        s = cosine(a, b)
        assert cosine(b, a) == s
        assert -1.0 - 1e-9 <= s <= 1.0 + 1e-9


def test_distance_similarity_duality():
    rng = np.random.default_rng(314)
    q = rng.normal(size=32)
    q /= np.linalg.norm(q)
    sims = []
    for _ in range(1000):
        v = rng.normal(size=32)
        v /= np.linalg.norm(v)
        sims.append(cosine(q, v))
    sims = np.asarray(sims)
    dists = np.asarray([distance(s) for s in sims])
    assert np.array_equal(np.argsort(dists), np.argsort(-sims))


# --- index build / persistence ---

def _descriptions(n: int, source: Modality = Modality.SIGNAL) -> list[Description]:
    rng = random.Random(5)
    words = ["snow", "tunnel", "bridge", "rain", "car", "road", "night", "sun"]
    out = []
    for i in range(n):
        text = " ".join(rng.choices(words, k=6))
        pid = 4 if source is Modality.VIDEO else None
        out.append(Description(record=f"{i:06d}", source=source, text=text,
                               prompt_id=pid, generator="t"))
    return out


def test_build_index_cardinality():
    index = build_index(_descriptions(50), Modality.SIGNAL, PROVIDER)
    assert len(index) == 50


def test_build_index_rejects_duplicates():
    descs = _descriptions(2, Modality.VIDEO)
    dup = Description(record=descs[0].record, source=Modality.VIDEO,
                      text="again", prompt_id=4, generator="t")
    with pytest.raises(DuplicateEntry):
        build_index(descs + [dup], Modality.VIDEO, PROVIDER)


def test_build_index_rejects_mixed_sources():
    descs = _descriptions(3, Modality.SIGNAL) + _descriptions(1, Modality.VIDEO)
    with pytest.raises(MixedSource):
        build_index(descs, Modality.SIGNAL, PROVIDER)


def test_index_round_trip(tmp_path):
    index = build_index(_descriptions(50), Modality.SIGNAL, PROVIDER)
    path = tmp_path / "signal.jsonl"
    save_index(index, path)
    loaded = load_index(path, provider=PROVIDER)
    assert loaded.source is index.source
    assert loaded.dim == index.dim
    assert loaded.provider_fingerprint == index.provider_fingerprint
    assert loaded.entries == index.entries


def test_index_save_is_byte_stable(tmp_path):
    index = build_index(_descriptions(120), Modality.SIGNAL, PROVIDER)
    first = tmp_path / "a.jsonl"
    second = tmp_path / "b.jsonl"
    save_index(index, first)
    save_index(load_index(first, provider=PROVIDER), second)
    assert first.read_bytes() == second.read_bytes()


def test_truncated_index_is_corrupt(tmp_path):
    index = build_index(_descriptions(10), Modality.SIGNAL, PROVIDER)
    path = tmp_path / "signal.jsonl"
    save_index(index, path)
    raw = path.read_bytes()
    path.write_bytes(raw[: len(raw) // 2])
    with pytest.raises(CorruptIndex):
        load_index(path, provider=PROVIDER)


def test_fingerprint_mismatch_on_different_dim(tmp_path):
    index = build_index(_descriptions(5), Modality.SIGNAL, HashedBagProvider(dim=384))
    path = tmp_path / "signal.jsonl"
    save_index(index, path)
    with pytest.raises(FingerprintMismatch):
        load_index(path, provider=HashedBagProvider(dim=128))
    # force overrides the rejection
    loaded = load_index(path, provider=HashedBagProvider(dim=128), force=True)
    assert len(loaded) == 5


def test_stored_vectors_are_unit_norm():
    index = build_index(_descriptions(100), Modality.SIGNAL, PROVIDER)
    for entry in index.entries.values():
        assert abs(np.linalg.norm(entry.vector) - 1.0) <= 1e-9


# --- remote provider wire contract ---

class _EmbedHandler(BaseHTTPRequestHandler):
    dim = 8
    status = 200
    last_body: dict | None = None

    def do_POST(self):
        length = int(self.headers.get("Content-Length", 0))
        type(self).last_body = json.loads(self.rfile.read(length))
        texts = type(self).last_body["texts"]
        vectors = [[float(len(t))] + [0.0] * (type(self).dim - 1) for t in texts]
        payload = json.dumps({"vectors": vectors}).encode("utf-8")
        self.send_response(type(self).status)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(payload)))
        self.end_headers()
        self.wfile.write(payload)

    def log_message(self, *args):
        pass


@pytest.fixture()
def embed_server():
    server = HTTPServer(("127.0.0.1", 0), _EmbedHandler)
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    yield f"http://127.0.0.1:{server.server_port}"
    server.shutdown()
    _EmbedHandler.status = 200
    _EmbedHandler.last_body = None


def test_remote_provider_round_trip(embed_server):
    provider = RemoteProvider(embed_server, dim=8)
    vector = embed("some words", provider)
    assert _EmbedHandler.last_body == {"texts": ["some words"]}
    assert vector.shape == (8,)
    assert abs(np.linalg.norm(vector) - 1.0) <= 1e-9


def test_remote_provider_failure(embed_server):
    _EmbedHandler.status = 500
    with pytest.raises(ProviderUnavailable) as info:
        embed("words", RemoteProvider(embed_server, dim=8))
    assert info.value.status == 500


def test_remote_provider_unreachable():
    with pytest.raises(ProviderUnavailable):
        embed("words", RemoteProvider("http://127.0.0.1:1", dim=8))


def test_remote_provider_dim_mismatch_rejected(embed_server):
    with pytest.raises(ProviderUnavailable):
        embed("words", RemoteProvider(embed_server, dim=99))
