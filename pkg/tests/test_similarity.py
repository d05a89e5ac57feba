import json
import math
import re
import threading
from collections import Counter
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

import pytest
from hypothesis import given
from hypothesis import strategies as st

from touchstone.errors import ConfigError, ExternalServiceUnavailable
from touchstone.similarity import (
    DEFAULT_THETA,
    ExternalEmbedder,
    LexicalEmbedder,
    SimilarityConfig,
    cosine,
    make_embedder,
    similarity,
    text_similar,
    trigrams,
)


def brute_cosine(a: str, b: str) -> float:
    """Trigram cosine via explicit vocabulary lists."""
    def grams(s):
        s = re.sub(r"\s+", " ", s.lower())
        return [s] if 0 < len(s) < 3 else [s[i:i + 3] for i in range(len(s) - 2)]
    ga, gb = grams(a), grams(b)
    vocab = sorted(set(ga) | set(gb))
    va = [ga.count(g) for g in vocab]
    vb = [gb.count(g) for g in vocab]
    na, nb = math.hypot(*va) if va else 0, math.hypot(*vb) if vb else 0
    if na == 0 or nb == 0:
        return 0.0
    return min(1.0, sum(x * y for x, y in zip(va, vb)) / (na * nb))


def test_microsoft_excel_vs_excel(oracles):
    got = similarity("Microsoft Excel", "Excel")
    assert got == pytest.approx(oracles["cos_microsoft_excel_vs_excel"], abs=1e-9)
    assert round(got, 4) == 0.4804
    assert text_similar("Microsoft Excel", "Excel") is oracles["excel_vs_excel_matches_at_085"] is False


def test_case_insensitive_identical():
    assert similarity("Microsoft Excel", "microsoft excel") == pytest.approx(1.0)
    assert similarity("Microsoft Excel", "microsoft excel") <= 1.0


def test_trigrams_and_short_strings():
    assert trigrams("") == Counter()
    assert trigrams("Hi") == Counter({"hi": 1})
    assert trigrams("a  b\tC") == Counter({"a b": 1, " b ": 1, "b c": 1})
    assert similarity("", "anything") == 0.0


def test_dense_cosine_clamped():
    assert cosine([1.0, 0.0], [-1.0, 0.0]) == 0.0
    assert cosine([1.0, 1.0], [2.0, 2.0]) == pytest.approx(1.0)
    assert cosine([0.0, 0.0], [1.0, 1.0]) == 0.0
    with pytest.raises(ValueError):
        cosine([1.0], [1.0, 2.0])
    with pytest.raises(TypeError):
        cosine(Counter(a=1), [1.0])


@pytest.mark.parametrize("kwargs", [
    {"backend": "neural"},
    {"theta_screen": 1.5},
    {"theta_textbox": -0.1},
    {"backend": "external"},
])
def test_config_validation(kwargs):
    with pytest.raises(ConfigError):
        SimilarityConfig(**kwargs)


def test_defaults():
    cfg = SimilarityConfig()
    assert cfg.theta_screen == cfg.theta_textbox == DEFAULT_THETA == 0.85
    assert isinstance(make_embedder(cfg), LexicalEmbedder)
    with pytest.raises(ValueError):
        text_similar("a", "b", theta=2)


def test_external_unreachable():
    emb = make_embedder(SimilarityConfig(backend="external", external_endpoint="http://127.0.0.1:9"))
    with pytest.raises(ExternalServiceUnavailable):
        emb.embed("hello")


class _Embed(BaseHTTPRequestHandler):
    calls = 0

    def do_POST(self):
        texts = json.loads(self.rfile.read(int(self.headers["Content-Length"])))["texts"]
        type(self).calls += 1
        vecs = [[float(len(t)), float(t.count("e")), 1.0] for t in texts]
        body = json.dumps({"vectors": vecs}).encode()
        self.send_response(200)
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)

    def log_message(self, *args):
        pass


def test_external_embedder_round_trip_and_cache():
    server = ThreadingHTTPServer(("127.0.0.1", 0), _Embed)
    threading.Thread(target=server.serve_forever, daemon=True).start()
    try:
        emb = ExternalEmbedder(f"http://127.0.0.1:{server.server_port}")
        v = emb.embed("excel")
        assert v == [5.0, 2.0, 1.0]
        emb.embed("excel")
        assert _Embed.calls == 1
        assert similarity("excel", "excel", emb) == pytest.approx(1.0)
    finally:
        server.shutdown()
        server.server_close()


printable = st.text(st.characters(min_codepoint=32, max_codepoint=126), max_size=24)


@given(printable, printable)
def test_lexical_matches_brute_force(a, b):
    assert similarity(a, b) == pytest.approx(brute_cosine(a, b), abs=1e-9)


def test_whitespace_is_collapsed_not_stripped():
    assert similarity("a  b", "a b") == pytest.approx(1.0)
    assert similarity(" a", "a") == 0.0


@given(printable, printable)
def test_symmetric_and_bounded(a, b):
    s = similarity(a, b)
    assert 0.0 <= s <= 1.0
    assert s == pytest.approx(similarity(b, a))


@given(printable.filter(str.strip))
def test_self_similarity_is_one(a):
    assert similarity(a, a) == pytest.approx(1.0)
    assert similarity(a, a.upper()) == pytest.approx(1.0)
