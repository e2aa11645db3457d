"""Pertinence scoring: how likely a snippet answers a question.

Questions and contextualized snippets are embedded as unit vectors and
compared by inner product. The built-in provider is a deterministic
bag-of-lemmas model: corpus-frequency weighting, answer text concatenated
with its source paragraph, and a fixed string hash into a 1024-dimension
space, so identical inputs give identical scores on every platform. A
remote HTTP provider can replace it when a neural encoder is available;
its vectors are re-normalized locally and must keep a constant dimension.
"""

from __future__ import annotations

import json
import math
import re
import urllib.request
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

from .errors import EspaceError, ValidationError

_WORD = re.compile(r"[a-z0-9]+")

DEFAULT_DIM = 1024
NORM_TOLERANCE = 1e-6


@dataclass(frozen=True)
class EmbeddingVector:
    values: tuple[float, ...]
    provider_id: str

    @property
    def dim(self) -> int:
        return len(self.values)

    def norm(self) -> float:
        return math.sqrt(sum(v * v for v in self.values))


@dataclass(frozen=True)
class ScoredSnippet:
    """A snippet judged against a question, with its source context."""

    snippet: str
    context: str  # paragraph id
    score: float
    source_triple: str | None


def fnv1a_64(text: str) -> int:
    """FNV-1a over UTF-8 bytes; the stable hash behind the vector space."""
    h = 0xCBF29CE484222325
    for byte in text.encode("utf-8"):
        h ^= byte
        h = (h * 0x100000001B3) & 0xFFFFFFFFFFFFFFFF
    return h


def _normalize(values) -> tuple[float, ...]:
    norm = math.sqrt(sum(v * v for v in values))
    if norm == 0:
        raise ValidationError("cannot normalize a zero vector")
    return tuple(v / norm for v in values)


class LexicalProvider:
    """Deterministic bag-of-lemmas embedding provider.

    ``idf`` carries inverse paragraph frequencies frozen at build time;
    ``lemma_map`` folds surface forms seen in the corpus onto their
    lemmas so questions typed at query time meet the same vocabulary.
    """

    def __init__(self, idf: dict[str, float], lemma_map: dict[str, str],
                 n_paragraphs: int, dim: int = DEFAULT_DIM):
        self.idf = idf
        self.lemma_map = lemma_map
        self.n_paragraphs = n_paragraphs
        self.dim = dim
        self.default_idf = math.log(1.0 + n_paragraphs) + 1.0
        self.provider_id = f"lexical-idf-{dim}"

    @classmethod
    def from_corpus(cls, corpus, dim: int = DEFAULT_DIM) -> "LexicalProvider":
        lemma_counts: dict[str, dict[str, int]] = {}
        par_terms: dict[str, set[str]] = {}
        for doc in corpus.documents:
            for sent in doc.sentences:
                for tok in sent.tokens:
                    surface = tok.surface.lower()
                    lemma = tok.lemma.lower()
                    lemma_counts.setdefault(surface, {}).setdefault(lemma, 0)
                    lemma_counts[surface][lemma] += 1
                    par_terms.setdefault(sent.paragraph_ref, set()).add(lemma)
        lemma_map = {}
        for surface, counts in lemma_counts.items():
            lemma_map[surface] = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))[0][0]
        n = max(len(par_terms), 1)
        df: dict[str, int] = {}
        for terms in par_terms.values():
            for term in terms:
                df[term] = df.get(term, 0) + 1
        idf = {t: math.log((1.0 + n) / (1.0 + c)) + 1.0 for t, c in df.items()}
        return cls(idf=idf, lemma_map=lemma_map, n_paragraphs=n, dim=dim)

    def terms(self, text: str) -> list[str]:
        words = _WORD.findall(text.lower())
        return [self.lemma_map.get(w, w) for w in words]

    def raw_weights(self, text: str, context_text: str = "",
                    kind: str = "answer") -> dict[str, float]:
        """Unhashed term weights; the hashed vector is built from these."""
        source = text
        if kind == "answer" and context_text:
            source = f"{text} {context_text}"
        weights: dict[str, float] = {}
        for term in self.terms(source):
            weights[term] = weights.get(term, 0.0) + self.idf.get(term, self.default_idf)
        return weights

    def embed(self, text: str, context_text: str = "",
              kind: str = "answer") -> EmbeddingVector:
        if not text or not text.strip():
            raise ValidationError("cannot embed empty text")
        weights = self.raw_weights(text, context_text, kind)
        if not weights:
            raise ValidationError(f"no indexable terms in {text!r}")
        values = [0.0] * self.dim
        for term, weight in weights.items():
            values[fnv1a_64(term) % self.dim] += weight
        return EmbeddingVector(values=_normalize(values),
                               provider_id=self.provider_id)

    def to_dict(self) -> dict:
        return {
            "provider_id": self.provider_id,
            "dim": self.dim,
            "n_paragraphs": self.n_paragraphs,
            "idf": {k: self.idf[k] for k in sorted(self.idf)},
            "lemma_map": {k: self.lemma_map[k] for k in sorted(self.lemma_map)},
        }

    @classmethod
    def from_dict(cls, data: dict) -> "LexicalProvider":
        return cls(idf=dict(data["idf"]), lemma_map=dict(data["lemma_map"]),
                   n_paragraphs=data["n_paragraphs"], dim=data["dim"])


def pertinence(q: EmbeddingVector, a: EmbeddingVector) -> float:
    """Inner product of two unit vectors from the same provider."""
    if q.provider_id != a.provider_id:
        raise ValidationError(
            f"provider mismatch: {q.provider_id} vs {a.provider_id}"
        )
    if q.dim != a.dim:
        raise ValidationError(f"dimension mismatch: {q.dim} vs {a.dim}")
    return sum(x * y for x, y in zip(q.values, a.values))


def remote_embed(batch, endpoint: str, kind: str = "answer",
                 timeout: float = 10.0) -> list[EmbeddingVector]:
    """Fetch embeddings from an external provider over HTTP.

    POSTs ``{"texts": [...], "kind": ...}`` and expects
    ``{"vectors": [[...]], "provider_id": ..., "dim": ...}``. Vectors are
    re-normalized here, so providers do not have to return unit norm.
    An empty batch returns immediately without touching the network.
    """
    if not batch:
        return []
    payload = json.dumps({"texts": list(batch), "kind": kind}).encode("utf-8")
    request = urllib.request.Request(
        endpoint, data=payload, headers={"Content-Type": "application/json"}
    )
    try:
        with urllib.request.urlopen(request, timeout=timeout) as response:
            body = json.loads(response.read().decode("utf-8"))
    except OSError as exc:
        raise EspaceError(f"embedding endpoint {endpoint} failed: {exc}") from exc
    vectors = body.get("vectors")
    provider_id = body.get("provider_id", "remote")
    dim = body.get("dim")
    if not isinstance(vectors, list) or len(vectors) != len(batch):
        raise ValidationError(
            f"endpoint returned {len(vectors or [])} vectors for {len(batch)} texts"
        )
    out = []
    for vec in vectors:
        if dim is not None and len(vec) != dim:
            raise ValidationError(
                f"vector dimension {len(vec)} drifts from declared {dim}"
            )
        if out and len(vec) != len(out[0].values):
            raise ValidationError("vector dimensions drift within the batch")
        out.append(EmbeddingVector(values=_normalize(vec), provider_id=provider_id))
    return out


def remote_embed_many(batches, endpoint: str, kind: str = "answer",
                      timeout: float = 10.0, max_in_flight: int = 4):
    """Run several batches concurrently; results keep request order."""
    if not batches:
        return []
    with ThreadPoolExecutor(max_workers=max_in_flight) as pool:
        futures = [
            pool.submit(remote_embed, batch, endpoint, kind, timeout)
            for batch in batches
        ]
        return [f.result() for f in futures]


class RemoteProvider:
    """Embedding provider backed by an external HTTP encoder.

    Drop-in replacement for LexicalProvider wherever ``embed`` is called;
    results are memoized per (text, context, kind) so repeated scoring of
    the same snippet costs one request.
    """

    def __init__(self, endpoint: str, timeout: float = 10.0):
        self.endpoint = endpoint
        self.timeout = timeout
        self._cache: dict[tuple[str, str, str], EmbeddingVector] = {}

    def embed(self, text: str, context_text: str = "",
              kind: str = "answer") -> EmbeddingVector:
        if not text or not text.strip():
            raise ValidationError("cannot embed empty text")
        source = text
        if kind == "answer" and context_text:
            source = f"{text} {context_text}"
        key = (source, "", kind)
        if key not in self._cache:
            (vector,) = remote_embed([source], self.endpoint, kind=kind,
                                     timeout=self.timeout)
            self._cache[key] = vector
        return self._cache[key]

    def to_dict(self) -> dict:
        return {"provider_id": "remote", "endpoint": self.endpoint,
                "timeout": self.timeout}

    @classmethod
    def from_dict(cls, data: dict) -> "RemoteProvider":
        return cls(endpoint=data["endpoint"], timeout=data.get("timeout", 10.0))
