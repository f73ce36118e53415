"""Static word vectors: lookup, cosine similarity, GloVe-format loading and skip-gram training."""

from __future__ import annotations

import hashlib
import logging
from collections import Counter
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from . import _kernels

log = logging.getLogger(__name__)


class OOVError(KeyError):
    """Raised when a word has no vector."""


class EmbeddingTable:
    """Case-folded word -> vector table with precomputed unit vectors."""

    def __init__(self, words: Sequence[str], vectors: np.ndarray):
        vectors = np.asarray(vectors, dtype=np.float32)
        if vectors.ndim != 2 or vectors.shape[0] != len(words):
            raise ValueError("vectors must be a (len(words), dim) matrix")
        self.words = [w.lower() for w in words]
        self.index = {w: i for i, w in enumerate(self.words)}
        if len(self.index) != len(self.words):
            raise ValueError("duplicate words after case folding")
        self.vectors = vectors
        norms = np.linalg.norm(vectors, axis=1, keepdims=True)
        self.unit_vectors = vectors / np.where(norms > 0, norms, 1.0)

    @property
    def dim(self) -> int:
        return self.vectors.shape[1]

    def __len__(self) -> int:
        return len(self.words)

    def __contains__(self, word: str) -> bool:
        return word.lower() in self.index

    def unit(self, word: str) -> np.ndarray:
        try:
            return self.unit_vectors[self.index[word.lower()]]
        except KeyError:
            raise OOVError(word) from None

    def cosine(self, a: str, b: str) -> float:
        return float(np.dot(self.unit(a), self.unit(b)))

    def cosines_to(self, words: Iterable[str], target: str) -> np.ndarray:
        """Cosine of each word to ``target``; OOV words get 0."""
        t = self.unit(target)
        return np.array([float(np.dot(self.unit(w), t)) if w in self else 0.0 for w in words])

    def nearest(self, vector: np.ndarray, k: int = 10, exclude: Iterable[str] = ()) -> list[tuple[str, float]]:
        v = np.asarray(vector, dtype=np.float32)
        v = v / (np.linalg.norm(v) or 1.0)
        sims = self.unit_vectors @ v
        banned = {w.lower() for w in exclude}
        out = []
        for i in np.argsort(-sims, kind="stable"):
            w = self.words[i]
            if w in banned:
                continue
            out.append((w, float(sims[i])))
            if len(out) == k:
                break
        return out

    # -- persistence -----------------------------------------------------

    def save(self, path: str | Path) -> None:
        path = Path(path)
        tmp = path.with_name(path.name + ".tmp.npz")
        np.savez_compressed(tmp, words=np.array(self.words), vectors=self.vectors)
        tmp.replace(path)

    @classmethod
    def load(cls, path: str | Path) -> "EmbeddingTable":
        path = Path(path)
        if path.suffix == ".npz":
            data = np.load(path, allow_pickle=False)
            return cls([str(w) for w in data["words"]], data["vectors"])
        return cls.load_glove(path)

    @classmethod
    def load_glove(cls, path: str | Path, limit: int | None = None) -> "EmbeddingTable":
        """Read the whitespace-separated ``word v1 v2 ...`` text format used by GloVe."""
        words, rows, seen = [], [], set()
        with open(path, encoding="utf-8") as fh:
            for line in fh:
                parts = line.rstrip().split(" ")
                if len(parts) < 3:
                    continue
                w = parts[0].lower()
                if w in seen:
                    continue
                seen.add(w)
                words.append(w)
                rows.append(np.asarray(parts[1:], dtype=np.float32))
                if limit and len(words) >= limit:
                    break
        return cls(words, np.vstack(rows))


class HashedEmbeddings:
    """Deterministic pseudo-vectors for any word; a test double with no OOV."""

    def __init__(self, dim: int = 32, salt: str = "pungen"):
        self.dim = dim
        self.salt = salt
        self._cache: dict[str, np.ndarray] = {}

    def __contains__(self, word: str) -> bool:
        return bool(word)

    def unit(self, word: str) -> np.ndarray:
        w = word.lower()
        v = self._cache.get(w)
        if v is None:
            seed = int.from_bytes(hashlib.sha256(f"{self.salt}\x1f{w}".encode()).digest()[:8], "little")
            v = np.random.default_rng(seed).standard_normal(self.dim).astype(np.float32)
            v /= np.linalg.norm(v)
            self._cache[w] = v
        return v

    def cosine(self, a: str, b: str) -> float:
        return float(np.dot(self.unit(a), self.unit(b)))

    def cosines_to(self, words: Iterable[str], target: str) -> np.ndarray:
        t = self.unit(target)
        return np.array([float(np.dot(self.unit(w), t)) for w in words])


def train_skipgram(
    sentences: Iterable[Sequence[str]],
    dim: int = 100,
    window: int = 5,
    negative: int = 5,
    epochs: int = 5,
    min_count: int = 3,
    sample: float = 1e-4,
    lr: float = 0.025,
    min_lr: float = 1e-4,
    batch: int = 16,
    seed: int = 0,
    chunk_tokens: int = 500_000,
) -> EmbeddingTable:
    """Skip-gram with negative sampling (word2vec recipe: dynamic window,
    frequent-word subsampling, unigram^0.75 noise, linear learning-rate decay).

    Deterministic for a fixed seed and kernel variant.
    """
    sentences = [[t.lower() for t in s] for s in sentences]
    counts = Counter(t for s in sentences for t in s)
    vocab = sorted((w for w, c in counts.items() if c >= min_count), key=lambda w: (-counts[w], w))
    if not vocab:
        raise ValueError("empty vocabulary after min_count filtering")
    index = {w: i for i, w in enumerate(vocab)}
    freq = np.array([counts[w] for w in vocab], dtype=np.float64)
    total = freq.sum()

    stream = []
    for s in sentences:
        ids = [index[t] for t in s if t in index]
        if len(ids) > 1:
            stream.extend(ids)
            stream.append(-1)
    tokens_all = np.array(stream, dtype=np.int64)

    rng = np.random.default_rng(seed)
    w_in = ((rng.random((len(vocab), dim), dtype=np.float32) - 0.5) / dim).astype(np.float32)
    w_out = np.zeros((len(vocab), dim), dtype=np.float32)

    noise = freq**0.75
    noise_cdf = np.cumsum(noise / noise.sum())
    if sample > 0:
        f = freq / total
        keep_prob = np.minimum(1.0, (np.sqrt(f / sample) + 1.0) * sample / f)
    else:
        keep_prob = np.ones(len(vocab))

    n_chunks = max(1, int(np.ceil(tokens_all.size / chunk_tokens)))
    total_steps = epochs * n_chunks
    step = 0
    for epoch in range(epochs):
        for chunk in np.array_split(tokens_all, n_chunks):
            keep = (chunk < 0) | (rng.random(chunk.size) < keep_prob[np.maximum(chunk, 0)])
            toks = chunk[keep]
            reduced = rng.integers(1, window + 1, size=toks.size)
            centers, contexts = _kernels.skipgram_pairs(toks, reduced, window)
            if centers.size == 0:
                step += 1
                continue
            negatives = np.searchsorted(noise_cdf, rng.random((centers.size, negative)))
            negatives = np.minimum(negatives, len(vocab) - 1).astype(np.int64)
            n_batches = (centers.size + batch - 1) // batch
            frac0 = step / total_steps
            frac1 = (step + 1) / total_steps
            progress = frac0 + (frac1 - frac0) * np.arange(n_batches) / n_batches
            lrs = np.maximum(min_lr, lr * (1.0 - progress))
            losses = _kernels.sgns_train(w_in, w_out, centers, contexts, negatives, lrs, batch)
            step += 1
            log.debug("epoch %d chunk loss %.4f (%d pairs)", epoch, float(losses.mean()), centers.size)
    return EmbeddingTable(vocab, w_in)


def fingerprint(emb) -> str:
    """Short identity of an embedding table, recorded next to trained classifiers."""
    if isinstance(emb, HashedEmbeddings):
        return f"hashed-{emb.dim}-{emb.salt}"
    h = hashlib.sha256()
    h.update(f"{len(emb)}:{emb.dim}".encode())
    h.update("\n".join(emb.words[:2000]).encode())
    h.update(np.ascontiguousarray(emb.vectors[:: max(1, len(emb) // 512)]).tobytes())
    return h.hexdigest()[:16]


def centered(emb: EmbeddingTable) -> EmbeddingTable:
    """Remove the common mean direction (skip-gram vectors on small corpora share a large one)."""
    return EmbeddingTable(emb.words, emb.vectors - emb.vectors.mean(axis=0, keepdims=True))
