"""Three-way token-type classifiers over static word vectors.

Two modes share one implementation:

``current``
    type of a word already in the sentence, given the prefix before it, the
    word itself and the pun pair;
``next``
    type of the word that will come next, given only the prefix and the pair.

A trained model is a directory holding ``manifest.json`` (label order, mode,
feature layout, fingerprint of the vectors it was trained with) and
``weights.npz``. Fitting uses scikit-learn; inference is plain numpy.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from ..embeddings import fingerprint
from ..io import atomic_write_text
from ..text import is_content_word
from ..types import LABELS, LabeledExample, PunPair

MODES = ("current", "next")
FORMAT_VERSION = 1


class DegenerateDatasetError(ValueError):
    """Training data that cannot produce a useful classifier."""


class StaleHandleError(RuntimeError):
    """Handle points nowhere, or at a model trained with different vectors."""


@dataclass(frozen=True)
class ClassifierHandle:
    path: str
    mode: str
    labels: tuple[str, ...] = LABELS
    fingerprint: str = ""


def _unit(emb, word: str | None, dim: int) -> tuple[np.ndarray, bool]:
    if word and word in emb:
        return np.asarray(emb.unit(word), dtype=np.float64), True
    return np.zeros(dim), False


def _prefix_vectors(emb, prefix: Sequence[str], dim: int) -> tuple[np.ndarray, np.ndarray]:
    content = [w for w in prefix if is_content_word(w) and w in emb]
    if not content:
        return np.zeros(dim), np.zeros(dim)
    vecs = np.array([emb.unit(w) for w in content], dtype=np.float64)
    return vecs.mean(axis=0), vecs[-1]


def features(mode: str, emb, prefix: Sequence[str], pair: PunPair, word: str | None = None) -> np.ndarray:
    dim = emb.dim
    p, _ = _unit(emb, pair.steer_pw, dim)
    a, _ = _unit(emb, pair.steer_aw, dim)
    mean, last = _prefix_vectors(emb, prefix, dim)
    diff = p - a
    ctx = [mean @ p, mean @ a, mean @ diff, last @ p, last @ a, last @ diff]
    if mode == "current":
        t, known = _unit(emb, word, dim)
        cp, ca = t @ p, t @ a
        scalars = [cp, ca, cp - ca, abs(cp - ca), float(known), float(bool(word) and is_content_word(word)), *ctx]
        return np.concatenate([scalars, t * diff])
    if mode == "next":
        lowered = {w.lower() for w in prefix}
        scalars = [*ctx, float(pair.pw.lower() in lowered), min(len(prefix), 50) / 50.0,
                   float(bool(prefix) and not is_content_word(prefix[-1]))]
        return np.concatenate([scalars, mean * diff, last * diff])
    raise ValueError(f"mode must be one of {MODES}")


def example_features(mode: str, emb, ex: LabeledExample) -> np.ndarray:
    return features(mode, emb, ex.prefix, ex.pair, ex.tw if mode == "current" else None)


class TokenClassifier:
    """Multinomial logistic regression on standardized features."""

    def __init__(self, mode: str, mean, scale, coef, intercept, fp: str):
        self.mode = mode
        self.mean = np.asarray(mean, dtype=np.float64)
        self.scale = np.asarray(scale, dtype=np.float64)
        self.coef = np.asarray(coef, dtype=np.float64)
        self.intercept = np.asarray(intercept, dtype=np.float64)
        self.fingerprint = fp

    def distribution_from_features(self, x: np.ndarray) -> np.ndarray:
        z = ((np.atleast_2d(x) - self.mean) / self.scale) @ self.coef.T + self.intercept
        z = z - z.max(axis=1, keepdims=True)
        e = np.exp(z)
        return e / e.sum(axis=1, keepdims=True)

    def distribution(self, emb, prefix: Sequence[str], pair: PunPair, word: str | None = None) -> np.ndarray:
        return self.distribution_from_features(features(self.mode, emb, prefix, pair, word))[0]

    def predict(self, emb, prefix: Sequence[str], pair: PunPair, word: str | None = None) -> tuple[str, float]:
        d = self.distribution(emb, prefix, pair, word)
        k = int(np.argmax(d))
        return LABELS[k], float(d[k])

    def save(self, path: str | Path, meta: dict | None = None) -> ClassifierHandle:
        path = Path(path)
        path.mkdir(parents=True, exist_ok=True)
        np.savez(path / "weights.npz", mean=self.mean, scale=self.scale, coef=self.coef, intercept=self.intercept)
        manifest = {
            "format": FORMAT_VERSION,
            "labels": list(LABELS),
            "mode": self.mode,
            "n_features": int(self.mean.size),
            "embedding_fingerprint": self.fingerprint,
            **(meta or {}),
        }
        atomic_write_text(path / "manifest.json", json.dumps(manifest, indent=2, sort_keys=True))
        return ClassifierHandle(str(path), self.mode, LABELS, self.fingerprint)


def train_token_classifier(
    dataset: Sequence[LabeledExample],
    emb,
    out_dir: str | Path,
    mode: str = "current",
    c: float = 1.0,
    meta: dict | None = None,
) -> ClassifierHandle:
    from sklearn.linear_model import LogisticRegression
    from sklearn.preprocessing import StandardScaler

    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}")
    if not dataset:
        raise DegenerateDatasetError("empty training set")
    y = np.array([LABELS.index(ex.label) for ex in dataset])
    if np.unique(y).size < 2:
        raise DegenerateDatasetError(f"training set has a single class ({dataset[0].label}); refusing to train")
    X = np.vstack([example_features(mode, emb, ex) for ex in dataset])
    scaler = StandardScaler().fit(X)
    scale = np.where(scaler.scale_ > 0, scaler.scale_, 1.0)
    model = LogisticRegression(C=c, max_iter=2000)
    model.fit((X - scaler.mean_) / scale, y)
    # expand to all three labels; a label absent from training gets zero probability
    coef = np.zeros((len(LABELS), X.shape[1]))
    intercept = np.full(len(LABELS), -1e9)
    if len(model.classes_) == 2:
        lo, hi = (int(k) for k in model.classes_)
        coef[hi], intercept[hi] = model.coef_[0], model.intercept_[0]
        intercept[lo] = 0.0
    else:
        for row, k in enumerate(model.classes_):
            coef[int(k)], intercept[int(k)] = model.coef_[row], model.intercept_[row]
    clf = TokenClassifier(mode, scaler.mean_, scale, coef, intercept, fingerprint(emb))
    return clf.save(out_dir, meta)


_LOADED: dict[tuple[str, float], TokenClassifier] = {}


def open_handle(path: str | Path) -> ClassifierHandle:
    manifest_path = Path(path) / "manifest.json"
    if not manifest_path.exists():
        raise StaleHandleError(f"no classifier at {path}")
    m = json.loads(manifest_path.read_text())
    if tuple(m.get("labels", ())) != LABELS:
        raise StaleHandleError(f"label order {m.get('labels')} does not match {list(LABELS)}")
    return ClassifierHandle(str(path), m["mode"], LABELS, m["embedding_fingerprint"])


def load(handle: ClassifierHandle | str | Path, emb) -> TokenClassifier:
    if not isinstance(handle, ClassifierHandle):
        handle = open_handle(handle)
    path = Path(handle.path)
    manifest_path = path / "manifest.json"
    if not manifest_path.exists():
        raise StaleHandleError(f"no classifier at {path}")
    key = (str(path.resolve()), manifest_path.stat().st_mtime)
    clf = _LOADED.get(key)
    if clf is None:
        m = json.loads(manifest_path.read_text())
        w = np.load(path / "weights.npz")
        clf = TokenClassifier(m["mode"], w["mean"], w["scale"], w["coef"], w["intercept"], m["embedding_fingerprint"])
        _LOADED[key] = clf
    fp = fingerprint(emb)
    if clf.fingerprint != fp:
        raise StaleHandleError(f"classifier at {path} was trained with vectors {clf.fingerprint}, got {fp}")
    return clf


def classify(
    handle: ClassifierHandle, emb, prefix: Sequence[str], pair: PunPair, word: str | None = None
) -> tuple[str, float]:
    """Label and confidence (the largest of the three probabilities)."""
    return load(handle, emb).predict(emb, prefix, pair, word)
