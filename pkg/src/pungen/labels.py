"""Token-type labels (A / D1 / D2): the similarity-gap heuristic, dataset curation,
and the confidence-gated next-type predictor."""

from __future__ import annotations

import json
from collections import Counter
from pathlib import Path
from typing import Callable, Iterable, Sequence

import numpy as np

from .backends import classifier as clf
from .embeddings import OOVError
from .text import is_content_word, is_word, tokenize
from .types import LABELS, LabeledExample, PunPair


def similarity_gap(tw: str, pair: PunPair, emb) -> float:
    """cos(tw, pw) - cos(tw, aw); homographic pairs use their substitutes."""
    for w in (tw, pair.steer_pw, pair.steer_aw):
        if w not in emb:
            raise OOVError(w)
    return emb.cosine(tw, pair.steer_pw) - emb.cosine(tw, pair.steer_aw)


def gap_label(gap: float, t: float) -> str:
    if abs(gap) > t:
        return "D1" if gap > 0 else "D2"
    return "A"


def _labelable(tw: str, emb) -> bool:
    return is_content_word(tw) and tw in emb


def unsupervised_label(tw: str, pair: PunPair, emb, t: float = 0.15) -> str:
    """Stopwords, punctuation and out-of-vocabulary words are A."""
    if not _labelable(tw, emb):
        return "A"
    try:
        return gap_label(similarity_gap(tw, pair, emb), t)
    except OOVError:
        return "A"


def grid_accuracies(annotated: Sequence[LabeledExample], emb, grid: Sequence[float]) -> list[float]:
    gold = [ex.label for ex in annotated]
    out = []
    for t in grid:
        pred = [unsupervised_label(ex.tw, ex.pair, emb, t) for ex in annotated]
        out.append(sum(p == g for p, g in zip(pred, gold)) / len(gold))
    return out


def grid_search_threshold(annotated: Sequence[LabeledExample], emb, grid: Sequence[float]) -> float:
    """Threshold with the best token-level accuracy; ties go to the smaller threshold."""
    if not grid:
        raise ValueError("empty grid")
    if len({ex.label for ex in annotated}) < 2:
        raise ValueError("annotated set needs at least two classes")
    acc = grid_accuracies(annotated, emb, grid)
    best = max(acc)
    return min(t for t, a in zip(grid, acc) if a == best)


def _tokens(sentence: str | Sequence[str]) -> list[str]:
    return tokenize(sentence) if isinstance(sentence, str) else list(sentence)


def curate_classifier_dataset(
    records: Iterable[tuple[str | Sequence[str], PunPair]], emb, t: float = 0.15
) -> list[LabeledExample]:
    """Auto-labelled training data for the current-word classifier.

    Gap above ``1.5 t`` gives D1/D2, below ``t`` gives A, and the band in
    between is left out. Words without a usable vector count as A.
    """
    out = []
    for sentence, pair in records:
        toks = _tokens(sentence)
        for i, tw in enumerate(toks):
            if not is_word(tw):
                continue
            prefix = tuple(toks[:i])
            if not _labelable(tw, emb):
                out.append(LabeledExample(prefix, tw, pair, "A"))
                continue
            try:
                gap = similarity_gap(tw, pair, emb)
            except OOVError:
                out.append(LabeledExample(prefix, tw, pair, "A"))
                continue
            if abs(gap) > 1.5 * t:
                out.append(LabeledExample(prefix, tw, pair, "D1" if gap > 0 else "D2", gap=gap))
            elif abs(gap) < t:
                out.append(LabeledExample(prefix, tw, pair, "A", gap=gap))
    return out


LabelFn = Callable[[Sequence[str], str, PunPair], str]


def build_predictor_dataset(
    classifier: clf.ClassifierHandle | LabelFn,
    auto: Sequence[LabeledExample],
    human: Sequence[LabeledExample],
    emb=None,
) -> list[LabeledExample]:
    """Auto examples the classifier agrees with, plus every human example.

    Human labels take precedence over any automatic example at the same position.
    """
    if isinstance(classifier, clf.ClassifierHandle):
        model = clf.load(classifier, emb)

        def label_fn(prefix, tw, pair):
            return model.predict(emb, prefix, pair, tw)[0]
    else:
        label_fn = classifier
    for ex in human:
        if ex.source != "human":
            raise ValueError("human examples must carry source='human'")
    human_keys = {ex.key for ex in human}
    out = []
    for ex in auto:
        if ex.key in human_keys:
            continue
        if label_fn(ex.prefix, ex.tw, ex.pair) == ex.label:
            out.append(LabeledExample(ex.prefix, ex.tw, ex.pair, ex.label, "classifier", ex.gap))
    return out + list(human)


class LabelPredictor:
    """Next-word type predictor with a confidence gate: steer only when confidence > threshold."""

    def __init__(self, handle: clf.ClassifierHandle | str | Path, emb, threshold: float = 0.9):
        if not 0.0 <= threshold <= 1.0:
            raise ValueError("threshold must be in [0, 1]")
        self.model = clf.load(handle, emb)
        if self.model.mode != "next":
            raise ValueError("predictor needs a classifier trained in 'next' mode")
        self.emb = emb
        self.threshold = threshold

    def distribution(self, prefix: Sequence[str], pair: PunPair) -> np.ndarray:
        return self.model.distribution(self.emb, prefix, pair)

    def predict(self, prefix: Sequence[str], pair: PunPair) -> tuple[str, float]:
        return self.model.predict(self.emb, prefix, pair)

    def predict_next_type(self, prefix: Sequence[str], pair: PunPair) -> tuple[str, float, bool]:
        label, conf = self.predict(prefix, pair)
        return label, conf, conf > self.threshold


def predict_next_type(predictor, prefix: Sequence[str], pair: PunPair) -> tuple[str, float, bool]:
    return predictor.predict_next_type(prefix, pair)


# -- evaluation -------------------------------------------------------------


def per_category_f1(gold: Sequence[str], pred: Sequence[str]) -> dict[str, float]:
    out = {}
    for lab in LABELS:
        tp = sum(g == lab and p == lab for g, p in zip(gold, pred))
        fp = sum(g != lab and p == lab for g, p in zip(gold, pred))
        fn = sum(g == lab and p != lab for g, p in zip(gold, pred))
        out[lab] = 2 * tp / (2 * tp + fp + fn) if tp else 0.0
    return out


def macro_f1(gold: Sequence[str], pred: Sequence[str]) -> float:
    """Mean of the per-label F1 over labels present in gold or predictions."""
    present = [lab for lab in LABELS if lab in set(gold) | set(pred)]
    f1 = per_category_f1(gold, pred)
    return float(np.mean([f1[lab] for lab in present])) if present else 0.0


def confident_subset(confidences: Sequence[float], threshold: float | None = None, max_drop: float = 0.1) -> np.ndarray:
    """Indices kept after confidence filtering.

    With ``threshold`` keep ``conf > threshold``; otherwise drop the lowest
    ``max_drop`` fraction (stable on ties).
    """
    conf = np.asarray(confidences, dtype=np.float64)
    if threshold is not None:
        return np.flatnonzero(conf > threshold)
    n_drop = int(np.floor(max_drop * conf.size))
    order = np.argsort(conf, kind="stable")
    return np.sort(order[n_drop:])


def label_fractions(labels: Iterable[str]) -> dict[str, float]:
    c = Counter(labels)
    n = sum(c.values())
    return {lab: (c[lab] / n if n else 0.0) for lab in LABELS}


def label_sentence(sentence: str | Sequence[str], pair: PunPair, labeler: LabelFn) -> list[tuple[str, str]]:
    """(word, label) for every word token."""
    toks = _tokens(sentence)
    return [(tw, labeler(toks[:i], tw, pair)) for i, tw in enumerate(toks) if is_word(tw)]


# -- JSONL -----------------------------------------------------------------


def write_examples(path: str | Path, examples: Iterable[LabeledExample]) -> None:
    from .io import atomic_write_lines

    atomic_write_lines(path, (json.dumps(ex.to_dict(), sort_keys=True) for ex in examples))


def read_examples(path: str | Path, source: str | None = None) -> list[LabeledExample]:
    out = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if line.strip() and not line.startswith("#"):
            d = json.loads(line)
            if source is not None:
                d["source"] = source
            out.append(LabeledExample.from_dict(d))
    return out
