"""Tokenization, sentence segmentation and the shipped stopword list."""

from __future__ import annotations

import re
from functools import lru_cache
from importlib import resources

_TOKEN_RE = re.compile(r"(?:[A-Za-z]\.){2,}|[A-Za-z0-9]+(?:['’\-][A-Za-z0-9]+)*|[^\sA-Za-z0-9]")
_WORD_RE = re.compile(r"^[A-Za-z0-9]")

TERMINALS = frozenset({".", "!", "?"})
EOS_TOKENS = frozenset({".", "!", "?", "</s>"})
# Punctuation that closes a phrase window in addition to sentence boundaries.
CLAUSE_BREAKS = frozenset({".", "!", "?", ",", ";", ":", '"', "(", ")", "“", "”", "—", "–"})

ABBREVIATIONS = frozenset(
    {
        "dr", "mr", "mrs", "ms", "prof", "st", "jr", "sr", "vs", "etc", "inc",
        "ltd", "co", "mt", "no", "fig", "gen", "gov", "sen", "rep", "rev",
        "capt", "col", "lt", "sgt", "jan", "feb", "mar", "apr", "jun", "jul",
        "aug", "sep", "sept", "oct", "nov", "dec", "e.g", "i.e", "u.s", "approx",
    }
)


@lru_cache(maxsize=None)
def _load_list(name: str) -> tuple[str, ...]:
    text = resources.files("pungen").joinpath("data").joinpath(name).read_text(encoding="utf-8")
    return tuple(line.strip() for line in text.splitlines() if line.strip() and not line.startswith("#"))


def stopwords() -> frozenset[str]:
    return frozenset(_load_list("stopwords_en.txt"))


STOPWORDS = stopwords()


def tokenize(text: str) -> list[str]:
    """Split text into word tokens (keeping internal apostrophes/hyphens) and single punctuation marks.

    Initialisms ("U.S.") and known abbreviations ("Dr.") keep their period
    unless it is the last token.
    """
    toks = _TOKEN_RE.findall(text)
    out: list[str] = []
    i = 0
    while i < len(toks):
        t = toks[i]
        if i + 2 < len(toks) and toks[i + 1] == "." and t.lower() in ABBREVIATIONS:
            out.append(t + ".")
            i += 2
            continue
        out.append(t)
        i += 1
    return out


def is_word(token: str) -> bool:
    return bool(_WORD_RE.match(token))


def is_content_word(token: str) -> bool:
    return token.isalpha() and token.lower() not in STOPWORDS


def detokenize(tokens: list[str] | tuple[str, ...]) -> str:
    out: list[str] = []
    for tok in tokens:
        if out and not is_word(tok) and tok not in {"(", "“", '"'}:
            out[-1] += tok
        else:
            out.append(tok)
    return " ".join(out)


def _split_document(text: str) -> list[str]:
    sentences: list[str] = []
    for block in re.split(r"\n\s*\n", text):
        block = " ".join(block.split())
        if not block:
            continue
        start = 0
        for m in re.finditer(r"[.!?]+[\"'”)]*(?=\s+|$)", block):
            end = m.end()
            before = block[start:m.start()]
            last = before.split()[-1] if before.split() else ""
            core = last.lower().strip("\"'“(")
            if m.group().startswith(".") and len(m.group().rstrip("\"'”)")) == 1:
                # abbreviation guard: "Dr." or initials such as "J."
                if core in ABBREVIATIONS or (len(core) == 1 and core.isalpha() and last[:1].isupper()):
                    continue
            rest = block[end:].lstrip()
            if rest and not (rest[0].isupper() or rest[0].isdigit() or rest[0] in "\"'“("):
                continue
            sentences.append(block[start:end].strip())
            start = end
        tail = block[start:].strip()
        if tail:
            sentences.append(tail)
    return sentences


def _looks_line_per_sentence(text: str) -> bool:
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    if len(lines) < 2:
        return False
    single = sum(1 for ln in lines if len(_split_document(ln)) == 1)
    if single < 0.95 * len(lines):
        return False
    terminal_end = sum(1 for ln in lines if ln.rstrip("\"'”)")[-1:] in TERMINALS)
    any_terminal = any(ch in TERMINALS for ln in lines for ch in ln)
    return terminal_end >= 0.5 * len(lines) or not any_terminal


def split_sentences(text: str) -> list[str]:
    """Rule-based segmentation.

    One-sentence-per-line input is detected by newline density; otherwise
    sentences end at terminal punctuation followed by an upper-case start,
    with guards for common abbreviations and initials. Blank lines are
    always boundaries.
    """
    if _looks_line_per_sentence(text):
        return [" ".join(ln.split()) for ln in text.splitlines() if ln.strip()]
    return _split_document(text)


def word_sequence(tokens) -> list[str]:
    """Lower-cased word tokens, punctuation dropped."""
    return [t.lower() for t in tokens if is_word(t)]


def phrase_progress(generated, phrase) -> int:
    """How many leading phrase words end the generated text.

    Matching is case-insensitive and ignores punctuation. Returns the full
    phrase length if the phrase already occurs anywhere, else the longest
    phrase prefix that is a suffix of the generated words (0 if none).
    """
    gen, ph = word_sequence(generated), word_sequence(phrase)
    if not ph:
        return 0
    n = len(ph)
    if any(gen[i:i + n] == ph for i in range(len(gen) - n + 1)):
        return n
    for k in range(min(n - 1, len(gen)), 0, -1):
        if gen[-k:] == ph[:k]:
            return k
    return 0
