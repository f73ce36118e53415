"""Data types shared across modules."""

from __future__ import annotations

from dataclasses import dataclass

LABELS = ("A", "D1", "D2")


@dataclass(frozen=True)
class PunPair:
    """A pun word and its alternative.

    Homographic tasks use one surface word for both ``pw`` and ``aw`` and
    carry the substitute pair used for steering, labeling and metrics.
    """

    pw: str
    aw: str
    substitutes: tuple[str, str] | None = None
    senses: tuple[str, str] | None = None

    def __post_init__(self):
        if not self.pw or not self.aw or any(ch.isspace() for ch in self.pw + self.aw):
            raise ValueError(f"pun pair words must be single non-empty words: {self.pw!r}, {self.aw!r}")
        if self.substitutes is None and self.pw.lower() == self.aw.lower():
            raise ValueError("homophonic pair needs two different words; pass substitutes for homographic puns")

    @property
    def homographic(self) -> bool:
        return self.substitutes is not None

    @property
    def steer_pw(self) -> str:
        """Word whose meaning stands for the pun-word side."""
        return self.substitutes[0] if self.substitutes else self.pw

    @property
    def steer_aw(self) -> str:
        return self.substitutes[1] if self.substitutes else self.aw

    def swapped(self) -> "PunPair":
        subs = (self.substitutes[1], self.substitutes[0]) if self.substitutes else None
        senses = (self.senses[1], self.senses[0]) if self.senses else None
        return PunPair(self.aw, self.pw, subs, senses)

    def to_dict(self) -> dict:
        d = {"pw": self.pw, "aw": self.aw}
        if self.substitutes:
            d["substitutes"] = list(self.substitutes)
        if self.senses:
            d["senses"] = list(self.senses)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "PunPair":
        subs = tuple(d["substitutes"]) if d.get("substitutes") else None
        senses = tuple(d["senses"]) if d.get("senses") else None
        return cls(d["pw"], d["aw"], subs, senses)


SOURCES = ("unsupervised", "classifier", "human")


@dataclass(frozen=True)
class LabeledExample:
    """A word position in a pun sentence with its token type.

    ``prefix`` is the sentence up to but excluding ``tw``.
    """

    prefix: tuple[str, ...]
    tw: str
    pair: PunPair
    label: str
    source: str = "unsupervised"
    gap: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "prefix", tuple(self.prefix))
        if self.label not in LABELS:
            raise ValueError(f"label must be one of {LABELS}, got {self.label!r}")
        if self.source not in SOURCES:
            raise ValueError(f"source must be one of {SOURCES}, got {self.source!r}")

    @property
    def key(self) -> tuple:
        return (self.prefix, self.tw.lower(), self.pair.pw.lower(), self.pair.aw.lower())

    def to_dict(self) -> dict:
        d = {
            "prefix": " ".join(self.prefix),
            "tw": self.tw,
            "pw": self.pair.pw,
            "aw": self.pair.aw,
            "label": self.label,
            "source": self.source,
        }
        if self.pair.substitutes:
            d["substitutes"] = list(self.pair.substitutes)
        if self.gap is not None:
            d["gap"] = round(self.gap, 6)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "LabeledExample":
        pair = PunPair(d["pw"], d["aw"], tuple(d["substitutes"]) if d.get("substitutes") else None)
        prefix = tuple(d["prefix"].split()) if isinstance(d["prefix"], str) else tuple(d["prefix"])
        return cls(prefix, d["tw"], pair, d["label"], d.get("source", "unsupervised"), d.get("gap"))
