"""Pun generation from a pun-word/alternative-word pair.

Retrieval of a surprise-arousing phrase and a supporting context word,
label-steered decoding, homographic-to-homophonic conversion and humor
metrics (ambiguity, distinctiveness, surprisal ratio).
"""

from .types import PunPair

__all__ = ["PunPair", "__version__"]
__version__ = "0.1.0"
