"""Pluggable model backends: language models, token classifiers, lexical services."""

from .base import Candidate, LanguageModel, MaskedQuery

__all__ = ["Candidate", "LanguageModel", "MaskedQuery"]
