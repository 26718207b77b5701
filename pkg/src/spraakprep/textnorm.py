"""Dutch transcript normalization and caseless word error rate.

Normalized text uses exactly 28 symbols: the lowercase letters a-z, the
apostrophe, and the space. Everything else is folded onto that alphabet
(diacritics stripped) or replaced with a space (digits, punctuation,
hyphens included).
"""

from __future__ import annotations

import functools
import re
import unicodedata
from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import EmptyReferenceError

ALPHABET = frozenset("abcdefghijklmnopqrstuvwxyz' ")

# Letters NFKD cannot reduce to a-z. Folding targets follow common
# romanization; anything not listed here falls back to a space and is
# counted in NormalizeStats.unmapped.
_LETTER_FOLD = {
    "æ": "ae",  # ae ligature
    "œ": "oe",  # oe ligature
    "ø": "o",
    "ð": "d",  # eth
    "þ": "th",  # thorn
    "đ": "d",  # d with stroke
    "ħ": "h",  # h with stroke
    "ı": "i",  # dotless i
    "ĸ": "k",  # kra
    "ł": "l",  # l with stroke
    "ŋ": "ng",  # eng
    "ŧ": "t",  # t with stroke
}

# Right single quote and modifier apostrophes act as apostrophes in
# Dutch contractions ('s ochtends); other quote marks become spaces.
_APOSTROPHES = {"’", "ʼ", "ʻ"}

_VOCAB_RE = re.compile(r"[a-z']+( [a-z']+)*")


@dataclass
class NormalizeStats:
    """Unmappable letters seen while normalizing (replaced by spaces)."""

    unmapped: Counter = field(default_factory=Counter)


@functools.lru_cache(maxsize=4096)
def _fold_char(ch: str) -> str | None:
    """Map one casefolded, NFKD-decomposed character; None = unmapped letter."""
    if "a" <= ch <= "z" or ch == "'":
        return ch
    if ch in _APOSTROPHES:
        return "'"
    if ch in _LETTER_FOLD:
        return _LETTER_FOLD[ch]
    cat = unicodedata.category(ch)
    if cat == "Mn":  # combining mark left over from NFKD
        return ""
    if cat.startswith("L"):
        return None
    return " "


def normalize(text: str) -> str:
    """Fold arbitrary text onto the 28-symbol alphabet."""
    return normalize_with_stats(text)[0]


def normalize_with_stats(text: str) -> tuple[str, NormalizeStats]:
    """Like normalize, also reporting letters that had no mapping."""
    stats = NormalizeStats()
    decomposed = unicodedata.normalize("NFKD", text.casefold())
    parts = []
    for ch in decomposed:
        mapped = _fold_char(ch)
        if mapped is None:
            stats.unmapped[ch] += 1
            parts.append(" ")
        else:
            parts.append(mapped)
    return " ".join("".join(parts).split()), stats


def validate_vocab(text: str) -> bool:
    """True iff text is already in normalized form."""
    if text == "":
        return True
    return _VOCAB_RE.fullmatch(text) is not None


@dataclass(frozen=True)
class WerBreakdown:
    substitutions: int
    deletions: int
    insertions: int
    ref_words: int

    @property
    def errors(self) -> int:
        return self.substitutions + self.deletions + self.insertions

    @property
    def wer(self) -> float:
        return self.errors / self.ref_words

    def to_dict(self) -> dict:
        return {
            "substitutions": self.substitutions,
            "deletions": self.deletions,
            "insertions": self.insertions,
            "ref_words": self.ref_words,
            "wer": self.wer,
        }


def wer(reference: str, hypothesis: str) -> WerBreakdown:
    """Caseless word error rate after normalizing both sides.

    Alignment is a minimum edit distance over words; ties prefer
    substitution, then deletion, then insertion.
    """
    ref_norm = normalize(reference)
    if not ref_norm:
        raise EmptyReferenceError("reference normalizes to the empty string")
    hyp_norm = normalize(hypothesis)
    ref_words = ref_norm.split(" ")
    hyp_words = hyp_norm.split(" ") if hyp_norm else []
    ids: dict[str, int] = {}
    ref_ids = np.fromiter((ids.setdefault(w, len(ids)) for w in ref_words), dtype=np.int32)
    hyp_ids = np.fromiter(
        (ids.setdefault(w, len(ids)) for w in hyp_words), dtype=np.int32, count=len(hyp_words)
    )
    subs, dels, ins = kernels.levenshtein_counts(ref_ids, hyp_ids)
    return WerBreakdown(
        substitutions=subs, deletions=dels, insertions=ins, ref_words=len(ref_words)
    )
