"""Tokenization, stop words, and the frequency-ranked vocabulary."""

from __future__ import annotations

import csv
import re
from collections import Counter
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Iterable, Sequence

from .errors import DomainError, EmptyVocabularyError

_TOKEN_RE = re.compile(r"[a-z0-9']+")


@dataclass(frozen=True)
class StopWordList:
    """Lowercase tokens excluded from every tokenization."""

    words: frozenset[str]

    def __post_init__(self):
        for w in self.words:
            if w != w.lower() or any(ch.isspace() for ch in w):
                raise DomainError(f"stop word {w!r} must be lowercase with no whitespace")

    def __contains__(self, token: str) -> bool:
        return token in self.words

    def __len__(self) -> int:
        return len(self.words)

    @classmethod
    def empty(cls) -> "StopWordList":
        return cls(frozenset())

    @classmethod
    def from_words(cls, words: Iterable[str]) -> "StopWordList":
        return cls(frozenset(w.lower() for w in words))

    @classmethod
    def from_file(cls, path: str | Path) -> "StopWordList":
        """Load a UTF-8 stop-word file: one word per line, '#' starts a comment."""
        words = []
        for line in Path(path).read_text(encoding="utf-8").splitlines():
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            words.append(line.lower())
        return cls.from_words(words)

    @classmethod
    def default(cls) -> "StopWordList":
        """The bundled list of ~120 common English function words."""
        data = resources.files("mailcat").joinpath("data/stopwords.txt").read_text("utf-8")
        words = [
            line.strip().lower()
            for line in data.splitlines()
            if line.strip() and not line.strip().startswith("#")
        ]
        return cls.from_words(words)


def tokenize(text: str, stop_words: StopWordList) -> list[str]:
    """Lowercase and split text into feature tokens.

    Splits on every character outside [a-z0-9'], strips leading/trailing
    apostrophes (interior ones survive, so "don't" stays whole), drops
    tokens shorter than 2 characters and stop words.  Purely numeric
    tokens are kept.
    """
    out = []
    for raw in _TOKEN_RE.findall(text.lower()):
        token = raw.strip("'")
        if len(token) < 2:
            continue
        if token in stop_words:
            continue
        out.append(token)
    return out


@dataclass(frozen=True)
class Vocabulary:
    """Words ranked 1..size by descending corpus frequency.

    Ties in frequency break toward the lexicographically smaller word, so
    the ranking never depends on document order.
    """

    rank_of: dict[str, int]
    count_of: dict[str, int]

    @property
    def size(self) -> int:
        return len(self.rank_of)

    def words_by_rank(self) -> list[str]:
        return sorted(self.rank_of, key=self.rank_of.__getitem__)

    def __contains__(self, word: str) -> bool:
        return word in self.rank_of


def build_vocabulary(corpus_tokens: Sequence[Sequence[str]]) -> Vocabulary:
    """Aggregate token counts over all documents and assign ranks."""
    counts: Counter[str] = Counter()
    for tokens in corpus_tokens:
        counts.update(tokens)
    if not counts:
        raise EmptyVocabularyError("no tokens to build a vocabulary from")
    ordered = sorted(counts.items(), key=lambda item: (-item[1], item[0]))
    rank_of = {word: rank for rank, (word, _) in enumerate(ordered, start=1)}
    return Vocabulary(rank_of=rank_of, count_of=dict(ordered))


def truncate(vocab: Vocabulary, num_words: int) -> Vocabulary:
    """Keep the min(num_words, size) best-ranked words; ranks stay 1..k."""
    if num_words < 1:
        raise DomainError(f"num_words must be >= 1, got {num_words}")
    if num_words >= vocab.size:
        return vocab
    kept = [w for w in vocab.words_by_rank()[:num_words]]
    return Vocabulary(
        rank_of={w: r for r, w in enumerate(kept, start=1)},
        count_of={w: vocab.count_of[w] for w in kept},
    )


def write_vocabulary_csv(vocab: Vocabulary, path: str | Path) -> None:
    """Export as CSV with columns rank,word,count."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["rank", "word", "count"])
        for word in vocab.words_by_rank():
            writer.writerow([vocab.rank_of[word], word, vocab.count_of[word]])
