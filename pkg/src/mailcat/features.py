"""Document-term matrices, label encoding, and chi-square feature selection."""

from __future__ import annotations

import csv
import math
from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from .errors import DomainError, ShapeError, UnknownLabelError
from .matrix import Matrix
from .text import Vocabulary

WEIGHTING_MODES = ("binary", "count", "freq", "tfidf")


@dataclass(frozen=True)
class DocTermMatrix:
    """Sparse documents x features matrix under one weighting mode.

    Column j corresponds to feature_words[j]; only nonzero entries are
    stored, keyed by (row, col).
    """

    rows: int
    cols: int
    entries: dict[tuple[int, int], float]
    mode: str
    feature_words: tuple[str, ...]

    def dense(self) -> Matrix:
        out = Matrix(self.rows, self.cols)
        data, n = out.data, self.cols
        for (i, j), value in self.entries.items():
            data[i * n + j] = value
        return out

    def dense_rows(self, row_indices: Sequence[int]) -> Matrix:
        """Dense matrix of the selected rows, in the order given."""
        out = Matrix(len(row_indices), self.cols)
        position = {row: k for k, row in enumerate(row_indices)}
        data, n = out.data, self.cols
        for (i, j), value in self.entries.items():
            k = position.get(i)
            if k is not None:
                data[k * n + j] = value
        return out

    def row_values(self, i: int) -> list[float]:
        values = [0.0] * self.cols
        for (r, c), v in self.entries.items():
            if r == i:
                values[c] = v
        return values


@dataclass(frozen=True)
class LabelMatrix:
    """One-hot label encoding: row i has a single 1 at column indices[i]."""

    class_names: tuple[str, ...]
    indices: tuple[int, ...]

    @property
    def rows(self) -> int:
        return len(self.indices)

    @property
    def cols(self) -> int:
        return len(self.class_names)

    def entry(self, i: int, c: int) -> float:
        return 1.0 if self.indices[i] == c else 0.0

    def dense(self) -> Matrix:
        out = Matrix(self.rows, self.cols)
        for i, idx in enumerate(self.indices):
            out.data[i * self.cols + idx] = 1.0
        return out

    def class_counts(self) -> list[int]:
        counts = [0] * self.cols
        for idx in self.indices:
            counts[idx] += 1
        return counts


@dataclass(frozen=True)
class FeatureScore:
    word: str
    score: float


def vectorize(
    corpus_tokens: Sequence[Sequence[str]], vocab: Vocabulary, mode: str = "count"
) -> DocTermMatrix:
    """Turn tokenized documents into a documents x vocabulary matrix.

    Modes: binary (1 if present), count (occurrences), freq (occurrences
    over the document's in-vocabulary token total), tfidf
    (count * ln((1+N)/(1+df)) with N documents and df the number of
    documents containing the word).
    """
    if mode not in WEIGHTING_MODES:
        raise DomainError(f"unknown weighting mode {mode!r}; expected one of {WEIGHTING_MODES}")
    if vocab.size == 0:
        raise DomainError("vocabulary is empty")
    feature_words = tuple(vocab.words_by_rank())
    col_of = {word: j for j, word in enumerate(feature_words)}
    n_docs = len(corpus_tokens)

    doc_counts: list[dict[int, int]] = []
    for tokens in corpus_tokens:
        counts: dict[int, int] = {}
        for token in tokens:
            j = col_of.get(token)
            if j is not None:
                counts[j] = counts.get(j, 0) + 1
        doc_counts.append(counts)

    entries: dict[tuple[int, int], float] = {}
    if mode == "tfidf":
        df = Counter()
        for counts in doc_counts:
            df.update(counts.keys())
        idf = {j: math.log((1 + n_docs) / (1 + df[j])) for j in df}
        for i, counts in enumerate(doc_counts):
            for j in sorted(counts):
                value = counts[j] * idf[j]
                if value != 0.0:
                    entries[(i, j)] = value
    else:
        for i, counts in enumerate(doc_counts):
            total = sum(counts.values())
            for j in sorted(counts):
                if mode == "binary":
                    entries[(i, j)] = 1.0
                elif mode == "count":
                    entries[(i, j)] = float(counts[j])
                else:  # freq
                    entries[(i, j)] = counts[j] / total
    return DocTermMatrix(
        rows=n_docs, cols=len(feature_words), entries=entries, mode=mode, feature_words=feature_words
    )


def one_hot(labels: Sequence[str], class_names: Sequence[str]) -> LabelMatrix:
    """Encode labels as one-hot rows over the sorted class name list."""
    class_tuple = tuple(class_names)
    index_of = {name: c for c, name in enumerate(class_tuple)}
    indices = []
    for label in labels:
        if label not in index_of:
            raise UnknownLabelError(f"label {label!r} not in class names {class_tuple}")
        indices.append(index_of[label])
    return LabelMatrix(class_names=class_tuple, indices=tuple(indices))


def chi2_scores(X: DocTermMatrix, Y: LabelMatrix) -> list[FeatureScore]:
    """Chi-square statistic of each feature against the class labels.

    For feature j with per-class observed mass o_c (sum of X[i,j] over
    class-c rows) and total mass F_j, the expected mass under label
    independence is e_c = F_j * (class c share of rows); the score is
    sum_c (o_c - e_c)^2 / e_c, classes with e_c = 0 contributing 0.
    """
    if X.rows != Y.rows:
        raise ShapeError(f"X has {X.rows} rows but Y has {Y.rows}")
    if X.rows < 1:
        raise ShapeError("need at least one row")
    n_classes = Y.cols
    observed = [[0.0] * n_classes for _ in range(X.cols)]
    totals = [0.0] * X.cols
    for (i, j), value in X.entries.items():
        if value < 0:
            raise DomainError(f"negative entry {value} at {(i, j)}")
        observed[j][Y.indices[i]] += value
        totals[j] += value
    shares = [count / X.rows for count in Y.class_counts()]
    scores = []
    for j, word in enumerate(X.feature_words):
        score = 0.0
        for c in range(n_classes):
            expected = shares[c] * totals[j]
            if expected > 0.0:
                diff = observed[j][c] - expected
                score += diff * diff / expected
        scores.append(FeatureScore(word=word, score=score))
    return scores


def select_k_best(
    X: DocTermMatrix, scores: Sequence[FeatureScore], k: int
) -> tuple[DocTermMatrix, tuple[str, ...]]:
    """Keep the k highest-scoring columns (ties favor the smaller index).

    Output columns preserve their original relative order; k >= cols is
    the identity.
    """
    if len(scores) != X.cols:
        raise ShapeError(f"{len(scores)} scores for {X.cols} columns")
    if k < 1:
        raise DomainError(f"k must be >= 1, got {k}")
    if k >= X.cols:
        return X, X.feature_words
    ranked = sorted(range(X.cols), key=lambda j: (-scores[j].score, j))
    kept = sorted(ranked[:k])
    remap = {old: new for new, old in enumerate(kept)}
    entries = {}
    for (i, j), value in X.entries.items():
        new_j = remap.get(j)
        if new_j is not None:
            entries[(i, new_j)] = value
    words = tuple(X.feature_words[j] for j in kept)
    return (
        DocTermMatrix(rows=X.rows, cols=k, entries=entries, mode=X.mode, feature_words=words),
        words,
    )


def best_words_report(scores: Sequence[FeatureScore], top_n: int) -> list[FeatureScore]:
    """Top feature words by score, descending; ties break lexicographically."""
    if top_n < 0:
        raise DomainError(f"top_n must be >= 0, got {top_n}")
    ordered = sorted(scores, key=lambda fs: (-fs.score, fs.word))
    return ordered[:top_n]


def write_feature_scores_csv(report: Sequence[FeatureScore], path: str | Path) -> None:
    """CSV with columns rank,word,score (score at 6 decimal places)."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["rank", "word", "score"])
        for rank, fs in enumerate(report, start=1):
            writer.writerow([rank, fs.word, f"{fs.score:.6f}"])
