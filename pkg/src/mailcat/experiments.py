"""Parameter-sweep experiments and the seeded synthetic corpus generator.

Two sweeps are provided: test accuracy against hidden-unit count and
against vocabulary size.  Both hold the corpus split, seed, and base
vocabulary fixed across points so that only the swept parameter moves.
"""

from __future__ import annotations

import hashlib
import json
import math
import time
from bisect import bisect_left
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

from . import svg
from .errors import DomainError, IoError, SyntheticSpecError
from .evaluate import (
    EvaluationReport,
    Split,
    confusion_matrix,
    evaluation_report,
    train_test_split,
)
from .features import (
    FeatureScore,
    LabelMatrix,
    chi2_scores,
    one_hot,
    select_k_best,
    vectorize,
)
from .ingest import EmailDocument, LabeledCorpus, filter_labels
from .matrix import Matrix
from .model import LayerSpec, MlpParams, TrainConfig, TrainTrace, predict, train
from .rng import Rng
from .text import StopWordList, Vocabulary, build_vocabulary, tokenize, truncate

# Qualitative accuracy targets the two sweeps are expected to mirror in
# shape (steep rise then plateau; more words help).  Recorded in emitted
# reports for side-by-side reading.
TREND_REFERENCE = {
    "hidden_units": {"1": 0.33, "100": 0.85, "1500": 0.90},
    "num_words": {"5500": 0.8167, "12000": 0.8833},
}


@dataclass(frozen=True)
class SyntheticLabel:
    name: str
    email_count: int
    signature_words: tuple[str, ...]
    signal_strength: float


@dataclass(frozen=True)
class SyntheticSpec:
    labels: tuple[SyntheticLabel, ...]
    shared_vocab_size: int = 2000
    tokens_per_email: tuple[int, int] = (15, 120)
    seed: int = 42

    def validate(self) -> None:
        if not self.labels:
            raise SyntheticSpecError("need at least one label")
        if self.shared_vocab_size < 1:
            raise SyntheticSpecError("shared_vocab_size must be >= 1")
        lo, hi = self.tokens_per_email
        if lo < 1 or lo > hi:
            raise SyntheticSpecError(f"bad tokens_per_email range {self.tokens_per_email}")
        shared = set(_shared_words(self.shared_vocab_size))
        seen_names = set()
        for label in self.labels:
            if label.email_count < 1:
                raise SyntheticSpecError(f"label {label.name} has no emails")
            if not 0.0 < label.signal_strength <= 1.0:
                raise SyntheticSpecError(
                    f"label {label.name} signal_strength {label.signal_strength} not in (0, 1]"
                )
            if not label.signature_words:
                raise SyntheticSpecError(f"label {label.name} has no signature words")
            if shared.intersection(label.signature_words):
                raise SyntheticSpecError(
                    f"label {label.name} signature words overlap the shared vocabulary"
                )
            if label.name in seen_names:
                raise SyntheticSpecError(f"duplicate label name {label.name}")
            seen_names.add(label.name)


_DEFAULT_LABEL_NAMES = (
    "billing",
    "devops",
    "family",
    "newsletters",
    "receipts",
    "shipping",
    "travel",
)
_DEFAULT_LABEL_COUNTS = (102, 238, 73, 47, 21, 91, 17)
_SIGNATURE_WORDS_PER_LABEL = 40


def _shared_words(size: int) -> list[str]:
    return [f"word{i:04d}" for i in range(1, size + 1)]


def default_synthetic_spec(seed: int = 42, signal_strength: float = 0.3) -> SyntheticSpec:
    """Seven labels with fixed sizes over a Zipf-shaped shared vocabulary."""
    labels = tuple(
        SyntheticLabel(
            name=name,
            email_count=count,
            signature_words=tuple(f"{name}{i:02d}" for i in range(_SIGNATURE_WORDS_PER_LABEL)),
            signal_strength=signal_strength,
        )
        for name, count in zip(_DEFAULT_LABEL_NAMES, _DEFAULT_LABEL_COUNTS)
    )
    return SyntheticSpec(labels=labels, seed=seed)


class _ZipfSampler:
    """Rank-frequency sampling with P(rank r) proportional to 1/r."""

    def __init__(self, size: int, exponent: float = 1.0):
        cumulative = []
        total = 0.0
        for rank in range(1, size + 1):
            total += 1.0 / rank**exponent
            cumulative.append(total)
        self._cumulative = cumulative
        self._total = total

    def sample(self, rng: Rng) -> int:
        return bisect_left(self._cumulative, rng.random() * self._total)


def generate_synthetic_corpus(spec: SyntheticSpec) -> LabeledCorpus:
    """Deterministic labeled corpus: each token is a label signature word
    with probability signal_strength, else a Zipf-drawn shared word."""
    spec.validate()
    rng = Rng(spec.seed, "synthetic")
    shared = _shared_words(spec.shared_vocab_size)
    zipf = _ZipfSampler(spec.shared_vocab_size)
    lo, hi = spec.tokens_per_email
    documents = []
    for label in spec.labels:
        for k in range(label.email_count):
            n_tokens = rng.randint(lo, hi)
            tokens = []
            for _ in range(n_tokens):
                if rng.random() < label.signal_strength:
                    tokens.append(label.signature_words[rng.randrange(len(label.signature_words))])
                else:
                    tokens.append(shared[zipf.sample(rng)])
            documents.append(
                EmailDocument(id=f"{label.name}/{k:04d}", text=" ".join(tokens), label=label.name)
            )
    return LabeledCorpus.from_documents(documents)


def write_corpus_dir(corpus: LabeledCorpus, root: str | Path) -> int:
    """Materialize a corpus as label directories of .txt files."""
    root = Path(root)
    try:
        for doc in corpus.documents:
            label_dir = root / doc.label
            label_dir.mkdir(parents=True, exist_ok=True)
            name = doc.id.split("/")[-1]
            (label_dir / f"{name}.txt").write_text(doc.text + "\n", encoding="utf-8")
    except OSError as exc:
        raise IoError(f"cannot write corpus under {root}: {exc}") from exc
    return len(corpus.documents)


# ---------------------------------------------------------------------------
# Shared pipeline plumbing
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PipelineSettings:
    """Everything between a raw corpus and a trainable dataset."""

    stop_words: StopWordList
    min_label_count: int = 10
    drop_labels: frozenset[str] = frozenset()
    num_words: int = 2000
    select_k: int | None = None  # None means num_words (selection is identity)
    weighting: str = "binary"
    score_weighting: str = "count"
    train_ratio: float = 0.9
    stratified: bool = True
    seed: int = 42

    def snapshot(self) -> dict:
        stop_blob = "\n".join(sorted(self.stop_words.words)).encode("utf-8")
        return {
            "min_label_count": self.min_label_count,
            "drop_labels": sorted(self.drop_labels),
            "num_words": self.num_words,
            "select_k": self.select_k,
            "weighting": self.weighting,
            "score_weighting": self.score_weighting,
            "train_ratio": self.train_ratio,
            "stratified": self.stratified,
            "seed": self.seed,
            "stop_words_count": len(self.stop_words),
            "stop_words_sha256": hashlib.sha256(stop_blob).hexdigest(),
        }


@dataclass
class PipelineBase:
    """Corpus-level artifacts shared by every sweep point."""

    corpus: LabeledCorpus
    tokens: list[list[str]]
    class_names: tuple[str, ...]
    label_indices: list[int]
    vocab_full: Vocabulary
    split: Split

    def split_sha256(self) -> str:
        blob = ",".join(map(str, self.split.train_indices)) + "|" + ",".join(
            map(str, self.split.test_indices)
        )
        return hashlib.sha256(blob.encode("ascii")).hexdigest()

    def vocab_sha256(self) -> str:
        blob = "\n".join(
            f"{word}:{self.vocab_full.rank_of[word]}:{self.vocab_full.count_of[word]}"
            for word in self.vocab_full.words_by_rank()
        )
        return hashlib.sha256(blob.encode("utf-8")).hexdigest()


@dataclass
class Dataset:
    """One featurization of a PipelineBase, ready for training."""

    X_train: Matrix
    Y_train: LabelMatrix
    X_test: Matrix
    y_test: list[int]
    feature_words: tuple[str, ...]
    scores: list[FeatureScore]
    idf: list[float] | None


def build_pipeline_base(corpus: LabeledCorpus, settings: PipelineSettings) -> PipelineBase:
    filtered = filter_labels(corpus, settings.min_label_count, settings.drop_labels)
    tokens = [tokenize(doc.text, settings.stop_words) for doc in filtered.documents]
    vocab_full = build_vocabulary(tokens)
    class_names = filtered.labels
    index_of = {name: i for i, name in enumerate(class_names)}
    label_indices = [index_of[doc.label] for doc in filtered.documents]
    split = train_test_split(
        label_indices, settings.train_ratio, settings.seed, settings.stratified
    )
    return PipelineBase(
        corpus=filtered,
        tokens=tokens,
        class_names=class_names,
        label_indices=label_indices,
        vocab_full=vocab_full,
        split=split,
    )


def featurize(base: PipelineBase, settings: PipelineSettings, num_words: int) -> Dataset:
    """Truncate the vocabulary, score features, select, and split rows."""
    vocab = truncate(base.vocab_full, num_words)
    X_score = vectorize(base.tokens, vocab, settings.score_weighting)
    Y_all = one_hot([doc.label for doc in base.corpus.documents], base.class_names)
    scores = chi2_scores(X_score, Y_all)
    k = settings.select_k if settings.select_k is not None else num_words
    k = min(k, X_score.cols)
    X_model = (
        X_score
        if settings.weighting == settings.score_weighting
        else vectorize(base.tokens, vocab, settings.weighting)
    )
    X_selected, feature_words = select_k_best(X_model, scores, k)

    idf = None
    if settings.weighting == "tfidf":
        n_docs = len(base.tokens)
        token_sets = [set(toks) for toks in base.tokens]
        idf = [
            math.log((1 + n_docs) / (1 + sum(1 for s in token_sets if word in s)))
            for word in feature_words
        ]

    train_rows = list(base.split.train_indices)
    test_rows = list(base.split.test_indices)
    return Dataset(
        X_train=X_selected.dense_rows(train_rows),
        Y_train=LabelMatrix(
            class_names=base.class_names,
            indices=tuple(base.label_indices[i] for i in train_rows),
        ),
        X_test=X_selected.dense_rows(test_rows),
        y_test=[base.label_indices[i] for i in test_rows],
        feature_words=feature_words,
        scores=scores,
        idf=idf,
    )


@dataclass
class FitResult:
    params: MlpParams
    trace: TrainTrace
    report: EvaluationReport
    test_accuracy: float
    train_seconds: float


def fit_and_score(
    dataset: Dataset, class_names: Sequence[str], hidden_units: int, cfg: TrainConfig
) -> FitResult:
    """Train on the train rows, evaluate on the test rows."""
    spec = LayerSpec(
        input_dim=len(dataset.feature_words),
        hidden_units=hidden_units,
        output_dim=len(class_names),
    )
    started = time.perf_counter()
    params, trace = train(dataset.X_train, dataset.Y_train, spec, cfg)
    elapsed = time.perf_counter() - started
    predictions = predict(params, dataset.X_test)
    cm = confusion_matrix(dataset.y_test, predictions, len(class_names), class_names)
    report = evaluation_report(cm)
    return FitResult(
        params=params,
        trace=trace,
        report=report,
        test_accuracy=report.accuracy,
        train_seconds=elapsed,
    )


# ---------------------------------------------------------------------------
# Sweeps
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SweepPoint:
    value: int
    accuracy: float
    train_seconds: float
    epochs_run: int


@dataclass
class SweepResult:
    parameter_name: str  # "hidden_units" or "num_words"
    points: list[SweepPoint] = field(default_factory=list)
    fixed_config: dict = field(default_factory=dict)


def _check_grid(values: Sequence[int], what: str) -> None:
    if not values:
        raise DomainError(f"{what} grid is empty")
    if any(b <= a for a, b in zip(values, values[1:])):
        raise DomainError(f"{what} grid must be strictly increasing, got {list(values)}")


def _fixed_config(
    base: PipelineBase, settings: PipelineSettings, cfg: TrainConfig, extra: dict
) -> dict:
    out = {
        "pipeline": settings.snapshot(),
        "train": {
            "learning_rate": cfg.learning_rate,
            "batch_size": cfg.batch_size,
            "max_epochs": cfg.max_epochs,
            "loss_kind": cfg.loss_kind,
            "early_stop_min_delta": cfg.early_stop_min_delta,
            "early_stop_patience": cfg.early_stop_patience,
            "validation_fraction": cfg.validation_fraction,
            "seed": cfg.seed,
        },
        "class_names": list(base.class_names),
        "documents": len(base.corpus.documents),
        "split_sha256": base.split_sha256(),
        "vocab_sha256": base.vocab_sha256(),
    }
    out.update(extra)
    return out


def sweep_hidden_units(
    corpus: LabeledCorpus,
    hn_values: Sequence[int],
    settings: PipelineSettings,
    cfg: TrainConfig,
) -> SweepResult:
    """Accuracy at each hidden-unit count, all else held fixed."""
    _check_grid(hn_values, "hidden_units")
    base = build_pipeline_base(corpus, settings)
    dataset = featurize(base, settings, settings.num_words)
    result = SweepResult(
        parameter_name="hidden_units",
        fixed_config=_fixed_config(
            base,
            settings,
            cfg,
            {
                "num_words": settings.num_words,
                "trend_reference": TREND_REFERENCE["hidden_units"],
            },
        ),
    )
    for hn in hn_values:
        fit = fit_and_score(dataset, base.class_names, hn, cfg)
        result.points.append(
            SweepPoint(
                value=hn,
                accuracy=fit.test_accuracy,
                train_seconds=fit.train_seconds,
                epochs_run=fit.trace.epochs_run,
            )
        )
    return result


def sweep_num_words(
    corpus: LabeledCorpus,
    word_counts: Sequence[int],
    settings: PipelineSettings,
    cfg: TrainConfig,
    hidden_units: int = 100,
) -> SweepResult:
    """Accuracy at each vocabulary size; selection re-runs per point."""
    _check_grid(word_counts, "num_words")
    base = build_pipeline_base(corpus, settings)
    result = SweepResult(
        parameter_name="num_words",
        fixed_config=_fixed_config(
            base,
            settings,
            cfg,
            {
                "hidden_units": hidden_units,
                "trend_reference": TREND_REFERENCE["num_words"],
            },
        ),
    )
    for count in word_counts:
        dataset = featurize(base, settings, count)
        fit = fit_and_score(dataset, base.class_names, hidden_units, cfg)
        result.points.append(
            SweepPoint(
                value=count,
                accuracy=fit.test_accuracy,
                train_seconds=fit.train_seconds,
                epochs_run=fit.trace.epochs_run,
            )
        )
    return result


def emit_report(result: SweepResult, out_dir: str | Path) -> list[Path]:
    """Write sweep_<parameter>.csv/.svg/.json under out_dir."""
    out_dir = Path(out_dir)
    stem = f"sweep_{result.parameter_name}"
    csv_path = out_dir / f"{stem}.csv"
    svg_path = out_dir / f"{stem}.svg"
    json_path = out_dir / f"{stem}.json"
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
        lines = ["param,accuracy,train_seconds,epochs_run"]
        for point in result.points:
            lines.append(
                f"{point.value},{point.accuracy:.6f},{point.train_seconds:.3f},{point.epochs_run}"
            )
        csv_path.write_text("\n".join(lines) + "\n", encoding="utf-8")
        chart = svg.line_chart(
            [p.value for p in result.points],
            [p.accuracy for p in result.points],
            x_label=result.parameter_name,
            y_label="test accuracy",
            title=f"Test accuracy vs {result.parameter_name.replace('_', ' ')}",
        )
        svg_path.write_text(chart, encoding="utf-8")
        json_path.write_text(
            json.dumps(result.fixed_config, indent=2) + "\n", encoding="utf-8"
        )
    except OSError as exc:
        raise IoError(f"cannot write sweep report under {out_dir}: {exc}") from exc
    return [csv_path, svg_path, json_path]
