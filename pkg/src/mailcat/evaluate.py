"""Train/test splitting, accuracy, confusion matrices, and their renderings."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Sequence

from . import svg
from .errors import (
    DegenerateInputError,
    DegenerateSplitError,
    DomainError,
    ShapeError,
    StratifyError,
)
from .rng import Rng


@dataclass(frozen=True)
class Split:
    train_indices: tuple[int, ...]
    test_indices: tuple[int, ...]
    seed: int


def _ceil_decimal(n: int, ratio: float) -> int:
    # Ceil of n*ratio at the ratio's decimal value: binary-float noise would
    # otherwise turn ceil(20 * 0.1) into 3.
    return math.ceil(Fraction(str(ratio)) * n)


def train_test_split(
    labels: Sequence[int], train_ratio: float, seed: int, stratified: bool = True
) -> Split:
    """Seeded partition into train/test index lists (emitted ascending).

    Train size is ceil(n * train_ratio) overall.  Stratified mode takes
    ceil(count_c * train_ratio) rows per class, then moves one training row
    to test from each of the largest classes (ties by class index) until
    the overall ceiling holds.
    """
    n = len(labels)
    if n < 2:
        raise DomainError(f"need at least 2 rows to split, got {n}")
    if not 0.0 < train_ratio < 1.0:
        raise DomainError(f"train_ratio must be in (0, 1), got {train_ratio}")
    train_total = _ceil_decimal(n, train_ratio)
    if train_total < 1 or train_total >= n:
        raise DegenerateSplitError(
            f"ratio {train_ratio} on {n} rows leaves an empty side ({train_total} train)"
        )
    rng = Rng(seed, "split")

    if not stratified:
        order = list(range(n))
        rng.shuffle(order)
        train = order[:train_total]
        test = order[train_total:]
        return Split(tuple(sorted(train)), tuple(sorted(test)), seed)

    classes = sorted(set(labels))
    members: dict[int, list[int]] = {c: [] for c in classes}
    for i, label in enumerate(labels):
        members[label].append(i)
    for c in classes:
        if len(members[c]) < 2:
            raise StratifyError(
                f"class {c} has {len(members[c])} member(s); use stratified=False"
            )
    train_parts: dict[int, list[int]] = {}
    test_parts: dict[int, list[int]] = {}
    for c in classes:
        rows = list(members[c])
        rng.shuffle(rows)
        take = _ceil_decimal(len(rows), train_ratio)
        train_parts[c] = rows[:take]
        test_parts[c] = rows[take:]
    excess = sum(len(part) for part in train_parts.values()) - train_total
    # Per-class ceils overshoot the overall ceil by at most one row per
    # class, so trimming one row from each of the largest classes suffices.
    trim_order = sorted(classes, key=lambda c: (-len(members[c]), c))
    for c in trim_order:
        if excess <= 0:
            break
        test_parts[c].append(train_parts[c].pop())
        excess -= 1
    train = sorted(i for part in train_parts.values() for i in part)
    test = sorted(i for part in test_parts.values() for i in part)
    if not train or not test:
        raise DegenerateSplitError("stratified split left an empty side")
    return Split(tuple(train), tuple(test), seed)


@dataclass(frozen=True)
class ConfusionMatrix:
    """counts[true][predicted] over the evaluated rows."""

    counts: tuple[tuple[int, ...], ...]
    class_names: tuple[str, ...]

    @property
    def size(self) -> int:
        return len(self.class_names)

    def total(self) -> int:
        return sum(sum(row) for row in self.counts)

    def trace(self) -> int:
        return sum(self.counts[i][i] for i in range(self.size))

    def row_sums(self) -> list[int]:
        return [sum(row) for row in self.counts]

    def col_sums(self) -> list[int]:
        return [sum(row[j] for row in self.counts) for j in range(self.size)]


def confusion_matrix(
    true: Sequence[int],
    pred: Sequence[int],
    n_classes: int,
    class_names: Sequence[str] | None = None,
) -> ConfusionMatrix:
    """Count (true, predicted) pairs into an n_classes x n_classes table."""
    if len(true) != len(pred):
        raise ShapeError(f"{len(true)} true labels vs {len(pred)} predictions")
    if class_names is None:
        class_names = [str(i) for i in range(n_classes)]
    elif len(class_names) != n_classes:
        raise ShapeError("class_names length does not match n_classes")
    counts = [[0] * n_classes for _ in range(n_classes)]
    for t, p in zip(true, pred):
        if not (0 <= t < n_classes and 0 <= p < n_classes):
            raise DomainError(f"class index pair ({t}, {p}) out of range 0..{n_classes - 1}")
        counts[t][p] += 1
    return ConfusionMatrix(tuple(tuple(row) for row in counts), tuple(class_names))


def accuracy(cm: ConfusionMatrix) -> float:
    total = cm.total()
    if total == 0:
        raise DegenerateInputError("accuracy is undefined on an empty confusion matrix")
    return cm.trace() / total


@dataclass(frozen=True)
class EvaluationReport:
    accuracy: float
    confusion: ConfusionMatrix
    per_class_precision: tuple[float, ...]
    per_class_recall: tuple[float, ...]
    undefined_precision: tuple[int, ...]  # classes never predicted
    undefined_recall: tuple[int, ...]  # classes absent from the test rows


def evaluation_report(cm: ConfusionMatrix) -> EvaluationReport:
    """Accuracy plus per-class precision/recall (0 when undefined, flagged)."""
    acc = accuracy(cm)
    col_totals = cm.col_sums()
    row_totals = cm.row_sums()
    precision, recall = [], []
    undef_p, undef_r = [], []
    for c in range(cm.size):
        if col_totals[c] == 0:
            precision.append(0.0)
            undef_p.append(c)
        else:
            precision.append(cm.counts[c][c] / col_totals[c])
        if row_totals[c] == 0:
            recall.append(0.0)
            undef_r.append(c)
        else:
            recall.append(cm.counts[c][c] / row_totals[c])
    assert acc == cm.trace() / cm.total()
    return EvaluationReport(
        accuracy=acc,
        confusion=cm,
        per_class_precision=tuple(precision),
        per_class_recall=tuple(recall),
        undefined_precision=tuple(undef_p),
        undefined_recall=tuple(undef_r),
    )


def render_heatmap(cm: ConfusionMatrix, title: str = "") -> tuple[bytes, str]:
    """SVG heatmap bytes (row-max grayscale shading) plus a plain-text grid."""
    svg_text = svg.heatmap(cm.counts, cm.class_names, title=title)
    width = max(
        [len("true\\pred")]
        + [len(name) for name in cm.class_names]
        + [len(str(v)) for row in cm.counts for v in row]
    )
    header = ["true\\pred".rjust(width)] + [name.rjust(width) for name in cm.class_names]
    lines = ["  ".join(header)]
    for name, row in zip(cm.class_names, cm.counts):
        cells = [name.rjust(width)] + [str(v).rjust(width) for v in row]
        lines.append("  ".join(cells))
    return svg_text.encode("utf-8"), "\n".join(lines)


def write_confusion_csv(cm: ConfusionMatrix, path: str | Path) -> None:
    """CSV with header true\\pred,<classes...> and one row per true class."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["true\\pred", *cm.class_names])
        for name, row in zip(cm.class_names, cm.counts):
            writer.writerow([name, *row])
