"""Single-hidden-layer feedforward network trained by mini-batch gradient descent.

Architecture: input -> relu(x.W1 + b1) -> softmax(h.W2 + b2).  Training is
plain gradient descent (no momentum, no adaptive scaling) with early
stopping monitored on validation mean squared error.  Everything is a
deterministic function of the inputs and the seed: weight init, the
validation split, and every epoch shuffle draw from labeled Rng streams,
and the kernels keep floating-point order fixed.
"""

from __future__ import annotations

import json
import math
import warnings
from array import array
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

from .errors import DivergenceError, DomainError, ModelFormatError, ShapeError
from .features import DocTermMatrix, LabelMatrix
from .matrix import (
    Matrix,
    add_row_inplace,
    axpy_inplace,
    col_sums,
    gather_rows,
    matmul,
    matmul_nt,
    matmul_tn,
    relu_backward_inplace,
    relu_inplace,
    softmax_rows_inplace,
)
from .rng import Rng

LOSS_KINDS = ("cross_entropy", "mse")
_LOG_FLOOR = 1e-12  # clamp for ln() on confident wrong predictions


@dataclass(frozen=True)
class LayerSpec:
    input_dim: int
    hidden_units: int
    output_dim: int

    def __post_init__(self):
        if min(self.input_dim, self.hidden_units, self.output_dim) < 1:
            raise DomainError(f"all layer dimensions must be >= 1, got {self}")


@dataclass
class MlpParams:
    W1: Matrix  # input_dim x hidden_units
    b1: array
    W2: Matrix  # hidden_units x output_dim
    b2: array

    def copy(self) -> "MlpParams":
        return MlpParams(self.W1.copy(), array("d", self.b1), self.W2.copy(), array("d", self.b2))


@dataclass
class Grads:
    W1: Matrix
    b1: array
    W2: Matrix
    b2: array


@dataclass(frozen=True)
class TrainConfig:
    learning_rate: float = 0.1
    batch_size: int = 32
    max_epochs: int = 50
    loss_kind: str = "cross_entropy"
    early_stop_min_delta: float = 1e-4
    early_stop_patience: int = 3
    validation_fraction: float = 0.1
    seed: int = 42

    def validate(self) -> None:
        if self.learning_rate <= 0:
            raise DomainError("learning_rate must be positive")
        if self.batch_size < 1:
            raise DomainError("batch_size must be >= 1")
        if self.max_epochs < 1:
            raise DomainError("max_epochs must be >= 1")
        if self.loss_kind not in LOSS_KINDS:
            raise DomainError(f"loss_kind must be one of {LOSS_KINDS}")
        if self.early_stop_min_delta < 0:
            raise DomainError("early_stop_min_delta must be >= 0")
        if self.early_stop_patience < 1:
            raise DomainError("early_stop_patience must be >= 1")
        if not 0.0 <= self.validation_fraction < 1.0:
            raise DomainError("validation_fraction must be in [0, 1)")


@dataclass(frozen=True)
class EpochRecord:
    epoch: int
    train_loss: float
    val_loss: float
    val_mse: float
    val_accuracy: float


@dataclass
class TrainTrace:
    """Per-epoch history.  train_loss is the epoch mean of mini-batch losses;
    the val_* fields describe the held-out validation rows, or the training
    rows when the run fell back to training-set monitoring."""

    records: list[EpochRecord] = field(default_factory=list)
    stopped_early: bool = False
    epochs_run: int = 0
    best_epoch: int = -1
    monitored_validation: bool = True


def init_params(spec: LayerSpec, seed: int) -> MlpParams:
    """Uniform [-L, L] weights with L = sqrt(6 / (fan_in + fan_out)), zero biases.

    Draw order (fixed contract): W1 row-major, then W2 row-major, from the
    Rng stream (seed, "init").
    """
    rng = Rng(seed, "init")
    w1 = Matrix(spec.input_dim, spec.hidden_units)
    limit = math.sqrt(6.0 / (spec.input_dim + spec.hidden_units))
    for i in range(len(w1.data)):
        w1.data[i] = rng.uniform(-limit, limit)
    w2 = Matrix(spec.hidden_units, spec.output_dim)
    limit = math.sqrt(6.0 / (spec.hidden_units + spec.output_dim))
    for i in range(len(w2.data)):
        w2.data[i] = rng.uniform(-limit, limit)
    return MlpParams(
        W1=w1,
        b1=array("d", bytes(8 * spec.hidden_units)),
        W2=w2,
        b2=array("d", bytes(8 * spec.output_dim)),
    )


def _forward(params: MlpParams, X: Matrix) -> tuple[Matrix, Matrix]:
    hidden = matmul(X, params.W1)
    add_row_inplace(hidden, params.b1)
    relu_inplace(hidden)
    probs = matmul(hidden, params.W2)
    add_row_inplace(probs, params.b2)
    softmax_rows_inplace(probs)
    return hidden, probs


def forward(params: MlpParams, X: Matrix) -> tuple[Matrix, Matrix]:
    """Hidden activations and class probabilities for each input row."""
    if X.cols != params.W1.rows:
        raise ShapeError(f"input has {X.cols} columns, network expects {params.W1.rows}")
    if not X.all_finite():
        raise DomainError("input contains non-finite values")
    return _forward(params, X)


def _loss_indices(probs: Matrix, label_indices: Sequence[int], kind: str) -> float:
    n, c = probs.rows, probs.cols
    data = probs.data
    if kind == "cross_entropy":
        total = 0.0
        for i, true_c in enumerate(label_indices):
            # max() keeps NaN probabilities NaN so divergence stays visible.
            total += math.log(max(data[i * c + true_c], _LOG_FLOOR))
        return -total / n
    total = 0.0
    for i, true_c in enumerate(label_indices):
        base = i * c
        for j in range(c):
            diff = data[base + j] - (1.0 if j == true_c else 0.0)
            total += diff * diff
    return total / (n * c)


def loss(probs: Matrix, Y: LabelMatrix, kind: str = "cross_entropy") -> float:
    """Mean cross-entropy (ln clamped at 1e-12) or mean squared error."""
    if kind not in LOSS_KINDS:
        raise DomainError(f"loss kind must be one of {LOSS_KINDS}")
    if probs.rows != Y.rows or probs.cols != Y.cols:
        raise ShapeError(
            f"probs {probs.rows}x{probs.cols} vs labels {Y.rows}x{Y.cols}"
        )
    return _loss_indices(probs, Y.indices, kind)


def _output_delta(probs: Matrix, label_indices: Sequence[int], kind: str) -> Matrix:
    """dL/d(logits), averaged over the batch."""
    n, c = probs.rows, probs.cols
    delta = Matrix(n, c)
    p, d = probs.data, delta.data
    if kind == "cross_entropy":
        inv_n = 1.0 / n
        for i, true_c in enumerate(label_indices):
            base = i * c
            for j in range(c):
                d[base + j] = (p[base + j] - (1.0 if j == true_c else 0.0)) * inv_n
        return delta
    coef = 2.0 / (n * c)
    for i, true_c in enumerate(label_indices):
        base = i * c
        dot = 0.0
        for j in range(c):
            dot += (p[base + j] - (1.0 if j == true_c else 0.0)) * p[base + j]
        for j in range(c):
            residual = p[base + j] - (1.0 if j == true_c else 0.0)
            d[base + j] = coef * p[base + j] * (residual - dot)
    return delta


def _backward_indices(
    params: MlpParams,
    X: Matrix,
    label_indices: Sequence[int],
    probs: Matrix,
    hidden: Matrix,
    kind: str,
) -> Grads:
    delta_out = _output_delta(probs, label_indices, kind)
    g_w2 = matmul_tn(hidden, delta_out)
    g_b2 = col_sums(delta_out)
    delta_h = matmul_nt(delta_out, params.W2)
    relu_backward_inplace(delta_h, hidden)  # subgradient at 0 is 0
    g_w1 = matmul_tn(X, delta_h)
    g_b1 = col_sums(delta_h)
    return Grads(W1=g_w1, b1=g_b1, W2=g_w2, b2=g_b2)


def backward(
    params: MlpParams,
    X: Matrix,
    Y: LabelMatrix,
    probs: Matrix,
    hidden: Matrix,
    kind: str = "cross_entropy",
) -> Grads:
    """Exact analytic gradients of the batch-averaged loss."""
    if X.rows < 1:
        raise ShapeError("batch must be nonempty")
    if kind not in LOSS_KINDS:
        raise DomainError(f"loss kind must be one of {LOSS_KINDS}")
    return _backward_indices(params, X, Y.indices, probs, hidden, kind)


def predict(params: MlpParams, X: Matrix) -> list[int]:
    """Most probable class per row; ties go to the smallest class index."""
    _, probs = forward(params, X)
    out = []
    c = probs.cols
    data = probs.data
    for i in range(probs.rows):
        base = i * c
        best, best_j = data[base], 0
        for j in range(1, c):
            if data[base + j] > best:
                best, best_j = data[base + j], j
        out.append(best_j)
    return out


def _mse_indices(probs: Matrix, label_indices: Sequence[int]) -> float:
    return _loss_indices(probs, label_indices, "mse")


def _accuracy_indices(probs: Matrix, label_indices: Sequence[int]) -> float:
    c = probs.cols
    data = probs.data
    hits = 0
    for i, true_c in enumerate(label_indices):
        base = i * c
        best, best_j = data[base], 0
        for j in range(1, c):
            if data[base + j] > best:
                best, best_j = data[base + j], j
        if best_j == true_c:
            hits += 1
    return hits / len(label_indices) if label_indices else 0.0


def _as_dense(X: Matrix | DocTermMatrix) -> Matrix:
    return X.dense() if isinstance(X, DocTermMatrix) else X


def train(
    X: Matrix | DocTermMatrix,
    Y: LabelMatrix,
    spec: LayerSpec,
    cfg: TrainConfig,
) -> tuple[MlpParams, TrainTrace]:
    """Mini-batch gradient descent with MSE-monitored early stopping.

    A validation_fraction share of rows (seeded shuffle) is held out; after
    each epoch the validation MSE is recorded and training stops once it
    has failed to improve by more than early_stop_min_delta for
    early_stop_patience consecutive epochs.  The returned parameters are
    the snapshot from the epoch with the best monitored MSE.
    """
    cfg.validate()
    dense = _as_dense(X)
    if dense.rows != Y.rows:
        raise ShapeError(f"X has {dense.rows} rows but Y has {Y.rows}")
    if dense.rows < 2:
        raise ShapeError("training needs at least 2 rows")
    if dense.cols != spec.input_dim:
        raise ShapeError(f"X has {dense.cols} columns but spec.input_dim is {spec.input_dim}")
    if Y.cols != spec.output_dim:
        raise ShapeError(f"Y has {Y.cols} classes but spec.output_dim is {spec.output_dim}")
    if not dense.all_finite():
        raise DomainError("training matrix contains non-finite values")

    n = dense.rows
    val_n = int(n * cfg.validation_fraction)
    order = list(range(n))
    Rng(cfg.seed, "train/val-split").shuffle(order)
    monitored_validation = val_n >= 1
    if cfg.validation_fraction > 0 and not monitored_validation:
        warnings.warn(
            "validation fraction leaves no validation rows; monitoring training MSE instead",
            UserWarning,
        )
    val_idx = sorted(order[:val_n])
    train_idx = sorted(order[val_n:])
    X_train = gather_rows(dense, train_idx)
    y_train = [Y.indices[i] for i in train_idx]
    if monitored_validation:
        X_mon = gather_rows(dense, val_idx)
        y_mon = [Y.indices[i] for i in val_idx]
    else:
        X_mon, y_mon = X_train, y_train

    params = init_params(spec, cfg.seed)
    shuffle_rng = Rng(cfg.seed, "train/shuffle")
    trace = TrainTrace(monitored_validation=monitored_validation)
    best_params = params.copy()
    best_mse = math.inf
    stop_best = math.inf
    wait = 0
    n_train = len(train_idx)

    for epoch in range(cfg.max_epochs):
        perm = list(range(n_train))
        shuffle_rng.shuffle(perm)
        loss_sum = 0.0
        for batch_no, start in enumerate(range(0, n_train, cfg.batch_size)):
            batch = perm[start : start + cfg.batch_size]
            Xb = gather_rows(X_train, batch)
            yb = [y_train[i] for i in batch]
            hidden, probs = _forward(params, Xb)
            batch_loss = _loss_indices(probs, yb, cfg.loss_kind)
            if not math.isfinite(batch_loss):
                raise DivergenceError(
                    f"non-finite loss at epoch {epoch}, batch {batch_no}", epoch, batch_no
                )
            grads = _backward_indices(params, Xb, yb, probs, hidden, cfg.loss_kind)
            lr = cfg.learning_rate
            axpy_inplace(params.W1.data, -lr, grads.W1.data)
            axpy_inplace(params.b1, -lr, grads.b1)
            axpy_inplace(params.W2.data, -lr, grads.W2.data)
            axpy_inplace(params.b2, -lr, grads.b2)
            loss_sum += batch_loss * len(batch)

        _, mon_probs = _forward(params, X_mon)
        val_loss = _loss_indices(mon_probs, y_mon, cfg.loss_kind)
        val_mse = _mse_indices(mon_probs, y_mon)
        val_acc = _accuracy_indices(mon_probs, y_mon)
        trace.records.append(
            EpochRecord(
                epoch=epoch,
                train_loss=loss_sum / n_train,
                val_loss=val_loss,
                val_mse=val_mse,
                val_accuracy=val_acc,
            )
        )
        trace.epochs_run = epoch + 1

        if val_mse < best_mse:
            best_mse = val_mse
            best_params = params.copy()
            trace.best_epoch = epoch
        if val_mse < stop_best - cfg.early_stop_min_delta:
            stop_best = val_mse
            wait = 0
        else:
            wait += 1
            if wait >= cfg.early_stop_patience:
                trace.stopped_early = True
                break

    return best_params, trace


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------

_FORMAT_VERSION = 1


@dataclass(frozen=True)
class SavedModel:
    params: MlpParams
    spec: LayerSpec
    class_names: tuple[str, ...]
    feature_words: tuple[str, ...]
    weighting: str
    idf: tuple[float, ...] | None = None


def save_model(
    params: MlpParams,
    spec: LayerSpec,
    feature_words: Sequence[str],
    class_names: Sequence[str],
    path: str | Path,
    weighting: str = "binary",
    idf: Sequence[float] | None = None,
) -> None:
    """Write the model as a single JSON document (lossless float round-trip)."""
    doc: dict = {
        "format_version": _FORMAT_VERSION,
        "spec": {
            "input_dim": spec.input_dim,
            "hidden_units": spec.hidden_units,
            "output_dim": spec.output_dim,
        },
        "class_names": list(class_names),
        "feature_words": list(feature_words),
        "weighting": weighting,
        "weights": {
            "W1": params.W1.to_rows(),
            "b1": list(params.b1),
            "W2": params.W2.to_rows(),
            "b2": list(params.b2),
        },
    }
    if idf is not None:
        doc["idf"] = list(idf)
    Path(path).write_text(json.dumps(doc, indent=2) + "\n", encoding="utf-8")


def load_model(path: str | Path) -> SavedModel:
    """Read a model file; any structural problem raises ModelFormatError."""
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ModelFormatError(f"cannot read model file {path}: {exc}") from exc
    try:
        version = doc["format_version"]
        if version != _FORMAT_VERSION:
            raise ModelFormatError(f"unknown format_version {version!r}")
        spec = LayerSpec(
            input_dim=int(doc["spec"]["input_dim"]),
            hidden_units=int(doc["spec"]["hidden_units"]),
            output_dim=int(doc["spec"]["output_dim"]),
        )
        class_names = tuple(doc["class_names"])
        feature_words = tuple(doc["feature_words"])
        weighting = doc["weighting"]
        weights = doc["weights"]
        w1 = Matrix.from_rows(weights["W1"])
        w2 = Matrix.from_rows(weights["W2"])
        b1 = array("d", weights["b1"])
        b2 = array("d", weights["b2"])
    except (KeyError, TypeError, ValueError, ShapeError) as exc:
        raise ModelFormatError(f"malformed model file {path}: {exc}") from exc
    if (w1.rows, w1.cols) != (spec.input_dim, spec.hidden_units):
        raise ModelFormatError("W1 shape does not match spec")
    if (w2.rows, w2.cols) != (spec.hidden_units, spec.output_dim):
        raise ModelFormatError("W2 shape does not match spec")
    if len(b1) != spec.hidden_units or len(b2) != spec.output_dim:
        raise ModelFormatError("bias length does not match spec")
    if len(feature_words) != spec.input_dim:
        raise ModelFormatError("feature_words length does not match input_dim")
    if len(class_names) != spec.output_dim:
        raise ModelFormatError("class_names length does not match output_dim")
    idf = doc.get("idf")
    if idf is not None:
        if len(idf) != spec.input_dim:
            raise ModelFormatError("idf length does not match input_dim")
        idf = tuple(float(v) for v in idf)
    return SavedModel(
        params=MlpParams(W1=w1, b1=b1, W2=w2, b2=b2),
        spec=spec,
        class_names=class_names,
        feature_words=feature_words,
        weighting=weighting,
        idf=idf,
    )
