"""Acceptance suite: ten go/no-go checks with pinned tolerances and budgets.

Each criterion prints one PASS/FAIL line (run with -s or -rA to see them
all).  Numeric tolerances and runtime budgets are hard assertions, not
goals: a miss fails the suite.
"""

import hashlib
import json
import math
import random
import time
from collections import Counter
from fractions import Fraction
from pathlib import Path

import pytest

from mailcat.cli import main as cli_main
from mailcat.errors import DegenerateSplitError
from mailcat.evaluate import train_test_split
from mailcat.experiments import (
    PipelineSettings,
    build_pipeline_base,
    default_synthetic_spec,
    featurize,
    fit_and_score,
    generate_synthetic_corpus,
    sweep_hidden_units,
    sweep_num_words,
)
from mailcat.features import chi2_scores, one_hot
from mailcat.ingest import load_corpus
from mailcat.matrix import gather_rows
from mailcat.model import LayerSpec, TrainConfig, forward, loss, train
from mailcat.rng import Rng
from mailcat.text import StopWordList

from test_features import chi2_bruteforce, make_matrix
from test_model import gradient_check, toy_separable

FIXTURES = Path(__file__).parent / "fixtures"


def report_line(number: int, name: str, passed: bool, detail: str = ""):
    status = "PASS" if passed else "FAIL"
    print(f"ACCEPTANCE {number:>2} {name}: {status}  {detail}")
    assert passed, f"criterion {number} ({name}): {detail}"


@pytest.fixture(scope="module")
def default_corpus():
    return generate_synthetic_corpus(default_synthetic_spec(seed=42))


@pytest.fixture(scope="module")
def default_settings():
    return PipelineSettings(stop_words=StopWordList.default())


def test_criterion_1_gradient_correctness():
    """Analytic vs central finite-difference gradients: max relative error
    <= 1e-4 over 50 seeded (net, batch) cases per loss kind, in < 5 s."""
    started = time.perf_counter()
    worst = 0.0
    for case in range(50):
        for kind in ("cross_entropy", "mse"):
            worst = max(worst, gradient_check(31_000 + case, kind))
    elapsed = time.perf_counter() - started
    report_line(
        1,
        "gradient correctness",
        worst <= 1e-4 and elapsed < 5.0,
        f"max_rel_err={worst:.2e} (<=1e-4), {elapsed:.2f}s (<5s)",
    )


def test_criterion_2_chi2_oracle():
    """chi2_scores vs brute-force contingency loops: relative error <= 1e-9
    on 200 random instances (<=20 docs, <=10 features, <=4 classes), < 2 s."""
    rnd = random.Random(777)
    started = time.perf_counter()
    worst = 0.0
    for _ in range(200):
        n_docs = rnd.randint(1, 20)
        n_feats = rnd.randint(1, 10)
        n_classes = rnd.randint(1, 4)
        rows = [
            [rnd.choice([0, 0, 0, 1, 2, 3, 0.25]) for _ in range(n_feats)]
            for _ in range(n_docs)
        ]
        labels = [rnd.randrange(n_classes) for _ in range(n_docs)]
        names = [str(c) for c in range(n_classes)]
        got = [fs.score for fs in chi2_scores(make_matrix(rows), one_hot([names[l] for l in labels], names))]
        want = chi2_bruteforce(rows, labels, n_classes)
        for g, w in zip(got, want):
            denominator = max(abs(w), 1e-12)
            worst = max(worst, abs(g - w) / denominator)
    elapsed = time.perf_counter() - started
    report_line(
        2,
        "chi-square oracle",
        worst <= 1e-9 and elapsed < 2.0,
        f"max_rel_err={worst:.2e} (<=1e-9), {elapsed:.2f}s (<2s)",
    )


def test_criterion_3_split_fidelity():
    """608 rows at ratio 0.9 split exactly (548, 60); the partition
    property holds across 1000 random (n, ratio) draws."""
    split = train_test_split([i % 4 for i in range(608)], 0.9, seed=42, stratified=False)
    sizes_ok = (len(split.train_indices), len(split.test_indices)) == (548, 60)

    rnd = random.Random(608)
    checked = degenerate = 0
    partition_ok = True
    for _ in range(1000):
        n = rnd.randint(2, 500)
        ratio = round(rnd.uniform(0.05, 0.95), 4)
        n_classes = rnd.randint(1, 5)
        labels = [rnd.randrange(n_classes) for _ in range(n)]
        stratified = rnd.random() < 0.5 and min(Counter(labels).values()) >= 2
        try:
            result = train_test_split(labels, ratio, seed=rnd.getrandbits(32), stratified=stratified)
        except DegenerateSplitError:
            degenerate += 1
            want = math.ceil(Fraction(str(ratio)) * n)
            partition_ok &= want >= n or want < 1
            continue
        checked += 1
        combined = sorted(result.train_indices + result.test_indices)
        partition_ok &= combined == list(range(n))
        partition_ok &= bool(result.train_indices) and bool(result.test_indices)
        partition_ok &= len(result.train_indices) == math.ceil(Fraction(str(ratio)) * n)
    report_line(
        3,
        "split fidelity",
        sizes_ok and partition_ok,
        f"sizes=(548,60) ok={sizes_ok}, partition ok on {checked} splits "
        f"({degenerate} degenerate draws rejected correctly)",
    )


def test_criterion_4_hidden_unit_trend(default_corpus, default_settings):
    """Hidden-unit sweep {1,10,100,1000} on the default corpus: the wide
    model beats HN=1 by >= 0.10 and the plateau holds within 0.05; < 120 s."""
    started = time.perf_counter()
    result = sweep_hidden_units(default_corpus, [1, 10, 100, 1000], default_settings, TrainConfig())
    elapsed = time.perf_counter() - started
    acc = {p.value: p.accuracy for p in result.points}
    rise_ok = acc[100] >= acc[1] + 0.10
    plateau_ok = acc[1000] >= acc[100] - 0.05
    report_line(
        4,
        "hidden-unit trend",
        rise_ok and plateau_ok and elapsed < 120.0,
        f"acc={ {k: round(v, 4) for k, v in acc.items()} }, rise_ok={rise_ok}, "
        f"plateau_ok={plateau_ok}, {elapsed:.1f}s (<120s)",
    )


def test_criterion_5_num_words_trend(default_corpus, default_settings):
    """Vocabulary sweep {100, 2000} at HN=100: more words buy >= 0.05
    accuracy; < 60 s."""
    started = time.perf_counter()
    result = sweep_num_words(
        default_corpus, [100, 2000], default_settings, TrainConfig(), hidden_units=100
    )
    elapsed = time.perf_counter() - started
    acc = {p.value: p.accuracy for p in result.points}
    gap_ok = acc[2000] >= acc[100] + 0.05
    report_line(
        5,
        "num-words trend",
        gap_ok and elapsed < 60.0,
        f"acc={ {k: round(v, 4) for k, v in acc.items()} }, gap_ok={gap_ok}, "
        f"{elapsed:.1f}s (<60s)",
    )


def test_criterion_6_and_7_quality_bar_and_confusion_identities(
    default_corpus, default_settings
):
    """End to end at HN=100 / 2000 words the test accuracy reaches 0.90 in
    < 30 s (criterion 6), and the report satisfies the confusion-matrix
    identities exactly (criterion 7)."""
    started = time.perf_counter()
    base = build_pipeline_base(default_corpus, default_settings)
    dataset = featurize(base, default_settings, 2000)
    fit = fit_and_score(dataset, base.class_names, 100, TrainConfig())
    elapsed = time.perf_counter() - started
    report_line(
        6,
        "end-to-end quality bar",
        fit.test_accuracy >= 0.90 and elapsed < 30.0,
        f"accuracy={fit.test_accuracy:.4f} (>=0.90), {elapsed:.1f}s (<30s)",
    )

    cm = fit.report.confusion
    trace = sum(cm.counts[i][i] for i in range(cm.size))
    total = sum(sum(row) for row in cm.counts)
    identity_ok = fit.report.accuracy == trace / total
    row_sums_ok = cm.row_sums() == [
        Counter(dataset.y_test).get(c, 0) for c in range(len(base.class_names))
    ]
    report_line(
        7,
        "confusion-matrix identities",
        identity_ok and row_sums_ok,
        f"trace/total == accuracy: {identity_ok}, row sums == test counts: {row_sums_ok}",
    )


def test_criterion_8_early_stopping_tracks_best_mse():
    """On the separable toy, training stops before the epoch cap and the
    returned parameters reproduce the best recorded validation MSE."""
    X, Y = toy_separable()
    cfg = TrainConfig(seed=1)
    params, trace = train(X, Y, LayerSpec(2, 8, 2), cfg)
    stopped_ok = trace.stopped_early and trace.epochs_run < cfg.max_epochs

    # Reconstruct the internal validation rows from the documented stream.
    n = X.rows
    order = list(range(n))
    Rng(cfg.seed, "train/val-split").shuffle(order)
    val_rows = sorted(order[: int(n * cfg.validation_fraction)])
    X_val = gather_rows(X, val_rows)
    y_val = [Y.indices[i] for i in val_rows]
    _, probs = forward(params, X_val)
    names = list(Y.class_names)
    returned_mse = loss(probs, one_hot([names[c] for c in y_val], names), "mse")
    best_recorded = min(r.val_mse for r in trace.records)
    best_ok = returned_mse == best_recorded
    report_line(
        8,
        "early stopping honors MSE rule",
        stopped_ok and best_ok,
        f"stopped_early={trace.stopped_early} at epoch {trace.epochs_run} (<{cfg.max_epochs}), "
        f"returned_val_mse={returned_mse:.3e} == best_recorded={best_recorded:.3e}: {best_ok}",
    )


def test_criterion_9_cmd_train_determinism(tmp_path, capsys):
    """Two cmd_train runs with the same config and seed write byte-identical
    model and report files (all five artifacts compared)."""
    corpus_dir = tmp_path / "corpus"
    assert cli_main(["gen", "--out-dir", str(corpus_dir), "--seed", "42"]) == 0
    outputs = []
    for run in ("a", "b"):
        out_dir = tmp_path / run
        code = cli_main(
            ["train", "--corpus", str(corpus_dir), "--out-dir", str(out_dir), "--seed", "42"]
        )
        assert code == 0
        outputs.append(out_dir)
    capsys.readouterr()  # drop the training output; only artifacts matter here
    names = ["model.json", "report.json", "confusion.csv", "confusion.svg", "train_trace.csv"]
    identical = {
        name: (outputs[0] / name).read_bytes() == (outputs[1] / name).read_bytes()
        for name in names
    }
    report_line(
        9,
        "cmd_train determinism",
        all(identical.values()),
        f"byte-identical: {identical}",
    )


def test_criterion_10_parser_fixture_manifest():
    """The bundled 12-message mbox/eml fixture set parses to the exact
    manifest: document counts, labels, and extracted-text SHA-256 hashes."""
    manifest = json.loads((FIXTURES / "manifest.json").read_text())
    corpora = {
        "mbox": load_corpus(FIXTURES / manifest["mbox"]["path"]),
        "dir": load_corpus(FIXTURES / manifest["dir"]["path"]),
    }
    problems = []
    total = 0
    for part, corpus in corpora.items():
        docs = {d.id: d for d in corpus.documents}
        for expected in manifest[part]["documents"]:
            total += 1
            doc = docs.get(expected["id"])
            if doc is None:
                problems.append(f"{expected['id']} missing")
                continue
            if doc.label != expected["label"]:
                problems.append(f"{expected['id']} label {doc.label!r}")
            digest = hashlib.sha256(doc.text.encode("utf-8")).hexdigest()
            if digest != expected["text_sha256"]:
                problems.append(f"{expected['id']} text hash mismatch")
    count_ok = (
        total == manifest["total_documents"]
        and sum(len(c.documents) for c in corpora.values()) == manifest["total_documents"]
    )
    report_line(
        10,
        "parser fixtures",
        count_ok and not problems,
        f"{total} documents checked; problems: {problems or 'none'}",
    )
