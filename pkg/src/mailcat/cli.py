"""Command-line interface: stats, train, predict, sweep, gen.

Configuration is a flat key=value file plus flags; flags override the file,
defaults fill the rest.  Exit codes: 1 usage, 2 data, 3 runtime.  Logs go
to stderr, data to stdout, file outputs under --out-dir.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import dataclass
from pathlib import Path

from . import __version__, kernels
from .errors import (
    DegenerateSplitError,
    DivergenceError,
    EmptyCorpusError,
    EmptyVocabularyError,
    IoError,
    MailcatError,
    MalformedMboxError,
    MalformedMimeError,
    ModelFormatError,
    SchemaError,
    StratifyError,
    SyntheticSpecError,
    UnknownLabelError,
)
from .evaluate import render_heatmap, write_confusion_csv
from .experiments import (
    PipelineSettings,
    build_pipeline_base,
    default_synthetic_spec,
    emit_report,
    featurize,
    fit_and_score,
    generate_synthetic_corpus,
    sweep_hidden_units,
    sweep_num_words,
    write_corpus_dir,
)
from .features import WEIGHTING_MODES, best_words_report, write_feature_scores_csv
from .ingest import corpus_stats, extract_text, load_corpus, parse_eml
from .matrix import Matrix
from .model import LOSS_KINDS, LayerSpec, TrainConfig, forward, load_model, save_model
from .svg import bar_chart
from .text import StopWordList, tokenize

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_RUNTIME = 3

_DATA_ERRORS = (
    IoError,
    SchemaError,
    EmptyCorpusError,
    EmptyVocabularyError,
    MalformedMboxError,
    MalformedMimeError,
    ModelFormatError,
    UnknownLabelError,
    DegenerateSplitError,
    StratifyError,
    SyntheticSpecError,
)

log = logging.getLogger("mailcat")


def _parse_bool(value: str) -> bool:
    lowered = value.strip().lower()
    if lowered in ("true", "yes", "1", "on"):
        return True
    if lowered in ("false", "no", "0", "off"):
        return False
    raise ValueError(f"expected a boolean, got {value!r}")


def _int_or_none(value: str):
    lowered = value.strip().lower()
    return None if lowered in ("", "none") else int(value)


@dataclass
class RunConfig:
    corpus: str | None = None
    corpus_kind: str = "auto"
    stop_words: str | None = None
    min_label_count: int = 10
    num_words: int = 2000
    select_k: int | None = None
    weighting: str = "binary"
    hidden_units: int = 100
    learning_rate: float = 0.1
    batch_size: int = 32
    max_epochs: int = 50
    loss: str = "cross_entropy"
    early_stop_min_delta: float = 1e-4
    early_stop_patience: int = 3
    validation_fraction: float = 0.1
    train_ratio: float = 0.9
    stratified: bool = True
    out_dir: str = "out"
    seed: int = 42

    def stop_word_list(self) -> StopWordList:
        if self.stop_words is None:
            return StopWordList.default()
        return StopWordList.from_file(self.stop_words)

    def pipeline_settings(self) -> PipelineSettings:
        return PipelineSettings(
            stop_words=self.stop_word_list(),
            min_label_count=self.min_label_count,
            num_words=self.num_words,
            select_k=self.select_k,
            weighting=self.weighting,
            train_ratio=self.train_ratio,
            stratified=self.stratified,
            seed=self.seed,
        )

    def train_config(self) -> TrainConfig:
        return TrainConfig(
            learning_rate=self.learning_rate,
            batch_size=self.batch_size,
            max_epochs=self.max_epochs,
            loss_kind=self.loss,
            early_stop_min_delta=self.early_stop_min_delta,
            early_stop_patience=self.early_stop_patience,
            validation_fraction=self.validation_fraction,
            seed=self.seed,
        )


# (caster, default) for every config-file key; kept in sync with RunConfig.
_CONFIG_SPEC = {
    "corpus": (str, None),
    "corpus_kind": (str, "auto"),
    "stop_words": (str, None),
    "min_label_count": (int, 10),
    "num_words": (int, 2000),
    "select_k": (_int_or_none, None),
    "weighting": (str, "binary"),
    "hidden_units": (int, 100),
    "learning_rate": (float, 0.1),
    "batch_size": (int, 32),
    "max_epochs": (int, 50),
    "loss": (str, "cross_entropy"),
    "early_stop_min_delta": (float, 1e-4),
    "early_stop_patience": (int, 3),
    "validation_fraction": (float, 0.1),
    "train_ratio": (float, 0.9),
    "stratified": (_parse_bool, True),
    "out_dir": (str, "out"),
    "seed": (int, 42),
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse defaults to exit code 2; we use 1
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _add_config_flags(parser: argparse.ArgumentParser, keys: tuple[str, ...]) -> None:
    helps = {
        "corpus": "corpus source: mbox file, label-directory root, or CSV",
        "corpus_kind": "how to read --corpus",
        "stop_words": "stop-word file (one word per line); bundled list if omitted",
        "min_label_count": "drop labels with fewer emails than this",
        "num_words": "vocabulary truncated to the N most frequent words",
        "select_k": "keep the K best words by chi-square score",
        "weighting": "document-term weighting for training",
        "hidden_units": "hidden layer width",
        "learning_rate": "gradient-descent step size",
        "batch_size": "mini-batch size",
        "max_epochs": "epoch cap",
        "loss": "training loss",
        "early_stop_min_delta": "minimum validation-MSE improvement that counts",
        "early_stop_patience": "epochs without improvement before stopping",
        "validation_fraction": "share of training rows held out for monitoring",
        "train_ratio": "train share of the train/test split",
        "stratified": "stratify the train/test split (true/false)",
        "out_dir": "directory for output files",
        "seed": "seed for every random choice",
    }
    choices = {
        "corpus_kind": ("auto", "mbox", "dir", "csv"),
        "weighting": WEIGHTING_MODES,
        "loss": LOSS_KINDS,
    }
    casters = {"stratified": _parse_bool, "select_k": _int_or_none}
    for key in keys:
        caster, default = _CONFIG_SPEC[key]
        flag = "--" + key.replace("_", "-")
        parser.add_argument(
            flag,
            dest=key,
            type=casters.get(key, caster),
            choices=choices.get(key),
            default=None,
            metavar=key.upper() if key not in choices else None,
            help=f"{helps[key]} (default: {default})",
        )


_DEFAULT_GRIDS = {
    "hidden": "1,5,10,50,100,500,1000,1500,2000",
    "words": "100,500,1000,2000,5500,12000",
}

_PIPELINE_KEYS = (
    "corpus",
    "corpus_kind",
    "stop_words",
    "min_label_count",
    "num_words",
    "select_k",
    "weighting",
    "train_ratio",
    "stratified",
)
_TRAIN_KEYS = (
    "hidden_units",
    "learning_rate",
    "batch_size",
    "max_epochs",
    "loss",
    "early_stop_min_delta",
    "early_stop_patience",
    "validation_fraction",
)
_COMMON_KEYS = ("out_dir", "seed")


def make_parser() -> _Parser:
    parser = _Parser(prog="mailcat", description=__doc__)
    parser.add_argument("--version", action="version", version=f"mailcat {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_stats = sub.add_parser("stats", help="print per-label email and word counts")
    p_stats.add_argument("--config", help="key=value config file")
    _add_config_flags(p_stats, ("corpus", "corpus_kind", "stop_words") + _COMMON_KEYS)
    p_stats.set_defaults(func=cmd_stats)

    p_train = sub.add_parser("train", help="train a classifier and evaluate it")
    p_train.add_argument("--config", help="key=value config file")
    _add_config_flags(p_train, _PIPELINE_KEYS + _TRAIN_KEYS + _COMMON_KEYS)
    p_train.add_argument(
        "--best-words",
        type=int,
        default=0,
        metavar="N",
        help="also write the top-N chi-square words as CSV and SVG (default: 0 = off)",
    )
    p_train.set_defaults(func=cmd_train)

    p_predict = sub.add_parser("predict", help="classify one email with a trained model")
    p_predict.add_argument("--model", required=True, help="model JSON written by 'train'")
    p_predict.add_argument(
        "--input", default="-", help="eml or text file; '-' reads text from stdin (default: -)"
    )
    p_predict.add_argument(
        "--format",
        choices=("auto", "text", "eml"),
        default="auto",
        help="input format; auto uses the file extension (default: auto)",
    )
    p_predict.set_defaults(func=cmd_predict)

    p_sweep = sub.add_parser("sweep", help="sweep hidden units or vocabulary size")
    p_sweep.add_argument("--config", help="key=value config file")
    p_sweep.add_argument(
        "--which", required=True, choices=("hidden", "words"), help="parameter to sweep"
    )
    p_sweep.add_argument(
        "--grid",
        default=None,
        help="comma-separated strictly increasing integers "
        f"(default: {_DEFAULT_GRIDS['hidden']} for hidden, {_DEFAULT_GRIDS['words']} for words)",
    )
    _add_config_flags(p_sweep, _PIPELINE_KEYS + _TRAIN_KEYS + _COMMON_KEYS)
    p_sweep.set_defaults(func=cmd_sweep)

    p_gen = sub.add_parser("gen", help="write the synthetic corpus as label directories")
    p_gen.add_argument("--config", help="key=value config file")
    p_gen.add_argument(
        "--signal-strength",
        type=float,
        default=0.3,
        help="probability that a token is a label signature word (default: 0.3)",
    )
    _add_config_flags(p_gen, _COMMON_KEYS)
    p_gen.set_defaults(func=cmd_gen)

    return parser


def _read_config_file(path: str, parser: _Parser) -> dict:
    values = {}
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        parser.error(f"cannot read config file: {exc}")
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            parser.error(f"{path}:{lineno}: expected key = value")
        key, _, raw = line.partition("=")
        key, raw = key.strip(), raw.strip()
        if key not in _CONFIG_SPEC:
            parser.error(f"{path}:{lineno}: unknown config key {key!r}")
        caster, _ = _CONFIG_SPEC[key]
        try:
            values[key] = caster(raw)
        except ValueError as exc:
            parser.error(f"{path}:{lineno}: bad value for {key}: {exc}")
    return values


def _resolve(args: argparse.Namespace, parser: _Parser) -> RunConfig:
    """defaults < config file < flags."""
    merged = {key: default for key, (_, default) in _CONFIG_SPEC.items()}
    if getattr(args, "config", None):
        merged.update(_read_config_file(args.config, parser))
    for key in _CONFIG_SPEC:
        flag_value = getattr(args, key, None)
        if flag_value is not None:
            merged[key] = flag_value
    if merged["weighting"] not in WEIGHTING_MODES:
        parser.error(f"weighting must be one of {WEIGHTING_MODES}")
    if merged["loss"] not in LOSS_KINDS:
        parser.error(f"loss must be one of {LOSS_KINDS}")
    if merged["corpus_kind"] not in ("auto", "mbox", "dir", "csv"):
        parser.error("corpus_kind must be auto, mbox, dir, or csv")
    return RunConfig(**merged)


def _require_corpus(cfg: RunConfig, parser: _Parser) -> str:
    if not cfg.corpus:
        parser.error("a corpus is required (--corpus or config key 'corpus')")
    return cfg.corpus


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------


def cmd_stats(args: argparse.Namespace, parser: _Parser) -> int:
    cfg = _resolve(args, parser)
    corpus = load_corpus(_require_corpus(cfg, parser), cfg.corpus_kind)
    stats = corpus_stats(corpus, cfg.stop_word_list())
    print("Label email breakdown:")
    for label in corpus.labels:
        print(f"\t{label}:{stats.per_label_email_count[label]}")
    print(f"Total emails: {stats.total_emails}")
    print("Label word breakdown:")
    for label in corpus.labels:
        print(f"\t{label}:{stats.per_label_word_count[label]}")
    print(f"Total word count: {stats.total_words}")

    out_dir = Path(cfg.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    csv_path = out_dir / "stats.csv"
    lines = ["label,emails,words"]
    lines += [
        f"{label},{stats.per_label_email_count[label]},{stats.per_label_word_count[label]}"
        for label in corpus.labels
    ]
    csv_path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    log.info("wrote %s", csv_path)
    return EXIT_OK


def cmd_train(args: argparse.Namespace, parser: _Parser) -> int:
    cfg = _resolve(args, parser)
    corpus = load_corpus(_require_corpus(cfg, parser), cfg.corpus_kind)
    settings = cfg.pipeline_settings()
    base = build_pipeline_base(corpus, settings)
    dataset = featurize(base, settings, settings.num_words)
    log.info(
        "kernels=%s documents=%d classes=%d features=%d train=%d test=%d",
        kernels.backend(),
        len(base.corpus.documents),
        len(base.class_names),
        len(dataset.feature_words),
        dataset.X_train.rows,
        dataset.X_test.rows,
    )
    fit = fit_and_score(dataset, base.class_names, cfg.hidden_units, cfg.train_config())

    out_dir = Path(cfg.out_dir)
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise IoError(f"cannot create output directory {out_dir}: {exc}") from exc
    spec = LayerSpec(len(dataset.feature_words), cfg.hidden_units, len(base.class_names))
    model_path = out_dir / "model.json"
    save_model(
        fit.params,
        spec,
        dataset.feature_words,
        base.class_names,
        model_path,
        weighting=settings.weighting,
        idf=dataset.idf,
    )
    report = fit.report
    report_path = out_dir / "report.json"
    report_doc = {
        "accuracy": report.accuracy,
        "class_names": list(base.class_names),
        "confusion": [list(row) for row in report.confusion.counts],
        "per_class_precision": list(report.per_class_precision),
        "per_class_recall": list(report.per_class_recall),
        "undefined_precision": list(report.undefined_precision),
        "undefined_recall": list(report.undefined_recall),
        "test_rows": report.confusion.total(),
        "hidden_units": cfg.hidden_units,
        "epochs_run": fit.trace.epochs_run,
        "stopped_early": fit.trace.stopped_early,
        "best_epoch": fit.trace.best_epoch,
        "pipeline": settings.snapshot(),
    }
    report_path.write_text(json.dumps(report_doc, indent=2) + "\n", encoding="utf-8")
    confusion_csv = out_dir / "confusion.csv"
    write_confusion_csv(report.confusion, confusion_csv)
    heat_svg, heat_text = render_heatmap(report.confusion, title="Confusion matrix")
    confusion_svg = out_dir / "confusion.svg"
    confusion_svg.write_bytes(heat_svg)
    trace_path = out_dir / "train_trace.csv"
    trace_lines = ["epoch,train_loss,val_loss,val_mse,val_accuracy"]
    trace_lines += [
        f"{r.epoch},{r.train_loss!r},{r.val_loss!r},{r.val_mse!r},{r.val_accuracy!r}"
        for r in fit.trace.records
    ]
    trace_path.write_text("\n".join(trace_lines) + "\n", encoding="utf-8")

    written = [model_path, report_path, confusion_csv, confusion_svg, trace_path]
    if args.best_words > 0:
        top = best_words_report(dataset.scores, args.best_words)
        scores_csv = out_dir / "feature_scores.csv"
        write_feature_scores_csv(top, scores_csv)
        scores_svg = out_dir / "feature_scores.svg"
        scores_svg.write_text(
            bar_chart(
                [fs.word for fs in top],
                [fs.score for fs in top],
                x_label="word",
                y_label="chi-square score",
                title="Best words by score",
            ),
            encoding="utf-8",
        )
        written += [scores_csv, scores_svg]

    print(heat_text)
    print(f"Test accuracy: {report.accuracy!r}")
    for path in written:
        log.info("wrote %s", path)
    return EXIT_OK


def _vectorize_for_model(tokens: list[str], model) -> tuple[Matrix, int]:
    col_of = {word: j for j, word in enumerate(model.feature_words)}
    counts: dict[int, int] = {}
    for token in tokens:
        j = col_of.get(token)
        if j is not None:
            counts[j] = counts.get(j, 0) + 1
    x = Matrix(1, len(model.feature_words))
    total = sum(counts.values())
    for j, count in counts.items():
        if model.weighting == "binary":
            x.data[j] = 1.0
        elif model.weighting == "count":
            x.data[j] = float(count)
        elif model.weighting == "freq":
            x.data[j] = count / total
        elif model.weighting == "tfidf":
            if model.idf is None:
                raise ModelFormatError("tfidf model file is missing its idf array")
            x.data[j] = count * model.idf[j]
    return x, total


def cmd_predict(args: argparse.Namespace, parser: _Parser) -> int:
    model = load_model(args.model)
    source = args.input
    fmt = args.format
    try:
        if source == "-":
            raw = sys.stdin.buffer.read()
            if fmt == "auto":
                fmt = "text"
        else:
            raw = Path(source).read_bytes()
            if fmt == "auto":
                fmt = "eml" if Path(source).suffix.lower() == ".eml" else "text"
    except OSError as exc:
        raise IoError(f"cannot read input {source}: {exc}") from exc
    if fmt == "eml":
        text = extract_text(parse_eml(raw))
    else:
        text = raw.decode("utf-8", errors="replace")
    tokens = tokenize(text, StopWordList.empty())
    x, known = _vectorize_for_model(tokens, model)
    if known == 0:
        print(
            "warning: input contains none of the model's feature words; "
            "prediction is uninformed",
            file=sys.stderr,
        )
    _, probs = forward(model.params, x)
    row = probs.row(0)
    best = max(range(len(row)), key=lambda c: (row[c], -c))
    print(f"label: {model.class_names[best]}")
    print("probabilities:")
    for name, p in zip(model.class_names, row):
        print(f"  {name}: {p:.4f}")
    return EXIT_OK


def cmd_sweep(args: argparse.Namespace, parser: _Parser) -> int:
    cfg = _resolve(args, parser)
    grid_text = args.grid if args.grid is not None else _DEFAULT_GRIDS[args.which]
    try:
        grid = [int(v) for v in grid_text.split(",") if v.strip()]
    except ValueError:
        parser.error(f"--grid must be comma-separated integers, got {grid_text!r}")
    if not grid or any(b <= a for a, b in zip(grid, grid[1:])):
        parser.error(f"--grid must be strictly increasing, got {grid_text!r}")
    corpus = load_corpus(_require_corpus(cfg, parser), cfg.corpus_kind)
    settings = cfg.pipeline_settings()
    train_cfg = cfg.train_config()
    if args.which == "hidden":
        result = sweep_hidden_units(corpus, grid, settings, train_cfg)
        print("Hidden Units\tAccuracy")
        for point in result.points:
            print(f"{point.value}\t{point.accuracy * 100:.2f}%")
    else:
        result = sweep_num_words(
            corpus, grid, settings, train_cfg, hidden_units=cfg.hidden_units
        )
        print("Number of Words\tHidden Layers\tAccuracy")
        for point in result.points:
            print(f"{point.value}\t{cfg.hidden_units}\t{point.accuracy * 100:.2f}%")
    for path in emit_report(result, cfg.out_dir):
        log.info("wrote %s", path)
    return EXIT_OK


def cmd_gen(args: argparse.Namespace, parser: _Parser) -> int:
    cfg = _resolve(args, parser)
    spec = default_synthetic_spec(seed=cfg.seed, signal_strength=args.signal_strength)
    corpus = generate_synthetic_corpus(spec)
    count = write_corpus_dir(corpus, cfg.out_dir)
    for label in corpus.labels:
        print(f"{label}:{corpus.label_counts()[label]}")
    print(f"total:{count}")
    log.info("wrote %d files under %s", count, cfg.out_dir)
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(stream=sys.stderr, level=logging.INFO, format="%(message)s", force=True)
    parser = make_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args, parser)
    except _DATA_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except DivergenceError as exc:
        print(f"error: training diverged: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except MailcatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
