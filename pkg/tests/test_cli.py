"""CLI behavior: subcommands, config precedence, exit codes, artifacts."""

import json
from pathlib import Path

import pytest

from mailcat.cli import main

FIXTURES = Path(__file__).parent / "fixtures"


def run_cli(argv, capsys):
    """Invoke the CLI in-process; normalize SystemExit into a return code."""
    try:
        code = main([str(a) for a in argv])
    except SystemExit as exc:
        code = exc.code if isinstance(exc.code, int) else 1
    captured = capsys.readouterr()
    return code, captured.out, captured.err


@pytest.fixture(scope="module")
def corpus_dir(tmp_path_factory):
    """Small synthetic corpus materialized once for the whole module."""
    root = tmp_path_factory.mktemp("corpus")
    from mailcat.experiments import default_synthetic_spec, generate_synthetic_corpus, write_corpus_dir
    from dataclasses import replace

    spec = default_synthetic_spec(seed=11)
    spec = replace(spec, labels=spec.labels[:3], shared_vocab_size=400, tokens_per_email=(10, 40))
    write_corpus_dir(generate_synthetic_corpus(spec), root)
    return root


FAST_TRAIN_FLAGS = [
    "--num-words", "300",
    "--hidden-units", "16",
    "--max-epochs", "6",
    "--min-label-count", "2",
]


class TestStats:
    def test_breakdown_layout_and_totals(self, corpus_dir, tmp_path, capsys):
        code, out, _ = run_cli(
            ["stats", "--corpus", corpus_dir, "--out-dir", tmp_path], capsys
        )
        assert code == 0
        assert "Label email breakdown:" in out
        assert "\tbilling:102" in out
        assert "Total emails: 413" in out  # 102 + 238 + 73
        assert "Total word count:" in out
        csv_lines = (tmp_path / "stats.csv").read_text().splitlines()
        assert csv_lines[0] == "label,emails,words"
        assert len(csv_lines) == 4

    def test_fixture_corpus_counts_match_manifest(self, tmp_path, capsys):
        manifest = json.loads((FIXTURES / "manifest.json").read_text())
        expected = {}
        for doc in manifest["dir"]["documents"]:
            expected[doc["label"]] = expected.get(doc["label"], 0) + 1
        code, out, _ = run_cli(
            ["stats", "--corpus", FIXTURES / "maildir", "--out-dir", tmp_path], capsys
        )
        assert code == 0
        for label, count in expected.items():
            assert f"\t{label}:{count}" in out

    def test_empty_directory_exits_2(self, tmp_path, capsys):
        empty = tmp_path / "empty"
        empty.mkdir()
        code, _, err = run_cli(["stats", "--corpus", empty, "--out-dir", tmp_path], capsys)
        assert code == 2
        assert "no documents" in err

    def test_missing_corpus_flag_is_usage_error(self, tmp_path, capsys):
        code, _, _ = run_cli(["stats", "--out-dir", tmp_path], capsys)
        assert code == 1


class TestTrain:
    def test_writes_five_files_and_prints_accuracy(self, corpus_dir, tmp_path, capsys):
        code, out, _ = run_cli(
            ["train", "--corpus", corpus_dir, "--out-dir", tmp_path, *FAST_TRAIN_FLAGS], capsys
        )
        assert code == 0
        names = sorted(p.name for p in tmp_path.iterdir())
        assert names == [
            "confusion.csv",
            "confusion.svg",
            "model.json",
            "report.json",
            "train_trace.csv",
        ]
        printed = next(line for line in out.splitlines() if line.startswith("Test accuracy:"))
        printed_value = float(printed.split(":")[1])
        report = json.loads((tmp_path / "report.json").read_text())
        assert printed_value == report["accuracy"]

    def test_same_seed_runs_are_byte_identical(self, corpus_dir, tmp_path, capsys):
        out_a, out_b = tmp_path / "a", tmp_path / "b"
        for out in (out_a, out_b):
            code, _, _ = run_cli(
                ["train", "--corpus", corpus_dir, "--out-dir", out, "--seed", "5", *FAST_TRAIN_FLAGS],
                capsys,
            )
            assert code == 0
        for name in ("model.json", "report.json", "confusion.csv", "confusion.svg", "train_trace.csv"):
            assert (out_a / name).read_bytes() == (out_b / name).read_bytes(), name

    def test_confusion_identities_hold_in_report(self, corpus_dir, tmp_path, capsys):
        code, _, _ = run_cli(
            ["train", "--corpus", corpus_dir, "--out-dir", tmp_path, *FAST_TRAIN_FLAGS], capsys
        )
        assert code == 0
        report = json.loads((tmp_path / "report.json").read_text())
        confusion = report["confusion"]
        trace = sum(confusion[i][i] for i in range(len(confusion)))
        total = sum(sum(row) for row in confusion)
        assert report["accuracy"] == trace / total
        assert total == report["test_rows"]

    def test_best_words_flag_adds_score_outputs(self, corpus_dir, tmp_path, capsys):
        code, _, _ = run_cli(
            ["train", "--corpus", corpus_dir, "--out-dir", tmp_path, "--best-words", "10",
             *FAST_TRAIN_FLAGS],
            capsys,
        )
        assert code == 0
        assert (tmp_path / "feature_scores.csv").exists()
        assert (tmp_path / "feature_scores.svg").exists()
        lines = (tmp_path / "feature_scores.csv").read_text().splitlines()
        assert lines[0] == "rank,word,score"
        assert len(lines) == 11

    def test_config_file_with_flag_override(self, corpus_dir, tmp_path, capsys):
        config = tmp_path / "run.conf"
        config.write_text(
            f"corpus = {corpus_dir}\nnum_words = 300\nhidden_units = 16\n"
            "max_epochs = 6\nmin_label_count = 2\nseed = 9\n"
        )
        out_dir = tmp_path / "out"
        code, _, _ = run_cli(
            ["train", "--config", config, "--out-dir", out_dir, "--max-epochs", "2"], capsys
        )
        assert code == 0
        report = json.loads((out_dir / "report.json").read_text())
        assert report["epochs_run"] <= 2  # flag beat the config file

    def test_unknown_config_key_is_usage_error(self, corpus_dir, tmp_path, capsys):
        config = tmp_path / "bad.conf"
        config.write_text("corpus = x\nnum_words = 10\nlearningrate = 0.5\n")
        code, _, err = run_cli(["train", "--config", config], capsys)
        assert code == 1
        assert "learningrate" in err


@pytest.fixture(scope="module")
def model_path(corpus_dir, tmp_path_factory):
    out = tmp_path_factory.mktemp("model")
    code = main(["train", "--corpus", str(corpus_dir), "--out-dir", str(out), *FAST_TRAIN_FLAGS])
    assert code == 0
    return out / "model.json"


class TestPredict:
    def test_signature_words_predict_their_label(self, model_path, tmp_path, capsys):
        email = tmp_path / "billing.txt"
        email.write_text("billing00 billing01 billing02 billing03 billing04")
        code, out, _ = run_cli(["predict", "--model", model_path, "--input", email], capsys)
        assert code == 0
        assert out.splitlines()[0] == "label: billing"

    def test_probabilities_sum_to_one_at_4dp(self, model_path, tmp_path, capsys):
        email = tmp_path / "x.txt"
        email.write_text("devops00 devops05 word0003")
        code, out, _ = run_cli(["predict", "--model", model_path, "--input", email], capsys)
        assert code == 0
        probs = [float(line.split(":")[1]) for line in out.splitlines()[2:]]
        assert abs(sum(probs) - 1.0) <= 2e-4

    def test_eml_input_is_parsed(self, model_path, tmp_path, capsys):
        email = tmp_path / "msg.eml"
        email.write_text("Subject: family00 family01\n\nfamily02 family03 family04\n")
        code, out, _ = run_cli(["predict", "--model", model_path, "--input", email], capsys)
        assert code == 0
        assert out.splitlines()[0] == "label: family"

    def test_empty_input_warns_and_predicts_deterministically(self, model_path, tmp_path, capsys):
        # A zero feature vector flows through the trained biases, so the
        # label is the model's prior; exact ties go to the lowest class
        # index (covered in the model tests).
        email = tmp_path / "none.txt"
        email.write_text("zzz qqq")
        code, out, err = run_cli(["predict", "--model", model_path, "--input", email], capsys)
        assert code == 0
        assert "none of the model's feature words" in err
        first = out.splitlines()[0]
        assert first.startswith("label: ")
        again = run_cli(["predict", "--model", model_path, "--input", email], capsys)
        assert again[1].splitlines()[0] == first

    def test_missing_model_exits_2(self, tmp_path, capsys):
        code, _, _ = run_cli(["predict", "--model", tmp_path / "nope.json"], capsys)
        assert code == 2


class TestSweep:
    def test_words_sweep_prints_table_and_writes_reports(self, corpus_dir, tmp_path, capsys):
        code, out, _ = run_cli(
            ["sweep", "--which", "words", "--grid", "50,300", "--corpus", corpus_dir,
             "--out-dir", tmp_path, *FAST_TRAIN_FLAGS],
            capsys,
        )
        assert code == 0
        lines = out.splitlines()
        assert lines[0] == "Number of Words\tHidden Layers\tAccuracy"
        assert len(lines) == 3
        assert lines[1].startswith("50\t16\t")
        for suffix in ("csv", "svg", "json"):
            assert (tmp_path / f"sweep_num_words.{suffix}").exists()

    def test_hidden_sweep_table(self, corpus_dir, tmp_path, capsys):
        code, out, _ = run_cli(
            ["sweep", "--which", "hidden", "--grid", "2,8", "--corpus", corpus_dir,
             "--out-dir", tmp_path, *FAST_TRAIN_FLAGS],
            capsys,
        )
        assert code == 0
        assert out.splitlines()[0] == "Hidden Units\tAccuracy"
        assert (tmp_path / "sweep_hidden_units.csv").exists()

    def test_unsorted_grid_is_usage_error(self, corpus_dir, tmp_path, capsys):
        code, _, _ = run_cli(
            ["sweep", "--which", "hidden", "--grid", "10,5", "--corpus", corpus_dir,
             "--out-dir", tmp_path],
            capsys,
        )
        assert code == 1

    def test_sweep_rerun_identical_csv_outside_timing(self, corpus_dir, tmp_path, capsys):
        out_a, out_b = tmp_path / "a", tmp_path / "b"
        for out in (out_a, out_b):
            code, _, _ = run_cli(
                ["sweep", "--which", "hidden", "--grid", "2,4", "--corpus", corpus_dir,
                 "--out-dir", out, *FAST_TRAIN_FLAGS],
                capsys,
            )
            assert code == 0

        def strip_timing(path):
            return [
                row.split(",")[:2] + row.split(",")[3:] for row in path.read_text().splitlines()
            ]

        assert strip_timing(out_a / "sweep_hidden_units.csv") == strip_timing(
            out_b / "sweep_hidden_units.csv"
        )


class TestGen:
    def test_writes_labeled_directories(self, tmp_path, capsys):
        code, out, _ = run_cli(["gen", "--out-dir", tmp_path / "c", "--seed", "42"], capsys)
        assert code == 0
        labels = sorted(p.name for p in (tmp_path / "c").iterdir())
        assert labels == [
            "billing", "devops", "family", "newsletters", "receipts", "shipping", "travel",
        ]
        assert "total:589" in out
        assert len(list((tmp_path / "c" / "devops").iterdir())) == 238

    def test_gen_then_stats_roundtrip(self, tmp_path, capsys):
        code, _, _ = run_cli(["gen", "--out-dir", tmp_path / "c", "--seed", "3"], capsys)
        assert code == 0
        code, out, _ = run_cli(
            ["stats", "--corpus", tmp_path / "c", "--out-dir", tmp_path / "s"], capsys
        )
        assert code == 0
        assert "Total emails: 589" in out


class TestHelp:
    def test_help_lists_every_config_key_with_default(self, capsys):
        from mailcat.cli import _CONFIG_SPEC

        merged_help = ""
        for sub in ("stats", "train", "predict", "sweep", "gen"):
            with pytest.raises(SystemExit) as exc_info:
                main([sub, "--help"])
            assert exc_info.value.code == 0
            merged_help += capsys.readouterr().out
        for key in _CONFIG_SPEC:
            assert f"--{key.replace('_', '-')}" in merged_help, key
        assert "(default: 0.1)" in merged_help  # learning rate default is visible
