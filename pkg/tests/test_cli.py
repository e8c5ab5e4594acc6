import json

import pytest

from smudge.cli import main
from smudge.corpus import load_dataset, save_dataset

from conftest import make_corpus, make_distractor


@pytest.fixture()
def toy_files(tmp_path):
    train = tmp_path / "corpus.jsonl"
    distractor = tmp_path / "distractor.jsonl"
    save_dataset(make_corpus(240, 4, seed=61), train)
    save_dataset(make_distractor(120, seed=62), distractor)
    return train, distractor


def _run(argv):
    return main([str(a) for a in argv])


class TestIngest:
    def test_normalizes_and_summarizes(self, tmp_path, capsys):
        src = tmp_path / "raw.csv"
        src.write_text("id,text,label\na,words here,x\nb,more words,y\n", encoding="utf-8")
        out = tmp_path / "canonical.jsonl"
        assert _run(["ingest", src, "--format", "delimited", "--out", out]) == 0
        summary = json.loads(capsys.readouterr().out)
        assert summary["documents"] == 2 and summary["labels"] == 2
        assert (tmp_path / "canonical.jsonl.summary.json").exists()
        assert load_dataset(out).ids() == ["a", "b"]

    def test_malformed_input_exits_2(self, tmp_path, capsys):
        src = tmp_path / "bad.jsonl"
        src.write_text('{"id": "1", "text": "x"}\n', encoding="utf-8")  # no label
        assert _run(["ingest", src, "--out", tmp_path / "o.jsonl"]) == 2
        assert "label" in capsys.readouterr().err

    def test_empty_input_exits_2(self, tmp_path):
        src = tmp_path / "empty.jsonl"
        src.write_text("", encoding="utf-8")
        assert _run(["ingest", src, "--out", tmp_path / "o.jsonl"]) == 2

    def test_newsgroups_directory(self, tmp_path, capsys):
        root = tmp_path / "ng"
        for group in ("alt.a", "rec.b"):
            (root / group).mkdir(parents=True)
            for i in range(2):
                (root / group / str(i)).write_text(f"body {group} {i}", encoding="utf-8")
        assert _run(["ingest", root, "--format", "newsgroups", "--out", tmp_path / "ng.jsonl"]) == 0
        assert json.loads(capsys.readouterr().out)["documents"] == 4


class TestSynth:
    def test_builds_five_label_dataset(self, tmp_path, capsys):
        paths = []
        for i in range(5):
            p = tmp_path / f"src{i}.jsonl"
            save_dataset(make_corpus(8, 2, seed=i), p)
            paths.append(p)
        out = tmp_path / "synthetic.jsonl"
        argv = ["synth", "--out", out]
        for i, p in enumerate(paths):
            argv += ["--source", f"s{i}={p}"]
        assert _run(argv) == 0
        assert json.loads(capsys.readouterr().out)["labels"] == 5

    def test_single_source_exits_2(self, tmp_path):
        p = tmp_path / "one.jsonl"
        save_dataset(make_corpus(8, 2, seed=0), p)
        assert _run(["synth", "--source", f"a={p}", "--out", tmp_path / "x.jsonl"]) == 2


class TestSplit:
    def test_writes_disjoint_parts(self, toy_files, tmp_path):
        train, _ = toy_files
        out_train, out_test = tmp_path / "tr.jsonl", tmp_path / "te.jsonl"
        assert _run(
            ["split", train, "--test-fraction", "0.3", "--seed", "5",
             "--out-train", out_train, "--out-test", out_test]
        ) == 0
        tr, te = load_dataset(out_train), load_dataset(out_test)
        assert len(tr) == 168 and len(te) == 72
        assert set(tr.ids()).isdisjoint(te.ids())


class TestNoise:
    def test_level_zero_output_equals_input(self, toy_files, tmp_path):
        train, _ = toy_files
        out = tmp_path / "noised.jsonl"
        assert _run(["noise", train, "--level", "0", "--out", out]) == 0
        assert load_dataset(out).documents == load_dataset(train).documents

    def test_rerun_is_byte_identical(self, toy_files, tmp_path):
        train, distractor = toy_files
        outs = []
        for run in (1, 2):
            out = tmp_path / f"n{run}.jsonl"
            assert _run(
                ["noise", train, "--level", "0.5", "--seed", "7",
                 "--distractor", distractor, "--out", out]
            ) == 0
            outs.append(out.read_bytes())
        assert outs[0] == outs[1]

    def test_missing_distractor_exits_2(self, toy_files, tmp_path, capsys):
        train, _ = toy_files
        code = _run(["noise", train, "--level", "0.5", "--out", tmp_path / "n.jsonl"])
        assert code == 2
        assert "distractor" in capsys.readouterr().err

    def test_disabled_interspersal_needs_no_distractor(self, toy_files, tmp_path):
        train, _ = toy_files
        out = tmp_path / "n.jsonl"
        assert _run(
            ["noise", train, "--level", "0.5", "--no-intersperse", "--out", out]
        ) == 0
        flags = {f for doc in load_dataset(out) for f in doc.provenance}
        assert "interspersed" not in flags and "truncated" in flags

    def test_full_noise_output_reloads(self, toy_files, tmp_path):
        # p=1.0 with interspersal off empties every text; the provenance flag
        # keeps the file loadable
        train, _ = toy_files
        out = tmp_path / "n.jsonl"
        assert _run(
            ["noise", train, "--level", "1.0", "--no-intersperse", "--out", out]
        ) == 0
        reloaded = load_dataset(out)
        assert len(reloaded) == 2 * 240  # every document cloned at p=1


class TestTrainEval:
    def test_round_trip(self, tmp_path, capsys):
        corpus_path = tmp_path / "sep.jsonl"
        save_dataset(make_corpus(100, 2, seed=63, vocab_per_label=20, doc_len=12), corpus_path)
        model_path = tmp_path / "model.npz"
        vocab_path = tmp_path / "vocab.txt"
        assert _run(
            ["train", corpus_path, "--family", "bow_linear", "--seed", "3",
             "--out", model_path, "--vocab-out", vocab_path]
        ) == 0
        assert model_path.exists() and vocab_path.exists()
        capsys.readouterr()
        assert _run(["eval", corpus_path, "--model", model_path]) == 0
        result = json.loads(capsys.readouterr().out)
        assert result["accuracy"] == 1.0


def _sweep_config(tmp_path, toy_files, grid="0,0.25,0.5", extra=""):
    train, distractor = toy_files
    cfg = tmp_path / "sweep.cfg"
    cfg.write_text(
        f"""
# toy sweep configuration
seed = 42
dataset.path = {train}
noise.distractor_path = {distractor}
noise.grid = {grid}
eval.folds = 4
model.family = bow_linear
model.epochs = 3
out.dir = {tmp_path / 'run'}
{extra}
""",
        encoding="utf-8",
    )
    return cfg


class TestSweep:
    def test_writes_report_and_curves(self, toy_files, tmp_path, capsys):
        cfg = _sweep_config(tmp_path, toy_files)
        assert _run(["sweep", "--config", cfg]) == 0
        run_dir = tmp_path / "run"
        report = json.loads((run_dir / "report.json").read_text())
        assert report["grid"] == [0.0, 0.25, 0.5]
        assert {"dataset", "classifier", "grid", "levels", "derived", "metadata"} <= set(report)
        assert report["metadata"]["config"]["seed"] == "42"
        curves = (run_dir / "curves.csv").read_text().splitlines()
        assert curves[0] == "level,dirty_cv_mean,dirty_cv_std,clean_test"
        assert len(curves) == 4
        assert (run_dir / "vocab" / "vocabulary_level_0.0.txt").exists()

    def test_rerun_is_byte_identical(self, toy_files, tmp_path):
        cfg = _sweep_config(tmp_path, toy_files, grid="0,0.25")
        out = tmp_path / "run"
        captured = []
        for _ in (1, 2):
            assert _run(["sweep", "--config", cfg]) == 0
            captured.append(
                ((out / "report.json").read_bytes(), (out / "curves.csv").read_bytes())
            )
        assert captured[0] == captured[1]

    def test_set_overrides(self, toy_files, tmp_path):
        cfg = _sweep_config(tmp_path, toy_files, grid="0,0.25")
        out = tmp_path / "o"
        assert _run(["sweep", "--config", cfg, "--set", "eval.folds=3", "--out", out]) == 0
        report = json.loads((out / "report.json").read_text())
        assert report["metadata"]["folds"] == 3

    def test_subsample_before_split(self, toy_files, tmp_path):
        cfg = _sweep_config(tmp_path, toy_files, grid="0,0.25", extra="dataset.subsample = 120")
        out = tmp_path / "sub"
        assert _run(["sweep", "--config", cfg, "--out", out]) == 0
        report = json.loads((out / "report.json").read_text())
        assert report["metadata"]["train_documents"] == 84
        assert report["metadata"]["test_documents"] == 36

    def test_unknown_config_key_exits_2(self, toy_files, tmp_path, capsys):
        cfg = _sweep_config(tmp_path, toy_files, extra="bogus.key = 1")
        assert _run(["sweep", "--config", cfg]) == 2
        assert "bogus.key" in capsys.readouterr().err

    def test_multi_family_outputs(self, toy_files, tmp_path):
        cfg = _sweep_config(tmp_path, toy_files, grid="0,0.25")
        out = tmp_path / "multi"
        assert _run(
            ["sweep", "--config", cfg, "--set", "model.family=bow_linear,bag_embedding", "--out", out]
        ) == 0
        report = json.loads((out / "report.json").read_text())
        assert [r["classifier"]["family"] for r in report["runs"]] == [
            "bow_linear", "bag_embedding",
        ]
        curves = (out / "curves.csv").read_text().splitlines()
        assert curves[0] == "family,level,dirty_cv_mean,dirty_cv_std,clean_test"

    def test_runtime_failure_exits_3(self, toy_files, tmp_path, capsys):
        train, _ = toy_files
        bad_distractor = tmp_path / "useless.jsonl"
        bad_distractor.write_text(
            '{"id": "z", "text": "!!!", "label": "j"}\n', encoding="utf-8"
        )
        cfg = _sweep_config(tmp_path, (train, bad_distractor), grid="0,0.25")
        assert _run(["sweep", "--config", cfg]) == 3
        assert "0.25" in capsys.readouterr().err
