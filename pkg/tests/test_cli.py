"""CLI behavior: artifacts, manifests, error contracts, library consistency."""

import json
import subprocess
import sys

import numpy as np
import pytest

import cogmatrix as cgm
from cogmatrix.cli import main, read_config_file


PAIRS = [
    ("nation", "nation"), ("culture", "kultur"), ("music", "musik"),
    ("theater", "theater"), ("problem", "problem"), ("nature", "natur"),
    ("figure", "figur"), ("action", "aktion"), ("center", "zentrum"),
    ("house", "haus"), ("water", "wasser"), ("friend", "freund"),
]
DISTRACT1 = ["gobble", "whisk", "plume", "dredge"]
DISTRACT2 = ["zwiebel", "quark", "schnur", "pfad"]


@pytest.fixture
def corpus(tmp_path):
    """Tiny two-language corpus with aligned statistics for the true pairs."""
    out = tmp_path / "corpus"
    out.mkdir()
    rng = np.random.default_rng(100)
    n_days = 8
    l1 = [p[0] for p in PAIRS] + DISTRACT1
    l2 = [p[1] for p in PAIRS] + DISTRACT2
    base_freq = [40, 36, 33, 30, 27, 24, 21, 18, 15, 12, 9, 6]
    f1 = {w: base_freq[i] for i, w in enumerate(l1[:12])}
    f2 = {w: base_freq[i] * 2 for i, w in enumerate(l2[:12])}
    for w in DISTRACT1:
        f1[w] = int(rng.integers(3, 45))
    for w in DISTRACT2:
        f2[w] = int(rng.integers(6, 90))
    patterns = {i: rng.integers(0, 9, size=n_days) for i in range(12)}
    d1 = {l1[i]: patterns[i] for i in range(12)}
    d2 = {l2[i]: patterns[i] * 2 for i in range(12)}
    for w in DISTRACT1:
        d1[w] = rng.integers(0, 9, size=n_days)
    for w in DISTRACT2:
        d2[w] = rng.integers(0, 9, size=n_days)
    c1, c2 = {}, {}
    for i in range(12):
        prof = {(i + k) % 12: 6 - k for k in (1, 2, 3)}
        c1[l1[i]] = {l1[j]: c for j, c in prof.items()}
        c2[l2[i]] = {l2[j]: c * 3 for j, c in prof.items()}
    for w in DISTRACT1:
        c1[w] = {l1[int(rng.integers(0, 12))]: int(rng.integers(1, 7))}
    for w in DISTRACT2:
        c2[w] = {l2[int(rng.integers(0, 12))]: int(rng.integers(1, 7))}

    for side, freq, daily, cooc in ((1, f1, d1, c1), (2, f2, d2, c2)):
        total = sum(freq.values()) * 10
        with open(out / f"freq{side}.tsv", "w", encoding="utf-8") as f:
            f.write(f"#total {total}\n")
            for w, c in freq.items():
                f.write(f"{w}\t{c}\n")
        with open(out / f"daily{side}.tsv", "w", encoding="utf-8") as f:
            f.write(f"#days {n_days}\n")
            for w, v in daily.items():
                f.write(w + "\t" + ",".join(str(int(x)) for x in v) + "\n")
        with open(out / f"cooc{side}.tsv", "w", encoding="utf-8") as f:
            for w, prof in cooc.items():
                for ctx, c in prof.items():
                    f.write(f"{w}\t{ctx}\t{c}\n")
    with open(out / "gold.tsv", "w", encoding="utf-8") as f:
        for a, b in PAIRS:
            f.write(f"{a}\t{b}\n")
    return out


def run_cli(*argv):
    return main([str(a) for a in argv])


class TestSynthCommand:
    def test_writes_matrix_gold_manifest(self, tmp_path):
        out = tmp_path / "syn"
        assert run_cli("synth", "--out", out, "--n-pairs", 8, "--seed", 3) == 0
        assert (out / "matrix.tsv").exists()
        assert (out / "gold.tsv").exists()
        manifest = json.loads((out / "manifest.json").read_text())
        assert manifest["command"] == "synth"
        assert manifest["config"]["n_pairs"] == 8
        assert manifest["version"] == cgm.__version__

    def test_matches_library_generation(self, tmp_path):
        out = tmp_path / "syn"
        run_cli("synth", "--out", out, "--n-pairs", 8, "--noise-sigma", 0.3, "--seed", 3)
        matrix = cgm.load_matrix(out / "matrix.tsv")
        gold = cgm.load_gold_pairs(out / "gold.tsv")
        lib_matrix, lib_gold = cgm.generate(
            cgm.SynthConfig(n_pairs=8, noise_sigma=0.3, signal_mu=1.0, rng_seed=3)
        )
        assert np.array_equal(matrix.scores, lib_matrix.scores)
        assert gold.pairs == lib_gold.pairs


class TestRescoreCommand:
    def test_byte_identical_to_library(self, tmp_path):
        syn = tmp_path / "syn"
        run_cli("synth", "--out", syn, "--n-pairs", 6, "--seed", 1)
        out = tmp_path / "resc"
        assert run_cli("rescore", "--out", out, "--matrix", syn / "matrix.tsv",
                       "--methods", "rr,fr,rr_fr_2step") == 0
        matrix = cgm.load_matrix(syn / "matrix.tsv")
        for method in ("rr", "fr", "rr_fr_2step"):
            expected = tmp_path / f"expected_{method}.tsv"
            cgm.save_matrix(cgm.apply(method, matrix), expected)
            assert (out / f"{method}.tsv").read_bytes() == expected.read_bytes()

    def test_unknown_method_is_usage_error(self, tmp_path, capsys):
        syn = tmp_path / "syn"
        run_cli("synth", "--out", syn, "--n-pairs", 4, "--seed", 1)
        rc = run_cli("rescore", "--out", tmp_path / "x", "--matrix", syn / "matrix.tsv",
                     "--methods", "rr,sideways")
        assert rc != 0
        assert "sideways" in capsys.readouterr().err


class TestEvalCommand:
    def test_matches_library_metrics(self, tmp_path, capsys):
        syn = tmp_path / "syn"
        run_cli("synth", "--out", syn, "--n-pairs", 10, "--noise-sigma", 0.4, "--seed", 5)
        out = tmp_path / "ev"
        assert run_cli("eval", "--out", out, "--gold", syn / "gold.tsv", syn / "matrix.tsv") == 0
        matrix = cgm.load_matrix(syn / "matrix.tsv")
        gold = cgm.load_gold_pairs(syn / "gold.tsv")
        curve = cgm.pr_curve(matrix, gold)
        report = (out / "report.tsv").read_text(encoding="utf-8")
        assert report == f"matrix\t{cgm.max_f1(curve):.4f}\t{cgm.iap11(curve):.4f}\n"

    def test_missing_gold_file_fails_cleanly(self, tmp_path, capsys):
        syn = tmp_path / "syn"
        run_cli("synth", "--out", syn, "--n-pairs", 4, "--seed", 1)
        rc = run_cli("eval", "--out", tmp_path / "ev", "--gold", tmp_path / "nope.tsv",
                     syn / "matrix.tsv")
        assert rc == 1
        assert "nope.tsv" in capsys.readouterr().err


class TestAssignCommand:
    def test_assignment_and_curve_written(self, tmp_path):
        syn = tmp_path / "syn"
        run_cli("synth", "--out", syn, "--n-pairs", 6, "--seed", 2)
        out = tmp_path / "asn"
        assert run_cli("assign", "--out", out, "--matrix", syn / "matrix.tsv",
                       "--gold", syn / "gold.tsv") == 0
        assert (out / "assignment.tsv").exists()
        curve, method = cgm.load_curve(out / "curve_max_assignment.tsv")
        assert method == "max_assignment"
        assert curve.recalls[0] == 0.0

    def test_size_guard_exits_nonzero(self, tmp_path, capsys):
        syn = tmp_path / "syn"
        run_cli("synth", "--out", syn, "--n-pairs", 6, "--seed", 2)
        rc = run_cli("assign", "--out", tmp_path / "a2", "--matrix", syn / "matrix.tsv",
                     "--gold", syn / "gold.tsv", "--max-side", 3)
        assert rc == 1
        assert "size limit" in capsys.readouterr().err


class TestSyntheticPipeline:
    def test_report_contains_expected_rows(self, tmp_path):
        out = tmp_path / "run"
        assert run_cli("pipeline", "--source", "synth", "--out", out,
                       "--n-pairs", 25, "--noise-sigma", 0.3, "--seed", 11) == 0
        lines = (out / "report.tsv").read_text(encoding="utf-8").splitlines()
        methods = [line.split("\t")[0] for line in lines]
        assert methods == ["baseline", "rr", "rr_fr_1step", "rr_fr_2step", "max_assignment"]

    def test_thin_wrapper_over_library(self, tmp_path):
        out = tmp_path / "run"
        run_cli("pipeline", "--source", "synth", "--out", out,
                "--n-pairs", 25, "--noise-sigma", 0.3, "--seed", 11)
        matrix, gold = cgm.generate(cgm.SynthConfig(n_pairs=25, noise_sigma=0.3, rng_seed=11))
        rescored = {m: cgm.apply(m, matrix) for m in (
            cgm.RescoreMethod.BASELINE, cgm.RescoreMethod.RR,
            cgm.RescoreMethod.RR_FR_1STEP, cgm.RescoreMethod.RR_FR_2STEP)}
        rows = cgm.compare_methods(rescored, gold)
        assignment = cgm.hungarian_max(matrix)
        curve = cgm.max_assignment_curve(matrix, assignment, gold)
        rows.append(cgm.ReportRow("max_assignment", curve.max_f1, curve.iap11))
        expected = tmp_path / "expected_report.tsv"
        cgm.save_report(rows, expected)
        assert (out / "report.tsv").read_bytes() == expected.read_bytes()

    def test_two_runs_byte_identical(self, tmp_path):
        args = ("pipeline", "--source", "synth", "--n-pairs", 20, "--noise-sigma", 0.35,
                "--seed", 4)
        run_cli(*args, "--out", tmp_path / "a")
        run_cli(*args, "--out", tmp_path / "b")
        for name in ("report.tsv", "curve_rr.tsv", "baseline.tsv", "manifest.json"):
            assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


class TestFilePipeline:
    def test_full_run(self, corpus, tmp_path):
        out = tmp_path / "run"
        rc = run_cli(
            "pipeline", "--source", "files", "--out", out,
            "--gold", corpus / "gold.tsv",
            "--freq1", corpus / "freq1.tsv", "--daily1", corpus / "daily1.tsv",
            "--cooc1", corpus / "cooc1.tsv",
            "--freq2", corpus / "freq2.tsv", "--daily2", corpus / "daily2.tsv",
            "--cooc2", corpus / "cooc2.tsv",
            "--metrics", "phonetic,frequency,temporal,burstiness,context",
            "--seed", 13, "--seed-fraction", 0.25,
        )
        assert rc == 0
        report = (out / "report.tsv").read_text(encoding="utf-8").splitlines()
        assert [r.split("\t")[0] for r in report] == [
            "baseline", "rr", "rr_fr_1step", "rr_fr_2step", "max_assignment"
        ]
        weights = cgm.load_weights(out / "weights.tsv")
        assert set(weights.weights) == set(cgm.MetricId)
        for metric in cgm.MetricId:
            assert (out / f"metric_{metric.value}.tsv").exists()
            assert (out / f"train_metric_{metric.value}.tsv").exists()
        manifest = json.loads((out / "manifest.json").read_text())
        assert str(corpus / "gold.tsv") in manifest["inputs"]
        for digest in manifest["inputs"].values():
            assert digest.startswith("sha256:")

    def test_eval_universe_excludes_seed_words(self, corpus, tmp_path):
        out = tmp_path / "run"
        run_cli(
            "pipeline", "--source", "files", "--out", out,
            "--gold", corpus / "gold.tsv",
            "--freq1", corpus / "freq1.tsv", "--freq2", corpus / "freq2.tsv",
            "--metrics", "phonetic,frequency",
            "--seed", 13, "--seed-fraction", 0.25,
        )
        gold = cgm.load_gold_pairs(corpus / "gold.tsv")
        seed, gold_eval = cgm.split_seed(gold, 0.25, 13)
        eval_matrix = cgm.load_matrix(out / "metric_phonetic.tsv")
        assert set(eval_matrix.row_labels) == gold_eval.l1_words()
        assert not (set(eval_matrix.row_labels) & seed.pairs.l1_words())
        train_matrix = cgm.load_matrix(out / "train_metric_phonetic.tsv")
        assert set(train_matrix.row_labels) == gold.l1_words()

    def test_score_then_train_then_combine(self, corpus, tmp_path):
        score_dir = tmp_path / "scored"
        assert run_cli(
            "score", "--out", score_dir,
            "--gold", corpus / "gold.tsv",
            "--freq1", corpus / "freq1.tsv", "--freq2", corpus / "freq2.tsv",
            "--metrics", "phonetic,frequency", "--seed", 13,
        ) == 0
        assert run_cli(
            "train", "--out", score_dir, "--matrices", score_dir,
            "--gold", corpus / "gold.tsv", "--seed", 13, "--seed-fraction", 0.25,
        ) == 0
        assert run_cli("combine", "--out", score_dir, "--matrices", score_dir) == 0
        baseline = cgm.load_matrix(score_dir / "baseline.tsv")
        assert baseline.scores.min() >= 0.0 and baseline.scores.max() <= 1.0

    def test_uniform_weights_escape_hatch(self, corpus, tmp_path):
        out = tmp_path / "run"
        rc = run_cli(
            "pipeline", "--source", "files", "--out", out,
            "--gold", corpus / "gold.tsv",
            "--freq1", corpus / "freq1.tsv", "--freq2", corpus / "freq2.tsv",
            "--metrics", "phonetic,frequency", "--weights", "uniform", "--seed", 13,
        )
        assert rc == 0
        weights = cgm.load_weights(out / "weights.tsv")
        assert all(w == 1.0 for w in weights.weights.values())


class TestConfigFile:
    def test_config_file_values_used(self, tmp_path):
        config = tmp_path / "run.cfg"
        config.write_text(
            "# synthetic experiment\nsource = synth\nn_pairs = 9\nnoise_sigma = 0.2\nseed = 21\n",
            encoding="utf-8",
        )
        out = tmp_path / "run"
        assert run_cli("pipeline", "--config", config, "--out", out) == 0
        manifest = json.loads((out / "manifest.json").read_text())
        assert manifest["config"]["n_pairs"] == 9
        assert manifest["config"]["seed"] == 21

    def test_flags_override_config(self, tmp_path):
        config = tmp_path / "run.cfg"
        config.write_text("source = synth\nn_pairs = 9\nseed = 21\n", encoding="utf-8")
        out = tmp_path / "run"
        run_cli("pipeline", "--config", config, "--out", out, "--seed", 99)
        manifest = json.loads((out / "manifest.json").read_text())
        assert manifest["config"]["seed"] == 99

    def test_unknown_key_rejected(self, tmp_path):
        config = tmp_path / "run.cfg"
        config.write_text("sauce = files\n", encoding="utf-8")
        with pytest.raises(ValueError, match="unknown config key"):
            read_config_file(config)

    def test_malformed_line_names_location(self, tmp_path):
        config = tmp_path / "run.cfg"
        config.write_text("mode standard\n", encoding="utf-8")
        with pytest.raises(ValueError, match=r"run\.cfg:1"):
            read_config_file(config)


class TestProcessLevel:
    def test_console_entry_point(self, tmp_path):
        result = subprocess.run(
            [sys.executable, "-m", "cogmatrix.cli", "pipeline", "--source", "synth",
             "--out", str(tmp_path / "run"), "--n-pairs", "6", "--seed", "1"],
            capture_output=True, text=True,
        )
        assert result.returncode == 0
        assert "baseline" in result.stdout

    def test_missing_input_exit_code(self, tmp_path):
        result = subprocess.run(
            [sys.executable, "-m", "cogmatrix.cli", "rescore",
             "--out", str(tmp_path / "x"), "--matrix", str(tmp_path / "missing.tsv")],
            capture_output=True, text=True,
        )
        assert result.returncode == 1
        assert "missing.tsv" in result.stderr

    def test_unknown_subcommand_usage_error(self):
        result = subprocess.run(
            [sys.executable, "-m", "cogmatrix.cli", "frobnicate"],
            capture_output=True, text=True,
        )
        assert result.returncode == 2
