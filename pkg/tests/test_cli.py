import csv
import json
from pathlib import Path

import numpy as np
import pytest

from qfasim.cli import main
from qfasim.serialize import load_automaton, load_document
from qfasim.signrank import load_sign_matrix


def run(*argv) -> int:
    return main([str(a) for a in argv])


def read_json(path) -> dict:
    return json.loads(Path(path).read_text())


class TestWitnessCommand:
    def test_qcfa_full(self, tmp_path):
        out = tmp_path / "w"
        assert run("witness", "qcfa", "--c", 2, "--q", 2, "--eta", "full",
                   "--out", out) == 0
        report = read_json(out / "shattering_report.json")
        assert report["shattering"]["pairs_checked"] == 7 * 128
        assert report["shattering"]["agreements"] == 7 * 128
        assert report["verified"] is True
        doc = load_document(out / "automaton.json")
        assert doc["witness_meta"]["d"] == 7
        automaton = load_automaton(out / "automaton.json")
        assert automaton.classical_states == 2
        sm = load_sign_matrix(out / "signmatrix.json")
        assert sm.shape == (7, 128)
        for name in ("signs.csv", "sign_matrix.png", "margins.png"):
            assert (out / name).exists()

    def test_moqfa_full_reports_expansion(self, tmp_path):
        out = tmp_path / "w"
        assert run("witness", "moqfa", "--n", 3, "--eta", "full", "--out", out) == 0
        report = read_json(out / "shattering_report.json")
        assert report["expansion"]["bound"] == pytest.approx(1.0 / 1296.0)
        assert report["expansion"]["max_residual"] <= 1.0 / 1296.0

    def test_sampled_mode_records_seed(self, tmp_path):
        out = tmp_path / "w"
        assert run("witness", "qcfa", "--c", 3, "--q", 2, "--eta", "sample:64",
                   "--seed", 5, "--out", out) == 0
        meta = read_json(out / "automaton.json")["witness_meta"]
        assert meta["eta_mode"] == {"kind": "sampled", "count": 64, "seed": 5}

    def test_invalid_dimension_is_usage_error(self, tmp_path):
        assert run("witness", "moqfa", "--n", 1, "--out", tmp_path / "x") == 2

    def test_missing_parameters_is_usage_error(self, tmp_path):
        assert run("witness", "qcfa", "--out", tmp_path / "x") == 2

    def test_no_figures(self, tmp_path):
        out = tmp_path / "w"
        assert run("witness", "moqfa", "--n", 2, "--no-figures", "--out", out) == 0
        assert not (out / "sign_matrix.png").exists()
        assert (out / "signs.csv").exists()

    def test_reports_are_deterministic_up_to_timestamp(self, tmp_path):
        out1, out2 = tmp_path / "a", tmp_path / "b"
        for out in (out1, out2):
            assert run("witness", "moqfa", "--n", 2, "--no-figures", "--out", out) == 0
        r1 = read_json(out1 / "shattering_report.json")
        r2 = read_json(out2 / "shattering_report.json")
        r1.pop("timestamp"), r2.pop("timestamp")
        assert r1 == r2
        assert (out1 / "automaton.json").read_text() == (out2 / "automaton.json").read_text()


class TestPipelineCommand:
    def test_qcfa_counts(self, tmp_path):
        out = tmp_path / "p"
        assert run("pipeline", "qcfa", "--c", 2, "--q", 2, "--max-len", 2,
                   "--out", out) == 0
        report = read_json(out / "pipeline_report.json")
        assert report["state_counts"]["gfa_states"] == 8
        assert report["state_counts"]["pfa_states"] == 22
        assert report["witness_grid"]["signs_agree"] is True
        assert report["witness_grid"]["pfa_min_margin"] > 1e-6
        assert (out / "gfa.json").exists() and (out / "pfa.json").exists()

    def test_moqfa_counts(self, tmp_path):
        out = tmp_path / "p"
        assert run("pipeline", "moqfa", "--n", 2, "--max-len", 3, "--out", out) == 0
        report = read_json(out / "pipeline_report.json")
        assert report["state_counts"]["gfa_states"] == 4
        assert report["state_counts"]["pfa_states"] == 14
        assert report["word_check"]["mismatches"] == 0


class TestFileCommands:
    @pytest.fixture()
    def witness_dir(self, tmp_path):
        out = tmp_path / "w"
        assert run("witness", "moqfa", "--n", 2, "--no-figures", "--out", out) == 0
        return out

    def test_linearize_then_stochasticize(self, tmp_path, witness_dir):
        lin = tmp_path / "lin"
        assert run("linearize", witness_dir / "automaton.json", "--check-len", 2,
                   "--out", lin, "--no-figures") == 0
        gfa = load_automaton(lin / "gfa.json")
        assert gfa.states == 4
        sto = tmp_path / "sto"
        assert run("stochasticize", lin / "gfa.json", "--cutpoint", "1/2",
                   "--verify-len", 1, "--out", sto) == 0
        report = read_json(sto / "conversion_report.json")
        assert report["conversion"]["output_states"] == 14
        assert report["agreement"]["agree"] is True
        assert load_automaton(sto / "pfa.json").states == 14

    def test_stochasticize_exact(self, tmp_path):
        gfa_doc = {
            "format": 1, "model": "gfa", "alphabet": ["a"], "scalar_mode": "exact",
            "states": 1, "initial": ["1"], "transitions": {"a": [["2"]]},
            "final": ["1"],
        }
        src = tmp_path / "g.json"
        src.write_text(json.dumps(gfa_doc))
        out = tmp_path / "sto"
        assert run("stochasticize", src, "--cutpoint", "3", "--exact",
                   "--verify-len", 6, "--no-figures", "--out", out) == 0
        pfa_doc = load_document(out / "pfa.json")
        assert pfa_doc["scalar_mode"] == "exact"
        assert read_json(out / "conversion_report.json")["agreement"]["agree"] is True

    def test_simulate_words(self, tmp_path, witness_dir):
        out = tmp_path / "sim"
        assert run("simulate", witness_dir / "automaton.json",
                   "--word", "p:1 tau:++", "--word", "-",
                   "--cutpoint", "0.5", "--no-figures", "--out", out) == 0
        with open(out / "values.csv") as fh:
            rows = list(csv.DictReader(fh))
        assert len(rows) == 2
        assert rows[0]["word"] == "p:1 tau:++"
        assert float(rows[0]["value"]) > 0.5
        assert rows[0]["sign"] == "1"

    def test_simulate_enumeration(self, tmp_path, witness_dir):
        out = tmp_path / "sim"
        assert run("simulate", witness_dir / "automaton.json", "--max-len", 1,
                   "--no-figures", "--out", out) == 0
        assert read_json(out / "simulate_report.json")["words_evaluated"] == 7

    def test_signmatrix_uses_witness_metadata(self, tmp_path, witness_dir):
        out = tmp_path / "sm"
        assert run("signmatrix", witness_dir / "automaton.json", "--cutpoint", "1/2",
                   "--no-figures", "--out", out) == 0
        sm = load_sign_matrix(out / "signmatrix.json")
        assert sm.shape == (2, 4)

    def test_signmatrix_with_word_files(self, tmp_path, witness_dir):
        prefixes = tmp_path / "prefixes.txt"
        prefixes.write_text("p:1\np:2\n")
        suffixes = tmp_path / "suffixes.txt"
        suffixes.write_text("tau:++\ntau:--\n-\n")
        out = tmp_path / "sm"
        assert run("signmatrix", witness_dir / "automaton.json", "--cutpoint", "1/2",
                   "--prefixes", prefixes, "--suffixes", suffixes,
                   "--no-figures", "--out", out) == 0
        sm = load_sign_matrix(out / "signmatrix.json")
        assert sm.shape == (2, 3)
        assert sm.col_labels[2] == ()

    def test_malformed_document_is_usage_error(self, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text("{not json")
        assert run("simulate", bad, "--max-len", 1, "--out", tmp_path / "o") == 2


class TestAnalyzeCommand:
    @pytest.fixture()
    def c7_files(self, tmp_path):
        from qfasim.signrank import complete_shattering, save_sign_matrix
        sm_path = tmp_path / "c7.json"
        save_sign_matrix(sm_path, complete_shattering(7))
        real_path = tmp_path / "c7_real.csv"
        with open(real_path, "w", newline="") as fh:
            writer = csv.writer(fh)
            for row in complete_shattering(7).signs:
                writer.writerow([float(v) for v in row])
        return sm_path, real_path

    def test_complete_shattering_with_realization(self, tmp_path, c7_files):
        sm_path, real_path = c7_files
        out = tmp_path / "an"
        assert run("analyze", sm_path, "--realization", real_path,
                   "--no-figures", "--out", out) == 0
        report = read_json(out / "analysis.json")
        assert report["realization"]["numerical_rank"] == 7
        assert report["realization"]["orthant_certificate"] is True
        assert report["realization"]["sign_consistent"] is True
        assert (out / "singular_values.csv").exists()

    def test_hadamard_16_meets_the_cap(self, tmp_path):
        from qfasim.signrank import SignMatrix, save_sign_matrix
        h = np.array([[1]], dtype=np.int8)
        while h.shape[0] < 16:
            h = np.block([[h, h], [h, -h]])
        labels = tuple((str(i),) for i in range(16))
        sm_path = tmp_path / "h16.json"
        save_sign_matrix(sm_path, SignMatrix(labels, labels, h))
        out = tmp_path / "an"
        assert run("analyze", sm_path, "--no-figures", "--out", out) == 0
        report = read_json(out / "analysis.json")
        assert report["forster"]["bound"] == pytest.approx(4.0)
        assert report["forster"]["cap"] == pytest.approx(4.0)

    def test_rectangular_forster_is_usage_error(self, tmp_path, c7_files):
        sm_path, _ = c7_files
        assert run("analyze", sm_path, "--forster", "--out", tmp_path / "an") == 2

    def test_square_restriction_option(self, tmp_path, c7_files):
        sm_path, _ = c7_files
        out = tmp_path / "an"
        assert run("analyze", sm_path, "--square", 7, "--no-figures", "--out", out) == 0
        report = read_json(out / "analysis.json")
        assert report["square_restriction"]["side"] == 7
        assert (out / "square_restriction.json").exists()


def test_unknown_command_is_usage_error(capsys):
    assert run("frobnicate") == 2
