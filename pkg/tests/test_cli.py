"""Command-line surface: exit codes, reports, file outputs."""

import json

import numpy as np
import pytest

from sepfactory import cli, fileio, reconstruct, trace_distance

from test_decompose import pathway_compatible_state


def run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr().out
    report = json.loads(out)
    assert report["exit_code"] == code
    for key in ("command", "inputs", "outputs", "verdicts", "residuals",
                "timing_ms"):
        assert key in report
    return code, report


@pytest.fixture
def example1_file(tmp_path, capsys):
    path = str(tmp_path / "ex1.json")
    cert = str(tmp_path / "ex1.cert.json")
    code, report = run(capsys, "gen", "--kind", "example1", "--n", "3",
                       "--dim-b", "2", "--seed", "1", "--out", path,
                       "--cert-out", cert)
    assert code == 0
    return path, cert, report


@pytest.fixture
def bell_file(tmp_path, capsys):
    path = str(tmp_path / "bell.json")
    code, _ = run(capsys, "gen", "--kind", "maximally_entangled", "--d", "2",
                  "--out", path)
    assert code == 0
    return path


@pytest.fixture
def random_ssppt_file(tmp_path, capsys):
    path = str(tmp_path / "rss.json")
    code, _ = run(capsys, "gen", "--kind", "random_ssppt", "--dim-a", "3",
                  "--dim-b", "2", "--seed", "5", "--out", path)
    assert code == 0
    return path


class TestGen:
    def test_example1_outputs(self, example1_file):
        path, cert, report = example1_file
        assert report["verdicts"]["state_check"] == "valid_state"
        assert report["verdicts"]["semi_ssppt"] is True
        assert abs(report["residuals"]["factor_mass"] - 1.0) <= 1e-12
        rho, meta = fileio.load_state(path)
        assert meta["kind"] == "example1"
        fileio.load_certificate(cert)

    def test_bell(self, bell_file):
        rho, _ = fileio.load_state(bell_file)
        assert (rho.dim_a, rho.dim_b) == (2, 2)

    def test_pure_random_density(self, tmp_path, capsys):
        path = str(tmp_path / "pure.json")
        code, report = run(capsys, "gen", "--kind", "random_density",
                           "--dim-a", "2", "--dim-b", "2", "--rank", "1",
                           "--out", path)
        assert code == 0
        rho, _ = fileio.load_state(path)
        eigs = np.linalg.eigvalsh(rho.matrix)
        assert np.sum(eigs > 1e-10) == 1

    def test_invalid_spec_exits_2(self, tmp_path, capsys):
        code, report = run(capsys, "gen", "--kind", "random_ssppt",
                           "--dim-a", "0", "--dim-b", "2",
                           "--out", str(tmp_path / "x.json"))
        assert code == 2
        assert "error" in report

    def test_unwritable_path_exits_2(self, capsys):
        code, _ = run(capsys, "gen", "--kind", "maximally_entangled", "--d",
                      "2", "--out", "/nonexistent-dir/x.json")
        assert code == 2


class TestCertify:
    def test_random_ssppt_passes(self, random_ssppt_file, capsys):
        code, report = run(capsys, "certify", random_ssppt_file)
        assert code == 0
        assert report["verdicts"]["semi_ssppt"] is True
        assert report["verdicts"]["ppt"] is True
        assert report["residuals"]["worst_commutator"] <= 1e-8

    def test_bell_fails(self, bell_file, capsys):
        code, report = run(capsys, "certify", bell_file)
        assert code == 1
        assert report["verdicts"]["ppt"] is False
        assert abs(report["residuals"]["min_eig_tb"] + 0.5) <= 1e-9

    def test_corrupt_file_exits_2(self, tmp_path, capsys):
        path = tmp_path / "bad.json"
        path.write_text('{"schema_version": "sepfactory/1", "dims": [2, 2]')
        code, report = run(capsys, "certify", str(path))
        assert code == 2
        assert "error" in report

    def test_missing_file_exits_2(self, capsys):
        code, _ = run(capsys, "certify", "/no/such/file.json")
        assert code == 2

    def test_verdicts_preserved_by_round_trip(self, random_ssppt_file,
                                              tmp_path, capsys):
        _, first = run(capsys, "certify", random_ssppt_file)
        rho, meta = fileio.load_state(random_ssppt_file)
        copy_path = str(tmp_path / "copy.json")
        fileio.save_state(copy_path, rho, metadata=meta)
        _, second = run(capsys, "certify", copy_path)
        assert first["verdicts"] == second["verdicts"]


class TestDecompose:
    def test_example1_state_file(self, example1_file, tmp_path, capsys):
        path, _, _ = example1_file
        out = str(tmp_path / "ens.json")
        code, report = run(capsys, "decompose", path, "--out", out)
        assert code == 0
        assert report["verdicts"]["ensemble_size"] <= 3 * 2
        assert report["residuals"]["reconstruction_trace_norm"] <= 1e-8
        ens, _ = fileio.load_ensemble(out)
        rho, _ = fileio.load_state(path)
        recomputed = trace_distance(reconstruct(ens), rho)
        assert abs(recomputed
                   - report["residuals"]["reconstruction_trace_norm"]) <= 1e-15

    def test_certificate_input(self, example1_file, tmp_path, capsys):
        _, cert_path, _ = example1_file
        out = str(tmp_path / "ens2.json")
        code, report = run(capsys, "decompose", cert_path, "--out", out)
        assert code == 0
        assert report["residuals"]["reconstruction_trace_norm"] <= 1e-8

    def test_bell_exits_1(self, bell_file, tmp_path, capsys):
        code, report = run(capsys, "decompose", bell_file, "--out",
                           str(tmp_path / "no.json"))
        assert code == 1

    def test_qubit_pathway_success(self, tmp_path, capsys):
        rho = pathway_compatible_state(610, 3)
        path = str(tmp_path / "ordered.json")
        fileio.save_state(path, rho)
        out = str(tmp_path / "ens3.json")
        code, report = run(capsys, "decompose", path, "--qubit-pathway",
                           "--out", out)
        assert code == 0
        assert report["residuals"]["reconstruction_trace_norm"] <= 1e-8

    def test_qubit_pathway_rejects_entangled_two_block(self, tmp_path, capsys):
        code, report = run(capsys, "gen", "--kind", "example2", "--dim-b", "3",
                           "--seed", "29", "--out", str(tmp_path / "e2.json"))
        assert code == 0
        code, report = run(capsys, "decompose", str(tmp_path / "e2.json"),
                           "--qubit-pathway", "--out", str(tmp_path / "e2o.json"))
        assert code == 1
        assert "normality" in report["error"].lower()

    def test_ensemble_input_rejected(self, example1_file, tmp_path, capsys):
        path, _, _ = example1_file
        out = str(tmp_path / "ens4.json")
        run(capsys, "decompose", path, "--out", out)
        code, _ = run(capsys, "decompose", out, "--out",
                      str(tmp_path / "ens5.json"))
        assert code == 2


class TestWitness:
    def test_bell(self, bell_file, tmp_path, capsys):
        out = str(tmp_path / "w.json")
        code, report = run(capsys, "witness", bell_file, "--samples", "2000",
                           "--out", out)
        assert code == 0
        assert report["verdicts"]["entangled"] is True
        assert abs(report["residuals"]["value_on_target"] + 0.5) <= 1e-10
        assert report["residuals"]["pairing_min"] >= -1e-9
        witness, meta = fileio.load_state(out)
        assert meta["kind"] == "witness"

    def test_separable_exits_1(self, random_ssppt_file, capsys):
        code, report = run(capsys, "witness", random_ssppt_file)
        assert code == 1
        assert report["verdicts"]["entangled"] is False

    def test_samples_zero_skips_pairing(self, bell_file, capsys):
        code, report = run(capsys, "witness", bell_file, "--samples", "0")
        assert code == 0
        assert report["verdicts"]["pairing_checked"] is False
        assert "pairing_min" not in report["residuals"]


class TestTruncateStudy:
    def test_four_by_four(self, tmp_path, capsys):
        path = str(tmp_path / "s44.json")
        run(capsys, "gen", "--kind", "random_density", "--dim-a", "4",
            "--dim-b", "4", "--out", path)
        out = str(tmp_path / "table.csv")
        code, report = run(capsys, "truncate-study", path, "--out", out)
        assert code == 0
        rows = report["table"]
        assert len(rows) == 4
        assert rows[-1]["trace_distance"] <= 1e-12
        lines = (tmp_path / "table.csv").read_text().strip().splitlines()
        assert lines[0] == "k,k_a,k_b,trace_distance"
        assert len(lines) == 5

    def test_product_state_monotone(self, tmp_path, capsys):
        from sepfactory import kron
        from conftest import random_psd
        a = random_psd(11, 3)
        b = random_psd(12, 3)
        rho = kron(a / np.trace(a).real, b / np.trace(b).real)
        path = str(tmp_path / "prod.json")
        fileio.save_state(path, rho)
        code, report = run(capsys, "truncate-study", path)
        assert code == 0
        dists = [r["trace_distance"] for r in report["table"]]
        assert all(x >= y - 1e-12 for x, y in zip(dists, dists[1:]))
        assert dists[-1] <= 1e-12

    def test_steps_limit(self, tmp_path, capsys):
        path = str(tmp_path / "s.json")
        run(capsys, "gen", "--kind", "random_density", "--dim-a", "3",
            "--dim-b", "3", "--out", path)
        code, report = run(capsys, "truncate-study", path, "--steps", "2")
        assert code == 0
        assert len(report["table"]) == 2

    def test_too_small_dims_exit_2(self, tmp_path, capsys):
        path = str(tmp_path / "tiny.json")
        run(capsys, "gen", "--kind", "random_density", "--dim-a", "1",
            "--dim-b", "3", "--out", path)
        code, _ = run(capsys, "truncate-study", path)
        assert code == 2


def test_reports_are_json_with_digests(random_ssppt_file, capsys):
    code, report = run(capsys, "certify", random_ssppt_file)
    assert random_ssppt_file in report["inputs"]
    assert len(report["inputs"][random_ssppt_file]) == 64
    assert report["timing_ms"] >= 0
