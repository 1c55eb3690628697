"""Command-line interface: exit codes, output formats and seeding."""

import csv
import json

import numpy as np
import pytest

from stenzel_slag.cli import main, parse_complex


def _run(argv, capsys):
    try:
        code = main(argv)
    except SystemExit as exc:
        code = exc.code
    out, err = capsys.readouterr()
    return code, out, err


class TestParseComplex:
    @pytest.mark.parametrize(
        "text, value", [("0.4", 0.4), ("0.4+0.1i", 0.4 + 0.1j), ("-0.4-0.1i", -0.4 - 0.1j), ("2i", 2j)]
    )
    def test_forms(self, text, value):
        assert parse_complex(text) == value

    @pytest.mark.parametrize("text", ["", "0.4 + 0.1i", "abc"])
    def test_invalid(self, text):
        import argparse

        with pytest.raises(argparse.ArgumentTypeError):
            parse_complex(text)


class TestSolvePotential:
    def test_csv_and_summary(self, tmp_path, capsys):
        out = tmp_path / "h.csv"
        code, stdout, _ = _run(["solve-potential", "--n", "3", "--nmax", "2", "--step", "1e-3", "--out", str(out)], capsys)
        assert code == 0
        assert "h(1) = 1.0" in stdout
        with open(out) as fh:
            rows = list(csv.reader(fh))
        assert rows[0] == ["N", "h", "hprime"]
        N, h = float(rows[-1][0]), float(rows[-1][1])
        assert N == pytest.approx(2.0)
        assert h == pytest.approx(2.0**-0.5, abs=1e-9)

    def test_legacy_seed(self, tmp_path, capsys):
        code, stdout, _ = _run(
            ["solve-potential", "--n", "2", "--nmax", "1.5", "--variant", "legacy", "--out", str(tmp_path / "l.csv")],
            capsys,
        )
        value = float(stdout.split("h(1) = ")[1].split()[0])
        assert value == pytest.approx(2 ** (-1 / 4), abs=1e-12)

    def test_coarse_step_fails(self, capsys):
        code, _, _ = _run(["solve-potential", "--n", "2", "--nmax", "4", "--step", "0.5"], capsys)
        assert code == 1

    def test_bad_n(self, capsys):
        assert _run(["solve-potential", "--n", "1"], capsys)[0] == 2


class TestProfile:
    def test_stdout_csv(self, capsys):
        code, out, err = _run(
            ["profile", "--case", "bdi", "--m", "3", "--psi", "0.5", "--tau0", "0.3+0.1i", "--max-steps", "5"], capsys
        )
        assert code == 0
        lines = out.splitlines()
        assert lines[0] == "s,re_tau,im_tau"
        assert len(lines) == 7
        assert "halt reason" in err

    def test_matched_real_axis(self, tmp_path, capsys):
        path = tmp_path / "p.csv"
        argv = ["profile", "--case", "diii", "--psi", "matched", "--tau0", "0.3", "--max-steps", "50", "--out", str(path)]
        assert _run(argv, capsys)[0] == 0
        data = np.loadtxt(path, delimiter=",", skiprows=1)
        assert np.all(data[:, 2] == 0)

    @pytest.mark.parametrize(
        "argv",
        [
            ["profile", "--case", "aiii", "--m", "2", "--psi", "0", "--tau0", "0.3"],
            ["profile", "--case", "bdi", "--m", "3", "--psi", "0", "--tau0", "1.6"],
            ["profile", "--case", "aiii-aiii", "--p", "1", "--q", "1", "--psi", "0", "--tau0", "0.3"],
            ["profile", "--case", "bdi", "--m", "3", "--psi", "x", "--tau0", "0.3"],
        ],
    )
    def test_usage_errors(self, argv, capsys):
        assert _run(argv, capsys)[0] == 2


class TestVerify:
    base = ["verify", "--case", "bdi", "--m", "3", "--points", "3", "--orbit-samples", "2", "--max-steps", "60"]

    def test_pass(self, tmp_path, capsys):
        out = tmp_path / "r.json"
        code, stdout, _ = _run(self.base + ["--out", str(out)], capsys)
        assert code == 0
        report = json.loads(out.read_text())
        assert report["pass"] is True
        assert {"suite", "case", "params", "psi", "seed", "checks", "pass"} <= set(report)
        assert all({"name", "residual", "tol", "pass"} == set(c) for c in report["checks"])

    def test_wrong_phase_fails(self, capsys):
        code, out, err = _run(self.base + ["--psi", "0.3", "--curve-psi", "matched"], capsys)
        assert code == 1
        assert "im_omega" in err

    def test_seed_env(self, capsys, monkeypatch):
        monkeypatch.setenv("SLAG_SEED", "42")
        code, out, _ = _run(self.base + ["--seed", "1"], capsys)
        assert json.loads(out)["seed"] == 42

    def test_seed_env_invalid(self, capsys, monkeypatch):
        monkeypatch.setenv("SLAG_SEED", "x")
        assert _run(self.base, capsys)[0] == 2

    def test_deterministic(self, capsys):
        a = _run(self.base + ["--seed", "4"], capsys)[1]
        b = _run(self.base + ["--seed", "4"], capsys)[1]
        assert a == b


class TestReport:
    def test_bdi_power(self, capsys):
        code, out, _ = _run(["report", "--experiment", "bdi-i-power"], capsys)
        assert code == 0
        assert json.loads(out)["supported"] == "proof"

    def test_structure(self, capsys):
        code, out, _ = _run(["report", "--experiment", "structure", "--case", "diii"], capsys)
        assert code == 0
        assert json.loads(out)["suite"] == "structure"

    def test_structure_needs_case(self, capsys):
        assert _run(["report", "--experiment", "structure"], capsys)[0] == 2
