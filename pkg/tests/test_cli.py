"""End-to-end tests for the command-line interface."""

import json
import math

import pytest

from belltensor import cli


def run(capsys, *argv):
    code = cli.main(list(argv))
    captured = capsys.readouterr()
    out = json.loads(captured.out) if captured.out.strip() else None
    return code, out, captured.err


def test_bias_chsh(capsys):
    code, out, _ = run(capsys, "bias", "--game", "chsh")
    assert code == cli.EXIT_OK
    assert out == {"classical_bias": 1.0}


def test_bias_deformed(capsys):
    code, out, _ = run(capsys, "bias", "--game", "mt:3")
    assert code == 0
    assert abs(out["classical_bias"] - 4.0) < 1e-12


def test_norm_m_pauli_pair(capsys):
    code, out, _ = run(capsys, "norm-m", "--tuple", "pauli:1,1",
                       "--game", "chsh")
    assert code == 0
    assert abs(out["norm_m"] - math.sqrt(2.0)) < 1e-12
    assert out["game_invertible"] is True


def test_norm_c_and_gamma(capsys):
    code, out, _ = run(capsys, "norm-c", "--tuple", "pauli:1,1")
    assert code == 0
    assert abs(out["norm_c"] - math.sqrt(2.0)) < 1e-6
    code, out, _ = run(capsys, "gamma", "--tuple", "pauli:1,1,0")
    assert code == 0
    assert abs(out["gamma"] - 1.0 / math.sqrt(2.0)) < 1e-6


def test_qbias_chsh(capsys):
    code, out, _ = run(capsys, "qbias", "--game", "chsh")
    assert code == 0
    assert abs(out["quantum_bias"] - math.sqrt(2.0)) < 1e-5


def test_uncertainty_output(capsys):
    code, out, _ = run(capsys, "uncertainty", "--game", "chsh")
    assert code == 0
    assert abs(out["uncertainty_product"] - 1.0) < 1e-12
    assert abs(out["lower_bound"] - 1.0) < 1e-12
    assert out["hadamard"] is True
    code, out, _ = run(capsys, "uncertainty", "--game", "mt:3")
    assert code == 0
    assert out["hadamard"] is False
    assert out["uncertainty_product"] >= out["lower_bound"] - 1e-12


def test_compatible_with_certificate(capsys, tmp_path):
    cert_path = tmp_path / "cert.json"
    code, out, _ = run(capsys, "compatible", "--tuple", "pauli:0.5,0.5",
                       "--emit-certificate", str(cert_path))
    assert code == 0
    assert out["compatible"] is True
    assert out["certificate"] == str(cert_path)
    payload = json.loads(cert_path.read_text())
    assert payload["n"] == 2 and payload["dim"] == 2
    code, out, _ = run(capsys, "compatible", "--tuple", "pauli:1,1")
    assert code == 0
    assert out["compatible"] is False
    assert out["certificate"] is None


def test_seesaw_command(capsys):
    code, out, _ = run(capsys, "seesaw", "--tuple", "pauli:1,1",
                       "--game", "chsh", "--restarts", "5",
                       "--iters", "100", "--seed", "7")
    assert code == 0
    assert abs(out["value"] - math.sqrt(2.0)) < 1e-4
    assert out["value"] <= out["norm_m"] + 1e-9
    assert out["seed"] == 7
    assert out["converged"] is True


def test_seesaw_deterministic(capsys):
    args = ("seesaw", "--tuple", "pauli:0.7,0.4", "--game", "mt:2",
            "--restarts", "3", "--iters", "50", "--seed", "11")
    _, out1, _ = run(capsys, *args)
    _, out2, _ = run(capsys, *args)
    assert out1 == out2


def test_scan_command_csv_and_svg(capsys, tmp_path):
    csv_path = tmp_path / "scan.csv"
    svg_path = tmp_path / "scan.svg"
    code, out, _ = run(capsys, "scan", "mt",
                       "--y", "-1:1:0.5", "--t", "0:2:0.5",
                       "--out", str(csv_path), "--svg", str(svg_path),
                       "--kind", "region")
    assert code == 0
    assert out["records"] == 25
    assert out["csv"] == str(csv_path)
    lines = csv_path.read_text().splitlines()
    assert lines[0] == "y,t,norm_m,norm_c,ratio,violated,invertible"
    assert len(lines) == 26
    svg = svg_path.read_text()
    assert svg.startswith("<svg") and svg.rstrip().endswith("</svg>")


def test_scan_curves_kind(capsys, tmp_path):
    csv_path = tmp_path / "b.csv"
    svg_path = tmp_path / "b.svg"
    code, out, _ = run(capsys, "scan", "gpq",
                       "--y", "0:1:0.25", "--p", "0.5", "--q", "0.25,0.5,0.75",
                       "--out", str(csv_path), "--svg", str(svg_path),
                       "--kind", "curves")
    assert code == 0
    assert out["records"] == 15
    assert csv_path.read_text().splitlines()[0].startswith("y,p,q,norm_g")
    assert svg_path.read_text().count("<polyline") == 3


def test_pretty_flag_after_subcommand(capsys):
    code = cli.main(["bias", "--game", "chsh", "--pretty"])
    out = capsys.readouterr().out
    assert code == 0
    assert "\n  " in out
    assert json.loads(out) == {"classical_bias": 1.0}


def test_usage_errors(capsys):
    assert cli.main(["no-such-command"]) == cli.EXIT_USAGE
    capsys.readouterr()
    assert cli.main(["norm-m", "--tuple", "pauli:1,1"]) == cli.EXIT_USAGE
    capsys.readouterr()
    assert cli.main([]) == cli.EXIT_USAGE


def test_validation_errors(capsys):
    assert cli.main(["norm-c", "--tuple", "pauli:zebra"]) == cli.EXIT_VALIDATION
    err = capsys.readouterr().err
    assert "error" in err
    assert cli.main(["bias", "--game", "mt:zebra"]) == cli.EXIT_VALIDATION
    capsys.readouterr()
    assert cli.main(["scan", "mt", "--y", "1:0:0.5", "--out",
                     "/tmp/x.csv"]) == cli.EXIT_VALIDATION
    capsys.readouterr()


def test_verify_only_single_criterion(capsys):
    code, out, err = run(capsys, "verify", "--only",
                         "01-pauli-pair-compat-norm")
    assert code == 0
    assert out["all_passed"] is True
    assert len(out["criteria"]) == 1
    assert out["criteria"][0]["name"] == "01-pauli-pair-compat-norm"
    assert "PASS" in err


def test_verify_unknown_name(capsys):
    assert cli.main(["verify", "--only", "99-bogus"]) == cli.EXIT_VALIDATION
    capsys.readouterr()


def test_grid_flag_negative_values(capsys, tmp_path):
    csv_path = tmp_path / "neg.csv"
    code, out, _ = run(capsys, "scan", "mt", "--y", "-1,-0.5,0",
                       "--t", "-2:-1:0.5", "--out", str(csv_path))
    assert code == 0
    assert out["records"] == 9
