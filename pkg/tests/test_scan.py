"""Tests for parameter sweeps and the CSV/SVG emitters."""

import csv
import math

import numpy as np
import pytest

from belltensor import scan
from belltensor.errors import ValidationError


def test_closed_forms_known_points():
    assert abs(scan.deformed_closed_form(1.0, 1.0) - math.sqrt(2.0)) < 1e-15
    assert abs(scan.deformed_closed_form(0.0, 3.0) - 2.0 / 4.0) < 1e-15
    assert abs(scan.biased_closed_form(1.0, 0.5, 0.5) - math.sqrt(2.0)) < 1e-15
    assert abs(scan.biased_closed_form(0.0, 0.5, 0.5) - 1.0) < 1e-15
    # p = 1/2 simplification
    rng = np.random.default_rng(0)
    for _ in range(50):
        y = rng.uniform(-1.0, 1.0)
        q = rng.uniform(0.0, 1.0)
        simple = math.hypot(1.0, y) / (2.0 * max(q, 1.0 - q))
        assert abs(scan.biased_closed_form(y, 0.5, q) - simple) < 1e-12


def test_violation_threshold_value():
    t_star = scan.deformed_violation_threshold()
    assert abs(t_star - (9.0 - 4.0 * math.sqrt(2.0)) / 7.0) < 1e-15
    assert abs(scan.deformed_closed_form(1.0, t_star) - 1.0) < 1e-12


def test_deformed_scan_matches_closed_form():
    grid = scan.scan_deformed_chsh(y_grid=np.linspace(-1, 1, 11),
                                   t_grid=[-2.0, -1.0, 0.0, 1.0, 2.0])
    assert len(grid) == 55
    for rec in grid:
        assert abs(rec["norm_m"]
                   - scan.deformed_closed_form(rec["y"], rec["t"])) < 1e-9
        assert abs(rec["norm_c"]
                   - scan.pauli_pair_compat_norm(rec["y"])) < 1e-12
        assert rec["violated"] == (rec["norm_m"] > 1.0)
        assert rec["invertible"] == (rec["t"] != -1.0)
        assert rec["ratio"] <= 1.0 + 1e-9


def test_deformed_ratio_equality_only_at_t_one():
    grid = scan.scan_deformed_chsh(y_grid=[0.3, 0.9],
                                   t_grid=[-1.0, 0.5, 1.0, 3.0])
    for rec in grid:
        if rec["t"] == 1.0:
            assert abs(rec["ratio"] - 1.0) < 1e-9
        else:
            assert rec["ratio"] < 1.0 - 1e-9


def test_biased_scan_matches_closed_form():
    grid = scan.scan_biased_chsh(y_grid=[0.0, 0.5, 1.0],
                                 p_grid=[0.0, 0.25, 0.5, 1.0],
                                 q_grid=[0.25, 0.5, 0.75])
    assert len(grid) == 36
    for rec in grid:
        assert abs(rec["norm_g"] - scan.biased_closed_form(
            rec["y"], rec["p"], rec["q"])) < 1e-9
        assert rec["invertible"] == (rec["p"] not in (0.0, 1.0)
                                     and rec["q"] not in (0.0, 1.0))


def test_empty_grid_rejected():
    with pytest.raises(ValidationError):
        scan.scan_deformed_chsh(y_grid=[], t_grid=[1.0])
    with pytest.raises(ValidationError):
        scan.scan_biased_chsh(y_grid=[0.5], p_grid=[0.5], q_grid=[])


def test_csv_contract(tmp_path):
    grid = scan.scan_deformed_chsh(y_grid=[0.0, 1.0], t_grid=[1.0])
    path = tmp_path / "out.csv"
    scan.emit_csv(grid, str(path))
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == list(scan.DEFORMED_FIELDS)
    assert len(rows) == 1 + len(grid)
    # 12 significant digits, '.' decimal separator, booleans as words.
    rec = dict(zip(rows[0], rows[2]))
    assert rec["y"] == "1"
    assert rec["norm_m"] == "%.12g" % math.sqrt(2.0)
    assert rec["violated"] == "true"
    assert "," not in rec["norm_m"]


def test_csv_biased_fields(tmp_path):
    grid = scan.scan_biased_chsh(y_grid=[0.5], p_grid=[0.5], q_grid=[0.5])
    path = tmp_path / "biased.csv"
    scan.emit_csv(grid, str(path))
    header = open(path).readline().strip().split(",")
    assert header == list(scan.BIASED_FIELDS)


def test_svg_region_contract(tmp_path):
    grid = scan.scan_deformed_chsh(y_grid=np.linspace(-1, 1, 9),
                                   t_grid=np.linspace(0, 2, 9))
    path = tmp_path / "region.svg"
    scan.emit_svg(grid, str(path), kind="region")
    text = path.read_text()
    assert text.startswith("<svg")
    assert text.rstrip().endswith("</svg>")
    assert "http://" not in text.replace("http://www.w3.org/2000/svg", "")
    n_violated = sum(r["violated"] for r in grid)
    # one rect per violated cell, plus background and frame
    assert text.count("<rect") == n_violated + 2


def test_svg_curves_contract(tmp_path):
    t_list = [0.0, 0.5, 1.0]
    grid = scan.scan_deformed_chsh(y_grid=np.linspace(-1, 1, 21),
                                   t_grid=t_list)
    path = tmp_path / "curves.svg"
    scan.emit_svg(grid, str(path), kind="curves")
    text = path.read_text()
    assert text.count("<polyline") == len(t_list)
    with pytest.raises(ValidationError):
        scan.emit_svg(grid, str(tmp_path / "x.svg"), kind="surface")


def test_emit_errors_on_bad_path():
    grid = scan.scan_deformed_chsh(y_grid=[0.0], t_grid=[1.0])
    with pytest.raises(ValidationError):
        scan.emit_csv(grid, "/no/such/dir/out.csv")
    with pytest.raises(ValidationError):
        scan.emit_svg(grid, "/no/such/dir/out.svg")
    with pytest.raises(ValidationError):
        scan.emit_csv([], "/tmp/empty.csv")


def test_thread_env_control(monkeypatch):
    monkeypatch.setenv("BELLTENSOR_THREADS", "2")
    assert scan.thread_count() >= 1
    grid = scan.scan_deformed_chsh(y_grid=[-0.5, 0.0, 0.5], t_grid=[0.5, 1.0])
    serial = [(r["y"], r["t"], r["norm_m"]) for r in grid]
    monkeypatch.setenv("BELLTENSOR_THREADS", "1")
    grid2 = scan.scan_deformed_chsh(y_grid=[-0.5, 0.0, 0.5], t_grid=[0.5, 1.0])
    assert serial == [(r["y"], r["t"], r["norm_m"]) for r in grid2]
    monkeypatch.setenv("BELLTENSOR_THREADS", "zebra")
    with pytest.raises(ValidationError):
        scan.thread_count()


def test_comparison_invariants_on_grid():
    grid = scan.scan_deformed_chsh(y_grid=np.linspace(-1, 1, 9),
                                   t_grid=[-2.0, 0.0, 1.0, 2.0])
    for rec in grid:
        if not rec["invertible"]:
            continue
        # normalized game: beta = 1
        assert rec["norm_m"] <= rec["norm_c"] + 1e-6
