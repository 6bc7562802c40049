import csv

import numpy as np
import pytest

from collapse_bounds import bounds as B
from collapse_bounds.cli import (EXCLUSION_HEADER, ConfigError, MonteCarloSpec,
                                 RunConfig, cmd_curve, cmd_verify, main,
                                 parse_config)

SMALL = """
alphas = [2.0, 1.0]
grid.r_min = 1e-9
grid.r_max = 1e-2
grid.n = 24
"""


def _rows(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def test_exclusion_is_deterministic_and_lf(tmp_path):
    cfg = tmp_path / "run.toml"
    cfg.write_text(SMALL)
    assert main(["exclusion", "--config", str(cfg), "--out", str(tmp_path / "a")]) == 0
    assert main(["exclusion", "--config", str(cfg), "--out", str(tmp_path / "b")]) == 0
    for name in ("exclusion_alpha_2.0.csv", "exclusion_alpha_1.0.csv"):
        a = (tmp_path / "a" / name).read_bytes()
        assert a == (tmp_path / "b" / name).read_bytes()
        assert b"\r" not in a
        assert a.decode().splitlines()[0] == EXCLUSION_HEADER


def test_exclusion_alpha_two_all_rows_excluded(tmp_path):
    cfg = tmp_path / "run.toml"
    cfg.write_text(SMALL)
    main(["exclusion", "--config", str(cfg), "--out", str(tmp_path)])
    rows = _rows(tmp_path / "exclusion_alpha_2.0.csv")
    assert len(rows) == 24
    assert all(r["excluded"] == "true" for r in rows)
    one = _rows(tmp_path / "exclusion_alpha_1.0.csv")
    assert any(r["excluded"] == "false" for r in one)
    # 17 significant digits
    assert len(one[0]["r_c_m"].split("e")[0].replace(".", "")) == 17


def test_two_point_grid(tmp_path):
    cfg = tmp_path / "run.toml"
    cfg.write_text("alphas = [0.5]\ngrid.n = 2\n")
    assert main(["exclusion", "--config", str(cfg), "--out", str(tmp_path)]) == 0
    lines = (tmp_path / "exclusion_alpha_0.5.csv").read_text().splitlines()
    assert len(lines) == 3


def test_curve_lower_passes_through():
    cfg = RunConfig()
    c = cmd_curve("lower", 1.0, cfg)
    assert np.array_equal(c.lam, B.theoretical_lower_bound(B.DiskSpec(), 1.0,
                                                           cfg.grid.values()))
    ligo = cmd_curve("ligo", 1.0, cfg)
    assert np.array_equal(ligo.lam, B.gw_curve(B.LIGO, 1.0, cfg.grid.values()).lam)


def test_curve_radiation_flags_sub_nanometre(capsys):
    assert main(["curve", "--kind", "radiation", "--alpha", "1", "--r-min", "1e-10",
                 "--r-max", "1e-8", "--n", "3"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "r_c_m,lambda,regime,validity,reliability"
    assert lines[1].split(",")[3] == "out_of_validity"
    assert lines[3].split(",")[3] == "valid"


def test_unknown_kind_is_usage_error(capsys):
    assert main(["curve", "--kind", "gravity", "--alpha", "1"]) == 2
    with pytest.raises(ConfigError):
        cmd_curve("gravity", 1.0)


def test_verify_small_run_warns(capsys):
    cfgs = MonteCarloSpec(n_trajectories=10)
    with pytest.warns(Warning, match="statistical minimum"):
        rows, ratio = cmd_verify(cfgs)
    assert len(rows) == 2 and ratio is not None


def test_verify_cli_is_deterministic(tmp_path, capsys):
    args = ["verify", "--seed", "42", "--n-trajectories", "200"]
    assert main(args + ["--out", str(tmp_path / "a.csv")]) == 0
    first = capsys.readouterr().out
    assert main(args + ["--out", str(tmp_path / "b.csv")]) == 0
    assert capsys.readouterr().out == first
    assert "PASS" in first and "FAIL" not in first
    assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()


def test_verify_ratio_near_two():
    rows, (val, se, expected, ok) = cmd_verify(MonteCarloSpec(n_trajectories=300))
    assert expected == pytest.approx(2.0)
    assert ok and abs(val - 2) < 3 * se


def test_config_errors_report_line_and_field(tmp_path, capsys):
    cfg = tmp_path / "bad.toml"
    cfg.write_text("alphas = [1.0]\nligo.foo = 3\n")
    assert main(["exclusion", "--config", str(cfg), "--out", str(tmp_path)]) == 2
    err = capsys.readouterr().err
    assert "line 2" in err and "ligo.foo" in err
    cfg.write_text("alphas = [1.0\n")
    assert main(["exclusion", "--config", str(cfg), "--out", str(tmp_path)]) == 2
    with pytest.raises(ConfigError):
        parse_config("grid.n = 1\n")
    with pytest.raises(ConfigError):
        parse_config("ligo.spectrum_divisor = 3\n")


def test_overrides_are_applied():
    cfg = parse_config("ligo.s_exp = 1e-26\nradiation.coefficient = 0.1\n"
                       "disk.m_a_over_m0 = 6\nlisa.length = 0.05\n")
    assert cfg.ligo.s_exp == 1e-26 and cfg.ligo.mass == B.LIGO.mass
    assert cfg.radiation.coefficient == 0.1
    assert cfg.disk.m_a == pytest.approx(6 * 1.67262192369e-27)
    assert cfg.lisa.A_P == pytest.approx(0.05**2)


def test_missing_config_is_io_error(tmp_path):
    assert main(["exclusion", "--config", str(tmp_path / "nope.toml"),
                 "--out", str(tmp_path)]) == 5


def test_unwritable_output_is_io_error(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    cfg = tmp_path / "run.toml"
    cfg.write_text("alphas = [1.0]\ngrid.n = 2\n")
    assert main(["exclusion", "--config", str(cfg), "--out", str(blocker / "sub")]) == 5


def test_domain_error_exit_code(tmp_path):
    assert main(["curve", "--kind", "lower", "--alpha", "-1", "--n", "2"]) == 3


def test_thread_cap(tmp_path, monkeypatch):
    cfg = tmp_path / "run.toml"
    cfg.write_text("alphas = [1.0]\ngrid.n = 2\n")
    monkeypatch.setenv("COLLAPSE_BOUNDS_THREADS", "0")
    assert main(["exclusion", "--config", str(cfg), "--out", str(tmp_path)]) == 2
    monkeypatch.setenv("COLLAPSE_BOUNDS_THREADS", "1")
    assert main(["exclusion", "--config", str(cfg), "--out", str(tmp_path)]) == 0
