"""End-to-end tests of the command-line interface."""

import numpy as np
import pytest

from hdchange import segment
from hdchange.cli import main

MC = ["--reps", "4000", "--grid", "400", "--seed", "3"]


def write_csv(path, array, header=None):
    with open(path, "w") as fh:
        if header:
            fh.write(header + "\n")
        for row in np.atleast_2d(array):
            fh.write(",".join(f"{x:.12g}" for x in row) + "\n")
    return str(path)


def make_panel_csv(path, d=2, T=150, jump=0.0, theta=0.5, seed=0, header=False):
    rng = np.random.default_rng(seed)
    data = rng.standard_normal((d, T))
    data[0, int(theta * T):] += jump
    return write_csv(path, data.T,
                     header=",".join(f"c{i}" for i in range(d)) if header else None)


def test_cmd_test_null_accepts(tmp_path, capsys):
    path = make_panel_csv(tmp_path / "null.csv", seed=11, header=True)
    code = main(["test", "--input", path, "--preset", "average"] + MC)
    out = capsys.readouterr().out
    assert code == 0
    assert "statistic=" in out and "p_value=" in out and "reject=false" in out


def test_cmd_test_change_rejects_and_locates(tmp_path, capsys):
    T = 200
    path = make_panel_csv(tmp_path / "alt.csv", d=2, T=T, jump=3.0, seed=1)
    direction = write_csv(tmp_path / "dir.csv", np.array([[1.0], [0.0]]))
    code = main(["test", "--input", path, "--direction", direction] + MC)
    out = capsys.readouterr().out
    assert code == 2
    got = dict(line.split("=") for line in out.strip().splitlines())
    assert abs(int(got["changepoint_index"]) - 100) <= 0.02 * T


def test_cmd_test_wrong_direction_length(tmp_path, capsys):
    path = make_panel_csv(tmp_path / "x.csv", d=2)
    bad = write_csv(tmp_path / "bad.csv", np.array([[1.0], [2.0], [3.0]]))
    code = main(["test", "--input", path, "--direction", bad] + MC)
    assert code == 1
    assert "error:" in capsys.readouterr().err


def test_cmd_test_transpose_equivalence(tmp_path, capsys):
    rng = np.random.default_rng(5)
    data = rng.standard_normal((3, 80))
    rowwise = write_csv(tmp_path / "rows_time.csv", data.T)
    colwise = write_csv(tmp_path / "rows_comp.csv", data)
    main(["test", "--input", rowwise] + MC)
    out1 = capsys.readouterr().out
    main(["test", "--input", colwise, "--transpose"] + MC)
    out2 = capsys.readouterr().out
    assert out1 == out2


def test_cmd_test_panel_method(tmp_path, capsys):
    path = make_panel_csv(tmp_path / "p.csv", d=6, T=150, jump=2.5, seed=3)
    code = main(["test", "--input", path, "--method", "panel",
                 "--panel-variances", "split"] + MC)
    assert code == 2
    assert "reject=true" in capsys.readouterr().out


def test_cmd_segment_constant_empty(tmp_path, capsys):
    path = write_csv(tmp_path / "const.csv", np.linspace(0, 0, 60)[:, None] + 1.0)
    code = main(["segment", "--input", path] + MC)
    out = capsys.readouterr().out
    assert code == 0
    assert out.strip().splitlines() == ["location,statistic,p_value"]


def test_cmd_segment_two_changes(tmp_path, capsys):
    rng = np.random.default_rng(8)
    y = rng.standard_normal(300)
    y[90:] += 3.0
    y[210:] -= 3.0
    path = write_csv(tmp_path / "two.csv", y[:, None])
    code = main(["segment", "--input", path, "--alpha", "0.01"] + MC)
    out = capsys.readouterr().out
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == "location,statistic,p_value"
    locs = [int(line.split(",")[0]) for line in lines[1:]]
    assert len(locs) == 2
    assert abs(locs[0] - 90) <= 5 and abs(locs[1] - 210) <= 5


def test_cmd_segment_fuller_matches_pretransformed(tmp_path, capsys):
    rng = np.random.default_rng(9)
    r = rng.standard_normal(240) * np.where(np.arange(240) < 120, 0.01, 0.05)
    prices = np.exp(np.concatenate([[0.0], np.cumsum(r)]))
    praw = write_csv(tmp_path / "prices.csv", prices[:, None])
    code = main(["segment", "--input", praw, "--fuller"] + MC)
    out1 = capsys.readouterr().out
    assert code == 0
    transformed = segment.fuller_transform(prices)
    ppre = write_csv(tmp_path / "pre.csv", transformed[:, None])
    main(["segment", "--input", ppre] + MC)
    out2 = capsys.readouterr().out
    assert out1 == out2
    assert len(out1.strip().splitlines()) >= 2  # found the volatility change


def test_cmd_critval_deterministic_and_validating(tmp_path, capsys):
    out1 = tmp_path / "t1.txt"
    out2 = tmp_path / "t2.txt"
    args = ["critval", "--law", "bridge-sup", "--alpha", "0.05",
            "--reps", "20000", "--grid", "300", "--seed", "4"]
    assert main(args + ["--out", str(out1)]) == 0
    capsys.readouterr()
    assert main(args + ["--out", str(out2)]) == 0
    capsys.readouterr()
    assert out1.read_bytes() == out2.read_bytes()
    # value sanity at modest reps
    table = out1.read_text().splitlines()
    q = float(next(ln for ln in table if ln.startswith("0.050000")).split(",")[1])
    assert q == pytest.approx(1.3581, abs=0.02)
    assert main(["critval", "--law", "bridge-sup", "--alpha", "1.5",
                 "--out", str(tmp_path / "bad.txt")]) == 1


def test_cmd_efficiency_reports(tmp_path, capsys):
    delta = write_csv(tmp_path / "delta.csv", np.array([[1.0], [0.0]]))
    sigma = write_csv(tmp_path / "sigma.csv", np.eye(2))
    assert main(["efficiency", "--delta", delta, "--sigma", sigma]) == 0
    got = dict(line.split("=") for line in capsys.readouterr().out.splitlines())
    assert float(got["e_oracle"]) == pytest.approx(1.0)

    d16 = write_csv(tmp_path / "d16.csv", np.full((16, 1), 0.25))
    s16 = write_csv(tmp_path / "s16.csv", np.ones((16, 1)))
    assert main(["efficiency", "--delta", d16, "--structure", "independent",
                 "--s", s16]) == 0
    got = dict(line.split("=") for line in capsys.readouterr().out.splitlines())
    assert float(got["cone_halfangle"]) == pytest.approx(1.0472, abs=1e-4)

    phi = write_csv(tmp_path / "phi.csv", np.ones((16, 1)))
    assert main(["efficiency", "--delta", d16, "--structure", "mixed",
                 "--s", s16, "--phi", phi]) == 0
    got = dict(line.split("=") for line in capsys.readouterr().out.splitlines())
    from hdchange.efficiency import eff_panel_misspecified
    e3, a_d = eff_panel_misspecified(np.full(16, 0.25), np.ones(16), np.ones(16))
    assert float(got["e3"]) == pytest.approx(e3)
    assert float(got["a_d"]) == pytest.approx(a_d)


def test_cmd_figures_writes_csvs(tmp_path, capsys):
    code = main(["figures", "--figure", "2", "--outdir", str(tmp_path / "out"),
                 "--d", "8", "--T", "60", "--reps", "100",
                 "--null-reps", "100", "--seed", "1"])
    out = capsys.readouterr().out
    assert code == 0
    paths = out.strip().splitlines()
    assert len(paths) == 1 and paths[0].endswith("figure2_main.csv")
    content = open(paths[0]).read()
    assert "sweep_value,method,rejection_rate,mc_se,reps,seed" in content


def test_config_file_defaults_flags_win(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("alpha=0.2\nreps=4000\ngrid=400\nseed=3\n")
    path = make_panel_csv(tmp_path / "n.csv", seed=11)
    main(["--config", str(cfg), "test", "--input", path])
    out1 = capsys.readouterr().out
    assert "critical_value=" in out1
    # flag overrides the config file
    main(["--config", str(cfg), "test", "--input", path, "--alpha", "0.05"])
    out2 = capsys.readouterr().out
    crit1 = float(dict(l.split("=") for l in out1.strip().splitlines())
                  ["critical_value"])
    crit2 = float(dict(l.split("=") for l in out2.strip().splitlines())
                  ["critical_value"])
    assert crit2 > crit1  # alpha 0.05 has a larger critical value than 0.2


def test_cli_rejects_malformed_csv(tmp_path, capsys):
    bad = tmp_path / "bad.csv"
    bad.write_text("a,b\n1,2\n3,notanumber\n")
    assert main(["test", "--input", str(bad)] + MC) == 1
    assert "non-numeric" in capsys.readouterr().err


def test_cmd_test_sum_mode_and_epidemic_shape(tmp_path, capsys):
    rng = np.random.default_rng(21)
    y = rng.standard_normal(200)
    y[60:140] += 2.5  # epidemic change: shifts away and reverts
    path = write_csv(tmp_path / "epi.csv", y[:, None])
    assert main(["test", "--input", path, "--shape", "epidemic"] + MC) == 2
    out = capsys.readouterr().out
    assert "changepoint_fraction" not in out  # no AMOC location for epidemic
    code_sum = main(["test", "--input", path, "--mode", "sum"] + MC)
    assert code_sum in (0, 2)
    assert "statistic=" in capsys.readouterr().out


def test_tables_env_var_caches_quantile_tables(tmp_path, capsys, monkeypatch):
    cache = tmp_path / "tables"
    monkeypatch.setenv("HDCHANGE_TABLES", str(cache))
    path = make_panel_csv(tmp_path / "null2.csv", seed=12)
    assert main(["test", "--input", path] + MC) in (0, 2)
    capsys.readouterr()
    tables = list(cache.glob("*.txt"))
    assert len(tables) == 1
    assert "bridge_sup" in tables[0].name
