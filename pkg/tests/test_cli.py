import csv
import json
import subprocess
import sys

import numpy as np
import pytest

from tvarspread.cli import build_config, main
from tvarspread.io import TICK_COLUMNS, ingest_csv, read_config
from tvarspread.exceptions import (
    EmptyBodyError,
    InputFileError,
    MalformedHeaderError,
    RowParseError,
)


def read_rows(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


@pytest.fixture
def spread_csv(tmp_path):
    path = tmp_path / "spread.csv"
    assert main(["simulate", "--output", str(path), "--seed", "3", "--config", str(_config(tmp_path, "T = 400"))]) == 0
    return path


@pytest.fixture
def pair_csv(tmp_path):
    rng = np.random.default_rng(0)
    p2 = 1 + np.cumsum(rng.normal(0, 0.01, 300))
    p1 = 1.5 * p2 + rng.normal(0, 0.02, 300)
    path = tmp_path / "pair.csv"
    with open(path, "w") as fh:
        fh.write("date,p1,p2\n")
        for i, (a, b) in enumerate(zip(p1, p2)):
            fh.write(f"2008-01-{i:03d},{a:.17g},{b:.17g}\n")
    return path


def _config(tmp_path, text, name="run.cfg"):
    path = tmp_path / name
    path.write_text(text + "\n")
    return path


class TestIngest:
    def test_spread_file(self, tmp_path):
        p = tmp_path / "a.csv"
        p.write_text("date,y\n2004-11-05,1.0\n2004-11-06,2.5\n2004-11-07,-0.5\n")
        s = ingest_csv(p)
        assert len(s) == 3 and not s.is_pair
        assert s.labels == ["2004-11-05", "2004-11-06", "2004-11-07"]
        np.testing.assert_array_equal(s.y, [1.0, 2.5, -0.5])

    def test_pair_file(self, pair_csv):
        s = ingest_csv(pair_csv)
        assert s.is_pair and len(s.p1) == 300

    def test_bad_rows_reported_with_line_numbers(self, tmp_path):
        p = tmp_path / "bad.csv"
        p.write_text("date,y\n2004-11-05,1.0\n2004-11-08,abc\n2004-11-09,2\n2004-11-10,nan\n")
        with pytest.raises(RowParseError) as info:
            ingest_csv(p)
        assert info.value.lines == [3, 5]
        assert "3" in str(info.value)

    def test_missing_file(self, tmp_path):
        with pytest.raises(InputFileError):
            ingest_csv(tmp_path / "nope.csv")

    @pytest.mark.parametrize("text", ["", "when,value\n1,2\n", "date,p1\n1,2\n"])
    def test_malformed_header(self, tmp_path, text):
        p = tmp_path / "h.csv"
        p.write_text(text)
        with pytest.raises(MalformedHeaderError):
            ingest_csv(p)

    def test_empty_body(self, tmp_path):
        p = tmp_path / "e.csv"
        p.write_text("date,y\n\n")
        with pytest.raises(EmptyBodyError):
            ingest_csv(p)


def test_read_config(tmp_path):
    p = _config(tmp_path, "# comment\ndelta2 = 0.95  # trailing\n\nm1 = 0,0")
    assert read_config(p) == {"delta2": "0.95", "m1": "0,0"}


def test_documented_defaults():
    cfg = build_config("filter", {}, {"input": "x.csv", "output": "y.csv"})
    assert cfg.hyper.as_tuple() == (1.0, 1.0, 0.98, 0.98)
    assert cfg.gamma == 0.05
    np.testing.assert_array_equal(cfg.prior.P1, 1000 * np.eye(2))
    assert (cfg.prior.n1, cfg.prior.d1) == (3.0, 1.0)


class TestModes:
    def test_simulate_static(self, spread_csv):
        rows = read_rows(spread_csv)
        assert len(rows) == 400 and list(rows[0]) == ["t", "x", "y"]

    @pytest.mark.parametrize("scenario,cols", [("level_jump", ["t", "y"]), ("b_jump", ["t", "y"]), ("tvar", ["t", "y", "A", "B"])])
    def test_simulate_scenarios(self, tmp_path, scenario, cols):
        out = tmp_path / f"{scenario}.csv"
        cfg = _config(tmp_path, "T = 2000\njump_tick = 1000")
        assert main(["simulate", "--scenario", scenario, "--config", str(cfg), "--output", str(out)]) == 0
        rows = read_rows(out)
        assert list(rows[0]) == cols and len(rows) == 2000

    def test_filter_round_trip(self, tmp_path, spread_csv):
        out = tmp_path / "ticks.csv"
        assert main(["filter", "--input", str(spread_csv), "--output", str(out)]) == 0
        rows = read_rows(out)
        assert list(rows[0]) == list(TICK_COLUMNS)
        assert len(rows) == 399 and rows[0]["t"] == "2" and rows[0]["date"] == "2"
        assert all(r["mean_reverting"] in ("true", "false") for r in rows)
        summary = json.loads((tmp_path / "ticks.summary.json").read_text())
        assert summary["ticks"] == 399
        assert {"final_verdict", "msse", "log_likelihood", "final_state"} <= set(summary)

    def test_checkpoint_resume_matches_single_pass(self, tmp_path):
        full = tmp_path / "full.csv"
        main(["simulate", "--output", str(full), "--config", str(_config(tmp_path, "T = 300"))])
        lines = full.read_text().splitlines()
        head, tail = tmp_path / "head.csv", tmp_path / "tail.csv"
        head.write_text("\n".join(lines[:151]) + "\n")
        tail.write_text("\n".join([lines[0]] + lines[151:]) + "\n")
        ck = tmp_path / "state.json"
        assert main(["filter", "--input", str(head), "--output", str(tmp_path / "a.csv"), "--checkpoint", str(ck)]) == 0
        assert main(["filter", "--input", str(tail), "--output", str(tmp_path / "b.csv"), "--resume", str(ck)]) == 0
        assert main(["filter", "--input", str(full), "--output", str(tmp_path / "c.csv")]) == 0
        split = read_rows(tmp_path / "a.csv") + read_rows(tmp_path / "b.csv")
        single = read_rows(tmp_path / "c.csv")
        assert [r["b_hat"] for r in split] == [r["b_hat"] for r in single]

    def test_monitor_pair_routes_through_fls(self, tmp_path, pair_csv):
        out = tmp_path / "mon.csv"
        assert main(["monitor", "--input", str(pair_csv), "--output", str(out), "--mu", "1e8"]) == 0
        rows = read_rows(out)
        assert len(rows) == 299 and rows[0]["date"] == "2008-01-001"

    def test_filter_rejects_pair(self, tmp_path, pair_csv):
        assert main(["filter", "--input", str(pair_csv), "--output", str(tmp_path / "x.csv")]) == 24

    def test_fls(self, tmp_path, pair_csv):
        out = tmp_path / "fls.csv"
        assert main(["fls", "--input", str(pair_csv), "--output", str(out)]) == 0
        rows = read_rows(out)
        assert list(rows[0]) == ["t", "date", "p1", "p2", "beta", "y"] and len(rows) == 300

    def test_optimize(self, tmp_path, spread_csv):
        out = tmp_path / "opt.csv"
        assert main(["optimize", "--input", str(spread_csv), "--output", str(out), "--grid", "delta1=0.99;delta2=0.9,0.95,0.99"]) == 0
        rows = read_rows(out)
        assert [r["rank"] for r in rows] == ["1", "2", "3"]
        lls = [float(r["log_likelihood"]) for r in rows]
        assert lls == sorted(lls, reverse=True)

    def test_optimize_documented_example_grid(self, tmp_path, spread_csv):
        out = tmp_path / "opt.csv"
        cfg = _config(tmp_path, "grid_phi1 = 0.1,1\ngrid_delta1 = 0.992\ngrid_delta2 = 0.995,1\nenforce_constraint = false")
        assert main(["optimize", "--input", str(spread_csv), "--output", str(out), "--config", str(cfg)]) == 0
        assert len(read_rows(out)) == 4

    def test_diagnose_with_comparison(self, tmp_path, spread_csv):
        out = tmp_path / "diag.json"
        assert main(["diagnose", "--input", str(spread_csv), "--output", str(out), "--compare", "1,1,0.9,0.9"]) == 0
        rep = json.loads(out.read_text())
        assert {"msse", "log_likelihood", "aic", "bic", "count", "bayes_factors"} <= set(rep)

    def test_verify(self, tmp_path, spread_csv):
        out = tmp_path / "verify.json"
        assert main(["verify", "--input", str(spread_csv), "--output", str(out), "--delta1", "1", "--delta2", "0.98"]) == 0
        rep = json.loads(out.read_text())
        assert rep["p11_limit"] is None and rep["p22_limit"] > 0


class TestErrors:
    def test_missing_input_file(self, tmp_path, capsys):
        code = main(["filter", "--input", str(tmp_path / "none.csv"), "--output", str(tmp_path / "o.csv")])
        assert code == 20
        assert "error [" in capsys.readouterr().err

    def test_codes_are_distinct(self, tmp_path):
        bad_header = tmp_path / "h.csv"
        bad_header.write_text("foo,bar\n1,2\n")
        empty = tmp_path / "e.csv"
        empty.write_text("date,y\n")
        bad_row = tmp_path / "r.csv"
        bad_row.write_text("date,y\n2004-11-08,abc\n")
        out = str(tmp_path / "o.csv")
        codes = [main(["filter", "--input", str(p), "--output", out]) for p in (bad_header, empty, bad_row)]
        assert codes == [21, 22, 23]

    def test_invalid_prior_and_arguments(self, tmp_path, spread_csv):
        out = str(tmp_path / "o.csv")
        assert main(["filter", "--input", str(spread_csv), "--output", out, "--config", str(_config(tmp_path, "n1 = 0"))]) == 10
        assert main(["filter", "--input", str(spread_csv), "--output", out, "--gamma", "1.5"]) == 11
        assert main(["monitor", "--input", str(spread_csv), "--output", out, "--threshold", "-1"]) == 11
        assert main(["filter", "--input", str(spread_csv)]) == 24

    def test_bad_mode_exits_two(self):
        with pytest.raises(SystemExit) as info:
            main(["nonsense"])
        assert info.value.code == 2


def test_console_script_entry_point(tmp_path):
    out = tmp_path / "s.csv"
    proc = subprocess.run(
        [sys.executable, "-m", "tvarspread.cli", "simulate", "--output", str(out), "--seed", "1"],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0, proc.stderr
    assert len(out.read_text().splitlines()) == 3001
