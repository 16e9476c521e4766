import json
import logging

import numpy as np
import pytest

from tickmoments import DataError, GenConfig, ParameterError, RunConfig, generate, ingest, parse_duration, run, write_trades
from tickmoments.cli import main
from tickmoments.moments import price_stats

from oracles import rel_err

SEC = 1_000_000_000


def write_csv(path, rows, header="time,price,volume"):
    path.write_text(header + "\n" + "".join(r + "\n" for r in rows), encoding="utf-8")
    return path


def load(path):
    return json.loads(path.read_text())


class TestIngest:
    def test_one_row(self, tmp_path):
        res = ingest(write_csv(tmp_path / "a.csv", ["1000000000,10.0,2.0"]))
        (t,) = list(res.trades)
        assert (t.time, t.price, t.volume, t.value) == (SEC, 10.0, 2.0, 20.0)
        assert (res.rows_read, res.rejected, res.reordered) == (1, 0, False)

    def test_header_only(self, tmp_path, caplog):
        with caplog.at_level(logging.WARNING):
            res = ingest(write_csv(tmp_path / "a.csv", []))
        assert len(res.trades) == 0
        assert "no usable trades" in caplog.text

    def test_zero_volume_rejected(self, tmp_path):
        res = ingest(write_csv(tmp_path / "a.csv", ["0,10.0,2.0", "1,11.0,0", "2,12.0,1.0"]))
        assert res.rejected == 1 and len(res.trades) == 2

    @pytest.mark.parametrize("bad", ["5,abc,1.0", "5,1.0", "5,1.0,2.0,3.0", "5.5,1.0,1.0", "1_000,1.0,1.0"])
    def test_malformed_reports_line(self, tmp_path, bad):
        path = write_csv(tmp_path / "a.csv", ["0,10.0,2.0", bad])
        with pytest.raises(DataError, match="line 3"):
            ingest(path)

    def test_bad_header(self, tmp_path):
        with pytest.raises(DataError, match="line 1"):
            ingest(write_csv(tmp_path / "a.csv", ["0,1,1"], header="t,p,v"))

    def test_reorders_with_warning(self, tmp_path, caplog):
        with caplog.at_level(logging.WARNING):
            res = ingest(write_csv(tmp_path / "a.csv", ["20,1.0,1.0", "10,2.0,1.0", "30,3.0,1.0"]))
        assert res.reordered and res.trades.time.tolist() == [10, 20, 30]
        assert res.trades.price.tolist() == [2.0, 1.0, 3.0]
        assert "re-sorting" in caplog.text

    def test_bom_tolerated(self, tmp_path):
        path = tmp_path / "a.csv"
        path.write_text("﻿time,price,volume\n0,1.5,2\n", encoding="utf-8")
        assert ingest(path).trades.value.tolist() == [3.0]


class TestParseDuration:
    @pytest.mark.parametrize("text,ns", [
        ("1s", SEC), ("250ms", 250_000_000), ("1.5s", 1_500_000_000), ("3us", 3000),
        ("7ns", 7), ("7", 7), ("2m", 120 * SEC), ("1h", 3600 * SEC), ("1d", 86400 * SEC),
    ])
    def test_units(self, text, ns):
        assert parse_duration(text) == ns

    @pytest.mark.parametrize("text", ["", "s", "1x", "-1s", "1.5ns", "abc"])
    def test_rejects(self, text):
        with pytest.raises(ParameterError):
            parse_duration(text)


class TestRunConfig:
    @pytest.mark.parametrize("kwargs", [
        dict(delta=0), dict(delta=SEC, tau=0), dict(delta=SEC, levels=(1,)),
        dict(delta=SEC, alphas=(0.0,)), dict(delta=SEC, alphas=(1.0,)),
        dict(delta=SEC, n_max=1), dict(delta=SEC, fmt="xml"), dict(delta=SEC, partial="pad"),
    ])
    def test_invalid(self, kwargs):
        with pytest.raises(ParameterError):
            RunConfig(**kwargs)


@pytest.fixture
def pair_csv(tmp_path):
    return write_csv(tmp_path / "pair.csv", ["0,10.0,2.0", "1000000000,12.0,3.0"])


class TestRunCommand:
    def test_pair_fixture_row(self, pair_csv, tmp_path):
        out = tmp_path / "out"
        assert main(["run", "--input", str(pair_csv), "--delta", "10s", "--out", str(out)]) == 0
        (row,) = load(out / "intervals.json")
        assert rel_err(row["a1"], 11.2) < 1e-12
        assert row["sigma2"] == pytest.approx(0.886154, abs=1e-6)
        assert rel_err(row["sigma2"], 5.76 / 6.5) < 1e-12
        assert row["count"] == 2

    def test_return_row_matches_fixture(self, tmp_path):
        # history ticks at 0s and 5s sit in interval -1; trades at 10s and 15s look back 10s
        csv = write_csv(tmp_path / "r.csv", ["0,8.0,2.0", "5000000000,10.0,3.0",
                                             "10000000000,10.0,2.0", "15000000000,12.0,3.0"])
        out = tmp_path / "out"
        argv = ["run", "--input", str(csv), "--delta", "10s", "--origin", str(12_500_000_000),
                "--tau", "10s", "--out", str(out)]
        assert main(argv) == 0
        rows = {r["k"]: r for r in load(out / "intervals.json")}
        assert rows[-1]["h1"] is None and rows[-1]["ret_dropped"] == 2
        assert rel_err(rows[0]["h1"], 56 / 46) < 1e-12
        assert rows[0]["phi2"] == 49.0 and rows[0]["corr_c_co"] == 56.0
        assert rows[0]["v2"] == pytest.approx(0.54442 / 1156, rel=1e-4)
        diag = load(out / "diagnostics.json")
        assert diag["returns"]["dropped"] == 2

    def test_levels_window_count(self, tmp_path):
        csv = write_csv(tmp_path / "f.csv", [f"{k * SEC},{10 + k}.0,1.0" for k in range(4)])
        out = tmp_path / "out"
        assert main(["run", "--input", str(csv), "--delta", "1s", "--levels", "2", "--out", str(out)]) == 0
        rows = load(out / "level2.json")
        assert len(rows) == 2
        assert rows[0]["a2_price"] == 10.5 and rows[1]["a2_price"] == 12.5

    def test_empty_interval_nulls(self, tmp_path):
        csv = write_csv(tmp_path / "g.csv", ["0,10.0,1.0", "3000000000,11.0,1.0"])
        out = tmp_path / "out"
        assert main(["run", "--input", str(csv), "--delta", "1s", "--out", str(out)]) == 0
        text = (out / "intervals.json").read_text()
        rows = json.loads(text)
        assert [r["count"] for r in rows] == [1, 0, 0, 1]
        assert rows[1]["a1"] is None and '"a1": null' in text
        assert load(out / "diagnostics.json")["intervals_empty"] == 2

    def test_csv_format(self, pair_csv, tmp_path):
        out = tmp_path / "out"
        assert main(["run", "--input", str(pair_csv), "--delta", "10s", "--format", "csv", "--out", str(out)]) == 0
        header, row = (out / "intervals.csv").read_text().splitlines()
        rec = dict(zip(header.split(","), row.split(",")))
        assert float(rec["a1"]) == pytest.approx(11.2, rel=1e-15)
        assert (out / "var.csv").exists()

    def test_var_table(self, pair_csv, tmp_path):
        out = tmp_path / "out"
        main(["run", "--input", str(pair_csv), "--delta", "10s", "--alpha", "0.05", "--out", str(out)])
        (row,) = load(out / "var.json")
        z = 1.6448536
        assert row["divergence"] == pytest.approx((11.2 - z * 0.941358) - (11 - z), abs=1e-6)

    def test_deterministic(self, tmp_path):
        csv = tmp_path / "s.csv"
        assert main(["synth", "--out", str(csv), "--seed", "3", "--count", "5000", "--spacing", "10ms"]) == 0
        outs = []
        for name in ("a", "b"):
            out = tmp_path / name
            argv = ["run", "--input", str(csv), "--delta", "1s", "--tau", "50ms", "--levels", "2,3",
                    "--out", str(out)]
            assert main(argv) == 0
            outs.append({p.name: p.read_bytes() for p in sorted(out.iterdir())})
        assert outs[0] == outs[1]
        assert set(outs[0]) == {"intervals.json", "level2.json", "level3.json", "var.json", "diagnostics.json"}


class TestExitCodes:
    def test_usage_error(self, pair_csv, capsys):
        assert main(["run", "--input", str(pair_csv), "--delta", "0s"]) == 1

    def test_bad_level_factor(self, pair_csv, tmp_path):
        assert main(["run", "--input", str(pair_csv), "--delta", "1s", "--levels", "1",
                     "--out", str(tmp_path / "o")]) == 1

    def test_unknown_flag(self):
        with pytest.raises(SystemExit) as e:
            main(["run", "--bogus"])
        assert e.value.code == 1

    def test_missing_file(self, tmp_path):
        assert main(["run", "--input", str(tmp_path / "nope.csv"), "--delta", "1s",
                     "--out", str(tmp_path / "o")]) == 2

    def test_malformed_data(self, tmp_path, capsys):
        csv = write_csv(tmp_path / "bad.csv", ["0,1.0,1.0", "x,1.0,1.0"])
        assert main(["run", "--input", str(csv), "--delta", "1s", "--out", str(tmp_path / "o")]) == 2
        assert "line 3" in capsys.readouterr().err

    def test_no_usable_intervals(self, tmp_path, capsys):
        csv = write_csv(tmp_path / "z.csv", ["0,1.0,0"])
        assert main(["run", "--input", str(csv), "--delta", "1s", "--out", str(tmp_path / "o")]) == 2
        assert "no trades" in capsys.readouterr().err

    def test_bad_synth_config(self, tmp_path):
        assert main(["synth", "--out", str(tmp_path / "s.csv"), "--rho", "2"]) == 1


class TestSynthRoundTrip:
    def test_file_matches_memory(self, tmp_path):
        cfg = GenConfig(seed=77, count=4000, tick_spacing=parse_duration("25ms"), g=0.7, rho=0.2)
        csv = tmp_path / "s.csv"
        assert main(["synth", "--out", str(csv), "--seed", "77", "--count", "4000", "--spacing", "25ms",
                     "--g", "0.7", "--rho", "0.2"]) == 0
        mem = generate(cfg)
        disk = ingest(csv).trades
        assert np.array_equal(mem.price, disk.price) and np.array_equal(mem.volume, disk.volume)
        rc = RunConfig(delta=SEC, tau=parse_duration("100ms"), levels=(2,))
        a, b = run(mem, rc), run(disk, rc)
        assert [r.price for r in a.intervals] == [r.price for r in b.intervals]
        assert [r.returns for r in a.intervals] == [r.returns for r in b.intervals]
        assert a.levels[0][1] == b.levels[0][1]

    def test_write_trades_round_trip(self, tmp_path, pair_trades):
        write_trades(pair_trades, tmp_path / "p.csv")
        assert price_stats(ingest(tmp_path / "p.csv").trades) == price_stats(pair_trades)


class TestSelftest:
    def test_passes(self, capsys):
        assert main(["selftest"]) == 0
        out = capsys.readouterr().out
        assert "FAIL" not in out and out.count("PASS") == 7
