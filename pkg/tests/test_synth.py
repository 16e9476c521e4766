import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tickmoments import GenConfig, IntervalAggregate, ParameterError, generate, ingest, price_stats, write_trades
from tickmoments.moments import trade_moments
from tickmoments.synth import splitmix64, uniforms

from oracles import StreamingCorrelation, rel_err


class TestSplitMix64:
    def test_reference_values(self):
        # published first outputs for seed 0 (Vigna's reference splitmix64.c)
        assert splitmix64(0, 3).tolist() == [0xE220A8397B1DCDAF, 0x6E789E6AA1B965F4, 0x06C45D188009454F]

    def test_offset_continues_stream(self):
        assert np.array_equal(splitmix64(9, 10)[4:], splitmix64(9, 6, offset=4))

    def test_uniforms_open_interval(self):
        u = uniforms(3, 100_000)
        assert u.min() > 0.0 and u.max() < 1.0
        assert abs(u.mean() - 0.5) < 0.01


class TestGenerate:
    def test_grid_and_count(self):
        t = generate(GenConfig(seed=1, count=5, tick_spacing=250, start=1000))
        assert t.time.tolist() == [1000, 1250, 1500, 1750, 2000]
        assert t.price[0] == 100.0

    def test_deterministic_bytes(self):
        cfg = GenConfig(seed=42, count=2000, rho=0.3)
        a, b = generate(cfg), generate(cfg)
        for col in ("time", "price", "volume", "value"):
            assert getattr(a, col).tobytes() == getattr(b, col).tobytes()

    def test_seeds_differ(self):
        assert not np.array_equal(generate(GenConfig(seed=1)).price, generate(GenConfig(seed=2)).price)

    def test_value_is_exact_product(self):
        t = generate(GenConfig(seed=5, count=1000))
        assert np.array_equal(t.value, t.price * t.volume)

    def test_constant_stream(self):
        t = generate(GenConfig(seed=3, count=50, s=0.0, g=0.0, p0=12.5, u0=3.0))
        assert np.all(t.price == 12.5) and np.all(t.volume == 3.0)
        assert price_stats(t).sigma2 == pytest.approx(0.0, abs=1e-12 * 12.5 ** 2)

    def test_constant_volume_reduces_to_frequency(self):
        ps = price_stats(generate(GenConfig(seed=11, count=500, s=0.05, g=0.0)))
        assert rel_err(ps.a1, ps.freq_mean) < 1e-12
        assert rel_err(ps.sigma2, ps.freq_var) < 1e-9

    @pytest.mark.parametrize("kwargs", [
        dict(count=0), dict(tick_spacing=0), dict(s=-0.1), dict(g=-1.0),
        dict(p0=0.0), dict(u0=-2.0), dict(rho=1.5),
    ])
    def test_invalid_config(self, kwargs):
        with pytest.raises(ParameterError):
            GenConfig(**kwargs)

    def test_uncoupled_correlation_matches_streaming_oracle(self):
        t = generate(GenConfig(seed=2024, count=200_000, s=0.001, g=0.5, rho=0.0))
        tm = trade_moments(IntervalAggregate.from_trades(t))
        corr = tm.correlation
        oracle = StreamingCorrelation()
        for c, u in zip(t.value.tolist(), t.volume.tolist()):
            oracle.push(c, u)
        assert abs(corr - oracle.correlation) <= 0.05

    def test_correlation_monotone_in_rho(self):
        measured = []
        for rho in (-0.9, -0.4, 0.0, 0.4, 0.9):
            t = generate(GenConfig(seed=8, count=20_000, s=0.01, g=0.5, rho=rho))
            step = np.diff(np.log(t.price))
            measured.append(np.corrcoef(step, np.log(t.volume[1:]))[0, 1])
        assert all(a < b for a, b in zip(measured, measured[1:]))
        assert abs(measured[2]) < 0.05


class TestRoundTrip:
    @settings(max_examples=10, deadline=None)
    @given(seed=st.integers(0, 2**63 - 1))
    def test_csv_round_trip_is_lossless(self, seed, tmp_path_factory):
        t = generate(GenConfig(seed=seed, count=300))
        path = tmp_path_factory.mktemp("rt") / "t.csv"
        write_trades(t, path)
        back = ingest(path).trades
        assert np.array_equal(back.time, t.time)
        assert np.array_equal(back.price, t.price)
        assert np.array_equal(back.volume, t.volume)
        assert price_stats(back) == price_stats(t)
