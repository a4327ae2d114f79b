import math

import numpy as np
import pandas as pd
import pytest

from pyzeno import helpers
from pyzeno.analysis import eq4_coefficient
from pyzeno.config import default_config, parse_config
from pyzeno.experiments import (memory_lifetime, run_decay_trace, run_detuning_sweep,
                                run_dfs, run_dispersive, run_experiment, run_wstate,
                                summarize, write_csv)
from pyzeno.helpers import ConfigError, HorizonError
from pyzeno.model import HybridParams


@pytest.fixture
def cache_dir(tmp_path, monkeypatch):
    monkeypatch.setattr(helpers.appdirs, "user_cache_dir", lambda *args, **kwargs: str(tmp_path))
    return tmp_path


def test_write_csv_uses_nine_significant_digits(tmp_path):
    path = tmp_path / "out.csv"
    write_csv(pd.DataFrame({"x": [math.pi], "y": [math.inf]}), str(path))

    assert path.read_text().splitlines() == ["x,y", "3.14159265,inf"]


def test_wstate_grid():
    cfg = parse_config({"experiment": "wstate", "n_spins": 8})
    frame = run_wstate(cfg)

    assert list(frame.columns) == ["theta_rad", "overlap_re", "overlap_im", "overlap_abs"]
    assert len(frame) == 65
    assert frame["theta_rad"].iloc[-1] == pytest.approx(2 * math.pi)
    assert frame["overlap_abs"].iloc[0] == pytest.approx(1.0)
    assert frame["overlap_abs"].iloc[8] < 1e-12
    assert frame["overlap_abs"].iloc[-1] == pytest.approx(1.0)


def test_wstate_summary():
    cfg = parse_config({"experiment": "wstate"})
    summary = summarize(cfg, run_wstate(cfg))

    assert summary["orthogonalization_time_ns"] == pytest.approx(1 / (28 * 10 * 20e-6))
    assert summary["overlap_after_pulse"] < 1e-9


def test_wstate_requires_theta_sweep():
    cfg = parse_config({"experiment": "wstate",
                        "sweep": {"field": "delta_over_2pi_mhz", "values": [1, 2]}})
    with pytest.raises(ConfigError):
        run_wstate(cfg)


def test_dispersive_table():
    cfg = parse_config({"experiment": "dispersive", "t2_sc_ns": 10,
                        "sweep": {"field": "delta_over_2pi_mhz", "values": [250, 500, 1000]}})
    frame = run_dispersive(cfg)

    assert list(frame.columns) == ["delta_mhz", "t_i_ns", "phase_error", "anti_zeno_t1_ns"]
    assert frame["phase_error"].is_monotonic_decreasing
    assert frame["anti_zeno_t1_ns"].is_monotonic_increasing

    g = 2 * math.pi * 0.025
    assert frame["phase_error"].iloc[0] == pytest.approx(g ** 2 * 20 / (2 * math.pi * 0.25))


def test_dispersive_without_dephasing_leaves_lifetime_blank():
    cfg = parse_config({"experiment": "dispersive", "t2_sc_ns": "inf"})
    frame = run_dispersive(cfg)

    assert len(frame) == 1
    assert math.isnan(frame["anti_zeno_t1_ns"].iloc[0])


def test_dispersive_at_zero_detuning_diverges():
    cfg = parse_config({"experiment": "dispersive", "delta_over_2pi_mhz": 0})
    with pytest.raises(ZeroDivisionError):
        run_dispersive(cfg)


def test_decay_trace_variants():
    cfg = parse_config({"experiment": "decay-trace", "delta_over_2pi_mhz": 600,
                        "variants": [[10, "inf"], [10, 400]],
                        "t_max_ns": 200, "sample_dt_ns": 1})
    frame = run_decay_trace(cfg, quiet = True)

    assert list(frame.columns) == ["t2_ns", "t1_ns", "t_ns", "p_memory", "p_control"]
    assert len(frame) == 402
    assert frame["p_memory"].iloc[0] == pytest.approx(1.0)
    assert list(frame["t1_ns"].unique()) == [math.inf, 400.0]


def test_dfs_experiment():
    cfg = parse_config({"experiment": "dfs", "states": ["dark", "bright"],
                        "t_max_ns": 100, "sample_dt_ns": 1})
    frame = run_dfs(cfg, quiet = True)

    assert list(frame.columns) == ["state", "t_ns", "p_memory", "p_control"]
    assert len(frame) == 202

    summary = summarize(cfg, frame)
    assert summary["max leakage (dark)"] < 1e-10
    assert summary["max leakage (bright)"] > 1e-4


def test_memory_lifetime_without_coupling():
    with pytest.raises(HorizonError):
        memory_lifetime(HybridParams.from_mhz(0, 1000, t2_sc_ns = 10))


def test_memory_lifetime_with_too_short_fixed_horizon():
    with pytest.raises(HorizonError):
        memory_lifetime(HybridParams.from_mhz(0, 1000, t2_sc_ns = 10), t_max = 100, sample_dt = 1)


def test_detuning_sweep_requires_finite_dephasing():
    cfg = parse_config({"experiment": "detuning-sweep", "t2_sc_ns": "inf"})
    with pytest.raises(ConfigError):
        run_detuning_sweep(cfg, quiet = True)


@pytest.mark.slow
def test_detuning_sweep_at_reference_parameters():
    cfg = default_config("detuning-sweep")
    frame = run_detuning_sweep(cfg, quiet = True)

    assert list(frame.columns) == ["delta_mhz", "t1_eff_numeric_ns", "t1_eff_analytic_ns"]
    assert list(frame["delta_mhz"]) == list(range(600, 1401, 100))
    assert frame["t1_eff_numeric_ns"].is_monotonic_increasing

    summary = summarize(cfg, frame)
    assert 0.45 <= summary["alpha"] <= 0.55
    assert summary["exponent"] == pytest.approx(2.0, abs = 0.1)

    assert np.allclose(frame["t1_eff_analytic_ns"], frame["t1_eff_numeric_ns"], rtol = 0.1, atol = 0)

    coefficient = eq4_coefficient(cfg.params(delta_over_2pi_mhz = 600))
    assert frame["t1_eff_analytic_ns"].iloc[0] == pytest.approx(summary["alpha"] * coefficient)


@pytest.mark.slow
def test_dephasing_sweep_at_reference_parameters():
    frame = run_experiment(default_config("dephasing-sweep"), quiet = True)

    assert list(frame.columns) == ["t2_ns", "delta_mhz", "t1_eff_ns"]
    assert len(frame) == 7 * 4

    grid = frame.pivot(index = "t2_ns", columns = "delta_mhz", values = "t1_eff_ns")
    assert list(grid.index) == list(range(10, 41, 5))
    assert list(grid.columns) == [600, 800, 1000, 1200]

    # longer T2 and larger detuning both protect the memory
    assert np.all(np.diff(grid.values, axis = 0) > 0)
    assert np.all(np.diff(grid.values, axis = 1) > 0)


@pytest.mark.slow
def test_lifetime_with_relaxation_near_fourteen_microseconds():
    g = 2 * math.pi * 0.025
    estimate, _ = memory_lifetime(HybridParams(g = g, delta = 44 * g, t2_sc = 35, t1_sc = 400))

    assert estimate.t1_eff == pytest.approx(14000, rel = 0.3)


def test_results_are_cached(cache_dir):
    cfg = parse_config({"experiment": "wstate", "n_spins": 16})

    first = run_wstate(cfg, cache = True)
    assert len(list(cache_dir.glob("*.csv"))) == 1

    second = run_wstate(cfg, cache = True)
    pd.testing.assert_frame_equal(first, second, check_dtype = False)


def test_runs_are_deterministic(tmp_path):
    cfg = parse_config({"experiment": "dfs", "states": ["bright"], "t_max_ns": 50, "sample_dt_ns": 1})

    a = write_csv(run_dfs(cfg, quiet = True), str(tmp_path / "a.csv"))
    b = write_csv(run_dfs(cfg, quiet = True), str(tmp_path / "b.csv"))

    with open(a, "rb") as fa, open(b, "rb") as fb:
        assert fa.read() == fb.read()


def test_quiet_suppresses_default_notices(capsys):
    cfg = parse_config({"experiment": "decay-trace", "variants": [[10, 400]],
                        "t_max_ns": 20, "sample_dt_ns": 1})

    run_decay_trace(cfg, quiet = True)
    assert capsys.readouterr().out == ""

    cfg = parse_config({"experiment": "dfs", "states": ["dark"], "sample_dt_ns": 500})
    run_dfs(cfg)
    assert "Using the default t_max" in capsys.readouterr().out


@pytest.mark.slow
def test_reference_decay_traces():
    frame = run_decay_trace(default_config("decay-trace"), quiet = True)

    def curve(t2, t1):
        block = frame[(frame["t2_ns"] == t2) & (frame["t1_ns"] == t1)]
        return block.set_index("t_ns")["p_memory"]

    both = curve(10, 400)
    dephasing = curve(10, math.inf)
    relaxation = curve(math.inf, 400)

    assert dephasing.loc[20000] == pytest.approx(0.5, abs = 0.02)
    assert both.iloc[-1] < 0.05

    late = relaxation.index >= 1000
    assert np.all(relaxation[late].values > dephasing[late].values)
    assert np.all(relaxation[late].values > both[late].values)
