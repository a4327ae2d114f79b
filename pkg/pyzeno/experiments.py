"""Experiment runners: lifetime sweeps, decay traces and the remedy tables"""

__author__ = "pyzeno developers"

import logging
import math

import pandas as pd

from pyzeno import __version__
from pyzeno.analysis import (effective_t1, eq4_t1, fit_alpha, power_law_exponent,
                             rate_equation_t1)
from pyzeno.decoupling import (GradientPulseParams, dfs_leakage,
                               gradient_overlap, orthogonalization_time, w_overlap)
from pyzeno.dynamics import integrate
from pyzeno.helpers import (ConfigError, HorizonError, rad_per_ns_to_mhz, read_cached,
                            write_cached)
from pyzeno.linalg import density_matrix
from pyzeno.model import basis_ket, dispersive_phase_error, lindblad_model

__all__ = ["run_detuning_sweep", "run_decay_trace", "run_dephasing_sweep", "run_wstate",
           "run_dfs", "run_dispersive", "run_experiment", "summarize", "write_csv",
           "memory_lifetime"]

logger = logging.getLogger(__name__)

DEFAULT_HORIZON_FACTOR = 50
MAX_HORIZON_FACTOR = 100
DEFAULT_SAMPLES = 5000
DEFAULT_DFS_T_MAX_NS = 10000.0


def write_csv(frame, path):
    """
    Write a result table: header row, comma separated, 9 significant digits
    """
    frame.to_csv(path, index = False, float_format = "%.9g")
    return path


def _memory_excited_state():
    return density_matrix(basis_ket(0, 1))


def memory_lifetime(p, t_max = None, sample_dt = None):
    """
    Integrate the master equation from |0>_sc |1>_m and extract the effective T1

    Parameters
    ----------
    p : HybridParams
        System parameters.
    t_max : float, optional
        Horizon in ns. Defaults to 50 times the rate-equation estimate; on an
        insufficient horizon the run is repeated with a doubled horizon up to 100
        times the estimate.
    sample_dt : float, optional
        Sampling interval in ns. Defaults to t_max / 5000.

    Returns
    ----------
    tuple : (T1Estimate, DecayTrace)
    """
    estimate = rate_equation_t1(p)

    if t_max is None:
        if not math.isfinite(estimate):
            raise HorizonError("No decay is expected for these parameters (g = 0 or no noise); "
                               "set t_max_ns explicitly.")
        t_max = DEFAULT_HORIZON_FACTOR * estimate

    ceiling = MAX_HORIZON_FACTOR * estimate if math.isfinite(estimate) else t_max
    ceiling = max(ceiling, t_max)

    model = lindblad_model(p)
    rho0 = _memory_excited_state()

    while True:
        dt = sample_dt if sample_dt is not None else t_max / DEFAULT_SAMPLES
        trace = integrate(rho0, model, t_max, dt)
        try:
            estimate = effective_t1(trace)
        except HorizonError:
            if t_max >= ceiling:
                raise
            t_max = min(2 * t_max, ceiling)
            logger.warning("Extending the horizon to %.4g ns", t_max)
            continue

        logger.info("Delta/2pi = %g MHz: t1_eff = %.6g ns",
                    rad_per_ns_to_mhz(p.delta), estimate.t1_eff)
        return estimate, trace


def _axis_values(cfg, field_name, default):
    if cfg.sweep is None:
        return [default]
    if cfg.sweep.field != field_name:
        raise ConfigError(f"The {cfg.experiment} experiment sweeps '{field_name}', not '{cfg.sweep.field}'.")
    return list(cfg.sweep.values)


def _compute_detuning_sweep(cfg):
    rows = []
    for delta_mhz in _axis_values(cfg, "delta_over_2pi_mhz", cfg.delta_over_2pi_mhz):
        p = cfg.params(delta_over_2pi_mhz = delta_mhz)
        estimate, _ = memory_lifetime(p, cfg.t_max_ns, cfg.sample_dt_ns)
        rows.append({"delta_mhz": delta_mhz, "t1_eff_numeric_ns": estimate.t1_eff})

    frame = pd.DataFrame(rows)

    alpha = fit_alpha([(cfg.params(delta_over_2pi_mhz = d), t)
                       for d, t in zip(frame["delta_mhz"], frame["t1_eff_numeric_ns"])])
    frame["t1_eff_analytic_ns"] = [eq4_t1(cfg.params(delta_over_2pi_mhz = d), alpha)
                                   for d in frame["delta_mhz"]]

    return frame


def run_detuning_sweep(cfg, quiet = False, cache = False):
    """
    Effective memory lifetime against detuning, numeric and analytic

    Parameters
    ----------
    cfg : SweepConfig
        Config with finite t2_sc and a sweep over delta_over_2pi_mhz.
    quiet : bool
        Suppress notices about substituted defaults.
    cache : bool
        If True, read the result from the user cache directory when this exact
        config has been run before, and store it otherwise.

    Returns
    ----------
    pandas.DataFrame : Columns delta_mhz, t1_eff_numeric_ns, t1_eff_analytic_ns.
    The analytic column uses the alpha fitted on the same sweep.
    """
    if not math.isfinite(cfg.t2_sc_ns):
        raise ConfigError("The detuning sweep needs a finite t2_sc_ns.")

    _notice_defaults(cfg, quiet)

    return _with_cache(cfg, cache, _compute_detuning_sweep)


def _compute_decay_trace(cfg):
    variants = cfg.variants if cfg.variants is not None else ((cfg.t2_sc_ns, cfg.t1_sc_ns),)

    t_max = cfg.t_max_ns
    if t_max is None:
        estimates = [rate_equation_t1(cfg.params(t2_sc_ns = t2, t1_sc_ns = t1)) for t2, t1 in variants]
        finite = [e for e in estimates if math.isfinite(e)]
        if len(finite) == 0:
            raise HorizonError("No decay is expected for any variant; set t_max_ns explicitly.")
        t_max = DEFAULT_HORIZON_FACTOR * min(finite)

    sample_dt = cfg.sample_dt_ns if cfg.sample_dt_ns is not None else t_max / DEFAULT_SAMPLES

    frames = []
    for t2, t1 in variants:
        p = cfg.params(t2_sc_ns = t2, t1_sc_ns = t1)
        trace = integrate(_memory_excited_state(), lindblad_model(p), t_max, sample_dt)
        logger.info("T2 = %g ns, T1 = %g ns: trace error %.2g", t2, t1, trace.trace_error)

        f = trace.to_frame()
        f.insert(0, "t1_ns", t1)
        f.insert(0, "t2_ns", t2)
        frames.append(f)

    return pd.concat(frames, ignore_index = True)


def run_decay_trace(cfg, quiet = False, cache = False):
    """
    Memory and control populations against time for one or more (T2, T1) variants

    Returns
    ----------
    pandas.DataFrame : Columns t2_ns, t1_ns, t_ns, p_memory, p_control, one block
    of rows per variant in config order.
    """
    _notice_defaults(cfg, quiet)

    return _with_cache(cfg, cache, _compute_decay_trace)


def _compute_dephasing_sweep(cfg):
    if cfg.group_by is None:
        groups = ("delta_over_2pi_mhz", [cfg.delta_over_2pi_mhz])
    else:
        groups = (cfg.group_by.field, list(cfg.group_by.values))

    if cfg.sweep is None:
        sweep = ("t2_sc_ns", [cfg.t2_sc_ns])
    else:
        sweep = (cfg.sweep.field, list(cfg.sweep.values))

    if {groups[0], sweep[0]} != {"delta_over_2pi_mhz", "t2_sc_ns"}:
        raise ConfigError("The dephasing sweep ranges over t2_sc_ns and delta_over_2pi_mhz.")

    rows = []
    for g_value in groups[1]:
        for s_value in sweep[1]:
            values = {groups[0]: g_value, sweep[0]: s_value}
            p = cfg.params(**values)
            estimate, _ = memory_lifetime(p, cfg.t_max_ns, cfg.sample_dt_ns)
            rows.append({"t2_ns": values["t2_sc_ns"],
                         "delta_mhz": values["delta_over_2pi_mhz"],
                         "t1_eff_ns": estimate.t1_eff})

    return pd.DataFrame(rows)


def run_dephasing_sweep(cfg, quiet = False, cache = False):
    """
    Effective memory lifetime over a grid of control dephasing times and detunings

    Returns
    ----------
    pandas.DataFrame : Columns t2_ns, delta_mhz, t1_eff_ns, rows grouped by the
    group_by axis (detuning by default).
    """
    _notice_defaults(cfg, quiet)

    return _with_cache(cfg, cache, _compute_dephasing_sweep)


def _pulse_params(cfg):
    try:
        return GradientPulseParams(n_spins = cfg.n_spins,
                                   mu_over_2pi = cfg.mu_over_2pi_ghz_per_t,
                                   db_dx = cfg.db_dx_t_per_m,
                                   ensemble_length = cfg.ensemble_length_um * 1e-6)
    except ValueError as e:
        raise ConfigError(f"Invalid gradient pulse parameters: {e}") from e


def _compute_wstate(cfg):
    if cfg.sweep is None:
        n = cfg.n_spins
        thetas = [2 * math.pi * j / (8 * n) for j in range(8 * n + 1)]
    else:
        thetas = _axis_values(cfg, "theta_rad", None)

    overlaps = [w_overlap(cfg.n_spins, theta) for theta in thetas]

    return pd.DataFrame({"theta_rad": thetas,
                         "overlap_re": [o.real for o in overlaps],
                         "overlap_im": [o.imag for o in overlaps],
                         "overlap_abs": [abs(o) for o in overlaps]})


def run_wstate(cfg, quiet = False, cache = False):
    """
    Overlap of the phase-wound collective mode with the original W state against theta

    Returns
    ----------
    pandas.DataFrame : Columns theta_rad, overlap_re, overlap_im, overlap_abs. By
    default theta runs over [0, 2pi] in steps of 2pi / (8 N).
    """
    return _with_cache(cfg, cache, _compute_wstate)


def _compute_dfs(cfg):
    p = cfg.params()
    t_max = cfg.t_max_ns if cfg.t_max_ns is not None else DEFAULT_DFS_T_MAX_NS

    frames = []
    for state in cfg.states:
        trace = dfs_leakage(p, state, t_max, with_noise = cfg.with_noise, sample_dt = cfg.sample_dt_ns)
        f = trace.to_frame()
        f.insert(0, "state", state)
        frames.append(f)

    return pd.concat(frames, ignore_index = True)


def run_dfs(cfg, quiet = False, cache = False):
    """
    Leakage of dark and bright two-memory states into the noisy control qubit

    Returns
    ----------
    pandas.DataFrame : Columns state, t_ns, p_memory, p_control.
    """
    if cfg.t_max_ns is None and not quiet:
        print(f"Using the default t_max of {DEFAULT_DFS_T_MAX_NS:.0f} ns")

    return _with_cache(cfg, cache, _compute_dfs)


def _compute_dispersive(cfg):
    if cfg.sweep is not None and cfg.sweep.field == "t_i_ns":
        points = [(cfg.delta_over_2pi_mhz, t_i) for t_i in cfg.sweep.values]
    else:
        points = [(d, cfg.t_i_ns) for d in _axis_values(cfg, "delta_over_2pi_mhz", cfg.delta_over_2pi_mhz)]

    rows = []
    for delta_mhz, t_i in points:
        p = cfg.params(delta_over_2pi_mhz = delta_mhz)
        epsilon = dispersive_phase_error(p.g, p.delta, t_i)

        if p.g > 0 and math.isfinite(p.t2_sc):
            t1 = eq4_t1(p, 0.5)
        else:
            t1 = math.nan

        rows.append({"delta_mhz": delta_mhz, "t_i_ns": t_i, "phase_error": epsilon,
                     "anti_zeno_t1_ns": t1})

    return pd.DataFrame(rows)


def run_dispersive(cfg, quiet = False, cache = False):
    """
    Dispersive phase error g^2 t_I / Delta next to the anti-Zeno lifetime at the same detuning

    Returns
    ----------
    pandas.DataFrame : Columns delta_mhz, t_i_ns, phase_error, anti_zeno_t1_ns
    (the analytic lifetime with alpha = 1/2).
    """
    return _with_cache(cfg, cache, _compute_dispersive)


RUNNERS = {"detuning-sweep": run_detuning_sweep,
           "decay-trace": run_decay_trace,
           "dephasing-sweep": run_dephasing_sweep,
           "wstate": run_wstate,
           "dfs": run_dfs,
           "dispersive": run_dispersive}


def run_experiment(cfg, quiet = False, cache = False):
    return RUNNERS[cfg.experiment](cfg, quiet = quiet, cache = cache)


def summarize(cfg, frame):
    """
    Headline numbers of a finished run, recomputed from its table

    Returns
    ----------
    dict
    """
    if cfg.experiment == "detuning-sweep":
        points = [(cfg.params(delta_over_2pi_mhz = d), t)
                  for d, t in zip(frame["delta_mhz"], frame["t1_eff_numeric_ns"])]
        out = {"alpha": fit_alpha(points)}
        if len(frame) >= 3:
            out["exponent"] = power_law_exponent(zip(frame["delta_mhz"], frame["t1_eff_numeric_ns"]))
        return out

    elif cfg.experiment == "decay-trace":
        out = {}
        for (t2, t1), block in frame.groupby(["t2_ns", "t1_ns"], sort = False):
            out[f"final p_memory (T2={t2:g} ns, T1={t1:g} ns)"] = float(block["p_memory"].iloc[-1])
        return out

    elif cfg.experiment == "dephasing-sweep":
        return {"min t1_eff_ns": float(frame["t1_eff_ns"].min()),
                "max t1_eff_ns": float(frame["t1_eff_ns"].max())}

    elif cfg.experiment == "wstate":
        pulse = _pulse_params(cfg)
        tau = orthogonalization_time(pulse)
        overlap = gradient_overlap(GradientPulseParams(pulse.n_spins, pulse.mu_over_2pi,
                                                       pulse.db_dx, pulse.ensemble_length, tau))
        return {"orthogonalization_time_ns": tau, "overlap_after_pulse": abs(overlap)}

    elif cfg.experiment == "dfs":
        out = {}
        for state, block in frame.groupby("state", sort = False):
            out[f"max leakage ({state})"] = float(block["p_control"].max())
        return out

    elif cfg.experiment == "dispersive":
        return {"max phase_error": float(frame["phase_error"].max()),
                "min anti_zeno_t1_ns": float(frame["anti_zeno_t1_ns"].min())}

    raise ConfigError(f"Unknown experiment '{cfg.experiment}'.")


def _notice_defaults(cfg, quiet):
    if quiet:
        return
    if cfg.t_max_ns is None:
        print(f"Using the default t_max of {DEFAULT_HORIZON_FACTOR}x the analytic lifetime estimate")
    if cfg.sample_dt_ns is None:
        print(f"Using the default sample_dt of t_max / {DEFAULT_SAMPLES}")


def _with_cache(cfg, cache, compute):
    if not cache:
        return compute(cfg)

    key = cfg.to_dict()
    key.pop("output", None)
    key["version"] = __version__

    frame = read_cached(key)
    if frame is not None:
        logger.info("Read %s results from the cache", cfg.experiment)
        return frame

    frame = compute(cfg)
    write_cached(key, frame)

    return frame
