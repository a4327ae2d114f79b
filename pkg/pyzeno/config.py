"""JSON experiment configuration"""

__author__ = "pyzeno developers"

import json
import math
from dataclasses import dataclass, fields
from typing import Optional, Tuple

from pyzeno.helpers import ConfigError, format_time, parse_time, validate_increasing
from pyzeno.internal_data import config_path
from pyzeno.model import HybridParams

__all__ = ["SweepConfig", "EXPERIMENTS", "load_config", "parse_config", "dump_config",
           "default_config"]

EXPERIMENTS = ["detuning-sweep", "decay-trace", "dephasing-sweep", "wstate", "dfs", "dispersive"]

# Axes a sweep or a group_by may range over
PARAM_FIELDS = ["g_over_2pi_mhz", "delta_over_2pi_mhz", "omega_m_over_2pi_mhz",
                "t2_sc_ns", "t1_sc_ns"]
SWEEP_FIELDS = PARAM_FIELDS + ["theta_rad", "t_i_ns"]

TIME_FIELDS = ["t2_sc_ns", "t1_sc_ns"]


@dataclass(frozen = True)
class Axis:
    field: str
    values: Tuple[float, ...]

    def to_dict(self):
        if self.field in TIME_FIELDS:
            return {"field": self.field, "values": [format_time(v) for v in self.values]}
        return {"field": self.field, "values": list(self.values)}


@dataclass(frozen = True)
class SweepConfig:
    """
    One experiment run, in config units (MHz for f/2pi, ns for times)
    """
    experiment: str
    g_over_2pi_mhz: float = 25.0
    delta_over_2pi_mhz: float = 1250.0
    t2_sc_ns: float = 10.0
    t1_sc_ns: float = math.inf
    omega_m_over_2pi_mhz: float = 0.0
    sweep: Optional[Axis] = None
    group_by: Optional[Axis] = None
    t_max_ns: Optional[float] = None
    sample_dt_ns: Optional[float] = None
    output: Optional[str] = None
    variants: Optional[Tuple[Tuple[float, float], ...]] = None
    n_spins: int = 100
    mu_over_2pi_ghz_per_t: float = 28.0
    db_dx_t_per_m: float = 10.0
    ensemble_length_um: float = 20.0
    states: Tuple[str, ...] = ("dark", "bright")
    with_noise: bool = True
    t_i_ns: float = 20.0

    def params(self, **overrides):
        """
        HybridParams in internal units, optionally with config-unit fields overridden
        """
        values = {k: getattr(self, k) for k in PARAM_FIELDS}
        values.update(overrides)

        try:
            return HybridParams.from_mhz(g_over_2pi_mhz = values["g_over_2pi_mhz"],
                                         delta_over_2pi_mhz = values["delta_over_2pi_mhz"],
                                         omega_m_over_2pi_mhz = values["omega_m_over_2pi_mhz"],
                                         t2_sc_ns = values["t2_sc_ns"],
                                         t1_sc_ns = values["t1_sc_ns"])
        except ValueError as e:
            raise ConfigError(f"Invalid system parameters: {e}") from e

    def to_dict(self):
        out = {}
        for f in fields(self):
            value = getattr(self, f.name)
            if value is None:
                continue
            if isinstance(value, Axis):
                value = value.to_dict()
            elif f.name in TIME_FIELDS:
                value = format_time(value)
            elif f.name == "variants":
                value = [[format_time(a), format_time(b)] for a, b in value]
            elif isinstance(value, tuple):
                value = list(value)
            out[f.name] = value
        return out


def _parse_axis(raw, name):
    if not isinstance(raw, dict) or set(raw) != {"field", "values"}:
        raise ConfigError(f"'{name}' must be an object with exactly the keys 'field' and 'values'.")

    axis_field = raw["field"]
    if axis_field not in SWEEP_FIELDS:
        raise ConfigError(f"Unknown {name} field '{axis_field}'. Valid fields are {', '.join(SWEEP_FIELDS)}.")

    if not isinstance(raw["values"], list):
        raise ConfigError(f"'{name}.values' must be a list.")

    if axis_field in TIME_FIELDS:
        values = [parse_time(v, axis_field) for v in raw["values"]]
    else:
        values = [_number(v, f"{name}.values") for v in raw["values"]]

    validate_increasing(values, f"{name}.values")

    return Axis(axis_field, tuple(values))


def _number(value, name):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"'{name}' must be a number, got {value!r}.")
    return float(value)


def parse_config(raw):
    """
    Validate a decoded JSON document and build a SweepConfig

    Parameters
    ----------
    raw : dict
        The decoded JSON object.

    Returns
    ----------
    SweepConfig
    """
    if not isinstance(raw, dict):
        raise ConfigError("A config must be a JSON object.")

    known = {f.name for f in fields(SweepConfig)}
    unknown = sorted(set(raw) - known)
    if unknown:
        raise ConfigError(f"Unknown config keys: {', '.join(unknown)}.")

    if "experiment" not in raw:
        raise ConfigError("The config must name an experiment.")
    if raw["experiment"] not in EXPERIMENTS:
        raise ConfigError(f"Unknown experiment '{raw['experiment']}'. Valid experiments are {', '.join(EXPERIMENTS)}.")

    kwargs = {"experiment": raw["experiment"]}

    for key in ["g_over_2pi_mhz", "delta_over_2pi_mhz", "omega_m_over_2pi_mhz",
                "mu_over_2pi_ghz_per_t", "db_dx_t_per_m", "ensemble_length_um", "t_i_ns"]:
        if key in raw:
            kwargs[key] = _number(raw[key], key)

    if kwargs.get("g_over_2pi_mhz", 0) < 0:
        raise ConfigError("g_over_2pi_mhz must be non-negative.")

    for key in TIME_FIELDS:
        if key in raw:
            kwargs[key] = parse_time(raw[key], key)

    for key in ["t_max_ns", "sample_dt_ns"]:
        if key in raw and raw[key] is not None:
            kwargs[key] = parse_time(raw[key], key)
            if math.isinf(kwargs[key]):
                raise ConfigError(f"{key} must be finite.")

    if "sweep" in raw and raw["sweep"] is not None:
        kwargs["sweep"] = _parse_axis(raw["sweep"], "sweep")
    if "group_by" in raw and raw["group_by"] is not None:
        kwargs["group_by"] = _parse_axis(raw["group_by"], "group_by")

    if "output" in raw and raw["output"] is not None:
        if not isinstance(raw["output"], str):
            raise ConfigError("'output' must be a path string.")
        kwargs["output"] = raw["output"]

    if "variants" in raw and raw["variants"] is not None:
        variants = []
        for v in raw["variants"]:
            if not isinstance(v, list) or len(v) != 2:
                raise ConfigError("Each variant must be a [t2_sc_ns, t1_sc_ns] pair.")
            variants.append((parse_time(v[0], "t2_sc_ns"), parse_time(v[1], "t1_sc_ns")))
        if len(variants) == 0:
            raise ConfigError("'variants' must not be empty.")
        kwargs["variants"] = tuple(variants)

    if "n_spins" in raw:
        if isinstance(raw["n_spins"], bool) or not isinstance(raw["n_spins"], int) or raw["n_spins"] < 2:
            raise ConfigError("'n_spins' must be an integer of at least 2.")
        kwargs["n_spins"] = raw["n_spins"]

    if "states" in raw:
        states = raw["states"]
        if not isinstance(states, list) or len(states) == 0 or any(s not in ["dark", "bright"] for s in states):
            raise ConfigError("'states' must be a non-empty list of 'dark' and 'bright'.")
        kwargs["states"] = tuple(states)

    if "with_noise" in raw:
        if not isinstance(raw["with_noise"], bool):
            raise ConfigError("'with_noise' must be true or false.")
        kwargs["with_noise"] = raw["with_noise"]

    return SweepConfig(**kwargs)


def load_config(path):
    """
    Read and validate a JSON experiment config from disk
    """
    try:
        with open(path, "r", encoding = "utf-8") as fd:
            raw = json.load(fd)
    except json.JSONDecodeError as e:
        raise ConfigError(f"Could not parse {path} as JSON: {e}") from e
    except OSError as e:
        raise ConfigError(f"Could not read config {path}: {e}") from e

    return parse_config(raw)


def dump_config(cfg):
    return json.dumps(cfg.to_dict(), indent = 2, sort_keys = True)


def default_config(experiment):
    """
    The packaged config with the reference parameters for an experiment
    """
    if experiment not in EXPERIMENTS:
        raise ConfigError(f"Unknown experiment '{experiment}'. Valid experiments are {', '.join(EXPERIMENTS)}.")

    return load_config(config_path(experiment))
