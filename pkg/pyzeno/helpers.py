"""Shared errors, unit conversion and the on-disk result cache"""

import hashlib
import json
import math
import os

import appdirs
import pandas as pd

__all__ = ["DimensionError", "MatrixError", "ConfigError", "HorizonError", "DivergenceError",
           "mhz_to_rad_per_ns", "rad_per_ns_to_mhz", "parse_time", "format_time",
           "validate_increasing", "read_cached", "write_cached"]


class DimensionError(ValueError):
    pass


class MatrixError(ValueError):
    pass


class ConfigError(ValueError):
    pass


class HorizonError(RuntimeError):
    pass


class DivergenceError(ZeroDivisionError):
    pass


def mhz_to_rad_per_ns(f_mhz):
    """
    Convert a frequency f/2pi quoted in MHz into an angular frequency in rad/ns

    Parameters
    ----------
    f_mhz : float
        The frequency divided by 2pi, in MHz (e.g. 25 for g/2pi = 25 MHz).

    Returns
    ----------
    float : The angular frequency in rad/ns.
    """
    return 2 * math.pi * (f_mhz / 1000.0)


def rad_per_ns_to_mhz(omega):
    return omega / (2 * math.pi) * 1000.0


def parse_time(value, name = "time"):
    """
    Parse a time in ns that may be given as the string "inf"
    """
    if isinstance(value, str):
        if value.strip().lower() in ["inf", "infinity"]:
            return math.inf
        raise ConfigError(f"Invalid value '{value}' for {name}; use a number of ns or \"inf\".")

    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"Invalid value '{value}' for {name}; use a number of ns or \"inf\".")

    value = float(value)

    if math.isnan(value) or value <= 0:
        raise ConfigError(f"{name} must be positive, got {value}.")

    return value


def format_time(value):
    if math.isinf(value):
        return "inf"
    return value


def validate_increasing(values, name = "values"):
    values = list(values)

    if len(values) == 0:
        raise ConfigError(f"{name} must not be empty.")

    for a, b in zip(values[:-1], values[1:]):
        if not b > a:
            raise ConfigError(f"{name} must be strictly increasing; found {a} followed by {b}.")

    return values


def _cache_file(key_dict, suffix = "csv"):
    cache_dir = appdirs.user_cache_dir("pyzeno")

    if not os.path.isdir(cache_dir):
        os.makedirs(cache_dir)

    canonical = json.dumps(key_dict, sort_keys = True, separators = (",", ":"))
    digest = hashlib.sha256(canonical.encode("utf-8")).hexdigest()[:24]

    return os.path.join(cache_dir, f"{digest}.{suffix}")


def read_cached(key_dict):
    """
    Return a cached DataFrame for a run, or None if the run has not been cached
    """
    out_file = _cache_file(key_dict)

    if not os.path.isfile(out_file):
        return None

    return pd.read_csv(out_file)


def write_cached(key_dict, frame):
    out_file = _cache_file(key_dict)

    # Full precision here; the 9-digit format is for user-facing output only
    frame.to_csv(out_file, index = False, float_format = "%.17g")

    return out_file
