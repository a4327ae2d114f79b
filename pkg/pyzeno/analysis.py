"""Effective relaxation times: extraction from traces, the analytic formula and fits"""

__author__ = "pyzeno developers"

import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import curve_fit

from pyzeno.helpers import DivergenceError, HorizonError

__all__ = ["T1Estimate", "FIRST_CROSSING", "EXPONENTIAL_FIT", "effective_t1",
           "eq4_t1", "eq4_coefficient", "fit_alpha", "power_law_exponent",
           "rate_equation_t1"]

logger = logging.getLogger(__name__)

FIRST_CROSSING = "first-crossing"
EXPONENTIAL_FIT = "exponential-fit"

TAIL_FRACTION = 0.1
TAIL_VARIANCE_LIMIT = 1e-4


@dataclass(frozen = True)
class T1Estimate:
    t1_eff: float
    p_initial: float
    p_asymptote: float
    crossing_population: float
    method: str = FIRST_CROSSING

    def __post_init__(self):
        if not self.t1_eff > 0:
            raise ValueError(f"t1_eff must be positive, got {self.t1_eff}.")
        if not self.p_asymptote < self.crossing_population < self.p_initial:
            raise ValueError("Expected p_asymptote < crossing_population < p_initial.")


def _decay_model(t, a, b, tau):
    return a + b * np.exp(-t / tau)


def effective_t1(trace, method = FIRST_CROSSING):
    """
    Time for the memory population to fall halfway from its start to its asymptote

    Parameters
    ----------
    trace : DecayTrace
        A sampled run; must be long enough for its tail to settle.
    method : str
        "first-crossing" (the default) interpolates linearly at the first sample
        below the halfway population. "exponential-fit" fits a + b exp(-t/tau)
        with scipy and reports tau ln 2.

    Returns
    ----------
    T1Estimate

    Notes
    ----------
    The asymptote is the mean of the last 10% of samples, so the same rule covers
    dephasing-only runs (asymptote 1/2) and runs with relaxation (asymptote 0).
    """
    times = np.asarray(trace.times, dtype = float)
    p = np.asarray(trace.p_memory, dtype = float)

    n_tail = max(2, int(math.ceil(TAIL_FRACTION * len(p))))
    tail = p[-n_tail:]

    if np.var(tail) >= TAIL_VARIANCE_LIMIT:
        raise HorizonError("The trace has not settled; extend t_max.")

    p_asymptote = float(np.mean(tail))
    p_initial = float(p[0])
    amplitude = p_initial - p_asymptote

    if amplitude <= 1e-9:
        raise HorizonError("No decay of the memory population within the trace; extend t_max.")

    half = n_tail // 2
    drift = abs(np.mean(tail[:half]) - np.mean(tail[half:]))
    if drift > 0.02 * amplitude + 1e-6:
        raise HorizonError("The memory population is still decaying at the end of the trace; extend t_max.")

    crossing = p_asymptote + amplitude / 2

    below = np.nonzero(p <= crossing)[0]
    if len(below) == 0:
        raise HorizonError("The memory population never reaches the halfway value; extend t_max.")

    i = below[0]
    t0, t1 = times[i - 1], times[i]
    p0, p1 = p[i - 1], p[i]
    t_cross = t0 + (crossing - p0) * (t1 - t0) / (p1 - p0)

    if method == FIRST_CROSSING:
        return T1Estimate(float(t_cross), p_initial, p_asymptote, float(crossing), FIRST_CROSSING)

    elif method == EXPONENTIAL_FIT:
        guess = [p_asymptote, amplitude, t_cross / math.log(2)]
        (a, b, tau), _ = curve_fit(_decay_model, times, p, p0 = guess, maxfev = 10000)
        logger.debug("Exponential fit a=%.6g b=%.6g tau=%.6g ns", a, b, tau)

        return T1Estimate(float(tau * math.log(2)), float(a + b), float(a), float(a + b / 2),
                          EXPONENTIAL_FIT)

    else:
        raise ValueError(f"Unknown method '{method}'; use '{FIRST_CROSSING}' or '{EXPONENTIAL_FIT}'.")


def _check_eq4_inputs(p):
    if p.delta == 0:
        raise DivergenceError("The effective relaxation time diverges at zero detuning.")
    if not p.g > 0:
        raise ValueError("The effective relaxation time requires a positive coupling g.")
    if not math.isfinite(p.t2_sc):
        raise ValueError("The effective relaxation time requires a finite t2_sc.")


def eq4_coefficient(p):
    """ln 2 / ln(1 + 4 g^2 / Delta^2) * T2, so that the analytic lifetime is alpha times this"""
    _check_eq4_inputs(p)
    return math.log(2) / math.log1p(4 * p.g ** 2 / p.delta ** 2) * p.t2_sc


def eq4_t1(p, alpha, approximate = False):
    """
    Analytic anti-Zeno lifetime of the memory qubit

    Parameters
    ----------
    p : HybridParams
        System parameters with g > 0, delta != 0 and finite t2_sc.
    alpha : float
        Ratio of the effective measurement interval to T2.
    approximate : bool
        If True, return the g << Delta form alpha ln 2 Delta^2 / (4 g^2) T2
        instead of the logarithmic form.

    Returns
    ----------
    float : The effective relaxation time in ns.
    """
    _check_eq4_inputs(p)

    if approximate:
        return alpha * math.log(2) * p.delta ** 2 / (4 * p.g ** 2) * p.t2_sc

    return alpha * eq4_coefficient(p)


def fit_alpha(points):
    """
    Least-squares alpha for measured lifetimes against the analytic formula

    Parameters
    ----------
    points : list of (HybridParams, float)
        Parameter sets and their measured effective relaxation times in ns.

    Returns
    ----------
    float : alpha minimizing sum (t1_i - alpha C_i)^2, i.e. sum C_i t1_i / sum C_i^2.
    """
    points = list(points)

    if len(points) == 0:
        raise ValueError("fit_alpha needs at least one point.")

    c = np.array([eq4_coefficient(p) for p, _ in points])
    t = np.array([t1 for _, t1 in points], dtype = float)

    alpha = float(np.sum(c * t) / np.sum(c * c))
    logger.info("Fitted alpha = %.4f from %d points", alpha, len(points))

    return alpha


def power_law_exponent(points):
    """
    Slope of the least-squares line through (ln x, ln y)

    Parameters
    ----------
    points : list of (float, float)
        Pairs such as (detuning, t1_eff), all positive, at least three of them.

    Returns
    ----------
    float : The fitted exponent.
    """
    points = list(points)

    if len(points) < 3:
        raise ValueError("power_law_exponent needs at least three points.")

    x = np.array([a for a, _ in points], dtype = float)
    y = np.array([b for _, b in points], dtype = float)

    if np.any(x <= 0) or np.any(y <= 0):
        raise ValueError("power_law_exponent requires positive values.")

    slope, _ = np.polyfit(np.log(x), np.log(y), 1)

    return float(slope)


def rate_equation_t1(p):
    """
    Weak-coupling estimate of the memory halfway time, including control relaxation

    The control coherence decays at Gamma = 2/T2 + 1/(2 T1) and the memory and
    control exchange population at k = 2 g^2 Gamma / (Gamma^2 + Delta^2). Without
    relaxation the populations equalize at rate 2k; with relaxation the memory
    empties at the slow eigenvalue of the two-population rate matrix.

    Returns
    ----------
    float : Estimated halfway time in ns (math.inf when nothing decays).
    """
    gamma = 0.0
    if math.isfinite(p.t2_sc):
        gamma += 2 / p.t2_sc
    if math.isfinite(p.t1_sc):
        gamma += 1 / (2 * p.t1_sc)

    if p.g == 0 or gamma == 0:
        return math.inf

    k = 2 * p.g ** 2 * gamma / (gamma ** 2 + p.delta ** 2)

    if not math.isfinite(p.t1_sc):
        return math.log(2) / (2 * k)

    g1 = 1 / p.t1_sc
    s = 2 * k + g1
    slow = 2 * k * g1 / (s + math.sqrt(s * s - 4 * k * g1))

    return math.log(2) / slow
