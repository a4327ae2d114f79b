"""Remedies for the indirect relaxation: gradient-pulse orthogonalization and a decoherence-free subspace"""

__author__ = "pyzeno developers"

import cmath
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from pyzeno.dynamics import integrate
from pyzeno.helpers import DivergenceError
from pyzeno.linalg import density_matrix
from pyzeno.model import basis_ket, lindblad_model

__all__ = ["GradientPulseParams", "w_overlap", "orthogonalization_time",
           "gradient_phase", "gradient_overlap", "dfs_state", "dfs_leakage",
           "DARK", "BRIGHT"]

DARK = "dark"
BRIGHT = "bright"


@dataclass(frozen = True)
class GradientPulseParams:
    """
    A field-gradient pulse applied to a spin ensemble storing a collective excitation

    Attributes
    ----------
    n_spins : int
        Number of spins N in the ensemble.
    mu_over_2pi : float
        Zeeman splitting per tesla divided by 2pi, in GHz/T.
    db_dx : float
        Field gradient in T/m.
    ensemble_length : float
        Ensemble length N * dx, in m.
    tau : float, optional
        Pulse duration in ns.
    """
    n_spins: int
    mu_over_2pi: float
    db_dx: float
    ensemble_length: float
    tau: Optional[float] = None

    def __post_init__(self):
        if self.n_spins < 2:
            raise ValueError(f"n_spins must be at least 2, got {self.n_spins}.")
        if not self.mu_over_2pi > 0 or not self.ensemble_length > 0:
            raise ValueError("mu_over_2pi and ensemble_length must be positive.")
        if self.db_dx < 0:
            raise ValueError("db_dx must be non-negative.")
        if self.tau is not None and not self.tau > 0:
            raise ValueError("tau must be positive.")

    @property
    def spacing(self):
        return self.ensemble_length / self.n_spins


def w_overlap(n_spins, theta):
    """
    Overlap <W|W_theta> = (1/N) sum_{l=1..N} exp(i theta l) of a phase-wound collective mode

    Parameters
    ----------
    n_spins : int
        Number of spins N (>= 1).
    theta : float
        Phase acquired per spin, in rad.

    Returns
    ----------
    complex
    """
    if n_spins < 1:
        raise ValueError(f"n_spins must be at least 1, got {n_spins}.")

    # Reduce first so theta and theta + 2pi wind identically
    theta = math.fmod(theta, 2 * math.pi)
    l = np.arange(1, n_spins + 1)

    return complex(np.mean(np.exp(1j * theta * l)))


def orthogonalization_time(params):
    """
    Pulse duration that makes |W_theta> orthogonal to |W>, i.e. theta N = 2pi

    Parameters
    ----------
    params : GradientPulseParams
        Ensemble and gradient; tau is ignored.

    Returns
    ----------
    float : tau = 1 / (mu_over_2pi * dB/dx * N dx), in ns.
    """
    if params.db_dx == 0:
        raise DivergenceError("A zero field gradient never orthogonalizes the collective mode.")

    # GHz/T * T/m * m = GHz, whose inverse is ns
    return 1.0 / (params.mu_over_2pi * params.db_dx * params.ensemble_length)


def gradient_phase(params):
    """Phase per spin theta = tau * mu * dB/dx * dx for the pulse in params"""
    if params.tau is None:
        raise ValueError("gradient_phase requires a pulse duration tau.")
    return 2 * math.pi * params.mu_over_2pi * params.tau * params.db_dx * params.spacing


def gradient_overlap(params):
    return w_overlap(params.n_spins, gradient_phase(params))


def dfs_state(state, phase = 0.0):
    """
    Control qubit in its ground state, memories in (|01> +/- |10>) / sqrt(2)

    Parameters
    ----------
    state : str
        "dark" for the antisymmetric, "bright" for the symmetric superposition.
    phase : float
        Global phase applied to the ket.

    Returns
    ----------
    numpy.ndarray : 8-dim ket ordered |sc, m1, m2>.
    """
    if state == DARK:
        sign = -1
    elif state == BRIGHT:
        sign = 1
    else:
        raise ValueError(f"state must be '{DARK}' or '{BRIGHT}', got '{state}'.")

    psi = (basis_ket(0, 0, 1) + sign * basis_ket(0, 1, 0)) / math.sqrt(2)

    return cmath.exp(1j * phase) * psi


def dfs_leakage(p, state, t_max, with_noise = True, sample_dt = None, phase = 0.0):
    """
    Evolve a dark or bright two-memory state and track leakage into the control qubit

    Parameters
    ----------
    p : HybridParams
        System parameters; both memories share omega_m and the coupling g.
    state : str
        "dark" or "bright".
    t_max : float
        Final time in ns.
    with_noise : bool
        If True, the control qubit's dephasing and relaxation act; the memories
        never couple to the environment directly.
    sample_dt : float, optional
        Sampling interval in ns. Defaults to t_max / 5000.
    phase : float
        Global phase of the initial ket.

    Returns
    ----------
    DecayTrace : p_control is the leaked population; p_memory is the total
    memory excitation.
    """
    if sample_dt is None:
        sample_dt = t_max / 5000

    rho0 = density_matrix(dfs_state(state, phase))
    model = lindblad_model(p, n_memories = 2, with_noise = with_noise)

    return integrate(rho0, model, t_max, sample_dt)
