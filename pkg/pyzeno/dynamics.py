"""Time evolution: the Trotter-dephasing recursion and a fixed-step Lindblad integrator

Two routes to the memory-qubit decay are provided. The Trotter model alternates
exact unitary evolution for a time tau with a non-selective measurement of the
control qubit, which reduces to a two-population recursion with a closed-form
solution. The Lindblad route integrates the full master equation with classical
RK4 at a fixed step.
"""

import logging
import math
from dataclasses import dataclass

import numpy as np
import pandas as pd

from pyzeno.helpers import ConfigError
from pyzeno.linalg import (as_matrix, dagger, herm_expm, jacobi_eigh, tensor,
                           validate_density_matrix, PAULI_I)
from pyzeno.model import DEPHASING, EXCITED, embed, excitation_operator, jc_hamiltonian

__all__ = ["DecayTrace", "TrotterState", "trotter_step", "trotter_closed_form",
           "trotter_average_step", "trotter_run", "period_taus", "measured_evolution",
           "lindblad_rhs", "liouvillian", "rk4_step", "rk4_propagator", "integrate"]

logger = logging.getLogger(__name__)

STEPS_PER_FAST_PERIOD = 200
MIN_STEP_NS = 1e-6


@dataclass(frozen = True)
class DecayTrace:
    """
    Sampled populations of a master-equation run

    Attributes
    ----------
    times : numpy.ndarray
        Sample times in ns, starting at 0.
    p_memory : numpy.ndarray
        Excited population of the memory (summed over memory qubits).
    p_control : numpy.ndarray
        Excited population of the control qubit.
    excitation : numpy.ndarray
        Expectation of the total excitation number.
    trace_error : float
        max |Tr rho - 1| over the samples.
    min_eigenvalue : float
        Smallest density-matrix eigenvalue seen at any sample.
    """
    times: np.ndarray
    p_memory: np.ndarray
    p_control: np.ndarray
    excitation: np.ndarray
    trace_error: float
    min_eigenvalue: float

    def to_frame(self):
        return pd.DataFrame({"t_ns": self.times,
                             "p_memory": self.p_memory,
                             "p_control": self.p_control})


@dataclass(frozen = True)
class TrotterState:
    p_a: float
    p_b: float
    step_index: int = 0

    def __post_init__(self):
        if abs(self.p_a + self.p_b - 1) > 1e-12:
            raise ValueError(f"Populations must sum to 1, got {self.p_a} + {self.p_b}.")
        if not (-1e-12 <= self.p_a <= 1 + 1e-12 and -1e-12 <= self.p_b <= 1 + 1e-12):
            raise ValueError("Populations must lie in [0, 1].")


def _decay_ratio(p):
    # r = Delta^2 / (4 g^2 + Delta^2); no coupling means nothing moves
    if p.g == 0:
        return 1.0
    return p.delta ** 2 / (4 * p.g ** 2 + p.delta ** 2)


def trotter_step(s, p, tau):
    """
    One unitary interval of length tau followed by a non-selective measurement

    Parameters
    ----------
    s : TrotterState
        Populations of |10> (p_a) and |01> (p_b) before the interval.
    p : HybridParams
        System parameters.
    tau : float
        Interval between effective measurements, in ns.

    Returns
    ----------
    TrotterState : The populations after the measurement.
    """
    if not tau > 0:
        raise ValueError(f"tau must be positive, got {tau}.")

    g2 = p.g ** 2
    d2 = p.delta ** 2
    w2 = 4 * g2 + d2

    if w2 == 0:
        return TrotterState(s.p_a, s.p_b, s.step_index + 1)

    c = math.cos(tau * math.sqrt(w2))
    diff = s.p_a - s.p_b

    p_a = (2 * g2 + d2 * s.p_a + 2 * g2 * diff * c) / w2
    p_b = (2 * g2 + d2 * s.p_b - 2 * g2 * diff * c) / w2

    return TrotterState(p_a, p_b, s.step_index + 1)


def trotter_closed_form(n, p):
    """
    Populations after n intervals from |01>, with the fast cosine averaged out

    Parameters
    ----------
    n : int
        Number of intervals (n >= 0).
    p : HybridParams
        System parameters.

    Returns
    ----------
    TrotterState : p_b = (1 + r^n) / 2 with r = Delta^2 / (4 g^2 + Delta^2).
    """
    if n < 0:
        raise ValueError(f"n must be non-negative, got {n}.")

    rn = _decay_ratio(p) ** n

    return TrotterState(0.5 * (1 - rn), 0.5 * (1 + rn), int(n))


def trotter_average_step(s, p):
    r = _decay_ratio(p)
    d = r * (s.p_b - s.p_a)

    return TrotterState(0.5 * (1 - d), 0.5 * (1 + d), s.step_index + 1)


def period_taus(p, tau, m):
    """
    m intervals starting at tau and spread evenly over one oscillation period 2pi / sqrt(4g^2 + Delta^2)
    """
    if m < 1:
        raise ValueError("m must be at least 1.")
    period = 2 * math.pi / p.rabi_frequency
    return [tau + k * period / m for k in range(m)]


def trotter_run(s, p, taus):
    for tau in taus:
        s = trotter_step(s, p, tau)
    return s


def measured_evolution(rho, p, tau):
    """
    Apply rho -> E(U rho U^dagger) on the full two-qubit density matrix

    E keeps only the blocks diagonal in the control qubit, E(rho) = P0 rho P0 + P1 rho P1
    with P_k = |k><k|_sc x 1_m.

    Parameters
    ----------
    rho : array-like
        4x4 density matrix.
    p : HybridParams
        System parameters.
    tau : float
        Duration of the unitary interval, in ns.

    Returns
    ----------
    numpy.ndarray : The density matrix after the measurement.
    """
    rho = validate_density_matrix(rho)
    u = herm_expm(jc_hamiltonian(p), tau)

    evolved = u @ rho @ dagger(u)

    p1 = tensor(EXCITED, PAULI_I)
    p0 = tensor(PAULI_I - EXCITED, PAULI_I)

    return as_matrix(p0 @ evolved @ p0 + p1 @ evolved @ p1)


def _lindblad_rhs(rho, m):
    h = m.hamiltonian
    drho = -1j * (h @ rho - rho @ h)

    for op, rate, kind in m.dissipators:
        if kind == DEPHASING:
            inner = op @ rho - rho @ op
            drho = drho - rate * (op @ inner - inner @ op)
        else:
            opd = dagger(op)
            opd_op = opd @ op
            drho = drho + rate * (op @ rho @ opd - 0.5 * (opd_op @ rho + rho @ opd_op))

    return drho


def lindblad_rhs(rho, m):
    """
    Time derivative of rho under a LindbladModel

    Dephasing terms contribute -rate [L, [L, rho]]; jump terms contribute
    rate (L rho L^dagger - {L^dagger L, rho} / 2).

    Parameters
    ----------
    rho : array-like
        A valid density matrix.
    m : LindbladModel
        Hamiltonian and dissipators.

    Returns
    ----------
    numpy.ndarray : d rho / dt, traceless.
    """
    rho = validate_density_matrix(rho)
    return _lindblad_rhs(rho, m)


def liouvillian(m):
    """
    Superoperator of the master equation acting on row-major vec(rho)

    Uses vec(A rho B) = (A x B^T) vec(rho).
    """
    n = m.dim
    eye = np.eye(n, dtype = complex)
    h = m.hamiltonian

    sup = -1j * (np.kron(h, eye) - np.kron(eye, h.T))

    for op, rate, kind in m.dissipators:
        if kind == DEPHASING:
            op2 = op @ op
            sup = sup - rate * (np.kron(op2, eye) + np.kron(eye, op2.T) - 2 * np.kron(op, op.T))
        else:
            opd_op = dagger(op) @ op
            sup = sup + rate * (np.kron(op, np.conj(op))
                                - 0.5 * (np.kron(opd_op, eye) + np.kron(eye, opd_op.T)))

    return sup


def rk4_step(rho, m, h):
    """
    One classical fourth-order Runge-Kutta step of length h
    """
    h2 = h / 2.0

    k1 = _lindblad_rhs(rho, m)
    k2 = _lindblad_rhs(rho + k1 * h2, m)
    k3 = _lindblad_rhs(rho + k2 * h2, m)
    k4 = _lindblad_rhs(rho + k3 * h, m)

    return rho + (k1 + 2 * k2 + 2 * k3 + k4) / 6.0 * h


def rk4_propagator(sup, h):
    """
    Matrix of one RK4 step for the linear equation d vec(rho)/dt = sup vec(rho)

    For a linear autonomous generator an RK4 step is exactly the degree-4 Taylor
    polynomial of exp(h sup).
    """
    eye = np.eye(sup.shape[0], dtype = complex)
    hs = h * sup

    return eye + hs @ (eye + hs @ (eye + hs @ (eye + hs / 4.0) / 3.0) / 2.0)


def _fast_timescale(m, sample_dt):
    evals, _ = jacobi_eigh(m.hamiltonian)
    spread = evals[-1] - evals[0]

    scales = [sample_dt]
    if spread > 0:
        scales.append(2 * math.pi / spread)

    for _, rate, kind in m.dissipators:
        if rate > 0:
            # rate = 1 / (2 T2) for dephasing, 1 / T1 for jumps
            scales.append(1 / (2 * rate) if kind == DEPHASING else 1 / rate)

    return min(scales)


def integrate(rho0, m, t_max, sample_dt, step = None):
    """
    Integrate the master equation with fixed-step RK4 and sample the populations

    Parameters
    ----------
    rho0 : array-like
        Initial density matrix (4x4 or 8x8, control qubit first).
    m : LindbladModel
        Hamiltonian and dissipators.
    t_max : float
        Final time in ns.
    sample_dt : float
        Sampling interval in ns.
    step : float, optional
        Target RK4 step in ns. If None, the step is 1/200 of the fastest time
        scale: the coherent period 2pi / (spectral width of H), the dephasing and
        relaxation times, and sample_dt.

    Returns
    ----------
    DecayTrace : Populations sampled every sample_dt from 0 to t_max.

    Notes
    ----------
    The step is shrunk slightly so that a whole number of steps fits in each
    sampling interval. The density matrix is re-symmetrized at every sample.
    """
    if not t_max > 0:
        raise ConfigError(f"t_max must be positive, got {t_max}.")
    if not sample_dt > 0:
        raise ConfigError(f"sample_dt must be positive, got {sample_dt}.")

    rho = np.array(validate_density_matrix(rho0))

    if rho.shape != m.hamiltonian.shape:
        raise ConfigError("The initial state and the model have different dimensions.")

    if step is None:
        step = _fast_timescale(m, sample_dt) / STEPS_PER_FAST_PERIOD

    n_sub = max(1, math.ceil(sample_dt / step - 1e-9))
    h = sample_dt / n_sub

    if h < MIN_STEP_NS:
        raise ConfigError(f"RK4 step {h:.3g} ns is below the {MIN_STEP_NS} ns floor; "
                          "increase sample_dt or check the rates.")

    n_samples = int(math.floor(t_max / sample_dt + 1e-9))
    if n_samples < 1:
        raise ConfigError("t_max must be at least one sampling interval.")

    logger.debug("RK4 step %.4g ns, %d steps per sample, %d samples", h, n_sub, n_samples)

    dim = rho.shape[0]
    n_qubits = int(round(math.log2(dim)))

    control_diag = np.real(np.diag(embed(EXCITED, 0, n_qubits)))
    memory_diag = np.real(np.diag(sum(embed(EXCITED, k, n_qubits) for k in range(1, n_qubits))))
    number_diag = np.real(np.diag(excitation_operator(n_qubits)))

    propagator = np.linalg.matrix_power(rk4_propagator(liouvillian(m), h), n_sub)

    times = np.arange(n_samples + 1) * sample_dt
    p_memory = np.empty(n_samples + 1)
    p_control = np.empty(n_samples + 1)
    excitation = np.empty(n_samples + 1)
    trace_error = 0.0
    min_eig = math.inf

    for i in range(n_samples + 1):
        pops = np.real(np.diag(rho))
        p_memory[i] = pops @ memory_diag
        p_control[i] = pops @ control_diag
        excitation[i] = pops @ number_diag

        trace_error = max(trace_error, abs(np.sum(pops) - 1))
        min_eig = min(min_eig, np.linalg.eigvalsh(rho).min())

        if i < n_samples:
            rho = (propagator @ rho.reshape(-1)).reshape(dim, dim)
            rho = 0.5 * (rho + dagger(rho))

    return DecayTrace(times = times, p_memory = p_memory, p_control = p_control,
                      excitation = excitation, trace_error = float(trace_error),
                      min_eigenvalue = float(min_eig))
