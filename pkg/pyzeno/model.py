"""Hamiltonians and dissipators of a control qubit coupled to one or two memory qubits"""

import math
from dataclasses import dataclass, field
from typing import List, NamedTuple

import numpy as np

from pyzeno.helpers import mhz_to_rad_per_ns, MatrixError
from pyzeno.linalg import PAULI_I, PAULI_Z, as_matrix, is_hermitian, tensor, tensor_all

__all__ = ["HybridParams", "Dissipator", "LindbladModel", "DEPHASING", "JUMP",
           "SIGMA_Z", "SIGMA_PLUS", "SIGMA_MINUS", "EXCITED",
           "embed", "basis_index", "basis_ket", "excitation_operator",
           "jc_hamiltonian", "three_qubit_hamiltonian", "dispersive_hamiltonian",
           "dispersive_phase_error", "dissipators", "lindblad_model"]

DEPHASING = "dephasing-double-commutator"
JUMP = "jump"

# Basis |0> (ground), |1> (excited); sigma_z is +1 on the excited state
SIGMA_Z = as_matrix(-PAULI_Z)
SIGMA_PLUS = as_matrix([[0, 0], [1, 0]])
SIGMA_MINUS = as_matrix([[0, 1], [0, 0]])
EXCITED = as_matrix([[0, 0], [0, 1]])


@dataclass(frozen = True)
class HybridParams:
    """
    Physical parameters of the hybrid system in internal units

    Frequencies are angular frequencies in rad/ns, times are in ns. The control
    qubit frequency is omega_m + delta.
    """
    g: float
    delta: float
    omega_m: float = 0.0
    t2_sc: float = math.inf
    t1_sc: float = math.inf

    def __post_init__(self):
        if not self.g >= 0:
            raise ValueError(f"The coupling g must be non-negative, got {self.g}.")
        if not self.t2_sc > 0:
            raise ValueError(f"t2_sc must be positive or infinite, got {self.t2_sc}.")
        if not self.t1_sc > 0:
            raise ValueError(f"t1_sc must be positive or infinite, got {self.t1_sc}.")

    @property
    def omega_sc(self):
        return self.omega_m + self.delta

    @property
    def rabi_frequency(self):
        """Generalized Rabi frequency sqrt(4 g^2 + delta^2) of the single-excitation block"""
        return math.sqrt(4 * self.g ** 2 + self.delta ** 2)

    @classmethod
    def from_mhz(cls, g_over_2pi_mhz, delta_over_2pi_mhz, omega_m_over_2pi_mhz = 0.0,
                 t2_sc_ns = math.inf, t1_sc_ns = math.inf):
        """
        Build parameters from frequencies quoted as f/2pi in MHz

        Parameters
        ----------
        g_over_2pi_mhz : float
            Coupling g/2pi in MHz.
        delta_over_2pi_mhz : float
            Detuning Delta/2pi in MHz.
        omega_m_over_2pi_mhz : float
            Memory frequency in MHz; 0 selects the rotating frame.
        t2_sc_ns : float
            Control-qubit dephasing time in ns (math.inf to disable).
        t1_sc_ns : float
            Control-qubit relaxation time in ns (math.inf to disable).

        Returns
        ----------
        HybridParams
        """
        return cls(g = mhz_to_rad_per_ns(g_over_2pi_mhz),
                   delta = mhz_to_rad_per_ns(delta_over_2pi_mhz),
                   omega_m = mhz_to_rad_per_ns(omega_m_over_2pi_mhz),
                   t2_sc = t2_sc_ns,
                   t1_sc = t1_sc_ns)


class Dissipator(NamedTuple):
    operator: np.ndarray
    rate: float
    kind: str


@dataclass(frozen = True)
class LindbladModel:
    hamiltonian: np.ndarray
    dissipators: List[Dissipator] = field(default_factory = list)

    def __post_init__(self):
        h = as_matrix(self.hamiltonian)
        if not is_hermitian(h, 1e-10):
            raise MatrixError("The Hamiltonian of a LindbladModel must be Hermitian.")
        object.__setattr__(self, "hamiltonian", h)

        checked = []
        for d in self.dissipators:
            op, rate, kind = d
            if rate < 0:
                raise ValueError(f"Dissipator rates must be non-negative, got {rate}.")
            if kind not in [DEPHASING, JUMP]:
                raise ValueError(f"Unknown dissipator kind '{kind}'; use '{DEPHASING}' or '{JUMP}'.")
            op = as_matrix(op)
            if op.shape != h.shape:
                raise ValueError("Dissipator operators must match the Hamiltonian dimension.")
            checked.append(Dissipator(op, float(rate), kind))
        object.__setattr__(self, "dissipators", checked)

    @property
    def dim(self):
        return self.hamiltonian.shape[0]


def embed(op, site, n_qubits):
    """
    Place a single-qubit operator on qubit `site` (0 = control) of an n-qubit register
    """
    factors = [PAULI_I] * n_qubits
    factors[site] = op
    if n_qubits == 1:
        return as_matrix(op)
    return tensor_all(*factors)


def basis_index(*bits):
    """Index of the product state |b0 b1 ...>, control qubit most significant"""
    index = 0
    for b in bits:
        index = 2 * index + int(b)
    return index


def basis_ket(*bits):
    psi = np.zeros(2 ** len(bits), dtype = complex)
    psi[basis_index(*bits)] = 1
    return psi


def excitation_operator(n_qubits):
    """Total excitation number N = sum of sigma_+ sigma_- over all qubits"""
    return as_matrix(sum(embed(EXCITED, k, n_qubits) for k in range(n_qubits)))


def _exchange(site_a, site_b, n_qubits):
    return (embed(SIGMA_PLUS, site_a, n_qubits) @ embed(SIGMA_MINUS, site_b, n_qubits)
            + embed(SIGMA_MINUS, site_a, n_qubits) @ embed(SIGMA_PLUS, site_b, n_qubits))


def jc_hamiltonian(p):
    """
    Two-qubit Jaynes-Cummings Hamiltonian of the control and memory qubits

    Parameters
    ----------
    p : HybridParams
        System parameters.

    Returns
    ----------
    numpy.ndarray : 4x4 Hermitian matrix on |sc> x |m>, basis |00>, |01>, |10>, |11>.
    """
    h = (p.omega_sc / 2 * tensor(SIGMA_Z, PAULI_I)
         + p.omega_m / 2 * tensor(PAULI_I, SIGMA_Z)
         + p.g * (tensor(SIGMA_PLUS, SIGMA_MINUS) + tensor(SIGMA_MINUS, SIGMA_PLUS)))

    return as_matrix(h)


def three_qubit_hamiltonian(p):
    """
    Control qubit coupled with identical strength g to two memory qubits sharing omega_m

    Parameters
    ----------
    p : HybridParams
        System parameters.

    Returns
    ----------
    numpy.ndarray : 8x8 Hermitian matrix on |sc> x |m1> x |m2>.
    """
    h = (p.omega_sc / 2 * embed(SIGMA_Z, 0, 3)
         + p.omega_m / 2 * embed(SIGMA_Z, 1, 3)
         + p.omega_m / 2 * embed(SIGMA_Z, 2, 3)
         + p.g * _exchange(0, 1, 3)
         + p.g * _exchange(0, 2, 3))

    return as_matrix(h)


def dispersive_hamiltonian(p):
    """Large-detuning effective coupling (g^2/Delta) sigma_z x sigma_z"""
    if p.delta == 0:
        raise ZeroDivisionError("The dispersive Hamiltonian is undefined at zero detuning.")
    return as_matrix(p.g ** 2 / p.delta * tensor(SIGMA_Z, SIGMA_Z))


def dispersive_phase_error(g, delta, t_i):
    """
    Phase error g^2 t_I / |Delta| accumulated by a detuned memory during an operation

    Parameters
    ----------
    g : float
        Coupling in rad/ns.
    delta : float
        Detuning in rad/ns.
    t_i : float
        Duration of the operation on the third party, in ns.

    Returns
    ----------
    float : The dimensionless error rate epsilon.
    """
    if delta == 0:
        raise ZeroDivisionError("The dispersive phase error diverges at zero detuning.")
    return g ** 2 * t_i / abs(delta)


def dissipators(p, n_qubits = 2):
    """
    Dephasing and relaxation terms acting on the control qubit

    Parameters
    ----------
    p : HybridParams
        System parameters; infinite t2_sc / t1_sc switch the channel off.
    n_qubits : int
        Register size (2 for the Jaynes-Cummings pair, 3 with two memories).

    Returns
    ----------
    list of Dissipator
    """
    out = []

    if math.isfinite(p.t2_sc):
        out.append(Dissipator(embed(SIGMA_Z, 0, n_qubits), 1 / (2 * p.t2_sc), DEPHASING))

    if math.isfinite(p.t1_sc):
        out.append(Dissipator(embed(SIGMA_MINUS, 0, n_qubits), 1 / p.t1_sc, JUMP))

    return out


def lindblad_model(p, n_memories = 1, with_noise = True):
    """
    Assemble the master-equation model for one or two memory qubits
    """
    if n_memories == 1:
        h = jc_hamiltonian(p)
    elif n_memories == 2:
        h = three_qubit_hamiltonian(p)
    else:
        raise ValueError("n_memories must be 1 or 2.")

    terms = dissipators(p, n_qubits = n_memories + 1) if with_noise else []

    return LindbladModel(hamiltonian = h, dissipators = terms)
