"""Dense complex linear algebra for Hilbert spaces of one to three qubits"""

import numpy as np

from pyzeno.helpers import DimensionError, MatrixError

__all__ = ["PAULI_I", "PAULI_X", "PAULI_Y", "PAULI_Z",
           "as_matrix", "as_ket", "is_hermitian", "tensor", "tensor_all",
           "commutator", "dagger", "projector", "density_matrix",
           "validate_density_matrix", "jacobi_eigh", "herm_expm"]

MAX_DIM = 8
ALLOWED_DIMS = (2, 4, 8)

HERMITIAN_TOL = 1e-10

# Textbook Pauli matrices in index order (|0>, |1>)
PAULI_I = np.eye(2, dtype = complex)
PAULI_X = np.array([[0, 1], [1, 0]], dtype = complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype = complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype = complex)

for _m in (PAULI_I, PAULI_X, PAULI_Y, PAULI_Z):
    _m.setflags(write = False)


def as_matrix(a):
    """
    Coerce an array-like into a read-only square complex matrix of dimension 2, 4 or 8

    Parameters
    ----------
    a : array-like
        A square matrix.

    Returns
    ----------
    numpy.ndarray : A complex128 array of shape (dim, dim).
    """
    m = np.array(a, dtype = complex)

    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionError(f"Expected a square matrix, got shape {m.shape}.")

    if m.shape[0] not in ALLOWED_DIMS:
        raise DimensionError(f"Matrix dimension must be one of {ALLOWED_DIMS}, got {m.shape[0]}.")

    m.setflags(write = False)

    return m


def as_ket(amplitudes, normalize = False):
    """
    Coerce amplitudes into a complex state vector, optionally normalizing it
    """
    psi = np.array(amplitudes, dtype = complex).reshape(-1)

    if psi.shape[0] not in ALLOWED_DIMS:
        raise DimensionError(f"Ket dimension must be one of {ALLOWED_DIMS}, got {psi.shape[0]}.")

    norm = np.vdot(psi, psi).real

    if normalize:
        if norm == 0:
            raise MatrixError("Cannot normalize the zero vector.")
        psi = psi / np.sqrt(norm)
    elif abs(norm - 1) > 1e-12:
        raise MatrixError(f"Ket is not normalized: <psi|psi> = {norm}.")

    psi.setflags(write = False)

    return psi


def dagger(a):
    return np.conj(np.transpose(a))


def is_hermitian(a, tol = HERMITIAN_TOL):
    a = np.asarray(a)
    return bool(np.max(np.abs(a - dagger(a))) <= tol)


def tensor(a, b):
    """
    Kronecker product of two operators

    The result is indexed as ``out[i * b.dim + k, j * b.dim + l] = a[i, j] * b[k, l]``,
    so the left factor is the more significant qubit.

    Parameters
    ----------
    a : array-like
        Left operator.
    b : array-like
        Right operator.

    Returns
    ----------
    numpy.ndarray : The tensor product, of dimension a.dim * b.dim.
    """
    a = np.asarray(a, dtype = complex)
    b = np.asarray(b, dtype = complex)

    dim = a.shape[0] * b.shape[0]

    if dim > MAX_DIM:
        raise DimensionError(f"Tensor product dimension {dim} exceeds the limit of {MAX_DIM}.")

    return as_matrix(np.kron(a, b))


def tensor_all(*ops):
    out = ops[0]
    for op in ops[1:]:
        out = tensor(out, op)
    return as_matrix(out)


def commutator(a, b):
    return a @ b - b @ a


def projector(psi):
    psi = np.asarray(psi, dtype = complex).reshape(-1)
    return np.outer(psi, np.conj(psi))


def density_matrix(psi):
    """
    Build the pure-state density matrix |psi><psi| of a normalized ket
    """
    return as_matrix(projector(as_ket(psi)))


def validate_density_matrix(rho, hermitian_tol = 1e-10, trace_tol = 1e-9, eig_tol = 1e-9):
    """
    Check that rho is a physical density matrix

    Parameters
    ----------
    rho : array-like
        Candidate density matrix.
    hermitian_tol : float
        Allowed max |rho - rho^dagger|.
    trace_tol : float
        Allowed |Tr rho - 1|.
    eig_tol : float
        Allowed negativity of the smallest eigenvalue.

    Returns
    ----------
    numpy.ndarray : rho as a read-only complex matrix.
    """
    rho = as_matrix(rho)

    if not is_hermitian(rho, hermitian_tol):
        raise MatrixError("Density matrix is not Hermitian.")

    tr = np.trace(rho).real
    if abs(tr - 1) > trace_tol:
        raise MatrixError(f"Density matrix trace is {tr}, expected 1.")

    min_eig = np.linalg.eigvalsh(rho).min()
    if min_eig < -eig_tol:
        raise MatrixError(f"Density matrix has a negative eigenvalue {min_eig}.")

    return rho


def jacobi_eigh(h, tol = 1e-14, max_sweeps = 100):
    """
    Eigendecomposition of a Hermitian matrix by cyclic complex Jacobi rotations

    Parameters
    ----------
    h : array-like
        A Hermitian matrix (dimension 2, 4 or 8).
    tol : float
        Convergence threshold on the off-diagonal Frobenius norm, relative to
        max(1, ||h||_F).
    max_sweeps : int
        Upper bound on the number of full cyclic sweeps.

    Returns
    ----------
    tuple : (eigenvalues, V) with real eigenvalues sorted ascending and the
    eigenvectors as the columns of the unitary V, so that V diag(lambda) V^dagger = h.
    """
    h = as_matrix(h)

    if not is_hermitian(h):
        raise MatrixError("jacobi_eigh requires a Hermitian matrix.")

    n = h.shape[0]
    a = np.array(0.5 * (h + dagger(h)))
    v = np.eye(n, dtype = complex)

    threshold = tol * max(1.0, np.linalg.norm(a))

    for sweep in range(max_sweeps):
        off = np.sqrt(np.sum(np.abs(a - np.diag(np.diag(a))) ** 2))
        if off <= threshold:
            break

        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                r = abs(apq)
                if r < 1e-300:
                    continue

                # Phase the (p, q) element real, then a real rotation zeroes it
                phase = apq / r
                theta = 0.5 * np.arctan2(2 * r, a[q, q].real - a[p, p].real)
                c, s = np.cos(theta), np.sin(theta)

                j = np.eye(n, dtype = complex)
                j[p, p] = c
                j[p, q] = s
                j[q, p] = -s * np.conj(phase)
                j[q, q] = c * np.conj(phase)

                a = dagger(j) @ a @ j
                a[p, q] = 0
                a[q, p] = 0
                v = v @ j

    evals = np.real(np.diag(a))
    order = np.argsort(evals, kind = "stable")

    return evals[order], v[:, order]


def herm_expm(h, t):
    """
    Compute the propagator exp(-i h t) of a Hermitian generator

    Parameters
    ----------
    h : array-like
        Hermitian matrix (rad/ns for Hamiltonians).
    t : float
        Evolution time (ns).

    Returns
    ----------
    numpy.ndarray : The unitary U = exp(-i h t).
    """
    evals, v = jacobi_eigh(h)

    u = v @ np.diag(np.exp(-1j * evals * t)) @ dagger(v)

    return as_matrix(u)
