# utils/tensor_core.py
"""
Dense complex linear algebra used by every other module.

Matrices are plain 2-D complex numpy arrays. Vectorization is row-major:
entry (i*N + j) of |rho> holds rho[i, j], so that

    vec(A rho B) = kron(A, B.T) @ vec(rho)

and the superoperators L(A) = A (x) I and R(A) = I (x) A^T act on the left and
on the right of the density matrix respectively.
"""
from dataclasses import dataclass

import numpy as np
import scipy.linalg as la

from utils.errors import ContractViolation, DimensionError

HERMITIAN_TOL = 1e-10
TRACE_TOL = 1e-9
PSD_TOL = 1e-9


def as_matrix(a):
    """Coerce to a finite 2-D complex array (the ComplexMatrix contract)."""
    m = np.asarray(a, dtype=complex)
    if m.ndim != 2:
        raise DimensionError(f"expected a 2-D matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ContractViolation("matrix contains NaN or Inf entries")
    return m


def hermiticity_error(a):
    return float(np.max(np.abs(a - a.conj().T))) if a.size else 0.0


def _require_hermitian(a):
    m = as_matrix(a)
    if m.shape[0] != m.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {m.shape}")
    err = hermiticity_error(m)
    if err > HERMITIAN_TOL:
        raise ContractViolation(f"matrix is not Hermitian (max |A - A^H| = {err:.3e})")
    return m


def check_density_matrix(matrix, error=ContractViolation):
    """Raise `error` unless `matrix` is Hermitian, unit-trace and PSD within tolerance."""
    m = np.asarray(matrix, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionError(f"density matrix must be square, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise error("density matrix contains NaN or Inf entries")

    herm = hermiticity_error(m)
    if herm > HERMITIAN_TOL:
        raise error(f"density matrix is not Hermitian (max |rho - rho^H| = {herm:.3e})")

    trace = np.trace(m)
    if abs(trace - 1.0) > TRACE_TOL:
        raise error(f"density matrix trace is {trace.real:.12f}{trace.imag:+.3e}j, expected 1")

    # Symmetrize only for the eigenvalue routine; the stored matrix is untouched.
    min_eig = float(la.eigvalsh(0.5 * (m + m.conj().T))[0])
    if min_eig < -PSD_TOL:
        raise error(f"density matrix is not positive semidefinite (min eigenvalue {min_eig:.3e})")
    return m


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    matrix: np.ndarray

    def __post_init__(self):
        m = check_density_matrix(self.matrix).copy()
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self):
        return self.matrix.shape[0]

    @classmethod
    def from_ket(cls, ket):
        psi = np.asarray(ket, dtype=complex).reshape(-1)
        norm = np.linalg.norm(psi)
        if norm == 0:
            raise ContractViolation("cannot build a state from the zero vector")
        psi = psi / norm
        return cls(np.outer(psi, psi.conj()))


# --- Products and vectorization ---
def kron(a, b):
    return np.kron(as_matrix(a), as_matrix(b))


def vectorize(rho):
    m = rho.matrix if isinstance(rho, DensityMatrix) else as_matrix(rho)
    return m.reshape(-1).copy()


def devectorize(v, n):
    vec = np.asarray(v, dtype=complex).reshape(-1)
    if vec.size != n * n:
        raise DimensionError(f"vector of length {vec.size} cannot be reshaped to {n}x{n}")
    return vec.reshape(n, n).copy()


# --- Spectral routines ---
def hermitian_eig(a):
    """Eigenvalues (ascending) and unitary eigenvectors of a Hermitian matrix."""
    m = _require_hermitian(a)
    eigenvalues, eigenvectors = la.eigh(m)
    return eigenvalues, eigenvectors


def trace_norm_hermitian(a):
    m = _require_hermitian(a)
    if m.size == 0:
        return 0.0
    return float(np.sum(np.abs(la.eigvalsh(m))))


# --- Exponentials ---
def expm(a):
    """Matrix exponential (scaling and squaring with a Pade approximant)."""
    m = as_matrix(a)
    if m.shape[0] != m.shape[1]:
        raise DimensionError(f"expm needs a square matrix, got shape {m.shape}")
    return la.expm(m)


def expm_frechet(a, e, t=1.0):
    """
    Return (expm(a*t), D) with D = int_0^t expm(a(t-s)) e expm(a s) ds.

    Uses the augmented block matrix [[a, e], [0, a]] * t, whose exponential
    holds expm(a*t) on the diagonal blocks and D in the upper-right block.
    """
    a = as_matrix(a)
    e = as_matrix(e)
    n = a.shape[0]
    if a.shape != (n, n) or e.shape != (n, n):
        raise DimensionError(f"expm_frechet needs equal square shapes, got {a.shape} and {e.shape}")
    if t < 0:
        raise ContractViolation(f"evolution time must be non-negative, got {t}")

    block = np.zeros((2 * n, 2 * n), dtype=complex)
    block[:n, :n] = a
    block[n:, n:] = a
    block[:n, n:] = e
    big = la.expm(block * t)
    return big[:n, :n], big[:n, n:]
