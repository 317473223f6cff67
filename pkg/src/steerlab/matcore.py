"""Dense Hermitian linear algebra on small complex matrices.

Everything here operates on plain ``numpy`` arrays of ``complex128``.
Matrices are kept Hermitian by explicit symmetrization; PSD checks use a
fixed eigenvalue tolerance that only absorbs floating-point round-off.
"""

from __future__ import annotations

import numpy as np

from .errors import DimensionMismatch, NotPSD

PSD_TOL = 1e-10

# computational-basis kets and the Pauli matrices
KET0 = np.array([1.0, 0.0], dtype=complex)
KET1 = np.array([0.0, 1.0], dtype=complex)
KET_PLUS = (KET0 + KET1) / np.sqrt(2.0)
KET_MINUS = (KET0 - KET1) / np.sqrt(2.0)

PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)


def hermitianize(a: np.ndarray) -> np.ndarray:
    """Return the Hermitian part (A + A†)/2."""
    a = np.asarray(a, dtype=complex)
    return (a + a.conj().T) / 2.0


def projector(v: np.ndarray) -> np.ndarray:
    """Rank-1 projector |v⟩⟨v| (not normalized)."""
    v = np.asarray(v, dtype=complex)
    return np.outer(v, v.conj())


def is_hermitian(a: np.ndarray, tol: float = 1e-12) -> bool:
    a = np.asarray(a)
    return a.ndim == 2 and a.shape[0] == a.shape[1] and \
        np.max(np.abs(a - a.conj().T)) <= tol


def min_eig(a: np.ndarray) -> float:
    """Smallest eigenvalue of the Hermitian part of ``a``."""
    return float(np.linalg.eigvalsh(hermitianize(a))[0])


def sqrtm_psd(a: np.ndarray, tol: float = PSD_TOL) -> np.ndarray:
    """Principal square root of a PSD Hermitian matrix.

    Eigenvalues in [-tol, 0) are clamped to zero; a smallest eigenvalue
    below -tol raises :class:`NotPSD`.
    """
    a = hermitianize(a)
    w, v = np.linalg.eigh(a)
    if w[0] < -tol:
        raise NotPSD(f"smallest eigenvalue {w[0]:.3e} < -{tol:.0e}")
    w = np.sqrt(np.maximum(w, 0.0))
    return hermitianize((v * w) @ v.conj().T)


def uhlmann_fidelity(a: np.ndarray, b: np.ndarray, tol: float = PSD_TOL) -> float:
    """Tr √(√A B √A) for PSD A, B (subnormalized operators allowed).

    Evaluated as the nuclear norm of √A √B, which is the same quantity
    but numerically stable when A or B is near-singular.
    """
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if a.shape != b.shape:
        raise DimensionMismatch(f"shapes {a.shape} vs {b.shape}")
    ra = sqrtm_psd(a, tol)
    rb = sqrtm_psd(b, tol)
    return float(np.linalg.svd(ra @ rb, compute_uv=False).sum())


def kron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Tensor product; output dimension is the product of the inputs'."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if a.ndim != 2 or b.ndim != 2:
        raise DimensionMismatch("kron expects 2-d operands")
    return np.kron(a, b)


def partial_trace(a: np.ndarray, dims: tuple[int, int], traced: int) -> np.ndarray:
    """Trace out subsystem ``traced`` (0 or 1) of a bipartite operator.

    ``dims = (d0, d1)`` with ``a`` of dimension ``d0 * d1``.
    """
    d0, d1 = dims
    a = np.asarray(a, dtype=complex)
    if a.shape != (d0 * d1, d0 * d1):
        raise DimensionMismatch(f"operator shape {a.shape} vs dims {dims}")
    if traced not in (0, 1):
        raise DimensionMismatch("traced index must be 0 or 1")
    t = a.reshape(d0, d1, d0, d1)
    if traced == 0:
        return np.trace(t, axis1=0, axis2=2)
    return np.trace(t, axis1=1, axis2=3)


def psd_clip(a: np.ndarray) -> np.ndarray:
    """Project onto the PSD cone by clipping negative eigenvalues."""
    a = hermitianize(a)
    w, v = np.linalg.eigh(a)
    w = np.maximum(w, 0.0)
    return hermitianize((v * w) @ v.conj().T)
