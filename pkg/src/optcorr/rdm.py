"""Reduced density matrices of one and two sites.

Two independent routes are kept: a direct partial trace of |v><v|, and a
reconstruction from the 16 Pauli correlators <sigma^a_i sigma^b_j>. The
two-site basis is |uu>, |ud>, |du>, |dd> with site i (subsystem A) first.
"""
from __future__ import annotations

import numpy as np

from .errors import InconsistentCorrelatorsError, InvalidInputError, InvalidStateError
from .spinchain import SIGMA, apply_pauli, n_sites

PAULI_AXES = ("0", "x", "y", "z")
PAULI_BASIS = np.array([SIGMA[a] for a in PAULI_AXES])

HERMITIAN_TOL = 1e-12
TRACE_TOL = 1e-12
NEGATIVITY_TOL = 1e-10
IMAG_TOL = 1e-10


def _state_tensor(v: np.ndarray, sites: tuple[int, ...]) -> np.ndarray:
    L = n_sites(v)
    for s in sites:
        if not 0 <= s < L:
            raise InvalidInputError(f"site {s} out of range for L={L}")
    t = np.asarray(v).reshape([2] * L)  # axis k holds site L-1-k
    axes = [L - 1 - s for s in sites]
    return np.moveaxis(t, axes, range(len(sites))).reshape(2 ** len(sites), -1)


def single_site_rdm(v: np.ndarray, i: int) -> np.ndarray:
    psi = _state_tensor(v, (i,))
    return psi @ psi.conj().T


def two_site_rdm(v: np.ndarray, i: int, j: int) -> np.ndarray:
    if i == j:
        raise InvalidInputError("two_site_rdm needs two distinct sites")
    if i > j:
        raise InvalidInputError(f"expected i < j, got ({i}, {j})")
    psi = _state_tensor(v, (i, j))
    return psi @ psi.conj().T


def pauli_correlators(v: np.ndarray, i: int, j: int) -> np.ndarray:
    """4x4 real table T[a, b] = <v| sigma^a_i sigma^b_j |v>, a, b in (0, x, y, z)."""
    L = n_sites(v)
    if i == j or not (0 <= i < j < L):
        raise InvalidInputError(f"need 0 <= i < j < L, got ({i}, {j}) with L={L}")
    T = np.empty((4, 4), dtype=complex)
    for b, bax in enumerate(PAULI_AXES):
        vb = apply_pauli(v, j, bax)
        for a, aax in enumerate(PAULI_AXES):
            T[a, b] = np.vdot(v, apply_pauli(vb, i, aax))
    if np.abs(T.imag).max() > IMAG_TOL:
        raise InvalidStateError(f"correlators carry imaginary part {np.abs(T.imag).max():.2e}")
    T = T.real
    T[0, 0] = 1.0
    return T


def correlators_from_rdm(rho: np.ndarray) -> np.ndarray:
    """Inverse of :func:`rdm_from_correlators`: T[a, b] = Tr[rho sigma^a x sigma^b]."""
    ops = np.einsum("aij,bkl->abikjl", PAULI_BASIS, PAULI_BASIS).reshape(4, 4, 4, 4)
    return np.einsum("abij,ji->ab", ops, rho).real


def rdm_from_correlators(T: np.ndarray) -> np.ndarray:
    """rho = 1/4 sum_ab T[a, b] sigma^a (x) sigma^b."""
    T = np.asarray(T)
    if T.shape != (4, 4):
        raise InvalidInputError(f"correlator table must be 4x4, got {T.shape}")
    if np.iscomplexobj(T):
        if np.abs(T.imag).max() > IMAG_TOL:
            raise InconsistentCorrelatorsError("correlator table has imaginary entries")
        T = T.real
    if abs(T[0, 0] - 1) > TRACE_TOL or np.abs(T).max() > 1 + 1e-10:
        raise InconsistentCorrelatorsError("correlator table out of range or not normalized")
    rho = 0.25 * np.einsum("ab,aij,bkl->ikjl", T, PAULI_BASIS, PAULI_BASIS).reshape(4, 4)
    lam = np.linalg.eigvalsh(rho).min()
    if lam < -1e-8:
        raise InconsistentCorrelatorsError(f"reconstructed state has eigenvalue {lam:.3e}")
    return rho


def partial_trace(rho: np.ndarray, keep: str) -> np.ndarray:
    """Marginal of a 4x4 two-qubit state; ``keep`` is 'A' or 'B'."""
    r = np.asarray(rho).reshape(2, 2, 2, 2)
    if keep == "A":
        return np.einsum("ijkj->ik", r)
    if keep == "B":
        return np.einsum("ijil->jl", r)
    raise InvalidInputError(f"keep must be 'A' or 'B', got {keep!r}")


def check_density_matrix(rho: np.ndarray) -> np.ndarray:
    """Validate a density matrix and return it unchanged."""
    rho = np.asarray(rho)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1] or rho.shape[0] not in (2, 4):
        raise InvalidInputError(f"expected a 2x2 or 4x4 matrix, got shape {rho.shape}")
    if np.abs(rho - rho.conj().T).max() > HERMITIAN_TOL:
        raise InvalidStateError("density matrix is not Hermitian")
    if abs(np.trace(rho) - 1) > TRACE_TOL:
        raise InvalidStateError(f"density matrix has trace {np.trace(rho).real:.15f}")
    lam = np.linalg.eigvalsh(rho).min()
    if lam < -NEGATIVITY_TOL:
        raise InvalidStateError(f"density matrix has eigenvalue {lam:.3e}")
    return rho


def x_state_violation(rho: np.ndarray) -> float:
    """Largest modulus outside the diagonal and anti-diagonal (0 for X-states)."""
    mask = np.ones((4, 4), dtype=bool)
    mask[np.arange(4), np.arange(4)] = False
    mask[np.arange(4), 3 - np.arange(4)] = False
    return float(np.abs(np.asarray(rho)[mask]).max())
