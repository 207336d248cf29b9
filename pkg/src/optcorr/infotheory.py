"""Entropies and measurement-induced correlations of two-qubit states (in bits).

For a rank-1 element B_k on B, the post-measurement state of AB is
rho_A^(k) (x) |b_k><b_k|, so S(rho_AB^(k)) = S(rho_A^(k)). That is the only
case handled; other measurements are rejected.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidStateError, UnsupportedMeasurementError
from .measure import Measurement
from .rdm import check_density_matrix, correlators_from_rdm, partial_trace

NEG_EIG_TOL = 1e-10
P_FLOOR = 1e-14
P_NEG_TOL = 1e-12


def _entropy_from_eigenvalues(lam: np.ndarray) -> float:
    if lam.min() < -NEG_EIG_TOL:
        raise InvalidStateError(f"negative eigenvalue {lam.min():.3e}")
    lam = lam[lam > 0]
    return float(-(lam * np.log2(lam)).sum())


def von_neumann_entropy(rho: np.ndarray) -> float:
    """-Tr rho log2 rho; eigenvalues in [-1e-10, 0) count as zero."""
    return _entropy_from_eigenvalues(np.linalg.eigvalsh(np.asarray(rho)))


def mutual_information(rho_ab: np.ndarray) -> float:
    rho_ab = check_density_matrix(rho_ab)
    return (
        von_neumann_entropy(partial_trace(rho_ab, "A"))
        + von_neumann_entropy(partial_trace(rho_ab, "B"))
        - von_neumann_entropy(rho_ab)
    )


def _require_rank1(m: Measurement):
    if not m.is_rank1():
        raise UnsupportedMeasurementError(
            f"{m.family} measurement has non rank-1 elements; conditional entropy is only defined for rank-1"
        )


def conditional_entropy(rho_ab: np.ndarray, m: Measurement) -> float:
    """sum_k p_k S(rho_A^(k)) after measuring B with ``m``."""
    _require_rank1(m)
    r = np.asarray(rho_ab).reshape(2, 2, 2, 2)
    total = 0.0
    for B in m.operators():
        # Tr_B[(I (x) B) rho]
        unnorm = np.einsum("kl,iljk->ij", B, r)
        p = float(np.trace(unnorm).real)
        if p < -P_NEG_TOL:
            raise InvalidStateError(f"negative outcome probability {p:.3e}")
        if p <= P_FLOOR:
            continue
        total += p * von_neumann_entropy(unnorm / p)
    return total


def classical_correlations_given(rho_ab: np.ndarray, m: Measurement) -> float:
    """S(rho_A) - S_C(rho_AB | m), before any maximization."""
    return von_neumann_entropy(partial_trace(rho_ab, "A")) - conditional_entropy(rho_ab, m)


def discord_given(rho_ab: np.ndarray, m: Measurement) -> float:
    return mutual_information(rho_ab) - classical_correlations_given(rho_ab, m)


@dataclass(frozen=True)
class CorrelationValues:
    S_A: float
    S_B: float
    S_AB: float
    I: float
    S_C: float
    C: float
    Q: float
    measurement: Measurement


def correlation_values(rho_ab: np.ndarray, m: Measurement) -> CorrelationValues:
    rho_ab = check_density_matrix(rho_ab)
    s_a = von_neumann_entropy(partial_trace(rho_ab, "A"))
    s_b = von_neumann_entropy(partial_trace(rho_ab, "B"))
    s_ab = von_neumann_entropy(rho_ab)
    mi = s_a + s_b - s_ab
    s_c = conditional_entropy(rho_ab, m)
    c = s_a - s_c
    return CorrelationValues(s_a, s_b, s_ab, mi, s_c, c, mi - c, m)


# --- vectorized Bloch-form evaluation used by the optimizer -----------------


def binary_entropy_of_radius(r: np.ndarray) -> np.ndarray:
    """Entropy of a qubit whose Bloch vector has length r."""
    r = np.clip(r, 0.0, 1.0)
    p = 0.5 * (1 + r)
    q = 0.5 * (1 - r)
    with np.errstate(divide="ignore", invalid="ignore"):
        hp = np.where(p > 0, -p * np.log2(p), 0.0)
        hq = np.where(q > 0, -q * np.log2(q), 0.0)
    return hp + hq


@dataclass(frozen=True)
class BlochForm:
    """One- and two-point Pauli data of a two-qubit state."""

    s_a: np.ndarray  # <sigma_A>
    t_b: np.ndarray  # <sigma_B>
    T: np.ndarray  # T[a, b] = <sigma^a_A sigma^b_B>
    S_A: float

    @classmethod
    def from_rdm(cls, rho_ab: np.ndarray) -> "BlochForm":
        rho_ab = check_density_matrix(rho_ab)
        C = correlators_from_rdm(rho_ab)
        return cls(C[1:, 0], C[0, 1:], C[1:, 1:], von_neumann_entropy(partial_trace(rho_ab, "A")))

    def conditional_entropy(self, weights: np.ndarray, vectors: np.ndarray) -> np.ndarray:
        """S_C for a batch of measurements; ``vectors`` has shape (..., K, 3)."""
        p = weights * (1.0 + vectors @ self.t_b)
        u = weights[..., None] * (self.s_a + vectors @ self.T.T)
        with np.errstate(divide="ignore", invalid="ignore"):
            r = np.where(p > P_FLOOR, np.linalg.norm(u, axis=-1) / p, 0.0)
        terms = np.where(p > P_FLOOR, p * binary_entropy_of_radius(r), 0.0)
        return terms.sum(axis=-1)

    def classical_correlations(self, weights: np.ndarray, vectors: np.ndarray) -> np.ndarray:
        return self.S_A - self.conditional_entropy(weights, vectors)
