"""Single-qubit measurement families in Bloch form.

Every element is stored as B_k = c_k (I + a_k . sigma). The families are
projective measurements along an axis, the coupling-oriented tetrahedral
POVM (CIC) built from the exchange couplings, its isotropic special case
(SIC), and rigid rotations of any of them.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidInputError, UnsupportedMeasurementError
from .spinchain import SIGMA

RANK1_TOL = 1e-8


@dataclass(frozen=True, eq=False)
class Measurement:
    """Weighted Bloch vectors of a POVM, plus the family tag that made it."""

    weights: np.ndarray  # (K,)
    vectors: np.ndarray  # (K, 3)
    family: str
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        a = np.asarray(self.vectors, dtype=float)
        if a.ndim != 2 or a.shape[1] != 3 or w.shape != (a.shape[0],):
            raise InvalidInputError("weights must be (K,) and vectors (K, 3)")
        if np.any(w < 0) or np.any(np.linalg.norm(a, axis=1) > 1 + 1e-12):
            raise InvalidInputError("weights must be >= 0 and Bloch vectors inside the unit ball")
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "vectors", a)

    def __len__(self):
        return len(self.weights)

    def operators(self) -> np.ndarray:
        """(K, 2, 2) array of the positive operators B_k."""
        sig = np.array([SIGMA["x"], SIGMA["y"], SIGMA["z"]])
        return self.weights[:, None, None] * (np.eye(2) + np.einsum("ka,aij->kij", self.vectors, sig))

    def completeness_error(self) -> float:
        return float(np.abs(self.operators().sum(axis=0) - np.eye(2)).max())

    def is_rank1(self, tol: float = RANK1_TOL) -> bool:
        return bool(np.all(np.abs(np.linalg.norm(self.vectors, axis=1) - 1) <= tol))

    def equivalent(self, other: "Measurement", tol: float = 1e-4) -> bool:
        """Same multiset of (weight, vector) elements, up to ``tol``."""
        if len(self) != len(other):
            return False
        unused = list(range(len(other)))
        for c, a in zip(self.weights, self.vectors):
            for n, k in enumerate(unused):
                if abs(c - other.weights[k]) <= tol and np.abs(a - other.vectors[k]).max() <= tol:
                    unused.pop(n)
                    break
            else:
                return False
        return True

    def to_dict(self, digits: int = 12) -> dict:
        fmt = lambda x: float(f"{x:.{digits - 1}e}")
        return {
            "family": self.family,
            "params": {k: fmt(v) for k, v in self.params.items()},
            "elements": [
                {"c": fmt(c), "a": [fmt(x) for x in a]} for c, a in zip(self.weights, self.vectors)
            ],
        }


def bloch_vector(theta: float, phi: float) -> np.ndarray:
    return np.array([np.sin(theta) * np.cos(phi), np.sin(theta) * np.sin(phi), np.cos(theta)])


def rotation_matrix(theta, phi) -> np.ndarray:
    """R = Rz(phi) Ry(theta); broadcasts over array-valued angles to (..., 3, 3)."""
    if np.ndim(theta) == 0 and np.ndim(phi) == 0:
        ct, st, cp, sp = math.cos(theta), math.sin(theta), math.cos(phi), math.sin(phi)
        return np.array([[cp * ct, -sp, cp * st], [sp * ct, cp, sp * st], [-st, 0.0, ct]])
    theta, phi = np.broadcast_arrays(np.asarray(theta, dtype=float), np.asarray(phi, dtype=float))
    ct, st, cp, sp = np.cos(theta), np.sin(theta), np.cos(phi), np.sin(phi)
    zero = np.zeros_like(ct)
    return np.stack(
        [
            np.stack([cp * ct, -sp, cp * st], axis=-1),
            np.stack([sp * ct, cp, sp * st], axis=-1),
            np.stack([-st, zero, ct], axis=-1),
        ],
        axis=-2,
    )


def projective(theta: float, phi: float) -> Measurement:
    n = bloch_vector(theta, phi)
    return Measurement(np.full(2, 0.5), np.array([n, -n]), "PROJ", {"theta": theta, "phi": phi})


def cic_vectors(Jx: float, Jy: float, Jz: float) -> np.ndarray:
    J = np.array([Jx, Jy, Jz], dtype=float)
    norm = np.linalg.norm(J)
    if norm == 0:
        raise InvalidInputError("CIC POVM needs a nonzero coupling vector")
    signs = np.array([[1, 1, 1], [1, -1, -1], [-1, 1, -1], [-1, -1, 1]])
    return signs * J / norm


def cic_povm(Jx: float, Jy: float, Jz: float) -> Measurement:
    """Four-outcome POVM with vectors alpha(+-Jx, +-Jy, +-Jz), an even number of minus signs."""
    return Measurement(np.full(4, 0.25), cic_vectors(Jx, Jy, Jz), "CIC", {"Jx": Jx, "Jy": Jy, "Jz": Jz})


def sic_povm() -> Measurement:
    m = cic_povm(1.0, 1.0, 1.0)
    return Measurement(m.weights, m.vectors, "SIC", {})


def rotate(m: Measurement, theta: float, phi: float) -> Measurement:
    """Rigidly rotate every Bloch vector by Rz(phi) Ry(theta)."""
    R = rotation_matrix(theta, phi)
    params = dict(m.params)
    params.update(theta=theta, phi=phi)
    return Measurement(m.weights, m.vectors @ R.T, m.family, params)


@dataclass(frozen=True)
class Rank1State:
    theta: float
    phi: float
    weight: float


def rank1_decomposition(m: Measurement) -> list[Rank1State]:
    """Bloch angles of each rank-1 element, theta in [0, pi], phi in [0, 2 pi)."""
    if not m.is_rank1():
        raise UnsupportedMeasurementError("measurement has elements that are not rank-1")
    out = []
    for c, a in zip(m.weights, m.vectors):
        a = a / np.linalg.norm(a)
        theta = float(np.arccos(np.clip(a[2], -1.0, 1.0)))
        phi = float(np.arctan2(a[1], a[0]) % (2 * np.pi)) if np.hypot(a[0], a[1]) > 1e-12 else 0.0
        out.append(Rank1State(theta, phi, float(c)))
    return out


def rank1_ket(state: Rank1State) -> np.ndarray:
    """Unit ket whose projector has Bloch vector (theta, phi)."""
    return np.array([np.cos(state.theta / 2), np.exp(1j * state.phi) * np.sin(state.theta / 2)])
