"""Open XYZ spin-1/2 chain in a transverse field: Hamiltonian and ground states.

    H = sum_i (Jx sx_i sx_{i+1} + Jy sy_i sy_{i+1} + Jz sz_i sz_{i+1})
        - h sum_i sz_i - hx sum_i s_i sx_i

with s_i = 1 (uniform bias) or (-1)**i (staggered bias).

Basis convention: bit i of a basis index is the z-state of site i, with
0 = spin up (sz = +1) and 1 = spin down; site 0 is the least-significant bit.
States are plain 1-D numpy arrays of length 2**L.
"""
from __future__ import annotations

from dataclasses import dataclass, replace
from functools import lru_cache

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .errors import ConvergenceError, InvalidInputError

MAX_SITES = 16
DENSE_MAX_SITES = 10

SIGMA = {
    "0": np.eye(2, dtype=complex),
    "x": np.array([[0, 1], [1, 0]], dtype=complex),
    "y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "z": np.array([[1, 0], [0, -1]], dtype=complex),
}


@dataclass(frozen=True)
class ModelSpec:
    """Couplings, fields and size of an open chain.

    ``staggered_bias`` makes the symmetry-breaking field alternate in sign
    from site to site, which is what couples to antiferromagnetic order.
    """

    Jx: float
    Jy: float
    Jz: float
    h: float
    L: int
    hx: float = 0.0
    staggered_bias: bool = False
    max_sites: int = MAX_SITES

    def __post_init__(self):
        if not isinstance(self.L, (int, np.integer)) or self.L < 2:
            raise InvalidInputError(f"L must be an integer >= 2, got {self.L!r}")
        if self.L > self.max_sites:
            raise InvalidInputError(f"L={self.L} exceeds the cap of {self.max_sites} sites")
        if self.Jx == 0 and self.Jy == 0 and self.Jz == 0 and self.h == 0:
            raise InvalidInputError("all couplings and the field are zero")
        if self.hx < 0:
            raise InvalidInputError(f"hx must be >= 0, got {self.hx}")

    @property
    def dim(self) -> int:
        return 1 << self.L

    def with_field(self, h: float) -> "ModelSpec":
        return replace(self, h=float(h))


# Reference models. hx defaults follow the symmetry-broken runs.
MODELS = {
    "ising": dict(Jx=-1.0, Jy=0.0, Jz=0.0, hx=1e-6, staggered_bias=False),
    "xyx": dict(Jx=1.0, Jy=0.25, Jz=1.0, hx=1e-6, staggered_bias=True),
    "xxz": dict(Jx=1.0, Jy=1.0, Jz=0.5, hx=0.0, staggered_bias=False),
}

CRITICAL_FIELDS = {"ising": 1.0, "xyx": 3.21}


def model_spec(name: str, h: float, L: int = 14, hx: float | None = None, **overrides) -> ModelSpec:
    """Build a :class:`ModelSpec` for one of the named models."""
    try:
        params = dict(MODELS[name])
    except KeyError:
        raise InvalidInputError(f"unknown model {name!r}; choose from {sorted(MODELS)}") from None
    if hx is not None:
        params["hx"] = hx
    params.update(overrides)
    return ModelSpec(h=float(h), L=L, **params)


def n_sites(v: np.ndarray) -> int:
    n = len(v)
    L = n.bit_length() - 1
    if n < 2 or 1 << L != n:
        raise InvalidInputError(f"state length {n} is not a power of two")
    return L


def spins(L: int) -> np.ndarray:
    """(2**L, L) array of sz eigenvalues, +1 for up."""
    idx = np.arange(1 << L)
    return 1 - 2 * ((idx[:, None] >> np.arange(L)) & 1)


@lru_cache(maxsize=8)
def _operator_terms(spec: ModelSpec):
    L = spec.L
    s = spins(L).astype(float)
    diag = -spec.h * s.sum(axis=1)
    flips = []
    for i in range(L - 1):
        ss = s[:, i] * s[:, i + 1]
        diag += spec.Jz * ss
        if spec.Jx != 0 or spec.Jy != 0:
            # <n|sx sx + c sy sy|n^mask> = Jx - Jy s_i s_j, same on both ends
            flips.append(((1 << i) | (1 << (i + 1)), spec.Jx - spec.Jy * ss))
    if spec.hx != 0:
        for i in range(L):
            sign = (-1) ** i if spec.staggered_bias else 1
            flips.append((1 << i, -spec.hx * sign))
    return diag, flips


def _check_length(spec: ModelSpec, v: np.ndarray):
    if v.ndim != 1 or v.shape[0] != spec.dim:
        raise InvalidInputError(f"vector of shape {v.shape} does not match 2**L = {spec.dim}")


def apply_hamiltonian(spec: ModelSpec, v) -> np.ndarray:
    """Return H v without building H (O(L 2**L) work)."""
    v = np.asarray(v)
    _check_length(spec, v)
    diag, flips = _operator_terms(spec)
    idx = np.arange(spec.dim)
    out = diag * v
    for mask, coef in flips:
        out += coef * v[idx ^ mask]
    return out


def dense_hamiltonian(spec: ModelSpec) -> np.ndarray:
    """Dense H assembled from Kronecker products; independent of the bit-twiddling path."""
    if spec.L > DENSE_MAX_SITES + 2:
        raise InvalidInputError(f"dense Hamiltonian limited to L <= {DENSE_MAX_SITES + 2}")
    L = spec.L

    def site_op(ops: dict) -> np.ndarray:
        out = np.ones((1, 1), dtype=complex)
        for site in reversed(range(L)):  # site L-1 is the most significant bit
            out = np.kron(out, ops.get(site, SIGMA["0"]))
        return out

    H = np.zeros((spec.dim, spec.dim), dtype=complex)
    for i in range(L - 1):
        for a, J in zip("xyz", (spec.Jx, spec.Jy, spec.Jz)):
            if J:
                H += J * site_op({i: SIGMA[a], i + 1: SIGMA[a]})
    for i in range(L):
        H -= spec.h * site_op({i: SIGMA["z"]})
        if spec.hx:
            sign = (-1) ** i if spec.staggered_bias else 1
            H -= spec.hx * sign * site_op({i: SIGMA["x"]})
    return H


def start_vector(dim: int) -> np.ndarray:
    """Uniform superposition with a fixed, small, symmetry-breaking ripple."""
    idx = np.arange(dim)
    v = 1.0 + 0.1 * np.cos(2.399963 * idx + 0.5) + 0.05 * np.sin(0.7071 * idx * idx)
    return v / np.linalg.norm(v)


def lanczos(matvec, v0, n_eig=1, tol=1e-10, max_iter=500, check_every=5):
    """Lowest ``n_eig`` eigenpairs of a real symmetric operator.

    Plain Lanczos with full (two-pass) reorthogonalization. Convergence is
    declared when every requested Ritz pair has ``||A x - theta x|| < tol``.
    Exact degeneracies are only resolved up to the start vector's span, so
    fewer than ``n_eig`` pairs can come back from a small invariant subspace.
    """
    dim = v0.shape[0]
    max_iter = min(max_iter, dim)
    V = np.empty((min(max_iter + 1, 64), dim))
    alpha = np.empty(max_iter)
    beta = np.empty(max_iter)
    V[0] = v0 / np.linalg.norm(v0)
    res = np.inf
    for m in range(max_iter):
        w = matvec(V[m])
        alpha[m] = V[m] @ w
        w -= V[: m + 1].T @ (V[: m + 1] @ w)
        w -= V[: m + 1].T @ (V[: m + 1] @ w)
        beta[m] = np.linalg.norm(w)
        exhausted = beta[m] < 1e-13 * max(1.0, abs(alpha[m]))
        if not exhausted:
            if m + 1 == V.shape[0]:
                V = np.concatenate([V, np.empty((min(V.shape[0], max_iter + 1 - V.shape[0]), dim))])
            V[m + 1] = w / beta[m]
        size = m + 1
        if exhausted or size == max_iter or (size >= n_eig and size % check_every == 0):
            theta, S = eigh_tridiagonal(alpha[:size], beta[: size - 1])
            k = min(n_eig, size)
            est = np.abs(beta[m] * S[-1, :k])
            res = est.max()
            if exhausted or res < tol:
                X = S[:, :k].T @ V[:size]
                true_res = np.array([np.linalg.norm(matvec(x) - t * x) for x, t in zip(X, theta[:k])])
                if true_res.max() < tol or exhausted:
                    return theta[:k], X, true_res
                res = true_res.max()
    raise ConvergenceError(
        f"Lanczos did not converge in {max_iter} iterations (residual {res:.3e})", residual=res
    )


def _fix_phase(v: np.ndarray) -> np.ndarray:
    k = int(np.argmax(np.abs(v)))
    return v * (abs(v[k]) / v[k])


def low_spectrum(spec: ModelSpec, n_eig=1, tol=1e-10, max_iter=600):
    """Lowest eigenvalues and eigenvectors (as rows) of H, iterative path."""
    if tol <= 0:
        raise InvalidInputError("tol must be positive")
    diag, flips = _operator_terms(spec)
    idx = np.arange(spec.dim)

    def matvec(x):
        out = diag * x
        for mask, coef in flips:
            out += coef * x[idx ^ mask]
        return out

    evals, evecs, res = lanczos(matvec, start_vector(spec.dim), n_eig=n_eig, tol=tol, max_iter=max_iter)
    evecs = np.array([_fix_phase(x.astype(complex)) for x in evecs])
    return evals, evecs


def ground_state(spec: ModelSpec, tol: float = 1e-10, max_iter: int = 600):
    """Lowest eigenpair ``(energy, state)`` of H."""
    evals, evecs = low_spectrum(spec, 1, tol=tol, max_iter=max_iter)
    return float(evals[0]), evecs[0]


def dense_ground_state(spec: ModelSpec):
    """Exhaustive diagonalization; the oracle for the iterative solver."""
    if spec.L > DENSE_MAX_SITES:
        raise InvalidInputError(f"dense path limited to L <= {DENSE_MAX_SITES}")
    w, U = np.linalg.eigh(dense_hamiltonian(spec))
    return float(w[0]), _fix_phase(U[:, 0])


@dataclass(frozen=True)
class DoubletInfo:
    resolved: bool
    splitting: float  # E1 - E0
    gap: float  # E2 - E0
    bias_mixing: float  # |<0|X|1>| / L


def bias_operator(spec: ModelSpec, v: np.ndarray) -> np.ndarray:
    """sum_i s_i sx_i applied to v, with the bias sign pattern of ``spec``."""
    idx = np.arange(spec.dim)
    out = np.zeros_like(v)
    for i in range(spec.L):
        sign = (-1) ** i if spec.staggered_bias else 1
        out += sign * v[idx ^ (1 << i)]
    return out


def symmetry_broken_ground_state(spec: ModelSpec, tol: float = 1e-10, gap_ratio: float = 1 / 3, max_iter: int = 600):
    """Ground state with the bias acting inside a quasi-degenerate doublet.

    On short chains the tunnelling splitting E1 - E0 of the two ordered
    states dwarfs any tiny bias, so the lowest eigenvector is a cat state.
    When ``E1 - E0 < gap_ratio * (E2 - E0)`` and ``hx > 0`` the two lowest
    states are treated as one degenerate level and the bias operator is
    diagonalized inside it (first-order degenerate perturbation theory),
    which is what a long chain does with the same bias. Otherwise this is
    :func:`ground_state`. The default ratio 1/3 is the universal value of
    (E1 - E0)/(E2 - E0) at an Ising critical point with free ends, so the
    rule switches on the ordered side of the transition.

    Returns ``(energy, state, DoubletInfo)``; ``energy`` is <psi|H|psi>.
    """
    if spec.hx == 0 or spec.dim < 4:
        e, v = ground_state(spec, tol=tol, max_iter=max_iter)
        return e, v, DoubletInfo(False, np.nan, np.nan, 0.0)
    evals, evecs = low_spectrum(spec, 3, tol=tol, max_iter=max_iter)
    if len(evals) < 3:
        return float(evals[0]), evecs[0], DoubletInfo(False, np.nan, np.nan, 0.0)
    splitting, gap = evals[1] - evals[0], evals[2] - evals[0]
    P = evecs[:2]
    Xr = P.conj() @ np.array([bias_operator(spec, p) for p in P]).T
    mixing = abs(Xr[0, 1]) / spec.L
    if splitting >= gap_ratio * gap or mixing < 1e-8:
        return float(evals[0]), evecs[0], DoubletInfo(False, splitting, gap, mixing)
    _, c = np.linalg.eigh(Xr)
    psi = _fix_phase(c[:, -1] @ P)
    psi /= np.linalg.norm(psi)
    energy = float(np.real(np.vdot(psi, apply_hamiltonian(spec, psi))))
    return energy, psi, DoubletInfo(True, splitting, gap, mixing)


def apply_pauli(v: np.ndarray, site: int, axis: str) -> np.ndarray:
    """sigma^axis on ``site`` applied to v."""
    L = n_sites(v)
    if not 0 <= site < L:
        raise InvalidInputError(f"site {site} out of range for L={L}")
    if axis == "0":
        return v.copy()
    idx = np.arange(len(v))
    s = 1 - 2 * ((idx >> site) & 1)
    if axis == "z":
        return s * v
    if axis == "x":
        return v[idx ^ (1 << site)]
    if axis == "y":
        return -1j * s * v[idx ^ (1 << site)]
    raise InvalidInputError(f"unknown axis {axis!r}")


def expectation_sigma(v: np.ndarray, site: int, axis: str) -> float:
    """<v| sigma^axis_site |v>."""
    return float(np.real(np.vdot(v, apply_pauli(v, site, axis))))


def mid_chain_sites(L: int, r: int) -> tuple[int, int]:
    """Site pair (A, B) with separation r placed around the chain centre."""
    a = L // 2 - 1
    if r < 1 or a + r >= L:
        raise InvalidInputError(f"separation r={r} does not fit mid-chain for L={L}")
    return a, a + r
