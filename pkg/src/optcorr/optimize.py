"""Maximization of classical correlations over measurement families.

Rotated families (PROJ_ROT, SIC_ROT, CIC_ROT) are parameterized by the
angles (theta, phi) of the rigid rotation Rz(phi) Ry(theta). CIC_3PAR is
parameterized by the unit coupling direction n(theta, phi) fed into the
CIC construction. PROJ_Z, SIC and CIC are fixed measurements.

Search: full grid scan, then bounded Nelder-Mead from the grid's top local
maxima, then deduplication of equivalent optima.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from .errors import InvalidInputError, InvalidStateError
from .infotheory import BlochForm
from .measure import (
    Measurement,
    bloch_vector,
    cic_povm,
    projective,
    rotate,
    rotation_matrix,
    sic_povm,
)

ROTATED = ("PROJ_ROT", "SIC_ROT", "CIC_ROT")
FIXED = ("PROJ_Z", "SIC", "CIC")
FAMILIES = FIXED + ROTATED + ("CIC_3PAR",)
NEEDS_COUPLINGS = ("CIC", "CIC_ROT", "CIC_3PAR")

SEED_WINDOW = 1e-6
FLAT_TOL = 1e-8
DEDUP_TOL = 1e-4
OPTIMUM_TOL = 1e-8

_CIC_SIGNS = np.array([[1, 1, 1], [1, -1, -1], [-1, 1, -1], [-1, -1, 1]])


@dataclass(frozen=True)
class StrategySpec:
    family: str
    couplings: tuple[float, float, float] | None = None
    n_theta: int = 61
    n_phi: int = 121
    tol: float = 1e-8
    max_seeds: int = 12

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise InvalidInputError(f"unknown family {self.family!r}; choose from {FAMILIES}")
        if self.family in NEEDS_COUPLINGS:
            if self.couplings is None or not np.any(np.asarray(self.couplings, dtype=float)):
                raise InvalidInputError(f"{self.family} needs a nonzero coupling seed")
        if self.n_theta < 13 or self.n_phi < 25:
            raise InvalidInputError("grids need n_theta >= 13 and n_phi >= 25")
        if self.tol <= 0:
            raise InvalidInputError("refinement tolerance must be positive")

    @property
    def is_fixed(self) -> bool:
        return self.family in FIXED

    def base_measurement(self) -> Measurement:
        if self.family in ("PROJ_Z", "PROJ_ROT"):
            return projective(0.0, 0.0)
        if self.family in ("SIC", "SIC_ROT"):
            return sic_povm()
        return cic_povm(*self.couplings)

    def measurement_at(self, theta: float, phi: float) -> Measurement:
        if self.is_fixed:
            return self.base_measurement()
        if self.family == "CIC_3PAR":
            n = bloch_vector(theta, phi)
            m = cic_povm(*n)
            return Measurement(m.weights, m.vectors, "CIC3", {**m.params, "theta": theta, "phi": phi})
        return rotate(self.base_measurement(), theta, phi)

    def vectors_at(self, theta, phi) -> np.ndarray:
        """Bloch vectors for array-valued angles, shape (..., K, 3)."""
        if self.family == "CIC_3PAR":
            theta, phi = np.broadcast_arrays(np.asarray(theta, dtype=float), np.asarray(phi, dtype=float))
            n = np.stack([np.sin(theta) * np.cos(phi), np.sin(theta) * np.sin(phi), np.cos(theta)], axis=-1)
            return _CIC_SIGNS * n[..., None, :]
        R = rotation_matrix(theta, phi)
        return np.einsum("...ij,kj->...ki", R, self.base_measurement().vectors)


def strategy(family: str, couplings=None, **kw) -> StrategySpec:
    return StrategySpec(family, None if couplings is None else tuple(float(c) for c in couplings), **kw)


@dataclass(frozen=True)
class OptPoint:
    theta: float
    phi: float
    C: float
    measurement: Measurement

    @property
    def direction(self) -> np.ndarray:
        """Bloch direction (rotated z-axis, or coupling direction for CIC_3PAR)."""
        return bloch_vector(self.theta, self.phi)


@dataclass(frozen=True)
class OptResult:
    family: str
    C_max: float
    optima: list[OptPoint]
    flat_theta: bool
    flat_phi: bool
    theta_variation: float
    phi_variation: float
    n_evals: int
    grid_max: float = field(default=np.nan)

    @property
    def best(self) -> OptPoint:
        return self.optima[0]


def _wrap(theta: float, phi: float) -> tuple[float, float]:
    phi = float(phi % (2 * np.pi))
    if 2 * np.pi - phi < 1e-6:
        phi = 0.0
    return float(np.clip(theta, 0.0, np.pi)), phi


def _param_distance(p, q) -> float:
    dphi = abs(p[1] - q[1]) % (2 * np.pi)
    return max(abs(p[0] - q[0]), min(dphi, 2 * np.pi - dphi))


def _grid_seeds(G: np.ndarray, thetas, phis, window: float, max_seeds: int):
    """Top local maxima of the (theta, periodic phi) grid, spread apart."""
    g = G[:, :-1]  # last phi column repeats phi = 0
    gmax = g.max()
    pad = np.pad(g, ((1, 1), (0, 0)), constant_values=-np.inf)
    is_peak = np.ones_like(g, dtype=bool)
    for di in (-1, 0, 1):
        for dj in (-1, 0, 1):
            if di or dj:
                shifted = np.roll(pad, (-di, -dj), axis=(0, 1))[1:-1]
                is_peak &= g >= shifted
    cand = np.argwhere(is_peak & (g >= gmax - window))
    order = sorted(cand.tolist(), key=lambda ij: (-round(g[ij[0], ij[1]], 12), ij[0], ij[1]))
    min_sep = 2.0 * max(thetas[1] - thetas[0], phis[1] - phis[0])
    seeds = []
    for i, j in order:
        p = (thetas[i], phis[j])
        if all(_param_distance(p, q) > min_sep for q in seeds):
            seeds.append(p)
        if len(seeds) == max_seeds:
            break
    return seeds


def optimize(rho_ab: np.ndarray, spec: StrategySpec) -> OptResult:
    """Maximize S(rho_A) - S_C over the family described by ``spec``."""
    bf = BlochForm.from_rdm(rho_ab)
    weights = spec.base_measurement().weights

    if spec.is_fixed:
        m = spec.base_measurement()
        c = float(bf.classical_correlations(weights, m.vectors))
        return OptResult(spec.family, c, [OptPoint(0.0, 0.0, c, m)], True, True, 0.0, 0.0, 1, c)

    thetas = np.linspace(0.0, np.pi, spec.n_theta)
    phis = np.linspace(0.0, 2 * np.pi, spec.n_phi)
    G = bf.classical_correlations(weights, spec.vectors_at(thetas[:, None], phis[None, :]))
    n_evals = G.size
    gmax = float(G.max())

    def value(theta, phi) -> float:
        return float(bf.classical_correlations(weights, spec.vectors_at(theta, phi)))

    if gmax - G.min() < FLAT_TOL:
        i, j = np.unravel_index(np.argmax(G), G.shape)
        points = [(float(thetas[i]), float(phis[j]), float(G[i, j]))]
    else:
        step = 0.5 * min(thetas[1] - thetas[0], phis[1] - phis[0])
        points = []
        for t0, p0 in _grid_seeds(G, thetas, phis, SEED_WINDOW, spec.max_seeds):
            res = minimize(
                lambda x: -value(np.clip(x[0], 0.0, np.pi), x[1]),
                np.array([t0, p0]),
                method="Nelder-Mead",
                options={
                    "xatol": spec.tol,
                    "fatol": 1e-15,
                    "maxiter": 4000,
                    "initial_simplex": np.array([[t0, p0], [t0 + step, p0], [t0, p0 + step]]),
                },
            )
            n_evals += res.nfev + 1
            t, p = _wrap(*res.x)
            points.append((t, p, value(t, p)))

    c_max = max(c for _, _, c in points)
    points.sort(key=lambda x: (-round(x[2], 10), x[0], x[1]))
    kept: list[OptPoint] = []
    for t, p, c in points:
        if c < c_max - OPTIMUM_TOL:
            continue
        m = spec.measurement_at(t, p)
        if any(_param_distance((t, p), (q.theta, q.phi)) < DEDUP_TOL or m.equivalent(q.measurement, DEDUP_TOL) for q in kept):
            continue
        kept.append(OptPoint(t, p, c, m))

    best = kept[0]
    theta_line = bf.classical_correlations(weights, spec.vectors_at(thetas, best.phi))
    phi_line = bf.classical_correlations(weights, spec.vectors_at(best.theta, phis))
    n_evals += thetas.size + phis.size
    theta_var = float(theta_line.max() - theta_line.min())
    phi_var = float(phi_line.max() - phi_line.min())
    flat_theta, flat_phi = theta_var < FLAT_TOL, phi_var < FLAT_TOL
    if flat_theta or flat_phi:
        # a continuum of optima: report one representative per non-flat
        # coordinate, with the flat coordinate pinned to 0
        collapsed: list[OptPoint] = []
        for q in kept:
            t = 0.0 if flat_theta else q.theta
            p = 0.0 if flat_phi else q.phi
            if any(_param_distance((t, p), (o.theta, o.phi)) < DEDUP_TOL for o in collapsed):
                continue
            collapsed.append(OptPoint(t, p, value(t, p), spec.measurement_at(t, p)))
        kept = collapsed

    if c_max < -1e-10:
        raise InvalidStateError(f"optimized correlations are negative ({c_max:.3e})")
    return OptResult(spec.family, c_max, kept, flat_theta, flat_phi, theta_var, phi_var, n_evals, gmax)


def optimize_all(rho_ab: np.ndarray, strategies) -> dict[str, OptResult]:
    """Run :func:`optimize` for each strategy, keyed by family, in input order."""
    return {s.family: optimize(rho_ab, s) for s in strategies}


def local_operator_axis(Jx: float, Jy: float, Jz: float) -> np.ndarray:
    """Unit axis of Jx sx + Jy sy + Jz sz; its eigenvectors are +- this direction."""
    J = np.array([Jx, Jy, Jz], dtype=float)
    n = np.linalg.norm(J)
    if n == 0:
        raise InvalidInputError("local operator axis undefined for zero couplings")
    return J / n
