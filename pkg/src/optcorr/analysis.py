"""Field sweeps and physics-level diagnostics built on the solver stack."""
from __future__ import annotations

import math
import os
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize_scalar

from .errors import FitUnderdeterminedError, InvalidInputError, NoFactorizationError
from .infotheory import CorrelationValues, correlation_values, mutual_information
from .optimize import OptResult, StrategySpec, optimize, strategy
from .rdm import two_site_rdm
from .spinchain import ModelSpec, expectation_sigma, mid_chain_sites, symmetry_broken_ground_state

STRATEGY_NAMES = {
    "proj-z": "PROJ_Z",
    "proj-rot": "PROJ_ROT",
    "sic": "SIC",
    "sic-rot": "SIC_ROT",
    "cic": "CIC",
    "cic-rot": "CIC_ROT",
    "cic-3par": "CIC_3PAR",
}
SPREAD_STRATEGIES = ("proj-rot", "sic-rot", "cic-rot", "cic-3par")


def strategies_for(spec: ModelSpec, names, n_theta: int = 61, n_phi: int = 121) -> list[StrategySpec]:
    """StrategySpecs for CLI-style names, seeding CIC families with the model couplings."""
    out = []
    for name in names:
        try:
            family = STRATEGY_NAMES[name]
        except KeyError:
            raise InvalidInputError(f"unknown strategy {name!r}; choose from {sorted(STRATEGY_NAMES)}") from None
        out.append(strategy(family, (spec.Jx, spec.Jy, spec.Jz), n_theta=n_theta, n_phi=n_phi))
    return out


# --- closed forms -----------------------------------------------------------


def factorization_field(Jy: float, Jz: float) -> float:
    """2 sqrt((1 - Jz)(Jy - Jz)), couplings in units where Jx = 1 (ferromagnetic frame)."""
    rad = (1 - Jz) * (Jy - Jz)
    if rad < 0:
        raise NoFactorizationError(f"radicand (1 - Jz)(Jy - Jz) = {rad} is negative")
    return 2 * math.sqrt(rad)


def ferromagnetic_frame(Jx: float, Jy: float, Jz: float) -> tuple[float, float, float]:
    """Couplings of -(Jx' sx sx + Jy' sy sy + Jz' sz sz) equivalent to the chain's +J form.

    Rotating every other spin by pi about z flips the signs of Jx and Jy and
    leaves the z field alone, so Jx' > 0 can always be arranged.
    """
    if Jx == 0:
        raise InvalidInputError("ferromagnetic frame needs Jx != 0")
    if Jx < 0:
        return -Jx, -Jy, -Jz
    return Jx, Jy, -Jz


def factorization_field_for_couplings(Jx: float, Jy: float, Jz: float) -> float:
    """Factorizing field of the chain with couplings given in its own (+J) convention."""
    fx, fy, fz = ferromagnetic_frame(Jx, Jy, Jz)
    return abs(fx) * factorization_field(fy / fx, fz / fx)


def ising_order_parameter_exact(h: float) -> float:
    """|1 - h^2|^(1/8) in the ordered phase h < 1, zero beyond."""
    if h < 0:
        raise InvalidInputError("h must be >= 0")
    return abs(1 - h * h) ** 0.125 if h < 1 else 0.0


# --- mid-chain pair data ----------------------------------------------------


@dataclass(frozen=True)
class ChainPoint:
    spec: ModelSpec
    energy: float
    state: np.ndarray
    doublet_resolved: bool

    def pair_rdm(self, r: int) -> np.ndarray:
        a, b = mid_chain_sites(self.spec.L, r)
        return two_site_rdm(self.state, a, b)

    def sigma_mid(self, axis: str) -> float:
        return expectation_sigma(self.state, self.spec.L // 2 - 1, axis)


def solve_point(spec: ModelSpec) -> ChainPoint:
    e, v, info = symmetry_broken_ground_state(spec)
    return ChainPoint(spec, e, v, info.resolved)


def pair_mutual_information(spec: ModelSpec, r: int = 1) -> float:
    return mutual_information(solve_point(spec).pair_rdm(r))


# --- factorization detection ------------------------------------------------


@dataclass(frozen=True)
class FactorizationResult:
    h_min: float
    I_min: float
    at_endpoint: bool
    n_evals: int


def golden_section_minimize(f, lo: float, hi: float, tol: float = 1e-4):
    """Minimize f on [lo, hi] until the bracket is shorter than ``tol``.

    Returns (x_min, f_min, n_evals, evaluated points).
    """
    invphi = (math.sqrt(5) - 1) / 2
    a, b = lo, hi
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = f(c), f(d)
    seen = {c: fc, d: fd}
    while b - a >= tol:
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = f(c)
            seen[c] = fc
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = f(d)
            seen[d] = fd
    x, fx = min(seen.items(), key=lambda kv: kv[1])
    return x, fx, len(seen), seen


def detect_factorization(spec: ModelSpec, h_lo: float, h_hi: float, r: int = 1, tol: float = 1e-4) -> FactorizationResult:
    """Field in [h_lo, h_hi] minimizing the mid-chain mutual information."""
    if not h_lo < h_hi:
        raise InvalidInputError("need h_lo < h_hi")
    f = lambda h: pair_mutual_information(spec.with_field(h), r)
    h, i_min, n, _ = golden_section_minimize(f, h_lo, h_hi, tol)
    at_endpoint = min(h - h_lo, h_hi - h) < 2 * tol
    if at_endpoint:
        warnings.warn(
            f"mutual information minimum at h={h:.6g} sits on the bracket edge [{h_lo}, {h_hi}]",
            RuntimeWarning,
            stacklevel=2,
        )
    return FactorizationResult(h, i_min, at_endpoint, n)


# --- theta_opt fit ----------------------------------------------------------


@dataclass(frozen=True)
class FitResult:
    A: float
    B: float
    k: float
    n: int
    residual: float

    def __call__(self, m):
        return self.A * np.sqrt(self.B - np.asarray(m) ** self.n) + self.k


def _linear_fit(s: np.ndarray, y: np.ndarray):
    X = np.column_stack([s, np.ones_like(s)])
    (A, k), *_ = np.linalg.lstsq(X, y, rcond=None)
    return A, k, float(np.sum((X @ (A, k) - y) ** 2))


def fit_theta_opt(points, n: int = 8) -> FitResult:
    """Least-squares fit of theta = A sqrt(B - m^n) + k.

    The model is linear in (A, k) at fixed B, so B is scanned on a log grid
    above max(m^n) and then polished with a bounded scalar minimizer.
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2 or len(pts) < 4:
        raise InvalidInputError("need at least 4 (m, theta) points")
    m, y = pts[:, 0], pts[:, 1]
    if np.any(m < 0) or np.any(m > 1):
        raise InvalidInputError("order parameter values must lie in [0, 1]")
    u = m**n
    if np.ptp(u) < 1e-14:
        raise FitUnderdeterminedError("all m^n are equal; A and k cannot be separated")
    u_max = u.max()
    sse = lambda B: _linear_fit(np.sqrt(np.maximum(B - u, 0.0)), y)[2]

    offsets = np.concatenate([[0.0], np.logspace(-12, 1, 600)])
    grid = u_max + offsets
    vals = np.array([sse(B) for B in grid])
    i = int(np.argmin(vals))
    lo, hi = grid[max(i - 1, 0)], grid[min(i + 1, len(grid) - 1)]
    if hi > lo:
        res = minimize_scalar(sse, bounds=(lo, hi), method="bounded", options={"xatol": 1e-10 * max(hi, 1e-3)})
        B = float(res.x) if res.fun <= vals[i] else float(grid[i])
    else:
        B = float(grid[i])
    A, k, s = _linear_fit(np.sqrt(np.maximum(B - u, 0.0)), y)
    return FitResult(float(A), B, float(k), n, math.sqrt(s / len(y)))


def canonical_projective_angles(theta: float, phi: float) -> tuple[float, float]:
    """Representative of the antipodal pair {(theta, phi), (pi - theta, phi + pi)} with phi near 0."""
    if math.pi / 2 < phi % (2 * math.pi) < 3 * math.pi / 2:
        return math.pi - theta, (phi - math.pi) % (2 * math.pi)
    return theta, phi


# --- strategy spread --------------------------------------------------------


def strategy_spread(rho_ab: np.ndarray, strategies) -> float:
    """Sum of squared deviations of the optimized C over the strategies."""
    strategies = list(strategies)
    if len(strategies) < 2:
        raise InvalidInputError("spread needs at least two strategies")
    c = np.array([optimize(rho_ab, s).C_max for s in strategies])
    return float(np.sum((c - c.mean()) ** 2))


# --- sweeps -----------------------------------------------------------------


@dataclass
class SweepRow:
    model: str
    L: int
    h: float
    hx: float
    r: int
    strategy: str
    S_A: float = np.nan
    S_B: float = np.nan
    S_AB: float = np.nan
    I: float = np.nan
    S_C: float = np.nan
    C: float = np.nan
    Q: float = np.nan
    C_max: float = np.nan
    theta_opt: float = np.nan
    phi_opt: float = np.nan
    n_optima: int = 0
    flat_theta: bool = False
    flat_phi: bool = False
    sx_mid: float = np.nan
    sz_mid: float = np.nan
    optima: list = field(default_factory=list, repr=False)
    error: str | None = None

    @classmethod
    def build(cls, model, spec, r, name, values: CorrelationValues, opt: OptResult, point: ChainPoint):
        best = opt.best
        return cls(
            model, spec.L, spec.h, spec.hx, r, name,
            values.S_A, values.S_B, values.S_AB, values.I, values.S_C, values.C, values.Q,
            opt.C_max, best.theta, best.phi, len(opt.optima), opt.flat_theta, opt.flat_phi,
            point.sigma_mid("x"), point.sigma_mid("z"),
            optima=[{"theta": o.theta, "phi": o.phi, "C": o.C, "measurement": o.measurement.to_dict()} for o in opt.optima],
        )


def _rows_for_field(model, spec, r_list, names, n_theta, n_phi) -> list[SweepRow]:
    try:
        point = solve_point(spec)
    except Exception as exc:  # noqa: BLE001 - recorded in-row, sweep continues
        return [SweepRow(model, spec.L, spec.h, spec.hx, r, n, error=f"{type(exc).__name__}: {exc}") for r in r_list for n in names]
    rows = []
    strategies = strategies_for(spec, names, n_theta, n_phi)
    for r in r_list:
        try:
            rho = point.pair_rdm(r)
        except Exception as exc:  # noqa: BLE001
            rows += [SweepRow(model, spec.L, spec.h, spec.hx, r, n, error=f"{type(exc).__name__}: {exc}") for n in names]
            continue
        for name, strat in zip(names, strategies):
            try:
                opt = optimize(rho, strat)
                # row values at the reported optimum; C_max comes from the Bloch-form route
                values = correlation_values(rho, opt.best.measurement)
                rows.append(SweepRow.build(model, spec, r, name, values, opt, point))
            except Exception as exc:  # noqa: BLE001
                rows.append(SweepRow(model, spec.L, spec.h, spec.hx, r, name, error=f"{type(exc).__name__}: {exc}"))
    return rows


def worker_count(default: int = 1) -> int:
    try:
        return max(1, int(os.environ.get("OPTCORR_THREADS", default)))
    except ValueError:
        return default


def sweep(spec: ModelSpec, h_values, r_list=(1,), strategies=("proj-z",), model: str = "custom",
          n_theta: int = 61, n_phi: int = 121, workers: int | None = None) -> list[SweepRow]:
    """One row per (h, r, strategy); rows ordered h, then r, then strategy."""
    names = list(strategies)
    strategies_for(spec, names, n_theta, n_phi)  # validate names before any heavy work
    if len(h_values) == 0 or len(r_list) == 0:
        raise InvalidInputError("empty field grid or separation list")
    if min(r_list) < 1:
        raise InvalidInputError("separations must be >= 1")
    specs = [spec.with_field(h) for h in h_values]
    job = lambda s: _rows_for_field(model, s, list(r_list), names, n_theta, n_phi)
    workers = workers or worker_count()
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            chunks = list(pool.map(job, specs))
    else:
        chunks = [job(s) for s in specs]
    return [row for chunk in chunks for row in chunk]


def fit_points_from_rows(rows, h_c: float | None = None, window: float = 0.0):
    """(|<sx>|, theta_opt) pairs from PROJ_ROT rows, dropping |h - h_c| <= window."""
    pts = []
    for row in rows:
        if row.error is not None or (h_c is not None and abs(row.h - h_c) <= window):
            continue
        theta, _ = canonical_projective_angles(row.theta_opt, row.phi_opt)
        pts.append((abs(row.sx_mid), theta))
    return pts
