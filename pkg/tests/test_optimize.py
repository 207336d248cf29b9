import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import bell_phi_plus, brute_force_cmax, classical_mixture, random_density_matrix
from optcorr.analysis import canonical_projective_angles, solve_point
from optcorr.errors import InvalidInputError
from optcorr.infotheory import BlochForm, mutual_information
from optcorr.optimize import (
    FAMILIES,
    OptResult,
    StrategySpec,
    local_operator_axis,
    optimize,
    optimize_all,
    strategy,
)
from optcorr.spinchain import model_spec

ALL = [strategy(f, (1.0, 0.25, 1.0) if f in ("CIC", "CIC_ROT", "CIC_3PAR") else None) for f in FAMILIES]


def polarized():
    rho = np.zeros((4, 4), dtype=complex)
    rho[0, 0] = 1
    return rho


@pytest.fixture(scope="module")
def ising_h2():
    return solve_point(model_spec("ising", 2.0, L=14)).pair_rdm(1)


@pytest.fixture(scope="module")
def xxz_h0():
    return solve_point(model_spec("xxz", 0.0, L=14)).pair_rdm(1)


# --- StrategySpec ------------------------------------------------------------------


@pytest.mark.parametrize(
    "args",
    [
        dict(family="PROJ_XY"),
        dict(family="CIC_ROT"),
        dict(family="CIC_3PAR", couplings=(0.0, 0.0, 0.0)),
        dict(family="PROJ_ROT", n_theta=7),
        dict(family="PROJ_ROT", n_phi=24),
        dict(family="SIC_ROT", tol=0.0),
    ],
)
def test_strategy_validation(args):
    with pytest.raises(InvalidInputError):
        StrategySpec(**args)


# --- textbook states ------------------------------------------------------------------


@pytest.mark.parametrize("spec", ALL, ids=lambda s: s.family)
def test_bell_state(spec):
    res = optimize(bell_phi_plus(), spec)
    assert abs(res.C_max - 1) < 1e-6
    if spec.family == "PROJ_ROT":
        assert res.flat_theta and res.flat_phi


def test_bell_all_families():
    out = optimize_all(bell_phi_plus(), ALL)
    assert list(out) == list(FAMILIES)
    assert all(abs(r.C_max - 1) < 1e-6 for r in out.values())


@pytest.mark.parametrize("spec", ALL, ids=lambda s: s.family)
def test_polarized_state_is_flat_zero(spec):
    res = optimize(polarized(), spec)
    assert abs(res.C_max) < 1e-12
    assert res.flat_theta and res.flat_phi


def test_classical_mixture_projective_optimum_along_z():
    res = optimize(classical_mixture(), strategy("PROJ_ROT"))
    assert abs(res.C_max - 1) < 1e-6
    assert len(res.optima) == 1
    theta, _ = canonical_projective_angles(res.best.theta, res.best.phi)
    assert min(theta, np.pi - theta) < 1e-4
    assert res.flat_phi and not res.flat_theta


# --- oracle equivalence -----------------------------------------------------------------


@pytest.mark.parametrize("seed", [0, 1, 2])
@pytest.mark.parametrize("family", ["PROJ_ROT", "SIC_ROT", "CIC_ROT", "CIC_3PAR"])
def test_matches_dense_brute_force(seed, family):
    r = np.random.default_rng(seed)
    rho = random_density_matrix(r, 4, rank=2)
    couplings = tuple(r.normal(size=3)) if family.startswith("CIC") else None
    res = optimize(rho, strategy(family, couplings))
    ref = brute_force_cmax(rho, family, couplings)
    assert res.C_max >= ref - 1e-12  # the refined optimum should not sit below the dense grid
    assert abs(res.C_max - ref) < 1e-5


@given(st.integers(0, 2**32 - 1), st.sampled_from(["PROJ_ROT", "SIC_ROT", "CIC_3PAR"]))
@settings(max_examples=15)
def test_refinement_is_monotone_and_bounded(seed, family):
    rho = random_density_matrix(np.random.default_rng(seed), 4)
    res = optimize(rho, strategy(family, (0.3, -1.0, 0.5) if family == "CIC_3PAR" else None))
    assert res.C_max >= res.grid_max - 1e-12
    assert -1e-8 <= res.C_max <= mutual_information(rho) + 1e-8
    for o in res.optima:
        assert abs(o.C - res.C_max) < 1e-8
    assert res.n_evals > 61 * 121


@given(st.integers(0, 2**32 - 1), st.floats(0, np.pi), st.floats(0, 2 * np.pi))
def test_projective_landscape_symmetry(seed, theta, phi):
    rho = random_density_matrix(np.random.default_rng(seed), 4)
    bf = BlochForm.from_rdm(rho)
    spec = strategy("PROJ_ROT")
    w = spec.base_measurement().weights
    a = bf.classical_correlations(w, spec.vectors_at(theta, phi))
    b = bf.classical_correlations(w, spec.vectors_at(np.pi - theta, phi + np.pi))
    assert abs(a - b) < 1e-12


def test_deterministic():
    rho = random_density_matrix(np.random.default_rng(5), 4)
    a = optimize(rho, strategy("SIC_ROT"))
    b = optimize(rho, strategy("SIC_ROT"))
    assert a.C_max == b.C_max
    assert [(o.theta, o.phi, o.C) for o in a.optima] == [(o.theta, o.phi, o.C) for o in b.optima]


def test_fixed_families_are_single_points():
    rho = random_density_matrix(np.random.default_rng(9), 4)
    for fam in ("PROJ_Z", "SIC", "CIC"):
        res = optimize(rho, strategy(fam, (1, 0.25, 1) if fam == "CIC" else None))
        assert isinstance(res, OptResult) and len(res.optima) == 1 and res.n_evals == 1
    # PROJ_Z is a member of PROJ_ROT
    assert optimize(rho, strategy("PROJ_ROT")).C_max >= optimize(rho, strategy("PROJ_Z")).C_max - 1e-12


# --- chain optima ----------------------------------------------------------------------------


def test_ising_disordered_projective_optimum(ising_h2):
    res = optimize(ising_h2, strategy("PROJ_ROT"))
    # (pi/2, 0) and (pi/2, pi) are the same projector pair: one reported optimum
    for o in res.optima:
        assert abs(o.theta - np.pi / 2) < 0.02
        assert min(abs(o.phi), abs(o.phi - np.pi), abs(o.phi - 2 * np.pi)) < 0.02
    axis = local_operator_axis(-1, 0, 0)
    assert abs(abs(res.best.direction @ axis) - 1) < 1e-3


def test_ising_disordered_cic3_direction(ising_h2):
    res = optimize(ising_h2, strategy("CIC_3PAR", (-1, 0, 0)))
    for o in res.optima:
        assert np.abs(np.abs(o.direction) - [1, 0, 0]).max() < 0.02


def test_xxz_projective_optimum_is_phi_flat(xxz_h0):
    res = optimize(xxz_h0, strategy("PROJ_ROT"))
    assert res.flat_phi and res.phi_variation < 1e-6
    assert abs(res.best.theta - np.pi / 2) < 0.02


def test_local_operator_axis():
    assert np.allclose(np.abs(local_operator_axis(-1, 0, 0)), [1, 0, 0])
    assert np.allclose(local_operator_axis(1, 1, 1), np.ones(3) / np.sqrt(3))
    with pytest.raises(InvalidInputError):
        local_operator_axis(0, 0, 0)
