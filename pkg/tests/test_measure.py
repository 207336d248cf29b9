import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import rotation_matrices
from optcorr.errors import InvalidInputError, UnsupportedMeasurementError
from optcorr.measure import (
    Measurement,
    Rank1State,
    cic_povm,
    projective,
    rank1_decomposition,
    rank1_ket,
    rotate,
    rotation_matrix,
    sic_povm,
)

angle_t = st.floats(0, np.pi)
angle_p = st.floats(0, 2 * np.pi)
coupling = st.floats(-3, 3, allow_nan=False)
nonzero_j = st.tuples(coupling, coupling, coupling).filter(lambda J: np.linalg.norm(J) > 1e-3)


def element_set(m):
    return sorted((round(c, 9), *np.round(a, 9)) for c, a in zip(m.weights, m.vectors))


def check_povm(m):
    ops = m.operators()
    assert np.abs(ops.sum(axis=0) - np.eye(2)).max() < 1e-12
    assert abs(m.weights.sum() - 1) < 1e-12
    assert np.linalg.norm(m.weights @ m.vectors) < 1e-12
    for B in ops:
        assert np.linalg.eigvalsh(B).min() > -1e-14
    assert m.is_rank1()


# --- projective ----------------------------------------------------------------


def test_projective_examples():
    m = projective(0, 0)
    assert np.allclose(m.operators(), [np.diag([1, 0]), np.diag([0, 1])], atol=1e-15)
    m = projective(np.pi / 2, 0)
    assert np.allclose(m.operators(), [0.5 * np.ones((2, 2)), 0.5 * np.array([[1, -1], [-1, 1]])], atol=1e-15)


@given(st.floats(-10, 10), st.floats(-10, 10))
def test_projective_is_complete(theta, phi):
    check_povm(projective(theta, phi))


# --- CIC / SIC -------------------------------------------------------------------


def test_sic_is_regular_tetrahedron():
    m = sic_povm()
    assert len(m) == 4 and np.all(m.weights == 0.25)
    G = m.vectors @ m.vectors.T
    assert np.allclose(G[~np.eye(4, dtype=bool)], -1 / 3, atol=1e-15)
    check_povm(m)
    assert element_set(m) == element_set(cic_povm(1, 1, 1))


def test_cic_ising_degenerates_to_x_projector():
    m = cic_povm(-1, 0, 0)
    assert np.allclose(m.vectors, [[-1, 0, 0], [-1, 0, 0], [1, 0, 0], [1, 0, 0]])
    # statistics of the duplicated elements equal those of projective(pi/2, pi)
    p = projective(np.pi / 2, np.pi)
    merged = m.operators()[[0, 2]] + m.operators()[[1, 3]]
    assert np.abs(merged - p.operators()).max() < 1e-15


def test_cic_zero_couplings():
    with pytest.raises(InvalidInputError):
        cic_povm(0, 0, 0)


@given(nonzero_j)
def test_cic_is_complete(J):
    m = cic_povm(*J)
    check_povm(m)
    assert np.linalg.norm(m.weights @ m.vectors) < 1e-15


@given(nonzero_j)
def test_cic_sign_symmetry(J):
    a = cic_povm(*J)
    b = cic_povm(J[0], -J[1], -J[2])
    reflected = a.vectors * np.array([1, -1, -1])
    assert element_set(b) == element_set(Measurement(a.weights, reflected, "CIC"))


def test_measurement_validation():
    with pytest.raises(InvalidInputError):
        Measurement(np.array([0.5, 0.5]), np.array([[0, 0, 1.0]]), "PROJ")
    with pytest.raises(InvalidInputError):
        Measurement(np.array([1.0]), np.array([[0, 0, 2.0]]), "PROJ")


# --- rotations ---------------------------------------------------------------------


@given(angle_t, angle_p)
def test_rotation_matches_scipy_euler(theta, phi):
    assert np.abs(rotation_matrix(theta, phi) - rotation_matrices(theta, phi)[0]).max() < 1e-14


def test_rotation_examples():
    assert np.abs(rotate(projective(0, 0), np.pi / 2, 0).vectors - projective(np.pi / 2, 0).vectors).max() < 1e-15
    m = sic_povm()
    assert np.abs(rotate(m, 0, 0).vectors - m.vectors).max() < 1e-15
    assert np.allclose(rotation_matrix(np.pi / 2, 0) @ [0, 0, 1], [1, 0, 0], atol=1e-15)


@given(nonzero_j, angle_t, angle_p)
def test_rotation_preserves_geometry(J, theta, phi):
    m = cic_povm(*J)
    r = rotate(m, theta, phi)
    assert np.abs(r.vectors @ r.vectors.T - m.vectors @ m.vectors.T).max() < 1e-12
    assert np.array_equal(r.weights, m.weights)
    check_povm(r)


@given(st.floats(-np.pi, np.pi), st.floats(-np.pi, np.pi))
def test_rotation_composes_in_xz_plane(t1, t2):
    m = projective(np.pi / 3, 0)  # vectors in the xz-plane
    a = rotate(rotate(m, t1, 0), t2, 0)
    assert np.abs(a.vectors - rotate(m, t1 + t2, 0).vectors).max() < 1e-12


def test_rotation_broadcasts():
    R = rotation_matrix(np.linspace(0, 1, 5)[:, None], np.linspace(0, 2, 7)[None, :])
    assert R.shape == (5, 7, 3, 3)
    assert np.abs(R[2, 3] - rotation_matrix(0.5, 1.0)).max() < 1e-15


# --- rank-1 decomposition --------------------------------------------------------------


def test_rank1_examples():
    states = rank1_decomposition(projective(0, 0))
    assert states == [Rank1State(0.0, 0.0, 0.5), Rank1State(np.pi, 0.0, 0.5)]
    angles = rank1_decomposition(cic_povm(-1, 0, 0))
    assert all(abs(s.theta - np.pi / 2) < 1e-12 for s in angles)
    assert sorted({round(s.phi, 12) for s in angles}) == [0.0, round(np.pi, 12)]


def test_rank1_sic_states():
    states = rank1_decomposition(sic_povm())
    kets = np.array([rank1_ket(s) for s in states])
    # |<a|b>|^2 = (1 + a.b)/2 = 1/3 for tetrahedral directions
    overlaps = np.abs(kets.conj() @ kets.T) ** 2
    assert np.allclose(overlaps[~np.eye(4, dtype=bool)], 1 / 3, atol=1e-12)
    for s in states:
        assert 0 <= s.theta <= np.pi and 0 <= s.phi < 2 * np.pi


@given(nonzero_j, angle_t, angle_p)
def test_rank1_kets_reproduce_elements(J, theta, phi):
    m = rotate(cic_povm(*J), theta, phi)
    for B, s in zip(m.operators(), rank1_decomposition(m)):
        k = rank1_ket(s)
        assert np.abs(2 * s.weight * np.outer(k, k.conj()) - B).max() < 1e-12


def test_rank1_rejects_mixed_elements():
    m = Measurement(np.array([0.5, 0.5]), np.array([[0, 0, 0.5], [0, 0, -0.5]]), "PROJ")
    with pytest.raises(UnsupportedMeasurementError):
        rank1_decomposition(m)


def test_equivalence_and_serialization():
    a = projective(0.3, 0.4)
    b = projective(np.pi - 0.3, 0.4 + np.pi)
    assert a.equivalent(b) and not a.equivalent(projective(0.31, 0.4))
    d = sic_povm().to_dict()
    assert d["family"] == "SIC" and len(d["elements"]) == 4
    assert d["elements"][0]["c"] == 0.25
