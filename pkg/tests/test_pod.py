import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from regrom.exceptions import RankDeficiencyError, UndefinedEnergyError
from regrom.fem1d import assemble_fem_system, build_uniform_mesh
from regrom.pod import (PodBasis, SnapshotSet, center_snapshots, compute_pod,
                        energy_fractions, lift, pod_from_snapshots, project)


@pytest.fixture
def sys20():
    return assemble_fem_system(build_uniform_mesh(20))


def _interior_random(rng, n, k):
    X = rng.standard_normal((n, k))
    X[[0, -1]] = 0.0
    return X


def test_center_identical_columns():
    v = np.array([1.0, 2.0, 3.0])
    centering, centered = center_snapshots(SnapshotSet(np.tile(v, (4, 1)).T,
                                                       np.arange(4.0)))
    assert np.array_equal(centering, v)
    assert np.array_equal(centered.matrix, np.zeros((3, 4)))


def test_center_two_columns():
    a, b = np.array([1.0, 5.0]), np.array([3.0, -1.0])
    centering, centered = center_snapshots(SnapshotSet(np.column_stack([a, b]),
                                                       [0.0, 1.0]))
    assert np.allclose(centering, (a + b) / 2)
    assert np.allclose(centered.matrix[:, 0], (a - b) / 2)
    assert np.allclose(centered.matrix[:, 1], (b - a) / 2)


def test_centered_columns_sum_to_zero(rng):
    X = rng.standard_normal((30, 5))
    _, centered = center_snapshots(SnapshotSet(X, np.arange(5.0)))
    assert np.linalg.norm(centered.matrix.sum(axis=1)) <= 1e-12


def test_snapshot_set_needs_two_columns():
    with pytest.raises(ValueError):
        SnapshotSet(np.ones((3, 1)), [0.0])


def test_rank_one(sys20, rng):
    v = _interior_random(rng, 21, 1)[:, 0]
    X = np.column_stack([v, -2 * v, 0.5 * v])
    basis = compute_pod(SnapshotSet(X, np.arange(3.0)), sys20.mass, 1)
    expected = v / np.sqrt(v @ (sys20.mass @ v))
    assert np.allclose(np.abs(basis.modes[:, 0]), np.abs(expected),
                       atol=1e-12)
    with pytest.raises(RankDeficiencyError) as info:
        compute_pod(SnapshotSet(X, np.arange(3.0)), sys20.mass, 2)
    assert info.value.rank == 1


def test_two_mass_orthogonal_columns(sys20):
    # disjoint supports are mass-orthogonal
    a = np.zeros(21)
    a[2:5] = [1.0, 2.0, 1.0]
    b = np.zeros(21)
    b[12:15] = [1.0, -1.0, 3.0]
    b *= 0.5  # smaller norm
    M = sys20.mass
    assert abs(a @ (M @ b)) < 1e-15
    basis = compute_pod(SnapshotSet(np.column_stack([b, a]), [0.0, 1.0]),
                        M, 2)
    # Gram = diag(|b|^2, |a|^2)/2 -> larger-norm column first
    na, nb = np.sqrt(a @ M @ a), np.sqrt(b @ M @ b)
    assert na > nb
    assert np.allclose(basis.eigenvalues, [na ** 2 / 2, nb ** 2 / 2])
    assert np.allclose(basis.modes[:, 0], a / na, atol=1e-12)
    assert np.allclose(np.abs(basis.modes[:, 1]), np.abs(b / nb), atol=1e-12)


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2 ** 32 - 1), k=st.integers(3, 12))
def test_modes_are_mass_orthonormal(seed, k):
    rng = np.random.default_rng(seed)
    sys = assemble_fem_system(build_uniform_mesh(20))
    X = _interior_random(rng, 21, k)
    r = int(rng.integers(1, k + 1))
    basis = compute_pod(SnapshotSet(X, np.arange(float(k))), sys.mass, r)
    gram = basis.modes.T @ (sys.mass @ basis.modes)
    assert np.max(np.abs(gram - np.eye(r))) <= 1e-10
    assert np.all(np.diff(basis.eigenvalues) <= 1e-12)
    assert np.all(basis.eigenvalues >= 0)


def test_sign_convention(sys20, rng):
    X = _interior_random(rng, 21, 6)
    basis = compute_pod(SnapshotSet(X, np.arange(6.0)), sys20.mass, 4)
    idx = np.argmax(np.abs(basis.modes), axis=0)
    assert np.all(basis.modes[idx, np.arange(4)] > 0)


def test_reconstruction_error_nonincreasing(sys20, rng):
    X = _interior_random(rng, 21, 8)
    snaps = SnapshotSet(X, np.arange(8.0))
    _, centered = center_snapshots(snaps)
    errs = []
    for r in range(1, 8):
        basis = compute_pod(centered, sys20.mass, r)
        E = centered.matrix - basis.modes @ (basis.modes.T @ (sys20.mass @ centered.matrix))
        errs.append(np.einsum("ij,ij->", E, sys20.mass @ E))
    assert np.all(np.diff(errs) <= 1e-12)


def test_scaled_orthonormal_columns_are_recovered(sys20, rng):
    # mass-orthonormal columns via Cholesky-based whitening
    X = _interior_random(rng, 21, 3)
    inner = slice(1, -1)
    M = sys20.mass.toarray()
    L = np.linalg.cholesky(M[inner, inner])
    Q, _ = np.linalg.qr(rng.standard_normal((19, 3)))
    W = np.zeros((21, 3))
    W[inner] = np.linalg.solve(L.T, Q)
    assert np.allclose(W.T @ M @ W, np.eye(3), atol=1e-12)
    scales = np.array([1.0, 5.0, 2.5])
    basis = compute_pod(SnapshotSet(W * scales, np.arange(3.0)), sys20.mass, 3)
    for j, col in enumerate([1, 2, 0]):
        assert np.allclose(np.abs(basis.modes[:, j]), np.abs(W[:, col]),
                           atol=1e-10)


def test_energy_fractions():
    assert np.allclose(energy_fractions([3.0, 1.0]), [0.75, 1.0])
    assert np.allclose(energy_fractions([2.0]), [1.0])
    with pytest.raises(UndefinedEnergyError):
        energy_fractions([0.0, 0.0])


@given(st.lists(st.floats(0, 1e6), min_size=1, max_size=40).filter(
    lambda v: sum(v) > 0))
def test_energy_fractions_monotone(values):
    lam = np.sort(values)[::-1]
    f = energy_fractions(lam)
    assert np.all(np.diff(f) >= 0)
    assert abs(f[-1] - 1.0) <= 1e-14


def test_lift_and_project_round_trip(sys20, rng):
    X = _interior_random(rng, 21, 6)
    basis = pod_from_snapshots(SnapshotSet(X, np.arange(6.0)), sys20.mass, 4)
    assert np.allclose(lift(basis, np.zeros(4)), basis.centering)
    assert np.allclose(lift(basis, np.eye(4)[1]),
                       basis.centering + basis.modes[:, 1])
    c = rng.standard_normal(4)
    assert np.allclose(project(basis, lift(basis, c), sys20.mass), c,
                       atol=1e-12)
    assert np.allclose(project(basis, basis.centering, sys20.mass), 0.0,
                       atol=1e-14)
    assert np.allclose(project(basis, basis.centering + basis.modes[:, 0],
                               sys20.mass), np.eye(4)[0], atol=1e-12)
    with pytest.raises(ValueError):
        lift(basis, np.zeros(3))
    with pytest.raises(ValueError):
        project(basis, np.zeros(5), sys20.mass)


def test_project_matches_dense_pairing(sys20, rng):
    X = _interior_random(rng, 21, 5)
    basis = pod_from_snapshots(SnapshotSet(X, np.arange(5.0)), sys20.mass, 3)
    u0 = rng.standard_normal(21)
    M = sys20.mass.toarray()
    expected = [sum(basis.modes[a, i] * M[a, b] * (u0 - basis.centering)[b]
                    for a in range(21) for b in range(21)) for i in range(3)]
    assert np.allclose(project(basis, u0, sys20.mass), expected, atol=1e-12)


def test_truncate():
    basis = PodBasis(np.zeros(3), np.eye(3), np.array([3.0, 2.0, 1.0]))
    assert basis.truncate(2).r == 2
    with pytest.raises(ValueError):
        basis.truncate(4)
