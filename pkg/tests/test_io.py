import numpy as np
import pytest
import scipy.sparse as sp
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from regrom.exceptions import MatrixFileError
from regrom.io import (atomic_write, load_basis, load_operators, read_coo,
                       read_matrix, read_series, read_vector, save_basis,
                       save_operators, write_coo, write_matrix, write_series)
from regrom.pod import PodBasis

from conftest import random_ops

finite = st.floats(allow_nan=False, allow_infinity=False)


@settings(max_examples=100, deadline=None)
@given(arrays(np.float64, st.tuples(st.integers(1, 5), st.integers(1, 5)),
              elements=finite))
def test_matrix_round_trip_is_bit_exact(tmp_path_factory, a):
    p = tmp_path_factory.mktemp("m") / "a.txt"
    write_matrix(p, a)
    b = read_matrix(p)
    assert b.shape == a.shape
    assert a.tobytes() == b.tobytes()


def test_tensor_and_vector_files(tmp_path, rng):
    T = rng.standard_normal((2, 3, 4))
    write_matrix(tmp_path / "t.txt", T)
    assert (tmp_path / "t.txt").read_text().splitlines()[0] == "2 3 4"
    assert np.array_equal(read_matrix(tmp_path / "t.txt"), T)
    v = rng.standard_normal(5)
    write_matrix(tmp_path / "v.txt", v)
    assert np.array_equal(read_vector(tmp_path / "v.txt"), v)
    with pytest.raises(MatrixFileError):
        read_vector(tmp_path / "t.txt")


@pytest.mark.parametrize("text", ["2 x\n1 2\n3 4\n", "2 2\n1 2 3\n",
                                  "2 2\n1 2\n3 nan\n", "5\n1\n",
                                  "2 2\n1 2\n3 q\n"])
def test_malformed_dense_files(tmp_path, text):
    (tmp_path / "bad.txt").write_text(text)
    with pytest.raises(MatrixFileError):
        read_matrix(tmp_path / "bad.txt")


def test_coo_round_trip_and_indexing(tmp_path, rng):
    A = sp.random(6, 6, density=0.4, random_state=1, format="csr")
    write_coo(tmp_path / "a.mtx", A)
    B = read_coo(tmp_path / "a.mtx")
    assert (A != B).nnz == 0
    (tmp_path / "one.mtx").write_text("% a comment\n2 2 1\n1 2 5.0\n")
    assert read_coo(tmp_path / "one.mtx").toarray().tolist() == \
        [[0.0, 5.0], [0.0, 0.0]]


def test_coo_symmetric_banner(tmp_path):
    (tmp_path / "s.mtx").write_text(
        "%%MatrixMarket matrix coordinate real symmetric\n"
        "2 2 3\n1 1 2.0\n2 1 -1.0\n2 2 2.0\n")
    assert read_coo(tmp_path / "s.mtx").toarray().tolist() == \
        [[2.0, -1.0], [-1.0, 2.0]]


@pytest.mark.parametrize("text", ["", "2 2\n", "2 2 2\n1 1 1.0\n",
                                  "2 2 1\n3 1 1.0\n", "2 2 1\n1 1\n",
                                  "2 2 1\n0 1 1.0\n"])
def test_malformed_coo(tmp_path, text):
    (tmp_path / "bad.mtx").write_text(text)
    with pytest.raises(MatrixFileError):
        read_coo(tmp_path / "bad.mtx")


def test_operator_and_basis_round_trip(tmp_path, rng):
    ops = random_ops(rng, 3, centered=True)
    save_operators(tmp_path / "ops", ops)
    back = load_operators(tmp_path / "ops")
    for k, v in ops.as_dict().items():
        assert np.array_equal(np.asarray(v), np.asarray(getattr(back, k))), k
    basis = PodBasis(rng.standard_normal(5), rng.standard_normal((5, 2)),
                     np.array([2.0, 1.0, 0.5]))
    save_basis(tmp_path / "basis", basis)
    b2 = load_basis(tmp_path / "basis")
    assert np.array_equal(b2.modes, basis.modes)
    assert np.array_equal(b2.centering, basis.centering)
    assert np.array_equal(b2.eigenvalues, basis.eigenvalues)


def test_series_round_trip_with_nan(tmp_path):
    cols = {"t": np.array([0.0, 0.1]), "re": np.array([np.nan, -12.5]),
            "kind": ["grom", "adlrom"]}
    write_series(tmp_path / "s.csv", cols)
    assert (tmp_path / "s.csv").read_text().splitlines()[1] == "0,,grom"
    back = read_series(tmp_path / "s.csv")
    assert np.isnan(back["re"][0]) and back["re"][1] == -12.5
    assert back["kind"] == ["grom", "adlrom"]


def test_atomic_write_leaves_nothing_on_failure(tmp_path):
    target = tmp_path / "out.csv"

    def boom(p):
        p.write_text("partial")
        raise RuntimeError("fail")

    with pytest.raises(RuntimeError):
        atomic_write(target, boom)
    assert list(tmp_path.iterdir()) == []
    atomic_write(target, lambda p: p.write_text("ok"))
    assert target.read_text() == "ok"
