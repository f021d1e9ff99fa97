"""Plain-text file formats.

Dense matrix files start with a header line of the shape (two integers, or
three for tensors) followed by row-major values, one matrix row (one
``[i, j, :]`` fibre for tensors) per line.  Values use 17 significant
digits so that a write/read round trip is exact.

Sparse matrices use a coordinate list: optional ``%`` comment lines, a
``rows cols nnz`` header and ``i j value`` lines with 1-based indices, as in
Matrix Market.  A ``%%MatrixMarket ... symmetric`` banner mirrors the
lower triangle.
"""
import csv
import os
from pathlib import Path

import numpy as np
import scipy.sparse as sp

from .exceptions import MatrixFileError
from .operators import RomOperators
from .pod import PodBasis

FLOAT_FMT = "%.17g"


def _fmt(x):
    return FLOAT_FMT % x


def write_matrix(path, arr):
    arr = np.asarray(arr, dtype=float)
    if arr.ndim == 1:
        arr = arr[:, None]
    if arr.ndim not in (2, 3):
        raise ValueError("array dimension must lie between 1 and 3")
    rows = arr.reshape(-1, arr.shape[-1])
    with open(path, "w") as fh:
        fh.write(" ".join(str(s) for s in arr.shape) + "\n")
        for row in rows:
            fh.write(" ".join(_fmt(v) for v in row) + "\n")


def read_matrix(path):
    """Read a dense matrix or tensor file."""
    with open(path) as fh:
        header = fh.readline().split()
        try:
            shape = tuple(int(s) for s in header)
        except ValueError:
            raise MatrixFileError(f"{path}: bad header {header!r}") from None
        if len(shape) not in (2, 3) or any(s < 0 for s in shape):
            raise MatrixFileError(f"{path}: header must hold 2 or 3 "
                                  f"nonnegative integers")
        try:
            values = np.array(fh.read().split(), dtype=float)
        except ValueError as exc:
            raise MatrixFileError(f"{path}: {exc}") from None
    if values.size != int(np.prod(shape)):
        raise MatrixFileError(f"{path}: expected {int(np.prod(shape))} values,"
                              f" found {values.size}")
    if not np.all(np.isfinite(values)):
        raise MatrixFileError(f"{path}: non-finite value")
    return values.reshape(shape)


def read_vector(path):
    m = read_matrix(path)
    if m.ndim != 2 or 1 not in m.shape:
        raise MatrixFileError(f"{path}: expected a vector, got shape "
                              f"{m.shape}")
    return m.ravel()


def write_coo(path, mat):
    mat = sp.coo_matrix(mat)
    with open(path, "w") as fh:
        fh.write(f"{mat.shape[0]} {mat.shape[1]} {mat.nnz}\n")
        for i, j, v in zip(mat.row, mat.col, mat.data):
            fh.write(f"{i + 1} {j + 1} {_fmt(v)}\n")


def read_coo(path):
    """Read a coordinate-list sparse matrix into CSR format."""
    symmetric = False
    header = None
    rows, cols, vals = [], [], []
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            s = line.strip()
            if not s:
                continue
            if s.startswith("%"):
                if s.lower().startswith("%%matrixmarket") and \
                        "symmetric" in s.lower():
                    symmetric = True
                continue
            parts = s.split()
            try:
                if header is None:
                    header = tuple(int(p) for p in parts)
                    if len(header) != 3:
                        raise ValueError("header needs rows cols nnz")
                    continue
                if len(parts) != 3:
                    raise ValueError("expected 'i j value'")
                rows.append(int(parts[0]) - 1)
                cols.append(int(parts[1]) - 1)
                vals.append(float(parts[2]))
            except ValueError as exc:
                raise MatrixFileError(f"{path}:{lineno}: {exc}") from None
    if header is None:
        raise MatrixFileError(f"{path}: missing size header")
    n, m, nnz = header
    if len(vals) != nnz:
        raise MatrixFileError(f"{path}: header declares {nnz} entries, "
                              f"found {len(vals)}")
    rows, cols, vals = np.array(rows, int), np.array(cols, int), \
        np.array(vals, float)
    if nnz and (rows.min() < 0 or cols.min() < 0 or rows.max() >= n
                or cols.max() >= m):
        raise MatrixFileError(f"{path}: index out of range")
    if symmetric:
        off = rows != cols
        rows, cols, vals = (np.concatenate([rows, cols[off]]),
                            np.concatenate([cols, rows[off]]),
                            np.concatenate([vals, vals[off]]))
    return sp.coo_matrix((vals, (rows, cols)), shape=(n, m)).tocsr()


_OPERATOR_FIELDS = ("mass_r", "stiff_r", "b", "A_lin", "conv_center_left",
                    "conv_center_right", "B", "g", "stiff_center",
                    "mass_center")


def save_operators(directory, ops):
    d = Path(directory)
    d.mkdir(parents=True, exist_ok=True)
    for name in _OPERATOR_FIELDS:
        write_matrix(d / f"{name}.txt", getattr(ops, name))
    write_matrix(d / "nu.txt", np.array([[ops.nu]]))


def load_operators(directory):
    d = Path(directory)
    data = {}
    for name in _OPERATOR_FIELDS:
        arr = read_matrix(d / f"{name}.txt")
        if name not in ("mass_r", "stiff_r", "A_lin", "conv_center_left",
                        "conv_center_right", "B"):
            arr = arr.ravel()
        data[name] = arr
    data["nu"] = float(read_matrix(d / "nu.txt").ravel()[0])
    return RomOperators(**data)


def save_basis(directory, basis):
    d = Path(directory)
    d.mkdir(parents=True, exist_ok=True)
    write_matrix(d / "centering.txt", basis.centering)
    write_matrix(d / "modes.txt", basis.modes)
    write_matrix(d / "eigenvalues.txt", basis.eigenvalues)


def load_basis(directory):
    d = Path(directory)
    return PodBasis(read_vector(d / "centering.txt"),
                    read_matrix(d / "modes.txt"),
                    read_vector(d / "eigenvalues.txt"))


def _cell(v):
    if isinstance(v, (float, np.floating)):
        return "" if np.isnan(v) else _fmt(v)
    return v


def write_series(path, columns):
    """Write named columns as comma-separated text; nan becomes empty."""
    names = list(columns)
    data = [np.asarray(columns[n]) for n in names]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(names)
        for row in zip(*data):
            w.writerow([_cell(v) for v in row])


def read_series(path):
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    names, body = rows[0], rows[1:]
    out = {}
    for k, name in enumerate(names):
        col = [r[k] for r in body]
        try:
            out[name] = np.array([float(v) if v != "" else np.nan
                                  for v in col])
        except ValueError:
            out[name] = col
    return out


def atomic_write(path, writer):
    """Call ``writer(tmp_path)`` then move the result into place."""
    path = Path(path)
    tmp = path.with_name(path.name + ".partial")
    try:
        writer(tmp)
        os.replace(tmp, path)
    finally:
        if tmp.exists():
            tmp.unlink()
