"""Dense complex matrices and the residual conventions used everywhere.

Matrices are plain ``complex128`` numpy arrays. Every public entry point runs
its inputs through :func:`as_cmatrix`, which rejects NaN/Inf and anything that
is not two-dimensional.

``vec`` stacks columns, so that ``vec(A @ X @ B) == kron(B.T, A) @ vec(X)``.
"""

import json

import numpy as np

__all__ = [
    "ShapeError", "NonFiniteError",
    "as_cmatrix", "adjoint", "multiply", "kron", "vec", "unvec",
    "frobenius_norm", "relative_residual", "identity", "zeros",
    "matrix_to_dict", "matrix_from_dict", "load_matrix", "save_matrix",
]


class ShapeError(ValueError):
    """Raised when operand shapes are incompatible."""


class NonFiniteError(ValueError):
    """Raised when a matrix contains NaN or Inf."""


def as_cmatrix(M, name="matrix"):
    """Return `M` as a finite 2-D complex128 array.

    Scalars and 1-D inputs are not promoted; callers are expected to hand in
    something that already is a matrix.
    """
    arr = np.asarray(M, dtype=np.complex128)
    if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
        raise ShapeError(f"{name} must be a non-empty 2-D array, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise NonFiniteError(f"{name} contains NaN or Inf entries")
    return arr


def _require_square(M, name):
    if M.shape[0] != M.shape[1]:
        raise ShapeError(f"{name} must be square, got shape {M.shape}")


def identity(n):
    return np.eye(n, dtype=np.complex128)


def zeros(rows, cols=None):
    return np.zeros((rows, rows if cols is None else cols), dtype=np.complex128)


def adjoint(M):
    """Conjugate transpose."""
    return as_cmatrix(M).conj().T.copy()


def multiply(A, B):
    A = as_cmatrix(A, "A")
    B = as_cmatrix(B, "B")
    if A.shape[1] != B.shape[0]:
        raise ShapeError(f"cannot multiply {A.shape} by {B.shape}")
    return A @ B


def kron(A, B):
    return np.kron(as_cmatrix(A, "A"), as_cmatrix(B, "B"))


def vec(M):
    """Column-stacking vectorization, returned as a column (n*m, 1)."""
    M = as_cmatrix(M)
    return M.reshape(-1, 1, order="F").copy()


def unvec(v, rows, cols):
    """Inverse of :func:`vec`."""
    v = np.asarray(v, dtype=np.complex128)
    if v.size != rows * cols or (v.ndim == 2 and v.shape[1] != 1) or v.ndim > 2:
        raise ShapeError(
            f"cannot unvec an array of shape {v.shape} into {rows}x{cols}")
    return as_cmatrix(v.reshape(rows, cols, order="F").copy(), "v")


def frobenius_norm(M):
    return float(np.linalg.norm(as_cmatrix(M), "fro"))


def relative_residual(X, Y):
    """``||X - Y||_F / max(1, ||X||_F, ||Y||_F)``.

    Flooring the denominator at 1 keeps verdicts stable near the zero matrix.
    """
    X = as_cmatrix(X, "X")
    Y = as_cmatrix(Y, "Y")
    if X.shape != Y.shape:
        raise ShapeError(f"residual needs equal shapes, got {X.shape} and {Y.shape}")
    nx = np.linalg.norm(X, "fro")
    ny = np.linalg.norm(Y, "fro")
    return float(np.linalg.norm(X - Y, "fro") / max(1.0, nx, ny))


# -- JSON literal format: {"rows": n, "cols": m, "entries": [[re, im], ...]} --

def matrix_to_dict(M):
    M = as_cmatrix(M)
    rows, cols = M.shape
    entries = [[float(z.real), float(z.imag)] for z in M.ravel(order="C")]
    return {"rows": int(rows), "cols": int(cols), "entries": entries}


def matrix_from_dict(obj):
    try:
        rows, cols, entries = int(obj["rows"]), int(obj["cols"]), obj["entries"]
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed matrix object: {exc}") from None
    if len(entries) != rows * cols:
        raise ShapeError(
            f"matrix object declares {rows}x{cols} but has {len(entries)} entries")
    data = np.empty(rows * cols, dtype=np.complex128)
    for k, pair in enumerate(entries):
        if len(pair) != 2:
            raise ValueError(f"entry {k} is not a [re, im] pair: {pair!r}")
        data[k] = complex(float(pair[0]), float(pair[1]))
    return as_cmatrix(data.reshape(rows, cols))


def load_matrix(path):
    with open(path, encoding="utf-8") as fh:
        return matrix_from_dict(json.load(fh))


def save_matrix(M, path):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(matrix_to_dict(M), fh)
