"""Functional calculus on a finite spectrum and polynomial interpolation.

For a normal ``B = sum_j lam_j E_j`` only the values ``f(lam_j)`` matter, so a
function is either a named builtin, a polynomial, or a finite value table.
``f(B)`` is always assembled spectrally as ``sum_j f(lam_j) E_j``; the
exponential builtin is a scalar ``exp`` at the eigenvalues, never a matrix
exponential.
"""

import warnings
from dataclasses import dataclass

import numpy as np

from .matrix import ShapeError, as_cmatrix, relative_residual
from .report import Tolerances, judge
from .spectral import decompose

__all__ = [
    "BUILTINS", "UncoveredEigenvalueError", "InterpolationError",
    "SpectrumFunction", "CPolynomial",
    "apply_function", "compose_on_spectrum", "multiply_on_spectrum",
    "build_interpolating_polynomial", "evaluate_polynomial_scalar",
    "evaluate_polynomial_matrix", "power_relation_check",
]

BUILTINS = {
    "identity": lambda z: z,
    "conjugate": np.conj,
    "square": lambda z: z * z,
    "modulus_squared": lambda z: (z * np.conj(z)).real + 0j,
    "exponential": np.exp,
}

TABLE_NODE_SEPARATION = 1e-12
TABLE_MATCH_TOL = 1e-12
MAX_NODES = 16
WARN_NODES = 8


class UncoveredEigenvalueError(KeyError):
    """A value table has no node at a requested spectral point."""


class InterpolationError(ValueError):
    pass


def _as_complex_tuple(values):
    arr = np.asarray(values, dtype=np.complex128).ravel()
    if not np.all(np.isfinite(arr)):
        raise ValueError("values must be finite")
    return tuple(complex(z) for z in arr)


@dataclass(frozen=True)
class SpectrumFunction:
    """A function known on (at least) a finite set of complex points.

    Build instances with :meth:`builtin`, :meth:`polynomial` or
    :meth:`table` rather than the raw constructor.
    """

    kind: str
    name: str = ""
    coefficients: tuple = ()
    nodes: tuple = ()
    values: tuple = ()

    def __post_init__(self):
        if self.kind == "builtin":
            if self.name not in BUILTINS:
                raise ValueError(f"unknown builtin {self.name!r}; pick one of {sorted(BUILTINS)}")
        elif self.kind == "polynomial":
            if not self.coefficients:
                raise ValueError("polynomial needs at least one coefficient")
        elif self.kind == "table":
            if len(self.nodes) != len(self.values) or not self.nodes:
                raise ValueError("table needs equally many (>0) nodes and values")
            z = np.array(self.nodes)
            if z.size > 1:
                gaps = np.abs(z[:, None] - z[None, :]) + np.diag(np.full(z.size, np.inf))
                if gaps.min() <= TABLE_NODE_SEPARATION:
                    raise ValueError("table nodes must be pairwise distinct")
        else:
            raise ValueError(f"unknown function kind {self.kind!r}")

    @classmethod
    def builtin(cls, name):
        return cls(kind="builtin", name=name)

    @classmethod
    def polynomial(cls, coefficients):
        return cls(kind="polynomial", coefficients=_as_complex_tuple(coefficients))

    @classmethod
    def table(cls, nodes, values):
        return cls(kind="table", nodes=_as_complex_tuple(nodes),
                   values=_as_complex_tuple(values))

    def __call__(self, z):
        """Evaluate at a scalar or an array of points."""
        z = np.asarray(z, dtype=np.complex128)
        if self.kind == "builtin":
            return np.asarray(BUILTINS[self.name](z), dtype=np.complex128)
        if self.kind == "polynomial":
            return CPolynomial(self.coefficients)(z)
        nodes = np.array(self.nodes)
        vals = np.array(self.values)
        flat = z.ravel()
        out = np.empty(flat.shape, dtype=np.complex128)
        for k, point in enumerate(flat):
            d = np.abs(nodes - point)
            j = int(np.argmin(d))
            if d[j] > TABLE_MATCH_TOL * max(1.0, abs(point)):
                raise UncoveredEigenvalueError(
                    f"value table has no node at {complex(point)!r}")
            out[k] = vals[j]
        return out.reshape(z.shape)

    def to_dict(self):
        pairs = lambda zs: [[z.real, z.imag] for z in zs]
        if self.kind == "builtin":
            return {"kind": "builtin", "name": self.name}
        if self.kind == "polynomial":
            return {"kind": "polynomial", "coefficients": pairs(self.coefficients)}
        return {"kind": "table", "nodes": pairs(self.nodes), "values": pairs(self.values)}

    @classmethod
    def from_dict(cls, obj):
        unpack = lambda zs: [complex(re, im) for re, im in zs]
        kind = obj.get("kind")
        if kind == "builtin":
            return cls.builtin(obj["name"])
        if kind == "polynomial":
            return cls.polynomial(unpack(obj["coefficients"]))
        if kind == "table":
            return cls.table(unpack(obj["nodes"]), unpack(obj["values"]))
        raise ValueError(f"unknown function kind {kind!r}")

    def __str__(self):
        if self.kind == "builtin":
            return self.name
        if self.kind == "polynomial":
            return f"poly(deg={len(self.coefficients) - 1})"
        return f"table({len(self.nodes)})"


class CPolynomial:
    """Complex polynomial, coefficients in ascending degree order.

    Trailing (leading-degree) zeros are trimmed; the zero polynomial keeps a
    single zero coefficient.
    """

    def __init__(self, coefficients):
        c = np.asarray(coefficients, dtype=np.complex128).ravel()
        if c.size == 0:
            raise ValueError("polynomial needs at least one coefficient")
        if not np.all(np.isfinite(c)):
            raise ValueError("polynomial coefficients must be finite")
        nz = np.flatnonzero(c)
        c = c[: nz[-1] + 1] if nz.size else c[:1]
        self.coefficients = c
        self.coefficients.setflags(write=False)

    @property
    def degree(self):
        return self.coefficients.size - 1

    def __call__(self, z):
        z = np.asarray(z, dtype=np.complex128)
        acc = np.zeros_like(z)
        for c in self.coefficients[::-1]:
            acc = acc * z + c
        return acc

    def __eq__(self, other):
        if not isinstance(other, CPolynomial):
            return NotImplemented
        return np.array_equal(self.coefficients, other.coefficients)

    def __repr__(self):
        return f"CPolynomial({self.coefficients.tolist()})"


def evaluate_polynomial_scalar(p, z):
    return complex(p(complex(z)))


def evaluate_polynomial_matrix(p, B):
    """Horner evaluation of ``sum_m c_m B^m``."""
    B = as_cmatrix(B, "B")
    if B.shape[0] != B.shape[1]:
        raise ShapeError(f"polynomial of a matrix needs a square matrix, got {B.shape}")
    n = B.shape[0]
    acc = np.zeros((n, n), dtype=np.complex128)
    eye = np.eye(n, dtype=np.complex128)
    for c in p.coefficients[::-1]:
        acc = acc @ B + c * eye
    return acc


def apply_function(d, f):
    """``f(B) = sum_j f(lam_j) E_j`` for a decomposition `d` of `B`."""
    values = f(np.array(d.eigenvalues, dtype=np.complex128))
    out = np.zeros((d.dim, d.dim), dtype=np.complex128)
    for v, E in zip(values, d.projectors):
        out += v * E
    return out


def compose_on_spectrum(f, g, spectrum):
    """Value table of ``g o f`` on the points of `spectrum`."""
    spectrum = np.asarray(spectrum, dtype=np.complex128)
    return SpectrumFunction.table(spectrum, g(f(spectrum)))


def multiply_on_spectrum(f, g, spectrum):
    """Value table of the pointwise product ``f * g`` on `spectrum`."""
    spectrum = np.asarray(spectrum, dtype=np.complex128)
    return SpectrumFunction.table(spectrum, f(spectrum) * g(spectrum))


def _dedup_nodes(nodes, values, dedup_tol):
    kept_z, kept_v = [], []
    for z, v in zip(nodes, values):
        for k, zk in enumerate(kept_z):
            if abs(z - zk) <= dedup_tol:
                if abs(v - kept_v[k]) > 1e-9 * max(1.0, abs(v), abs(kept_v[k])):
                    raise InterpolationError(
                        f"nodes {zk!r} and {z!r} coincide but carry values "
                        f"{kept_v[k]!r} and {v!r}")
                break
        else:
            kept_z.append(z)
            kept_v.append(v)
    return np.array(kept_z), np.array(kept_v)


def build_interpolating_polynomial(nodes, values, dedup_tol=1e-10):
    """Polynomial of minimal degree through the given points.

    Nodes closer than `dedup_tol` are merged (their values must agree).
    The interpolant is formed with Newton divided differences and then
    expanded into monomial coefficients.

    Raises
    ------
    InterpolationError
        On conflicting values at merged nodes, or more than 16 distinct nodes.
    """
    nodes = np.asarray(nodes, dtype=np.complex128).ravel()
    values = np.asarray(values, dtype=np.complex128).ravel()
    if nodes.size != values.size or nodes.size == 0:
        raise InterpolationError("need equally many (>0) nodes and values")
    if not (np.all(np.isfinite(nodes)) and np.all(np.isfinite(values))):
        raise InterpolationError("nodes and values must be finite")
    x, y = _dedup_nodes(nodes, values, dedup_tol)
    n = x.size
    if n > MAX_NODES:
        raise InterpolationError(f"{n} distinct nodes exceed the cap of {MAX_NODES}")
    if n > WARN_NODES:
        warnings.warn(
            f"interpolating through {n} nodes in monomial form; expect "
            "conditioning loss above 8 nodes", RuntimeWarning, stacklevel=2)

    dd = y.copy()
    for level in range(1, n):
        dd[level:] = (dd[level:] - dd[level - 1:-1]) / (x[level:] - x[:n - level])

    # p = dd0 + (z-x0)(dd1 + (z-x1)(dd2 + ...)), expanded from the inside out
    coef = np.array([dd[-1]])
    for k in range(n - 2, -1, -1):
        shifted = np.concatenate(([0j], coef))
        shifted[:-1] -= x[k] * coef
        shifted[0] += dd[k]
        coef = shifted
    return CPolynomial(coef)


def power_relation_check(B, A, f, m, tols=Tolerances(), instance_id="", d=None):
    """Check ``BA = A f(B)  =>  B^m A = A f(B)^m``."""
    B = as_cmatrix(B, "B")
    A = as_cmatrix(A, "A")
    if m < 1:
        raise ValueError("power must be a positive integer")
    if B.shape[0] != B.shape[1] or A.shape[0] != B.shape[0] or A.shape[1] != B.shape[0]:
        raise ShapeError(f"incompatible shapes B{B.shape}, A{A.shape}")
    if d is None:
        d = decompose(B)
    fB = apply_function(d, f)
    r0 = relative_residual(B @ A, A @ fB)
    lhs = np.linalg.matrix_power(B, m) @ A
    rhs = A @ np.linalg.matrix_power(fB, m)
    rm = relative_residual(lhs, rhs)
    return judge(f"power_relation[m={m}]", r0, rm, tols, witness=A, instance_id=instance_id)
