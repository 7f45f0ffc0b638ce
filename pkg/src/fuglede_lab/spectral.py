"""Normality test and spectral decomposition ``B = sum_j lam_j E_j``.

A normal matrix is unitarily diagonalizable, so its complex Schur form is
diagonal up to rounding. The Schur vectors are orthonormal even inside a
cluster of (numerically) repeated eigenvalues, which makes every projector
``E_j = Z_j Z_j^*`` Hermitian and idempotent by construction.
"""

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .matrix import ShapeError, as_cmatrix

__all__ = [
    "NormalityError", "ClusteringError", "SpectralDecomp", "Cluster",
    "NORMAL_GATE", "default_cluster_tol", "normality_residual",
    "cluster_eigenvalues", "decompose", "reconstruct",
]

NORMAL_GATE = 1e-8


class NormalityError(ValueError):
    """The input is not normal to within the gate; carries the residual."""

    def __init__(self, residual, gate=NORMAL_GATE):
        super().__init__(
            f"matrix is not normal: normality residual {residual:.3e} exceeds {gate:.1e}")
        self.residual = residual
        self.gate = gate


class ClusteringError(ValueError):
    """Single-linkage chained values farther apart than the tolerance."""


@dataclass(frozen=True)
class Cluster:
    representative: complex
    indices: tuple


@dataclass(frozen=True)
class SpectralDecomp:
    """Distinct eigenvalues with their orthogonal eigenprojectors.

    Attributes
    ----------
    dim : int
    eigenvalues : tuple of complex
        Cluster representatives, pairwise farther apart than `cluster_tol`.
    projectors : tuple of (dim, dim) ndarray
    multiplicities : tuple of int
        Sum to `dim`.
    cluster_tol : float
    normality_residual : float
    """

    dim: int
    eigenvalues: tuple
    projectors: tuple
    multiplicities: tuple
    cluster_tol: float
    normality_residual: float

    def __len__(self):
        return len(self.eigenvalues)

    def __iter__(self):
        return iter(zip(self.eigenvalues, self.projectors))


def default_cluster_tol(B):
    return max(1e-10, 1e-8 * float(np.linalg.norm(B, "fro")))


def normality_residual(B):
    """``||BB* - B*B||_F / max(1, ||B||_F^2)``."""
    B = as_cmatrix(B, "B")
    if B.shape[0] != B.shape[1]:
        raise ShapeError(f"normality needs a square matrix, got {B.shape}")
    Bh = B.conj().T
    scale = max(1.0, float(np.linalg.norm(B, "fro")) ** 2)
    return float(np.linalg.norm(B @ Bh - Bh @ B, "fro") / scale)


def cluster_eigenvalues(values, tol):
    """Partition `values` by single linkage at distance `tol`.

    Returns a list of :class:`Cluster`, ordered by first appearance. A
    cluster whose members are not all pairwise within `tol` (a chain) is
    rejected with :class:`ClusteringError` rather than silently merged.
    """
    if tol <= 0:
        raise ValueError("cluster tolerance must be positive")
    vals = np.asarray(values, dtype=np.complex128).ravel()
    if not np.all(np.isfinite(vals)):
        raise ValueError("eigenvalues must be finite")
    n = vals.size
    dist = np.abs(vals[:, None] - vals[None, :])
    label = -np.ones(n, dtype=int)
    clusters = []
    for start in range(n):
        if label[start] >= 0:
            continue
        label[start] = len(clusters)
        members, stack = [start], [start]
        while stack:
            i = stack.pop()
            for j in np.flatnonzero((dist[i] <= tol) & (label < 0)):
                label[j] = label[start]
                members.append(int(j))
                stack.append(int(j))
        members.sort()
        spread = dist[np.ix_(members, members)].max()
        if spread > tol:
            raise ClusteringError(
                f"eigenvalues {vals[members]} chain together at tol={tol:.3e} "
                f"but span {spread:.3e}; choose a different cluster tolerance")
        clusters.append(Cluster(complex(vals[members].mean()), tuple(members)))
    reps = np.array([c.representative for c in clusters])
    if reps.size > 1:
        gaps = np.abs(reps[:, None] - reps[None, :]) + np.diag(np.full(reps.size, np.inf))
        if gaps.min() <= tol:
            raise ClusteringError(
                f"cluster representatives within {gaps.min():.3e} <= tol={tol:.3e}")
    return clusters


def decompose(B, cluster_tol=None, normal_gate=NORMAL_GATE):
    """Spectral decomposition of a normal matrix.

    Parameters
    ----------
    B : (n, n) array_like
    cluster_tol : float, optional
        Eigenvalues closer than this are one spectral point. Defaults to
        ``max(1e-10, 1e-8 * ||B||_F)``.
    normal_gate : float
        Maximal accepted :func:`normality_residual`.

    Raises
    ------
    NormalityError
        If `B` is not normal within `normal_gate`.
    ClusteringError
        If the eigenvalues cannot be clustered unambiguously at `cluster_tol`.
    """
    B = as_cmatrix(B, "B")
    res = normality_residual(B)
    if res > normal_gate:
        raise NormalityError(res, normal_gate)
    if cluster_tol is None:
        cluster_tol = default_cluster_tol(B)
    T, Z = scipy.linalg.schur(B, output="complex")
    clusters = cluster_eigenvalues(np.diag(T), cluster_tol)
    projectors = []
    for c in clusters:
        Zc = Z[:, list(c.indices)]
        P = Zc @ Zc.conj().T
        P = 0.5 * (P + P.conj().T)
        P.setflags(write=False)
        projectors.append(P)
    return SpectralDecomp(
        dim=B.shape[0],
        eigenvalues=tuple(c.representative for c in clusters),
        projectors=tuple(projectors),
        multiplicities=tuple(len(c.indices) for c in clusters),
        cluster_tol=float(cluster_tol),
        normality_residual=res,
    )


def reconstruct(d):
    out = np.zeros((d.dim, d.dim), dtype=np.complex128)
    for lam, E in d:
        out += lam * E
    return out
