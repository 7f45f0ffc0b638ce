"""Block devices, witnesses and seeded random instance generators.

Every generator is a pure function of its arguments and an integer seed; no
module-level random state is used. Zero blocks are allocated as exact zeros
and never computed.
"""

from dataclasses import dataclass

import numpy as np

from .intertwine import intertwiner_space
from .matrix import ShapeError, as_cmatrix

__all__ = [
    "BlockPair", "NotUnitaryError", "UNITARY_TOL", "MIN_SEPARATION",
    "splitmix64", "derive_seed", "rng",
    "berberian_double", "berberian_embed", "prop25_pair", "jordan_witness",
    "random_unitary", "random_normal_with_spectrum", "random_commutant_element",
]

UNITARY_TOL = 1e-10
MIN_SEPARATION = 1e-6
_MASK64 = (1 << 64) - 1


class NotUnitaryError(ValueError):
    pass


@dataclass(frozen=True)
class BlockPair:
    """A ``(B, A)`` pair produced by one of the block constructions.

    `block_dim` is the size of the underlying blocks; for the Jordan witness
    the matrices are not block-structured and `block_dim` is their size.
    """

    big_B: np.ndarray
    big_A: np.ndarray
    block_dim: int
    provenance: str


def splitmix64(x):
    x = (x + 0x9E3779B97F4A7C15) & _MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK64
    return x ^ (x >> 31)


def derive_seed(seed, index):
    """Per-instance 64-bit seed from a suite seed and an instance index."""
    return splitmix64((splitmix64(seed & _MASK64) + index) & _MASK64)


def rng(seed):
    return np.random.Generator(np.random.PCG64(seed & _MASK64))


def berberian_double(B, C):
    """Block-diagonal ``[[B, 0], [0, C]]``."""
    B = as_cmatrix(B, "B")
    C = as_cmatrix(C, "C")
    if B.shape[0] != B.shape[1] or B.shape != C.shape:
        raise ShapeError(f"need square B and C of equal size, got {B.shape} and {C.shape}")
    n = B.shape[0]
    out = np.zeros((2 * n, 2 * n), dtype=np.complex128)
    out[:n, :n] = B
    out[n:, n:] = C
    return out


def berberian_embed(A):
    """``[[0, A], [0, 0]]``."""
    A = as_cmatrix(A, "A")
    if A.shape[0] != A.shape[1]:
        raise ShapeError(f"A must be square, got {A.shape}")
    n = A.shape[0]
    out = np.zeros((2 * n, 2 * n), dtype=np.complex128)
    out[:n, n:] = A
    return out


def _unitarity_defect(U):
    return float(np.linalg.norm(U.conj().T @ U - np.eye(U.shape[0]), "fro"))


def prop25_pair(U, A, project_to_commutant=False):
    """``B = [[U, 0], [0, U*]]`` and ``T = [[0, A], [A*, 0]]``.

    `B` is unitary and `T` Hermitian. With `project_to_commutant` the block
    `A` is first replaced by its orthogonal projection onto ``{X : UX = XU}``.
    """
    U = as_cmatrix(U, "U")
    A = as_cmatrix(A, "A")
    if U.shape[0] != U.shape[1] or A.shape != U.shape:
        raise ShapeError(f"need square U and A of equal size, got {U.shape} and {A.shape}")
    defect = _unitarity_defect(U)
    if defect > UNITARY_TOL:
        raise NotUnitaryError(f"U is not unitary: ||U*U - I||_F = {defect:.3e}")
    if project_to_commutant:
        A = intertwiner_space(U, U).project(A)
    n = U.shape[0]
    big_B = berberian_double(U, U.conj().T)
    big_A = np.zeros((2 * n, 2 * n), dtype=np.complex128)
    big_A[:n, n:] = A
    big_A[n:, :n] = A.conj().T
    assert _unitarity_defect(big_B) <= 4 * UNITARY_TOL
    assert np.array_equal(big_A, big_A.conj().T)
    return BlockPair(big_B, big_A, n, "prop25")


def jordan_witness(n):
    """Nilpotent Jordan block ``J`` paired with itself: ``JA = AJ`` but
    ``J*A != AJ*``."""
    if n < 2:
        raise ValueError("the Jordan witness needs n >= 2")
    J = np.diag(np.ones(n - 1, dtype=np.complex128), 1)
    return BlockPair(J, J.copy(), n, "jordan")


def random_unitary(n, seed):
    """Unitary from the QR factorization of a complex Ginibre matrix.

    The phases of ``diag(R)`` are moved into ``Q`` so the factorization is
    unique, which makes the result Haar distributed.
    """
    if n < 1:
        raise ValueError("n must be positive")
    g = rng(seed)
    Z = (g.standard_normal((n, n)) + 1j * g.standard_normal((n, n))) / np.sqrt(2.0)
    Q, R = np.linalg.qr(Z)
    d = np.diag(R)
    return Q * (d / np.abs(d))


def random_normal_with_spectrum(eigenvalues, multiplicities, seed):
    """``U diag(spectrum) U*`` for a seeded random unitary ``U``."""
    lam = np.asarray(eigenvalues, dtype=np.complex128).ravel()
    mult = [int(m) for m in multiplicities]
    if lam.size != len(mult) or lam.size == 0:
        raise ValueError("need equally many (>0) eigenvalues and multiplicities")
    if any(m < 1 for m in mult):
        raise ValueError("multiplicities must be positive")
    if not np.all(np.isfinite(lam)):
        raise ValueError("eigenvalues must be finite")
    if lam.size > 1:
        gaps = np.abs(lam[:, None] - lam[None, :]) + np.diag(np.full(lam.size, np.inf))
        if gaps.min() < MIN_SEPARATION:
            raise ValueError(
                f"eigenvalues must be separated by at least {MIN_SEPARATION}, "
                f"closest pair is {gaps.min():.3e} apart")
    U = random_unitary(sum(mult), seed)
    return (U * np.repeat(lam, mult)) @ U.conj().T


def random_commutant_element(B, seed):
    """Random unit-norm matrix commuting with `B`."""
    space = intertwiner_space(B, B)
    g = rng(seed)
    c = g.standard_normal(space.dimension) + 1j * g.standard_normal(space.dimension)
    A = space.combine(c)
    return A / np.linalg.norm(A, "fro")
