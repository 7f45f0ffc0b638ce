"""Intertwiner spaces and residual checks of the intertwining implications.

Orientation is fixed everywhere as ``L X = X R``; in the theorem checks the
roles are ``L = B``, ``R = f(B)``, ``X = A``. For matrices an inclusion of
operators is an equality, so each implication is tested as
``residual(hypothesis) small  =>  residual(conclusion) small``.
"""

from dataclasses import dataclass, replace

import numpy as np

from .funcalc import (
    SpectrumFunction, apply_function, build_interpolating_polynomial,
    compose_on_spectrum, evaluate_polynomial_matrix,
)
from .matrix import ShapeError, as_cmatrix, relative_residual, unvec
from .report import ImplicationReport, Tolerances, Verdict, judge
from .spectral import NORMAL_GATE, NormalityError, decompose, normality_residual

__all__ = [
    "IntertwinerSpace", "NormIdentityReport", "ImplicationReport", "Tolerances",
    "Verdict", "DEFAULT_RANK_TOL", "NORM_IDENTITY_TOL",
    "intertwiner_space", "expected_dimension", "sylvester_operator",
    "theorem_check", "PolynomialRoute", "theorem_via_polynomial", "flip_check", "fuglede_check", "putnam_check",
    "adjoint_transport_check", "norm_identity_check",
    "selfadjoint_product_check",
]

DEFAULT_RANK_TOL = 1e-10
NORM_IDENTITY_TOL = 1e-9

CONJUGATE = SpectrumFunction.builtin("conjugate")
IDENTITY = SpectrumFunction.builtin("identity")


@dataclass(frozen=True)
class IntertwinerSpace:
    """Frobenius-orthonormal basis of ``{X : L X - X R = 0}``."""

    left: np.ndarray
    right: np.ndarray
    basis: tuple
    rank_tol: float
    max_basis_residual: float

    @property
    def dimension(self):
        return len(self.basis)

    @property
    def shape(self):
        return (self.left.shape[0], self.right.shape[0])

    def vectors(self):
        """Basis as columns of an (n*m, dim) array (column-major vec)."""
        n, m = self.shape
        if not self.basis:
            return np.zeros((n * m, 0), dtype=np.complex128)
        return np.column_stack([X.reshape(-1, order="F") for X in self.basis])

    def projector(self):
        """Orthogonal projector onto the space, acting on vec(X)."""
        V = self.vectors()
        return V @ V.conj().T

    def project(self, X):
        """Frobenius-orthogonal projection of `X` onto the space."""
        X = as_cmatrix(X, "X")
        out = np.zeros(self.shape, dtype=np.complex128)
        for Y in self.basis:
            out += np.vdot(Y, X) * Y
        return out

    def combine(self, coefficients):
        out = np.zeros(self.shape, dtype=np.complex128)
        for c, Y in zip(coefficients, self.basis):
            out += c * Y
        return out


def _require_square(M, name):
    if M.shape[0] != M.shape[1]:
        raise ShapeError(f"{name} must be square, got shape {M.shape}")


def sylvester_operator(L, R):
    """Matrix of ``X -> L X - X R`` acting on column-major vec(X)."""
    n, m = L.shape[0], R.shape[0]
    return np.kron(np.eye(m), L) - np.kron(R.T, np.eye(n))


def intertwiner_space(L, R, rank_tol=DEFAULT_RANK_TOL):
    """Orthonormal basis of the solutions of ``L X = X R``.

    The homogeneous Sylvester equation is vectorized into an (nm, nm) system
    whose numerical null space is read off a full SVD: singular values at or
    below ``rank_tol * max(sigma_max, ||L||_F + ||R||_F)`` count as zero.
    """
    L = as_cmatrix(L, "L")
    R = as_cmatrix(R, "R")
    _require_square(L, "L")
    _require_square(R, "R")
    n, m = L.shape[0], R.shape[0]
    K = sylvester_operator(L, R)
    _, s, Vh = np.linalg.svd(K)
    # floor the reference scale: when L = R up to rounding, sigma_max is noise
    scale = max(s[0], np.linalg.norm(L, "fro") + np.linalg.norm(R, "fro"))
    rank = int(np.count_nonzero(s > rank_tol * scale))
    null = Vh[rank:].conj()
    basis = []
    worst = 0.0
    for v in null:
        X = unvec(v, n, m)
        X.setflags(write=False)
        basis.append(X)
        worst = max(worst, relative_residual(L @ X, X @ R))
    return IntertwinerSpace(L, R, tuple(basis), float(rank_tol), worst)


def expected_dimension(spec_left, spec_right):
    """Intertwiner dimension for normal L, R predicted from their spectra.

    Sum of ``mult_i(L) * mult_j(R)`` over coinciding eigenvalue pairs, matched
    at the larger of the two cluster tolerances.
    """
    tol = max(spec_left.cluster_tol, spec_right.cluster_tol)
    total = 0
    for lam, p in zip(spec_left.eigenvalues, spec_left.multiplicities):
        for mu, q in zip(spec_right.eigenvalues, spec_right.multiplicities):
            if abs(lam - mu) <= tol:
                total += p * q
    return total


def _gate(B, name="B"):
    res = normality_residual(B)
    if res > NORMAL_GATE:
        raise NormalityError(res, NORMAL_GATE)
    return res


def _check_pair(B, C, A):
    _require_square(B, "B")
    _require_square(C, "C")
    if A.shape != (B.shape[0], C.shape[0]):
        raise ShapeError(
            f"A must be {B.shape[0]}x{C.shape[0]} to intertwine B{B.shape} and C{C.shape}, "
            f"got {A.shape}")


def theorem_check(B, f, g, A, tols=Tolerances(), instance_id="", d=None):
    """``B A = A f(B)  =>  g(B) A = A (g o f)(B)`` for normal `B`.

    ``g o f`` is composed as a value table on the spectrum of `B`, so `g`
    only needs to be evaluable at the points ``f(lam_j)``.
    """
    B = as_cmatrix(B, "B")
    A = as_cmatrix(A, "A")
    _check_pair(B, B, A)
    if d is None:
        d = decompose(B)
    fB = apply_function(d, f)
    gB = apply_function(d, g)
    gfB = apply_function(d, compose_on_spectrum(f, g, d.eigenvalues))
    hyp = relative_residual(B @ A, A @ fB)
    conc = relative_residual(gB @ A, A @ gfB)
    return judge(f"theorem[f={f},g={g}]", hyp, conc, tols, witness=A,
                 instance_id=instance_id)


@dataclass(frozen=True)
class PolynomialRoute:
    """Result of pushing the hypothesis through an interpolating polynomial.

    Attributes
    ----------
    polynomial : CPolynomial
        Interpolates `g` on the spectrum of `B` and on its image under `f`.
    calculus_gap : float
        ``relres(p(B), g(B))``, Horner against the spectral calculus.
    composed_gap : float
        ``relres(p(f(B)), (g o f)(B))``.
    report : ImplicationReport
        ``B A = A f(B)  =>  p(B) A = A p(f(B))``.
    """

    polynomial: object
    calculus_gap: float
    composed_gap: float
    report: ImplicationReport


def theorem_via_polynomial(B, f, g, A, tols=Tolerances(), instance_id="", d=None):
    """Replay the polynomial argument for ``g(B) A = A (g o f)(B)``.

    Matching ``g`` at the eigenvalues alone gives ``p(B) = g(B)`` and matching
    it at their images ``f(lam_j)`` gives ``p(f(B)) = (g o f)(B)``, so ``p``
    interpolates ``g`` on the union of both point sets. Both sides are then
    evaluated by Horner's rule on matrices, independently of the calculus.
    """
    B = as_cmatrix(B, "B")
    A = as_cmatrix(A, "A")
    _check_pair(B, B, A)
    if d is None:
        d = decompose(B)
    lam = np.array(d.eigenvalues, dtype=np.complex128)
    image = f(lam)
    nodes = np.concatenate([lam, image])
    p = build_interpolating_polynomial(nodes, g(nodes), dedup_tol=d.cluster_tol)
    fB = apply_function(d, f)
    pB = evaluate_polynomial_matrix(p, B)
    pfB = evaluate_polynomial_matrix(p, fB)
    rep = judge(f"theorem_poly[f={f},g={g}]",
                relative_residual(B @ A, A @ fB),
                relative_residual(pB @ A, A @ pfB), tols, witness=A,
                instance_id=instance_id)
    return PolynomialRoute(
        polynomial=p,
        calculus_gap=relative_residual(pB, apply_function(d, g)),
        composed_gap=relative_residual(
            pfB, apply_function(d, compose_on_spectrum(f, g, lam))),
        report=rep,
    )


def flip_check(B, A, tols=Tolerances(), instance_id="", d=None):
    """``B A = A B*  =>  B* A = A B``."""
    rep = theorem_check(B, CONJUGATE, CONJUGATE, A, tols, instance_id, d)
    return replace(rep, check="flip")


def fuglede_check(B, A, tols=Tolerances(), instance_id=""):
    """``B A = A B  =>  B* A = A B*``.

    Normality is deliberately not enforced: a non-normal `B` may FAIL, which
    is how the necessity of normality is exhibited.
    """
    B = as_cmatrix(B, "B")
    A = as_cmatrix(A, "A")
    _check_pair(B, B, A)
    Bh = B.conj().T
    hyp = relative_residual(B @ A, A @ B)
    conc = relative_residual(Bh @ A, A @ Bh)
    return judge("fuglede", hyp, conc, tols, witness=A, instance_id=instance_id)


def putnam_check(B, C, A, tols=Tolerances(), instance_id=""):
    """``B A = A C  =>  B* A = A C*`` for normal `B`, `C`."""
    B = as_cmatrix(B, "B")
    C = as_cmatrix(C, "C")
    A = as_cmatrix(A, "A")
    _check_pair(B, C, A)
    _gate(B)
    _gate(C)
    hyp = relative_residual(B @ A, A @ C)
    conc = relative_residual(B.conj().T @ A, A @ C.conj().T)
    return judge("putnam", hyp, conc, tols, witness=A, instance_id=instance_id)


def adjoint_transport_check(B, C, A, tols=Tolerances(), instance_id=""):
    """``B A = A C  =>  C A* = A* B`` for normal `B`, `C`."""
    B = as_cmatrix(B, "B")
    C = as_cmatrix(C, "C")
    A = as_cmatrix(A, "A")
    _check_pair(B, C, A)
    _gate(B)
    _gate(C)
    Ah = A.conj().T
    hyp = relative_residual(B @ A, A @ C)
    conc = relative_residual(C @ Ah, Ah @ B)
    return judge("adjoint_transport", hyp, conc, tols, witness=A, instance_id=instance_id)


@dataclass(frozen=True)
class NormIdentityReport:
    max_discrepancy: float
    normal: bool
    scale: float

    @property
    def holds(self):
        """Discrepancy within ``NORM_IDENTITY_TOL * ||B||_F ||T||_F``."""
        return self.max_discrepancy <= NORM_IDENTITY_TOL * max(self.scale, 1e-300)


def norm_identity_check(B, T):
    """Largest ``| ||B* T x|| - ||B T x|| |`` over standard basis vectors x."""
    B = as_cmatrix(B, "B")
    T = as_cmatrix(T, "T")
    _require_square(B, "B")
    if T.shape[0] != B.shape[0]:
        raise ShapeError(f"T{T.shape} cannot be followed by B{B.shape}")
    BT = B @ T
    BhT = B.conj().T @ T
    disc = np.abs(np.linalg.norm(BhT, axis=0) - np.linalg.norm(BT, axis=0))
    return NormIdentityReport(
        max_discrepancy=float(disc.max()),
        normal=normality_residual(B) <= NORMAL_GATE,
        scale=float(np.linalg.norm(B, "fro") * np.linalg.norm(T, "fro")),
    )


def selfadjoint_product_check(B, T, tols=Tolerances(), instance_id=""):
    """``BT`` Hermitian  =>  ``B*T`` Hermitian, for normal `B` and Hermitian `T`."""
    B = as_cmatrix(B, "B")
    T = as_cmatrix(T, "T")
    _check_pair(B, B, T)
    _gate(B)
    herm = relative_residual(T, T.conj().T)
    if herm > tols.hypothesis:
        raise ValueError(f"T is not Hermitian: residual {herm:.3e}")
    BT = B @ T
    BhT = B.conj().T @ T
    hyp = relative_residual(BT, BT.conj().T)
    conc = relative_residual(BhT, BhT.conj().T)
    return judge("selfadjoint_product", hyp, conc, tols, witness=T, instance_id=instance_id)

