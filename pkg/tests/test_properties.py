"""Invariants from every module, driven by hypothesis-chosen seeds and shapes."""

import numpy as np
from hypothesis import given, settings, strategies as st

from fuglede_lab.constructions import (
    berberian_double, berberian_embed, random_normal_with_spectrum,
)
from fuglede_lab.funcalc import (
    SpectrumFunction, apply_function, multiply_on_spectrum,
)
from fuglede_lab.intertwine import (
    expected_dimension, fuglede_check, intertwiner_space, norm_identity_check,
    putnam_check, theorem_check,
)
from fuglede_lab.matrix import relative_residual
from fuglede_lab.report import Verdict
from fuglede_lab.spectral import cluster_eigenvalues, decompose, reconstruct

BUILTIN_NAMES = ["identity", "conjugate", "square", "modulus_squared", "exponential"]
seeds = st.integers(0, 2**63 - 1)


def separated_points(g, k, sep=1e-2, radius=1.0):
    pts = []
    while len(pts) < k:
        z = radius * np.sqrt(g.uniform()) * np.exp(2j * np.pi * g.uniform())
        if all(abs(z - w) >= sep for w in pts):
            pts.append(z)
    return pts


def normal_matrix(seed, max_n=8, max_k=4, pool=None):
    g = np.random.default_rng(seed)
    n = int(g.integers(1, max_n + 1))
    k = int(g.integers(1, min(max_k, n) + 1))
    lam = separated_points(g, k) if pool is None else list(
        g.choice(pool, size=min(k, len(pool)), replace=False))
    cuts = np.sort(g.choice(np.arange(1, n), size=len(lam) - 1, replace=False)) if len(lam) > 1 else []
    mult = np.diff(np.concatenate(([0], cuts, [n]))).astype(int)
    return random_normal_with_spectrum(lam, mult, seed), lam, mult


def spectrum_function(g, kind):
    if kind == "polynomial":
        return SpectrumFunction.polynomial(g.standard_normal(int(g.integers(1, 5))) * (1 + 0.5j))
    return SpectrumFunction.builtin(kind)


function_kinds = st.sampled_from(BUILTIN_NAMES + ["polynomial"])


@settings(max_examples=40, deadline=None)
@given(seeds)
def test_spectral_invariants(seed):
    B, lam, mult = normal_matrix(seed, max_n=16, max_k=6)
    d = decompose(B)
    assert sorted(d.multiplicities) == sorted(mult)
    assert relative_residual(reconstruct(d), B) <= 1e-9
    n = d.dim
    for j, Ej in enumerate(d.projectors):
        assert np.linalg.norm(B @ Ej - Ej @ B) <= 1e-9 * max(np.linalg.norm(B), 1e-300)
        for k, Ek in enumerate(d.projectors):
            assert np.linalg.norm(Ej @ Ek - (Ej if j == k else 0)) <= 1e-10
    assert relative_residual(sum(d.projectors), np.eye(n)) <= 1e-10


@settings(max_examples=40, deadline=None)
@given(seeds, function_kinds, function_kinds)
def test_calculus_is_multiplicative(seed, kf, kg):
    B, _, _ = normal_matrix(seed)
    d = decompose(B)
    g = np.random.default_rng(seed)
    f, h = spectrum_function(g, kf), spectrum_function(g, kg)
    prod = multiply_on_spectrum(f, h, d.eigenvalues)
    fh = apply_function(d, f) @ apply_function(d, h)
    assert relative_residual(apply_function(d, prod), fh) <= 1e-9


@settings(max_examples=40, deadline=None)
@given(seeds)
def test_conjugate_calculus_is_adjoint(seed):
    B, _, _ = normal_matrix(seed, max_n=12)
    d = decompose(B)
    assert relative_residual(apply_function(d, SpectrumFunction.builtin("conjugate")),
                             reconstruct(d).conj().T) <= 1e-9


@settings(max_examples=30, deadline=None)
@given(seeds)
def test_solver_matches_oracle(seed):
    g = np.random.default_rng(seed)
    pool = separated_points(g, 5)
    L, _, _ = normal_matrix(seed, pool=pool)
    R, _, _ = normal_matrix(seed + 1, pool=pool)
    sp = intertwiner_space(L, R)
    assert sp.dimension == expected_dimension(decompose(L), decompose(R))
    V = sp.vectors()
    assert np.linalg.norm(V.conj().T @ V - np.eye(sp.dimension)) <= 1e-10
    assert sp.max_basis_residual <= 1e-8


@settings(max_examples=30, deadline=None)
@given(seeds)
def test_fuglede_space_identity(seed):
    g = np.random.default_rng(seed)
    pool = separated_points(g, 4)
    L, _, _ = normal_matrix(seed, pool=pool)
    R, _, _ = normal_matrix(seed + 7, pool=pool)
    P = intertwiner_space(L, R).projector()
    Q = intertwiner_space(L.conj().T, R.conj().T).projector()
    assert np.linalg.norm(P - Q) <= 1e-8


@settings(max_examples=30, deadline=None)
@given(seeds, function_kinds, function_kinds)
def test_theorem_on_every_basis_element(seed, kf, kg):
    g = np.random.default_rng(seed)
    f, h = spectrum_function(g, kf), spectrum_function(g, kg)
    # spectrum closed under one step of f so that the intertwiner space is non-trivial
    base = separated_points(g, 2, radius=0.9)
    lam = list(base)
    for z in base:
        w = complex(f(z))
        if abs(w) < 3 and all(abs(w - u) >= 1e-2 for u in lam):
            lam.append(w)
    B = random_normal_with_spectrum(lam, [1 + int(x) for x in g.integers(0, 2, len(lam))], seed)
    d = decompose(B)
    sp = intertwiner_space(B, apply_function(d, f))
    for X in sp.basis:
        rep = theorem_check(B, f, h, X, d=d)
        assert rep.verdict is Verdict.PASS, rep


@settings(max_examples=30, deadline=None)
@given(seeds, st.booleans())
def test_putnam_reduces_to_fuglede(seed, inside):
    g = np.random.default_rng(seed)
    pool = separated_points(g, 3)
    B, _, _ = normal_matrix(seed, pool=pool)
    n = B.shape[0]
    C = random_normal_with_spectrum(pool[: min(n, 3)], [1] * (min(n, 3) - 1) + [n - min(n, 3) + 1], seed + 3)
    A = (intertwiner_space(B, C).combine(g.standard_normal(n * n)) if inside
         else g.standard_normal((n, n)) + 0j)
    assert putnam_check(B, C, A).verdict is fuglede_check(
        berberian_double(B, C), berberian_embed(A)).verdict


@settings(max_examples=40, deadline=None)
@given(seeds)
def test_norm_identity_for_normal(seed):
    B, _, _ = normal_matrix(seed, max_n=10)
    T = np.random.default_rng(seed).standard_normal((B.shape[0], 4))
    rep = norm_identity_check(B, T)
    assert rep.normal and rep.holds


@settings(max_examples=60, deadline=None)
@given(st.lists(st.complex_numbers(max_magnitude=10, allow_nan=False, allow_infinity=False),
                min_size=1, max_size=12))
def test_clusters_partition(values):
    tol = 1e-8
    try:
        clusters = cluster_eigenvalues(values, tol)
    except ValueError:
        return  # ambiguous chains are legitimately rejected
    idx = sorted(i for c in clusters for i in c.indices)
    assert idx == list(range(len(values)))
    reps = [c.representative for c in clusters]
    for i, a in enumerate(reps):
        for b in reps[i + 1:]:
            assert abs(a - b) > tol


def test_theorem_on_every_basis_element_of_harness_corpus():
    from fuglede_lab.harness import SuiteConfig, build_instance

    cfg = SuiteConfig("theorem21", trials=100, max_dim=12, max_distinct_eigs=6, seed=11)
    checked = 0
    for t in range(cfg.trials):
        inst = build_instance(cfg, "theorem21", t)
        B = inst.matrices["B"]
        f, h = inst.functions
        d = decompose(B)
        for X in intertwiner_space(B, apply_function(d, f)).basis:
            assert theorem_check(B, f, h, X, d=d).verdict is Verdict.PASS
            checked += 1
    assert checked > 100
