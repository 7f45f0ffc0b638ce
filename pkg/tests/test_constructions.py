import numpy as np
import pytest

from fuglede_lab.constructions import (
    BlockPair, NotUnitaryError, berberian_double, berberian_embed,
    derive_seed, jordan_witness, prop25_pair, random_commutant_element,
    random_normal_with_spectrum, random_unitary, splitmix64,
)
from fuglede_lab.intertwine import (
    expected_dimension, flip_check, fuglede_check, intertwiner_space,
    putnam_check,
)
from fuglede_lab.matrix import ShapeError
from fuglede_lab.report import Verdict
from fuglede_lab.spectral import decompose, normality_residual


def rand(seed, n):
    g = np.random.default_rng(seed)
    return g.standard_normal((n, n)) + 1j * g.standard_normal((n, n))


class TestBerberian:
    def test_double_small(self):
        np.testing.assert_array_equal(berberian_double(np.eye(2), np.eye(2)), np.eye(4))
        np.testing.assert_array_equal(berberian_double([[1]], [[2]]), np.diag([1, 2]))

    def test_double_normal(self):
        B = random_normal_with_spectrum([1, 1j], [2, 1], 1)
        C = random_normal_with_spectrum([2, -1], [1, 2], 2)
        assert normality_residual(berberian_double(B, C)) <= 1e-10

    def test_double_size_mismatch(self):
        with pytest.raises(ShapeError):
            berberian_double(np.eye(2), np.eye(3))

    def test_embed(self):
        np.testing.assert_array_equal(berberian_embed(np.zeros((2, 2))), np.zeros((4, 4)))
        E = berberian_embed(np.eye(2))
        np.testing.assert_array_equal(E[:2, 2:], np.eye(2))
        assert np.count_nonzero(E) == 2

    @pytest.mark.parametrize("n", [1, 2, 5])
    def test_product_blocks(self, n):
        # B~A~ = [[0, BA], [0, 0]] and A~B~ = [[0, AC], [0, 0]], zero blocks exactly zero
        B, C, A = rand(n, n), rand(n + 10, n), rand(n + 20, n)
        D, E = berberian_double(B, C), berberian_embed(A)
        left, right = D @ E, E @ D
        for M, block in ((left, B @ A), (right, A @ C)):
            assert not M[:n, :n].any() and not M[n:, :].any()
            # the product block is equal up to BLAS summation order
            np.testing.assert_allclose(M[:n, n:], block, rtol=1e-14, atol=1e-14)

    @pytest.mark.parametrize("seed", range(10))
    def test_putnam_equals_doubled_fuglede(self, seed):
        B = random_normal_with_spectrum([1, 2j, -1], [1, 2, 1], seed)
        C = random_normal_with_spectrum([1, 2j, 3], [2, 1, 1], seed + 50)
        A = intertwiner_space(B, C).combine(np.arange(1, 5)) if seed % 3 else rand(seed, 4)
        p = putnam_check(B, C, A)
        f = fuglede_check(berberian_double(B, C), berberian_embed(A))
        assert p.verdict is f.verdict


class TestProp25:
    def test_identity_case(self):
        A = np.array([[1, 2j], [-2j, 3]])
        pair = prop25_pair(np.eye(2), A)
        np.testing.assert_array_equal(pair.big_B, np.eye(4))
        np.testing.assert_array_equal(pair.big_A, pair.big_A.conj().T)
        assert pair.provenance == "prop25" and pair.block_dim == 2

    def test_phase_case(self):
        pair = prop25_pair(np.diag([1j, -1j]), np.eye(2))
        expected = np.zeros((4, 4))
        expected[:2, 2:] = expected[2:, :2] = np.eye(2)
        np.testing.assert_array_equal(pair.big_A, expected)
        assert flip_check(pair.big_B, pair.big_A).verdict is Verdict.PASS

    @pytest.mark.parametrize("seed", range(5))
    def test_random_commutant(self, seed):
        U = random_normal_with_spectrum([1, 1j, -1], [2, 2, 1], seed)
        A = random_commutant_element(U, seed)
        rep = flip_check(*(lambda p: (p.big_B, p.big_A))(prop25_pair(U, A)))
        assert rep.verdict is Verdict.PASS

    def test_projection_mode(self):
        U = np.diag([1, 1, -1]).astype(complex)
        pair = prop25_pair(U, rand(0, 3), project_to_commutant=True)
        A = pair.big_A[:3, 3:]
        assert np.linalg.norm(U @ A - A @ U) <= 1e-12
        assert flip_check(pair.big_B, pair.big_A).verdict is Verdict.PASS

    def test_non_unitary(self):
        with pytest.raises(NotUnitaryError):
            prop25_pair(2 * np.eye(2), np.eye(2))


class TestRandom:
    def test_unitary_scalar(self):
        u = random_unitary(1, 7)
        assert abs(abs(u[0, 0]) - 1) <= 1e-15

    @pytest.mark.parametrize("n", [2, 5, 16])
    def test_unitary(self, n):
        U = random_unitary(n, n)
        assert np.linalg.norm(U.conj().T @ U - np.eye(n)) <= 1e-12
        assert normality_residual(U) <= 1e-12

    def test_unitary_deterministic(self):
        assert np.array_equal(random_unitary(4, 42), random_unitary(4, 42))
        assert not np.array_equal(random_unitary(4, 42), random_unitary(4, 43))

    def test_single_eigenvalue(self):
        np.testing.assert_allclose(random_normal_with_spectrum([1], [3], 0), np.eye(3), atol=1e-14)

    def test_two_point_spectrum(self):
        B = random_normal_with_spectrum([1, -1], [1, 1], 5)
        assert normality_residual(B) <= 1e-12
        np.testing.assert_allclose(sorted(np.real(decompose(B).eigenvalues)), [-1, 1], atol=1e-12)

    def test_dimension_formula(self):
        B = random_normal_with_spectrum([2, 5], [2, 1], 8)
        d = decompose(B)
        assert expected_dimension(d, d) == 5
        assert intertwiner_space(B, B).dimension == 5

    def test_separation(self):
        with pytest.raises(ValueError):
            random_normal_with_spectrum([1, 1 + 1e-9], [1, 1], 0)

    def test_commutant_element(self):
        A = random_commutant_element(np.eye(3), 1)
        assert np.linalg.norm(A) == pytest.approx(1)
        D = random_commutant_element(np.diag([1, 2]), 2)
        assert abs(D[0, 1]) <= 1e-12 and abs(D[1, 0]) <= 1e-12
        assert np.linalg.norm(D) == pytest.approx(1)

    def test_seed_mixing(self):
        assert splitmix64(0) == 0xE220A8397B1DCDAF
        assert derive_seed(1, 0) != derive_seed(1, 1)
        assert derive_seed(2**64 - 1, 5) < 2**64


class TestJordan:
    def test_n2(self):
        pair = jordan_witness(2)
        rep = fuglede_check(pair.big_B, pair.big_A)
        assert rep.verdict is Verdict.FAIL
        assert rep.conclusion_residual == pytest.approx(np.sqrt(2), abs=1e-12)

    def test_n2_with_identity_passes(self):
        pair = jordan_witness(2)
        assert fuglede_check(pair.big_B, np.eye(2)).verdict is Verdict.PASS

    def test_n3(self):
        # B*A - AB* = diag(-1, 0, 1), both products have norm sqrt(2)
        rep = fuglede_check(*(lambda p: (p.big_B, p.big_A))(jordan_witness(3)))
        assert rep.verdict is Verdict.FAIL
        assert rep.conclusion_residual == pytest.approx(1.0, abs=1e-15)

    def test_too_small(self):
        with pytest.raises(ValueError):
            jordan_witness(1)

    def test_blockpair_type(self):
        assert isinstance(jordan_witness(4), BlockPair)
