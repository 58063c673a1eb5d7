import unittest

import numpy as np
from numpy.testing import assert_allclose

from gsregression.linalg.gram_schmidt import (
    DesignMatrix,
    design_matrix,
    gram_schmidt,
    invert_upper_triangular,
    stack_replicates,
    validate_order,
)
from gsregression.utils.custom_exceptions import (
    InvalidDesignError,
    InvalidOrderError,
    RankDeficientError,
    SingularMatrixError,
)

padded_identity = np.vstack([np.eye(3), np.zeros((1, 3))])
two_columns = np.array([[1.0, 1.0], [0.0, 1.0], [0.0, 0.0], [0.0, 0.0]])


class TestDesignMatrix(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        cls.rng = np.random.default_rng(11)
        cls.values = cls.rng.normal(loc=3.0, scale=[1.0, 5.0, 0.2], size=(40, 3))

    def test_design_matrix_center(self):
        M = design_matrix(self.values, ["a", "b", "c"], center=True)
        assert_allclose(M.values.mean(axis=0), np.zeros(3), atol=1e-12)
        self.assertTrue(M.centered)
        self.assertFalse(M.scaled)

    def test_design_matrix_center_and_scale(self):
        M = design_matrix(self.values, center=True, scale=True)
        assert_allclose(M.values.std(axis=0, ddof=1), np.ones(3), rtol=1e-12)
        self.assertEqual(M.col_names, ("m1", "m2", "m3"))

    def test_values_are_read_only(self):
        M = design_matrix(self.values)
        with self.assertRaises(ValueError):
            M.values[0, 0] = 1.0

    def test_too_few_rows(self):
        with self.assertRaises(InvalidDesignError):
            DesignMatrix(values=np.ones((3, 3)), col_names=("a", "b", "c"))

    def test_name_count_mismatch(self):
        with self.assertRaises(InvalidDesignError):
            DesignMatrix(values=self.values, col_names=("a", "b"))

    def test_zero_column(self):
        values = self.values.copy()
        values[:, 1] = 0.0
        with self.assertRaises(RankDeficientError) as context:
            design_matrix(values)
        self.assertEqual(context.exception.position, 2)

    def test_non_finite(self):
        values = self.values.copy()
        values[4, 0] = np.nan
        with self.assertRaises(InvalidDesignError):
            design_matrix(values)

    def test_permuted(self):
        M = design_matrix(self.values, ["a", "b", "c"])
        permuted = M.permuted([2, 0, 1])
        self.assertEqual(permuted.col_names, ("c", "a", "b"))
        assert_allclose(permuted.values[:, 0], self.values[:, 2])


class TestValidateOrder(unittest.TestCase):
    def test_none_is_identity(self):
        self.assertEqual(validate_order(None, 4), (0, 1, 2, 3))

    def test_repeated_index(self):
        with self.assertRaises(InvalidOrderError):
            validate_order([0, 0, 1], 3)

    def test_out_of_range(self):
        with self.assertRaises(InvalidOrderError):
            validate_order([0, 1, 3], 3)


class TestGramSchmidt(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        cls.rng = np.random.default_rng(2024)
        cls.random_design = design_matrix(cls.rng.normal(size=(200, 5)))

    def test_identity_padded(self):
        decomposition = gram_schmidt(design_matrix(padded_identity))
        assert_allclose(decomposition.X, padded_identity, atol=1e-15)
        assert_allclose(decomposition.Q, np.eye(3), atol=1e-15)

    def test_two_vectors_by_hand(self):
        decomposition = gram_schmidt(design_matrix(two_columns), order=[0, 1])
        assert_allclose(decomposition.X[:, 0], [1.0, 0.0, 0.0, 0.0])
        assert_allclose(decomposition.X[:, 1], [0.0, 1.0, 0.0, 0.0])
        assert_allclose(decomposition.Q, [[1.0, 1.0], [0.0, 1.0]])
        assert_allclose(decomposition.q_rows, [[1.0, -1.0], [0.0, 1.0]])

    def test_orthonormal_and_reconstructs(self):
        decomposition = gram_schmidt(self.random_design)
        X, Q = decomposition.X, decomposition.Q
        self.assertLess(np.max(np.abs(X.T @ X - np.eye(5))), 1e-10)
        assert_allclose(X @ Q, self.random_design.values, atol=1e-10)
        assert_allclose(np.tril(Q, -1), np.zeros((5, 5)))
        self.assertTrue(np.all(np.diag(Q) > 0))

    def test_matches_householder_qr(self):
        q, r = np.linalg.qr(self.random_design.values)
        signs = np.sign(np.diag(r))
        decomposition = gram_schmidt(self.random_design)
        assert_allclose(decomposition.Q, signs[:, np.newaxis] * r, atol=1e-10)
        assert_allclose(decomposition.X, q * signs, atol=1e-10)

    def test_permuted_order(self):
        order = (3, 0, 4, 1, 2)
        decomposition = gram_schmidt(self.random_design, order)
        self.assertEqual(decomposition.order, order)
        self.assertEqual(decomposition.col_names, ("m4", "m1", "m5", "m2", "m3"))
        assert_allclose(
            decomposition.X @ decomposition.Q,
            self.random_design.values[:, list(order)],
            atol=1e-10,
        )

    def test_first_position_is_normalised_column(self):
        decomposition = gram_schmidt(self.random_design, (2, 0, 1, 3, 4))
        column = self.random_design.values[:, 2]
        assert_allclose(decomposition.X[:, 0], column / np.linalg.norm(column))
        self.assertAlmostEqual(decomposition.Q[0, 0], np.linalg.norm(column))

    def test_q_norms(self):
        decomposition = gram_schmidt(self.random_design)
        assert_allclose(decomposition.q_norms, np.linalg.norm(decomposition.q_rows, axis=1))

    def test_exact_collinearity(self):
        values = self.rng.normal(size=(10, 2))
        values[:, 1] = 2.0 * values[:, 0]
        with self.assertRaises(RankDeficientError) as context:
            gram_schmidt(design_matrix(values))
        self.assertEqual(context.exception.position, 2)

    def test_near_collinearity_reorthogonalised(self):
        values = self.rng.normal(size=(50, 2))
        values[:, 1] = values[:, 0] + 1e-6 * values[:, 1]
        decomposition = gram_schmidt(design_matrix(values))
        self.assertLess(abs(decomposition.X[:, 0] @ decomposition.X[:, 1]), 1e-10)


class TestInvertUpperTriangular(unittest.TestCase):
    def test_identity(self):
        assert_allclose(invert_upper_triangular(np.eye(3)), np.eye(3))

    def test_two_by_two(self):
        assert_allclose(
            invert_upper_triangular(np.array([[2.0, 1.0], [0.0, 4.0]])),
            [[0.5, -0.125], [0.0, 0.25]],
        )

    def test_random_well_conditioned(self):
        rng = np.random.default_rng(5)
        Q = np.triu(rng.uniform(-1.0, 1.0, size=(5, 5))) + 3.0 * np.eye(5)
        assert_allclose(Q @ invert_upper_triangular(Q), np.eye(5), atol=1e-12)

    def test_singular(self):
        with self.assertRaises(SingularMatrixError):
            invert_upper_triangular(np.array([[1.0, 2.0], [0.0, 0.0]]))


class TestStackReplicates(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        cls.M = design_matrix(np.random.default_rng(8).normal(size=(10, 2)))

    def test_single_copy(self):
        assert_allclose(stack_replicates(self.M, 1).values, self.M.values)

    def test_q_scales_with_root_k(self):
        Q = gram_schmidt(self.M).Q
        for k in (2, 4, 9):
            stacked = gram_schmidt(stack_replicates(self.M, k)).Q
            assert_allclose(stacked, np.sqrt(k) * Q, rtol=1e-8, atol=1e-12)

    def test_invalid_count(self):
        with self.assertRaises(InvalidDesignError):
            stack_replicates(self.M, 0)
        with self.assertRaises(InvalidDesignError):
            stack_replicates(self.M, 1.5)
