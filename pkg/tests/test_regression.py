import unittest

import numpy as np
import statsmodels.api as sm
from numpy.testing import assert_allclose

from gsregression.linalg.gram_schmidt import design_matrix, gram_schmidt, stack_replicates
from gsregression.regression.regression import (
    gs_effect_size,
    gs_effect_sizes,
    gs_fit,
    hkb_constant,
    marginal_fit,
    ols_fit,
    ridge_fit,
    ridge_k_auto,
)
from gsregression.utils.custom_exceptions import (
    InvalidDesignError,
    NegativeRidgeError,
    NotCenteredError,
    ZeroCoefficientsError,
)


def random_problem(seed: int, n: int, p: int, center: bool = False):
    rng = np.random.default_rng(seed)
    values = rng.normal(size=(n, p)) @ (np.eye(p) + 0.4 * rng.normal(size=(p, p)))
    M = design_matrix(values, center=center)
    y = values @ rng.normal(size=p) + rng.normal(size=n)
    if center:
        y = y - y.mean()
    return M, y


class TestOlsFit(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        cls.M, cls.y = random_problem(3, 50, 3)
        cls.fit = ols_fit(cls.M, cls.y)

    def test_matches_normal_equations(self):
        values = self.M.values
        expected = np.linalg.inv(values.T @ values) @ values.T @ self.y
        assert_allclose(self.fit.coef, expected, rtol=1e-10)

    def test_matches_statsmodels(self):
        reference = sm.OLS(self.y, self.M.values).fit()
        assert_allclose(self.fit.coef, reference.params, rtol=1e-10)
        assert_allclose(self.fit.se, reference.bse, rtol=1e-10)
        assert_allclose(self.fit.t_stat, reference.tvalues, rtol=1e-10)
        assert_allclose(self.fit.p_two_sided, reference.pvalues, rtol=1e-8)
        self.assertEqual(self.fit.df_resid, 47)

    def test_exact_fit_on_orthonormal_design(self):
        M = design_matrix(np.vstack([np.eye(3), np.zeros((2, 3))]))
        fit = ols_fit(M, 2.0 * M.values[:, 0])
        assert_allclose(fit.coef, [2.0, 0.0, 0.0], atol=1e-15)
        self.assertEqual(fit.sse, 0.0)

    def test_response_length(self):
        with self.assertRaises(InvalidDesignError):
            ols_fit(self.M, self.y[:-1])

    def test_alternative_less(self):
        greater = ols_fit(self.M, self.y, "greater")
        less = ols_fit(self.M, self.y, "less")
        assert_allclose(greater.p_one_sided + less.p_one_sided, np.ones(3), atol=1e-14)


class TestReparameterisation(unittest.TestCase):
    def test_random_designs(self):
        seed = 0
        for n in (30, 200):
            for p in (2, 5, 15):
                for _ in range(17):
                    seed += 1
                    M, y = random_problem(seed, n, p)
                    order = np.random.default_rng(seed).permutation(p)
                    naive = ols_fit(M, y)
                    gs = gs_fit(M, y, order)
                    decomposition = gram_schmidt(M, order)
                    alpha_gs_order = naive.coef[order]
                    assert_allclose(
                        decomposition.Q @ alpha_gs_order, gs.coef, rtol=1e-8, atol=1e-10
                    )
                    assert_allclose(gs.alpha, alpha_gs_order, rtol=1e-8, atol=1e-10)
                    self.assertAlmostEqual(naive.sse / gs.sse, 1.0, delta=1e-8)
                    s = np.sqrt(gs.sigma_hat2)
                    assert_allclose(
                        naive.se[order], s * decomposition.q_norms, rtol=1e-8
                    )

    def test_gs_standard_errors_are_s(self):
        M, y = random_problem(21, 40, 4)
        fit = gs_fit(M, y)
        assert_allclose(fit.se, np.full(4, np.sqrt(fit.sigma_hat2)))
        self.assertEqual(fit.model_kind, "gs")

    def test_gs_labels_follow_order(self):
        M, y = random_problem(22, 40, 3)
        fit = gs_fit(M, y, [2, 0, 1])
        self.assertEqual(fit.col_names, ("m3", "m1", "m2"))
        self.assertEqual(fit.order, (2, 0, 1))

    def test_single_predictor_matches_marginal(self):
        M, y = random_problem(23, 25, 1)
        gs = gs_fit(M, y)
        marginal = marginal_fit(M.values[:, 0], y)
        self.assertAlmostEqual(gs.t_stat[0], marginal.t_stat[0], delta=1e-12)

    def test_first_position_is_marginal_with_full_model_variance(self):
        M, y = random_problem(24, 60, 4)
        gs = gs_fit(M, y, [1, 0, 2, 3])
        marginal = marginal_fit(
            M.values[:, 1], y, sigma_hat2=gs.sigma_hat2, df_resid=gs.df_resid, name="m2"
        )
        self.assertAlmostEqual(gs.t_stat[0], marginal.t_stat[0], delta=1e-10)
        self.assertAlmostEqual(gs.p_two_sided[0], marginal.p_two_sided[0], delta=1e-12)

    def test_stacking_scales_beta_not_alpha(self):
        M, _ = random_problem(25, 10, 2)
        y = M.values @ np.array([1.5, -0.7])
        stacked = stack_replicates(M, 9)
        y_stacked = np.tile(y, 9)
        assert_allclose(gs_fit(stacked, y_stacked).coef, 3.0 * gs_fit(M, y).coef, rtol=1e-8)
        assert_allclose(ols_fit(stacked, y_stacked).coef, ols_fit(M, y).coef, rtol=1e-8)


class TestEffectSize(unittest.TestCase):
    def test_orthonormal_design(self):
        M = design_matrix(np.vstack([np.eye(2), np.zeros((3, 2))]))
        fit = gs_fit(M, np.array([1.0, 2.0, 0.1, -0.1, 0.0]))
        self.assertAlmostEqual(gs_effect_size(fit, 1).estimate, fit.coef[1])

    def test_direct_division(self):
        M = design_matrix(np.array([[1.0, 0.0], [0.0, 0.5], [0.0, 0.0], [0.0, 0.0]]))
        fit = gs_fit(M, np.array([0.0, 1.0, 0.3, -0.3]))
        self.assertAlmostEqual(fit.Q[1, 1], 0.5)
        self.assertAlmostEqual(fit.coef[1], 1.0)
        self.assertAlmostEqual(gs_effect_size(fit, 1).estimate, 2.0)

    def test_homogeneity(self):
        M, y = random_problem(26, 30, 3)
        scaled = design_matrix(M.values * np.array([1.0, 1.0, 4.0]))
        original, rescaled = gs_fit(M, y), gs_fit(scaled, y)
        self.assertAlmostEqual(rescaled.Q[2, 2], 4.0 * original.Q[2, 2])
        self.assertAlmostEqual(
            gs_effect_size(rescaled, 2).estimate * rescaled.Q[2, 2],
            gs_effect_size(original, 2).estimate * original.Q[2, 2],
        )

    def test_all_positions(self):
        M, y = random_problem(27, 30, 3)
        effects = gs_effect_sizes(gs_fit(M, y))
        self.assertEqual([effect.index for effect in effects], [0, 1, 2])

    def test_requires_gs_fit(self):
        M, y = random_problem(28, 30, 2)
        with self.assertRaises(ValueError):
            gs_effect_size(ols_fit(M, y), 0)


class TestRidgeFit(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        cls.M, cls.y = random_problem(31, 60, 3, center=True)

    def test_zero_k_is_ols(self):
        ridge = ridge_fit(self.M, self.y, 0.0)
        ols = ols_fit(self.M, self.y)
        assert_allclose(ridge.coef, ols.coef, rtol=1e-10)
        assert_allclose(ridge.se, ols.se, rtol=1e-10)
        self.assertEqual(ridge.ridge_k, 0.0)

    def test_matches_direct_inversion(self):
        values = self.M.values
        expected = np.linalg.inv(values.T @ values + np.eye(3)) @ values.T @ self.y
        assert_allclose(ridge_fit(self.M, self.y, 1.0).coef, expected, rtol=1e-10)

    def test_large_k_limit(self):
        M = design_matrix(self.M.values / np.linalg.norm(self.M.values, axis=0), center=True)
        k = 1e9
        fit = ridge_fit(M, self.y, k)
        assert_allclose(fit.coef, M.values.T @ self.y / k, rtol=1e-6)

    def test_callable_policy(self):
        fit = ridge_fit(self.M, self.y, lambda M, y: 2.5)
        self.assertEqual(fit.ridge_k, 2.5)

    def test_auto_policy(self):
        fit = ridge_fit(self.M, self.y)
        self.assertAlmostEqual(fit.ridge_k, ridge_k_auto(self.M, self.y))
        self.assertGreater(fit.ridge_k, 0.0)

    def test_negative_k(self):
        with self.assertRaises(NegativeRidgeError):
            ridge_fit(self.M, self.y, -1.0)

    def test_requires_centered_design(self):
        M, y = random_problem(32, 30, 2)
        with self.assertRaises(NotCenteredError):
            ridge_fit(M, y, 1.0)


class TestRidgeConstant(unittest.TestCase):
    def test_formula(self):
        self.assertAlmostEqual(hkb_constant(3, 1.0, [1.0, 1.0, -1.0]), 1.0)

    def test_noiseless_response(self):
        M, _ = random_problem(33, 30, 3, center=True)
        y = M.values @ np.array([1.0, 2.0, 3.0])
        self.assertAlmostEqual(ridge_k_auto(M, y), 0.0, places=12)

    def test_zero_coefficients(self):
        with self.assertRaises(ZeroCoefficientsError):
            hkb_constant(2, 1.0, [0.0, 0.0])
