import math
import unittest

import numpy as np
from numpy.testing import assert_allclose

from gsregression.analysis.analysis import (
    POLLUTANTS,
    POLLUTANTS_FIRST_ORDER,
    delta_report_table,
    fit_table,
    order_indices,
    pollutant_orderings,
    run_gs_analysis,
)
from gsregression.regression.regression import ols_fit, ridge_fit
from gsregression.utils.custom_exceptions import InvalidOrderError
from gsregression.utils.utils import load_pollution_fixture

# Published estimates and two-sided p-values for the pollutants-first order.
published_fit = {
    "SO2": (203.50, "4.52e-07"),
    "HC": (-148.16, "9.36e-05"),
    "NOx": (120.12, "0.0011"),
    "Over65": (-107.23, "0.0033"),
    "HhSize": (61.88, "0.0799"),
    "Educ": (-146.74, "0.0001"),
    "Housing": (-70.09, "0.0484"),
    "Density": (68.09, "0.0548"),
    "NonWhite": (186.75, "2.35e-06"),
    "WhiteCollar": (-27.16, "0.4358"),
    "Poor": (-74.82, "0.0356"),
    "Precip": (35.95, "0.3036"),
    "JanTemp": (-53.62, "0.1275"),
    "JulyTemp": (-71.00, "0.0457"),
    "Humidity": (3.19, "0.9268"),
}

# Published two-sided p-values of SO2, HC and NOx under the other pollutant orders.
published_pollutant_p_values = {
    "a,c,b": ("4.52e-07", "0.00024", "0.00041"),
    "b,a,c": ("1.63e-08", "0.018", "0.0011"),
    "b,c,a": ("0.088", "0.018", "1.90e-09"),
    "c,a,b": ("1.26e-08", "0.00024", "0.29"),
    "c,b,a": ("0.088", "6.48e-10", "0.29"),
}


def printed_tolerance(text: str) -> float:
    """One unit in the second significant figure, or half a unit in the last printed decimal."""
    value = float(text)
    tolerance = 10.0 ** (math.floor(math.log10(value)) - 1)
    if "e" not in text:
        decimals = len(text.split(".")[1])
        tolerance = max(tolerance, 0.5 * 10.0**-decimals)
    return tolerance


class TestOrders(unittest.TestCase):
    def test_pollutant_orderings(self):
        orderings = pollutant_orderings()
        self.assertEqual(len(orderings), 6)
        self.assertEqual(orderings["a,b,c"], POLLUTANTS_FIRST_ORDER)
        self.assertEqual(orderings["c,a,b"][:3], ("NOx", "SO2", "HC"))
        for order in orderings.values():
            self.assertEqual(sorted(order), sorted(POLLUTANTS_FIRST_ORDER))

    def test_order_indices(self):
        names = ["a", "b", "c"]
        self.assertEqual(order_indices(names, None), (0, 1, 2))
        self.assertEqual(order_indices(names, ["c", "a", "b"]), (2, 0, 1))

    def test_unknown_name(self):
        with self.assertRaises(InvalidOrderError):
            order_indices(["a", "b"], ["a", "z"])

    def test_not_a_permutation(self):
        with self.assertRaises(InvalidOrderError):
            order_indices(["a", "b", "c"], ["a", "a", "b"])
        with self.assertRaises(InvalidOrderError):
            order_indices(["a", "b", "c"], ["a", "b"])


class TestPollutionAnalysis(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        cls.dataset = load_pollution_fixture()
        cls.report = run_gs_analysis(cls.dataset, POLLUTANTS_FIRST_ORDER)

    def test_degrees_of_freedom(self):
        self.assertEqual(self.report.fit.df_resid, 45)

    def test_estimates(self):
        fit = self.report.fit
        self.assertEqual(fit.col_names, POLLUTANTS_FIRST_ORDER)
        for i, name in enumerate(fit.col_names):
            self.assertAlmostEqual(fit.coef[i], published_fit[name][0], delta=0.5, msg=name)

    def test_p_values(self):
        fit = self.report.fit
        for i, name in enumerate(fit.col_names):
            expected = published_fit[name][1]
            self.assertAlmostEqual(
                fit.p_two_sided[i], float(expected), delta=printed_tolerance(expected), msg=name
            )

    def test_pollutant_orders(self):
        for label, expected in published_pollutant_p_values.items():
            order = pollutant_orderings()[label]
            fit = run_gs_analysis(self.dataset, order).fit
            for pollutant, text in zip(("SO2", "HC", "NOx"), expected):
                position = order.index(pollutant)
                self.assertAlmostEqual(
                    fit.p_two_sided[position],
                    float(text),
                    delta=printed_tolerance(text),
                    msg=f"{label} {pollutant}",
                )

    def test_first_position_depends_only_on_first_variable(self):
        first = run_gs_analysis(self.dataset, pollutant_orderings()["a,c,b"]).fit
        self.assertEqual(first.col_names[0], POLLUTANTS["a"])
        self.assertAlmostEqual(first.coef[0], self.report.fit.coef[0], places=8)

    def test_last_position_matches_naive_test(self):
        naive = ols_fit(self.dataset.design(), self.dataset.response())
        last = self.dataset.predictor_names.index("Humidity")
        self.assertAlmostEqual(self.report.fit.t_stat[-1], naive.t_stat[last], places=8)

    def test_scaling_leaves_tests_unchanged(self):
        scaled = run_gs_analysis(self.dataset, POLLUTANTS_FIRST_ORDER, scale=True)
        assert_allclose(scaled.fit.coef, self.report.fit.coef, rtol=1e-9)
        assert_allclose(scaled.fit.p_two_sided, self.report.fit.p_two_sided, rtol=1e-7)
        self.assertTrue(scaled.scale)

    def test_report_table(self):
        table = self.report.table()
        self.assertEqual(table.height, 15)
        self.assertEqual(
            table.columns,
            [
                "position",
                "variable",
                "estimate",
                "std_error",
                "t_value",
                "p_two_sided",
                "p_one_sided",
                "effect_size",
                "effect_sd",
                "delta_hat",
                "vif",
            ],
        )
        self.assertEqual(table["variable"].to_list(), list(POLLUTANTS_FIRST_ORDER))
        self.assertEqual(table["estimate"][0], "203.50")
        self.assertNotEqual(table["delta_hat"][0], "NA")

    def test_uncentered_report_has_no_diagnostics(self):
        report = run_gs_analysis(self.dataset, POLLUTANTS_FIRST_ORDER, center=False)
        self.assertIsNone(report.diagnostics)
        self.assertEqual(set(report.table()["vif"].to_list()), {"NA"})
        self.assertEqual(report.fit.df_resid, 45)

    def test_diagnostics_follow_order(self):
        names = [entry.name for entry in self.report.diagnostics.per_variable]
        self.assertEqual(names, list(POLLUTANTS_FIRST_ORDER))
        self.assertGreater(self.report.diagnostics.condition_number, 1.0)


class TestTables(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        cls.dataset = load_pollution_fixture(["SO2", "HC", "NOx"])

    def test_fit_table(self):
        fit = ols_fit(self.dataset.design(), self.dataset.response())
        table = fit_table(fit)
        self.assertEqual(table["variable"].to_list(), ["SO2", "HC", "NOx"])
        self.assertNotIn("ridge_k", table.columns)
        self.assertEqual(
            table.columns,
            ["variable", "estimate", "std_error", "t_value", "p_one_sided", "p_two_sided"],
        )

    def test_ridge_table(self):
        fit = ridge_fit(self.dataset.design(), self.dataset.response(), 2.0)
        table = fit_table(fit)
        self.assertEqual(table["ridge_k"].to_list(), ["2.000000"] * 3)

    def test_delta_report_table(self):
        report = run_gs_analysis(self.dataset, ["NOx", "SO2", "HC"])
        table = delta_report_table(report.diagnostics)
        self.assertEqual(table["position"].to_list(), [1, 2, 3])
        self.assertEqual(table["variable"].to_list(), ["NOx", "SO2", "HC"])
        self.assertEqual(len(set(table["condition_number"].to_list())), 1)
        self.assertEqual(set(table["basis"].to_list()), {"estimated"})
        self.assertTrue(np.all(np.array(table["vif"].cast(float).to_list()) >= 1.0))
