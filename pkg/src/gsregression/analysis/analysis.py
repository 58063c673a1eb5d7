import itertools
import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import polars as pl

from gsregression.diagnostics.diagnostics import DeltaReport, delta_report
from gsregression.linalg.gram_schmidt import validate_order
from gsregression.regression.regression import EffectSize, FitResult, gs_effect_sizes, gs_fit
from gsregression.utils.custom_exceptions import InvalidOrderError
from gsregression.utils.output import format_number, format_p_value
from gsregression.utils.utils import Dataset

logger = logging.getLogger(__name__)

POLLUTANTS = {"a": "SO2", "b": "HC", "c": "NOx"}
SOCIODEMOGRAPHIC = (
    "Over65",
    "HhSize",
    "Educ",
    "Housing",
    "Density",
    "NonWhite",
    "WhiteCollar",
    "Poor",
)
WEATHER = ("Precip", "JanTemp", "JulyTemp", "Humidity")
POLLUTANTS_FIRST_ORDER = ("SO2", "HC", "NOx") + SOCIODEMOGRAPHIC + WEATHER


def pollutant_orderings() -> Dict[str, Tuple[str, ...]]:
    """
    Every ordering of the three pollutants, followed by the sociodemographic then the weather
    variables.

    Returns:
        Dict[str, Tuple[str, ...]]: Orders keyed by labels such as "b,a,c", where a is SO2,
        b is HC and c is NOx; "a,b,c" is POLLUTANTS_FIRST_ORDER.
    """
    orderings = {}
    for labels in itertools.permutations("abc"):
        pollutants = tuple(POLLUTANTS[label] for label in labels)
        orderings[",".join(labels)] = pollutants + SOCIODEMOGRAPHIC + WEATHER
    return orderings


def order_indices(
    predictor_names: Sequence[str], order: Optional[Sequence[str]]
) -> Tuple[int, ...]:
    """
    Translate an order given by column names into zero-based indices of `predictor_names`.

    Raises:
        InvalidOrderError: If a name is unknown or the names are not a permutation.
    """
    if order is None:
        return tuple(range(len(predictor_names)))
    positions = {name: i for i, name in enumerate(predictor_names)}
    unknown = [name for name in order if name not in positions]
    if unknown:
        raise InvalidOrderError(f"order names unknown predictors: {', '.join(unknown)}")
    return validate_order([positions[name] for name in order], len(predictor_names))


@dataclass
class GsAnalysisReport:
    """
    Gram-Schmidt analysis of a Dataset.

    Attributes:
        fit (FitResult): The gs fit, in orthogonalisation order.
        effects (List[EffectSize]): Effect size per GS position.
        diagnostics (DeltaReport, optional): Estimated deltas, VIFs and condition number;
            None for an uncentered design.
        center (bool): Whether y and the predictors were centered.
        scale (bool): Whether the predictors were scaled.
    """

    fit: FitResult
    effects: List[EffectSize] = field(default_factory=list)
    diagnostics: Optional[DeltaReport] = None
    center: bool = True
    scale: bool = False

    def table(self) -> pl.DataFrame:
        """The per-variable report with estimates, tests, effect sizes and diagnostics."""
        rows = []
        for i, name in enumerate(self.fit.col_names):
            entry = self.diagnostics.per_variable[i] if self.diagnostics else None
            rows.append(
                {
                    "position": i + 1,
                    "variable": name,
                    "estimate": format_number(float(self.fit.coef[i]), 2),
                    "std_error": format_number(float(self.fit.se[i]), 2),
                    "t_value": format_number(float(self.fit.t_stat[i]), 3),
                    "p_two_sided": format_p_value(float(self.fit.p_two_sided[i])),
                    "p_one_sided": format_p_value(float(self.fit.p_one_sided[i])),
                    "effect_size": format_number(self.effects[i].estimate, 4),
                    "effect_sd": format_number(self.effects[i].std_dev, 4),
                    "delta_hat": format_number(entry.delta, 3) if entry else "NA",
                    "vif": format_number(entry.vif, 2) if entry else "NA",
                }
            )
        return pl.DataFrame(rows)


def run_gs_analysis(
    dataset: Dataset,
    order: Optional[Sequence[str]] = None,
    center: bool = True,
    scale: bool = False,
    alternative: str = "greater",
) -> GsAnalysisReport:
    """
    Center (and optionally scale) a dataset, run the gs fit in the given order and collect the
    report.

    Scaling the predictors leaves the orthonormal basis, hence every estimate and test,
    unchanged; only the effect sizes move to standardised units.

    Args:
        dataset (Dataset): Response and predictors.
        order (Sequence[str], optional): Predictor names in orthogonalisation order; file order
            if None.
        center (bool): Center the response and the predictors.
        scale (bool): Scale the predictors to unit sample standard deviation.
        alternative (str): Direction of the one-sided p-values.

    Returns:
        GsAnalysisReport: Fit, effect sizes and diagnostics.
    """
    indices = order_indices(dataset.predictor_names, order)
    M = dataset.design(center=center, scale=scale)
    y = dataset.response(center=center)
    fit = gs_fit(M, y, indices, alternative)
    diagnostics = delta_report(M, fit.coef, indices, basis="estimated") if center else None
    if diagnostics is not None:
        logger.info(
            "condition number %.1f (%s collinearity)",
            diagnostics.condition_number,
            diagnostics.collinearity,
        )
    return GsAnalysisReport(
        fit=fit,
        effects=gs_effect_sizes(fit),
        diagnostics=diagnostics,
        center=center,
        scale=scale,
    )


def fit_table(fit: FitResult) -> pl.DataFrame:
    """Coefficient table of any fit: estimate, standard error, t value and both p-values."""
    table = pl.DataFrame(
        {
            "variable": list(fit.col_names),
            "estimate": [format_number(float(value), 4) for value in fit.coef],
            "std_error": [format_number(float(value), 4) for value in fit.se],
            "t_value": [format_number(float(value), 3) for value in fit.t_stat],
            "p_one_sided": [format_p_value(float(value)) for value in fit.p_one_sided],
            "p_two_sided": [format_p_value(float(value)) for value in fit.p_two_sided],
        }
    )
    if fit.ridge_k is not None:
        table = table.with_columns(pl.lit(format_number(fit.ridge_k, 6)).alias("ridge_k"))
    return table


def delta_report_table(report: DeltaReport) -> pl.DataFrame:
    entries = report.per_variable
    return pl.DataFrame(
        {
            "position": [entry.index + 1 for entry in entries],
            "variable": [entry.name for entry in entries],
            "delta": [format_number(entry.delta, 4) for entry in entries],
            "delta_squared": [format_number(entry.delta**2, 4) for entry in entries],
            "vif": [format_number(entry.vif, 3) for entry in entries],
            "condition_number": [format_number(report.condition_number, 2)] * len(entries),
            "collinearity": [report.collinearity] * len(entries),
            "basis": [report.basis] * len(entries),
            "note": [entry.note for entry in entries],
        }
    )
