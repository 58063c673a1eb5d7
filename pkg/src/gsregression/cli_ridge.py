from pathlib import Path
from typing import List, Optional

import click

from gsregression.analysis.analysis import fit_table
from gsregression.cli_options import (
    alternative_option,
    dataset_options,
    output_options,
    preprocessing_options,
)
from gsregression.regression.regression import ridge_fit
from gsregression.utils.output import write_table
from gsregression.utils.utils import load_dataset


def _ridge_policy(ctx, param, value: str):
    if value == "auto":
        return value
    try:
        return float(value)
    except ValueError:
        raise click.BadParameter(f"expected 'auto' or a non-negative number, got {value!r}")


@click.command("ridge")
@dataset_options
@click.option(
    "--k",
    "k_policy",
    required=False,
    help="Shrinkage constant, or 'auto' for k = p s^2 / ||alpha-hat||^2.",
    type=str,
    default="auto",
    show_default=True,
    callback=_ridge_policy,
)
@preprocessing_options(scale_default=False)
@alternative_option
@output_options
def ridge_command(
    input_path: Optional[Path],
    response: str,
    predictors: Optional[List[str]],
    k_policy,
    center: bool,
    scale: bool,
    alternative: str,
    out: Optional[Path],
    output_format: str,
):
    """Fit a ridge regression and test every coefficient against t on n - p degrees of freedom."""
    dataset = load_dataset(input_path, response, predictors)
    fit = ridge_fit(dataset.design(center, scale), dataset.response(center), k_policy, alternative)
    write_table(fit_table(fit), out, output_format)
