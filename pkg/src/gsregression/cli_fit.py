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
from gsregression.regression.regression import ols_fit
from gsregression.utils.output import write_table
from gsregression.utils.utils import load_dataset


@click.command("fit")
@dataset_options
@preprocessing_options(scale_default=False)
@alternative_option
@output_options
def fit_command(
    input_path: Optional[Path],
    response: str,
    predictors: Optional[List[str]],
    center: bool,
    scale: bool,
    alternative: str,
    out: Optional[Path],
    output_format: str,
):
    """
    Fit the naive multiple regression without intercept and test every coefficient.

    Args:
        input_path (Path): CSV input, the bundled pollution data if not given.
        response (str): Response column.
        predictors (List[str]): Predictor columns.
        center (bool): Center the response and the predictors.
        scale (bool): Scale the predictors.
        alternative (str): Direction of the one-sided p-values.
        out (Path): Output file, standard output if not given.
        output_format (str): tsv, csv or json.
    """
    dataset = load_dataset(input_path, response, predictors)
    fit = ols_fit(dataset.design(center, scale), dataset.response(center), alternative)
    write_table(fit_table(fit), out, output_format)
