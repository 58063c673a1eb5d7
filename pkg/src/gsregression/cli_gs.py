from pathlib import Path
from typing import List, Optional

import click

from gsregression.analysis.analysis import run_gs_analysis
from gsregression.cli_options import (
    alternative_option,
    dataset_options,
    name_list,
    output_options,
    preprocessing_options,
)
from gsregression.utils.output import write_table
from gsregression.utils.utils import load_dataset


@click.command("gs")
@dataset_options
@click.option(
    "--order",
    required=False,
    help="Comma-separated predictor names in orthogonalisation order. Defaults to file order.",
    type=str,
    default=None,
    callback=name_list,
)
@preprocessing_options(scale_default=False)
@alternative_option
@output_options
def gs_command(
    input_path: Optional[Path],
    response: str,
    predictors: Optional[List[str]],
    order: Optional[List[str]],
    center: bool,
    scale: bool,
    alternative: str,
    out: Optional[Path],
    output_format: str,
):
    """
    Run the Gram-Schmidt regression and write the per-variable report.

    Args:
        input_path (Path): CSV input, the bundled pollution data if not given.
        response (str): Response column.
        predictors (List[str]): Predictor columns.
        order (List[str]): Orthogonalisation order.
        center (bool): Center the response and the predictors.
        scale (bool): Scale the predictors.
        alternative (str): Direction of the one-sided p-values.
        out (Path): Output file, standard output if not given.
        output_format (str): tsv, csv or json.
    """
    dataset = load_dataset(input_path, response, predictors)
    report = run_gs_analysis(dataset, order, center, scale, alternative)
    write_table(report.table(), out, output_format)
