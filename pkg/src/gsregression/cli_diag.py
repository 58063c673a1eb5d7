from pathlib import Path
from typing import List, Optional

import click

from gsregression.analysis.analysis import delta_report_table, order_indices
from gsregression.cli_options import dataset_options, float_list, name_list, output_options
from gsregression.diagnostics.diagnostics import delta_report
from gsregression.regression.regression import gs_fit
from gsregression.utils.custom_exceptions import InvalidDesignError
from gsregression.utils.output import write_table
from gsregression.utils.utils import load_dataset


@click.command("diag")
@dataset_options
@click.option(
    "--order",
    required=False,
    help="Comma-separated predictor names in orthogonalisation order. Defaults to file order.",
    type=str,
    default=None,
    callback=name_list,
)
@click.option(
    "--beta",
    required=False,
    help="Comma-separated true GS coefficients in orthogonalisation order, for planning. "
    "Defaults to the estimates of a gs fit.",
    type=str,
    default=None,
    callback=float_list,
)
@click.option(
    "--scale/--no-scale",
    default=False,
    show_default=True,
    help="Scale predictors to unit sample standard deviation.",
)
@output_options
def diag_command(
    input_path: Optional[Path],
    response: str,
    predictors: Optional[List[str]],
    order: Optional[List[str]],
    beta: Optional[List[float]],
    scale: bool,
    out: Optional[Path],
    output_format: str,
):
    """
    Report delta, VIF and the condition number of a centered design.

    Args:
        input_path (Path): CSV input, the bundled pollution data if not given.
        response (str): Response column.
        predictors (List[str]): Predictor columns.
        order (List[str]): Orthogonalisation order.
        beta (List[float]): True GS coefficients; estimated when not given.
        scale (bool): Scale the predictors.
        out (Path): Output file, standard output if not given.
        output_format (str): tsv, csv or json.
    """
    dataset = load_dataset(input_path, response, predictors)
    indices = order_indices(dataset.predictor_names, order)
    M = dataset.design(center=True, scale=scale)
    if beta is None:
        coefficients, basis = gs_fit(M, dataset.response(True), indices).coef, "estimated"
    else:
        if len(beta) != M.p:
            raise InvalidDesignError(f"--beta has {len(beta)} values for {M.p} predictors")
        coefficients, basis = beta, "true_beta"
    report = delta_report(M, coefficients, indices, basis)
    write_table(delta_report_table(report), out, output_format)
