from pathlib import Path
from typing import List, Optional

import click

from gsregression.analysis.analysis import order_indices
from gsregression.cli_options import (
    dataset_options,
    float_list,
    int_list,
    name_list,
    output_options,
)
from gsregression.distributions.distributions import Rng
from gsregression.power.power import DEFAULT_LEVEL, DEFAULT_REPLICATES, stacked_power_experiment
from gsregression.utils.custom_exceptions import InvalidDesignError, InvalidScenarioError
from gsregression.utils.output import write_table
from gsregression.utils.utils import load_dataset


@click.command("stacked-check")
@dataset_options
@click.option(
    "--alpha",
    required=True,
    help="Comma-separated naive-model coefficients, one per predictor in column order.",
    type=str,
    callback=float_list,
)
@click.option("--sigma", required=True, help="Error standard deviation.", type=float)
@click.option(
    "--index",
    required=False,
    help="1-based GS position of the tested variable.",
    type=int,
    default=1,
    show_default=True,
)
@click.option(
    "--order",
    required=False,
    help="Comma-separated predictor names in orthogonalisation order. Defaults to file order.",
    type=str,
    default=None,
    callback=name_list,
)
@click.option(
    "--delta",
    required=False,
    help="Delta of the tested variable. Computed from --alpha when not given.",
    type=float,
    default=None,
)
@click.option(
    "--k-grid",
    required=False,
    help="Comma-separated replicate counts of the Gram-Schmidt study.",
    type=str,
    default="1,2,4,8,16",
    show_default=True,
    callback=int_list,
)
@click.option(
    "--reps",
    required=False,
    help="Simulated studies per design.",
    type=int,
    default=DEFAULT_REPLICATES,
    show_default=True,
)
@click.option("--seed", required=False, help="Master seed.", type=int, default=0, show_default=True)
@click.option(
    "--level",
    required=False,
    help="Significance level of the one-sided tests.",
    type=float,
    default=DEFAULT_LEVEL,
    show_default=True,
)
@click.option(
    "--center/--no-center",
    default=False,
    show_default=True,
    help="Center the pilot design.",
)
@output_options
def stacked_check_command(
    input_path: Optional[Path],
    response: str,
    predictors: Optional[List[str]],
    alpha: List[float],
    sigma: float,
    index: int,
    order: Optional[List[str]],
    delta: Optional[float],
    k_grid: List[int],
    reps: int,
    seed: int,
    level: float,
    center: bool,
    out: Optional[Path],
    output_format: str,
):
    """
    Compare naive and Gram-Schmidt power on stacked copies of a pilot design, the naive study
    being delta^2 times larger.
    """
    dataset = load_dataset(input_path, response, predictors)
    M0 = dataset.design(center=center, scale=False)
    if len(alpha) != M0.p:
        raise InvalidDesignError(f"--alpha has {len(alpha)} values for {M0.p} predictors")
    if not 1 <= index <= M0.p:
        raise InvalidScenarioError(f"--index must lie in 1..{M0.p}, got {index}")
    table = stacked_power_experiment(
        M0,
        alpha,
        sigma,
        k_grid,
        level=level,
        rng=Rng(seed),
        delta_i=delta,
        position=index - 1,
        order=order_indices(dataset.predictor_names, order),
        replicates=reps,
    )
    write_table(table, out, output_format)
