from pathlib import Path
from typing import List, Optional

import click

from gsregression.cli_options import float_list, int_list, name_list, output_options
from gsregression.power.power import (
    DEFAULT_GRID_POINTS,
    DEFAULT_LEVEL,
    DEFAULT_N,
    DEFAULT_P_GRID,
    DEFAULT_REPLICATES,
    DEFAULT_RHO_GRID,
    inv_sigma_grid,
    power_grid,
    workers_from_env,
)
from gsregression.regression.regression import MODEL_KINDS
from gsregression.utils.custom_exceptions import InvalidScenarioError, MutuallyExclusiveOptionError
from gsregression.utils.output import write_table

PLOT_DATA_COLUMNS = ["scenario", "model", "inv_sigma", "power", "mc_se", "mean_delta", "vif"]


@click.command("power")
@click.option(
    "--rho",
    required=False,
    help="Comma-separated correlation loadings.",
    type=str,
    default=",".join(str(value) for value in DEFAULT_RHO_GRID),
    show_default=True,
    callback=float_list,
)
@click.option(
    "--p",
    "ps",
    required=False,
    help="Comma-separated predictor counts.",
    type=str,
    default=",".join(str(value) for value in DEFAULT_P_GRID),
    show_default=True,
    callback=int_list,
)
@click.option(
    "--n", required=False, help="Sample size.", type=int, default=DEFAULT_N, show_default=True
)
@click.option(
    "--reps",
    required=False,
    help="Simulated studies per grid point.",
    type=int,
    default=DEFAULT_REPLICATES,
    show_default=True,
)
@click.option("--seed", required=False, help="Master seed.", type=int, default=0, show_default=True)
@click.option(
    "--models",
    required=False,
    help="Comma-separated subset of naive, gs, ridge.",
    type=str,
    default=",".join(MODEL_KINDS),
    show_default=True,
    callback=name_list,
)
@click.option(
    "--sigma-grid",
    required=False,
    help="Comma-separated error standard deviations.",
    type=str,
    default=None,
    callback=float_list,
    cls=MutuallyExclusiveOptionError,
    mutually_exclusive=["grid_points"],
)
@click.option(
    "--grid-points",
    required=False,
    help="Number of equispaced 1/sigma values in (0, 1].",
    type=int,
    default=DEFAULT_GRID_POINTS,
    show_default=True,
    cls=MutuallyExclusiveOptionError,
    mutually_exclusive=["sigma_grid"],
)
@click.option(
    "--level",
    required=False,
    help="Significance level of the one-sided tests.",
    type=float,
    default=DEFAULT_LEVEL,
    show_default=True,
)
@click.option(
    "--null-first",
    is_flag=True,
    default=False,
    help="Simulate every model under its own null for the first coefficient.",
)
@click.option(
    "--plot-data",
    required=False,
    help="Path to a long-format CSV for plotting the power curves.",
    type=Path,
    default=None,
)
@output_options
def power_command(
    rho: List[float],
    ps: List[int],
    n: int,
    reps: int,
    seed: int,
    models: List[str],
    sigma_grid: Optional[List[float]],
    grid_points: int,
    level: float,
    null_first: bool,
    plot_data: Optional[Path],
    out: Optional[Path],
    output_format: str,
):
    """
    Monte Carlo power of the first-coefficient one-sided t-test over a rho x p x 1/sigma grid.

    Worker processes are read from GSREG_WORKERS (0 uses every CPU).

    Args:
        rho (List[float]): Correlation loadings.
        ps (List[int]): Predictor counts.
        n (int): Sample size.
        reps (int): Simulated studies per grid point.
        seed (int): Master seed.
        models (List[str]): Models to test.
        sigma_grid (List[float]): Error standard deviations, overriding the 1/sigma grid.
        grid_points (int): Size of the equispaced 1/sigma grid.
        level (float): Significance level.
        null_first (bool): Null mode.
        plot_data (Path): Optional plot-data CSV.
        out (Path): Output file, standard output if not given.
        output_format (str): tsv, csv or json.
    """
    if sigma_grid is not None:
        if any(sigma <= 0 for sigma in sigma_grid):
            raise InvalidScenarioError(f"sigma values must be positive, got {sigma_grid}")
        inv_sigmas = [1.0 / sigma for sigma in sigma_grid]
    else:
        inv_sigmas = inv_sigma_grid(grid_points)
    table = power_grid(
        rhos=rho,
        ps=ps,
        inv_sigmas=inv_sigmas,
        n=n,
        replicates=reps,
        seed=seed,
        models=models,
        level=level,
        null_first=null_first,
        workers=workers_from_env(),
    )
    if plot_data is not None:
        table.select(PLOT_DATA_COLUMNS).write_csv(plot_data)
    write_table(table, out, output_format)
