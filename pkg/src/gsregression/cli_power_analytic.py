from pathlib import Path
from typing import Optional

import click
import polars as pl

from gsregression.cli_options import output_options
from gsregression.power.power import DEFAULT_LEVEL, DEFAULT_N, analytic_power
from gsregression.utils.output import write_table


@click.command("power-analytic")
@click.option(
    "--model",
    required=True,
    help="A for the naive test, B for the Gram-Schmidt test.",
    type=click.Choice(["A", "B"]),
)
@click.option(
    "--effect",
    required=True,
    help="alpha_i for model A, beta_i for model B.",
    type=float,
)
@click.option("--sigma", required=True, help="Error standard deviation.", type=float)
@click.option(
    "--q-norm",
    required=False,
    help="Norm of q_i, the i-th row of Q^-1 (model A only).",
    type=float,
    default=1.0,
    show_default=True,
)
@click.option(
    "--n", required=False, help="Sample size.", type=int, default=DEFAULT_N, show_default=True
)
@click.option("--p", required=True, help="Number of predictors.", type=int)
@click.option(
    "--level",
    required=False,
    help="Significance level of the one-sided test.",
    type=float,
    default=DEFAULT_LEVEL,
    show_default=True,
)
@output_options
def power_analytic_command(
    model: str,
    effect: float,
    sigma: float,
    q_norm: float,
    n: int,
    p: int,
    level: float,
    out: Optional[Path],
    output_format: str,
):
    """Exact power of a one-sided coefficient t-test from the noncentral t distribution."""
    power = analytic_power(model, effect, sigma, q_norm, n, p, level)
    table = pl.DataFrame(
        {
            "model": [model],
            "effect": [effect],
            "sigma": [sigma],
            "q_norm": [q_norm],
            "n": [n],
            "p": [p],
            "level": [level],
            "power": [power],
        }
    )
    write_table(table, out, output_format)
