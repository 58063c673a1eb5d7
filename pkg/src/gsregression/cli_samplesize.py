from pathlib import Path
from typing import Optional

import click
import polars as pl

from gsregression.cli_options import output_options
from gsregression.diagnostics.diagnostics import equivalent_sample_size
from gsregression.utils.output import write_table


@click.command("samplesize")
@click.option("--delta", required=True, help="Delta of the tested variable.", type=float)
@click.option("--n-b", required=True, help="Sample size of the Gram-Schmidt study.", type=float)
@output_options
def samplesize_command(delta: float, n_b: float, out: Optional[Path], output_format: str):
    """
    Sample size a naive-regression study needs to match the power of a Gram-Schmidt study.

    Args:
        delta (float): Delta of the tested variable.
        n_b (float): Sample size of the Gram-Schmidt study.
        out (Path): Output file, standard output if not given.
        output_format (str): tsv, csv or json.
    """
    n_a = equivalent_sample_size(delta, n_b)
    table = pl.DataFrame({"delta": [delta], "n_b": [n_b], "n_a": [n_a], "ratio": [n_a / n_b]})
    write_table(table, out, output_format)
