import json
import math
from pathlib import Path
from typing import Optional

import click
import polars as pl

OUTPUT_FORMATS = ("tsv", "csv", "json")


def format_p_value(p: float) -> str:
    """
    Render a p-value the way regression tables print them.

    Three significant figures in scientific notation below 1e-3, four decimals otherwise.
    """
    if p is None or math.isnan(p):
        return "NA"
    if p < 1e-3:
        return f"{p:.2e}"
    return f"{p:.4f}"


def format_number(value: float, decimals: int = 4) -> str:
    if value is None or math.isnan(value):
        return "NA"
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    return f"{value:.{decimals}f}"


def _json_value(value):
    if isinstance(value, float) and not math.isfinite(value):
        return None
    return value


def render_table(table: pl.DataFrame, output_format: str = "tsv") -> str:
    """
    Serialise a table as tab-separated, comma-separated or JSON (a list of row objects).

    Non-finite floats become null in JSON output.

    Args:
        table (pl.DataFrame): The table.
        output_format (str): One of "tsv", "csv", "json".

    Returns:
        str: The serialised table, newline terminated.
    """
    if output_format == "tsv":
        return table.write_csv(separator="\t")
    if output_format == "csv":
        return table.write_csv()
    if output_format == "json":
        rows = [{key: _json_value(value) for key, value in row.items()} for row in table.to_dicts()]
        return json.dumps(rows, indent=2, allow_nan=False) + "\n"
    raise ValueError(f"output format must be one of {OUTPUT_FORMATS}, got {output_format!r}")


def write_table(table: pl.DataFrame, out: Optional[Path] = None, output_format: str = "tsv"):
    """
    Write a table to `out`, or to standard output when `out` is None.

    Args:
        table (pl.DataFrame): The table.
        out (Path, optional): Destination file.
        output_format (str): One of "tsv", "csv", "json".
    """
    text = render_table(table, output_format)
    if out is None:
        click.echo(text, nl=False)
    else:
        Path(out).write_text(text)
