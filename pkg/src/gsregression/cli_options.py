from pathlib import Path
from typing import List, Optional

import click

from gsregression.distributions.distributions import ALTERNATIVES
from gsregression.utils.output import OUTPUT_FORMATS
from gsregression.utils.utils import POLLUTION_RESPONSE, parse_name_list


def name_list(ctx, param, value: Optional[str]) -> Optional[List[str]]:
    """click callback turning "a,b,c" into ["a", "b", "c"]."""
    return parse_name_list(value)


def float_list(ctx, param, value: Optional[str]) -> Optional[List[float]]:
    items = parse_name_list(value)
    if items is None:
        return None
    try:
        return [float(item) for item in items]
    except ValueError:
        raise click.BadParameter(f"expected comma-separated numbers, got {value!r}")


def int_list(ctx, param, value: Optional[str]) -> Optional[List[int]]:
    items = parse_name_list(value)
    if items is None:
        return None
    try:
        return [int(item) for item in items]
    except ValueError:
        raise click.BadParameter(f"expected comma-separated integers, got {value!r}")


def dataset_options(func):
    """--input, --response and --predictors, shared by every command reading a table."""
    func = click.option(
        "--predictors",
        "-x",
        required=False,
        help="Comma-separated predictor columns. Defaults to every column but the response.",
        type=str,
        default=None,
        callback=name_list,
    )(func)
    func = click.option(
        "--response",
        "-r",
        required=False,
        help="Response column.",
        type=str,
        default=POLLUTION_RESPONSE,
        show_default=True,
    )(func)
    func = click.option(
        "--input",
        "-i",
        "input_path",
        required=False,
        help="Path to a CSV file with a header row. Defaults to the bundled pollution data.",
        type=Path,
        default=None,
    )(func)
    return func


def preprocessing_options(scale_default: bool):
    def decorator(func):
        func = click.option(
            "--scale/--no-scale",
            default=scale_default,
            show_default=True,
            help="Scale predictors to unit sample standard deviation.",
        )(func)
        func = click.option(
            "--center/--no-center",
            default=True,
            show_default=True,
            help="Center the response and the predictors.",
        )(func)
        return func

    return decorator


def alternative_option(func):
    return click.option(
        "--alt",
        "alternative",
        required=False,
        help="Direction of the one-sided p-values.",
        type=click.Choice(ALTERNATIVES),
        default="greater",
        show_default=True,
    )(func)


def output_options(func):
    """--out and --format, shared by every command writing a table."""
    func = click.option(
        "--format",
        "-f",
        "output_format",
        required=False,
        help="Table format.",
        type=click.Choice(OUTPUT_FORMATS),
        default="tsv",
        show_default=True,
    )(func)
    func = click.option(
        "--out",
        "-o",
        required=False,
        help="Path to the output file. Defaults to standard output.",
        type=Path,
        default=None,
    )(func)
    return func
