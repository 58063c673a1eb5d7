import logging

import click

from gsregression.cli_diag import diag_command
from gsregression.cli_fit import fit_command
from gsregression.cli_gs import gs_command
from gsregression.cli_power import power_command
from gsregression.cli_power_analytic import power_analytic_command
from gsregression.cli_ridge import ridge_command
from gsregression.cli_samplesize import samplesize_command
from gsregression.cli_stacked import stacked_check_command
from gsregression.utils.custom_exceptions import GsRegressionError

LOG_LEVELS = {0: logging.WARNING, 1: logging.INFO}


class GsRegressionGroup(click.Group):
    """click group that turns GsRegressionError into a message and the error's exit code."""

    def invoke(self, ctx):
        try:
            return super().invoke(ctx)
        except GsRegressionError as error:
            click.echo(f"{type(error).__name__}: {error}", err=True)
            ctx.exit(error.exit_code)


@click.group(cls=GsRegressionGroup)
@click.option("--verbose", "-v", count=True, help="Log INFO with -v, DEBUG with -vv.")
def main(verbose: int):
    """Gram-Schmidt regression toolkit"""
    logging.basicConfig(
        level=LOG_LEVELS.get(verbose, logging.DEBUG),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )


main.add_command(fit_command)
main.add_command(gs_command)
main.add_command(ridge_command)
main.add_command(diag_command)
main.add_command(power_command)
main.add_command(power_analytic_command)
main.add_command(samplesize_command)
main.add_command(stacked_check_command)
if __name__ == "__main__":
    main()
