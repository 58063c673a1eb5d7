from typing import List

import click


class GsRegressionError(Exception):
    """Base class for every error raised by gsregression."""

    exit_code = 1


class InputError(GsRegressionError):
    """Invalid user input: files, column names, flags or parameter values."""

    exit_code = 2


class NumericalError(GsRegressionError):
    """A computation could not be carried out on otherwise valid input."""

    exit_code = 3


class MissingInputFileError(InputError):
    def __init__(self, path):
        super().__init__(f"input file {path} does not exist or is not a regular file")
        self.path = path


class MissingColumnError(InputError):
    def __init__(self, column: str):
        super().__init__(f"column '{column}' not found in input header")
        self.column = column


class NonNumericCellError(InputError):
    def __init__(self, row: int, col: int, value: str):
        super().__init__(f"non-numeric value {value!r} at row {row}, column {col}")
        self.row = row
        self.col = col


class MissingValueError(InputError):
    def __init__(self, row: int, col: int):
        super().__init__(f"missing value at row {row}, column {col}")
        self.row = row
        self.col = col


class EmptyDataError(InputError):
    pass


class FixtureChecksumError(InputError):
    pass


class InvalidDesignError(InputError):
    pass


class InvalidOrderError(InputError):
    pass


class NotCenteredError(InputError):
    pass


class NegativeRidgeError(InputError):
    pass


class InvalidScenarioError(InputError):
    pass


class InvalidDfError(InputError):
    pass


class InvalidProbabilityError(InputError):
    pass


class InvalidDeltaError(InputError):
    pass


class SameSignViolationError(InputError):
    pass


class RankDeficientError(NumericalError):
    def __init__(self, position: int, label: str = ""):
        name = f" ({label})" if label else ""
        super().__init__(
            f"variable at position {position}{name} lies numerically in the span of the "
            "variables before it"
        )
        self.position = position


class SingularMatrixError(NumericalError):
    pass


class DegenerateDirectionError(NumericalError):
    pass


class ZeroCoefficientsError(NumericalError):
    pass


class UndefinedDeltaError(NumericalError):
    pass


class ReplicateFailureError(NumericalError):
    pass


class MutuallyExclusiveOptionError(click.Option):
    """click option that refuses to be combined with the options named in `mutually_exclusive`."""

    def __init__(self, *args, **kwargs):
        self.mutually_exclusive: List[str] = list(kwargs.pop("mutually_exclusive", []))
        help_text = kwargs.get("help", "")
        if self.mutually_exclusive:
            kwargs["help"] = help_text + (
                " NOTE: This argument is mutually exclusive with arguments: ["
                + ", ".join(self.mutually_exclusive)
                + "]."
            )
        super().__init__(*args, **kwargs)

    def handle_parse_result(self, ctx, opts, args):
        if self.name in opts and any(other in opts for other in self.mutually_exclusive):
            raise click.UsageError(
                f"Illegal usage: `{self.name}` is mutually exclusive with "
                f"arguments `{', '.join(self.mutually_exclusive)}`."
            )
        return super().handle_parse_result(ctx, opts, args)
