import hashlib
import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional, Sequence

import numpy as np
import polars as pl

from gsregression.linalg.gram_schmidt import DesignMatrix, center_vector, design_matrix
from gsregression.utils.custom_exceptions import (
    EmptyDataError,
    FixtureChecksumError,
    InvalidDesignError,
    MissingColumnError,
    MissingInputFileError,
    MissingValueError,
    NonNumericCellError,
)

logger = logging.getLogger(__name__)

POLLUTION_FIXTURE = Path(__file__).resolve().parent.parent / "data" / "pollution.csv"
POLLUTION_FIXTURE_SHA256 = "7d0f205f09bc86ba22bad37751304ec361c97c36aa84cf7ca2d38d2fca286324"
POLLUTION_RESPONSE = "Mortality"


def is_float(element: any) -> bool:
    """
    Checks whether an element parses as a finite float.

    Args:
        element (any): The element to be checked.

    Returns:
        bool: True if the element is a finite float, False otherwise.
    """
    if element is None:
        return False
    try:
        return math.isfinite(float(element))
    except ValueError:
        return False


@dataclass
class Dataset:
    """
    Class to represent a numeric table with one response and its predictors.

    Attributes:
        rows (pl.DataFrame): Float64 columns in file order, restricted to the selected columns.
        response_name (str): Label of the response column.
        predictor_names (List[str]): Labels of the predictor columns, in selection order.
        provenance (str): Where the data came from.
    """

    rows: pl.DataFrame
    response_name: str
    predictor_names: List[str]
    provenance: str = ""

    @property
    def n(self) -> int:
        return self.rows.height

    def design(self, center: bool = True, scale: bool = False) -> DesignMatrix:
        """
        Return the predictors as a DesignMatrix.

        Args:
            center (bool): Center every predictor.
            scale (bool): Scale every predictor to unit sample standard deviation.

        Returns:
            DesignMatrix: The n x p design with predictor_names as column labels.
        """
        values = self.rows.select(self.predictor_names).to_numpy().astype(float)
        return design_matrix(values, self.predictor_names, center=center, scale=scale)

    def response(self, center: bool = True) -> np.ndarray:
        y = self.rows[self.response_name].to_numpy().astype(float)
        return center_vector(y) if center else y


def _select_columns(
    header: List[str], response: str, predictors: Optional[Sequence[str]]
) -> List[str]:
    if response not in header:
        raise MissingColumnError(response)
    if predictors is None:
        predictors = [name for name in header if name != response]
    predictors = list(predictors)
    for name in predictors:
        if name not in header:
            raise MissingColumnError(name)
    if len(set(predictors)) != len(predictors):
        raise InvalidDesignError(f"predictor list repeats a column: {predictors}")
    if response in predictors:
        raise InvalidDesignError(f"response '{response}' is also listed as a predictor")
    return predictors


def ingest_csv(
    path: Path,
    response: str,
    predictors: Optional[Sequence[str]] = None,
    provenance: Optional[str] = None,
) -> Dataset:
    """
    Read a comma-separated file with a header row into a Dataset.

    Every cell of the selected columns must hold a finite decimal number. Row and column
    coordinates in errors are 1-based: row 1 is the first data row, column 1 the first column
    of the file.

    Args:
        path (Path): CSV file, UTF-8, '.' as decimal point.
        response (str): Name of the response column.
        predictors (Sequence[str], optional): Predictor columns; every other column if None.
        provenance (str, optional): Free-text origin, defaulting to the path.

    Returns:
        Dataset: The parsed data with row order preserved.

    Raises:
        MissingInputFileError: If path is not an existing file.
        MissingColumnError: If a named column is absent from the header.
        MissingValueError: If a selected cell is empty.
        NonNumericCellError: If a selected cell is not a finite number.
        EmptyDataError: If the file has no data rows.
    """
    if not Path(path).is_file():
        raise MissingInputFileError(path)
    raw = pl.read_csv(path, infer_schema_length=0)
    header = raw.columns
    predictors = _select_columns(header, response, predictors)
    if raw.height == 0:
        raise EmptyDataError(f"{path} has a header but no data rows")
    selected = set(predictors) | {response}
    columns = {}
    for col_index, name in enumerate(header, start=1):
        if name not in selected:
            continue
        parsed = []
        for row_index, cell in enumerate(raw[name].to_list(), start=1):
            if cell is None or cell.strip() == "":
                raise MissingValueError(row_index, col_index)
            if not is_float(cell):
                raise NonNumericCellError(row_index, col_index, cell)
            parsed.append(float(cell))
        columns[name] = parsed
    rows = pl.DataFrame(columns, schema={name: pl.Float64 for name in columns})
    return Dataset(
        rows=rows,
        response_name=response,
        predictor_names=predictors,
        provenance=provenance if provenance is not None else str(path),
    )


def file_sha256(path: Path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def load_pollution_fixture(
    predictors: Optional[Sequence[str]] = None, response: str = POLLUTION_RESPONSE
) -> Dataset:
    """
    Load the bundled air pollution and mortality table (60 areas, 15 predictors).

    Args:
        predictors (Sequence[str], optional): Predictor subset; all fifteen if None.
        response (str): Response column.

    Returns:
        Dataset: The fixture, with Mortality as response by default.

    Raises:
        FixtureChecksumError: If the bundled file has been edited.
    """
    digest = file_sha256(POLLUTION_FIXTURE)
    if digest != POLLUTION_FIXTURE_SHA256:
        raise FixtureChecksumError(
            f"{POLLUTION_FIXTURE} has SHA-256 {digest}, expected {POLLUTION_FIXTURE_SHA256}"
        )
    logger.info("pollution fixture checksum verified")
    return ingest_csv(
        POLLUTION_FIXTURE,
        response,
        predictors,
        provenance="McDonald and Schwing (1973) air pollution and mortality data",
    )


def load_dataset(
    input_path: Optional[Path],
    response: str = POLLUTION_RESPONSE,
    predictors: Optional[Sequence[str]] = None,
) -> Dataset:
    """Read `input_path`, or the bundled fixture when no path is given."""
    if input_path is None:
        return load_pollution_fixture(predictors, response)
    return ingest_csv(input_path, response, predictors)


def write_dataset(dataset: Dataset, path: Path) -> None:
    """
    Write the selected columns of a Dataset as CSV, in the column order of `rows`.

    Floats are written in shortest round-trip form, so ingest_csv reads back identical values.
    """
    formatted = dataset.rows.select(
        [
            pl.col(name).map_elements(repr, return_dtype=pl.Utf8).alias(name)
            for name in dataset.rows.columns
        ]
    )
    formatted.write_csv(path)


def parse_name_list(value: Optional[str]) -> Optional[List[str]]:
    """Split a comma-separated option value; None and blank give None."""
    if value is None or value.strip() == "":
        return None
    return [item.strip() for item in value.split(",") if item.strip()]

