"""Tabulated-function CSV ingestion and sweep CSV output"""
import csv
import logging
import math
from typing import Dict, List, TextIO

from fracvp.errors import CSVFormatError
from fracvp.fracops import RealFn

logger = logging.getLogger(__name__)


def load_tabulated(path: str) -> RealFn:
    """
    Read a tabulated function from a ``t,value`` CSV file

    Args:
        path: CSV file with header ``t,value`` and one decimal pair per row

    Returns:
        RealFn of kind tabulated (linear interpolation between rows)

    Raises:
        CSVFormatError: missing header, malformed or non-increasing row;
            the message names the offending line
    """
    with open(path, 'r', newline='', encoding='utf-8') as csvfile:
        return read_tabulated(csvfile, source=path)


def read_tabulated(stream: TextIO, source: str = '<stream>') -> RealFn:
    """Same as load_tabulated, from an open text stream"""
    reader = csv.reader(stream)
    header = next(reader, None)
    if header is None:
        raise CSVFormatError(f"{source}: line 1: empty file, expected header 't,value'")
    if [col.strip() for col in header] != ['t', 'value']:
        raise CSVFormatError(f"{source}: line 1: expected header 't,value', got {','.join(header)!r}")

    grid: List[float] = []
    values: List[float] = []
    for i, row in enumerate(reader, start=2):
        if not row or all(not cell.strip() for cell in row):
            continue
        if len(row) != 2:
            raise CSVFormatError(f"{source}: line {i}: expected 2 fields, got {len(row)}")
        try:
            t, value = float(row[0]), float(row[1])
        except ValueError:
            raise CSVFormatError(f"{source}: line {i}: not a decimal pair: {','.join(row)!r}") from None
        if not (math.isfinite(t) and math.isfinite(value)):
            raise CSVFormatError(f"{source}: line {i}: non-finite entry")
        if grid and t <= grid[-1]:
            raise CSVFormatError(f"{source}: line {i}: t={t!r} does not increase (previous {grid[-1]!r})")
        grid.append(t)
        values.append(value)

    if len(grid) < 2:
        raise CSVFormatError(f"{source}: need at least two data rows, got {len(grid)}")

    logger.info(f"Loaded {len(grid)} samples on [{grid[0]}, {grid[-1]}] from {source}")
    return RealFn.tabulated(grid, values)


def format_number(value) -> str:
    """17 significant digits, empty for absent values"""
    if value is None:
        return ''
    return format(float(value), '.17g')


class SweepCSV:
    """Write sweep rows in the fixed column layout"""

    COLUMNS = ['alpha', 'beta', 'radius_thm69', 'radius_improved', 'nu', 'first_zero', 'margin']

    def write(self, rows: List[Dict], stream: TextIO) -> int:
        """
        Write the header and one line per sweep row

        Args:
            rows: Sweep row dictionaries keyed by column name; missing or
                None cells are left empty
            stream: Open text stream

        Returns:
            Number of data rows written
        """
        writer = csv.DictWriter(stream, fieldnames=self.COLUMNS, lineterminator='\n')
        writer.writeheader()
        for row in rows:
            writer.writerow(self._format_row(row))
        logger.debug(f"Wrote {len(rows)} sweep rows")
        return len(rows)

    def _format_row(self, row: Dict) -> Dict:
        return {col: format_number(row.get(col)) for col in self.COLUMNS}
