"""Load, validate, and index raw export data into dense value matrices.

The canonical input is headered delimiter-separated text with columns
``country,product,year,value`` (one record per country/product/year).
Records are aggregated into two product-by-country matrices, one per
reference year.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import pandas as pd

from .errors import InputError, ParseError, SchemaError

REQUIRED_COLUMNS = ("country", "product", "year", "value")


@dataclass(frozen=True)
class IngestConfig:
    """Settings for reading a raw export file."""

    years: tuple[int, int] = (2012, 2018)
    delimiter: str = ","

    def __post_init__(self):
        if len(self.years) != 2 or self.years[0] == self.years[1]:
            raise InputError(f"years must be two distinct years, got {self.years}")


@dataclass
class PanelReport:
    """What happened during loading: dropped records and one-year-only codes."""

    n_records: int = 0
    n_zero_dropped: int = 0
    n_duplicates_merged: int = 0
    # codes with positive exports in only one of the two years, keyed by the
    # year from which they are MISSING
    countries_missing_year: dict[int, list[str]] = field(default_factory=dict)
    products_missing_year: dict[int, list[str]] = field(default_factory=dict)


@dataclass
class ExportPanel:
    """Dense product-by-country export values for the two reference years.

    Product and country orderings are shared by both years (sorted
    lexicographically by code) so every downstream matrix is reproducible.
    """

    products: list[str]
    countries: list[str]
    years: tuple[int, int]
    values: np.ndarray  # (2, m, n); values[k] belongs to years[k]
    report: PanelReport

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.products), len(self.countries)

    def value_matrix(self, year: int) -> np.ndarray:
        if year not in self.years:
            raise InputError(f"panel has years {self.years}, not {year}")
        return self.values[self.years.index(year)]

    def world_total(self, year: int) -> float:
        return float(self.value_matrix(year).sum())


def load_panel(path: str | Path, config: IngestConfig | None = None) -> ExportPanel:
    """Read a raw export file into an :class:`ExportPanel`.

    Parameters
    ----------
    path : str or Path
        Delimiter-separated text file with a header row and the columns
        ``country, product, year, value``. Extra columns are ignored; rows
        for years other than the configured pair are ignored.
    config : IngestConfig, optional
        Reference years and delimiter. Defaults to 2012/2018 and ``,``.

    Raises
    ------
    SchemaError
        If a required column is missing.
    ParseError
        If a year or value cell is non-numeric or a value is negative
        (reported with its file line number).
    InputError
        If the file does not exist or a configured year has no records.
    """
    config = config or IngestConfig()
    path = Path(path)
    if not path.is_file():
        raise InputError(f"input file not found: {path}")

    df = pd.read_csv(path, sep=config.delimiter, dtype=str, keep_default_na=False)
    missing = [c for c in REQUIRED_COLUMNS if c not in df.columns]
    if missing:
        raise SchemaError(
            f"missing required column(s) {missing}; found {list(df.columns)}"
        )
    return _build_panel(df[list(REQUIRED_COLUMNS)], config)


def panel_from_records(records: pd.DataFrame, config: IngestConfig | None = None) -> ExportPanel:
    """Build a panel from an in-memory record table (same schema as the file format)."""
    config = config or IngestConfig()
    missing = [c for c in REQUIRED_COLUMNS if c not in records.columns]
    if missing:
        raise SchemaError(f"missing required column(s) {missing}")
    df = records[list(REQUIRED_COLUMNS)].astype({"country": str, "product": str})
    return _build_panel(df, config)


def _build_panel(df: pd.DataFrame, config: IngestConfig) -> ExportPanel:
    # line = 1-based file position of the data row (header is line 1)
    year = pd.to_numeric(df["year"], errors="coerce")
    bad = year.isna() | (year != year.round())
    if bad.any():
        i = int(np.flatnonzero(bad.to_numpy())[0])
        raise ParseError(f"year {df['year'].iloc[i]!r} is not an integer", line=i + 2)
    value = pd.to_numeric(df["value"], errors="coerce")
    bad = value.isna()
    if bad.any():
        i = int(np.flatnonzero(bad.to_numpy())[0])
        raise ParseError(f"value {df['value'].iloc[i]!r} is not numeric", line=i + 2)
    bad = value < 0
    if bad.any():
        i = int(np.flatnonzero(bad.to_numpy())[0])
        raise ParseError(f"value {df['value'].iloc[i]!r} is negative", line=i + 2)

    data = pd.DataFrame(
        {
            "country": df["country"].astype(str),
            "product": df["product"].astype(str),
            "year": year.astype(int),
            "value": value.astype(float),
        }
    )
    report = PanelReport(n_records=len(data))

    for y in config.years:
        if not ((data["year"] == y) & (data["value"] > 0)).any():
            raise InputError(f"configured year {y} has no positive records")

    data = data[data["year"].isin(config.years)]
    n_before = len(data)
    data = data[data["value"] > 0]
    report.n_zero_dropped = n_before - len(data)

    grouped = data.groupby(["year", "product", "country"], as_index=False)["value"].sum()
    report.n_duplicates_merged = len(data) - len(grouped)

    products = sorted(grouped["product"].unique())
    countries = sorted(grouped["country"].unique())
    p_index = {p: i for i, p in enumerate(products)}
    c_index = {c: j for j, c in enumerate(countries)}

    values = np.zeros((2, len(products), len(countries)))
    for k, y in enumerate(config.years):
        part = grouped[grouped["year"] == y]
        ii = part["product"].map(p_index).to_numpy()
        jj = part["country"].map(c_index).to_numpy()
        values[k][ii, jj] = part["value"].to_numpy()

    _flag_one_year_codes(values, products, countries, config.years, report)
    return ExportPanel(products, countries, tuple(config.years), values, report)


def _flag_one_year_codes(values, products, countries, years, report: PanelReport):
    report.countries_missing_year = {}
    report.products_missing_year = {}
    for k, y in enumerate(years):
        col_missing = values[k].sum(axis=0) == 0
        row_missing = values[k].sum(axis=1) == 0
        if col_missing.any():
            report.countries_missing_year[y] = [
                countries[j] for j in np.flatnonzero(col_missing)
            ]
        if row_missing.any():
            report.products_missing_year[y] = [
                products[i] for i in np.flatnonzero(row_missing)
            ]


def truncate_product_level(panel: ExportPanel, digits: int) -> ExportPanel:
    """Merge product codes down to their ``digits``-character prefix.

    Values of merged codes are summed; the total export value of the panel
    is unchanged. A code shorter than ``digits`` is an error.
    """
    if digits not in (2, 4, 6):
        raise InputError(f"digits must be one of 2, 4, 6, got {digits}")
    short = [p for p in panel.products if len(p) < digits]
    if short:
        raise InputError(
            f"product code {short[0]!r} is shorter than {digits} characters"
        )

    prefixes = [p[:digits] for p in panel.products]
    merged = sorted(set(prefixes))
    if merged == panel.products:
        return panel

    index = {p: i for i, p in enumerate(merged)}
    rows = np.array([index[p] for p in prefixes])
    values = np.zeros((2, len(merged), len(panel.countries)))
    for k in range(2):
        np.add.at(values[k], rows, panel.values[k])

    report = PanelReport(
        n_records=panel.report.n_records,
        n_zero_dropped=panel.report.n_zero_dropped,
        n_duplicates_merged=panel.report.n_duplicates_merged,
    )
    _flag_one_year_codes(values, merged, panel.countries, panel.years, report)
    return ExportPanel(merged, list(panel.countries), panel.years, values, report)
