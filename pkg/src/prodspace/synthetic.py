"""Reproducible synthetic export panels for fixtures and calibration runs."""

from __future__ import annotations

import numpy as np
import pandas as pd

from .errors import InputError
from .ingest import ExportPanel, IngestConfig, panel_from_records

MODELS = ("random", "capability")


def _ensure_coverage(values: np.ndarray, rng: np.random.Generator) -> None:
    # well-definedness: every country and every product trades something
    m, n = values.shape
    for j in np.flatnonzero(values.sum(axis=0) == 0):
        values[rng.integers(m), j] = 1.0
    for i in np.flatnonzero(values.sum(axis=1) == 0):
        values[i, rng.integers(n)] = 1.0


def _random_year(rng: np.random.Generator, m: int, n: int) -> np.ndarray:
    values = rng.lognormal(mean=2.0, sigma=1.5, size=(m, n))
    values[rng.random((m, n)) < 0.35] = 0.0
    _ensure_coverage(values, rng)
    return values


def _capability_year(
    rng: np.random.Generator,
    groups: np.ndarray,
    affinity: np.ndarray,
    m: int,
    n: int,
) -> np.ndarray:
    """Latent-factor exports: countries trade amplified volumes in product
    groups they hold a capability for, so specializations co-occur within
    groups and proximity is higher inside a group than across."""
    base = rng.lognormal(mean=2.0, sigma=0.8, size=(m, n))
    values = base * np.where(affinity[groups], 6.0, 1.0)
    values[rng.random((m, n)) < 0.25] = 0.0
    _ensure_coverage(values, rng)
    return values


def synthetic_records(
    seed: int,
    m: int,
    n: int,
    model: str = "capability",
    years: tuple[int, int] = (2012, 2018),
) -> pd.DataFrame:
    """Long-form synthetic export records (zero cells omitted).

    ``random`` draws independent lognormal values; ``capability`` plants
    latent product-group factors shared within countries, and carries the
    capabilities to the second year with a small mutation rate so that
    specialization gains and losses concentrate in related products.
    """
    if m < 2 or n < 2:
        raise InputError("need at least 2 products and 2 countries")
    if model not in MODELS:
        raise InputError(f"model must be one of {MODELS}, got {model!r}")
    rng = np.random.default_rng(seed)

    if model == "random":
        per_year = [_random_year(rng, m, n), _random_year(rng, m, n)]
    else:
        n_groups = max(2, m // 5)
        groups = rng.integers(n_groups, size=m)
        affinity = rng.random((n_groups, n)) < 0.45
        per_year = [_capability_year(rng, groups, affinity, m, n)]
        flip = rng.random((n_groups, n)) < 0.15
        per_year.append(_capability_year(rng, groups, affinity ^ flip, m, n))

    products = [f"{i:04d}" for i in range(m)]
    countries = [f"C{j:02d}" for j in range(n)]
    rows = []
    for year, values in zip(years, per_year):
        ii, jj = np.nonzero(values)
        rows.append(
            pd.DataFrame(
                {
                    "country": [countries[j] for j in jj],
                    "product": [products[i] for i in ii],
                    "year": year,
                    "value": np.round(values[ii, jj], 4),
                }
            )
        )
    return pd.concat(rows, ignore_index=True)


def generate_synthetic(
    seed: int,
    m: int,
    n: int,
    model: str = "capability",
    years: tuple[int, int] = (2012, 2018),
) -> ExportPanel:
    """Synthetic two-year panel built through the regular ingest path."""
    records = synthetic_records(seed, m, n, model, years)
    return panel_from_records(records, IngestConfig(years=years))
