"""Shared builders for hand-crafted matrices and panels."""

import numpy as np
import pytest

from prodspace.ingest import ExportPanel, PanelReport
from prodspace.rca import RcaMatrix


def build_rca(x, year=2012):
    """RcaMatrix straight from a 0/1 array, marginals recomputed."""
    x = np.asarray(x, dtype=np.int8)
    m, n = x.shape
    return RcaMatrix(
        x=x,
        diversity=x.sum(axis=0).astype(np.int64),
        ubiquity=x.sum(axis=1).astype(np.int64),
        year=year,
        products=[f"{i:04d}" for i in range(m)],
        countries=[f"C{j:02d}" for j in range(n)],
        active_products=np.ones(m, dtype=bool),
        active_countries=np.ones(n, dtype=bool),
    )


def build_panel(values_t0, values_t1=None, years=(2012, 2018)):
    """Two-year panel with synthetic codes; t1 defaults to a copy of t0."""
    v0 = np.asarray(values_t0, dtype=np.float64)
    v1 = np.asarray(v0 if values_t1 is None else values_t1, dtype=np.float64)
    m, n = v0.shape
    return ExportPanel(
        products=[f"{i:04d}" for i in range(m)],
        countries=[f"C{j:02d}" for j in range(n)],
        years=tuple(years),
        values=np.stack([v0, v1]),
        report=PanelReport(),
    )


def random_binary(rng, m, n):
    """Random 0/1 matrix with no empty row or column."""
    while True:
        x = (rng.random((m, n)) < 0.45).astype(np.int8)
        if x.sum(axis=1).all() and x.sum(axis=0).all():
            return x


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20180412)
