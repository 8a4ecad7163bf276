"""Pairwise product proximity and the density of products around a country."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InputError, SingularityError
from .rca import RcaMatrix


@dataclass
class ProximityBundle:
    """Conditional co-specialization probabilities and their symmetrization.

    ``co_occurrence[p, q]`` counts countries specialized in both p and q, so
    the diagonal holds the ubiquity of each product. ``c`` divides each row
    by the row product's ubiquity, giving conditional probabilities in
    [0, 1] with a unit diagonal. ``c_min`` is the elementwise minimum of
    ``c`` and its transpose: a symmetric proximity. ``row_sums`` are the
    full row sums of ``c_min`` (diagonal included).
    """

    c: np.ndarray  # (m, m)
    c_min: np.ndarray  # (m, m) symmetric
    co_occurrence: np.ndarray  # (m, m) int
    row_sums: np.ndarray  # (m,)
    products: list[str]


@dataclass
class DensityMatrix:
    """Proximity-weighted share of each country's portfolio around each product."""

    d: np.ndarray  # (m, n) in [0, 1]
    products: list[str]
    countries: list[str]
    year: int
    includes_diagonal: bool = True


def conditional_probabilities(rca: RcaMatrix) -> ProximityBundle:
    """Build the proximity bundle from one year's specialization matrix.

    Every product must be exported with comparative advantage by at least
    one country (positive ubiquity), otherwise its conditional
    probabilities are undefined.
    """
    zero = np.flatnonzero(rca.ubiquity == 0)
    if zero.size:
        names = ", ".join(rca.products[i] for i in zero[:5])
        more = "" if zero.size <= 5 else f" (+{zero.size - 5} more)"
        raise SingularityError(f"product(s) with zero ubiquity: {names}{more}")

    x = rca.x.astype(np.float64)
    co = x @ x.T
    c = co / rca.ubiquity.astype(np.float64)[:, None]
    c_min = np.minimum(c, c.T)
    return ProximityBundle(
        c=c,
        c_min=c_min,
        co_occurrence=co.astype(np.int64),
        row_sums=c_min.sum(axis=1),
        products=list(rca.products),
    )


def density(
    rca: RcaMatrix, prox: ProximityBundle, include_diagonal: bool = True
) -> DensityMatrix:
    """Density of every product for every country.

    For product i and country j this is the proximity mass of j's
    specializations around i, divided by the total proximity mass of row i.
    ``include_diagonal=False`` zeroes the unit diagonal of the proximity
    matrix in both numerator and denominator (a sensitivity variant; the
    default keeps it).
    """
    if prox.products != rca.products:
        raise InputError("proximity bundle was built from a different product set")
    weights = prox.c_min
    if not include_diagonal:
        weights = weights.copy()
        np.fill_diagonal(weights, 0.0)

    # One matmul computes numerators and denominators so that a country
    # specialized in everything lands on exactly 1.0.
    x = rca.x.astype(np.float64)
    augmented = np.hstack([x, np.ones((x.shape[0], 1))])
    sums = weights @ augmented
    denominator = sums[:, -1]
    if np.any(denominator <= 0):
        i = int(np.argmin(denominator))
        raise SingularityError(
            f"proximity row for product {rca.products[i]!r} sums to zero"
        )
    d = sums[:, :-1] / denominator[:, None]
    return DensityMatrix(
        d=d,
        products=list(rca.products),
        countries=list(rca.countries),
        year=rca.year,
        includes_diagonal=include_diagonal,
    )
