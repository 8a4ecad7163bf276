"""Binary specialization matrices and gain/loss transitions between two years."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import pandas as pd

from .errors import DegenerateInputError, InputError
from .ingest import ExportPanel


@dataclass
class RcaMatrix:
    """Binary product-by-country specialization matrix for one year.

    ``x[i, j] = 1`` when country j's export share in product i is at least
    ``threshold`` times the world share. ``diversity`` and ``ubiquity`` are
    the column and row sums. Countries or products with zero exports in this
    year (present in the panel only for the other year) get all-zero columns
    or rows and are marked inactive.
    """

    x: np.ndarray  # (m, n) of 0/1
    diversity: np.ndarray  # (n,) column sums
    ubiquity: np.ndarray  # (m,) row sums
    year: int
    products: list[str]
    countries: list[str]
    active_products: np.ndarray  # (m,) bool: positive exports this year
    active_countries: np.ndarray  # (n,) bool

    @property
    def shape(self) -> tuple[int, int]:
        return self.x.shape


def compute_rca(panel: ExportPanel, year: int, threshold: float = 1.0) -> RcaMatrix:
    """Compute the binary RCA matrix for one panel year.

    The specialization ratio for cell (i, j) is
    ``(E[i,j] / E[:,j]) / (E[i,:] / E)``; a cell is specialized when the
    ratio is >= ``threshold`` (weak inequality, default 1).
    """
    if threshold <= 0:
        raise InputError(f"threshold must be positive, got {threshold}")
    values = panel.value_matrix(year)
    world = values.sum()
    if world == 0:
        raise InputError(f"year {year} has zero world exports")

    country_totals = values.sum(axis=0)
    product_totals = values.sum(axis=1)
    active_countries = country_totals > 0
    active_products = product_totals > 0

    country_share = np.divide(
        values,
        country_totals[None, :],
        out=np.zeros_like(values),
        where=active_countries[None, :],
    )
    world_share = product_totals / world
    ratio = np.divide(
        country_share,
        world_share[:, None],
        out=np.zeros_like(values),
        where=active_products[:, None],
    )
    x = (ratio >= threshold).astype(np.int8)

    return RcaMatrix(
        x=x,
        diversity=x.sum(axis=0).astype(np.int64),
        ubiquity=x.sum(axis=1).astype(np.int64),
        year=year,
        products=list(panel.products),
        countries=list(panel.countries),
        active_products=active_products,
        active_countries=active_countries,
    )


@dataclass
class TransitionSet:
    """Gains and losses of specialization between the two reference years.

    All four masks are product-by-country booleans. Cells of countries or
    products without exports in either year are excluded everywhere (exits
    from the dataset are data artifacts, not economic exits); the excluded
    codes are listed on ``excluded_countries`` / ``excluded_products``.
    """

    products: list[str]
    countries: list[str]
    gains: np.ndarray  # x 0 -> 1
    losses: np.ndarray  # x 1 -> 0
    at_risk_gain: np.ndarray  # x == 0 at t0
    at_risk_loss: np.ndarray  # x == 1 at t0
    included_products: np.ndarray  # (m,) bool
    included_countries: np.ndarray  # (n,) bool

    @property
    def n_gains(self) -> int:
        return int(self.gains.sum())

    @property
    def n_losses(self) -> int:
        return int(self.losses.sum())

    @property
    def n_at_risk_gain(self) -> int:
        return int(self.at_risk_gain.sum())

    @property
    def n_at_risk_loss(self) -> int:
        return int(self.at_risk_loss.sum())

    def pairs(self, mask: np.ndarray) -> list[tuple[str, str]]:
        ii, jj = np.nonzero(mask)
        return [(self.products[i], self.countries[j]) for i, j in zip(ii, jj)]


def transitions(rca_t0: RcaMatrix, rca_t1: RcaMatrix) -> TransitionSet:
    """Classify every included cell by its specialization transition."""
    if rca_t0.products != rca_t1.products or rca_t0.countries != rca_t1.countries:
        raise InputError("RCA matrices have mismatched product/country orderings")

    included_p = rca_t0.active_products & rca_t1.active_products
    included_c = rca_t0.active_countries & rca_t1.active_countries
    valid = included_p[:, None] & included_c[None, :]

    x0 = rca_t0.x.astype(bool)
    x1 = rca_t1.x.astype(bool)
    return TransitionSet(
        products=list(rca_t0.products),
        countries=list(rca_t0.countries),
        gains=valid & ~x0 & x1,
        losses=valid & x0 & ~x1,
        at_risk_gain=valid & ~x0,
        at_risk_loss=valid & x0,
        included_products=included_p,
        included_countries=included_c,
    )


def transition_rates(t: TransitionSet) -> tuple[float, float]:
    """Average gain and loss probabilities over the at-risk cells."""
    if t.n_at_risk_gain == 0 or t.n_at_risk_loss == 0:
        raise DegenerateInputError("empty at-risk set: no transition rates defined")
    return t.n_gains / t.n_at_risk_gain, t.n_losses / t.n_at_risk_loss


def _included_country_frame(
    t: TransitionSet, rca_t0: RcaMatrix
) -> tuple[pd.DataFrame, np.ndarray]:
    jj = np.flatnonzero(t.included_countries)
    frame = pd.DataFrame(
        {
            "country": [t.countries[j] for j in jj],
            "diversity": rca_t0.diversity[jj],
        }
    )
    return frame, jj


def per_country_transition_stats(t: TransitionSet, rca_t0: RcaMatrix) -> pd.DataFrame:
    """Per-country gain/loss counts and probabilities against base diversity.

    One row per included country. Probabilities are NaN where the country
    has no at-risk cells for that event.
    """
    base, jj = _included_country_frame(t, rca_t0)
    n_ar_gain = t.at_risk_gain[:, jj].sum(axis=0)
    n_ar_loss = t.at_risk_loss[:, jj].sum(axis=0)
    n_gain = t.gains[:, jj].sum(axis=0)
    n_loss = t.losses[:, jj].sum(axis=0)
    with np.errstate(invalid="ignore", divide="ignore"):
        p_gain = np.where(n_ar_gain > 0, n_gain / n_ar_gain, np.nan)
        p_loss = np.where(n_ar_loss > 0, n_loss / n_ar_loss, np.nan)
    base["n_at_risk_gain"] = n_ar_gain
    base["n_gains"] = n_gain
    base["p_gain"] = p_gain
    base["n_at_risk_loss"] = n_ar_loss
    base["n_losses"] = n_loss
    base["p_loss"] = p_loss
    return base


def _mean_where(values: np.ndarray, mask: np.ndarray) -> float:
    return float(values[mask].mean()) if mask.any() else np.nan


def ubiquity_gap(t: TransitionSet, rca_t0: RcaMatrix) -> pd.DataFrame:
    """Mean-ubiquity difference between realized and non-realized transitions.

    For each included country: mean base-year ubiquity of its realized gains
    minus the mean over its non-realized at-risk gains, and the same for
    losses. A side with no realizations or no non-realizations is NaN.
    """
    base, jj = _included_country_frame(t, rca_t0)
    s = rca_t0.ubiquity.astype(float)
    gain_gap, loss_gap = [], []
    for j in jj:
        realized = t.gains[:, j]
        missed = t.at_risk_gain[:, j] & ~realized
        gain_gap.append(_mean_where(s, realized) - _mean_where(s, missed))
        realized = t.losses[:, j]
        kept = t.at_risk_loss[:, j] & ~realized
        loss_gap.append(_mean_where(s, realized) - _mean_where(s, kept))
    base["gain_ubiquity_gap"] = gain_gap
    base["loss_ubiquity_gap"] = loss_gap
    return base


def transition_complexity_summary(
    t: TransitionSet, pci: np.ndarray, eci: np.ndarray, rca_t0: RcaMatrix
) -> pd.DataFrame:
    """Mean complexity of gained and lost products per country, with base ECI.

    ``pci`` must cover all products; a country with no gains (or losses)
    gets NaN for that mean.
    """
    pci = np.asarray(pci, dtype=float)
    eci = np.asarray(eci, dtype=float)
    if pci.shape != (len(t.products),):
        raise InputError("pci must have one value per product")
    if eci.shape != (len(t.countries),):
        raise InputError("eci must have one value per country")
    base, jj = _included_country_frame(t, rca_t0)
    base["mean_pci_gained"] = [_mean_where(pci, t.gains[:, j]) for j in jj]
    base["mean_pci_lost"] = [_mean_where(pci, t.losses[:, j]) for j in jj]
    base["eci"] = eci[jj]
    return base
