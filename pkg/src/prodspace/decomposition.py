"""Density split into unrelated (diversity+ubiquity) and related (residual)
parts, pushed through the transition logits: log-odds decomposition,
per-country success bonus, top-k confusion, and per-country fits."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import pandas as pd

from .errors import (
    InputError,
    RankDeficiencyError,
    SeparationError,
)
from .product_space import DensityMatrix
from .rca import RcaMatrix, TransitionSet
from .regression import (
    FitResult,
    design_matrix,
    logit_fit,
    lr_test,
    probability_elasticity,
)
from .regression import ols_fit

EVENTS = ("gain", "loss")
DENSITY_ONLY = "density_only"
THREE_VARIABLE = "three_variable"


@dataclass
class DensityDecomposition:
    """Full-grid OLS of density on diversity and ubiquity, residual kept."""

    c_hat: float
    delta: float
    nu: float
    r: np.ndarray  # m x n residual matrix
    source_fit: FitResult
    diversity_fit: FitResult  # single-regressor runs for the R2 additivity
    ubiquity_fit: FitResult
    diversity: np.ndarray  # q_j, length n
    ubiquity: np.ndarray  # s_i, length m
    products: list[str]
    countries: list[str]

    def fitted(self) -> np.ndarray:
        return self.c_hat + self.delta * self.diversity[None, :] + self.nu * self.ubiquity[:, None]


@dataclass
class EventSample:
    """At-risk observations of one event, in product-major cell order."""

    event: str
    product_index: np.ndarray
    country_index: np.ndarray
    y: np.ndarray
    density: np.ndarray
    diversity: np.ndarray
    ubiquity: np.ndarray
    residual: np.ndarray

    @property
    def n_obs(self) -> int:
        return self.y.shape[0]


@dataclass
class TransitionModels:
    event: str
    sample: EventSample
    fit_density: FitResult
    fit_three: FitResult
    lr_statistic: float
    lr_df: int
    lr_p_value: float


@dataclass
class LorDecomposition:
    """Per-observation log-odds ratio and its four additive parts."""

    model_tag: str
    sample: EventSample = field(repr=False)
    lor: np.ndarray
    constant_part: np.ndarray
    diversity_part: np.ndarray
    ubiquity_part: np.ndarray
    residual_part: np.ndarray


@dataclass
class SuccessBonus:
    country: str
    b: float
    ubiquity_part: float
    residual_part: float
    mean_lor_success: float
    mean_lor_failure: float
    ubiquity_gap: float
    residual_gap: float
    n_success: int
    n_failure: int


def decompose_density(d: DensityMatrix, rca: RcaMatrix) -> DensityDecomposition:
    """OLS of d_ij on constant + q_j + s_i over the full m x n grid.

    The residual matrix is defined as density minus the evaluated fit, so
    the reconstruction identity holds at machine precision. The two
    single-regressor fits are retained: on the full grid q and s are exactly
    orthogonal, so their R2 values add up to the joint one.
    """
    m, n = d.d.shape
    if not np.array_equal(d.products, rca.products):
        raise InputError("density and rca matrices are not aligned")
    q = rca.diversity.astype(np.float64)
    s = rca.ubiquity.astype(np.float64)

    y = d.d.ravel()  # C order: cell (i, j) at i*n + j
    q_col = np.tile(q, m)
    s_col = np.repeat(s, n)

    source = ols_fit(design_matrix(y, {"diversity": q_col, "ubiquity": s_col}))
    div_fit = ols_fit(design_matrix(y, {"diversity": q_col}))
    ub_fit = ols_fit(design_matrix(y, {"ubiquity": s_col}))

    c_hat = source.coefficient("const")
    delta = source.coefficient("diversity")
    nu = source.coefficient("ubiquity")
    r = d.d - (c_hat + delta * q[None, :] + nu * s[:, None])

    return DensityDecomposition(
        c_hat=c_hat,
        delta=delta,
        nu=nu,
        r=r,
        source_fit=source,
        diversity_fit=div_fit,
        ubiquity_fit=ub_fit,
        diversity=q,
        ubiquity=s,
        products=d.products,
        countries=d.countries,
    )


def _at_risk_mask(t: TransitionSet, event: str) -> tuple[np.ndarray, np.ndarray]:
    if event == "gain":
        return t.at_risk_gain, t.gains
    if event == "loss":
        return t.at_risk_loss, t.losses
    raise InputError(f"event must be one of {EVENTS}, got {event!r}")


def event_sample(
    t: TransitionSet, d: DensityMatrix, dec: DensityDecomposition, event: str
) -> EventSample:
    """Collect the at-risk cells of one event with their regressor values."""
    if not np.array_equal(t.products, d.products) or not np.array_equal(
        t.countries, d.countries
    ):
        raise InputError("transition set and density matrix are not aligned")
    at_risk, realized = _at_risk_mask(t, event)
    ii, jj = np.nonzero(at_risk)
    return EventSample(
        event=event,
        product_index=ii,
        country_index=jj,
        y=realized[ii, jj].astype(np.float64),
        density=d.d[ii, jj],
        diversity=dec.diversity[jj],
        ubiquity=dec.ubiquity[ii],
        residual=dec.r[ii, jj],
    )


def fit_transition_models(
    t: TransitionSet,
    d: DensityMatrix,
    dec: DensityDecomposition,
    rca: RcaMatrix,
    event: str,
) -> TransitionModels:
    """The two logits of one event on its at-risk sample, plus their LR test.

    Model 1 regresses the event on density alone; model 2 on the density
    parts (diversity, ubiquity, residual). Model 1 is the restricted form
    of model 2, so the LR test has 2 degrees of freedom. Both models use
    the identical sample.
    """
    if not np.array_equal(rca.products, d.products):
        raise InputError("rca and density matrices are not aligned")
    sample = event_sample(t, d, dec, event)
    fit_density = logit_fit(design_matrix(sample.y, {"density": sample.density}))
    fit_three = logit_fit(
        design_matrix(
            sample.y,
            {
                "diversity": sample.diversity,
                "ubiquity": sample.ubiquity,
                "residual": sample.residual,
            },
        )
    )
    stat, df, p = lr_test(fit_density, fit_three)
    return TransitionModels(
        event=event,
        sample=sample,
        fit_density=fit_density,
        fit_three=fit_three,
        lr_statistic=stat,
        lr_df=df,
        lr_p_value=p,
    )


def lor_decompose(
    fit: FitResult, dec: DensityDecomposition, model_tag: str, sample: EventSample
) -> LorDecomposition:
    """Split each observation's log-odds ratio into its four linear parts.

    density_only: beta0 + beta1*d = (beta0 + beta1*c) + beta1*delta*q
    + beta1*nu*s + beta1*r. three_variable: the coefficients already act on
    the parts, so the split is read off directly.
    """
    if model_tag == DENSITY_ONLY:
        if fit.names != ["const", "density"]:
            raise InputError("fit does not match the density_only tag")
        b0 = fit.coefficient("const")
        b1 = fit.coefficient("density")
        lor = b0 + b1 * sample.density
        constant = np.full(sample.n_obs, b0 + b1 * dec.c_hat)
        diversity = b1 * dec.delta * sample.diversity
        ubiquity = b1 * dec.nu * sample.ubiquity
        residual = b1 * sample.residual
    elif model_tag == THREE_VARIABLE:
        if fit.names != ["const", "diversity", "ubiquity", "residual"]:
            raise InputError("fit does not match the three_variable tag")
        lor = (
            fit.coefficient("const")
            + fit.coefficient("diversity") * sample.diversity
            + fit.coefficient("ubiquity") * sample.ubiquity
            + fit.coefficient("residual") * sample.residual
        )
        constant = np.full(sample.n_obs, fit.coefficient("const"))
        diversity = fit.coefficient("diversity") * sample.diversity
        ubiquity = fit.coefficient("ubiquity") * sample.ubiquity
        residual = fit.coefficient("residual") * sample.residual
    else:
        raise InputError(f"unknown model tag {model_tag!r}")

    return LorDecomposition(
        model_tag=model_tag,
        sample=sample,
        lor=lor,
        constant_part=constant,
        diversity_part=diversity,
        ubiquity_part=ubiquity,
        residual_part=residual,
    )


def success_bonus(
    lor: LorDecomposition, t: TransitionSet, event: str
) -> list[SuccessBonus]:
    """Per-country mean-LOR advantage of realized over non-realized cells.

    The constant and diversity parts are common to every cell of a country,
    so they cancel from the success/failure mean difference; the bonus is
    the ubiquity-part gap plus the residual-part gap, stored so that the
    additivity is exact. Countries lacking successes or failures are left
    out.
    """
    if lor.sample.event != event:
        raise InputError(f"LOR sample is for {lor.sample.event!r}, not {event!r}")
    sample = lor.sample
    out: list[SuccessBonus] = []
    for j in np.unique(sample.country_index):
        in_country = sample.country_index == j
        succ = in_country & (sample.y == 1.0)
        fail = in_country & (sample.y == 0.0)
        if not succ.any() or not fail.any():
            continue
        ub_gap_part = lor.ubiquity_part[succ].mean() - lor.ubiquity_part[fail].mean()
        res_gap_part = lor.residual_part[succ].mean() - lor.residual_part[fail].mean()
        out.append(
            SuccessBonus(
                country=str(t.countries[j]),
                b=ub_gap_part + res_gap_part,
                ubiquity_part=ub_gap_part,
                residual_part=res_gap_part,
                mean_lor_success=float(lor.lor[succ].mean()),
                mean_lor_failure=float(lor.lor[fail].mean()),
                ubiquity_gap=float(
                    sample.ubiquity[succ].mean() - sample.ubiquity[fail].mean()
                ),
                residual_gap=float(
                    sample.residual[succ].mean() - sample.residual[fail].mean()
                ),
                n_success=int(succ.sum()),
                n_failure=int(fail.sum()),
            )
        )
    return out


def topk_confusion(lor: LorDecomposition, t: TransitionSet, event: str) -> dict:
    """Rank at-risk cells by LOR and score the top slice of realized size.

    The slice size equals the realized event count, balancing false
    positives against false negatives. Ties broken by (LOR descending,
    product ascending, country ascending) for determinism.
    """
    if lor.sample.event != event:
        raise InputError(f"LOR sample is for {lor.sample.event!r}, not {event!r}")
    sample = lor.sample
    n = sample.n_obs
    k = int(sample.y.sum())
    order = np.lexsort((sample.country_index, sample.product_index, -lor.lor))
    top = order[:k]
    true_positives = int(sample.y[top].sum())
    bottom = n - k
    true_negatives = bottom - (k - true_positives)
    return {
        "event": event,
        "n_at_risk": n,
        "n_realized": k,
        "true_positives": true_positives,
        "pct_correct_positives": 100.0 * true_positives / k if k else float("nan"),
        "pct_correct_negatives": 100.0 * true_negatives / bottom if bottom else float("nan"),
    }


def per_country_models(
    t: TransitionSet,
    dec: DensityDecomposition,
    rca: RcaMatrix,
    event: str,
) -> pd.DataFrame:
    """Country-level logits on constant + ubiquity + residual.

    One row per included country holding the fit diagnostics and the mean
    probability elasticities of ubiquity and residual. When the country
    mean of a regressor is negative the mean elasticity is flipped so its
    sign matches the coefficient's. Degenerate countries stay in the table
    with a status reason instead of numbers.
    """
    at_risk, realized = _at_risk_mask(t, event)
    rows = []
    for j in np.flatnonzero(t.included_countries):
        mask = at_risk[:, j]
        row = {
            "country": str(t.countries[j]),
            "diversity": float(dec.diversity[j]),
            "n_at_risk": int(mask.sum()),
            "n_realized": int(realized[mask, j].sum()),
            "status": "ok",
            "pseudo_r2": np.nan,
            "coef_ubiquity": np.nan,
            "coef_residual": np.nan,
            "elasticity_ubiquity": np.nan,
            "elasticity_residual": np.nan,
        }
        if row["n_at_risk"] == 0:
            row["status"] = "no_at_risk"
            rows.append(row)
            continue
        ii = np.flatnonzero(mask)
        y = realized[ii, j].astype(np.float64)
        if y.min() == y.max():
            row["status"] = "one_class"
            rows.append(row)
            continue
        d = design_matrix(
            y, {"ubiquity": dec.ubiquity[ii], "residual": dec.r[ii, j]}
        )
        try:
            fit = logit_fit(d)
        except SeparationError:
            row["status"] = "separation"
            rows.append(row)
            continue
        except RankDeficiencyError:
            row["status"] = "rank_deficient"
            rows.append(row)
            continue
        if not fit.converged:
            row["status"] = "no_convergence"
            rows.append(row)
            continue
        row["pseudo_r2"] = fit.pseudo_r_squared
        row["coef_ubiquity"] = fit.coefficient("ubiquity")
        row["coef_residual"] = fit.coefficient("residual")
        for col in ("ubiquity", "residual"):
            elast = probability_elasticity(fit, d, col).mean()
            if d.column(col).mean() < 0:
                elast = -elast
            row[f"elasticity_{col}"] = float(elast)
        rows.append(row)
    return pd.DataFrame(rows)
