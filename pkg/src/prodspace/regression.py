"""From-scratch OLS and maximum-likelihood logit with the usual diagnostics."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import pandas as pd
import scipy.linalg
from scipy import stats

from .errors import (
    InputError,
    NumericalError,
    RankDeficiencyError,
    SeparationError,
)

CONSTANT = "const"
# Coefficients past this magnitude with a non-vanishing gradient indicate a
# diverging (separated) logit.
SEPARATION_BOUND = 30.0


@dataclass
class DesignMatrix:
    """Named regressor columns (with an explicit constant) and a response."""

    names: list[str]
    X: np.ndarray  # (N, k)
    y: np.ndarray  # (N,)

    def __post_init__(self):
        self.X = np.asarray(self.X, dtype=np.float64)
        self.y = np.asarray(self.y, dtype=np.float64)
        if self.X.ndim != 2 or self.X.shape != (self.y.shape[0], len(self.names)):
            raise InputError("design shape does not match names/response")
        if len(set(self.names)) != len(self.names):
            raise InputError("column names must be unique")
        if not (np.isfinite(self.X).all() and np.isfinite(self.y).all()):
            raise InputError("design matrix contains missing or non-finite values")
        if CONSTANT not in self.names:
            raise InputError("design matrix must include a constant column")
        if not np.all(self.X[:, self.names.index(CONSTANT)] == 1.0):
            raise InputError("constant column must be all ones")

    @property
    def n_obs(self) -> int:
        return self.X.shape[0]

    def column(self, name: str) -> np.ndarray:
        return self.X[:, self.names.index(name)]


def design_matrix(y, columns: dict[str, np.ndarray]) -> DesignMatrix:
    """Assemble a design with a leading constant from named columns."""
    y = np.asarray(y, dtype=np.float64)
    names = [CONSTANT, *columns.keys()]
    cols = [np.ones_like(y), *(np.asarray(v, dtype=np.float64) for v in columns.values())]
    return DesignMatrix(names=names, X=np.column_stack(cols), y=y)


@dataclass
class FitResult:
    """Estimated coefficients and fit diagnostics for one OLS or logit run."""

    method: str  # "ols" | "logit"
    names: list[str]
    coefficients: np.ndarray
    standard_errors: np.ndarray
    n_obs: int
    converged: bool = True
    iterations: int = 0
    rss: float | None = None
    r_squared: float | None = None
    log_likelihood: float | None = None
    null_log_likelihood: float | None = None
    pseudo_r_squared: float | None = None
    residuals: np.ndarray | None = field(default=None, repr=False)

    @property
    def n_params(self) -> int:
        return len(self.names)

    def coefficient(self, name: str) -> float:
        return float(self.coefficients[self.names.index(name)])

    def standard_error(self, name: str) -> float:
        return float(self.standard_errors[self.names.index(name)])

    def p_values(self) -> np.ndarray:
        """Two-sided p-values: t with N-k df for OLS, normal for logit."""
        z = self.coefficients / self.standard_errors
        if self.method == "ols":
            return 2.0 * stats.t.sf(np.abs(z), df=self.n_obs - self.n_params)
        return 2.0 * stats.norm.sf(np.abs(z))


def significance_stars(p: float) -> str:
    if p < 0.01:
        return "***"
    if p < 0.05:
        return "**"
    if p < 0.1:
        return "*"
    return ""


def _pivoted_qr_full_rank(d: DesignMatrix):
    """QR with column pivoting; raises naming the dependent columns."""
    n, k = d.X.shape
    q, r, piv = scipy.linalg.qr(d.X, mode="economic", pivoting=True)
    diag = np.abs(np.diag(r))
    rank = int((diag > max(n, k) * np.finfo(float).eps * diag[0]).sum())
    if rank < k:
        dependent = [d.names[i] for i in sorted(piv[rank:])]
        raise RankDeficiencyError(
            f"linearly dependent column(s): {', '.join(dependent)}", columns=dependent
        )
    return q, r, piv


def ols_fit(d: DesignMatrix) -> FitResult:
    """Least squares via QR with column pivoting; conventional standard errors.

    R-squared is centered. Rank deficiency raises
    :class:`RankDeficiencyError` naming the dependent columns.
    """
    n, k = d.X.shape
    if n <= k:
        raise InputError(f"need more observations ({n}) than columns ({k})")

    q, r, piv = _pivoted_qr_full_rank(d)

    beta_piv = scipy.linalg.solve_triangular(r, q.T @ d.y)
    beta = np.empty(k)
    beta[piv] = beta_piv

    residuals = d.y - d.X @ beta
    rss = float(residuals @ residuals)
    centered = d.y - d.y.mean()
    tss = float(centered @ centered)
    r_squared = 1.0 - rss / tss if tss > 0 else 0.0

    sigma2 = rss / (n - k)
    r_inv = scipy.linalg.solve_triangular(r, np.eye(k))
    cov_piv = sigma2 * (r_inv @ r_inv.T)
    se = np.empty(k)
    se[piv] = np.sqrt(np.diag(cov_piv))

    return FitResult(
        method="ols",
        names=list(d.names),
        coefficients=beta,
        standard_errors=se,
        n_obs=n,
        rss=rss,
        r_squared=r_squared,
        residuals=residuals,
    )


def _log_likelihood(eta: np.ndarray, y: np.ndarray) -> float:
    # sum(y*eta - log(1 + exp(eta))), computed stably
    return float(y @ eta - np.logaddexp(0.0, eta).sum())


def logit_fit(d: DesignMatrix, max_iter: int = 50, tol: float = 1e-8) -> FitResult:
    """Maximum-likelihood logit via Newton iterations with step halving.

    Converges when every component of the score vector is at most ``tol``
    in magnitude. Raises :class:`SeparationError` when coefficients diverge
    (complete or quasi-complete separation) and :class:`InputError` when the
    response is not binary with both classes present.
    """
    y = d.y
    if not np.all((y == 0.0) | (y == 1.0)):
        raise InputError("logit response must be 0/1")
    k_success = y.sum()
    if k_success == 0 or k_success == len(y):
        raise InputError("logit response has a single class")
    _pivoted_qr_full_rank(d)

    n, k = d.X.shape
    beta = np.zeros(k)
    eta = d.X @ beta
    ll = _log_likelihood(eta, y)
    converged = False
    iterations = 0

    for iterations in range(1, max_iter + 1):
        p = 1.0 / (1.0 + np.exp(-eta))
        grad = d.X.T @ (y - p)
        if np.max(np.abs(grad)) <= tol:
            converged = True
            iterations -= 1
            break
        if np.max(np.abs(beta)) > SEPARATION_BOUND:
            raise SeparationError(
                "coefficients diverging with non-vanishing gradient: "
                "data are (quasi-)completely separated"
            )

        w = p * (1.0 - p)
        hessian = (d.X * w[:, None]).T @ d.X
        try:
            step = np.linalg.solve(hessian, grad)
        except np.linalg.LinAlgError as exc:
            raise SeparationError(f"singular Hessian in Newton step: {exc}") from exc

        # step halving: never accept a likelihood decrease
        scale = 1.0
        for _ in range(30):
            candidate = beta + scale * step
            eta_new = d.X @ candidate
            ll_new = _log_likelihood(eta_new, y)
            if ll_new >= ll - 1e-12 * abs(ll):
                break
            scale /= 2.0
        beta, eta, ll = candidate, eta_new, ll_new
    else:
        p = 1.0 / (1.0 + np.exp(-eta))
        grad = d.X.T @ (y - p)
        converged = bool(np.max(np.abs(grad)) <= tol)

    if not converged and np.max(np.abs(beta)) > SEPARATION_BOUND:
        raise SeparationError(
            "coefficients diverging with non-vanishing gradient: "
            "data are (quasi-)completely separated"
        )

    p = 1.0 / (1.0 + np.exp(-eta))
    w = p * (1.0 - p)
    hessian = (d.X * w[:, None]).T @ d.X
    cov = np.linalg.inv(hessian)
    se = np.sqrt(np.diag(cov))

    rate = k_success / n
    ll_null = float(k_success * np.log(rate) + (n - k_success) * np.log(1.0 - rate))

    return FitResult(
        method="logit",
        names=list(d.names),
        coefficients=beta,
        standard_errors=se,
        n_obs=n,
        converged=converged,
        iterations=iterations,
        log_likelihood=ll,
        null_log_likelihood=ll_null,
        pseudo_r_squared=1.0 - ll / ll_null,
    )


def pseudo_r2(fit: FitResult, null_fit: FitResult) -> float:
    """McFadden pseudo R-squared of ``fit`` against a constant-only fit."""
    if null_fit.names != [CONSTANT]:
        raise InputError("null fit must be constant-only")
    if null_fit.n_obs != fit.n_obs:
        raise InputError("fits estimated on different samples")
    assert null_fit.log_likelihood != 0.0
    return 1.0 - fit.log_likelihood / null_fit.log_likelihood


def lr_test(restricted: FitResult, general: FitResult) -> tuple[float, int, float]:
    """Likelihood-ratio test of a nested restriction.

    Returns ``(statistic, df, p_value)`` with the statistic
    ``2 * (lnL_general - lnL_restricted)`` and a chi-square upper-tail p.
    """
    df = general.n_params - restricted.n_params
    statistic = 2.0 * (general.log_likelihood - restricted.log_likelihood)
    if statistic < -1e-8:
        raise NumericalError(
            f"negative LR statistic {statistic:.3e}: models are not nested "
            "or did not converge"
        )
    statistic = max(statistic, 0.0)
    if df == 0:
        if statistic > 1e-8:
            raise NumericalError("zero restrictions but likelihoods differ")
        return statistic, 0, 1.0
    if df < 0:
        raise InputError("restricted model has more parameters than the general one")
    return statistic, df, float(stats.chi2.sf(statistic, df))


def probability_elasticity(fit: FitResult, d: DesignMatrix, column: str) -> np.ndarray:
    """Per-observation elasticity of the fitted probability w.r.t. one column.

    For the logit form this is ``beta_col * x_col * (1 - p_hat)`` evaluated
    at each observation.
    """
    if column not in fit.names:
        raise InputError(f"column {column!r} not in fit")
    if not fit.converged:
        raise InputError("fit did not converge; elasticities undefined")
    eta = d.X @ fit.coefficients
    p = 1.0 / (1.0 + np.exp(-eta))
    return fit.coefficient(column) * d.column(column) * (1.0 - p)


def summary_frame(fits: dict[str, FitResult]) -> pd.DataFrame:
    """Side-by-side estimation table: coefficient with stars, SE in parentheses.

    Rows follow the union of variable orderings across fits, then N and a
    (pseudo-)R-squared line per the fit method.
    """
    variables: list[str] = []
    for fit in fits.values():
        for name in fit.names:
            if name not in variables:
                variables.append(name)

    rows = []
    for name in variables:
        coef_row = {"variable": name}
        se_row = {"variable": ""}
        for label, fit in fits.items():
            if name in fit.names:
                p = fit.p_values()[fit.names.index(name)]
                coef_row[label] = f"{fit.coefficient(name):.6g}{significance_stars(p)}"
                se_row[label] = f"({fit.standard_error(name):.6g})"
            else:
                coef_row[label] = ""
                se_row[label] = ""
        rows.append(coef_row)
        rows.append(se_row)

    n_row = {"variable": "N"}
    r2_row = {"variable": "R2"}
    for label, fit in fits.items():
        n_row[label] = str(fit.n_obs)
        if fit.method == "ols":
            r2_row[label] = f"{fit.r_squared:.6g}"
        else:
            r2_row["variable"] = "Pseudo-R2"
            r2_row[label] = f"{fit.pseudo_r_squared:.6g}"
    rows.append(n_row)
    rows.append(r2_row)
    return pd.DataFrame(rows, columns=["variable", *fits.keys()])
