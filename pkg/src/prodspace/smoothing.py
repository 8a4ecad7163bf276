"""Local polynomial smoother with kernel-weighted confidence bands."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateInputError, InputError


def epanechnikov(u: np.ndarray) -> np.ndarray:
    return np.where(np.abs(u) < 1.0, 0.75 * (1.0 - u * u), 0.0)


def triangle(u: np.ndarray) -> np.ndarray:
    return np.maximum(1.0 - np.abs(u), 0.0)


def uniform(u: np.ndarray) -> np.ndarray:
    return np.where(np.abs(u) < 1.0, 0.5, 0.0)


def gaussian(u: np.ndarray) -> np.ndarray:
    return np.exp(-0.5 * u * u) / np.sqrt(2.0 * np.pi)


KERNELS = {
    "epanechnikov": epanechnikov,
    "triangle": triangle,
    "uniform": uniform,
    "gaussian": gaussian,
}


@dataclass(frozen=True)
class SmoothSpec:
    degree: int = 1
    bandwidth: float = 50.0
    se_bandwidth: float = 75.0
    kernel: str = "epanechnikov"
    grid: np.ndarray | None = None  # default: sorted unique x

    def __post_init__(self):
        if self.degree < 0:
            raise InputError("degree must be >= 0")
        if self.bandwidth <= 0 or self.se_bandwidth <= 0:
            raise InputError("bandwidths must be positive")
        if self.kernel not in KERNELS:
            raise InputError(f"unknown kernel {self.kernel!r}; have {sorted(KERNELS)}")


@dataclass
class SmoothResult:
    x: np.ndarray
    fitted: np.ndarray
    lower: np.ndarray
    upper: np.ndarray
    effective_n: np.ndarray


def _wls_at(
    g: float, x: np.ndarray, y: np.ndarray, spec: SmoothSpec, kernel
) -> tuple[float, np.ndarray, np.ndarray, int]:
    """Weighted polynomial fit centered at g.

    Returns (fitted, support index, leverage row, effective n); fitted is NaN
    when fewer than degree+1 distinct x-values carry weight. The leverage row
    l satisfies fitted = l @ y[support], needed for the variance of the fit.
    """
    w = kernel((x - g) / spec.bandwidth)
    support = np.flatnonzero(w > 0)
    n_eff = support.size
    if np.unique(x[support]).size < spec.degree + 1:
        return np.nan, support, np.empty(0), n_eff

    xs = x[support] - g
    ws = w[support]
    z = np.vander(xs, spec.degree + 1, increasing=True)
    sw = np.sqrt(ws)
    beta, _, rank, _ = np.linalg.lstsq(z * sw[:, None], y[support] * sw, rcond=None)
    if rank < spec.degree + 1:
        return np.nan, support, np.empty(0), n_eff
    # row of the smoother matrix: beta0 = e0' (Z'WZ)^{-1} Z'W y
    zwz = (z * ws[:, None]).T @ z
    leverage = np.linalg.solve(zwz, (z * ws[:, None]).T)[0]
    return float(beta[0]), support, leverage, n_eff


def lpoly(x, y, spec: SmoothSpec | None = None) -> SmoothResult:
    """Kernel-weighted local polynomial regression with 95% bands.

    At each grid point the response is fit by weighted least squares on a
    polynomial basis centered there. The band is fitted +/- 1.96 * SE,
    where the local error variance comes from squared residuals of the
    first-pass fit, smoothed with the wider se_bandwidth. Grid points with
    fewer than degree+1 distinct supported x-values come back as NaN.
    """
    spec = spec or SmoothSpec()
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape != y.shape or x.ndim != 1:
        raise InputError("x and y must be equal-length vectors")
    keep = np.isfinite(x) & np.isfinite(y)
    x, y = x[keep], y[keep]
    if x.size < spec.degree + 1:
        raise InputError(f"need at least {spec.degree + 1} observations")
    if np.unique(x).size == 1:
        raise DegenerateInputError("all x values identical; no trend to fit")

    kernel = KERNELS[spec.kernel]
    grid = np.unique(x) if spec.grid is None else np.asarray(spec.grid, dtype=np.float64)

    # Pass 1: fits at the sample points give residuals for the variance step.
    sample_grid = np.unique(x)
    fit_at = {}
    for g in sample_grid:
        fit_at[g] = _wls_at(g, x, y, spec, kernel)[0]
    residuals = y - np.array([fit_at[v] for v in x])
    valid = np.isfinite(residuals)

    fitted = np.full(grid.size, np.nan)
    lower = np.full(grid.size, np.nan)
    upper = np.full(grid.size, np.nan)
    effective_n = np.zeros(grid.size, dtype=np.int64)

    for idx, g in enumerate(grid):
        fit, support, leverage, n_eff = _wls_at(g, x, y, spec, kernel)
        effective_n[idx] = n_eff
        if not np.isfinite(fit):
            continue
        fitted[idx] = fit

        w_se = kernel((x[valid] - g) / spec.se_bandwidth)
        denom = w_se.sum()
        if denom <= 0:
            continue
        sigma2 = float(w_se @ (residuals[valid] ** 2)) / denom
        se = np.sqrt(sigma2 * float(leverage @ leverage))
        lower[idx] = fit - 1.96 * se
        upper[idx] = fit + 1.96 * se

    return SmoothResult(x=grid, fitted=fitted, lower=lower, upper=upper, effective_n=effective_n)
