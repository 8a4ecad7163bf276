"""Local polynomial smoother against explicit weighted normal equations."""

import numpy as np
import pytest

from prodspace.errors import DegenerateInputError, InputError
from prodspace.smoothing import (
    KERNELS,
    SmoothSpec,
    epanechnikov,
    gaussian,
    lpoly,
    triangle,
    uniform,
)


def oracle_fit_at(point, x, y, spec):
    """One local fit via inverted normal equations; (beta0, leverage row)."""
    kern = KERNELS[spec.kernel]
    w = kern((x - point) / spec.bandwidth)
    sup = w > 0
    if np.unique(x[sup]).size < spec.degree + 1:
        return np.nan, None
    xs = x[sup] - point
    z = np.vander(xs, spec.degree + 1, increasing=True)
    wmat = np.diag(w[sup])
    a_inv = np.linalg.inv(z.T @ wmat @ z)
    beta = a_inv @ z.T @ wmat @ y[sup]
    leverage = (a_inv @ z.T @ wmat)[0]
    return float(beta[0]), leverage


def oracle_point(g, x, y, spec):
    """Fitted value and band at one grid point, recomputed from scratch."""
    kern = KERNELS[spec.kernel]
    fits = {v: oracle_fit_at(v, x, y, spec)[0] for v in np.unique(x)}
    residuals = y - np.array([fits[v] for v in x])
    valid = np.isfinite(residuals)
    fit, leverage = oracle_fit_at(g, x, y, spec)
    w_se = kern((x[valid] - g) / spec.se_bandwidth)
    sigma2 = float(w_se @ residuals[valid] ** 2) / w_se.sum()
    half_width = 1.96 * np.sqrt(sigma2 * float(leverage @ leverage))
    return fit, fit - half_width, fit + half_width


WIGGLY_X = np.linspace(0.0, 100.0, 41)
WIGGLY_Y = np.sin(WIGGLY_X / 15.0) + 0.3 * np.sin(7.0 * WIGGLY_X)


def test_exact_line_reproduced_with_collapsed_bands():
    x = np.arange(20, dtype=float) * 2.0
    y = 2.0 + 0.5 * x
    result = lpoly(x, y, SmoothSpec(bandwidth=10.0, se_bandwidth=15.0))
    np.testing.assert_array_equal(result.x, x)
    np.testing.assert_allclose(result.fitted, y, atol=1e-10, rtol=0)
    np.testing.assert_allclose(result.lower, result.fitted, atol=1e-10, rtol=0)
    np.testing.assert_allclose(result.upper, result.fitted, atol=1e-10, rtol=0)


def test_bands_are_symmetric_on_noisy_data():
    rng = np.random.default_rng(31)
    x = np.repeat(np.arange(30.0), 2)
    y = 0.1 * x + rng.normal(0, 1.0, x.size)
    result = lpoly(x, y, SmoothSpec(bandwidth=8.0, se_bandwidth=12.0))
    finite = np.isfinite(result.fitted)
    assert finite.any()
    np.testing.assert_allclose(
        result.upper[finite] + result.lower[finite],
        2.0 * result.fitted[finite],
        atol=1e-10,
        rtol=1e-12,
    )
    assert (result.upper[finite] >= result.fitted[finite]).all()


@pytest.mark.parametrize("g", [50.0, 33.3])
def test_fit_and_band_match_normal_equations_oracle(g):
    spec = SmoothSpec(bandwidth=12.0, se_bandwidth=20.0, grid=np.array([g]))
    result = lpoly(WIGGLY_X, WIGGLY_Y, spec)
    fit, lo, hi = oracle_point(g, WIGGLY_X, WIGGLY_Y, spec)
    assert result.fitted[0] == pytest.approx(fit, abs=1e-10)
    assert result.lower[0] == pytest.approx(lo, abs=1e-10)
    assert result.upper[0] == pytest.approx(hi, abs=1e-10)
    assert result.effective_n[0] == (np.abs(WIGGLY_X - g) < spec.bandwidth).sum()


def test_degree_zero_is_kernel_weighted_mean():
    spec = SmoothSpec(degree=0, bandwidth=15.0, grid=np.array([40.0]))
    result = lpoly(WIGGLY_X, WIGGLY_Y, spec)
    w = epanechnikov((WIGGLY_X - 40.0) / 15.0)
    assert result.fitted[0] == pytest.approx((w @ WIGGLY_Y) / w.sum(), abs=1e-12)


def test_narrower_bandwidth_tracks_the_sample_more_closely():
    x = np.arange(0.0, 102.0, 2.0)
    y = np.sin(x / 15.0)
    rss = []
    for bw in (100.0, 50.0, 25.0, 12.0, 6.0, 3.0):
        result = lpoly(x, y, SmoothSpec(bandwidth=bw, se_bandwidth=bw))
        assert np.isfinite(result.fitted).all()
        rss.append(float(((result.fitted - y) ** 2).sum()))
    assert all(b <= a + 1e-12 for a, b in zip(rss, rss[1:]))
    assert rss[-1] < rss[0]


def test_explicit_grid_is_respected():
    grid = np.array([10.5, 50.0, 77.25])
    result = lpoly(WIGGLY_X, WIGGLY_Y, SmoothSpec(bandwidth=20.0, grid=grid))
    np.testing.assert_array_equal(result.x, grid)
    assert np.isfinite(result.fitted).all()


def test_unsupported_grid_points_come_back_nan():
    x = np.array([0.0, 0.0, 0.0, 10.0])
    y = np.array([1.0, 2.0, 3.0, 4.0])
    result = lpoly(x, y, SmoothSpec(bandwidth=5.0))
    # each cluster sees only one distinct x within the bandwidth
    assert np.isnan(result.fitted).all()
    assert np.isnan(result.lower).all()
    np.testing.assert_array_equal(result.effective_n, [3, 1])

    far = lpoly(x, y, SmoothSpec(bandwidth=5.0, grid=np.array([1000.0])))
    assert far.effective_n[0] == 0
    assert np.isnan(far.fitted[0])


def test_all_identical_x_rejected():
    with pytest.raises(DegenerateInputError, match="identical"):
        lpoly(np.zeros(5), np.arange(5.0))


def test_input_validation():
    with pytest.raises(InputError, match="equal-length"):
        lpoly(np.arange(4.0), np.arange(5.0))
    with pytest.raises(InputError, match="equal-length"):
        lpoly(np.zeros((2, 2)), np.zeros((2, 2)))
    with pytest.raises(InputError, match="at least"):
        lpoly(np.array([1.0, np.nan]), np.array([1.0, 2.0]))


def test_spec_validation():
    with pytest.raises(InputError, match="degree"):
        SmoothSpec(degree=-1)
    with pytest.raises(InputError, match="positive"):
        SmoothSpec(bandwidth=0.0)
    with pytest.raises(InputError, match="positive"):
        SmoothSpec(se_bandwidth=-3.0)
    with pytest.raises(InputError, match="kernel"):
        SmoothSpec(kernel="cosine")


def test_non_finite_pairs_are_dropped():
    x = WIGGLY_X.copy()
    y = WIGGLY_Y.copy()
    y[3] = np.nan
    x[7] = np.inf
    keep = np.isfinite(x) & np.isfinite(y)
    spec = SmoothSpec(bandwidth=12.0, se_bandwidth=20.0)
    dirty = lpoly(x, y, spec)
    clean = lpoly(x[keep], y[keep], spec)
    np.testing.assert_array_equal(dirty.x, clean.x)
    np.testing.assert_array_equal(dirty.fitted, clean.fitted)
    np.testing.assert_array_equal(dirty.lower, clean.lower)


def test_kernel_shapes():
    assert epanechnikov(np.array([0.0]))[0] == 0.75
    assert epanechnikov(np.array([1.0]))[0] == 0.0
    assert triangle(np.array([0.0]))[0] == 1.0
    assert triangle(np.array([1.0]))[0] == 0.0
    assert uniform(np.array([0.5]))[0] == 0.5
    assert uniform(np.array([1.0]))[0] == 0.0
    assert gaussian(np.array([0.0]))[0] == pytest.approx(1.0 / np.sqrt(2 * np.pi))
    for fn in (epanechnikov, triangle, uniform, gaussian):
        assert (fn(np.linspace(-3, 3, 101)) >= 0).all()


@pytest.mark.parametrize("kernel", sorted(KERNELS))
def test_every_kernel_smooths_the_wiggly_fixture(kernel):
    spec = SmoothSpec(bandwidth=15.0, se_bandwidth=25.0, kernel=kernel)
    result = lpoly(WIGGLY_X, WIGGLY_Y, spec)
    middle = (result.x > 20) & (result.x < 80)
    assert np.isfinite(result.fitted[middle]).all()
    assert (result.upper[middle] >= result.lower[middle]).all()
