"""Binary RCA, marginals, and gain/loss transition accounting."""

import numpy as np
import pytest

from conftest import build_panel, build_rca, random_binary
from prodspace.errors import DegenerateInputError, InputError
from prodspace.rca import (
    compute_rca,
    per_country_transition_stats,
    transition_complexity_summary,
    transition_rates,
    transitions,
    ubiquity_gap,
)


def test_diagonal_exports_give_identity_rca():
    panel = build_panel([[10.0, 0.0], [0.0, 10.0]])
    rca = compute_rca(panel, 2012)
    assert np.array_equal(rca.x, np.eye(2))


def test_equal_exports_specialize_everywhere():
    """Every ratio is exactly 1, and the inequality is weak."""
    panel = build_panel(np.full((3, 4), 7.0))
    rca = compute_rca(panel, 2012)
    assert rca.x.all()


def test_hand_computed_ratios():
    # country B: P1 ratio (10/10)/(20/30) = 1.5, P2 ratio 0
    # country A: P1 ratio (10/20)/(20/30) = 0.75, P2 ratio (10/20)/(10/30) = 1.5
    panel = build_panel([[10.0, 10.0], [10.0, 0.0]])
    rca = compute_rca(panel, 2012)
    assert np.array_equal(rca.x, [[0, 1], [1, 0]])


def test_threshold_is_weak_and_configurable():
    panel = build_panel([[10.0, 10.0], [10.0, 0.0]])
    assert compute_rca(panel, 2012, threshold=1.5).x[0, 1] == 1
    assert compute_rca(panel, 2012, threshold=1.500001).x[0, 1] == 0
    with pytest.raises(InputError):
        compute_rca(panel, 2012, threshold=0.0)


def test_marginals_match_matrix_sums(rng):
    values = rng.lognormal(size=(6, 5))
    values[rng.random((6, 5)) < 0.3] = 0.0
    rca = compute_rca(build_panel(values), 2012)
    assert np.array_equal(rca.diversity, rca.x.sum(axis=0))
    assert np.array_equal(rca.ubiquity, rca.x.sum(axis=1))
    assert rca.diversity.sum() == rca.ubiquity.sum() == rca.x.sum()


def test_global_rescaling_leaves_rca_unchanged(rng):
    values = rng.lognormal(size=(5, 4))
    base = compute_rca(build_panel(values), 2012)
    scaled = compute_rca(build_panel(values * 3.7), 2012)
    assert np.array_equal(base.x, scaled.x)


def test_zero_world_total_rejected():
    panel = build_panel(np.zeros((2, 2)), np.ones((2, 2)))
    with pytest.raises(InputError, match="zero world"):
        compute_rca(panel, 2012)


def test_inactive_country_has_empty_column():
    values = np.array([[5.0, 0.0], [3.0, 0.0]])
    rca = compute_rca(build_panel(values), 2012)
    assert not rca.active_countries[1]
    assert rca.x[:, 1].sum() == 0


def test_identical_years_produce_no_transitions():
    x = [[1, 0], [0, 1]]
    t = transitions(build_rca(x), build_rca(x))
    assert t.n_gains == 0 and t.n_losses == 0


def test_transition_set_algebra(rng):
    x0 = random_binary(rng, 7, 5)
    x1 = random_binary(rng, 7, 5)
    t = transitions(build_rca(x0), build_rca(x1))
    assert (t.gains <= t.at_risk_gain).all()
    assert (t.losses <= t.at_risk_loss).all()
    assert not (t.gains & t.losses).any()
    # at-risk sets partition the included cells
    assert t.n_at_risk_gain + t.n_at_risk_loss == 7 * 5
    assert np.array_equal(t.gains, t.at_risk_gain & x1.astype(bool))
    assert np.array_equal(t.losses, t.at_risk_loss & ~x1.astype(bool))


def test_single_cell_gain_is_recorded():
    x0 = np.array([[0, 1], [1, 1]])
    x1 = np.array([[1, 1], [1, 1]])
    t = transitions(build_rca(x0), build_rca(x1))
    assert t.pairs(t.gains) == [("0000", "C00")]


def test_mismatched_orderings_rejected():
    with pytest.raises(InputError):
        transitions(build_rca([[1, 0], [0, 1]]), build_rca([[1], [1]]))


def test_codes_missing_a_year_are_excluded():
    """A country active only at t0 contributes no cells to any mask."""
    r0 = build_rca([[1, 1], [1, 0]])
    r1 = build_rca([[1, 0], [1, 0]])
    r1.active_countries = np.array([True, False])
    t = transitions(r0, r1)
    assert not t.included_countries[1]
    for mask in (t.gains, t.losses, t.at_risk_gain, t.at_risk_loss):
        assert mask[:, 1].sum() == 0


def test_transition_rates_arithmetic():
    x0 = np.array([[0, 0], [0, 0], [1, 1]])  # 4 at-risk gains, 2 at-risk losses
    x1 = np.array([[1, 0], [0, 0], [1, 0]])  # 1 gain, 1 loss
    gain_rate, loss_rate = transition_rates(transitions(build_rca(x0), build_rca(x1)))
    assert gain_rate == 0.25
    assert loss_rate == 0.5


def test_transition_rate_of_one_at_boundary():
    x0 = np.array([[0, 1], [1, 1]])
    x1 = np.ones((2, 2), dtype=int)
    gain_rate, _ = transition_rates(transitions(build_rca(x0), build_rca(x1)))
    assert gain_rate == 1.0


def test_empty_at_risk_set_is_degenerate():
    x = np.ones((2, 2), dtype=int)
    t = transitions(build_rca(x), build_rca(x))
    with pytest.raises(DegenerateInputError):
        transition_rates(t)


def test_average_gain_probability_example():
    # 41 gains among 1069 at-risk cells, the documented per-country average
    x0 = np.zeros((1069, 2), dtype=int)
    x0[:, 1] = 1
    x1 = x0.copy()
    x1[:41, 0] = 1
    t = transitions(build_rca(x0), build_rca(x1))
    stats = per_country_transition_stats(t, build_rca(x0))
    p = stats.loc[stats["country"] == "C00", "p_gain"].item()
    assert p == pytest.approx(41 / 1069)
    assert round(p, 3) == 0.038


def test_per_country_stats_match_brute_force(rng):
    x0 = random_binary(rng, 8, 5)
    x1 = random_binary(rng, 8, 5)
    rca0 = build_rca(x0)
    t = transitions(rca0, build_rca(x1))
    stats = per_country_transition_stats(t, rca0).set_index("country")
    for j, country in enumerate(rca0.countries):
        gains = sum(1 for i in range(8) if x0[i, j] == 0 and x1[i, j] == 1)
        at_risk = sum(1 for i in range(8) if x0[i, j] == 0)
        row = stats.loc[country]
        assert row["n_gains"] == gains and row["n_at_risk_gain"] == at_risk
        if at_risk:
            assert row["p_gain"] == pytest.approx(gains / at_risk)
        assert row["diversity"] == x0[:, j].sum()


def test_country_without_at_risk_losses_gets_missing_probability():
    x0 = np.array([[0, 1], [0, 1]])  # country C00 holds nothing at t0
    t = transitions(build_rca(x0), build_rca(x0))
    stats = per_country_transition_stats(t, build_rca(x0)).set_index("country")
    assert np.isnan(stats.loc["C00", "p_loss"])
    assert stats.loc["C00", "n_at_risk_loss"] == 0


def make_gap_fixture():
    """Three at-risk products with base ubiquities 10, 20, 5 for country 0."""
    m, n = 3, 21
    x0 = np.zeros((m, n), dtype=int)
    x0[0, 1:11] = 1   # ubiquity 10
    x0[1, 1:21] = 1   # ubiquity 20
    x0[2, 1:6] = 1    # ubiquity 5
    x1 = x0.copy()
    x1[0, 0] = 1
    x1[1, 0] = 1      # gains in products 0 and 1; product 2 not realized
    return build_rca(x0), build_rca(x1)


def test_ubiquity_gap_hand_example():
    r0, r1 = make_gap_fixture()
    gaps = ubiquity_gap(transitions(r0, r1), r0).set_index("country")
    assert gaps.loc["C00", "gain_ubiquity_gap"] == pytest.approx(15.0 - 5.0)


def test_ubiquity_gap_missing_when_all_realized():
    r0, r1 = make_gap_fixture()
    t = transitions(r0, r1)
    t.gains[:, 0] = t.at_risk_gain[:, 0]  # every at-risk cell realized
    gaps = ubiquity_gap(t, r0).set_index("country")
    assert np.isnan(gaps.loc["C00", "gain_ubiquity_gap"])


def test_ubiquity_gap_matches_brute_force(rng):
    x0 = random_binary(rng, 9, 6)
    x1 = random_binary(rng, 9, 6)
    rca0 = build_rca(x0)
    t = transitions(rca0, build_rca(x1))
    gaps = ubiquity_gap(t, rca0).set_index("country")
    s = rca0.ubiquity
    for j, country in enumerate(rca0.countries):
        realized = [s[i] for i in range(9) if x0[i, j] == 0 and x1[i, j] == 1]
        missed = [s[i] for i in range(9) if x0[i, j] == 0 and x1[i, j] == 0]
        expected = (
            np.mean(realized) - np.mean(missed)
            if realized and missed
            else np.nan
        )
        got = gaps.loc[country, "gain_ubiquity_gap"]
        assert got == pytest.approx(expected, nan_ok=True)


def test_complexity_summary_means_and_missing_side():
    x0 = np.array([[0, 1], [0, 1], [1, 1]])
    x1 = np.array([[1, 1], [1, 1], [1, 1]])
    rca0 = build_rca(x0)
    t = transitions(rca0, build_rca(x1))
    pci = np.array([1.0, 3.0, -0.5])
    eci = np.array([0.25, -0.25])
    table = transition_complexity_summary(t, pci, eci, rca0).set_index("country")
    assert table.loc["C00", "mean_pci_gained"] == pytest.approx(2.0)
    assert np.isnan(table.loc["C00", "mean_pci_lost"])  # no losses
    assert table.loc["C00", "eci"] == 0.25


def test_complexity_summary_validates_lengths():
    x = np.array([[1, 0], [0, 1]])
    t = transitions(build_rca(x), build_rca(x))
    with pytest.raises(InputError):
        transition_complexity_summary(t, np.zeros(3), np.zeros(2), build_rca(x))
    with pytest.raises(InputError):
        transition_complexity_summary(t, np.zeros(2), np.zeros(5), build_rca(x))
