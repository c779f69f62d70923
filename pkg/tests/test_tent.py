"""Lap counting, separated sets and the two entropy estimators."""

import math
from bisect import bisect_left

import numpy as np
import pytest

from psvfkit.errors import DomainError
from psvfkit.tent import (
    MAX_LAP_DEPTH,
    MAX_SEP_DEPTH,
    entropy_lap,
    entropy_separated,
    lap_count,
    lap_structure,
    orbit,
    separated_set_size,
    tent_eval,
    tent_itinerary,
)

# lap counts of the slope 1.2 tent map for n = 10..22
LAPS_12 = [166, 226, 300, 396, 514, 662, 840, 1064, 1334, 1666, 2060,
           2548, 3130]


def test_frozen_lap_counts():
    assert [lap_count(1.2, n) for n in range(10, 23)] == LAPS_12
    assert lap_count(1.5, 10) == 216
    assert lap_count(1.9, 8) == 230


@pytest.mark.parametrize("n", [1, 5, 12, 22])
def test_full_tent_doubles(n):
    assert lap_count(2.0, n) == 2 ** n


def test_lap_counts_are_submultiplicative():
    for alpha in (1.3, 1.7):
        for m, n in [(3, 4), (5, 6), (2, 9)]:
            assert lap_count(alpha, m + n) \
                <= lap_count(alpha, m) * lap_count(alpha, n)


def test_lap_counts_nondecreasing():
    counts = [lap_count(1.6, n) for n in range(1, 15)]
    assert all(a <= b for a, b in zip(counts, counts[1:]))


def test_lap_structure_of_full_tent():
    ls = lap_structure(2.0, 3)
    assert ls.count == 8
    np.testing.assert_allclose(ls.breakpoints, np.arange(1, 8) / 8.0,
                               atol=1e-12)


@pytest.mark.parametrize("alpha, n", [(1.5, 8), (1.9, 7), (1.2, 12)])
def test_iterate_is_monotone_between_breakpoints(alpha, n):
    ls = lap_structure(alpha, n)
    edges = np.concatenate([[0.0], ls.breakpoints, [1.0]])
    assert ls.count == len(edges) - 1
    for a, b in zip(edges[:-1], edges[1:]):
        xs = np.linspace(a + 1e-12, b - 1e-12, 9)
        ys = xs.copy()
        for _ in range(n):
            ys = alpha * np.minimum(ys, 1.0 - ys)
        d = np.diff(ys)
        assert np.all(d >= -1e-9) or np.all(d <= 1e-9)


def naive_greedy(alpha, n, eps, grid):
    """Quadratic reference: same scan order, no pruning tricks."""
    xs = np.linspace(0.0, 1.0, grid)
    orb = np.empty((n, grid))
    orb[0] = xs
    for i in range(1, n):
        orb[i] = alpha * np.minimum(orb[i - 1], 1.0 - orb[i - 1])
    kept = []
    for i in range(grid):
        x = orb[:, i]
        if all(np.max(np.abs(orb[:, j] - x)) >= eps for j in kept):
            kept.append(i)
    return len(kept)


@pytest.mark.parametrize("alpha, n, eps, grid", [
    (1.7, 6, 0.15, 1500),
    (1.3, 5, 0.1, 1200),
    (2.0, 7, 0.2, 1000),
    (1.9, 8, 0.05, 800),
])
def test_separated_count_equals_naive_greedy(alpha, n, eps, grid):
    assert separated_set_size(alpha, n, eps, grid) \
        == naive_greedy(alpha, n, eps, grid)


def test_frozen_separated_count():
    assert separated_set_size(1.2, 18, 0.1) == 43


def test_separated_members_really_separate():
    alpha, n, eps, grid = 1.8, 6, 0.2, 2000
    xs = np.linspace(0.0, 1.0, grid)
    orb = np.empty((n, grid))
    orb[0] = xs
    for i in range(1, n):
        orb[i] = alpha * np.minimum(orb[i - 1], 1.0 - orb[i - 1])
    kept = []
    for i in range(grid):
        if all(np.max(np.abs(orb[:, j] - orb[:, i])) >= eps for j in kept):
            kept.append(i)
    assert len(kept) == separated_set_size(alpha, n, eps, grid)
    for a_i, i in enumerate(kept):
        for j in kept[a_i + 1:]:
            assert np.max(np.abs(orb[:, i] - orb[:, j])) >= eps


def test_entropy_separated_is_log_count_over_n():
    alpha, n, eps, grid = 1.6, 8, 0.1, 5000
    size = separated_set_size(alpha, n, eps, grid)
    assert entropy_separated(alpha, n, eps, grid) \
        == pytest.approx(math.log(size) / n)


class TestEntropySlope:
    def test_accurate_for_steep_slopes(self):
        assert entropy_lap(2.0) == pytest.approx(math.log(2.0), abs=1e-9)
        assert entropy_lap(1.9) == pytest.approx(math.log(1.9), abs=1e-3)
        assert entropy_lap(1.5) == pytest.approx(math.log(1.5), abs=4e-3)

    def test_shallow_slope_bias_is_stable(self):
        # at slope 1.2 the fit over depths 10..22 sits well above log 1.2;
        # freeze the size of that gap so regressions are visible
        err = entropy_lap(1.2) - math.log(1.2)
        assert 0.05 < err < 0.07

    def test_fit_range_validation(self):
        with pytest.raises(DomainError):
            entropy_lap(1.5, n_lo=5, n_hi=5)
        with pytest.raises(DomainError):
            entropy_lap(1.5, n_lo=10, n_hi=MAX_LAP_DEPTH + 1)


class TestValidation:
    def test_alpha_range(self):
        for bad in (0.5, 1.0, 2.1):
            with pytest.raises(DomainError):
                lap_count(bad, 5)
            with pytest.raises(DomainError):
                separated_set_size(bad, 5, 0.1)

    def test_depth_caps(self):
        with pytest.raises(DomainError):
            lap_count(1.5, MAX_LAP_DEPTH + 1)
        with pytest.raises(DomainError):
            separated_set_size(1.5, MAX_SEP_DEPTH + 1, 0.1)

    def test_epsilon_and_grid(self):
        with pytest.raises(DomainError):
            separated_set_size(1.5, 5, 1e-6)
        with pytest.raises(DomainError):
            separated_set_size(1.5, 5, 0.1, grid=50)
        with pytest.raises(DomainError):
            separated_set_size(1.5, 5, 0.0005, grid=1000)

    def test_eval_domain(self):
        with pytest.raises(DomainError):
            tent_eval(1.5, 1.2)
        with pytest.raises(DomainError):
            tent_itinerary(1.5, -0.1, 4)
        with pytest.raises(DomainError):
            tent_itinerary(1.5, 0.3, 0)


def test_tent_eval():
    assert tent_eval(2.0, 0.5) == 1.0
    assert tent_eval(2.0, 0.75) == pytest.approx(0.5)
    np.testing.assert_allclose(tent_eval(1.5, np.array([0.0, 0.5, 1.0])),
                               [0.0, 0.75, 0.0], atol=1e-15)


def test_itinerary_strings():
    # 1/3 maps to 2/3 and stays there: one low symbol then highs
    assert tent_itinerary(2.0, 1.0 / 3.0, 8) == "01111111"
    assert tent_itinerary(2.0, 0.0, 5) == "00000"
    assert tent_itinerary(1.5, 0.5, 4) == "0101"


def test_orbit_values():
    out = orbit(2.0, 1.0 / 3.0, 4)
    np.testing.assert_allclose(out, [1/3, 2/3, 2/3, 2/3, 2/3], atol=1e-12)
    assert len(orbit(1.5, 0.2, 7)) == 8
