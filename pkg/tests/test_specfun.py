# Copyright (C) 2026, Hadron Industries, Inc.
# Lifpath is free software; you can redistribute it and/or modify
# it under the terms of the GNU Lesser General Public License version 3
# as published by the Free Software Foundation. It is distributed
# WITHOUT ANY WARRANTY; without even the implied warranty of
# MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE. See the file
# LICENSE for details.

import numpy as np
import pytest
import scipy.integrate

from lifpath.core import InvalidParams
from lifpath.specfun import *


@pytest.fixture()
def ou():
    return OuSpec(conductance=1.0, capacitance=1.0, noise_std=0.4, current=0.8, threshold=1.0)


def test_weber_at_origin():
    value, derivative = weber_D(0, 0)
    assert value == pytest.approx(1.0)
    assert derivative == pytest.approx(0.0, abs=1e-14)


@pytest.mark.parametrize('z', [-2.0, -0.3, 0.0, 1.1, 4.0])
def test_weber_integer_orders(z):
    assert weber_D(1, z)[0] == pytest.approx(z * np.exp(-z * z / 4), abs=1e-12)
    assert weber_D(2, z)[0] == pytest.approx((z * z - 1) * np.exp(-z * z / 4), abs=1e-12)


@pytest.mark.parametrize('n, z', [(0.5, 1.3), (2.7, -0.8), (1.25, 0.4)])
def test_weber_representations_agree(n, z):
    value, _ = weber_D(n, z)
    assert weber_D_hypergeometric(n, z) == pytest.approx(value, rel=1e-8)
    assert weber_D_integral(n, z) == pytest.approx(value, rel=1e-7)


def test_weber_range():
    with pytest.raises(SeriesRangeError) as excinfo:
        weber_D(200.0, 1.0)
    assert excinfo.value.order == 200.0
    with pytest.raises(SeriesRangeError):
        weber_D(1.0, 60.0)
    with pytest.raises(SeriesRangeError):
        spectrum(60.0)
    with pytest.raises(ValueError):
        weber_D_integral(-1.5, 0.0)


def test_eigenvalues_at_zero():
    # D_n(0) vanishes exactly at the odd integers
    np.testing.assert_allclose(threshold_eigenvalues(0.0, 3, n_max=10), [1.0, 3.0, 5.0], atol=1e-10)


def test_eigenvalue_bracket_error():
    with pytest.raises(EigenvalueBracketError) as excinfo:
        threshold_eigenvalues(0.0, 10, n_max=10)
    assert excinfo.value.found == 5


def test_eigenvalues_are_roots(ou):
    orders = threshold_eigenvalues(ou, 4)
    assert np.all(np.diff(orders) > 0)
    assert orders[0] > 0
    values, _ = weber_D(orders, ou.alpha)
    np.testing.assert_allclose(values / spectrum(ou.alpha).scales[:4], 0.0, atol=1e-9)


def test_ou_spec(ou):
    assert ou.tau == 1.0
    assert ou.scale == pytest.approx(np.sqrt(2) / 0.4)
    assert ou.alpha == pytest.approx(np.sqrt(2) / 0.4 * -0.2)
    with pytest.raises(InvalidParams):
        OuSpec(0.0, 1.0, 0.4, 0.8, 1.0)
    with pytest.raises(InvalidParams):
        OuSpec(1.0, 1.0, 0.0, 0.8, 1.0)


def test_survival_edges(ou):
    assert survival_probability(0.0, 0.2, ou) == 1.0
    assert survival_probability(1.0, 1.0, ou) == 0.0
    assert survival_probability(1.0, 1.3, ou) == 0.0
    values = survival_probability(0.0, np.array([0.0, 1.0]), ou)
    np.testing.assert_array_equal(values, [1.0, 0.0])


def test_survival_decreases(ou):
    values = [survival_probability(dt, 0.0, ou) for dt in (0.3, 1.0, 2.0, 4.0, 8.0)]
    assert all(0 <= v <= 1 for v in values)
    assert all(later < earlier for earlier, later in zip(values, values[1:]))


def test_survival_integrates_to_mean_passage_time(ou):
    integral, _ = scipy.integrate.quad(lambda dt: survival_probability(dt, 0.0, ou),
                                       0, 80, limit=400, points=[0.1, 0.5, 2.0])
    assert integral == pytest.approx(mean_first_passage_time(0.0, ou), rel=1e-4)


def test_density_is_survival_slope(ou):
    step = 1e-4
    slope = (survival_probability(1.5 - step, 0.0, ou) - survival_probability(1.5 + step, 0.0, ou)) / (2 * step)
    assert first_passage_density(1.5, ou) == pytest.approx(slope, rel=1e-4)
    assert first_passage_density(0.0, ou) == 0.0
    assert first_passage_density(1.0, ou, v=1.0) == 0.0


def test_slope_at_threshold(ou):
    slope = survival_slope_at_threshold(1.0, ou)
    assert slope < 0
    step = 1e-3
    near = survival_probability(1.0, 1.0 - step, ou)
    far = survival_probability(1.0, 1.0 - 2 * step, ou)
    difference = -(4 * near - far) / (2 * step)
    assert slope == pytest.approx(difference, rel=1e-3)
    with pytest.raises(ValueError):
        survival_slope_at_threshold(0.0, ou)


def test_mean_first_passage_time(ou):
    base = mean_first_passage_time(0.0, ou)
    assert base > 0
    assert mean_first_passage_time(0.3, ou) < base
    assert mean_first_passage_time(1.0, ou) == 0.0
    assert mean_first_passage_time(0.3, ou) == pytest.approx(mean_first_passage_time(0.0, ou, v_initial=0.3))


def test_mean_passage_time_deterministic_limit():
    # weak noise approaches tau log(I / (I - g V_th))
    spec = OuSpec(conductance=1.0, capacitance=1.0, noise_std=0.01, current=2.0, threshold=1.0)
    assert mean_first_passage_time(0.0, spec) == pytest.approx(np.log(2.0), rel=1e-3)


@pytest.mark.slow
def test_survival_against_monte_carlo(ou, rng):
    dt, horizon, paths = 1e-4, 1.5, 20000
    steps = int(round(horizon / dt))
    v = np.zeros(paths)
    alive = np.ones(paths, dtype=bool)
    decay = np.exp(-dt)
    spread = ou.noise_std * np.sqrt(-np.expm1(-2 * dt) / 2)
    for _ in range(steps):
        v = v * decay + ou.current * -np.expm1(-dt) + spread * rng.standard_normal(paths)
        alive &= v < ou.threshold
    # discrete monitoring misses some crossings, so the estimate sits slightly high
    assert alive.mean() == pytest.approx(survival_probability(horizon, 0.0, ou), abs=0.015)
