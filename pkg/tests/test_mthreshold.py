# Copyright (C) 2026, Hadron Industries, Inc.
# Lifpath is free software; you can redistribute it and/or modify
# it under the terms of the GNU Lesser General Public License version 3
# as published by the Free Software Foundation. It is distributed
# WITHOUT ANY WARRANTY; without even the implied warranty of
# MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE. See the file
# LICENSE for details.

import numpy as np
import pytest

from lifpath.core import InvalidParams, ModelParams
from lifpath.mthreshold import *
from lifpath.specfun import OuSpec


def leaky_params(noise_std=0.3, conductance=1.0):
    return ModelParams(capacitance=1.0, conductance=conductance, threshold=1.0, noise_std=noise_std,
                       currents=np.array([0.8, 0.9]), couplings=np.zeros((2, 2)))


def test_effective_current():
    couplings = np.array([[5.0, 0.5], [0.1, 0.0]])
    assert effective_current(0, [1.0, 2.0], couplings, [3.0, 4.0]) == pytest.approx(3.0)
    assert effective_current(1, [1.0, 2.0], couplings, [3.0, 4.0]) == pytest.approx(2.3)


def test_moving_threshold_below_threshold():
    params = leaky_params()
    for dt in (0.1, 0.5, 2.0):
        value = moving_threshold(dt, 0.8, params)
        assert 0.0 <= value < params.threshold


def test_moving_threshold_full_survival_level():
    assert moving_threshold(0.5, 0.8, leaky_params(), survival_level=1.0) == pytest.approx(1.0)


def test_moving_threshold_approaches_threshold_with_less_noise():
    gaps = [1.0 - moving_threshold(1.0, 0.8, leaky_params(noise_std=s)) for s in (0.3, 0.1, 0.05)]
    assert gaps[0] > gaps[1] > gaps[2] > 0


def test_moving_threshold_rejects():
    with pytest.raises(ValueError):
        moving_threshold(0.5, 0.8, leaky_params(), survival_level=0.2)
    with pytest.raises(InvalidParams):
        moving_threshold(0.5, 0.8, leaky_params(conductance=0.0))


def test_moving_threshold_floor(caplog):
    # a tiny noise makes the slope at threshold huge, so the cut lies just below threshold
    near = moving_threshold(1.0, 0.8, leaky_params(noise_std=0.05))
    assert near == pytest.approx(1.0, abs=0.05)
    clamped = moving_threshold(1.0, 0.8, leaky_params(), floor=0.99)
    assert clamped == 0.99
    assert 'clamped' in caplog.text


def table():
    spec = OuSpec(1.0, 1.0, 0.5, 0.5, 1.0)
    return ThresholdTable(np.array([0.1, 1.0, 10.0]), np.array([0.9, 0.8]), 1.0, spec)


def test_table_level():
    levels = table().level(np.array([0.05, 0.1, 0.5, 1.0, 20.0]))
    np.testing.assert_allclose(levels, [1.0, 0.9, 0.9, 0.8, 0.8])


def test_table_for_interval():
    threshold = table().for_interval(0.0, 5.0)
    np.testing.assert_allclose(threshold.boundaries, [4.0, 4.9])
    np.testing.assert_allclose(threshold.levels, [0.8, 0.9, 1.0])
    assert threshold(4.95) == 1.0


def test_table_short_interval():
    threshold = table().for_interval(2.0, 2.05)
    assert threshold.boundaries.size == 0
    np.testing.assert_allclose(threshold.levels, [1.0])


def test_table_time_average():
    assert table().time_average == pytest.approx((0.9 * 0.9 + 0.8 * 9.0) / 9.9)


def test_default_bin_edges():
    edges = default_bin_edges(leaky_params(), 2.0, bins=16)
    assert edges.size == 17
    assert edges[0] == pytest.approx(0.01)
    assert edges[-1] == pytest.approx(20.0)
    np.testing.assert_allclose(np.diff(np.log(edges)), np.log(2000.0) / 16)


def test_build_threshold_table():
    params = leaky_params()
    edges = default_bin_edges(params, 3.0, bins=6)
    built = build_threshold_table(params, 0.8, edges)
    assert built.values.shape == (6,)
    assert np.all(built.values < 1.0)
    assert np.all(built.values >= 0.0)
    for k in built.clamped:
        assert built.values[k] == 0.0
    assert built.level(edges[2] * 1.01) == built.values[2]


def test_build_threshold_table_rejects_edges():
    with pytest.raises(ValueError):
        build_threshold_table(leaky_params(), 0.8, [1.0, 0.5])
    with pytest.raises(ValueError):
        build_threshold_table(leaky_params(), 0.8, [1.0])


def test_cost_energy_is_bounded():
    value = cost_energy(0.8, 2.0, leaky_params())
    assert np.isfinite(value)
    assert abs(value) < PENALTY_CAP


def test_cost_energy_penalizes_underflow():
    assert cost_energy(0.8, 1e-6, leaky_params(noise_std=0.5)) == PENALTY_CAP
