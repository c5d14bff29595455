# Copyright (C) 2026, Hadron Industries, Inc.
# Lifpath is free software; you can redistribute it and/or modify
# it under the terms of the GNU Lesser General Public License version 3
# as published by the Free Software Foundation. It is distributed
# WITHOUT ANY WARRANTY; without even the implied warranty of
# MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE. See the file
# LICENSE for details.

'''
Moving threshold: a lowered, delay dependent threshold that corrects the optimal path for moderate noise.

For a delay ``dt`` to the next spike the threshold is where the tangent of the survival probability at the true threshold crosses the survival level (one half by default)::

    V_th^M(dt) = V_th - (1 - level) / |dp_s/dV(dt | V_th)|

Values are tabulated on logarithmic delay bins; delays shorter than the first edge use the true threshold, so the final firing condition is unchanged.
'''

from __future__ import annotations
import dataclasses
import logging
import typing

import numpy as np

from .core import InvalidParams, ModelParams
from .optpath import PiecewiseThreshold
from .specfun import OuSpec, first_passage_density, survival_slope_at_threshold

__all__ = []

logger = logging.getLogger('lifpath.mthreshold')

#: magnitude of the cost energy returned when a density underflows
PENALTY_CAP = 50.0

__all__ += ['PENALTY_CAP']


def effective_current(i, currents, couplings, rates):
    '''
    ``I_i + sum_{j != i} J_ij f_j``.
    '''
    row = np.array(couplings[i], dtype=float)
    row[i] = 0.0
    return float(currents[i] + row @ np.asarray(rates, dtype=float))


__all__ += ['effective_current']


def _spec(params: ModelParams, current_e, sigma):
    if not params.conductance > 0:
        raise InvalidParams('the moving threshold needs a leaky neuron', field='conductance')
    sigma = params.noise_std if sigma is None else sigma
    return OuSpec(params.conductance, params.capacitance, sigma, float(current_e), params.threshold)


def _moving_threshold(dt, spec: OuSpec, survival_level, slope_floor, floor, series):
    slope = survival_slope_at_threshold(dt, spec, **series)
    if not abs(slope) >= slope_floor:
        return floor, True
    value = spec.threshold - (1 - survival_level) / abs(slope)
    if value < floor:
        return floor, True
    return value, False


def moving_threshold(dt, current_e, params: ModelParams, sigma=None, *,
                     survival_level=0.5, slope_floor=1e-300, floor=0.0, **series):
    '''
    The moving threshold for a delay *dt* before the next spike.

    :param current_e: effective current of the neuron.
    :param sigma: noise strength; defaults to ``params.noise_std``.
    :param survival_level: survival probability at which the tangent is cut, in ``[1/4, 1]``.
    '''
    if not 0.25 <= survival_level <= 1:
        raise ValueError('survival_level must lie in [1/4, 1]')
    value, clamped = _moving_threshold(dt, _spec(params, current_e, sigma),
                                       survival_level, slope_floor, floor, series)
    if clamped:
        logger.warning('moving threshold at dt=%g clamped to %g', dt, floor)
    return value


__all__ += ['moving_threshold']


@dataclasses.dataclass(frozen=True, eq=False)
class ThresholdTable:

    '''
    Moving threshold values on delay bins ``[edges[k], edges[k+1])``.
    '''

    edges: np.ndarray
    values: np.ndarray
    threshold: float
    spec: OuSpec
    #: bins whose value was clamped to the floor
    clamped: typing.Tuple[int, ...] = ()

    def level(self, dt):
        "Threshold in force a delay *dt* before the spike"
        dt = np.asarray(dt, dtype=float)
        index = np.searchsorted(self.edges, dt, side='right') - 1
        values = np.concatenate([[self.threshold], self.values, [self.values[-1]]])
        return values[np.clip(index + 1, 0, values.size - 1)]

    def for_interval(self, t_start, t_end):
        "The table as a :class:`~lifpath.optpath.PiecewiseThreshold` over one interval"
        duration = t_end - t_start
        inside = self.edges[(self.edges > 0) & (self.edges < duration)]
        boundaries = t_end - inside[::-1]
        knots = np.concatenate([[t_start], boundaries, [t_end]])
        midpoints = 0.5 * (knots[:-1] + knots[1:])
        return PiecewiseThreshold(boundaries, self.level(t_end - midpoints))

    @property
    def time_average(self):
        "Mean over the finite bins weighted by bin width"
        finite = np.isfinite(self.edges[1:])
        widths = np.diff(self.edges)[finite]
        return float(np.sum(self.values[finite] * widths) / np.sum(widths))


__all__ += ['ThresholdTable']


def default_bin_edges(params: ModelParams, max_isi, bins=16, min_fraction=0.01, max_factor=10.0):
    '''
    ``bins + 1`` logarithmic edges from ``min_fraction * tau`` to ``max_factor * max_isi``.
    '''
    low = min_fraction * params.tau
    high = max(max_factor * max_isi, 2 * low)
    return np.logspace(np.log10(low), np.log10(high), bins + 1)


def _representative(low, high):
    if low <= 0:
        return high / 2
    if not np.isfinite(high):
        return 2 * low
    return np.sqrt(low * high)


def build_threshold_table(params: ModelParams, current_e, edges, *, sigma=None,
                          survival_level=0.5, slope_floor=1e-300, floor=0.0, **series):
    '''
    Tabulate the moving threshold at the geometric midpoint of each bin.
    '''
    edges = np.asarray(edges, dtype=float)
    if edges.size < 2 or np.any(np.diff(edges) <= 0) or edges[0] < 0:
        raise ValueError('bin edges must be ascending and non-negative')
    if not 0.25 <= survival_level <= 1:
        raise ValueError('survival_level must lie in [1/4, 1]')
    spec = _spec(params, current_e, sigma)
    values = np.empty(edges.size - 1)
    clamped = []
    for k, (low, high) in enumerate(zip(edges[:-1], edges[1:])):
        dt = _representative(low, high)
        values[k], hit = _moving_threshold(dt, spec, survival_level, slope_floor, floor, series)
        if hit:
            clamped.append(k)
    if clamped:
        logger.warning('moving threshold clamped to %g in %d bins (I_e=%g)', floor, len(clamped), current_e)
    return ThresholdTable(edges, values, params.threshold, spec, tuple(clamped))


__all__ += ['default_bin_edges', 'build_threshold_table']


def cost_energy(current_e, dt, params: ModelParams, sigma=None, **series):
    '''
    ``U = log(p_FPT(dt) / p_cl(dt))`` comparing the first passage density from the reset with its optimal-path estimate, the arrival velocity of the optimal path times the free transition density at threshold.

    An underflowing density, or an optimal path arriving without velocity, is penalized with ``PENALTY_CAP``.
    '''
    spec = _spec(params, current_e, sigma)
    g, C, v_th = params.conductance, params.capacitance, params.threshold
    s = dt / spec.tau
    mean = current_e / g * -np.expm1(-s)
    variance = spec.noise_std ** 2 * -np.expm1(-2 * s) / (2 * g * C)
    end_noise = 2 * g * (v_th - mean) / -np.expm1(-2 * s)
    velocity = (current_e - g * v_th + end_noise) / C
    density = first_passage_density(dt, spec, 0.0, **series)
    if not velocity > 0:
        logger.warning('cost energy at I_e=%g, dt=%g: optimal path arrives without velocity', current_e, dt)
        return PENALTY_CAP
    if not density > 0:
        logger.warning('cost energy at I_e=%g, dt=%g: first passage density underflows', current_e, dt)
        return PENALTY_CAP
    log_classical = (np.log(velocity) - (v_th - mean) ** 2 / (2 * variance)
                     - 0.5 * np.log(2 * np.pi * variance))
    return float(np.clip(np.log(density) - log_classical, -PENALTY_CAP, PENALTY_CAP))


__all__ += ['cost_energy']
