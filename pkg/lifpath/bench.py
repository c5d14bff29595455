# Copyright (C) 2026, Hadron Industries, Inc.
# Lifpath is free software; you can redistribute it and/or modify
# it under the terms of the GNU Lesser General Public License version 3
# as published by the Free Software Foundation. It is distributed
# WITHOUT ANY WARRANTY; without even the implied warranty of
# MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE. See the file
# LICENSE for details.

'''
Runtime scaling of :func:`~lifpath.infer.infer_all` with the number of neurons and the number of spikes.

Recordings are uncoupled perfect integrators, whose intervals are inverse Gaussian; sizes are timed in order until the time budget is spent.
'''

from __future__ import annotations
import dataclasses
import logging
import typing
from timeit import default_timer as timer

import numpy as np
import scipy.stats

from .core import InvalidParams, ModelParams, Recording
from .infer import InferenceOptions, infer_all

__all__ = []

logger = logging.getLogger('lifpath.bench')


def synthetic_uncoupled(neurons, spikes, params: ModelParams, seed=0) -> Recording:
    '''
    A recording of *neurons* independent perfect integrators with about *spikes* spikes in total.

    Intervals are drawn from the first passage distribution of drifting Brownian motion, an inverse Gaussian with mean ``C V_th / I`` and shape ``(C V_th / sigma)**2``; without noise the trains are regular.
    '''
    if neurons < 1 or spikes < neurons:
        raise InvalidParams('need at least one spike per neuron', field='spikes')
    rng = np.random.default_rng(seed)
    per_neuron = int(spikes) // neurons
    charge = params.capacitance * params.threshold
    trains = []
    for i in range(neurons):
        current = params.currents[i % params.neuron_count]
        if not current > 0:
            raise InvalidParams('synthetic trains need positive currents', field='currents')
        mean = charge / current
        if params.noise_std > 0:
            intervals = rng.wald(mean, (charge / params.noise_std) ** 2, per_neuron)
        else:
            intervals = np.full(per_neuron, mean)
        trains.append(np.cumsum(intervals))
    duration = float(max(t[-1] for t in trains))
    return Recording(neurons, duration, tuple(trains))


__all__ += ['synthetic_uncoupled']


@dataclasses.dataclass(frozen=True)
class BenchRow:

    sweep: str
    neurons: int
    spikes: int
    #: wall seconds; NaN when skipped
    seconds: float
    skipped: bool = False


@dataclasses.dataclass(frozen=True)
class BenchReport:

    rows: typing.Tuple[BenchRow, ...]
    #: fitted exponent of the wall time in the number of neurons
    neuron_exponent: float
    spike_exponent: float
    #: some sizes were skipped because the time budget ran out
    partial: bool


__all__ += ['BenchRow', 'BenchReport']


def _exponent(rows, size):
    done = [r for r in rows if not r.skipped and r.seconds > 0]
    if len({size(r) for r in done}) < 2:
        return np.nan
    fit = scipy.stats.linregress(np.log([size(r) for r in done]), np.log([r.seconds for r in done]))
    return float(fit.slope)


def run_bench(neurons=(20, 40, 80), spikes=(1e4, 1e5, 1e6), *, params: ModelParams = None,
              options: InferenceOptions = None, seed=0, time_budget=600.0) -> BenchReport:
    '''
    Time inference over the sizes in *neurons* at the smallest spike count, then over *spikes* at the smallest neuron count.

    A size that would start after *time_budget* seconds is recorded as skipped and the report marked partial.

    :param params: model scalars and the current driving every synthetic neuron; by default ``C = V_th = I = 1`` with noise ratio 0.1.
    '''
    if params is None:
        params = ModelParams(capacitance=1.0, conductance=0.0, threshold=1.0, noise_std=0.1,
                             currents=np.ones(1), couplings=np.zeros((1, 1)))
    if options is None:
        options = InferenceOptions()
    neurons = sorted(int(n) for n in neurons)
    spikes = sorted(int(s) for s in spikes)
    sizes = [('neurons', n, spikes[0]) for n in neurons]
    sizes += [('spikes', neurons[0], s) for s in spikes]
    start = timer()
    rows = []
    for sweep, n, s in sizes:
        if timer() - start > time_budget:
            logger.warning('time budget of %gs spent; skipping N=%d S=%d', time_budget, n, s)
            rows.append(BenchRow(sweep, n, s, np.nan, skipped=True))
            continue
        rec = synthetic_uncoupled(n, s, params, seed=seed)
        model = params.replace(currents=np.zeros(n), couplings=np.zeros((n, n)))
        began = timer()
        infer_all(rec, model, options)
        seconds = timer() - began
        logger.info('N=%d S=%d: %.3fs', n, rec.spike_count, seconds)
        rows.append(BenchRow(sweep, n, rec.spike_count, seconds))
    by_neurons = [r for r in rows if r.sweep == 'neurons']
    by_spikes = [r for r in rows if r.sweep == 'spikes']
    return BenchReport(
        rows=tuple(rows),
        neuron_exponent=_exponent(by_neurons, lambda r: r.neurons),
        spike_exponent=_exponent(by_spikes, lambda r: r.spikes),
        partial=any(r.skipped for r in rows))


__all__ += ['run_bench']
