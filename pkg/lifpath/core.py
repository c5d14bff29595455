# Copyright (C) 2026, Hadron Industries, Inc.
# Lifpath is free software; you can redistribute it and/or modify
# it under the terms of the GNU Lesser General Public License version 3
# as published by the Free Software Foundation. It is distributed
# WITHOUT ANY WARRANTY; without even the implied warranty of
# MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE. See the file
# LICENSE for details.

'''
Domain types shared by every other module: the observed :class:`Recording`, the model parameters, their dimensionless form, and the construction of per-ISI problems.

Times are seconds, potentials volts, currents amperes and couplings coulombs.
'''

from __future__ import annotations
import dataclasses
import logging
import typing

import numpy as np

from .utils import memoproperty

__all__ = []

logger = logging.getLogger('lifpath.core')


class InvalidRecording(ValueError):

    def __init__(self, message, neuron=None):
        self.neuron = neuron
        super().__init__(message)


class InvalidParams(ValueError):

    def __init__(self, message, field=None):
        self.field = field
        super().__init__(message)


__all__ += ['InvalidRecording', 'InvalidParams']


@dataclasses.dataclass(frozen=True, eq=False)
class Recording:

    '''
    Spike trains of *neuron_count* neurons observed over ``[0, duration]``.

    :param trains: one strictly increasing array of spike times per neuron.
    '''

    neuron_count: int
    duration: float
    trains: typing.Tuple[np.ndarray, ...]

    def __post_init__(self):
        trains = tuple(np.asarray(t, dtype=float).reshape(-1) for t in self.trains)
        object.__setattr__(self, 'trains', trains)
        if self.neuron_count <= 0:
            raise InvalidRecording('a recording needs at least one neuron')
        if len(trains) != self.neuron_count:
            raise InvalidRecording(f'{len(trains)} trains given for {self.neuron_count} neurons')
        if not (np.isfinite(self.duration) and self.duration > 0):
            raise InvalidRecording(f'duration must be positive, not {self.duration}')
        for i, train in enumerate(trains):
            if train.size == 0:
                continue
            if not np.all(np.isfinite(train)):
                raise InvalidRecording(f'neuron {i} has non-finite spike times', neuron=i)
            if train[0] < 0 or train[-1] > self.duration:
                raise InvalidRecording(f'neuron {i} spikes outside [0, {self.duration}]', neuron=i)
            if np.any(np.diff(train) <= 0):
                raise InvalidRecording(f'spike train of neuron {i} is not strictly increasing', neuron=i)

    @classmethod
    def from_events(cls, neurons, times, neuron_count=None, duration=None):
        '''
        Build a recording from parallel arrays of neuron indices and spike times in any order.
        '''
        neurons = np.asarray(neurons, dtype=int)
        times = np.asarray(times, dtype=float)
        if neuron_count is None:
            neuron_count = int(neurons.max()) + 1 if neurons.size else 1
        if duration is None:
            duration = float(times.max()) if times.size else 1.0
        if neurons.size and (neurons.min() < 0 or neurons.max() >= neuron_count):
            raise InvalidRecording('neuron index out of range')
        trains = tuple(np.sort(times[neurons == i]) for i in range(neuron_count))
        return cls(neuron_count, float(duration), trains)

    @memoproperty
    def counts(self):
        return np.array([t.size for t in self.trains], dtype=int)

    @memoproperty
    def spike_count(self):
        "S, the total number of spikes"
        return int(self.counts.sum())

    @memoproperty
    def rates(self):
        "f_j = count_j / T"
        return self.counts / self.duration

    @memoproperty
    def events(self):
        '''All spikes ordered by time as ``(times, neurons)``; ties are ordered by neuron index.'''
        if self.spike_count == 0:
            return np.zeros(0), np.zeros(0, dtype=int)
        times = np.concatenate(self.trains)
        neurons = np.concatenate([np.full(t.size, i) for i, t in enumerate(self.trains)])
        order = np.lexsort((neurons, times))
        return times[order], neurons[order]

    def isi_count(self):
        return int(np.maximum(self.counts - 1, 0).sum())

    def relabeled(self, permutation):
        "The recording with neuron ``permutation[k]`` renamed to ``k``"
        return Recording(self.neuron_count, self.duration,
                         tuple(self.trains[p] for p in permutation))


__all__ += ['Recording']


@dataclasses.dataclass(frozen=True, eq=False)
class ModelParams:

    '''
    Parameters of the leaky integrate-and-fire network ``C dV/dt = -g V + sum_j J_ij sum_k delta(t - t_jk) + I_i + eta_i``.

    *couplings* is indexed ``[postsynaptic, presynaptic]`` and has a zero diagonal.
    '''

    capacitance: float
    conductance: float
    threshold: float
    noise_std: float
    currents: np.ndarray
    couplings: np.ndarray
    tau_r: float = 0.0
    tau_d: float = 0.0

    def __post_init__(self):
        currents = np.array(self.currents, dtype=float).reshape(-1)
        couplings = np.array(self.couplings, dtype=float)
        n = currents.size
        if couplings.shape != (n, n):
            raise InvalidParams(f'couplings must be {n}x{n}, not {couplings.shape}', field='couplings')
        object.__setattr__(self, 'currents', currents)
        object.__setattr__(self, 'couplings', couplings)
        for name in ('capacitance', 'threshold'):
            value = getattr(self, name)
            if not (np.isfinite(value) and value > 0):
                raise InvalidParams(f'{name} must be positive and finite, not {value}', field=name)
        for name in ('conductance', 'noise_std', 'tau_r', 'tau_d'):
            value = getattr(self, name)
            if not (np.isfinite(value) and value >= 0):
                raise InvalidParams(f'{name} must be non-negative and finite, not {value}', field=name)
        if not np.all(np.isfinite(currents)):
            raise InvalidParams('currents must be finite', field='currents')
        if not np.all(np.isfinite(couplings)):
            raise InvalidParams('couplings must be finite', field='couplings')
        if np.any(np.diag(couplings) != 0):
            raise InvalidParams('self couplings J_ii must be zero', field='couplings')

    @classmethod
    def from_config(cls, layout, currents, couplings):
        "Scalar parameters from the ``model`` section of a :class:`~lifpath.config.ConfigLayout`"
        model = layout.model
        return cls(capacitance=model.capacitance, conductance=model.conductance,
                   threshold=model.threshold, noise_std=model.noise_std,
                   currents=currents, couplings=couplings,
                   tau_r=model.tau_r, tau_d=model.tau_d)

    @property
    def neuron_count(self):
        return self.currents.size

    @property
    def tau(self):
        "Membrane leak time C/g; infinite for the perfect integrator"
        if self.conductance == 0:
            return np.inf
        return self.capacitance / self.conductance

    def replace(self, **changes):
        return dataclasses.replace(self, **changes)

    def with_neuron(self, i, current, couplings_row):
        "Copy with the current and incoming couplings of neuron *i* replaced"
        currents = self.currents.copy()
        couplings = self.couplings.copy()
        currents[i] = current
        couplings[i] = couplings_row
        couplings[i, i] = 0.0
        return self.replace(currents=currents, couplings=couplings)


__all__ += ['ModelParams']


@dataclasses.dataclass(frozen=True)
class DimensionlessParams:

    '''
    Parameters in units of ``V_th`` (potential), ``C V_th`` (charge), ``g V_th`` (current) and ``C/g`` (time).

    Fields that do not exist for the perfect integrator are ``None``; *noise_available* says whether ``sigma_bar`` could be formed.
    '''

    sigma_bar: typing.Optional[float]
    currents: typing.Optional[np.ndarray]
    couplings: np.ndarray
    #: multiply a time in seconds by this to get t-bar; zero when g = 0
    time_factor: float
    tau_r: typing.Optional[float]
    tau_d: typing.Optional[float]
    capacitance: float
    conductance: float
    threshold: float

    @property
    def noise_available(self):
        return self.sigma_bar is not None


__all__ += ['DimensionlessParams']


def nondimensionalize(params: ModelParams) -> DimensionlessParams:
    C, g, v_th = params.capacitance, params.conductance, params.threshold
    couplings = params.couplings / (C * v_th)
    if g == 0:
        logger.debug('perfect integrator: sigma-bar and I-bar are undefined')
        return DimensionlessParams(
            sigma_bar=None, currents=None, couplings=couplings, time_factor=0.0,
            tau_r=None, tau_d=None,
            capacitance=C, conductance=g, threshold=v_th)
    return DimensionlessParams(
        sigma_bar=params.noise_std / (v_th * np.sqrt(g * C)),
        currents=params.currents / (g * v_th),
        couplings=couplings,
        time_factor=g / C,
        tau_r=params.tau_r * g / C,
        tau_d=params.tau_d * g / C,
        capacitance=C, conductance=g, threshold=v_th)


def redimensionalize(dimless: DimensionlessParams) -> ModelParams:
    "Inverse of :func:`nondimensionalize`; requires g > 0"
    if not dimless.noise_available:
        raise InvalidParams('cannot restore currents and noise of a perfect integrator', field='conductance')
    C, g, v_th = dimless.capacitance, dimless.conductance, dimless.threshold
    return ModelParams(
        capacitance=C, conductance=g, threshold=v_th,
        noise_std=dimless.sigma_bar * v_th * np.sqrt(g * C),
        currents=dimless.currents * g * v_th,
        couplings=dimless.couplings * C * v_th,
        tau_r=dimless.tau_r * C / g,
        tau_d=dimless.tau_d * C / g)


__all__ += ['nondimensionalize', 'redimensionalize']


def _group_starts(times, window):
    "Boolean mask marking the first element of each coincidence group"
    starts = np.ones(times.size, dtype=bool)
    if times.size > 1:
        starts[1:] = np.diff(times) > window
    return starts


def merge_simultaneous_inputs(times, amps, window=0.0):
    '''
    Merge inputs arriving at the same time into a single input carrying the summed amplitude.

    Consecutive inputs closer than *window* are chained into one group that keeps the time of its first member.

    :return: ``(times, amps)`` as arrays with strictly increasing times.
    '''
    times = np.asarray(times, dtype=float).reshape(-1)
    amps = np.asarray(amps, dtype=float).reshape(-1)
    if times.size != amps.size:
        raise ValueError('times and amplitudes differ in length')
    if times.size == 0:
        return np.zeros(0), np.zeros(0)
    if np.any(np.diff(times) < 0):
        raise ValueError('input times must be sorted')
    starts = _group_starts(times, window)
    groups = np.cumsum(starts) - 1
    merged = np.zeros(groups[-1] + 1)
    np.add.at(merged, groups, amps)
    return times[starts], merged


__all__ += ['merge_simultaneous_inputs']


@dataclasses.dataclass(frozen=True, eq=False)
class IsiProblem:

    '''
    One inter-spike interval ``[t_start, t_end]`` of neuron *neuron* with the synaptic inputs it receives.

    The merged inputs are *times* and *amplitudes*.  Each raw presynaptic spike is recorded in *sources* (presynaptic neuron) and *slots* (index of the merged input it contributes to), which lets :meth:`reweighted` recompute amplitudes for other couplings and lets derivatives be mapped back to per-neuron coordinates.
    '''

    neuron: int
    index: int
    t_start: float
    t_end: float
    times: np.ndarray
    amplitudes: np.ndarray
    v0: float = 0.0
    sources: np.ndarray = dataclasses.field(default_factory=lambda: np.zeros(0, dtype=int))
    slots: np.ndarray = dataclasses.field(default_factory=lambda: np.zeros(0, dtype=int))

    def __post_init__(self):
        if not self.t_start < self.t_end:
            raise ValueError(f'empty interval [{self.t_start}, {self.t_end}]')
        times = np.asarray(self.times, dtype=float).reshape(-1)
        object.__setattr__(self, 'times', times)
        object.__setattr__(self, 'amplitudes', np.asarray(self.amplitudes, dtype=float).reshape(-1))
        if times.size and (np.any(np.diff(times) <= 0) or times[0] <= self.t_start or times[-1] >= self.t_end):
            raise ValueError('input times must be strictly increasing and inside the interval')

    @property
    def input_count(self):
        return self.times.size

    @property
    def duration(self):
        return self.t_end - self.t_start

    def coordinate_map(self):
        '''
        How the local coordinates ``(I, J_1..J_M)`` of this interval relate to the neuron's coordinates (current in slot *neuron*, coupling ``J_{neuron,j}`` in slot j).

        :return: ``(local, slot)`` index arrays, one pair per raw contribution; a merged input appears once per presynaptic spike it sums.
        '''
        local = np.concatenate([[0], self.slots + 1])
        slot = np.concatenate([[self.neuron], self.sources])
        return local, slot

    def reweighted(self, couplings_row):
        "The same interval with amplitudes recomputed from ``J_{neuron, j}`` = *couplings_row*"
        amplitudes = np.zeros(self.times.size)
        np.add.at(amplitudes, self.slots, np.asarray(couplings_row, dtype=float)[self.sources])
        return dataclasses.replace(self, amplitudes=amplitudes)


__all__ += ['IsiProblem']


def build_isi_problems(rec: Recording, params: ModelParams, i: int, window: float = 0.0):
    '''
    One :class:`IsiProblem` per pair of consecutive spikes of neuron *i*.

    Inputs are the spikes of every other neuron, delayed by ``tau_d``, falling strictly inside the interval and no earlier than ``t_start + tau_r``.  The potential starts at the reset value 0.
    '''
    train = rec.trains[i]
    if train.size < 2:
        logger.debug('neuron %d has fewer than two spikes; no intervals', i)
        return []
    times, neurons = rec.events
    keep = neurons != i
    times = times[keep] + params.tau_d
    neurons = neurons[keep]
    order = np.argsort(times, kind='stable')
    times, neurons = times[order], neurons[order]
    row = params.couplings[i]
    starts = np.searchsorted(times, train[:-1] + params.tau_r, side='left')
    # inputs exactly at t_start are excluded even when tau_r is zero
    starts = np.maximum(starts, np.searchsorted(times, train[:-1], side='right'))
    ends = np.searchsorted(times, train[1:], side='left')
    problems = []
    for k, (t0, t1, lo, hi) in enumerate(zip(train[:-1], train[1:], starts, ends)):
        raw_times = times[lo:hi]
        sources = neurons[lo:hi]
        group_starts = _group_starts(raw_times, window)
        slots = np.cumsum(group_starts) - 1
        merged_times = raw_times[group_starts]
        amplitudes = np.zeros(merged_times.size)
        np.add.at(amplitudes, slots, row[sources])
        problems.append(IsiProblem(
            neuron=i, index=k, t_start=float(t0), t_end=float(t1),
            times=merged_times, amplitudes=amplitudes, v0=0.0,
            sources=sources, slots=slots))
    return problems


__all__ += ['build_isi_problems']


def windowed_rates(rec: Recording, i: int, tau):
    '''
    Rates of every neuron as seen by neuron *i* over the time scale *tau*::

        f_j^{i,tau} = 1/T sum_{t_ik < t_jl < t_i(k+1)} exp(-(t_i(k+1) - t_jl)/tau)

    With ``tau = inf`` this counts the spikes of j falling inside an interval of i.  Entry *i* is zero.
    '''
    train = rec.trains[i]
    rates = np.zeros(rec.neuron_count)
    if train.size < 2:
        return rates
    for j, other in enumerate(rec.trains):
        if j == i or other.size == 0:
            continue
        following = np.searchsorted(train, other, side='right')
        inside = (following >= 1) & (following < train.size)
        inside[inside] &= train[following[inside] - 1] < other[inside]
        delays = train[following[inside]] - other[inside]
        rates[j] = np.sum(np.exp(-delays / tau)) / rec.duration
    return rates


__all__ += ['windowed_rates']
