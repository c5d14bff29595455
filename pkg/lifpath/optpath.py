# Copyright (C) 2026, Hadron Industries, Inc.
# Lifpath is free software; you can redistribute it and/or modify
# it under the terms of the GNU Lesser General Public License version 3
# as published by the Free Software Foundation. It is distributed
# WITHOUT ANY WARRANTY; without even the implied warranty of
# MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE. See the file
# LICENSE for details.

'''
Optimal potential and noise over one inter-spike interval.

The path is built by the minimal-noise contact search: from the current restart point every input (and every step of a moving threshold) proposes the noise coefficient that would bring the free potential exactly to threshold there, every gap where the free potential could bulge above threshold proposes the coefficient of a tangency, and the smallest proposal wins.  An active win restarts the search at the contact; a passive win pins the potential to threshold for the shortest admissible duration and then leaves towards the next contact.

Sides of a contact:

``pre``
    the potential touches threshold just before the input's jump and restarts at ``threshold + J/C``.

``post``
    the potential touches threshold just after the jump and restarts at threshold.
'''

from __future__ import annotations
import dataclasses
import logging
import typing

import numpy as np

from .core import IsiProblem, ModelParams
from .utils import EXP_LIMIT, decayed_cumsum

__all__ = []

logger = logging.getLogger('lifpath.optpath')

#: below this value of g (t_end - t_start)/C the perfect integrator formulas are used
LINEAR_LIMIT = 1e-12

#: active and passive proposals closer than this (relative) are a tie, resolved to the active one
SELECTION_TOLERANCE = 1e-12


class InfeasibleIsi(RuntimeError):

    def __init__(self, reason, *, neuron=None, isi=None, time=None):
        self.reason = reason
        self.neuron = neuron
        self.isi = isi
        self.time = time
        where = ''
        if neuron is not None:
            where = f' (neuron {neuron}, interval {isi})'
        super().__init__(f'{reason}{where}')


__all__ += ['InfeasibleIsi']


class ConstantThreshold:

    "The fixed threshold: the same level over the whole interval"

    def __init__(self, value):
        self.value = float(value)

    def pieces(self, t_start, t_end):
        '''
        :return: ``(boundaries, levels)``: the times strictly inside the interval where the level changes and the ``len(boundaries)+1`` levels in force between them.
        '''
        return np.zeros(0), np.array([self.value])

    def __call__(self, t):
        return np.full(np.shape(t), self.value) if np.ndim(t) else self.value

    def __repr__(self):
        return f'<ConstantThreshold {self.value}>'


class PiecewiseThreshold:

    "A right-continuous piecewise constant threshold"

    def __init__(self, boundaries, levels):
        self.boundaries = np.asarray(boundaries, dtype=float)
        self.levels = np.asarray(levels, dtype=float)
        if self.levels.size != self.boundaries.size + 1:
            raise ValueError('need one more level than boundaries')
        if np.any(np.diff(self.boundaries) <= 0):
            raise ValueError('threshold boundaries must increase')

    def pieces(self, t_start, t_end):
        inside = (self.boundaries > t_start) & (self.boundaries < t_end)
        first = np.searchsorted(self.boundaries, t_start, side='right')
        count = int(inside.sum())
        return self.boundaries[inside], self.levels[first:first + count + 1]

    def __call__(self, t):
        return self.levels[np.searchsorted(self.boundaries, t, side='right')]

    def __repr__(self):
        return f'<PiecewiseThreshold {len(self.levels)} levels>'


__all__ += ['ConstantThreshold', 'PiecewiseThreshold']


def interval_threshold(threshold, problem: IsiProblem, params: ModelParams):
    '''
    Resolve *threshold* for one interval: ``None`` is the model's fixed threshold, a number a constant level, and a table exposing ``for_interval`` is asked for the interval's piecewise threshold.
    '''
    if threshold is None:
        return ConstantThreshold(params.threshold)
    if isinstance(threshold, (int, float, np.floating)):
        return ConstantThreshold(threshold)
    if hasattr(threshold, 'for_interval'):
        return threshold.for_interval(problem.t_start, problem.t_end)
    return threshold


__all__ += ['interval_threshold']


@dataclasses.dataclass(frozen=True)
class FreeSegment:

    start: float
    end: float
    #: noise is ``eta * exp((t - start)/tau)``
    eta: float
    v_start: float
    #: noise value at *end*; stays finite when *eta* underflows on long segments
    end_noise: float

    @property
    def duration(self):
        return self.end - self.start


@dataclasses.dataclass(frozen=True)
class PassiveContact:

    start: float
    duration: float
    level: float
    #: the constant noise ``g * level - I``
    noise: float

    @property
    def end(self):
        return self.start + self.duration


@dataclasses.dataclass(frozen=True)
class ActiveContact:

    time: float
    #: merged input index; -1 for a threshold step or the terminal spike
    index: int
    event: int
    side: str


__all__ += ['FreeSegment', 'PassiveContact', 'ActiveContact']


@dataclasses.dataclass(frozen=True, eq=False)
class EventTable:

    '''
    The times at which the search may place a contact.

    Entry 0 is the interval start and the last entry the terminal spike; in between are the merged inputs and the steps of the threshold.  ``levels[e]`` is the threshold on the gap after event *e* (the last entry repeats the final level).
    '''

    times: np.ndarray
    jumps: np.ndarray
    inputs: np.ndarray
    levels: np.ndarray

    @property
    def terminal(self):
        return self.times.size - 1

    def level_before(self, e):
        return self.levels[e - 1]

    def level_after(self, e):
        return self.levels[e]


def build_events(problem: IsiProblem, threshold, capacitance):
    boundaries, pieces = threshold.pieces(problem.t_start, problem.t_end)
    m = problem.input_count
    inner = np.union1d(problem.times, boundaries)
    slot = np.searchsorted(problem.times, inner)
    if m:
        is_input = (slot < m) & (problem.times[np.minimum(slot, m - 1)] == inner)
    else:
        is_input = np.zeros(inner.size, dtype=bool)
    times = np.concatenate([[problem.t_start], inner, [problem.t_end]])
    inputs = np.concatenate([[-1], np.where(is_input, slot, -1), [-1]])
    jumps = np.zeros(times.size)
    jumps[1:-1][is_input] = problem.amplitudes[slot[is_input]] / capacitance
    levels = pieces[np.searchsorted(boundaries, times, side='right')]
    return EventTable(times=times, jumps=jumps, inputs=inputs.astype(int), levels=levels)


__all__ += ['EventTable', 'build_events']


@dataclasses.dataclass(frozen=True)
class Block:

    '''
    The stretch of path from one restart to the next contact, as needed to differentiate it.

    *gap* is ``None`` for a free block; for a block containing a passive contact it is the event after which the contact starts, *eta* is then the tangency coefficient and *exit_angle* the ``arccosh`` of the exit condition.
    '''

    start: int
    start_side: str
    end: int
    end_side: str
    v_start: float
    eta: float
    end_noise: float
    gap: typing.Optional[int] = None
    contact_time: typing.Optional[float] = None
    exit_angle: float = 0.0


@dataclasses.dataclass(frozen=True, eq=False)
class OptimalPath:

    '''
    The optimal potential and noise over one interval, as an ordered tiling of :class:`FreeSegment` and :class:`PassiveContact` plus the :class:`ActiveContact` list (the terminal spike is the last contact).
    '''

    problem: IsiProblem
    current: float
    capacitance: float
    conductance: float
    #: whether the leaky formulas were used (False: perfect integrator branch)
    leaky: bool
    segments: typing.Tuple[typing.Union[FreeSegment, PassiveContact], ...]
    contacts: typing.Tuple[ActiveContact, ...]
    events: EventTable
    blocks: typing.Tuple[Block, ...]
    threshold: typing.Any
    flags: typing.FrozenSet[str] = frozenset()

    @property
    def tau(self):
        return self.capacitance / self.conductance if self.leaky else np.inf

    @property
    def active_contact_count(self):
        return len(self.contacts) - 1

    @property
    def passive_contact_count(self):
        return sum(1 for s in self.segments if isinstance(s, PassiveContact))


__all__ += ['Block', 'OptimalPath']


@dataclasses.dataclass(frozen=True, eq=False)
class SegmentState:

    '''
    A restart point with the inputs that follow it.

    *input_times* lie in ``(t_start, t_end)``; *input_amplitudes* are charges.  *threshold* is a constant level.
    '''

    t_start: float
    v_start: float
    t_end: float
    input_times: np.ndarray
    input_amplitudes: np.ndarray
    current: float
    capacitance: float
    conductance: float
    threshold: float

    @classmethod
    def from_problem(cls, problem: IsiProblem, params: ModelParams, current=None):
        if current is None:
            current = params.currents[problem.neuron]
        return cls(problem.t_start, problem.v0, problem.t_end,
                   problem.times, problem.amplitudes, float(current),
                   params.capacitance, params.conductance, params.threshold)

    @property
    def tau(self):
        return self.capacitance / self.conductance if self.conductance > 0 else np.inf

    @property
    def leaky(self):
        return self.conductance * (self.t_end - self.t_start) / self.capacitance >= LINEAR_LIMIT

    def event_time(self, m):
        "time of input *m*; ``m == len(input_times)`` is the terminal spike"
        return self.t_end if m == len(self.input_times) else self.input_times[m]


__all__ += ['SegmentState']


def _drift_and_gain(state: SegmentState, t, inputs_through):
    '''
    The potential at *t* with zero noise and the growth of the potential per unit noise coefficient.

    Inputs with times up to and including *inputs_through* contribute.
    '''
    times = np.asarray(state.input_times)
    amps = np.asarray(state.input_amplitudes) / state.capacitance
    mask = (times > state.t_start) & (times <= inputs_through)
    dt = t - state.t_start
    if state.leaky:
        g, tau = state.conductance, state.tau
        s = dt / tau
        drift = (state.v_start * np.exp(-s)
                 + np.sum(amps[mask] * np.exp(-(t - times[mask]) / tau))
                 - state.current / g * np.expm1(-s))
        return drift, np.sinh(s) / g
    drift = state.v_start + np.sum(amps[mask]) + state.current * dt / state.capacitance
    return drift, dt / state.capacitance


def free_segment_potential(eta, t, state: SegmentState):
    '''
    Potential at *t* of the free path leaving ``(t_start, v_start)`` with noise ``eta * exp((t - t_start)/tau)``; an input exactly at *t* has already jumped.
    '''
    if t < state.t_start:
        raise ValueError('t precedes the segment start')
    drift, gain = _drift_and_gain(state, t, t)
    return drift + eta * gain


def active_candidate(state: SegmentState, m):
    '''
    Noise coefficient bringing the free potential to threshold just before input *m*; ``m == len(input_times)`` targets the terminal spike.
    '''
    t_m = state.event_time(m)
    if not t_m > state.t_start:
        raise ValueError('a contact needs a segment of positive length')
    drift, gain = _drift_and_gain(state, t_m, np.nextafter(t_m, -np.inf))
    return (state.threshold - drift) / gain


def _tangency(q, h):
    '''
    Tangency coefficient and ``exp((t_c - t_start)/tau)`` for ``q = g A - I`` and ``h = g theta - I``; the root kept is the one with the tangency after the start.
    '''
    radicand = (q - h) * (q + h)
    if radicand < 0:
        return None
    root = np.sqrt(radicand)
    denominator = q + np.copysign(root, q)
    if denominator == 0:
        return None
    eta = h * h / denominator
    if eta == 0:
        return None
    growth = h / eta
    if not growth > 0:
        return None
    return eta, growth


def passive_candidate(state: SegmentState, m):
    '''
    The tangency of the free potential with threshold inside gap *m*, ``[t_m, t_{m+1})`` with ``t_0 = t_start`` and ``t_{M+1} = t_end``.

    :return: ``(eta_p, t_c)`` or ``None`` when the level, the sign condition or the gap excludes a tangency.
    '''
    if not state.leaky:
        return None
    g, tau = state.conductance, state.tau
    times = np.concatenate([[state.t_start], state.input_times, [state.t_end]])
    amps = np.concatenate([[0.0], state.input_amplitudes / state.capacitance])
    if (times[m] - state.t_start) / tau >= EXP_LIMIT:
        return None
    anchored = state.v_start + np.sum(amps[1:m + 1] * np.exp((times[1:m + 1] - state.t_start) / tau))
    h = g * state.threshold - state.current
    if h * (anchored - state.threshold) < 0:
        return None
    found = _tangency(g * anchored - state.current, h)
    if found is None:
        return None
    eta, growth = found
    t_c = state.t_start + tau * np.log(growth)
    if not times[m] <= t_c < times[m + 1]:
        return None
    return eta, t_c


def _exit_ratio(w_pre, w_post):
    '''
    Stretch of the exit from a passive contact, for each target.

    :return: ``(w, side)`` where *w* is the larger exit ratio and *side* the side it belongs to.
    '''
    side = np.where(w_post > w_pre, 'post', 'pre')
    return np.maximum(w_pre, w_post), side


def passive_contact_duration(state: SegmentState, t_c, target):
    '''
    Duration of a passive contact starting at *t_c* such that the potential, released with noise continuous, reaches threshold exactly at input *target* (``len(input_times)`` for the terminal spike).

    The result may be negative, meaning the contact would have to end before it starts; callers keep the smallest admissible value.
    '''
    g, tau = state.conductance, state.tau
    offset = state.current / g
    distance = state.threshold - offset
    t_l = state.event_time(target)
    if not t_l > t_c:
        raise ValueError('the target must follow the contact')
    times = np.asarray(state.input_times)
    amps = np.asarray(state.input_amplitudes) / state.capacitance
    between = (times > t_c) & (times < t_l)
    carried = np.sum(amps[between] * np.exp(-(t_l - times[between]) / tau))
    w_pre = (state.threshold - offset - carried) / distance
    if target < len(times):
        w_post = (state.threshold - offset - carried - amps[target]) / distance
    else:
        w_post = -np.inf
    w, _ = _exit_ratio(w_pre, w_post)
    if w < 1:
        raise InfeasibleIsi(f'no exit from the passive contact reaches input {target}', time=t_c)
    return t_l - tau * np.arccosh(w) - t_c


__all__ += ['free_segment_potential', 'active_candidate', 'passive_candidate',
            'passive_contact_duration']


class _Search:

    "One run of the contact search over an interval"

    def __init__(self, problem, params, threshold, current, tie_tolerance):
        self.problem = problem
        self.current = current
        self.capacitance = params.capacitance
        self.conductance = params.conductance
        self.leaky = params.conductance * problem.duration / params.capacitance >= LINEAR_LIMIT
        self.tau = params.capacitance / params.conductance if self.leaky else np.inf
        self.threshold = threshold
        self.events = build_events(problem, threshold, params.capacitance)
        self.tie_tolerance = tie_tolerance
        self.noise_scale = max(abs(current), params.capacitance * params.threshold / problem.duration)
        self.segments = []
        self.contacts = []
        self.blocks = []
        self.flags = set()

    def infeasible(self, reason, time=None):
        return InfeasibleIsi(reason, neuron=self.problem.neuron, isi=self.problem.index, time=time)

    def free_terms(self, a, v_start):
        '''
        For each event after *a*: the zero-noise potential just before its jump, the coefficient gain and the end-noise gain per volt of shortfall.
        '''
        ev = self.events
        t = ev.times[a + 1:]
        jumps = ev.jumps[a + 1:]
        dt = t - ev.times[a]
        if self.leaky:
            g, tau = self.conductance, self.tau
            s = dt / tau
            decay = np.exp(-s)
            carried = decayed_cumsum(t, jumps, tau) - jumps
            drift = v_start * decay + carried - self.current / g * np.expm1(-s)
            end_gain = 2 * g / -np.expm1(-2 * s)
            return drift, end_gain * decay, end_gain
        carried = np.cumsum(jumps) - jumps
        drift = v_start + carried + self.current * dt / self.capacitance
        gain = self.capacitance / dt
        return drift, gain, gain

    def passive_proposals(self, a, v_start):
        "Tangency proposals ``(eta, t_c, gap)`` for the gaps from event *a* on"
        ev = self.events
        if not self.leaky:
            return []
        g, tau, current = self.conductance, self.tau, self.current
        t_a = ev.times[a]
        gaps = np.arange(a, ev.terminal)
        s = (ev.times[gaps] - t_a) / tau
        growth = np.exp(np.minimum(s, EXP_LIMIT))
        weighted = ev.jumps[gaps] * growth
        weighted[0] = 0.0
        anchored = v_start + np.cumsum(weighted)
        h = g * ev.levels[gaps] - current
        q = g * anchored - current
        # rounding at an exact restart on threshold
        near = (q > h) & (q - h <= 1e-12 * np.abs(h))
        q = np.where(near, h, q)
        usable = (h < 0) & (q <= h) & (s < EXP_LIMIT)
        proposals = []
        for k, hk, qk in zip(gaps[usable], h[usable], q[usable]):
            found = _tangency(qk, hk)
            if found is None:
                continue
            eta, growth_c = found
            t_c = t_a + tau * np.log(growth_c)
            if ev.times[k] <= t_c < ev.times[k + 1]:
                proposals.append((eta, t_c, int(k)))
        return proposals

    def restart_potential(self, e, side):
        ev = self.events
        if side == 'post':
            return ev.level_after(e)
        return ev.level_before(e) + ev.jumps[e]

    def run(self):
        ev = self.events
        a, side, v_start = 0, 'reset', self.problem.v0
        while True:
            a, side, v_start = self.step(a, side, v_start)
            if a == ev.terminal:
                return

    def step(self, a, start_side, v_start):
        ev = self.events
        t_a = ev.times[a]
        drift, gain, end_gain = self.free_terms(a, v_start)
        jumps = ev.jumps[a + 1:]
        eta_pre = (ev.levels[a:-1] - drift) * gain
        eta_post = (ev.levels[a + 1:] - drift - jumps) * gain
        eta_post[-1] = np.inf
        post = eta_post < eta_pre
        eta_active = np.where(post, eta_post, eta_pre)
        passive = self.passive_proposals(a, v_start)

        best_active = int(np.argmin(eta_active))
        best = eta_active[best_active]
        if not np.isfinite(best):
            raise self.infeasible('no finite contact proposal', time=t_a)
        chosen_passive = None
        if passive:
            eta_p, t_c, k = min(passive, key=lambda p: (p[0], p[1]))
            if eta_p < best - SELECTION_TOLERANCE * max(abs(best), self.noise_scale):
                chosen_passive = (eta_p, t_c, k)
                best = eta_p

        proposals = np.concatenate([eta_active, [p[0] for p in passive]])
        close = np.sum(proposals <= best + self.tie_tolerance * max(abs(best), self.noise_scale))
        if close > 1:
            self.flags.add('near_tie')
            logger.debug('neuron %s interval %s: %d proposals within tie tolerance at t=%g',
                         self.problem.neuron, self.problem.index, close, t_a)

        if chosen_passive is not None:
            return self.take_passive(a, start_side, v_start, *chosen_passive)
        e = a + 1 + best_active
        side = 'post' if post[best_active] else 'pre'
        shortfall = (ev.levels[e] if side == 'post' else ev.levels[e - 1]) - drift[best_active] - (
            jumps[best_active] if side == 'post' else 0.0)
        end_noise = shortfall * end_gain[best_active]
        eta = eta_active[best_active]
        self.segments.append(FreeSegment(t_a, ev.times[e], eta, v_start, end_noise))
        self.contacts.append(ActiveContact(ev.times[e], int(ev.inputs[e]), e, side))
        self.blocks.append(Block(a, start_side, e, side, v_start, eta, end_noise))
        return e, side, self.restart_potential(e, side)

    def take_passive(self, a, start_side, v_start, eta, t_c, k):
        ev = self.events
        g, tau = self.conductance, self.tau
        t_a = ev.times[a]
        level = ev.levels[k]
        h = g * level - self.current
        if t_c > t_a:
            self.segments.append(FreeSegment(t_a, t_c, eta, v_start, h))

        offset = self.current / g
        distance = level - offset
        t = ev.times[k + 1:]
        jumps = ev.jumps[k + 1:]
        carried = decayed_cumsum(t, jumps, tau) - jumps
        w_pre = (ev.levels[k:-1] - offset - carried) / distance
        w_post = (ev.levels[k + 1:] - offset - carried - jumps) / distance
        w_post[-1] = -np.inf
        w, sides = _exit_ratio(w_pre, w_post)
        admissible = w >= 1 - 1e-12
        angle = np.arccosh(np.maximum(w, 1.0))
        exits = t - tau * angle
        slack = 1e-9 * self.problem.duration
        admissible &= exits >= t_c - slack
        exits = np.maximum(exits, t_c)
        admissible[1:] &= exits[1:] < ev.times[k + 1]
        if not np.any(admissible):
            raise self.infeasible('no admissible exit from the passive contact', time=t_c)
        exits = np.where(admissible, exits, np.inf)
        choice = int(np.argmin(exits))
        t_s = exits[choice]
        target = k + 1 + choice
        side = str(sides[choice])
        t_l = ev.times[target]
        logger.debug('neuron %s interval %s: passive contact at %g for %g, released towards event %d',
                     self.problem.neuron, self.problem.index, t_c, t_s - t_c, target)

        self.segments.append(PassiveContact(t_c, t_s - t_c, level, h))
        if t_l > t_s:
            self.segments.append(FreeSegment(t_s, t_l, h, level, h * np.exp((t_l - t_s) / tau)))
        self.contacts.append(ActiveContact(t_l, int(ev.inputs[target]), target, side))
        self.blocks.append(Block(a, start_side, target, side, v_start, eta,
                                 h * np.exp((t_l - t_s) / tau),
                                 gap=k, contact_time=t_c, exit_angle=float(angle[choice])))
        return target, side, self.restart_potential(target, side)


def solve_isi(problem: IsiProblem, params: ModelParams, threshold=None, *,
              current=None, tie_tolerance=1e-10) -> OptimalPath:
    '''
    Optimal path of one interval.

    :param threshold: ``None`` for the model threshold, a constant, a :class:`PiecewiseThreshold`, or a table with ``for_interval``.

    :param current: external current of the neuron; defaults to ``params.currents[problem.neuron]``.

    :raises InfeasibleIsi: when no proposal yields a valid path.
    '''
    if current is None:
        current = params.currents[problem.neuron]
    threshold = interval_threshold(threshold, problem, params)
    search = _Search(problem, params, threshold, float(current), tie_tolerance)
    search.run()
    return OptimalPath(
        problem=problem, current=float(current),
        capacitance=params.capacitance, conductance=params.conductance,
        leaky=search.leaky,
        segments=tuple(search.segments), contacts=tuple(search.contacts),
        events=search.events, blocks=tuple(search.blocks),
        threshold=threshold, flags=frozenset(search.flags))


__all__ += ['solve_isi']


def path_log_weight(path: OptimalPath):
    '''
    The path's contribution ``-1/2 \\int eta*(t)^2 dt`` to the log-likelihood.
    '''
    tau = path.tau
    total = 0.0
    for segment in path.segments:
        if isinstance(segment, PassiveContact):
            total -= 0.5 * segment.noise ** 2 * segment.duration
        elif path.leaky:
            s = segment.duration / tau
            total -= 0.25 * tau * segment.end_noise ** 2 * -np.expm1(-2 * s)
        else:
            total -= 0.5 * segment.eta ** 2 * segment.duration
    return total


__all__ += ['path_log_weight']


def _segment_index(path, times):
    starts = np.array([s.start for s in path.segments])
    return np.clip(np.searchsorted(starts, times, side='right') - 1, 0, len(starts) - 1)


def reconstruct_potential(path: OptimalPath, times):
    '''
    The optimal potential at each of *times*; at an input time the jump has happened.
    '''
    times = np.atleast_1d(np.asarray(times, dtype=float))
    problem = path.problem
    amps = problem.amplitudes / path.capacitance
    result = np.empty(times.size)
    tau, g = path.tau, path.conductance
    for n, (t, k) in enumerate(zip(times, _segment_index(path, times))):
        segment = path.segments[k]
        if isinstance(segment, PassiveContact):
            result[n] = segment.level
            continue
        mask = (problem.times > segment.start) & (problem.times <= t)
        dt = t - segment.start
        if path.leaky:
            s = dt / tau
            remaining = (segment.end - t) / tau
            result[n] = (segment.v_start * np.exp(-s)
                         + np.sum(amps[mask] * np.exp(-(t - problem.times[mask]) / tau))
                         - path.current / g * np.expm1(-s)
                         + segment.end_noise / (2 * g) * (np.exp(-remaining) - np.exp(-remaining - 2 * s)))
        else:
            result[n] = (segment.v_start + np.sum(amps[mask])
                         + (path.current + segment.eta) * dt / path.capacitance)
    return result


def noise_values(path: OptimalPath, times):
    "The optimal noise at each of *times*"
    times = np.atleast_1d(np.asarray(times, dtype=float))
    result = np.empty(times.size)
    for n, (t, k) in enumerate(zip(times, _segment_index(path, times))):
        segment = path.segments[k]
        if isinstance(segment, PassiveContact):
            result[n] = segment.noise
        elif path.leaky:
            result[n] = segment.end_noise * np.exp(-(segment.end - t) / path.tau)
        else:
            result[n] = segment.eta
    return result


__all__ += ['reconstruct_potential', 'noise_values']
