# Copyright (C) 2026, Hadron Industries, Inc.
# Lifpath is free software; you can redistribute it and/or modify
# it under the terms of the GNU Lesser General Public License version 3
# as published by the Free Software Foundation. It is distributed
# WITHOUT ANY WARRANTY; without even the implied warranty of
# MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE. See the file
# LICENSE for details.

'''
Brute force references for the fast code paths: a discretized optimal path, Monte-Carlo survival and bridge statistics, and an exhaustive likelihood grid search.

None of this is fast; all of it is deterministic given its seed.
'''

from __future__ import annotations
import dataclasses
import itertools
import logging
import typing

import numpy as np
import scipy.linalg

from .core import IsiProblem, ModelParams, Recording
from .optpath import InfeasibleIsi
from .specfun import OuSpec

__all__ = []

logger = logging.getLogger('lifpath.oracle')


class GridNotConverged(RuntimeError):

    def __init__(self, rounds, residual):
        self.rounds = rounds
        self.residual = residual
        super().__init__(f"grid path not optimal after {rounds} active set rounds (residual {residual:g})")


__all__ += ['GridNotConverged']


@dataclasses.dataclass(frozen=True, eq=False)
class GridPath:

    times: np.ndarray
    #: potential at each node, after any jump arriving there
    potential: np.ndarray
    #: ``1/2 sum h eta_k^2``; compare with ``-path_log_weight``
    objective: float
    #: active set rounds taken
    rounds: int = 0


class _GridAction:

    '''
    The trapezoidal action ``1/2 sum_k h eta_k^2`` with::

        eta_k = C (V_{k+1} - a_{k+1} - V_k) / h + g (V_k + V_{k+1} - a_{k+1}) / 2 - I

    over the interior node values; *a* holds the jumps snapped to the nodes.
    '''

    def __init__(self, h, capacitance, conductance, current, jumps, v_start, v_end):
        self.h = h
        self.forward = capacitance / h + conductance / 2
        self.backward = -capacitance / h + conductance / 2
        self.jumps = jumps
        self.current = current
        self.v_start = v_start
        self.v_end = v_end

    def full(self, interior):
        return np.concatenate([[self.v_start], interior, [self.v_end]])

    def eta(self, interior):
        v = self.full(interior)
        return (self.forward * (v[1:] - self.jumps[1:]) + self.backward * v[:-1]) - self.current

    def objective(self, interior):
        return 0.5 * self.h * float(np.sum(self.eta(interior) ** 2))

    def gradient(self, interior):
        eta = self.eta(interior)
        return self.h * (self.forward * eta[:-1] + self.backward * eta[1:])


def _active_set_solve(action: _GridAction, upper, max_rounds):
    '''
    Primal-dual active set solution of the bound constrained quadratic program.  The Hessian is a tridiagonal M-matrix, so the active set settles after finitely many rounds.

    :return: ``(node values, active mask, rounds, settled)``
    '''
    size = upper.size
    diagonal = action.h * (action.forward ** 2 + action.backward ** 2)
    off = action.h * action.forward * action.backward
    v = np.minimum(np.zeros(size), upper)
    active = np.zeros(size, dtype=bool)
    for rounds in range(1, max_rounds + 1):
        free = np.flatnonzero(~active)
        v[active] = upper[active]
        if free.size:
            base = v.copy()
            base[free] = 0.0
            rhs = -action.gradient(base)[free]
            bands = np.zeros((3, free.size))
            bands[1] = diagonal
            linked = np.diff(free) == 1
            bands[0, 1:] = np.where(linked, off, 0.0)
            bands[2, :-1] = np.where(linked, off, 0.0)
            v[free] = scipy.linalg.solve_banded((1, 1), bands, rhs)
        multiplier = -action.gradient(v)
        next_active = np.where(active, multiplier > 0, v > upper)
        if np.array_equal(next_active, active):
            return v, active, rounds, True
        active = next_active
    return v, active, max_rounds, False


def grid_optimal_path(problem: IsiProblem, params: ModelParams, nodes=10000, *, current=None,
                      tolerance=1e-10, max_rounds=200) -> GridPath:
    '''
    Minimize the discretized action of one interval over node values below threshold.

    Inputs are snapped to the nearest interior node.  The bound constrained quadratic program is solved by a primal-dual active set iteration, each round a banded solve over the free nodes.  The result is accepted when the active set is stable and the optimality conditions hold to *tolerance*, relative to the curvature scale of the grid.

    :raises GridNotConverged: when the active set still changes after *max_rounds* rounds or the optimality residual exceeds *tolerance*.
    '''
    if current is None:
        current = params.currents[problem.neuron]
    C, g, theta = params.capacitance, params.conductance, params.threshold
    h = problem.duration / nodes
    times = problem.t_start + h * np.arange(nodes + 1)
    jumps = np.zeros(nodes + 1)
    snapped = np.clip(np.rint((problem.times - problem.t_start) / h).astype(int), 1, nodes - 1)
    np.add.at(jumps, snapped, problem.amplitudes / C)
    action = _GridAction(h, C, g, current, jumps, problem.v0, theta)
    upper = theta + np.minimum(jumps[1:-1], 0.0)
    v, active, rounds, settled = _active_set_solve(action, upper, max_rounds)

    gradient = action.gradient(v)
    residual = max(np.max(np.abs(gradient[~active]), initial=0.0),
                   np.max(gradient[active], initial=0.0),
                   np.max(v - upper, initial=0.0) * h * (action.forward ** 2 + action.backward ** 2))
    scale = h * (action.forward ** 2 + action.backward ** 2) * max(np.max(np.abs(v), initial=0.0), abs(theta), 1.0)
    if not settled or residual > tolerance * scale:
        raise GridNotConverged(rounds, residual / scale)
    v = np.minimum(v, upper)
    value = action.objective(v)
    logger.debug('grid path of neuron %s interval %s: %d rounds, objective %g',
                 problem.neuron, problem.index, rounds, value)
    return GridPath(times, action.full(v), value, rounds)


__all__ += ['GridPath', 'grid_optimal_path']


def mc_survival(dt, v, spec: OuSpec, n_paths=10000, seed=0, *, steps=1000):
    '''
    Monte-Carlo survival probability from *v* over *dt* with an absorbing threshold.

    Euler-Maruyama steps; a path surviving both ends of a step is still killed with the Brownian bridge crossing probability ``exp(-2 (V_th - x0)(V_th - x1) / (s^2 h))``.

    :return: ``(estimate, standard error)``.
    '''
    rng = np.random.default_rng(seed)
    if v >= spec.threshold:
        return 0.0, 0.0
    h = dt / steps
    s = spec.noise_std / spec.capacitance
    drift_gain = spec.conductance / spec.capacitance
    drive = spec.current / spec.capacitance
    x = np.full(n_paths, float(v))
    alive = np.ones(n_paths, dtype=bool)
    for _ in range(steps):
        idx = np.flatnonzero(alive)
        if idx.size == 0:
            break
        x0 = x[idx]
        x1 = x0 + (drive - drift_gain * x0) * h + s * np.sqrt(h) * rng.standard_normal(idx.size)
        crossed = x1 >= spec.threshold
        below = ~crossed
        bridge = np.zeros(idx.size)
        bridge[below] = np.exp(-2 * (spec.threshold - x0[below]) * (spec.threshold - x1[below]) / (s * s * h))
        crossed |= rng.random(idx.size) < bridge
        alive[idx[crossed]] = False
        x[idx] = x1
    estimate = float(alive.mean())
    return estimate, float(np.sqrt(max(estimate * (1 - estimate), 0.0) / n_paths))


__all__ += ['mc_survival']


def mc_bridge_variance(delta, params: ModelParams, n_paths=100000, seed=0):
    '''
    Variance of the free potential at the middle of an interval of length *delta* with both ends pinned, by exact Gaussian bridge sampling of the Ornstein-Uhlenbeck process.

    The threshold constraint is not imposed.  The result is in volts squared.
    '''
    rng = np.random.default_rng(seed)
    s2 = (params.noise_std / params.capacitance) ** 2
    half = delta / 2
    if params.conductance == 0:
        decay, step_variance = 1.0, s2 * half
    else:
        tau = params.tau
        decay = np.exp(-half / tau)
        step_variance = s2 * tau / 2 * -np.expm1(-2 * half / tau)
    middle = np.sqrt(step_variance) * rng.standard_normal(n_paths)
    end = decay * middle + np.sqrt(step_variance) * rng.standard_normal(n_paths)
    end_variance = step_variance * (1 + decay ** 2)
    bridge = middle - decay * step_variance / end_variance * end
    return float(np.var(bridge, ddof=1))


def fourier_bridge_variance(delta, tau, sigma_bar, terms=10000):
    '''
    Midpoint variance, in units of ``V_th**2``, from the sine series of the pinned fluctuation::

        sum_p lambda_{2p+1},   lambda_n = 2 sigma_bar^2 rho / (rho^2 + n^2 pi^2),   rho = delta / tau
    '''
    rho = delta / tau
    n = 2 * np.arange(terms) + 1
    return float(np.sum(2 * sigma_bar ** 2 * rho / (rho ** 2 + (n * np.pi) ** 2)))


__all__ += ['mc_bridge_variance', 'fourier_bridge_variance']


@dataclasses.dataclass(frozen=True, eq=False)
class GridSearchResult:

    #: best point in the natural coordinates of the neuron
    point: np.ndarray
    value: float
    #: ``L*_i`` over the grid, one axis per searched slot
    values: np.ndarray
    slots: typing.Tuple[int, ...]


def grid_search_mle(rec: Recording, i, params: ModelParams, grid: typing.Mapping[int, typing.Sequence[float]],
                    options=None) -> GridSearchResult:
    '''
    Evaluate ``L*_i`` on the product of the per-slot value lists in *grid* and return the maximizer.

    Slots not in *grid* keep their value in *params* (slot *i* is the current).  Infeasible points count as ``-inf``.
    '''
    from .infer import log_likelihood
    if len(grid) > 3:
        raise ValueError('grid search is limited to three parameters')
    slots = tuple(grid)
    axes = [np.asarray(grid[slot], dtype=float) for slot in slots]
    base = params.couplings[i].copy()
    base[i] = params.currents[i]
    values = np.empty(tuple(a.size for a in axes))
    for index in itertools.product(*(range(a.size) for a in axes)):
        x = base.copy()
        for slot, axis, k in zip(slots, axes, index):
            x[slot] = axis[k]
        row = x.copy()
        row[i] = 0.0
        candidate = params.with_neuron(i, x[i], row)
        try:
            values[index] = log_likelihood(rec, candidate, options, neurons=[i])[1][i]
        except InfeasibleIsi:
            values[index] = -np.inf
    best = np.unravel_index(int(np.argmax(values)), values.shape)
    point = base.copy()
    for slot, axis, k in zip(slots, axes, best):
        point[slot] = axis[k]
    return GridSearchResult(point, float(values[best]), values, slots)


__all__ += ['GridSearchResult', 'grid_search_mle']
