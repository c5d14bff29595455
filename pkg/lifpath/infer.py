# Copyright (C) 2026, Hadron Industries, Inc.
# Lifpath is free software; you can redistribute it and/or modify
# it under the terms of the GNU Lesser General Public License version 3
# as published by the Free Software Foundation. It is distributed
# WITHOUT ANY WARRANTY; without even the implied warranty of
# MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE. See the file
# LICENSE for details.

'''
Maximum likelihood inference of the current and incoming couplings of each neuron.

The log-likelihood of neuron i is ``L*_i``, the sum of :func:`~lifpath.optpath.path_log_weight` over its intervals.  It is concave in ``x = (I_i, J_i1, ..., J_iN)`` (slot *i* of *x* holds the current) and is maximized by a damped Newton iteration from ``x = 0``.  Neurons are independent: the row of neuron i is all that enters ``L*_i``.

Reported Hessians use the coordinates ``v`` where the current is replaced by ``I_i * tau_v`` so that every slot is a charge; *tau_v* is the configured leak time override, else ``C/g``, else the mean interval of the neuron.
'''

from __future__ import annotations
import concurrent.futures
import dataclasses
import logging
import typing

import numpy as np
import scipy.linalg

from .core import InvalidParams, ModelParams, Recording, build_isi_problems, windowed_rates
from .derivatives import isi_derivatives
from .mthreshold import build_threshold_table, cost_energy, default_bin_edges
from .optpath import InfeasibleIsi, path_log_weight, solve_isi
from .specfun import EigenvalueBracketError, SeriesRangeError
from .analysis import error_bars

__all__ = []

logger = logging.getLogger('lifpath.infer')

#: step halvings tried before an iteration is declared stalled
MAX_HALVINGS = 40


@dataclasses.dataclass(frozen=True)
class InferenceOptions:

    mode: str = 'fixed'
    epsilon: float = 1e-12
    max_iters: int = 200
    gradient_tolerance: float = 1e-9
    ridge: float = 1e-12
    tie_tolerance: float = 1e-10
    #: leak time override for the ``I*tau`` coordinate and windowed rates
    tau: typing.Optional[float] = None
    #: noise strength; defaults to the model's
    sigma: typing.Optional[float] = None
    prior_jmin: typing.Optional[float] = None
    prior_jmax: typing.Optional[float] = None
    prior_weight: typing.Optional[float] = None
    windowed_rates: bool = False
    cost_energy: bool = False
    coincidence_window: float = 0.0
    threads: int = 1
    survival_level: float = 0.5
    bins: int = 16
    bin_min_fraction: float = 0.01
    bin_max_factor: float = 10.0
    slope_floor: float = 1e-300
    #: lowest moving threshold as a fraction of V_th
    threshold_floor: float = 0.0
    truncation: float = 1e-8
    n_max: float = 150.0
    eigen_step: float = 0.25

    def __post_init__(self):
        if self.mode not in ('fixed', 'moving'):
            raise InvalidParams(f'unknown inference mode {self.mode}', field='mode')
        if not self.epsilon > 0:
            raise InvalidParams('epsilon must be positive', field='epsilon')
        if self.max_iters < 1:
            raise InvalidParams('at least one iteration is needed', field='max_iters')
        if self.prior_enabled:
            if self.prior_weight < 0:
                raise InvalidParams('prior weight must be non-negative', field='prior_weight')
            if self.prior_bounds[0] > self.prior_bounds[1]:
                raise InvalidParams('prior_jmin exceeds prior_jmax', field='prior_jmin')
        if self.tau is not None and not self.tau > 0:
            raise InvalidParams('tau override must be positive', field='tau')

    @classmethod
    def from_config(cls, layout, **overrides):
        '''
        Options from the ``infer``, ``mthreshold`` and ``specfun`` sections of *layout*; *overrides* win.
        '''
        infer, mt, sf = layout.infer, layout.mthreshold, layout.specfun
        values = dict(
            mode=infer.mode, epsilon=infer.epsilon, max_iters=infer.max_iters,
            gradient_tolerance=infer.gradient_tolerance, ridge=infer.ridge,
            tie_tolerance=infer.tie_tolerance,
            tau=infer.tau, sigma=infer.sigma,
            prior_jmin=infer.prior_jmin, prior_jmax=infer.prior_jmax, prior_weight=infer.prior_weight,
            windowed_rates=infer.windowed_rates, cost_energy=infer.cost_energy,
            coincidence_window=layout.coincidence_window, threads=layout.threads,
            survival_level=mt.survival_level, bins=mt.bins,
            bin_min_fraction=mt.bin_min_fraction, bin_max_factor=mt.bin_max_factor,
            slope_floor=mt.slope_floor, threshold_floor=mt.floor,
            truncation=sf.truncation, n_max=sf.n_max, eigen_step=sf.eigen_step)
        values.update(overrides)
        return cls(**values)

    @property
    def prior_enabled(self):
        return self.prior_weight is not None and self.prior_weight > 0

    @property
    def prior_bounds(self):
        low = -np.inf if self.prior_jmin is None else self.prior_jmin
        high = np.inf if self.prior_jmax is None else self.prior_jmax
        return low, high

    @property
    def series(self):
        "Keyword arguments for the survival series"
        return dict(truncation=self.truncation, n_max=self.n_max, step=self.eigen_step)

    def replace(self, **changes):
        return dataclasses.replace(self, **changes)


__all__ += ['InferenceOptions']


@dataclasses.dataclass(frozen=True, eq=False)
class NeuronDerivatives:

    '''
    ``L*_i`` with its gradient and Hessian in the natural coordinates ``x`` (slot *i* the current, slot j the coupling ``J_ij``).
    '''

    value: float
    gradient: np.ndarray
    hessian: np.ndarray
    #: some interval sits on a change of its contact set
    boundary: bool = False


__all__ += ['NeuronDerivatives']


@dataclasses.dataclass(frozen=True, eq=False)
class NeuronResult:

    neuron: int
    current: float
    #: incoming couplings ``J_ij``; entry *neuron* is zero
    couplings: np.ndarray
    log_likelihood: float
    #: the maximized objective, L* less the prior and cost energy
    objective: float
    #: Hessian of the objective in ``v`` coordinates
    hessian: np.ndarray
    #: standard deviations in ``v`` coordinates
    error_bars: np.ndarray
    current_error: float
    tau_v: float
    iterations: int
    active_contacts: int
    passive_contacts: int
    converged: bool
    gradient_norm: float = 0.0
    flags: typing.FrozenSet[str] = frozenset()


@dataclasses.dataclass(frozen=True, eq=False)
class InferenceResult:

    neuron_count: int
    #: neuron index to result
    neurons: typing.Mapping[int, NeuronResult]
    #: neuron index to the error that stopped its inference
    failures: typing.Mapping[int, str] = dataclasses.field(default_factory=dict)

    def _stack(self, attribute, fill):
        rows = []
        for i in range(self.neuron_count):
            result = self.neurons.get(i)
            rows.append(fill(i) if result is None else getattr(result, attribute))
        return np.array(rows)

    @property
    def currents(self):
        return self._stack('current', lambda i: np.nan)

    @property
    def couplings(self):
        n = self.neuron_count
        return self._stack('couplings', lambda i: np.full(n, np.nan))

    @property
    def error_bars(self):
        "Row i holds the error bars of neuron i in its ``v`` coordinates"
        n = self.neuron_count
        return self._stack('error_bars', lambda i: np.full(n, np.nan))

    @property
    def log_likelihood(self):
        return float(sum(r.log_likelihood for r in self.neurons.values()))

    @property
    def converged(self):
        return not self.failures and all(r.converged for r in self.neurons.values())


__all__ += ['NeuronResult', 'InferenceResult']


@dataclasses.dataclass(eq=False)
class _Evaluation:

    value: float
    gradient: np.ndarray
    hessian: np.ndarray
    boundary: bool = False
    active: int = 0
    passive: int = 0
    flags: set = dataclasses.field(default_factory=set)


class _NeuronObjective:

    "Everything needed to evaluate the objective of one neuron at a point x"

    def __init__(self, rec: Recording, i, params: ModelParams, options: InferenceOptions):
        self.neuron = i
        self.params = params
        self.options = options
        self.size = rec.neuron_count
        self.problems = build_isi_problems(rec, params, i, options.coincidence_window)
        train = rec.trains[i]
        self.mean_isi = (train[-1] - train[0]) / (train.size - 1) if train.size > 1 else np.nan
        self.max_isi = float(np.max(np.diff(train))) if train.size > 1 else np.nan
        if options.tau is not None:
            self.tau_v = options.tau
        elif params.conductance > 0:
            self.tau_v = params.tau
        else:
            self.tau_v = self.mean_isi
        self.sigma = params.noise_std if options.sigma is None else options.sigma
        needs_rates = options.mode == 'moving' or options.cost_energy
        if needs_rates and params.conductance == 0:
            raise InvalidParams('moving threshold and cost energy need a leaky neuron', field='conductance')
        if needs_rates and not self.sigma > 0:
            raise InvalidParams('moving threshold and cost energy need a noise strength', field='sigma')
        if options.windowed_rates:
            rates = windowed_rates(rec, i, options.tau if options.tau is not None else params.tau)
        else:
            rates = rec.rates.copy()
        #: I^e = rate_weights @ x
        self.rate_weights = rates
        self.rate_weights[i] = 1.0
        self._fallback_logged = False

    def split(self, x):
        row = np.array(x, dtype=float)
        current = row[self.neuron]
        row[self.neuron] = 0.0
        return current, row

    def effective_current(self, x):
        return float(self.rate_weights @ x)

    def threshold_for(self, x):
        "The threshold the paths are solved against at x"
        options = self.options
        if options.mode == 'fixed':
            return None
        params = self.params
        current_e = self.effective_current(x)
        edges = default_bin_edges(params, self.max_isi, options.bins,
                                  options.bin_min_fraction, options.bin_max_factor)
        try:
            return build_threshold_table(
                params, current_e, edges, sigma=self.sigma,
                survival_level=options.survival_level, slope_floor=options.slope_floor,
                floor=options.threshold_floor * params.threshold, **options.series)
        except (SeriesRangeError, EigenvalueBracketError) as e:
            if not self._fallback_logged:
                logger.warning('neuron %d: no moving threshold at I_e=%g (%s); using the fixed threshold',
                               self.neuron, current_e, e)
                self._fallback_logged = True
            return None

    def likelihood(self, x, threshold, derivatives=True) -> _Evaluation:
        current, row = self.split(x)
        n = self.size
        result = _Evaluation(0.0, np.zeros(n), np.zeros((n, n)))
        if threshold is None and self.options.mode == 'moving':
            result.flags.add('threshold_fallback')
        for problem in self.problems:
            problem = problem.reweighted(row)
            path = solve_isi(problem, self.params, threshold, current=current,
                             tie_tolerance=self.options.tie_tolerance)
            result.value += path_log_weight(path)
            result.active += path.active_contact_count
            result.passive += path.passive_contact_count
            result.flags |= path.flags
            if not derivatives:
                continue
            local = isi_derivatives(path)
            result.boundary = result.boundary or local.boundary
            source, slot = problem.coordinate_map()
            np.add.at(result.gradient, slot, local.gradient[source])
            np.add.at(result.hessian, (slot[:, None], slot[None, :]),
                      local.hessian[np.ix_(source, source)])
        return result

    def cost(self, current_e):
        "Cost energy penalty in units of L*"
        options, params = self.options, self.params
        count = len(self.problems)
        u = cost_energy(current_e, self.mean_isi, params, self.sigma, **options.series)
        return self.sigma ** 2 * count * u

    def penalize(self, x, result: _Evaluation):
        "Subtract the coupling prior and the cost energy from *result* in place"
        options = self.options
        if options.prior_enabled:
            low, high = options.prior_bounds
            w = options.prior_weight
            _, row = self.split(x)
            above = np.maximum(row - high, 0.0)
            below = np.maximum(low - row, 0.0)
            above[self.neuron] = below[self.neuron] = 0.0
            outside = (above > 0) | (below > 0)
            result.value -= w * float(np.sum(above ** 2 + below ** 2))
            result.gradient -= 2 * w * (above - below)
            result.hessian[np.diag_indices(self.size)] -= 2 * w * outside
        if options.cost_energy and self.problems:
            current_e = self.effective_current(x)
            step = 1e-4 * max(abs(current_e), self.params.conductance * self.params.threshold)
            centre = self.cost(current_e)
            up, down = self.cost(current_e + step), self.cost(current_e - step)
            slope = (up - down) / (2 * step)
            curvature = (up - 2 * centre + down) / step ** 2
            result.value -= centre
            result.gradient -= slope * self.rate_weights
            result.hessian -= curvature * np.outer(self.rate_weights, self.rate_weights)
        return result

    def objective(self, x, threshold, derivatives=True):
        return self.penalize(x, self.likelihood(x, threshold, derivatives))

    def to_v(self, vector_or_matrix):
        "Rescale the current slot from natural to ``v`` coordinates"
        scale = np.ones(self.size)
        scale[self.neuron] = 1 / self.tau_v
        if np.ndim(vector_or_matrix) == 1:
            return vector_or_matrix * scale
        return vector_or_matrix * np.outer(scale, scale)

    def gradient_norm(self, result: _Evaluation, free):
        return float(np.linalg.norm(self.to_v(result.gradient)[free]))

    def gradient_scale(self, result: _Evaluation, free):
        "Gradient norms below tolerance times this count as stationary"
        curvature = -np.trace(self.to_v(result.hessian)[np.ix_(free, free)]) / max(len(free), 1)
        charge = self.params.capacitance * self.params.threshold
        return curvature * charge if curvature > 0 else charge


def _newton_step(gradient, hessian, ridge):
    "Solve ``(-H + ridge) step = gradient``; fall back to a scaled gradient step"
    n = gradient.size
    scale = -np.trace(hessian) / n
    if not scale > 0:
        scale = 1.0
    system = -hessian + ridge * scale * np.eye(n)
    try:
        step = scipy.linalg.solve(system, gradient, assume_a='sym')
    except (scipy.linalg.LinAlgError, ValueError):
        step = scipy.linalg.lstsq(system, gradient)[0]
    if not (np.all(np.isfinite(step)) and gradient @ step > 0):
        step = gradient / scale
    return step


def _empty_result(i, n, params, options, flag):
    tau_v = options.tau if options.tau is not None else params.tau
    return NeuronResult(
        neuron=i, current=0.0, couplings=np.zeros(n),
        log_likelihood=0.0, objective=0.0,
        hessian=np.zeros((n, n)), error_bars=np.full(n, np.inf), current_error=np.inf,
        tau_v=float(tau_v), iterations=0, active_contacts=0, passive_contacts=0,
        converged=True, flags=frozenset([flag]))


def _options(options):
    return InferenceOptions() if options is None else options


def log_likelihood(rec: Recording, params: ModelParams, options: InferenceOptions = None,
                   neurons=None):
    '''
    ``L*`` of the recording under *params*, with the threshold given by the inference mode.

    :param neurons: evaluate only these neurons; the others contribute zero.
    :return: ``(total, per_neuron)``.
    :raises InfeasibleIsi: naming the neuron and interval.
    '''
    options = _options(options)
    terms = np.zeros(rec.neuron_count)
    for i in range(rec.neuron_count) if neurons is None else neurons:
        objective = _NeuronObjective(rec, i, params, options)
        if not objective.problems:
            continue
        x = params.couplings[i].copy()
        x[i] = params.currents[i]
        terms[i] = objective.likelihood(x, objective.threshold_for(x), derivatives=False).value
    return float(terms.sum()), terms


__all__ += ['log_likelihood']


def gradient_hessian(rec: Recording, i, params: ModelParams,
                     options: InferenceOptions = None) -> NeuronDerivatives:
    '''
    Exact gradient and Hessian of ``L*_i`` at the current and couplings of neuron *i* in *params*, with the contact structure of every path held fixed.
    '''
    options = _options(options)
    objective = _NeuronObjective(rec, i, params, options)
    x = params.couplings[i].copy()
    x[i] = params.currents[i]
    result = objective.likelihood(x, objective.threshold_for(x))
    return NeuronDerivatives(result.value, result.gradient, 0.5 * (result.hessian + result.hessian.T),
                             result.boundary)


__all__ += ['gradient_hessian']


def infer_neuron(rec: Recording, i, params: ModelParams, options: InferenceOptions = None, *,
                 start=None, fixed=None) -> NeuronResult:
    '''
    Maximize the objective of neuron *i* by damped Newton iterations.

    Each iteration solves the regularized Newton system, then halves the step until the objective does not decrease.  In moving threshold mode the threshold table is rebuilt at the start of every iteration and held fixed during its line search.

    :param params: model scalars; its currents and couplings are not used.
    :param start: initial ``x``; zero by default.
    :param fixed: mapping of slots of ``x`` to values they are pinned at.
    '''
    options = _options(options)
    n = rec.neuron_count
    objective = _NeuronObjective(rec, i, params, options)
    if not objective.problems:
        logger.info('neuron %d: fewer than two spikes, nothing to infer', i)
        return _empty_result(i, n, params, options, 'no_intervals')
    x = np.zeros(n) if start is None else np.array(start, dtype=float)
    fixed = dict(fixed or {})
    for slot, value in fixed.items():
        x[slot] = value
    free = np.array([k for k in range(n) if k not in fixed], dtype=int)
    logger.info('neuron %d: inferring from %d intervals, %s threshold',
                i, len(objective.problems), options.mode)

    flags = set()
    converged = False
    iterations = 0
    threshold = objective.threshold_for(x)
    current = objective.objective(x, threshold)
    for iterations in range(1, options.max_iters + 1):
        if options.mode == 'moving' and iterations > 1:
            threshold = objective.threshold_for(x)
            current = objective.objective(x, threshold)
        gradient = current.gradient[free]
        if objective.gradient_norm(current, free) <= (options.gradient_tolerance
                                                        * objective.gradient_scale(current, free)):
            converged = True
            break
        step = _newton_step(gradient, current.hessian[np.ix_(free, free)], options.ridge)
        fraction = 1.0
        accepted = None
        for halving in range(MAX_HALVINGS):
            trial_x = x.copy()
            trial_x[free] += fraction * step
            try:
                trial = objective.objective(trial_x, threshold)
            except InfeasibleIsi as e:
                logger.debug('neuron %d: trial step infeasible (%s)', i, e)
                trial = None
            if trial is not None and trial.value >= current.value:
                accepted = trial_x, trial
                break
            fraction /= 2
            logger.debug('neuron %d iteration %d: halving step to %g', i, iterations, fraction)
        if accepted is None:
            flags.add('stalled')
            predicted = 0.5 * float(gradient @ step)
            converged = predicted <= options.epsilon * max(1.0, abs(current.value))
            break
        gain = accepted[1].value - current.value
        x, current = accepted
        if gain < options.epsilon:
            converged = True
            if objective.gradient_norm(current, free) > (options.gradient_tolerance
                                                         * objective.gradient_scale(current, free)):
                flags.add('stopped_on_gain')
                logger.debug('neuron %d: L* gain %g below epsilon with the gradient above tolerance',
                             i, gain)
            break
    else:
        flags.add('max_iters')

    if options.mode == 'moving':
        threshold = objective.threshold_for(x)
        current = objective.objective(x, threshold)
    likelihood_value = current.value
    if options.prior_enabled or options.cost_energy:
        likelihood_value = objective.likelihood(x, threshold, derivatives=False).value
    flags |= current.flags
    if current.boundary:
        flags.add('boundary')
    hessian = objective.to_v(0.5 * (current.hessian + current.hessian.T))
    bars = error_bars(hessian, objective.sigma)
    value, row = objective.split(x)
    gradient_norm = objective.gradient_norm(current, free)
    if not converged:
        logger.warning('neuron %d: not converged after %d iterations (gradient norm %g)',
                       i, iterations, gradient_norm)
    else:
        logger.info('neuron %d: converged in %d iterations, L*=%g', i, iterations, likelihood_value)
    if 'near_tie' in flags:
        logger.warning('neuron %d: contact candidates within the tie tolerance at the optimum', i)
    return NeuronResult(
        neuron=i, current=float(value), couplings=row,
        log_likelihood=float(likelihood_value), objective=float(current.value),
        hessian=hessian, error_bars=bars, current_error=float(bars[i] / objective.tau_v),
        tau_v=float(objective.tau_v), iterations=iterations,
        active_contacts=current.active, passive_contacts=current.passive,
        converged=converged, gradient_norm=gradient_norm, flags=frozenset(flags))


__all__ += ['infer_neuron']


def infer_all(rec: Recording, params: ModelParams, options: InferenceOptions = None,
              neurons=None) -> InferenceResult:
    '''
    Run :func:`infer_neuron` for every neuron (or those in *neurons*), in worker processes when ``options.threads > 1``.

    A neuron whose inference raises is recorded in :attr:`InferenceResult.failures`; the others are still returned.
    '''
    options = _options(options)
    if neurons is None:
        neurons = range(rec.neuron_count)
    results = {}
    failures = {}
    if options.threads > 1:
        with concurrent.futures.ProcessPoolExecutor(options.threads) as executor:
            future_to_neuron = {executor.submit(infer_neuron, rec, i, params, options): i
                                for i in neurons}
            for future in concurrent.futures.as_completed(future_to_neuron):
                i = future_to_neuron[future]
                try:
                    results[i] = future.result()
                except Exception as e:
                    logger.exception('neuron %d: inference failed', i)
                    failures[i] = str(e)
    else:
        for i in neurons:
            try:
                results[i] = infer_neuron(rec, i, params, options)
            except Exception as e:
                logger.exception('neuron %d: inference failed', i)
                failures[i] = str(e)
    return InferenceResult(rec.neuron_count, dict(sorted(results.items())), failures)


__all__ += ['infer_all']
