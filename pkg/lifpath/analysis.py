# Copyright (C) 2026, Hadron Industries, Inc.
# Lifpath is free software; you can redistribute it and/or modify
# it under the terms of the GNU Lesser General Public License version 3
# as published by the Free Software Foundation. It is distributed
# WITHOUT ANY WARRANTY; without even the implied warranty of
# MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE. See the file
# LICENSE for details.

'''
Diagnostics computed from a recording and inferred parameters: error bars, marginal likelihood curves, the weak coupling spectrum of the Hessian, correlograms, latencies and comparisons between coupling matrices.

Hessians follow :mod:`lifpath.infer`: second derivatives of ``L*`` in the ``v`` coordinates, negative semidefinite, and free of the noise strength.  Functions that take *sigma* divide by ``sigma**2`` where the log-likelihood itself is meant.
'''

from __future__ import annotations
import dataclasses
import logging
import typing

import numpy as np
import scipy.linalg
import scipy.stats

from .core import ModelParams, Recording, build_isi_problems, windowed_rates

__all__ = []

logger = logging.getLogger('lifpath.analysis')


class FitRefused(ValueError):

    def __init__(self, count, needed=3):
        self.count = count
        super().__init__(f'{count} qualifying couplings; at least {needed} are needed for a fit')


__all__ += ['FitRefused']


def error_bars(hessian, sigma, *, null_tolerance=1e-12):
    '''
    Standard deviations ``sigma * sqrt(diag((-H)^-1))``.

    Directions in which ``-H`` vanishes (eigenvalues below *null_tolerance* times the largest) are left out of the inverse, and every parameter overlapping them gets an infinite error bar.
    '''
    hessian = np.asarray(hessian, dtype=float)
    n = hessian.shape[0]
    if n == 0:
        return np.zeros(0)
    curvature = -0.5 * (hessian + hessian.T)
    values, vectors = scipy.linalg.eigh(curvature)
    top = np.max(np.abs(values)) if values.size else 0.0
    if not top > 0:
        return np.full(n, np.inf)
    kept = values > null_tolerance * top
    variance = (vectors[:, kept] ** 2) @ (1 / values[kept])
    null_weight = np.sum(vectors[:, ~kept] ** 2, axis=1)
    bars = sigma * np.sqrt(variance)
    bars[null_weight > 1e-8] = np.inf
    if not np.all(kept):
        logger.debug('%d null directions in the Hessian', int(np.sum(~kept)))
    return bars


__all__ += ['error_bars']


@dataclasses.dataclass(frozen=True, eq=False)
class MarginalCurve:

    '''
    ``L_c(value)``: the objective re-maximized over every other parameter with one slot pinned at each grid value.
    '''

    slot: int
    grid: np.ndarray
    values: np.ndarray
    converged: np.ndarray
    #: index of the largest value
    peak: int
    #: second derivatives at the peak from the left and right neighbours; NaN at the grid ends
    curvature_left: float
    curvature_right: float
    asymmetric: bool
    #: ``sigma / sqrt(-curvature)`` from the central second difference at the peak
    error_bar: float

    @property
    def maximizer(self):
        return float(self.grid[self.peak])


def _second_difference(x, y):
    "Second derivative of the parabola through three points"
    (x0, x1, x2), (y0, y1, y2) = x, y
    return 2 * ((y2 - y1) / (x2 - x1) - (y1 - y0) / (x1 - x0)) / (x2 - x0)


def marginal_log_likelihood(rec: Recording, i, slot, grid, params: ModelParams, options=None, *,
                            sigma=None, asymmetry_tolerance=0.2):
    '''
    The marginal log-likelihood curve of neuron *i* for the parameter in *slot* (``i`` for the current, ``j`` for ``J_ij``).

    :param grid: ascending values to pin the parameter at; should span the optimum.
    '''
    from .infer import InferenceOptions, infer_neuron
    options = InferenceOptions() if options is None else options
    grid = np.asarray(grid, dtype=float)
    values = np.empty(grid.size)
    converged = np.zeros(grid.size, dtype=bool)
    start = None
    for k, value in enumerate(grid):
        result = infer_neuron(rec, i, params, options, start=start, fixed={slot: value})
        values[k] = result.objective
        converged[k] = result.converged
        start = result.couplings.copy()
        start[i] = result.current
        if not result.converged:
            logger.warning('marginal curve of neuron %d slot %d: point %g did not converge', i, slot, value)
    peak = int(np.argmax(values))
    left = right = central = np.nan
    if peak >= 2:
        left = _second_difference(grid[peak - 2:peak + 1], values[peak - 2:peak + 1])
    if peak + 2 < grid.size:
        right = _second_difference(grid[peak:peak + 3], values[peak:peak + 3])
    if 1 <= peak < grid.size - 1:
        central = _second_difference(grid[peak - 1:peak + 2], values[peak - 1:peak + 2])
    asymmetric = False
    if np.isfinite(left) and np.isfinite(right):
        asymmetric = abs(left - right) > asymmetry_tolerance * max(abs(left), abs(right))
    if asymmetric:
        logger.info('marginal curve of neuron %d slot %d: left and right curvatures %g and %g differ',
                    i, slot, left, right)
    sigma = params.noise_std if sigma is None else sigma
    bar = sigma / np.sqrt(-central) if central < 0 else np.inf
    return MarginalCurve(slot, grid, values, converged, peak, float(left), float(right),
                         bool(asymmetric), float(bar))


__all__ += ['MarginalCurve', 'marginal_log_likelihood']


def _interval_inputs(rec: Recording, i, params: ModelParams = None, window=0.0):
    "For each interval of neuron *i*: its duration, the raw input times and their sources, and its end"
    n = rec.neuron_count
    if params is None:
        params = ModelParams(1.0, 0.0, 1.0, 0.0, np.zeros(n), np.zeros((n, n)))
    for problem in build_isi_problems(rec, params, i, window):
        yield problem.duration, problem.times[problem.slots], problem.sources, problem.t_end


def weak_coupling_hessian(rec: Recording, i, tau, sigma=1.0, *, time_unit=None, params=None):
    '''
    Closed form Hessian of ``L*_i / sigma**2`` in ``v`` coordinates for an interval structure without contacts::

        H = -1/sigma^2 sum_k mu_k phi_k phi_k^T,   mu_k = (2/tau) / (1 - exp(-2 Delta_k/tau))

    with ``phi_k,j`` the decayed count of spikes of j in interval k and ``phi_k,i = (tau/time_unit) (1 - exp(-Delta_k/tau))``.  With the default ``sigma = 1`` this is the Hessian reported by inference at zero couplings.

    :param tau: leak time; ``inf`` takes the perfect integrator limit.
    :param time_unit: the time multiplying the current in the ``v`` coordinates; defaults to *tau*.
    :param params: supplies the refractory period and delay used to select inputs.
    '''
    time_unit = tau if time_unit is None else time_unit
    if not np.isfinite(time_unit):
        raise ValueError('the perfect integrator limit needs a finite time_unit')
    n = rec.neuron_count
    hessian = np.zeros((n, n))
    for duration, times, sources, t_end in _interval_inputs(rec, i, params):
        phi = np.zeros(n)
        if np.isfinite(tau):
            s = duration / tau
            mu = (2 / tau) / -np.expm1(-2 * s)
            phi[i] = tau / time_unit * -np.expm1(-s)
            np.add.at(phi, sources, np.exp(-(t_end - times) / tau))
        else:
            mu = 1 / duration
            phi[i] = duration / time_unit
            np.add.at(phi, sources, 1.0)
        hessian -= mu * np.outer(phi, phi)
    return hessian / sigma ** 2


__all__ += ['weak_coupling_hessian']


def rate_covariance_hessian(rec: Recording, i, tau, sigma=1.0, *, params=None):
    '''
    Large tau form of :func:`weak_coupling_hessian`, ``-(T/sigma^2) (f f^T + diag(omega))``, where f are the rates inside the intervals of *i* (``f_i = 1/tau``) and omega their duration weighted variances.

    :return: ``(hessian, rates, omega)``.
    '''
    n = rec.neuron_count
    T = rec.duration
    rows, weights = [], []
    for duration, times, sources, t_end in _interval_inputs(rec, i, params):
        counts = np.bincount(sources, minlength=n).astype(float) if sources.size else np.zeros(n)
        rows.append(counts / duration)
        weights.append(duration)
    if not rows:
        return np.zeros((n, n)), np.zeros(n), np.zeros(n)
    local = np.array(rows)
    weights = np.array(weights) / T
    rates = weights @ local
    omega = weights @ (local - rates) ** 2
    rates[i] = 1 / tau
    omega[i] = 0.0
    hessian = -(T / sigma ** 2) * (np.outer(rates, rates) + np.diag(omega))
    return hessian, rates, omega


__all__ += ['rate_covariance_hessian']


@dataclasses.dataclass(frozen=True, eq=False)
class EigenReport:

    #: eigenvalues of ``-H / sigma^2`` in descending order
    eigenvalues: np.ndarray
    v_max: np.ndarray
    v_min: np.ndarray
    predicted_max: float
    predicted_min: float
    #: squared overlap of v_max with the normalized rate vector
    max_overlap: float
    #: squared current component of v_min
    min_overlap: float
    rates: np.ndarray
    omega: np.ndarray
    #: predicted small components of v_min
    epsilon: np.ndarray
    #: the leak time is long compared with the intervals, where the predictions apply
    in_regime: bool
    #: some eigenvalue is negative beyond rounding
    indefinite: bool

    @property
    def lambda_max(self):
        return float(self.eigenvalues[0])

    @property
    def lambda_min(self):
        return float(self.eigenvalues[-1])


def eigen_report(hessian, rec: Recording, i, tau, sigma=1.0, *, regime_factor=10.0, params=None):
    '''
    Compare the spectrum of ``-H / sigma^2`` with the weak coupling predictions::

        lambda_max = T/sigma^2 sum_j f_j^2
        lambda_min = T / (sigma^2 tau^2 (1 + sum_{j != i} f_j^2 / omega_j))

    :param tau: the time multiplying the current in the ``v`` coordinates of *hessian*.
    :param regime_factor: predictions are in regime when tau exceeds this many mean intervals of *i*.
    '''
    matrix = -0.5 * (np.asarray(hessian) + np.asarray(hessian).T) / sigma ** 2
    values, vectors = scipy.linalg.eigh(matrix)
    order = np.argsort(values)[::-1]
    values, vectors = values[order], vectors[:, order]
    scale = max(np.max(np.abs(values)), np.finfo(float).tiny)
    indefinite = bool(values[-1] < -1e-8 * scale)
    _, rates, omega = rate_covariance_hessian(rec, i, tau, sigma, params=params)
    T = rec.duration
    predicted_max = T / sigma ** 2 * float(np.sum(rates ** 2))
    others = np.arange(rec.neuron_count) != i
    with np.errstate(divide='ignore', invalid='ignore'):
        ratio = np.where(omega[others] > 0, rates[others] ** 2 / omega[others], np.inf)
    predicted_min = T / (sigma ** 2 * tau ** 2 * (1 + np.sum(ratio)))
    epsilon = np.zeros(rec.neuron_count)
    with np.errstate(divide='ignore', invalid='ignore'):
        epsilon[others] = rates[others] * tau * sigma ** 2 * predicted_min / (omega[others] * T)
    v_max, v_min = vectors[:, 0], vectors[:, -1]
    unit_rates = rates / np.linalg.norm(rates)
    train = rec.trains[i]
    mean_isi = (train[-1] - train[0]) / (train.size - 1) if train.size > 1 else np.inf
    in_regime = bool(tau >= regime_factor * mean_isi and np.all(omega[others] > 0))
    if not in_regime:
        logger.info('neuron %d: eigenvalue predictions outside the weak coupling, long leak regime', i)
    return EigenReport(
        eigenvalues=values, v_max=v_max, v_min=v_min,
        predicted_max=predicted_max, predicted_min=float(predicted_min),
        max_overlap=float((v_max @ unit_rates) ** 2), min_overlap=float(v_min[i] ** 2),
        rates=rates, omega=omega, epsilon=epsilon,
        in_regime=in_regime, indefinite=indefinite)


__all__ += ['EigenReport', 'eigen_report']


def windowed_rate(rec: Recording, i, j, tau):
    "``f_j^{i,tau}``, see :func:`lifpath.core.windowed_rates`"
    if i == j:
        return 0.0
    return float(windowed_rates(rec, i, tau)[j])


def windowed_effective_current(rec: Recording, i, current, couplings_row, tau):
    "``I_i + sum_j J_ij f_j^{i,tau}``"
    row = np.array(couplings_row, dtype=float)
    row[i] = 0.0
    return float(current + row @ windowed_rates(rec, i, tau))


__all__ += ['windowed_rate', 'windowed_effective_current']


def potential_fluctuation(delta, tau, sigma_bar):
    '''
    Relative standard deviation of the potential at the middle of an interval of length *delta*, with the threshold constraint relaxed::

        sigma_bar sqrt(tanh(delta / (2 tau)) / 2)

    This is the sum of the odd sine modes of the pinned fluctuation (:func:`lifpath.oracle.fourier_bridge_variance`) and the exact midpoint variance of an Ornstein-Uhlenbeck bridge.  Long intervals tend to ``sigma_bar / sqrt(2)``.
    '''
    return sigma_bar * np.sqrt(np.tanh(np.asarray(delta) / (2 * tau)) / 2)


def model_fluctuation(delta, params: ModelParams):
    '''
    :func:`potential_fluctuation` from dimensional parameters; for the perfect integrator it is the Brownian bridge value ``sqrt(sigma^2 delta / 4) / (C V_th)``.
    '''
    C, g, v_th = params.capacitance, params.conductance, params.threshold
    if g == 0:
        return params.noise_std * np.sqrt(np.asarray(delta) / 4) / (C * v_th)
    return potential_fluctuation(delta, params.tau, params.noise_std / (v_th * np.sqrt(g * C)))


@dataclasses.dataclass(frozen=True, eq=False)
class FluctuationSummary:

    values: np.ndarray
    mean: float
    #: fraction of intervals whose fluctuation is below the limit
    fraction_below: float
    limit: float


def dataset_fluctuation(rec: Recording, tau, sigma_bar, *, limit=0.1):
    '''
    :func:`potential_fluctuation` over every interval of the recording; a noise level is acceptable when the mean stays below *limit*.
    '''
    deltas = np.concatenate([np.diff(t) for t in rec.trains] + [np.zeros(0)])
    values = potential_fluctuation(deltas, tau, sigma_bar)
    if values.size == 0:
        return FluctuationSummary(values, np.nan, np.nan, limit)
    return FluctuationSummary(values, float(values.mean()), float(np.mean(values < limit)), limit)


def noise_ratio(current, capacitance, threshold, sigma):
    "``r = sigma / sqrt(I C V_th)``"
    return sigma / np.sqrt(np.asarray(current) * capacitance * threshold)


__all__ += ['potential_fluctuation', 'model_fluctuation', 'FluctuationSummary',
            'dataset_fluctuation', 'noise_ratio']


@dataclasses.dataclass(frozen=True, eq=False)
class HistogramSeries:

    edges: np.ndarray
    counts: np.ndarray
    #: how :attr:`normalized` is scaled; ``tail`` divides by the mean count in the outer bins
    normalization: str = 'tail'
    scale: float = np.nan

    @property
    def centers(self):
        return 0.5 * (self.edges[:-1] + self.edges[1:])

    @property
    def normalized(self):
        if not self.scale > 0:
            return np.zeros(self.counts.size)
        return self.counts / self.scale


def cross_correlogram(rec: Recording, i, j, bin_width, window, *, tail=0.2):
    '''
    Histogram ``H_ij(t)`` of the delays ``t_ik - t_jl`` with ``|t| <= window``.

    Bins are symmetric about zero.  The normalization is the mean count of the bins in the outer *tail* fraction of the window on both sides.
    '''
    if not bin_width > 0:
        raise ValueError('bin width must be positive')
    bins = int(np.ceil(window / bin_width))
    edges = np.arange(-bins, bins + 1) * bin_width
    post, pre = rec.trains[i], rec.trains[j]
    if post.size == 0 or pre.size == 0:
        return HistogramSeries(edges, np.zeros(edges.size - 1, dtype=int), 'tail', np.nan)
    low = np.searchsorted(pre, post - window, side='left')
    high = np.searchsorted(pre, post + window, side='right')
    delays = np.concatenate([t - pre[a:b] for t, a, b in zip(post, low, high)])
    counts, _ = np.histogram(delays, edges)
    centers = 0.5 * (edges[:-1] + edges[1:])
    outer = np.abs(centers) >= (1 - tail) * window
    scale = float(counts[outer].mean()) if np.any(outer) else np.nan
    return HistogramSeries(edges, counts, 'tail', scale)


__all__ += ['HistogramSeries', 'cross_correlogram']


def latency_matrix(rec: Recording):
    '''
    ``latency[i, j]``: the smallest delay from a spike of j to the next spike of i, over the spikes of j strictly inside intervals of i.  Pairs without such a spike, and the diagonal, are ``inf``.
    '''
    n = rec.neuron_count
    latency = np.full((n, n), np.inf)
    for i, train in enumerate(rec.trains):
        if train.size < 2:
            continue
        for j, other in enumerate(rec.trains):
            if j == i or other.size == 0:
                continue
            following = np.searchsorted(train, other, side='right')
            inside = (following >= 1) & (following < train.size)
            inside[inside] &= train[following[inside] - 1] < other[inside]
            if np.any(inside):
                latency[i, j] = float(np.min(train[following[inside]] - other[inside]))
    return latency


@dataclasses.dataclass(frozen=True)
class LatencyFit:

    slope: float
    intercept: float
    rvalue: float
    count: int


def latency_coupling_scaling(couplings_by_tau: typing.Mapping[float, np.ndarray], latency, *,
                             threshold=-0.1, unit=1.0):
    '''
    Fit ``log(-J_ij) = slope * latency_ij / tau + intercept`` over the strongly negative couplings inferred at several leak times.

    :param couplings_by_tau: leak time to inferred coupling matrix.
    :param threshold: couplings below ``threshold * unit`` enter the fit.
    :raises FitRefused: with fewer than three qualifying couplings.
    '''
    latency = np.asarray(latency, dtype=float)
    off_diagonal = ~np.eye(latency.shape[0], dtype=bool)
    xs, ys = [], []
    for tau, couplings in couplings_by_tau.items():
        couplings = np.asarray(couplings, dtype=float)
        chosen = off_diagonal & (couplings < threshold * unit) & np.isfinite(latency)
        xs.append(latency[chosen] / tau)
        ys.append(np.log(-couplings[chosen] / unit))
    x = np.concatenate(xs) if xs else np.zeros(0)
    y = np.concatenate(ys) if ys else np.zeros(0)
    if x.size < 3:
        raise FitRefused(int(x.size))
    fit = scipy.stats.linregress(x, y)
    return LatencyFit(float(fit.slope), float(fit.intercept), float(fit.rvalue), int(x.size))


__all__ += ['latency_matrix', 'LatencyFit', 'latency_coupling_scaling']


def coupling_correlation(couplings, other):
    '''
    ``R = cov(J, J') / sqrt(cov(J, J) cov(J', J'))`` over the off-diagonal entries; NaN when either matrix has no variance.
    '''
    a = np.asarray(couplings, dtype=float)
    b = np.asarray(other, dtype=float)
    if a.shape != b.shape:
        raise ValueError('coupling matrices differ in shape')
    n = a.shape[0]
    mask = ~np.eye(n, dtype=bool)
    a, b = a[mask], b[mask]
    pairs = n * (n - 1)

    def cov(x, y):
        return pairs * np.sum(x * y) - np.sum(x) * np.sum(y)

    denominator = cov(a, a) * cov(b, b)
    if not denominator > 0:
        logger.warning('correlation of coupling matrices undefined: no variance')
        return np.nan
    return float(cov(a, b) / np.sqrt(denominator))


def symmetry_ratios(couplings, bars, k=3.0):
    '''
    ``rho_ij = J_ij / J_ji`` where ``|J_ji|`` exceeds *k* of its error bars, NaN elsewhere.

    :param bars: error bar matrix laid out like *couplings*.
    '''
    couplings = np.asarray(couplings, dtype=float)
    bars = np.asarray(bars, dtype=float)
    reverse = couplings.T
    significant = np.abs(reverse) > k * bars.T
    np.fill_diagonal(significant, False)
    with np.errstate(divide='ignore', invalid='ignore'):
        return np.where(significant, couplings / reverse, np.nan)


__all__ += ['coupling_correlation', 'symmetry_ratios']


@dataclasses.dataclass(frozen=True)
class InferenceErrors:

    couplings: float
    currents: float
    effective_currents: float
    #: neurons whose true current is zero, left out of the relative errors
    undefined: typing.Tuple[int, ...] = ()


def _relative_rms(inferred, true):
    usable = true != 0
    if not np.any(usable):
        return np.nan
    return float(np.sqrt(np.mean((inferred[usable] / true[usable] - 1) ** 2)))


def inference_errors(true: ModelParams, currents, couplings, rates=None):
    '''
    Root mean square inference errors.

    ``eps(J)`` runs over all ordered pairs ``i != j`` in units of ``C V_th`` and is normalized by ``N (N - 1)``; ``eps(I)`` and ``eps(I^e)`` are relative.  The effective currents need *rates* and are NaN without them.
    '''
    currents = np.asarray(currents, dtype=float)
    couplings = np.asarray(couplings, dtype=float)
    n = true.neuron_count
    unit = true.capacitance * true.threshold
    mask = ~np.eye(n, dtype=bool)
    eps_j = (float(np.sqrt(np.sum(((couplings - true.couplings)[mask] / unit) ** 2) / (n * (n - 1))))
             if n > 1 else 0.0)
    undefined = tuple(int(k) for k in np.flatnonzero(true.currents == 0))
    if undefined:
        logger.warning('relative current errors undefined for neurons %s', undefined)
    eps_i = _relative_rms(currents, true.currents)
    eps_e = np.nan
    if rates is not None:
        rates = np.asarray(rates, dtype=float)
        off = np.where(mask, couplings, 0.0)
        true_off = np.where(mask, true.couplings, 0.0)
        eps_e = _relative_rms(currents + off @ rates, true.currents + true_off @ rates)
    return InferenceErrors(eps_j, eps_i, eps_e, undefined)


__all__ += ['InferenceErrors', 'inference_errors']
