# Copyright (C) 2026, Hadron Industries, Inc.
# Lifpath is free software; you can redistribute it and/or modify
# it under the terms of the GNU Lesser General Public License version 3
# as published by the Free Software Foundation. It is distributed
# WITHOUT ANY WARRANTY; without even the implied warranty of
# MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE. See the file
# LICENSE for details.

'''
First passage of the Ornstein-Uhlenbeck potential through a fixed threshold.

In the reduced coordinate ``z = sqrt(2 g C)/sigma (I/g - V)`` the potential obeys ``dz = -z dt/tau + sqrt(2/tau) dW`` and the threshold sits at ``alpha = z(V_th)``.  The survival probability expands over the eigenfunctions ``exp(z^2/4) D_n(z)`` of the backward generator, with orders *n* the roots of ``D_n(alpha) = 0``.

Very short delays need more terms than the orders available below ``n_max``; there the drifted Brownian image formula is used instead.
'''

from __future__ import annotations
import dataclasses
import functools
import logging

import numpy as np
import scipy.integrate
import scipy.optimize
import scipy.special

from .core import InvalidParams, ModelParams

__all__ = []

logger = logging.getLogger('lifpath.specfun')

#: |z| up to which the parabolic-cylinder functions are validated
Z_MAX = 50.0
N_MAX = 150.0


class SeriesRangeError(ValueError):

    def __init__(self, order, argument):
        self.order = order
        self.argument = argument
        super().__init__(f'D_n(z) requested outside the validated range: n={order}, z={argument}')


class EigenvalueBracketError(RuntimeError):

    def __init__(self, alpha, count, found):
        self.alpha = alpha
        self.count = count
        self.found = found
        super().__init__(f'only {found} of {count} threshold eigenvalues bracketed for alpha={alpha}')


__all__ += ['SeriesRangeError', 'EigenvalueBracketError']


@dataclasses.dataclass(frozen=True)
class OuSpec:

    '''
    A single leaky neuron driven by the constant current *current* and white noise of strength *noise_std*.
    '''

    conductance: float
    capacitance: float
    noise_std: float
    current: float
    threshold: float

    def __post_init__(self):
        if not self.conductance > 0:
            raise InvalidParams('first passage series need g > 0', field='conductance')
        if not self.noise_std > 0:
            raise InvalidParams('first passage series need sigma > 0', field='noise_std')

    @classmethod
    def from_params(cls, params: ModelParams, current):
        return cls(params.conductance, params.capacitance, params.noise_std,
                   float(current), params.threshold)

    @property
    def tau(self):
        return self.capacitance / self.conductance

    @property
    def scale(self):
        "dz/d(I/g - V)"
        return np.sqrt(2 * self.conductance * self.capacitance) / self.noise_std

    def z(self, v):
        return self.scale * (self.current / self.conductance - np.asarray(v, dtype=float))

    @property
    def alpha(self):
        return float(self.z(self.threshold))


__all__ += ['OuSpec']


def _check_range(n, z, n_max=N_MAX, z_max=Z_MAX):
    n = np.asarray(n, dtype=float)
    z = np.asarray(z, dtype=float)
    bad_n = np.ravel((n < 0) | (n > n_max))
    bad_z = np.ravel(np.abs(z) > z_max)
    if bad_n.any() or bad_z.any():
        raise SeriesRangeError(float(np.ravel(n)[np.argmax(bad_n)]),
                               float(np.ravel(z)[np.argmax(bad_z)]))
    return n, z


def weber_D(n, z, *, n_max=N_MAX, z_max=Z_MAX):
    '''
    Weber parabolic-cylinder function of real order.

    :return: ``(D_n(z), D_n'(z))``, broadcasting *n* against *z*.

    :raises SeriesRangeError: outside ``|z| <= z_max``, ``0 <= n <= n_max``.
    '''
    n, z = _check_range(n, z, n_max, z_max)
    value, derivative = scipy.special.pbdv(n, z)
    return value, derivative


def weber_D_hypergeometric(n, z):
    "D_n(z) from its confluent hypergeometric representation"
    half = z * z / 2
    first = np.sqrt(np.pi) * scipy.special.rgamma((1 - n) / 2) * scipy.special.hyp1f1(-n / 2, 0.5, half)
    second = np.sqrt(2 * np.pi) * z * scipy.special.rgamma(-n / 2) * scipy.special.hyp1f1((1 - n) / 2, 1.5, half)
    return 2 ** (n / 2) * np.exp(-half / 2) * (first - second)


def weber_D_integral(n, z):
    "D_n(z) by quadrature of its integral representation, for n > -1"
    if not n > -1:
        raise ValueError('the integral representation needs n > -1')

    def integrand(t):
        return t ** n * np.exp(-t * t / 2) * np.cos(z * t - n * np.pi / 2)

    value, _ = scipy.integrate.quad(integrand, 0, np.inf, limit=400, epsabs=1e-14, epsrel=1e-12)
    return np.sqrt(2 / np.pi) * np.exp(z * z / 4) * value


__all__ += ['weber_D', 'weber_D_hypergeometric', 'weber_D_integral']


@dataclasses.dataclass(frozen=True, eq=False)
class Spectrum:

    '''
    Threshold eigenvalues of one *alpha* with what the series need of them.

    Each eigenfunction is rescaled by its largest magnitude over the domain; *slopes* and *norms* are ``D_n'(alpha)`` and ``\\int_alpha^inf D_n^2`` in that scale.
    '''

    alpha: float
    orders: np.ndarray
    scales: np.ndarray
    slopes: np.ndarray
    norms: np.ndarray

    @property
    def count(self):
        return self.orders.size


def _bracket_roots(alpha, n_max, step):
    grid = np.concatenate([[0.0], np.arange(0.05, n_max, step)])
    with np.errstate(over='ignore', invalid='ignore'):
        values = scipy.special.pbdv(grid, alpha)[0]
    finite = np.isfinite(values)
    if not finite.all():
        # the scan stops where D_n(alpha) overflows
        stop = int(np.argmin(finite))
        grid, values = grid[:stop], values[:stop]
    changes = np.flatnonzero(np.sign(values[:-1]) * np.sign(values[1:]) < 0)
    roots = [scipy.optimize.brentq(lambda n: scipy.special.pbdv(n, alpha)[0],
                                   grid[c], grid[c + 1], xtol=1e-13, rtol=1e-14)
             for c in changes]
    return np.array(roots)


@functools.lru_cache(maxsize=256)
def _spectrum(alpha, n_max, step):
    orders = _bracket_roots(alpha, n_max, step)
    scales = np.empty(orders.size)
    slopes = np.empty(orders.size)
    norms = np.empty(orders.size)
    for k, n in enumerate(orders):
        upper = max(alpha, 0.0) + 2 * np.sqrt(n + 1) + 12.0
        probe = np.linspace(alpha, upper, 400)
        scale = np.max(np.abs(scipy.special.pbdv(n, probe)[0]))
        scales[k] = scale
        slopes[k] = scipy.special.pbdv(n, alpha)[1] / scale
        norms[k], _ = scipy.integrate.quad(
            lambda z: (scipy.special.pbdv(n, z)[0] / scale) ** 2, alpha, upper,
            limit=500, epsabs=0, epsrel=1e-11)
    logger.debug('spectrum at alpha=%g: %d orders below %g', alpha, orders.size, n_max)
    return Spectrum(alpha, orders, scales, slopes, norms)


def spectrum(alpha, *, n_max=N_MAX, step=0.25) -> Spectrum:
    "The cached :class:`Spectrum` of *alpha*"
    if abs(alpha) > Z_MAX:
        raise SeriesRangeError(0.0, alpha)
    return _spectrum(float(alpha), float(n_max), float(step))


def threshold_eigenvalues(spec, count, *, n_max=N_MAX, step=0.25):
    '''
    The first *count* orders ``n_0 < n_1 < ...`` with ``D_n(alpha) = 0``.

    :param spec: an :class:`OuSpec` or alpha itself.
    :raises EigenvalueBracketError: when fewer than *count* roots lie below *n_max*.
    '''
    alpha = spec.alpha if isinstance(spec, OuSpec) else float(spec)
    if count < 1:
        raise ValueError('count must be positive')
    found = spectrum(alpha, n_max=n_max, step=step)
    if found.count < count:
        raise EigenvalueBracketError(alpha, count, found.count)
    return found.orders[:count].copy()


__all__ += ['Spectrum', 'spectrum', 'threshold_eigenvalues']


def _terms_needed(found: Spectrum, reduced_time, truncation):
    '''
    Number of terms whose neglected tail is below *truncation*, or ``None`` when the available orders do not reach that far.
    '''
    if reduced_time <= 0:
        return None
    last_order = -np.log(truncation) / reduced_time
    if found.count == 0 or found.orders[-1] < last_order:
        return None
    return int(np.searchsorted(found.orders, last_order, side='right')) + 1


def _series_terms(found, count, reduced_time, z):
    n = found.orders[:count]
    z = np.atleast_1d(z)[:, None]
    shape = scipy.special.pbdv(n[None, :], z)[0] / found.scales[:count]
    weights = found.slopes[:count] / (n * found.norms[:count])
    envelope = np.exp((z * z - found.alpha ** 2) / 4)
    return n, envelope * shape * weights * np.exp(-n * reduced_time)


def _drifted_survival(dt, v, spec: OuSpec):
    "Survival of a Brownian motion with the drift the potential has at threshold"
    mu = (spec.current - spec.conductance * spec.threshold) / spec.capacitance
    s = spec.noise_std / spec.capacitance
    x = spec.threshold - np.asarray(v, dtype=float)
    spread = s * np.sqrt(dt)
    direct = scipy.special.ndtr((x - mu * dt) / spread)
    image = np.exp(2 * mu * x / s ** 2 + scipy.special.log_ndtr((-x - mu * dt) / spread))
    return np.clip(direct - image, 0.0, 1.0)


def survival_probability(dt, v, spec: OuSpec, terms=None, *,
                         truncation=1e-8, n_max=N_MAX, step=0.25):
    '''
    Probability that the potential started at *v* stays below threshold for a time *dt*.

    :param terms: use exactly this many series terms instead of choosing them from *truncation*.
    '''
    v = np.asarray(v, dtype=float)
    scalar = v.ndim == 0
    v = np.atleast_1d(v)
    result = np.zeros(v.size)
    below = v < spec.threshold
    if dt <= 0:
        result[below] = 1.0
        return result[0] if scalar else result
    reduced_time = dt / spec.tau
    found = spectrum(spec.alpha, n_max=n_max, step=step)
    count = min(terms, found.count) if terms is not None else _terms_needed(found, reduced_time, truncation)
    if count is None or count == 0:
        logger.debug('survival at dt/tau=%g: short-time formula', reduced_time)
        margin = 6 * spec.noise_std * np.sqrt(dt) / spec.capacitance
        far = v < spec.threshold - margin
        result[far] = 1.0
        near = below & ~far
        result[near] = _drifted_survival(dt, v[near], spec)
    else:
        z = spec.z(v)
        # beyond the validated range the potential is too far below threshold to matter
        result[below & (z > Z_MAX)] = 1.0
        inside = below & (z <= Z_MAX)
        _, contributions = _series_terms(found, count, reduced_time, z[inside])
        result[inside] = np.clip(contributions.sum(axis=1), 0.0, 1.0)
    return result[0] if scalar else result


def survival_slope_at_threshold(dt, spec: OuSpec, terms=None, *,
                                truncation=1e-8, n_max=N_MAX, step=0.25):
    '''
    ``dp_s/dV`` at the threshold; finite and negative for ``dt > 0``.
    '''
    if not dt > 0:
        raise ValueError('the slope at threshold needs dt > 0')
    reduced_time = dt / spec.tau
    found = spectrum(spec.alpha, n_max=n_max, step=step)
    count = min(terms, found.count) if terms is not None else _terms_needed(found, reduced_time, truncation)
    if count is None or count == 0:
        logger.debug('slope at dt/tau=%g: short-time formula', reduced_time)
        mu = (spec.current - spec.conductance * spec.threshold) / spec.capacitance
        s = spec.noise_std / spec.capacitance
        spread = s * np.sqrt(dt)
        c = -mu * np.sqrt(dt) / s
        density = np.exp(-c * c / 2) / np.sqrt(2 * np.pi)
        return -(2 * density / spread - 2 * mu / s ** 2 * scipy.special.ndtr(c))
    n = found.orders[:count]
    terms_sum = np.sum(found.slopes[:count] ** 2 / (n * found.norms[:count]) * np.exp(-n * reduced_time))
    return -spec.scale * terms_sum


def first_passage_density(dt, spec: OuSpec, v=0.0, terms=None, *,
                          truncation=1e-8, n_max=N_MAX, step=0.25):
    '''
    Density of the first passage time from *v* at *dt*, ``-d p_s / d dt``.
    '''
    if not dt > 0:
        return 0.0
    if v >= spec.threshold:
        return 0.0
    reduced_time = dt / spec.tau
    found = spectrum(spec.alpha, n_max=n_max, step=step)
    count = min(terms, found.count) if terms is not None else _terms_needed(found, reduced_time, truncation)
    if count is None or count == 0:
        mu = (spec.current - spec.conductance * spec.threshold) / spec.capacitance
        s = spec.noise_std / spec.capacitance
        x = spec.threshold - v
        return float(x / (s * np.sqrt(2 * np.pi * dt ** 3)) * np.exp(-(x - mu * dt) ** 2 / (2 * s * s * dt)))
    n, contributions = _series_terms(found, count, reduced_time, spec.z(v))
    return float(max(np.sum(contributions[0] * n) / spec.tau, 0.0))


def mean_first_passage_time(J, spec: OuSpec, *, v_initial=0.0):
    '''
    Mean time for the potential started at ``v_initial + J/C`` to reach threshold.
    '''
    start = v_initial + J / spec.capacitance
    if start >= spec.threshold:
        return 0.0
    z0 = float(spec.z(start))
    value, _ = scipy.integrate.quad(lambda y: scipy.special.erfcx(y / np.sqrt(2)),
                                    spec.alpha, z0, limit=200, epsrel=1e-12)
    return spec.tau * np.sqrt(np.pi / 2) * value


__all__ += ['survival_probability', 'survival_slope_at_threshold',
            'first_passage_density', 'mean_first_passage_time']
