# Copyright (C) 2026, Hadron Industries, Inc.
# Lifpath is free software; you can redistribute it and/or modify
# it under the terms of the GNU Lesser General Public License version 3
# as published by the Free Software Foundation. It is distributed
# WITHOUT ANY WARRANTY; without even the implied warranty of
# MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE. See the file
# LICENSE for details.

'''
Exact first and second derivatives of :func:`~lifpath.optpath.path_log_weight` with the contact structure of the path held fixed.

Local coordinates of an interval are ``(I, J_1, ..., J_M)`` over its merged inputs.  Every block of the path (restart to next contact) depends on them through quantities that are affine in the parameters, so each block is differentiated in a handful of primitive variables and the result pulled back through a constant Jacobian.
'''

from __future__ import annotations
import dataclasses
import logging

import numpy as np

from .optpath import OptimalPath, Block

__all__ = []

logger = logging.getLogger('lifpath.derivatives')

#: relative closeness of a passive contact to a change of the contact set that is reported as a boundary
BOUNDARY_TOLERANCE = 1e-9


@dataclasses.dataclass(frozen=True, eq=False)
class IsiDerivatives:

    gradient: np.ndarray
    hessian: np.ndarray
    #: some derivative is one-sided because the path sits on a change of its contact set
    boundary: bool = False


__all__ += ['IsiDerivatives']


def _add_inputs(row, events, span, weights):
    "Add *weights* to the entries of *row* belonging to the input events in *span*"
    slots = events.inputs[span]
    present = slots >= 0
    row[slots[present] + 1] += np.asarray(weights)[present]


def _free_block(path: OptimalPath, block: Block, gradient, hessian):
    ev = path.events
    a, e = block.start, block.end
    t_a, t_b = ev.times[a], ev.times[e]
    C = path.capacitance
    slope = np.zeros(gradient.size)
    inner = np.arange(a + 1, e)
    if path.leaky:
        g, tau = path.conductance, path.tau
        s = (t_b - t_a) / tau
        slope[0] = -np.expm1(-s) / g
        _add_inputs(slope, ev, inner, np.exp(-(t_b - ev.times[inner]) / tau) / C)
        start_weight = np.exp(-s) / C
        end_gain = 2 * g / -np.expm1(-2 * s)
    else:
        slope[0] = (t_b - t_a) / C
        _add_inputs(slope, ev, inner, np.full(inner.size, 1 / C))
        start_weight = 1 / C
        end_gain = C / (t_b - t_a)
    if block.end_side == 'post' and ev.inputs[e] >= 0:
        slope[ev.inputs[e] + 1] += 1 / C
    if block.start_side == 'pre' and ev.inputs[a] >= 0:
        slope[ev.inputs[a] + 1] += start_weight
    gradient += C * block.end_noise * slope
    hessian -= C * end_gain * np.outer(slope, slope)


def _passive_block(path: OptimalPath, block: Block, gradient, hessian):
    '''
    A block made of a free stretch up to the tangency, the passive contact, and the release towards the next contact.

    Its weight is ``F(h, eta, u)`` with ``h = g theta - I`` the pinned noise, *eta* the tangency coefficient and *u* the exit angle; *eta* depends on ``q = g A - I`` and *h*, *u* on ``W / D``.
    '''
    ev = path.events
    g, tau, C, current = path.conductance, path.tau, path.capacitance, path.current
    a, k, l = block.start, block.gap, block.end
    t_a, t_l = ev.times[a], ev.times[l]
    level = ev.levels[k]
    h = g * level - current
    n = gradient.size
    boundary = False

    jacobian = np.zeros((4, n))
    jacobian[:, 0] = (-1.0, -1.0, -1 / g, -1 / g)
    span = np.arange(a + 1, k + 1)
    growth = np.exp((ev.times[span] - t_a) / tau)
    _add_inputs(jacobian[1], ev, span, g / C * growth)
    if block.start_side == 'pre' and ev.inputs[a] >= 0:
        jacobian[1, ev.inputs[a] + 1] += g / C
    span_after = np.arange(k + 1, l)
    _add_inputs(jacobian[2], ev, span_after, -np.exp(-(t_l - ev.times[span_after]) / tau) / C)
    if block.end_side == 'post' and ev.inputs[l] >= 0:
        jacobian[2, ev.inputs[l] + 1] -= 1 / C

    anchored = block.v_start + np.sum(ev.jumps[span] * growth)
    q = g * anchored - current
    radicand = (q - h) * (q + h)
    structural_pin = block.start_side == 'post' and k == a
    if structural_pin or radicand <= (BOUNDARY_TOLERANCE * h) ** 2:
        boundary = boundary or not structural_pin
        eta, log_ratio = h, 0.0
        eta_h, eta_q, eta_hh, eta_qh, eta_qq = 1.0, 0.0, 0.0, 0.0, 0.0
    else:
        root = np.sqrt(radicand)
        sign = np.sign(q)
        eta = h * h / (q + sign * root)
        log_ratio = np.log(h / eta)
        eta_q = 1 - abs(q) / root
        eta_h = sign * h / root
        eta_qq = sign * h * h / root ** 3
        eta_qh = -abs(q) * h / root ** 3
        eta_hh = sign * q * q / root ** 3

    u = block.exit_angle
    e2u = np.exp(2 * u)
    w = np.cosh(u)
    distance = level - current / g
    fixed_exit = (l == k + 1 and block.end_side == 'pre')
    if fixed_exit or w - 1 <= BOUNDARY_TOLERANCE:
        boundary = boundary or not fixed_exit
        du, d2u = 0.0, 0.0
    else:
        du = 1 / np.sinh(u)
        d2u = -w / np.sinh(u) ** 3

    pinned = t_l - t_a - tau * u - tau * log_ratio
    weight_y = np.array([
        -h * pinned - h * tau / 2 * (e2u - 1),
        tau / 2 * (eta - h * h / eta),
        -h * h * tau / 2 * (e2u - 1)])
    hessian_y = np.array([
        [-pinned + tau - tau / 2 * (e2u - 1), -h * tau / eta, h * tau * (1 - e2u)],
        [-h * tau / eta, tau / 2 * (1 + h * h / (eta * eta)), 0.0],
        [h * tau * (1 - e2u), 0.0, -h * h * tau * e2u]])

    w_W, w_D = 1 / distance, -w / distance
    w_WD, w_DD = -1 / distance ** 2, 2 * w / distance ** 2
    to_y = np.array([
        [1.0, 0.0, 0.0, 0.0],
        [eta_h, eta_q, 0.0, 0.0],
        [0.0, 0.0, du * w_W, du * w_D]])
    eta_curvature = np.zeros((4, 4))
    eta_curvature[:2, :2] = [[eta_hh, eta_qh], [eta_qh, eta_qq]]
    w_gradient = np.array([0.0, 0.0, w_W, w_D])
    w_curvature = np.zeros((4, 4))
    w_curvature[2:, 2:] = [[0.0, w_WD], [w_WD, w_DD]]
    u_curvature = d2u * np.outer(w_gradient, w_gradient) + du * w_curvature

    weight_p = to_y.T @ weight_y
    hessian_p = (to_y.T @ hessian_y @ to_y
                 + weight_y[1] * eta_curvature
                 + weight_y[2] * u_curvature)
    gradient += jacobian.T @ weight_p
    hessian += jacobian.T @ hessian_p @ jacobian
    return boundary


def isi_derivatives(path: OptimalPath) -> IsiDerivatives:
    '''
    Gradient and Hessian of the path's log weight in the interval's local coordinates ``(I, J_1, ..., J_M)``.
    '''
    n = path.problem.input_count + 1
    gradient = np.zeros(n)
    hessian = np.zeros((n, n))
    boundary = False
    for block in path.blocks:
        if block.gap is None:
            _free_block(path, block, gradient, hessian)
        else:
            boundary = _passive_block(path, block, gradient, hessian) or boundary
    if boundary:
        logger.debug('neuron %s interval %s: one-sided derivatives at a contact change',
                     path.problem.neuron, path.problem.index)
    return IsiDerivatives(gradient, 0.5 * (hessian + hessian.T), boundary)


__all__ += ['isi_derivatives']
