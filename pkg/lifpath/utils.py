# Copyright (C) 2018, 2019, 2020, 2021, 2022, 2026, Hadron Industries, Inc.
# Lifpath is free software; you can redistribute it and/or modify
# it under the terms of the GNU Lesser General Public License version 3
# as published by the Free Software Foundation. It is distributed
# WITHOUT ANY WARRANTY; without even the implied warranty of
# MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE. See the file
# LICENSE for details.

import argparse
import functools
import logging

import numpy as np

__all__ = []


class memoproperty:
    "A property that only supports getting and that stores the result the first time on the instance to avoid recomputation"

    def __init__(self, fun):
        functools.update_wrapper(self, fun)
        self.fun = fun
        self.name = fun.__name__

    def __get__(self, instance, owner):
        if instance is None:
            return self
        # Because we don't define set or del, we should not be called
        # if name is already set on instance.  So if we set name we
        # will be bypassed in the future
        res = self.fun(instance)
        object.__setattr__(instance, self.name, res)
        return res


__all__ += ['memoproperty']

#: exp() arguments beyond this are handled on log-scaled intermediates
EXP_LIMIT = 600.0


def decayed_cumsum(times, amplitudes, tau):
    '''
    Running sums ``S_m = sum_{l<=m} a_l exp(-(t_m - t_l)/tau)``.

    :param tau: decay time; ``numpy.inf`` gives the plain cumulative sum.

    Vectorized when the exponents stay in range, otherwise evaluated by the stable recursion ``S_m = S_{m-1} exp(-(t_m-t_{m-1})/tau) + a_m``.
    '''
    times = np.asarray(times, dtype=float)
    amplitudes = np.asarray(amplitudes, dtype=float)
    if times.size == 0:
        return np.zeros(0)
    if not np.isfinite(tau):
        return np.cumsum(amplitudes)
    span = (times[-1] - times[0]) / tau
    if span < EXP_LIMIT:
        weights = np.exp((times - times[0]) / tau)
        return np.cumsum(amplitudes * weights) / weights
    result = np.empty_like(amplitudes)
    running = 0.0
    previous = times[0]
    for m, (t, a) in enumerate(zip(times, amplitudes)):
        running = running * np.exp(-(t - previous) / tau) + a
        previous = t
        result[m] = running
    return result


__all__ += ['decayed_cumsum']


def add_lifpath_arguments(parser):
    parser.add_argument('--config',
                        metavar="file",
                        default=[],
                        type=argparse.FileType('rt'),
                        action='append',
                        help="YAML configuration; may be given more than once, later files override earlier ones")
    parser.add_argument('--verbose',
                        help="Debug logging for lifpath",
                        action=argparse.BooleanOptionalAction)
    parser.add_argument('--quiet',
                        help="Only log warnings and errors",
                        action='store_true')
    return parser


def lifpath_main_argparser(*args, **kwargs):
    parser = argparse.ArgumentParser(*args, **kwargs)
    add_lifpath_arguments(parser)
    return parser


def lifpath_main_setup(parser=None, argv=None):
    '''
    Parse arguments, load configuration and set up logging.

    :return: ``(args, layout)`` where *layout* is a :class:`~lifpath.config.ConfigLayout` with every ``--config`` file loaded.
    '''
    from .config import ConfigLayout
    if parser is None:
        parser = lifpath_main_argparser()
    args = parser.parse_args(argv)
    layout = ConfigLayout()
    for f in args.config:
        layout.load_yaml(f)
    root_logger = logging.getLogger()
    if not root_logger.handlers:
        console_handler = logging.StreamHandler()
        console_handler.setFormatter(logging.Formatter('%(name)s: %(message)s'))
        root_logger.addHandler(console_handler)
    root_logger.setLevel('INFO')
    if args.verbose:
        logging.getLogger('lifpath').setLevel(logging.DEBUG)
    elif args.quiet:
        logging.getLogger('lifpath').setLevel(logging.WARNING)
    return args, layout


__all__ += ['lifpath_main_argparser', 'lifpath_main_setup', 'add_lifpath_arguments']
