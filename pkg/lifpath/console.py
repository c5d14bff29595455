# Copyright (C) 2022, 2023, 2026, Hadron Industries, Inc.
# Lifpath is free software; you can redistribute it and/or modify
# it under the terms of the GNU Lesser General Public License version 3
# as published by the Free Software Foundation. It is distributed
# WITHOUT ANY WARRANTY; without even the implied warranty of
# MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE. See the file
# LICENSE for details.

'''
The ``lifpath-runner`` entry point.

Subcommands are :class:`LifpathRunnerCommand` subclasses; defining one with a *name* registers it.  :func:`main` turns the exceptions of the library into exit codes.
'''

from __future__ import annotations
import logging
import sys

import yaml

from .config import ConfigResolutionFailed
from .core import InvalidParams, InvalidRecording
from .files import FileFormatError
from .simulate import SimulationSaturated
from .utils import lifpath_main_argparser, lifpath_main_setup

__all__ = []

logger = logging.getLogger('lifpath.console')

EXIT_OK = 0
#: Unreadable input, bad parameters or configuration
EXIT_INPUT = 2
EXIT_SATURATED = 3
#: Results were written but some neuron did not converge
EXIT_PARTIAL = 4

__all__ += ['EXIT_OK', 'EXIT_INPUT', 'EXIT_SATURATED', 'EXIT_PARTIAL']


class UnknownTask(LookupError):

    def __init__(self, task, known):
        self.task = task
        self.known = tuple(known)
        super().__init__(f'unknown task {task!r}; choose from {", ".join(self.known)}')


__all__ += ['UnknownTask']


class LifpathRunnerCommand:

    '''
    One ``lifpath-runner`` subcommand::

        class HelloCommand(LifpathRunnerCommand):

            name = 'hello'

            def setup_subparser(self, parser):
                parser.add_argument('who')

            def run(self, args, layout):
                print('hello', args.who)
                return EXIT_OK

    '''

    #: Subcommand name; subclasses without one are not registered
    name: str = None

    #: Extra arguments to be passed into .add_parser
    subparser_kwargs = {}

    _registry = {}

    def __init_subclass__(cls, **kwargs):
        super().__init_subclass__(**kwargs)
        if cls.__dict__.get('name'):
            LifpathRunnerCommand._registry[cls.name] = cls

    @classmethod
    def commands(cls):
        return dict(cls._registry)

    def setup_subparser(self, parser):
        '''Generally calls add_argument a lot.'''
        pass

    def run(self, args, layout):
        '''Called when this subcommand is selected; returns the exit code.'''
        raise NotImplementedError

    def register(self, subparser_action):
        parser = subparser_action.add_parser(self.name, **self.subparser_kwargs)
        self.setup_subparser(parser)
        parser.set_defaults(command=self)


__all__ += ['LifpathRunnerCommand']


def runner_argparser():
    from . import runner_commands  # noqa: F401 registers the commands
    parser = lifpath_main_argparser(
        prog='lifpath-runner',
        description='Simulate leaky integrate-and-fire networks and infer their couplings from spike trains')
    subparsers = parser.add_subparsers(title='commands', metavar='command', required=True)
    for name, command_class in sorted(LifpathRunnerCommand.commands().items()):
        command_class().register(subparsers)
    return parser


def main(argv=None):
    '''
    Run one subcommand and return its exit code.
    '''
    parser = runner_argparser()
    try:
        args, layout = lifpath_main_setup(parser, argv)
    except (AttributeError, ValueError, OSError, yaml.YAMLError) as e:
        # unknown keys, bad values or an unreadable include
        logger.error('configuration: %s', e)
        return EXIT_INPUT
    try:
        return args.command.run(args, layout)
    except (FileFormatError, InvalidParams, InvalidRecording, UnknownTask,
            ConfigResolutionFailed, FileNotFoundError) as e:
        logger.error('%s', e)
        return EXIT_INPUT
    except SimulationSaturated as e:
        logger.error('%s', e)
        return EXIT_SATURATED


if __name__ == '__main__':
    sys.exit(main())
