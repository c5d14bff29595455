# Copyright (C) 2022, 2023, 2026, Hadron Industries, Inc.
# Lifpath is free software; you can redistribute it and/or modify
# it under the terms of the GNU Lesser General Public License version 3
# as published by the Free Software Foundation. It is distributed
# WITHOUT ANY WARRANTY; without even the implied warranty of
# MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE. See the file
# LICENSE for details.

from __future__ import annotations
import logging
from pathlib import Path
from timeit import default_timer as timer

import numpy as np

from . import analysis
from .bench import run_bench
from .console import EXIT_OK, EXIT_PARTIAL, LifpathRunnerCommand, UnknownTask
from .core import InvalidParams, ModelParams
from .files import (RunManifest, read_model, read_result, read_spikes, write_manifest, write_model,
                    write_result, write_spikes, write_table, manifest_path)
from .infer import InferenceOptions, infer_all
from .simulate import NetworkSpec, SimulationOptions, random_network, simulate_network

logger = logging.getLogger('lifpath.runner_commands')

#: flag destination to configuration key
_flag_keys = {
    'mode': ('infer', 'mode'),
    'epsilon': ('infer', 'epsilon'),
    'max_iters': ('infer', 'max_iters'),
    'sigma': ('infer', 'sigma'),
    'prior_jmin': ('infer', 'prior_jmin'),
    'prior_jmax': ('infer', 'prior_jmax'),
    'prior_weight': ('infer', 'prior_weight'),
    'tau_r': ('model', 'tau_r'),
    'tau_d': ('model', 'tau_d'),
    'dt': ('simulate', 'dt'),
    'seed': (None, 'seed'),
    'threads': (None, 'threads'),
}


class FileCommand(LifpathRunnerCommand):

    '''
    A command that writes files and a run manifest beside them.
    '''

    #: flags from :data:`_flag_keys` this command accepts
    flags = ('seed', 'threads')

    def setup_subparser(self, parser):
        parser.add_argument('--out', required=True, type=Path, help='Output file')
        for flag in self.flags:
            self.add_flag(parser, flag)

    @staticmethod
    def add_flag(parser, flag):
        option = '--' + flag.replace('_', '-')
        if flag == 'mode':
            parser.add_argument(option, choices=('fixed', 'moving'), help='Threshold mode')
        elif flag in ('max_iters', 'seed', 'threads'):
            parser.add_argument(option, type=int, metavar='N')
        else:
            parser.add_argument(option, type=float, metavar='X')

    def apply_flags(self, args, layout):
        "Flags given on the command line override the configuration"
        for flag in self.flags:
            value = getattr(args, flag, None)
            if value is None:
                continue
            section, key = _flag_keys[flag]
            setattr(getattr(layout, section) if section else layout, key, value)

    def start_manifest(self, layout, seeds=()):
        from . import __version__
        self._started = timer()
        return RunManifest(command=self.name, config=layout._dictify(), seeds=list(seeds),
                           version=__version__)

    def finish_manifest(self, manifest, layout, output, outputs=()):
        manifest.wall_time = timer() - self._started
        for path in (output, *outputs):
            manifest.add_output(path)
        path = write_manifest(output, manifest, layout)
        logger.info('wrote %s', path)
        return path


class NetworkCommand(FileCommand):

    name = 'network'

    subparser_kwargs = dict(help='Write a model file with random couplings')

    flags = ('seed',)

    def setup_subparser(self, parser):
        super().setup_subparser(parser)
        parser.add_argument('--neurons', type=int, required=True)
        parser.add_argument('--connection-fraction', type=float, default=0.2)
        parser.add_argument('--max-amplitude', type=float, default=0.2,
                            help='Largest |J| in units of C V_th')
        parser.add_argument('--network-mode', choices=('uniform', 'dale'), default='uniform')
        parser.add_argument('--current', type=float, default=1.0,
                            help='Current of every neuron in Ampere')

    def run(self, args, layout):
        self.apply_flags(args, layout)
        model = layout.model
        spec = NetworkSpec(args.neurons, args.connection_fraction,
                           args.max_amplitude * model.capacitance * model.threshold,
                           mode=args.network_mode, seed=layout.seed)
        params = ModelParams.from_config(layout, np.full(args.neurons, args.current), random_network(spec))
        manifest = self.start_manifest(layout, [layout.seed])
        write_model(args.out, params)
        self.finish_manifest(manifest, layout, args.out)
        return EXIT_OK


class SimulateCommand(FileCommand):

    name = 'simulate'

    subparser_kwargs = dict(help='Simulate a model file and write its spikes')

    flags = ('seed', 'dt', 'tau_r', 'tau_d')

    def setup_subparser(self, parser):
        super().setup_subparser(parser)
        parser.add_argument('model', type=Path)
        parser.add_argument('--duration', type=float, required=True, help='Seconds')

    def run(self, args, layout):
        self.apply_flags(args, layout)
        params = read_model(args.model)
        changes = {k: getattr(layout.model, k) for k in ('tau_r', 'tau_d') if getattr(args, k) is not None}
        params = params.replace(**changes)
        options = SimulationOptions.from_config(layout)
        manifest = self.start_manifest(layout, [layout.seed])
        manifest.add_input(args.model)
        rec = simulate_network(params, args.duration, seed=layout.seed, dt=options.dt,
                               max_rate=options.max_rate, integrator=options.integrator)
        name = manifest_path(args.out, layout).name
        write_spikes(args.out, rec, comments=[f'manifest {name}'])
        self.finish_manifest(manifest, layout, args.out)
        return EXIT_OK


def _model_scalars(layout, model_file, n):
    "Scalars from *model_file* when given, else from the configuration; currents and couplings zeroed"
    zeros = np.zeros(n), np.zeros((n, n))
    if model_file is None:
        return ModelParams.from_config(layout, *zeros)
    params = read_model(model_file)
    return params.replace(currents=zeros[0], couplings=zeros[1])


class InferCommand(FileCommand):

    name = 'infer'

    subparser_kwargs = dict(help='Infer currents and couplings from a spike file')

    flags = ('mode', 'epsilon', 'max_iters', 'tau_r', 'tau_d', 'sigma', 'threads',
             'prior_jmin', 'prior_jmax', 'prior_weight')

    def setup_subparser(self, parser):
        super().setup_subparser(parser)
        parser.add_argument('spikes', type=Path)
        parser.add_argument('--model', type=Path,
                            help='Take C, g, V_th and sigma from this model file instead of the configuration')

    def run(self, args, layout):
        self.apply_flags(args, layout)
        rec = read_spikes(args.spikes)
        params = _model_scalars(layout, args.model, rec.neuron_count)
        params = params.replace(**{k: getattr(layout.model, k) for k in ('tau_r', 'tau_d')
                                   if getattr(args, k) is not None})
        options = InferenceOptions.from_config(layout)
        manifest = self.start_manifest(layout)
        manifest.add_input(args.spikes)
        if args.model is not None:
            manifest.add_input(args.model)
        result = infer_all(rec, params, options)
        write_result(args.out, result, params, manifest=str(manifest_path(args.out, layout)))
        self.finish_manifest(manifest, layout, args.out)
        if not result.converged:
            unconverged = sorted(set(result.failures) | {i for i, r in result.neurons.items() if not r.converged})
            logger.warning('neurons %s did not converge', unconverged)
            return EXIT_PARTIAL
        return EXIT_OK


class AnalyzeCommand(FileCommand):

    '''
    Each task writes ``<out>-<task>.csv``.
    '''

    name = 'analyze'

    subparser_kwargs = dict(help='Analysis tables from a spike file and inference results')

    flags = ('sigma',)

    tasks = ('correlogram', 'latency', 'correlation', 'errors', 'eigen', 'marginal',
             'fluctuation', 'symmetry')

    def setup_subparser(self, parser):
        super().setup_subparser(parser)
        parser.add_argument('spikes', type=Path)
        parser.add_argument('tasks', nargs='+', metavar='task',
                            help=f'One or more of {", ".join(self.tasks)}')
        parser.add_argument('--result', type=Path, help='Result file of infer')
        parser.add_argument('--other', type=Path, help='Second result file for correlation')
        parser.add_argument('--model', type=Path, help='Model file with the true parameters')
        parser.add_argument('--tau-result', type=Path, action='append', default=[],
                            help='Result inferred at another leak time, for the latency scaling fit; may repeat')
        parser.add_argument('--bin-width', type=float, default=1e-3, help='Correlogram bin in seconds')
        parser.add_argument('--window', type=float, default=0.05, help='Correlogram half width in seconds')
        parser.add_argument('--neuron', type=int, help='Restrict correlograms to, or run marginal for, this neuron')
        parser.add_argument('--slot', type=int, help='Marginal parameter: the neuron itself for its current, else the presynaptic neuron')
        parser.add_argument('--grid-points', type=int, default=21)
        parser.add_argument('--grid-width', type=float,
                            help='Half width of the marginal grid; four error bars by default')

    def run(self, args, layout):
        self.apply_flags(args, layout)
        for task in args.tasks:
            if task not in self.tasks:
                raise UnknownTask(task, self.tasks)
        rec = read_spikes(args.spikes)
        manifest = self.start_manifest(layout)
        manifest.add_input(args.spikes)
        for path in (args.result, args.other, args.model, *args.tau_result):
            if path is not None:
                manifest.add_input(path)
        written = []
        for task in args.tasks:
            header, rows = getattr(self, 'task_' + task)(args, layout, rec)
            path = Path(f'{args.out}-{task}.csv')
            write_table(path, header, rows)
            logger.info('%s: %d rows in %s', task, len(rows), path)
            written.append(path)
        self.finish_manifest(manifest, layout, written[0], written[1:])
        return EXIT_OK

    @staticmethod
    def _require(args, *names):
        for name in names:
            if getattr(args, name) is None:
                raise InvalidParams(f'--{name.replace("_", "-")} is required by this task', field=name)

    def task_correlogram(self, args, layout, rec):
        rows = []
        posts = range(rec.neuron_count) if args.neuron is None else [args.neuron]
        for i in posts:
            for j in range(rec.neuron_count):
                if i == j:
                    continue
                h = analysis.cross_correlogram(rec, i, j, args.bin_width, args.window,
                                               tail=layout.analysis.correlogram_tail)
                rows.extend([i, j, t, c, n] for t, c, n in zip(h.centers, h.counts, h.normalized))
        return ['i', 'j', 'delay_second', 'count', 'normalized'], rows

    def task_latency(self, args, layout, rec):
        latency = analysis.latency_matrix(rec)
        rows = [[i, j, latency[i, j]] for i in range(rec.neuron_count)
                for j in range(rec.neuron_count) if i != j]
        if args.tau_result:
            couplings_by_tau = {}
            unit = None
            for path in args.tau_result:
                result, params = read_result(path)
                couplings_by_tau[params.tau] = result.couplings
                unit = params.capacitance * params.threshold
            try:
                fit = analysis.latency_coupling_scaling(
                    couplings_by_tau, latency, threshold=layout.analysis.latency_threshold, unit=unit)
                logger.info('latency scaling: slope %g intercept %g r %g over %d couplings',
                            fit.slope, fit.intercept, fit.rvalue, fit.count)
                rows.append(['fit', fit.count, fit.slope])
            except analysis.FitRefused as e:
                logger.warning('%s', e)
        return ['i', 'j', 'latency_second'], rows

    def task_correlation(self, args, layout, rec):
        self._require(args, 'result', 'other')
        first, _ = read_result(args.result)
        second, _ = read_result(args.other)
        return ['r'], [[analysis.coupling_correlation(first.couplings, second.couplings)]]

    def task_errors(self, args, layout, rec):
        self._require(args, 'result', 'model')
        result, _ = read_result(args.result)
        errors = analysis.inference_errors(read_model(args.model), result.currents, result.couplings,
                                           rates=rec.rates)
        return (['eps_couplings', 'eps_currents', 'eps_effective_currents'],
                [[errors.couplings, errors.currents, errors.effective_currents]])

    def task_eigen(self, args, layout, rec):
        self._require(args, 'result')
        result, params = read_result(args.result)
        sigma = 1.0 if args.sigma is None else args.sigma
        rows = []
        for i, r in result.neurons.items():
            if 'no_intervals' in r.flags:
                continue
            report = analysis.eigen_report(r.hessian, rec, i, r.tau_v, sigma, params=params)
            rows.append([i, report.lambda_max, report.predicted_max, report.lambda_min,
                         report.predicted_min, report.max_overlap, report.min_overlap,
                         report.in_regime, report.indefinite])
        return (['neuron', 'lambda_max', 'predicted_max', 'lambda_min', 'predicted_min',
                 'max_overlap', 'min_overlap', 'in_regime', 'indefinite'], rows)

    def task_marginal(self, args, layout, rec):
        self._require(args, 'result', 'neuron', 'slot')
        result, params = read_result(args.result)
        i, slot = args.neuron, args.slot
        r = result.neurons[i]
        centre = r.current if slot == i else r.couplings[slot]
        width = args.grid_width
        if width is None:
            bar = r.current_error if slot == i else r.error_bars[slot]
            if not np.isfinite(bar) or bar == 0:
                raise InvalidParams('no finite error bar to size the grid; give --grid-width', field='grid_width')
            width = 4 * bar
        grid = np.linspace(centre - width, centre + width, args.grid_points)
        curve = analysis.marginal_log_likelihood(
            rec, i, slot, grid, params, InferenceOptions.from_config(layout),
            sigma=args.sigma, asymmetry_tolerance=layout.analysis.asymmetry_tolerance)
        logger.info('marginal of neuron %d slot %d: maximum at %g, error bar %g', i, slot,
                    curve.maximizer, curve.error_bar)
        return (['value', 'objective', 'converged'],
                [[x, y, bool(c)] for x, y, c in zip(curve.grid, curve.values, curve.converged)])

    def task_fluctuation(self, args, layout, rec):
        params = _model_scalars(layout, args.model, rec.neuron_count)
        if args.sigma is not None:
            params = params.replace(noise_std=args.sigma)
        limit = layout.analysis.fluctuation_limit
        rows = []
        for i, train in enumerate(rec.trains):
            values = analysis.model_fluctuation(np.diff(train), params)
            if values.size:
                rows.append([i, values.size, float(values.mean()), float(np.mean(values < limit))])
        if params.conductance > 0:
            sigma_bar = params.noise_std / (params.threshold * np.sqrt(params.conductance * params.capacitance))
            summary = analysis.dataset_fluctuation(rec, params.tau, sigma_bar, limit=limit)
            rows.append(['all', summary.values.size, summary.mean, summary.fraction_below])
        return ['neuron', 'intervals', 'mean_fluctuation', 'fraction_below_limit'], rows

    def task_symmetry(self, args, layout, rec):
        self._require(args, 'result')
        result, _ = read_result(args.result)
        ratios = analysis.symmetry_ratios(result.couplings, result.error_bars,
                                          layout.analysis.symmetry_error_bars)
        n = result.neuron_count
        rows = [[i, j, ratios[i, j]] for i in range(n) for j in range(n)
                if i != j and np.isfinite(ratios[i, j])]
        return ['i', 'j', 'ratio'], rows


class BenchCommand(FileCommand):

    name = 'bench'

    subparser_kwargs = dict(help='Time inference against the number of neurons and spikes')

    def setup_subparser(self, parser):
        super().setup_subparser(parser)
        parser.add_argument('--neurons', type=int, nargs='+', help='Neuron counts; bench.neurons by default')
        parser.add_argument('--spikes', type=float, nargs='+', help='Spike counts; bench.spikes by default')
        parser.add_argument('--noise-ratio', type=float, default=0.1,
                            help='sigma / sqrt(I C V_th) of the synthetic trains')

    def run(self, args, layout):
        self.apply_flags(args, layout)
        bench = layout.bench
        model = layout.model
        charge = model.capacitance * model.threshold
        # one spike per second on average
        params = ModelParams(capacitance=model.capacitance, conductance=0.0, threshold=model.threshold,
                             noise_std=args.noise_ratio * charge,
                             currents=np.array([charge]), couplings=np.zeros((1, 1)))
        manifest = self.start_manifest(layout, [layout.seed])
        report = run_bench(args.neurons or bench.neurons, args.spikes or bench.spikes,
                           params=params, options=InferenceOptions.from_config(layout),
                           seed=layout.seed, time_budget=bench.time_budget)
        rows = [[r.sweep, r.neurons, r.spikes, r.seconds, r.skipped] for r in report.rows]
        rows.append(['neuron_exponent', '', '', report.neuron_exponent, ''])
        rows.append(['spike_exponent', '', '', report.spike_exponent, ''])
        write_table(args.out, ['sweep', 'neurons', 'spikes', 'seconds', 'skipped'], rows)
        if report.partial:
            logger.warning('time budget exceeded; the table is partial')
        self.finish_manifest(manifest, layout, args.out)
        return EXIT_OK
