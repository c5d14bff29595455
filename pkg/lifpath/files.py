# Copyright (C) 2026, Hadron Industries, Inc.
# Lifpath is free software; you can redistribute it and/or modify
# it under the terms of the GNU Lesser General Public License version 3
# as published by the Free Software Foundation. It is distributed
# WITHOUT ANY WARRANTY; without even the implied warranty of
# MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE. See the file
# LICENSE for details.

'''
Reading and writing the files exchanged by the runner commands.

Spike files are text.  Header lines start with ``#``; ``# neurons N`` and ``# duration T`` are required, other header lines are kept as comments.  Each body line is ``neuron<TAB>time`` with times in seconds, sorted by time.

Model and result files are JSON with the units in the key names.  Every output gets a run manifest beside it, ``<output>.manifest.json``.
'''

from __future__ import annotations
import dataclasses
import hashlib
import json
import logging
import os
import typing
from pathlib import Path

import numpy as np

from .core import ModelParams, Recording
from .infer import InferenceResult, NeuronResult

__all__ = []

logger = logging.getLogger('lifpath.files')


class FileFormatError(ValueError):

    def __init__(self, message, path=None, line=None):
        self.path = path
        self.line = line
        where = ''
        if path is not None:
            where = f'{path}:{line}: ' if line is not None else f'{path}: '
        super().__init__(where + message)


__all__ += ['FileFormatError']


def read_spikes(path) -> Recording:
    '''
    Parse a spike file.

    :raises FileFormatError: naming the offending line.
    '''
    path = Path(path)
    header = {}
    neurons, times = [], []
    last = -np.inf
    with path.open('rt') as f:
        for number, line in enumerate(f, start=1):
            text = line.strip()
            if not text:
                continue
            if text.startswith('#'):
                key, _, value = text[1:].strip().partition(' ')
                if key in ('neurons', 'duration'):
                    try:
                        header[key] = int(value) if key == 'neurons' else float(value)
                    except ValueError:
                        raise FileFormatError(f'bad {key} header {value!r}', path, number) from None
                continue
            fields = text.split('\t')
            if len(fields) != 2:
                raise FileFormatError('expected neuron<TAB>time', path, number)
            try:
                neuron, time = int(fields[0]), float(fields[1])
            except ValueError:
                raise FileFormatError(f'cannot parse {text!r}', path, number) from None
            if time < last:
                raise FileFormatError('spike times are not sorted', path, number)
            last = time
            neurons.append(neuron)
            times.append(time)
    for key in ('neurons', 'duration'):
        if key not in header:
            raise FileFormatError(f'missing "# {key}" header', path)
    neurons = np.array(neurons, dtype=int)
    if neurons.size and (neurons.min() < 0 or neurons.max() >= header['neurons']):
        raise FileFormatError('neuron index out of range', path)
    return Recording.from_events(neurons, np.array(times, dtype=float),
                                 neuron_count=header['neurons'], duration=header['duration'])


def write_spikes(path, rec: Recording, comments=()):
    "Write *rec* as a spike file; float times are written with full precision"
    times, neurons = rec.events
    with Path(path).open('wt') as f:
        f.write(f'# neurons {rec.neuron_count}\n')
        f.write(f'# duration {rec.duration!r}\n')
        for comment in comments:
            f.write(f'# {comment}\n')
        for neuron, time in zip(neurons, times):
            f.write(f'{int(neuron)}\t{float(time)!r}\n')


__all__ += ['read_spikes', 'write_spikes']


_model_keys = {
    'capacitance': 'capacitance_farad',
    'conductance': 'conductance_siemens',
    'threshold': 'threshold_volt',
    'noise_std': 'noise_std_ampere_sqrt_second',
    'currents': 'currents_ampere',
    'couplings': 'couplings_coulomb',
    'tau_r': 'refractory_second',
    'tau_d': 'delay_second',
}


def model_to_dict(params: ModelParams):
    result = {'neurons': params.neuron_count}
    for field, key in _model_keys.items():
        value = getattr(params, field)
        result[key] = value.tolist() if isinstance(value, np.ndarray) else float(value)
    return result


def model_from_dict(data, path=None) -> ModelParams:
    if not isinstance(data, dict):
        raise FileFormatError('model must be an object', path)
    missing = [key for key in _model_keys.values() if key not in data]
    if missing:
        raise FileFormatError(f'missing keys {", ".join(missing)}', path)
    values = {field: data[key] for field, key in _model_keys.items()}
    if 'neurons' in data and len(values['currents']) != data['neurons']:
        raise FileFormatError(f'{len(values["currents"])} currents for {data["neurons"]} neurons', path)
    try:
        values['currents'] = np.asarray(values['currents'], dtype=float)
        values['couplings'] = np.asarray(values['couplings'], dtype=float)
    except (TypeError, ValueError) as e:
        raise FileFormatError(str(e), path) from None
    return ModelParams(**values)


def read_model(path) -> ModelParams:
    try:
        with Path(path).open('rt') as f:
            data = json.load(f)
    except json.JSONDecodeError as e:
        raise FileFormatError(e.msg, path, e.lineno) from None
    return model_from_dict(data, path)


def write_model(path, params: ModelParams):
    with Path(path).open('wt') as f:
        json.dump(model_to_dict(params), f, indent=1)
        f.write('\n')


__all__ += ['model_to_dict', 'model_from_dict', 'read_model', 'write_model']


def _finite_or_none(values):
    "JSON has no infinities; they are written as null"
    array = np.asarray(values, dtype=float)
    return np.where(np.isfinite(array), array, None).tolist()


def _from_json_floats(values):
    return np.array([np.inf if v is None else v for v in np.ravel(values)], dtype=float).reshape(np.shape(values))


def result_to_dict(result: InferenceResult, params: ModelParams, manifest=None):
    neurons = []
    for i, r in result.neurons.items():
        neurons.append({
            'neuron': i,
            'current_ampere': r.current,
            'couplings_coulomb': r.couplings.tolist(),
            'log_likelihood': r.log_likelihood,
            'objective': r.objective,
            'hessian': r.hessian.tolist(),
            'error_bars_coulomb': _finite_or_none(r.error_bars),
            'current_error_ampere': _finite_or_none([r.current_error])[0],
            'tau_v_second': r.tau_v,
            'iterations': r.iterations,
            'active_contacts': r.active_contacts,
            'passive_contacts': r.passive_contacts,
            'converged': r.converged,
            'gradient_norm': r.gradient_norm,
            'flags': sorted(r.flags),
        })
    model = model_to_dict(params)
    del model['currents_ampere'], model['couplings_coulomb']
    return {
        'model': model,
        'neurons': neurons,
        'failures': {str(i): message for i, message in result.failures.items()},
        'manifest': manifest,
    }


def read_result(path):
    '''
    :return: ``(result, params)`` where *params* carries the inferred currents and couplings, NaN for failed neurons.
    '''
    try:
        with Path(path).open('rt') as f:
            data = json.load(f)
    except json.JSONDecodeError as e:
        raise FileFormatError(e.msg, path, e.lineno) from None
    try:
        model = data['model']
        n = model['neurons']
        neurons = {}
        for entry in data['neurons']:
            i = entry['neuron']
            current_error = entry['current_error_ampere']
            neurons[i] = NeuronResult(
                neuron=i, current=entry['current_ampere'],
                couplings=np.asarray(entry['couplings_coulomb'], dtype=float),
                log_likelihood=entry['log_likelihood'], objective=entry.get('objective', entry['log_likelihood']),
                hessian=np.asarray(entry['hessian'], dtype=float),
                error_bars=_from_json_floats(entry['error_bars_coulomb']),
                current_error=np.inf if current_error is None else current_error,
                tau_v=entry['tau_v_second'], iterations=entry['iterations'],
                active_contacts=entry['active_contacts'], passive_contacts=entry['passive_contacts'],
                converged=entry['converged'], gradient_norm=entry.get('gradient_norm', 0.0),
                flags=frozenset(entry['flags']))
        failures = {int(k): v for k, v in data.get('failures', {}).items()}
    except (KeyError, TypeError) as e:
        raise FileFormatError(f'malformed result: {e}', path) from None
    result = InferenceResult(n, dict(sorted(neurons.items())), failures)
    model = dict(model, currents_ampere=np.nan_to_num(result.currents).tolist(),
                 couplings_coulomb=np.nan_to_num(result.couplings).tolist())
    return result, model_from_dict(model, path)


def write_result(path, result: InferenceResult, params: ModelParams, manifest=None):
    with Path(path).open('wt') as f:
        json.dump(result_to_dict(result, params, manifest), f, indent=1)
        f.write('\n')


__all__ += ['result_to_dict', 'read_result', 'write_result']


def write_table(path, header, rows):
    "Comma separated values with one header row"
    np.savetxt(path, np.array(rows, dtype=object), fmt='%s', delimiter=',',
               header=','.join(header), comments='')


def read_table(path):
    "The header and the rows of *path*, every cell as a string"
    cells = np.loadtxt(path, dtype=str, delimiter=',', comments=None, ndmin=2)
    return cells[0].tolist(), cells[1:].tolist()


__all__ += ['write_table', 'read_table']


def sha256_file(path):
    digest = hashlib.sha256()
    with Path(path).open('rb') as f:
        for block in iter(lambda: f.read(1 << 16), b''):
            digest.update(block)
    return digest.hexdigest()


@dataclasses.dataclass
class RunManifest:

    command: str
    config: dict
    seeds: typing.List[int]
    version: str
    wall_time: float = 0.0
    inputs: typing.Dict[str, str] = dataclasses.field(default_factory=dict)
    outputs: typing.Dict[str, str] = dataclasses.field(default_factory=dict)

    def add_input(self, path):
        self.inputs[os.fspath(path)] = sha256_file(path)

    def add_output(self, path):
        self.outputs[os.fspath(path)] = sha256_file(path)

    def to_dict(self):
        return dataclasses.asdict(self)


def manifest_path(output, layout=None):
    '''
    Where the manifest of *output* goes.

    With a *layout*, its ``manifest_name`` is resolved with ``output`` set; otherwise ``<output>.manifest.json``.
    '''
    if layout is None:
        return Path(os.fspath(output) + '.manifest.json')
    layout = layout.copy()
    layout.output = os.fspath(output)
    return Path(layout.manifest_name)


def write_manifest(output, manifest: RunManifest, layout=None):
    "Write the manifest of *output* and return its path"
    path = manifest_path(output, layout)
    with path.open('wt') as f:
        json.dump(manifest.to_dict(), f, indent=1, default=str)
        f.write('\n')
    return path


def read_manifest(path):
    with Path(path).open('rt') as f:
        return RunManifest(**json.load(f))


__all__ += ['sha256_file', 'RunManifest', 'manifest_path', 'write_manifest', 'read_manifest']
