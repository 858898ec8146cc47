import argparse
import hashlib
import json
import os
import random
from dataclasses import asdict, dataclass, field
from datetime import datetime

import numpy as np
import yaml
from pytz import timezone

from specfun_utils import FracwaveError


SCHEMA = 'fracwave/1'
EXPERIMENTS = ('limiting_amplitude_operator', 'limiting_amplitude_r3', 'stabilization',
               'subordination_check', 'kernel_validation', 'specfun_eval')
SPECFUN_NAMES = ('mittag_leffler', 'mittag_leffler_on_ray', 'wright_phi', 'wright_density',
                 'macdonald_k', 'principal_power')
SOURCE_KINDS = ('gaussian_bump', 'ball_indicator', 'multi_bump')
DEFAULT_TOLERANCES = {
    'residual': 1e-2,
    'amplitude': 5e-2,
    'exponent': 0.15,
    'subordination': 1e-4,
    'laplace': 1e-6,
    'ball': 1e-3,
    'mass': 1e-6,
}


class ConfigError(FracwaveError, ValueError):
    def __init__(self, field, message):
        super().__init__(field+': '+message)
        self.field = field


class InvariantError(FracwaveError, AssertionError):
    def __init__(self, invariant, message=None):
        super().__init__(message or 'invariant violated: '+invariant)
        self.invariant = invariant


def parse_args(argv=None):
    parser = argparse.ArgumentParser(prog='fracwave')
    subparsers = parser.add_subparsers(dest='command', required=True)

    # run an experiment from a config file
    run = subparsers.add_parser('run')
    run.add_argument('config', type=str) # .json, .yaml or .yml
    run.add_argument('--output_dir', type=str, default=None) # overrides the config; None -> set_output_dir()
    run.add_argument('--seed', type=int, default=None) # overrides the config (default 2022)
    run.add_argument('--threads', type=int, default=None) # overrides FRACWAVE_THREADS
    run.add_argument('--quiet', action='store_true') # no progress bars

    # point evaluation of a special function
    specfun = subparsers.add_parser('specfun')
    specfun.add_argument('name', type=str)
    specfun.add_argument('values', nargs='*', type=str) # complex literals like 1+2j are accepted

    # parse and validate only
    validate = subparsers.add_parser('validate')
    validate.add_argument('config', type=str)

    args = parser.parse_args(argv)
    return args


def get_curr_time():
    return datetime.now().astimezone(timezone('US/Pacific')).strftime("%d/%m/%Y %H:%M:%S")


def set_seed(seed):
    random.seed(seed)
    np.random.seed(seed)


def set_output_dir(config):
    if config.output_dir is not None:
        os.makedirs(config.output_dir, exist_ok=True)
        return
    config.output_dir = os.path.join('saved_runs', config.experiment,
                                     'alpha_'+str(config.alpha)+'_omega_'+str(config.omega)+'_seed_'+str(config.seed))
    os.makedirs(config.output_dir, exist_ok=True)


class Logger(): # write message to both output_dir/filename.txt and terminal
    def __init__(self, output_dir=None, filename=None):
        if filename is not None:
            self.log = os.path.join(output_dir, filename)

    def write(self, message, show_time=True):
        message = str(message)
        if show_time:
            if message.startswith('\n'): # if message starts with \n, print the \n first before printing time
                message = '\n'+get_curr_time()+' >> '+message[1:]
            else:
                message = get_curr_time()+' >> '+message
        print (message)
        if hasattr(self, 'log'):
            with open(self.log, 'a') as f:
                f.write(message+'\n')


# ------------------------------------------------------------------
# experiment config
def _number(path, value, kind=float):
    if isinstance(value, bool):
        raise ConfigError(path, 'expected a number, got '+repr(value))
    try:
        out = kind(value)
    except (TypeError, ValueError):
        raise ConfigError(path, 'expected a number, got '+repr(value))
    if kind is int and out != value:
        raise ConfigError(path, 'expected an integer, got '+repr(value))
    if not np.isfinite(out):
        raise ConfigError(path, 'must be finite, got '+repr(value))
    return out


def _point(path, value):
    if not isinstance(value, (list, tuple)) or len(value) != 3:
        raise ConfigError(path, 'expected a point [x, y, z], got '+repr(value))
    return [_number(path+'['+str(i)+']', v) for i, v in enumerate(value)]


def parse_complex(path, value):
    """A real number, an [re, im] pair or a complex literal such as '1-2j'."""
    if isinstance(value, (list, tuple)):
        if len(value) != 2:
            raise ConfigError(path, 'expected [re, im], got '+repr(value))
        out = complex(_number(path+'[0]', value[0]), _number(path+'[1]', value[1]))
    elif isinstance(value, str):
        try:
            out = complex(value.replace(' ', ''))
        except ValueError:
            raise ConfigError(path, 'expected a number, got '+repr(value))
    elif isinstance(value, complex):
        out = value
    else:
        out = complex(_number(path, value))
    if not (np.isfinite(out.real) and np.isfinite(out.imag)):
        raise ConfigError(path, 'must be finite, got '+repr(value))
    return out


def _weight(path, value):
    # stored as a float when real, else as [re, im]
    w = parse_complex(path, value)
    return w.real if w.imag == 0 else [w.real, w.imag]


@dataclass
class ExperimentConfig:
    experiment: str
    alpha: float
    omega: float = 1.0
    schedule: dict = field(default_factory=lambda: {'t0': 1.0, 'factor': 2.0, 'count': 12})
    sources: dict = field(default_factory=dict)
    eigenvalues: list = field(default_factory=list)
    weights: list = field(default_factory=list)
    probes: list = field(default_factory=list)
    lattice: dict = field(default_factory=lambda: {'shape': [64, 64, 64], 'spacing': 0.5})
    initial: dict = field(default_factory=dict)
    options: dict = field(default_factory=dict)
    tolerances: dict = field(default_factory=dict)
    seed: int = 2022
    output_dir: str = None

    @classmethod
    def from_dict(cls, d):
        if not isinstance(d, dict):
            raise ConfigError('<root>', 'config must be a mapping')
        if d.get('schema') != SCHEMA:
            raise ConfigError('schema', 'must be '+repr(SCHEMA)+', got '+repr(d.get('schema')))
        known = {'schema', 'experiment', 'params', 'schedule', 'sources', 'eigenvalues', 'weights', 'probes',
                 'lattice', 'initial', 'options', 'tolerances', 'seed', 'output_dir'}
        for key in d:
            if key not in known:
                raise ConfigError(key, 'unknown field')
        if 'experiment' not in d:
            raise ConfigError('experiment', 'missing')
        params = d.get('params', {})
        if not isinstance(params, dict) or 'alpha' not in params:
            raise ConfigError('params.alpha', 'missing; alpha must lie in (1, 2)')
        config = cls(experiment=d['experiment'],
                     alpha=_number('params.alpha', params['alpha']),
                     omega=_number('params.omega', params.get('omega', 1.0)))
        for key in ('schedule', 'lattice'):
            if key in d:
                setattr(config, key, dict(d[key]) if isinstance(d[key], dict) else d[key])
        for key in ('sources', 'initial', 'options', 'tolerances'):
            if key in d:
                setattr(config, key, d[key])
        for key in ('eigenvalues', 'weights', 'probes'):
            if key in d:
                setattr(config, key, d[key])
        if 'seed' in d:
            config.seed = d['seed']
        if 'output_dir' in d:
            config.output_dir = d['output_dir']
        config.validate()
        return config

    @classmethod
    def load(cls, path):
        try:
            with open(path) as f:
                if path.endswith(('.yaml', '.yml')):
                    d = yaml.safe_load(f)
                else:
                    d = json.load(f)
        except OSError as e:
            raise ConfigError('<file>', 'cannot read '+path+': '+str(e))
        except (json.JSONDecodeError, yaml.YAMLError) as e:
            raise ConfigError('<file>', 'cannot parse '+path+': '+str(e))
        return cls.from_dict(d)

    def to_dict(self):
        d = asdict(self)
        d['params'] = {'alpha': d.pop('alpha'), 'omega': d.pop('omega')}
        d['schema'] = SCHEMA
        return d

    def validate(self):
        if self.experiment not in EXPERIMENTS:
            raise ConfigError('experiment', 'must be one of '+str(EXPERIMENTS)+', got '+repr(self.experiment))
        if not (1 < self.alpha < 2):
            raise ConfigError('params.alpha', 'alpha must lie in (1, 2), got '+repr(self.alpha))
        if not self.omega > 0:
            raise ConfigError('params.omega', 'omega must be > 0, got '+repr(self.omega))

        if not isinstance(self.schedule, dict):
            raise ConfigError('schedule', 'expected a mapping with t0, factor, count')
        self.schedule = {'t0': _number('schedule.t0', self.schedule.get('t0', 1.0)),
                         'factor': _number('schedule.factor', self.schedule.get('factor', 2.0)),
                         'count': _number('schedule.count', self.schedule.get('count', 12), int)}
        if not self.schedule['t0'] > 0:
            raise ConfigError('schedule.t0', 'must be > 0')
        if not self.schedule['factor'] > 1:
            raise ConfigError('schedule.factor', 'must be > 1')
        if not self.schedule['count'] >= 1:
            raise ConfigError('schedule.count', 'must be >= 1')

        if not isinstance(self.sources, dict):
            raise ConfigError('sources', 'expected a mapping name -> source')
        for name, source in self.sources.items():
            self._validate_source('sources.'+name, source)

        self.eigenvalues = [_number('eigenvalues['+str(i)+']', v) for i, v in enumerate(self.eigenvalues)]
        self.weights = [_weight('weights['+str(i)+']', v) for i, v in enumerate(self.weights)]
        if len(self.eigenvalues) != len(self.weights):
            raise ConfigError('weights', 'must have as many entries as eigenvalues')
        for i, v in enumerate(self.eigenvalues):
            if not v > 0:
                raise ConfigError('eigenvalues['+str(i)+']', 'must be > 0, got '+repr(v))
        self.probes = [_point('probes['+str(i)+']', p) for i, p in enumerate(self.probes)]

        if not isinstance(self.lattice, dict):
            raise ConfigError('lattice', 'expected a mapping with shape and spacing')
        shape = self.lattice.get('shape', [64, 64, 64])
        if not isinstance(shape, (list, tuple)) or not 1 <= len(shape) <= 3:
            raise ConfigError('lattice.shape', 'expected 1 to 3 integers')
        shape = [_number('lattice.shape['+str(i)+']', n, int) for i, n in enumerate(shape)]
        if any(n < 2 for n in shape):
            raise ConfigError('lattice.shape', 'entries must be >= 2')
        spacing = _number('lattice.spacing', self.lattice.get('spacing', 0.5))
        if not spacing > 0:
            raise ConfigError('lattice.spacing', 'must be > 0')
        self.lattice = {'shape': shape, 'spacing': spacing}

        if not isinstance(self.initial, dict):
            raise ConfigError('initial', 'expected a mapping')
        if 'constant' in self.initial:
            self.initial['constant'] = _number('initial.constant', self.initial['constant'])
        if self.initial.get('wavevector') is not None:
            self.initial['wavevector'] = _point('initial.wavevector', self.initial['wavevector'])
        if not isinstance(self.initial.get('log_periodic', False), bool):
            raise ConfigError('initial.log_periodic', 'expected true or false')
        if not isinstance(self.options, dict):
            raise ConfigError('options', 'expected a mapping')
        if self.options.get('method', 'radial') not in ('radial', 'lattice'):
            raise ConfigError('options.method', "must be 'radial' or 'lattice'")

        if not isinstance(self.tolerances, dict):
            raise ConfigError('tolerances', 'expected a mapping name -> positive number')
        for name, value in self.tolerances.items():
            if name not in DEFAULT_TOLERANCES:
                raise ConfigError('tolerances.'+name, 'unknown tolerance')
            if not _number('tolerances.'+name, value) > 0:
                raise ConfigError('tolerances.'+name, 'must be > 0')
        self.seed = _number('seed', self.seed, int)
        if self.seed < 0:
            raise ConfigError('seed', 'must be >= 0')
        if self.output_dir is not None and not isinstance(self.output_dir, str):
            raise ConfigError('output_dir', 'expected a path')
        self._validate_experiment()

    def _validate_source(self, path, source):
        if not isinstance(source, dict):
            raise ConfigError(path, 'expected a mapping with kind, centers, scale')
        if source.get('kind') not in SOURCE_KINDS:
            raise ConfigError(path+'.kind', 'must be one of '+str(SOURCE_KINDS)+', got '+repr(source.get('kind')))
        centers = source.get('centers')
        if not isinstance(centers, list) or not centers:
            raise ConfigError(path+'.centers', 'expected a non-empty list of points')
        if source['kind'] != 'multi_bump' and len(centers) != 1:
            raise ConfigError(path+'.centers', source['kind']+' takes exactly one center')
        source['centers'] = [_point(path+'.centers['+str(i)+']', c) for i, c in enumerate(centers)]
        source['scale'] = _number(path+'.scale', source.get('scale'))
        if not source['scale'] > 0:
            raise ConfigError(path+'.scale', 'must be > 0')
        source['amplitude'] = _number(path+'.amplitude', source.get('amplitude', 1.0))

    def _validate_experiment(self):
        if self.experiment == 'limiting_amplitude_operator' and not self.eigenvalues:
            raise ConfigError('eigenvalues', 'limiting_amplitude_operator needs at least one eigenvalue')
        if self.experiment == 'limiting_amplitude_r3':
            if 'F' not in self.sources:
                raise ConfigError('sources.F', 'limiting_amplitude_r3 needs a forcing source F')
            if not self.probes:
                raise ConfigError('probes', 'limiting_amplitude_r3 needs at least one probe point')
        if self.experiment == 'stabilization' and not self.probes:
            raise ConfigError('probes', 'stabilization needs at least one probe point')
        if self.experiment == 'specfun_eval':
            if self.options.get('function') not in SPECFUN_NAMES:
                raise ConfigError('options.function', 'must be one of '+str(SPECFUN_NAMES))
            if not isinstance(self.options.get('args', []), list):
                raise ConfigError('options.args', 'expected a list')

    @property
    def t_schedule(self):
        s = self.schedule
        return [s['t0']*s['factor']**j for j in range(s['count'])]

    @property
    def complex_weights(self):
        return [complex(*w) if isinstance(w, list) else complex(w) for w in self.weights]

    def tolerance(self, name):
        return float(self.tolerances.get(name, DEFAULT_TOLERANCES[name]))


# ------------------------------------------------------------------
# outputs
def _format_float(value):
    return repr(float(value))


def write_csv(df, path):
    """CSV with shortest round-trip float representation."""
    df = df.copy()
    for col in df.columns:
        if df[col].dtype.kind == 'f':
            df[col] = df[col].map(_format_float)
    df.to_csv(path, index=False)
    return path


def sha256_file(path):
    h = hashlib.sha256()
    with open(path, 'rb') as f:
        for chunk in iter(lambda: f.read(1 << 16), b''):
            h.update(chunk)
    return h.hexdigest()


def write_manifest(config, artifacts, fitted, checks):
    manifest = {
        'schema': SCHEMA,
        'experiment': config.experiment,
        'config': config.to_dict(),
        'seed': config.seed,
        'tolerances': {name: config.tolerance(name) for name in sorted(DEFAULT_TOLERANCES)},
        'fitted': fitted,
        'checks': checks,
        'artifacts': {os.path.basename(p): sha256_file(p) for p in artifacts},
        'created': get_curr_time(),
    }
    path = os.path.join(config.output_dir, 'manifest.json')
    with open(path, 'w') as f:
        json.dump(manifest, f, indent=2, sort_keys=True, default=_json_default)
    return path


def _json_default(value):
    if isinstance(value, (np.floating, np.integer)):
        return value.item()
    if isinstance(value, np.bool_):
        return bool(value)
    raise TypeError('not JSON serialisable: '+repr(value))


def error_report(exc):
    report = {'type': type(exc).__name__, 'message': str(exc)}
    if isinstance(exc, ConfigError):
        report['field'] = exc.field
    if isinstance(exc, InvariantError):
        report['invariant'] = exc.invariant
    return report


def write_error(output_dir, exc):
    report = error_report(exc)
    if output_dir is not None and os.path.isdir(output_dir):
        with open(os.path.join(output_dir, 'error.json'), 'w') as f:
            json.dump(report, f, indent=2, sort_keys=True)
    return report
