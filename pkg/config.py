"""Experiment configuration: a JSON document merged over defaults.json.

load_config validates every field and returns an immutable ExperimentConfig;
every problem raises ConfigError naming the dotted field.
"""
import copy
import json
import os
from collections import namedtuple
from typing import Any, Dict, Optional

from errors import ConfigError, ComputeError
from estimation import EstimatorConfig
from signals import BUILTINS
from squeeze import Variant

DEFAULTS_FILE = os.path.join(os.path.dirname(__file__), 'defaults.json')

POLICY_NAMES = ('constant', 'sigma1', 'sigma2', 'sigma_u', 'sigma_est', 'sigma_est2', 'sigma_re', 'sigma_re2')
ORACLE_POLICIES = ('sigma1', 'sigma2')
METHODS = (1, 2, 3, 4)

RidgeConfig = namedtuple('RidgeConfig', ['num_components', 'gamma_bins', 'jump_bins', 'presence'])
NoiseConfig = namedtuple('NoiseConfig', ['snr_db', 'seed'])
BenchmarkConfig = namedtuple('BenchmarkConfig', ['snr_db', 'runs', 'methods', 'baseline_sigma', 'seed'])
OutputConfig = namedtuple('OutputConfig', ['report', 'tf_pgm', 'tf_csv', 'signal_csv', 'sigma_csv'])
ExperimentConfig = namedtuple('ExperimentConfig', [
    'signal', 'sample_rate', 'duration', 'variant', 'policy', 'constant_sigma', 'epsilon', 'nfft',
    'threshold', 'estimator', 'ridges', 'noise', 'benchmark', 'workers', 'output'])


def load_defaults() -> Dict[str, Any]:
    with open(DEFAULTS_FILE) as handle:
        return json.load(handle)


def _merge(base: dict, update: dict, prefix: str = '') -> dict:
    for key, value in update.items():
        field = prefix + key
        if key not in base:
            raise ConfigError(field, 'unknown key')
        if isinstance(base[key], dict):
            if not isinstance(value, dict):
                raise ConfigError(field, 'expected a mapping')
            _merge(base[key], value, field + '.')
        else:
            base[key] = value
    return base


def _nest(overrides: Dict[str, Any]) -> dict:
    """{'a.b': 1} -> {'a': {'b': 1}}."""
    nested = {}
    for dotted, value in overrides.items():
        node = nested
        *parents, leaf = dotted.split('.')
        for key in parents:
            node = node.setdefault(key, {})
        node[leaf] = value
    return nested


def _lookup(doc: dict, field: str):
    for key in field.split('.'):
        doc = doc[key]
    return doc


def _check(value, field, low=None, high=None, optional=False, integer=False, open_low=False):
    if value is None and optional:
        return None
    kinds = (int,) if integer else (int, float)
    if isinstance(value, bool) or not isinstance(value, kinds):
        raise ConfigError(field, 'expected {}, got {!r}'.format('an integer' if integer else 'a number', value))
    if low is not None and (value < low or (open_low and value == low)):
        raise ConfigError(field, 'must be {} {}, got {}'.format('>' if open_low else '>=', low, value))
    if high is not None and value > high:
        raise ConfigError(field, 'must be <= {}, got {}'.format(high, value))
    return value


def _number(doc, field, low=None, high=None, **flags):
    return _check(_lookup(doc, field), field, low, high, **flags)


def _numbers(doc, field, **limits):
    values = _lookup(doc, field)
    if not isinstance(values, list):
        raise ConfigError(field, 'expected a list, got {!r}'.format(values))
    return [_check(value, '{}[{}]'.format(field, i), **limits) for i, value in enumerate(values)]


def _path(doc, field):
    value = _lookup(doc, field)
    if value is not None and not isinstance(value, str):
        raise ConfigError(field, 'expected a path, got {!r}'.format(value))
    return value


def _validate(doc: dict) -> ExperimentConfig:
    signal = doc['signal']
    if not isinstance(signal, str):
        raise ConfigError('signal', 'expected a builtin name or a path')
    if signal not in BUILTINS and not os.path.isfile(signal):
        raise ConfigError('signal', 'neither a builtin ({}) nor an existing file: {!r}'.format(
            ', '.join(sorted(BUILTINS)), signal))
    try:
        variant = Variant(doc['variant'])
    except ValueError:
        raise ConfigError('variant', 'unknown variant {!r}'.format(doc['variant']))
    policy = doc['policy']
    if policy not in POLICY_NAMES:
        raise ConfigError('policy', 'unknown policy {!r}, expected one of {}'.format(policy, ', '.join(POLICY_NAMES)))
    if variant.conventional and policy != 'constant':
        raise ConfigError('policy', '{} needs the constant policy, got {!r}'.format(variant.name, policy))
    if policy in ORACLE_POLICIES and signal not in BUILTINS:
        raise ConfigError('policy', '{} needs the ground truth of a builtin signal'.format(policy))

    est = doc['estimator']
    smoothing = _numbers(doc, 'estimator.smoothing')
    if not smoothing:
        raise ConfigError('estimator.smoothing', 'needs at least one tap')
    if not isinstance(est['strict_intervals'], bool):
        raise ConfigError('estimator.strict_intervals', 'expected true or false')
    epsilon = _number(doc, 'epsilon', 0, 1, open_low=True)
    if epsilon == 1:
        raise ConfigError('epsilon', 'must be < 1, got 1')
    nfft = _number(doc, 'nfft', 2, optional=True, integer=True)
    threshold = _number(doc, 'threshold', 0, 1)
    bounds = [_number(doc, 'estimator.' + name, 0, open_low=True) for name in
              ('sigma_max', 'sigma_min', 'sigma_step', 'epsilon_max', 'epsilon_min', 'epsilon_step')]
    if bounds[1] > bounds[0]:
        raise ConfigError('estimator.sigma_min', 'exceeds sigma_max')
    if bounds[4] > bounds[3]:
        raise ConfigError('estimator.epsilon_min', 'exceeds epsilon_max')
    try:
        estimator = EstimatorConfig.from_ranges(
            *bounds, epsilon=epsilon,
            gamma1=_number(doc, 'estimator.gamma1', 0, 1, open_low=True),
            renyi_ell=_number(doc, 'estimator.renyi_ell', 1, open_low=True),
            renyi_zeta=_number(doc, 'estimator.renyi_zeta', 0, integer=True),
            smoothing=smoothing, strict_intervals=est['strict_intervals'], nfft=nfft,
            threshold=threshold)
    except ComputeError as e:
        raise ConfigError('estimator', str(e))

    ridges = RidgeConfig(_number(doc, 'ridges.num_components', 1, optional=True, integer=True),
                         _number(doc, 'ridges.gamma_bins', 0, integer=True),
                         _number(doc, 'ridges.jump_bins', 0, integer=True),
                         _number(doc, 'ridges.presence', 0, 1))
    if ridges.num_components is None and signal not in BUILTINS:
        raise ConfigError('ridges.num_components', 'required for a signal read from a file')
    noise = NoiseConfig(_number(doc, 'noise.snr_db', optional=True),
                        _number(doc, 'noise.seed', 0, integer=True))
    methods = _numbers(doc, 'benchmark.methods', integer=True)
    for i, method in enumerate(methods):
        if method not in METHODS:
            raise ConfigError('benchmark.methods[{}]'.format(i), 'unknown method {}'.format(method))
    benchmark = BenchmarkConfig(_numbers(doc, 'benchmark.snr_db'),
                                _number(doc, 'benchmark.runs', 1, integer=True),
                                methods,
                                _number(doc, 'benchmark.baseline_sigma', 0, open_low=True),
                                _number(doc, 'benchmark.seed', 0, integer=True))
    if benchmark.snr_db and signal not in BUILTINS:
        raise ConfigError('benchmark.snr_db', 'the benchmark needs a builtin signal')
    output = OutputConfig(*[_path(doc, 'output.' + name) for name in OutputConfig._fields])

    return ExperimentConfig(
        signal=signal,
        sample_rate=_number(doc, 'sample_rate', 0, optional=True, open_low=True),
        duration=_number(doc, 'duration', 0, optional=True, open_low=True),
        variant=variant,
        policy=policy,
        constant_sigma=_number(doc, 'constant_sigma', 0, open_low=True),
        epsilon=epsilon,
        nfft=nfft,
        threshold=threshold,
        estimator=estimator,
        ridges=ridges,
        noise=noise,
        benchmark=benchmark,
        workers=_number(doc, 'workers', 0, integer=True),
        output=output)


def load_config(path: Optional[str] = None, overrides: Optional[Dict[str, Any]] = None) -> ExperimentConfig:
    """Defaults, then the document at `path`, then `overrides` (nested or dotted keys).

    :rtype: ExperimentConfig
    """
    doc = load_defaults()
    if path is not None:
        try:
            with open(path) as handle:
                user = json.load(handle)
        except OSError as e:
            raise ConfigError('config', 'cannot read {}: {}'.format(path, e.strerror))
        except json.JSONDecodeError as e:
            raise ConfigError('config', 'invalid JSON at line {}: {}'.format(e.lineno, e.msg))
        if not isinstance(user, dict):
            raise ConfigError('config', 'expected a JSON object')
        _merge(doc, user)
    if overrides:
        _merge(doc, _nest(overrides))
    return _validate(copy.deepcopy(doc))
