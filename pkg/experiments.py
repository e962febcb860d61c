"""Experiment harness: one configured run, and the Monte-Carlo method benchmark.

A run loads the signal, adds noise, picks sigma(t) with the configured
policy, squeezes, extracts ridges and recovers the modes. Each stage that
fails re-raises its exception prefixed with the stage name.

Benchmark methods:
    1: ADP_FSST2 with sigma_est2
    2: REGULAR_PT_ADP with sigma_re
    3: REGULAR_PT_ADP2 with sigma_re2
    4: FSST2 with a constant sigma (benchmark.baseline_sigma)
"""
import itertools
import logging
from collections import namedtuple
from concurrent.futures import ProcessPoolExecutor
from contextlib import contextmanager
from multiprocessing import cpu_count
from typing import List, Optional, Sequence, Tuple

import numpy as np

import ridges as ridge_ops
import tfio
from config import ExperimentConfig, NoiseConfig
from estimation import renyi_entropy_curve
from policies import POLICIES
from signals import BUILTINS, ComponentSpec, Signal, add_noise, component_signals, synth
from squeeze import SSTResult, Variant, synchrosqueeze
from stft import TimeVaryingParam

logger = logging.getLogger(__name__)

METHOD_SETUPS = {
    1: (Variant.ADP_FSST2, 'sigma_est2'),
    2: (Variant.REGULAR_PT_ADP, 'sigma_re'),
    3: (Variant.REGULAR_PT_ADP2, 'sigma_re2'),
    4: (Variant.FSST2, 'constant'),
}

Separation = namedtuple('Separation', ['sigma', 'sst', 'ridges', 'pairs', 'reconstructed', 'rmse'])


@contextmanager
def stage(name: str):
    logger.info('%s: started', name)
    try:
        yield
    except (ValueError, IndexError, OSError, ArithmeticError) as e:
        wrapped = e.__class__.__new__(e.__class__)
        wrapped.__dict__.update(e.__dict__)
        wrapped.args = ('{} stage: {}'.format(name, e),)
        raise wrapped from e
    logger.info('%s: finished', name)


def load_source(config: ExperimentConfig) -> Tuple[Signal, Optional[List[ComponentSpec]]]:
    """The configured signal with noise added, and its components when it is a builtin."""
    with stage('load'):
        if config.signal in BUILTINS:
            factory, sample_rate, duration = BUILTINS[config.signal]
            components = factory()
            signal = synth(components, config.sample_rate or sample_rate, config.duration or duration)
        else:
            components = None
            signal = tfio.read_signal_csv(config.signal)
    if config.noise.snr_db is not None:
        with stage('noise'):
            signal = add_noise(signal, config.noise.snr_db, config.noise.seed)
    return signal, components


def select_sigma(signal: Signal, components, config: ExperimentConfig) -> TimeVaryingParam:
    with stage('sigma'):
        return POLICIES[config.policy](signal, components, config)


def _true_components(signal: Signal, components: Sequence[ComponentSpec]) -> List[Signal]:
    return component_signals(components, signal.sample_rate, signal.duration, signal.is_complex)


def separate(signal: Signal, components, config: ExperimentConfig) -> Separation:
    sigma = select_sigma(signal, components, config)
    with stage('transform'):
        sst = synchrosqueeze(signal, sigma, config.variant, config.epsilon, config.nfft, config.threshold)
    count = config.ridges.num_components or len(components)
    with stage('ridges'):
        found = ridge_ops.extract_ridges(sst, count, config.ridges.gamma_bins,
                                         config.ridges.jump_bins, config.ridges.presence)
    with stage('reconstruct'):
        reconstructed = ridge_ops.separate(sst, found, epsilon=config.epsilon)
        pairs, score = [], None
        if components:
            pairs = ridge_ops.match_ridges(found, components)
            truth = _true_components(signal, components)
            matched = {j: reconstructed[k] for k, j in pairs}
            estimates = [matched.get(j, z.with_samples(np.zeros_like(z.samples)))
                         for j, z in enumerate(truth)]
            score = ridge_ops.rmse(truth, estimates)
    return Separation(sigma, sst, found, pairs, reconstructed, score)


def _describe_sigma(signal: Signal, sigma: TimeVaryingParam) -> dict:
    return {'time': signal.times, 'value': sigma.sigma,
            'min': sigma.sigma.min(), 'max': sigma.sigma.max(), 'mean': sigma.sigma.mean()}


def _describe_ridges(result: Separation, components) -> dict:
    described = {'count': len(result.ridges), 'exhausted': result.ridges.exhausted,
                 'present': [float(np.mean(result.ridges.present(k))) for k in range(len(result.ridges))]}
    if components:
        described['matches'] = [
            {'ridge': k, 'component': j,
             'median_if_error_bins': np.median(ridge_ops.if_error_bins(result.ridges, k, components[j]))}
            for k, j in result.pairs]
    return described


def _export(signal: Signal, sigma: TimeVaryingParam, sst: SSTResult, config: ExperimentConfig) -> dict:
    written = {}
    with stage('export'):
        output = config.output
        if output.tf_pgm:
            tfio.export_tf(sst, output.tf_pgm, 'pgm')
            written['tf_pgm'] = output.tf_pgm
        if output.tf_csv:
            tfio.export_tf(sst, output.tf_csv, 'csv')
            written['tf_csv'] = output.tf_csv
        if output.signal_csv:
            tfio.write_signal_csv(signal, output.signal_csv)
            written['signal_csv'] = output.signal_csv
        if output.sigma_csv:
            tfio.write_track_csv(signal.times, sigma.sigma, output.sigma_csv, 'sigma')
            written['sigma_csv'] = output.sigma_csv
    return written


def run_experiment(config: ExperimentConfig) -> dict:
    """Runs the configured pipeline and returns the report as a plain dict.

    :type config: ExperimentConfig
    :rtype: dict
    """
    signal, components = load_source(config)
    result = separate(signal, components, config)
    magnitude, _ = result.sst.nonnegative()
    report = {
        'signal': {'source': config.signal, 'sample_rate': signal.sample_rate, 'samples': len(signal),
                   'snr_db': config.noise.snr_db, 'seed': config.noise.seed},
        'variant': config.variant.name,
        'policy': config.policy,
        'sigma': _describe_sigma(signal, result.sigma),
        'entropy': renyi_entropy_curve(magnitude, config.estimator.renyi_zeta, config.estimator.renyi_ell),
        'ridges': _describe_ridges(result, components),
        'rmse': result.rmse,
        'artifacts': _export(signal, result.sigma, result.sst, config),
    }
    if config.benchmark.snr_db:
        with stage('benchmark'):
            report['benchmark'] = noise_sweep(config)
    return report


def method_config(config: ExperimentConfig, method: int, snr_db: float, seed: int) -> ExperimentConfig:
    variant, policy = METHOD_SETUPS[method]
    constant_sigma = config.benchmark.baseline_sigma if policy == 'constant' else config.constant_sigma
    return config._replace(variant=variant, policy=policy, constant_sigma=constant_sigma,
                           noise=NoiseConfig(snr_db, seed))


def benchmark_run(job) -> float:
    """RMSE of one (config, method, snr_db, seed) job; top level so worker processes can run it."""
    config, method, snr_db, seed = job
    run_config = method_config(config, method, snr_db, seed)
    signal, components = load_source(run_config)
    return separate(signal, components, run_config).rmse


def noise_sweep(config: ExperimentConfig) -> dict:
    """Mean RMSE per method and SNR over benchmark.runs seeded noise draws.
    Run r uses seed benchmark.seed + r for every method."""
    bench = config.benchmark
    jobs = [(config, method, snr, bench.seed + run)
            for method, snr, run in itertools.product(bench.methods, bench.snr_db, range(bench.runs))]
    workers = config.workers or cpu_count()
    logger.info('benchmark: %d jobs on %d worker(s)', len(jobs), workers)
    if workers == 1:
        scores = list(map(benchmark_run, jobs))
    else:
        with ProcessPoolExecutor(max_workers=workers) as executor:
            scores = list(executor.map(benchmark_run, jobs))
    table = np.array(scores).reshape(len(bench.methods), len(bench.snr_db), bench.runs)
    return {
        'snr_db': bench.snr_db,
        'runs': bench.runs,
        'rmse': {str(method): table[i].mean(axis=1) for i, method in enumerate(bench.methods)},
    }
