import os
import unittest

import numpy as np
import pytest

import config
import experiments
from errors import DomainError, ParseError
from squeeze import Variant


def oracle_config(**overrides):
    values = {'policy': 'sigma2', 'output.report': None}
    values.update(overrides)
    return config.load_config(overrides=values)


class TestRunExperiment(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        cls.report = experiments.run_experiment(oracle_config())

    def test_report_shape(self):
        self.assertEqual('ADP_FSST2', self.report['variant'])
        self.assertEqual('sigma2', self.report['policy'])
        self.assertEqual(256, self.report['signal']['samples'])
        self.assertEqual(256, len(self.report['entropy']))
        self.assertEqual({}, self.report['artifacts'])
        self.assertNotIn('benchmark', self.report)

    def test_ridges_follow_modes(self):
        ridges = self.report['ridges']
        self.assertEqual(2, ridges['count'])
        self.assertFalse(ridges['exhausted'])
        self.assertEqual([0, 1], sorted(match['component'] for match in ridges['matches']))
        for match in ridges['matches']:
            self.assertLessEqual(match['median_if_error_bins'], 1.0)

    def test_modes_are_recovered(self):
        self.assertLess(self.report['rmse'], 0.5)

    def test_sigma_summary(self):
        sigma = self.report['sigma']
        self.assertLessEqual(sigma['min'], sigma['mean'])
        self.assertLessEqual(sigma['mean'], sigma['max'])
        self.assertEqual(256, len(sigma['value']))


def test_artifacts_are_written(tmp_path):
    outputs = {'output.' + name: str(tmp_path / name) for name in ('tf_pgm', 'tf_csv', 'signal_csv', 'sigma_csv')}
    report = experiments.run_experiment(oracle_config(**outputs))
    assert sorted(report['artifacts']) == sorted(name.split('.')[1] for name in outputs)
    for path in outputs.values():
        assert os.path.getsize(path) > 0


def test_file_signal_without_truth(tmp_path):
    'A recording gives ridges and a report but no score'
    source = experiments.load_source(oracle_config())[0]
    path = tmp_path / 'recording.csv'
    path.write_text('time,value\n' + ''.join('{:.17g},{:.17g}\n'.format(t, v) for t, v in zip(source.times, source.samples)))
    run = config.load_config(overrides={'signal': str(path), 'ridges.num_components': 2,
                                        'policy': 'constant', 'output.report': None})
    report = experiments.run_experiment(run)
    assert report['rmse'] is None
    assert report['ridges']['count'] == 2
    assert 'matches' not in report['ridges']


def test_parse_errors_name_the_stage(tmp_path):
    path = tmp_path / 'broken.csv'
    path.write_text('time,value\n0,1\n0.1,x\n0.2,3\n')
    run = config.load_config(overrides={'signal': str(path), 'ridges.num_components': 1})
    with pytest.raises(ParseError) as info:
        experiments.load_source(run)
    assert str(info.value).startswith('load stage: line 3:')
    assert info.value.line == 3
    assert isinstance(info.value.__cause__, ParseError)


def test_stage_keeps_exception_type():
    with pytest.raises(DomainError) as info:
        with experiments.stage('sigma'):
            raise DomainError('sigma2 is undefined at every time')
    assert str(info.value) == 'sigma stage: sigma2 is undefined at every time'


def test_noise_is_seeded():
    run = oracle_config(**{'noise.snr_db': 10, 'noise.seed': 3})
    first, _ = experiments.load_source(run)
    second, _ = experiments.load_source(run)
    clean, _ = experiments.load_source(oracle_config())
    assert first == second
    assert not np.array_equal(first.samples, clean.samples)


def test_method_config():
    base = config.load_config()
    fourth = experiments.method_config(base, 4, 5.0, 7)
    assert fourth.variant is Variant.FSST2
    assert fourth.policy == 'constant'
    assert fourth.constant_sigma == base.benchmark.baseline_sigma
    assert tuple(fourth.noise) == (5.0, 7)
    first = experiments.method_config(base, 1, 5.0, 7)
    assert (first.variant, first.policy) == (Variant.ADP_FSST2, 'sigma_est2')


class TestBenchmark(unittest.TestCase):
    def setUp(self):
        self.config = config.load_config(overrides={
            'benchmark.snr_db': [0, 20], 'benchmark.runs': 2, 'benchmark.methods': [4],
            'workers': 1, 'output.report': None})

    def test_sweep(self):
        sweep = experiments.noise_sweep(self.config)
        self.assertEqual([0, 20], sweep['snr_db'])
        self.assertEqual(2, sweep['runs'])
        scores = sweep['rmse']['4']
        self.assertEqual((2,), scores.shape)
        self.assertTrue(np.all(np.isfinite(scores)))
        self.assertTrue(np.all(scores >= 0))
        self.assertTrue(np.array_equal(scores, experiments.noise_sweep(self.config)['rmse']['4']))

    def test_cleaner_signal_scores_better(self):
        scores = experiments.noise_sweep(self.config)['rmse']['4']
        self.assertLess(scores[1], scores[0])

    def test_in_report(self):
        report = experiments.run_experiment(self.config._replace(policy='sigma2'))
        self.assertIn('benchmark', report)
        self.assertEqual(['4'], list(report['benchmark']['rmse']))


def test_adaptive_method_beats_fixed_window():
    'Over five seeded runs at 10, 15 and 20 dB, ADP_FSST2 with sigma_est2 scores no worse than FSST2 at 0.01'
    run = config.load_config(overrides={
        'signal': 'three-component', 'benchmark.snr_db': [10, 15, 20], 'benchmark.runs': 5,
        'benchmark.methods': [1, 4], 'workers': 0, 'output.report': None})
    scores = experiments.noise_sweep(run)['rmse']
    assert np.all(scores['1'] <= scores['4'])
