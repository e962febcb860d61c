import numpy as np

import console


def sample_report(**extra):
    report = {
        'signal': {'source': 'two-chirp', 'sample_rate': 256.0, 'samples': 256, 'snr_db': None, 'seed': 0},
        'variant': 'ADP_FSST2',
        'policy': 'sigma2',
        'sigma': {'min': 0.0176, 'mean': 0.027, 'max': 0.0437},
        'ridges': {'count': 2, 'exhausted': False, 'present': [1.0, 1.0],
                   'matches': [{'ridge': 0, 'component': 1, 'median_if_error_bins': 0.5},
                               {'ridge': 1, 'component': 0, 'median_if_error_bins': 2.5}]},
        'rmse': 0.123456,
    }
    report.update(extra)
    return report


def test_signal_summary():
    text = console.show_signal(sample_report())
    assert 'two-chirp (256 samples at 256 Hz, noiseless)' in text
    assert 'ADP_FSST2 with sigma policy sigma2' in text


def test_noisy_signal_summary():
    report = sample_report()
    report['signal'].update(snr_db=10, seed=4)
    assert 'SNR 10 dB (seed 4)' in console.show_signal(report)


def test_ridge_table():
    text = console.show_ridges(sample_report())
    assert text.startswith('Ridges: 2\n')
    assert 'median IF error (bins)' in text
    assert '2.5' in text
    assert 'RMSE: 0.1235' in text


def test_exhausted_ridges_without_truth():
    report = sample_report(rmse=None)
    report['ridges'] = {'count': 1, 'exhausted': True, 'present': [0.5]}
    text = console.show_ridges(report)
    assert text == 'Ridges: 1 (residual exhausted)'


def test_benchmark_table():
    benchmark = {'snr_db': [0, 10], 'runs': 3, 'rmse': {'4': np.array([0.5, 0.25]), '1': np.array([0.4, 0.2])}}
    lines = console.show_benchmark(benchmark).splitlines()
    assert lines[0] == 'Mean RMSE over 3 run(s)'
    assert 'SNR (dB)' in lines[1]
    assert lines[3].startswith('Method 1')
    assert lines[4].startswith('Method 4')
    assert '0.25' in lines[4]


def test_full_report_has_every_section():
    benchmark = {'snr_db': [5], 'runs': 1, 'rmse': {'4': np.array([0.3])}}
    text = console.show_report(sample_report(benchmark=benchmark))
    assert text.count('\n\n') == 3
    assert 'sigma mean' in text
