import json

import numpy as np
import pytest

import signals
import squeeze
import stft
import tfio
from errors import DomainError, ParseError
from signals import Signal
from squeeze import Variant
from stft import TimeVaryingParam


def write(path, text):
    path.write_text(text)
    return str(path)


def test_signal_round_trip(tmp_path):
    signal = signals.synth(signals.two_chirp(), 256.0, 1.0)
    path = str(tmp_path / 'signal.csv')
    tfio.write_signal_csv(signal, path)
    loaded = tfio.read_signal_csv(path)
    assert loaded.sample_rate == pytest.approx(256.0, rel=1e-12)
    assert np.array_equal(loaded.samples, signal.samples)


def test_complex_round_trip_with_rate_header(tmp_path):
    signal = signals.synth(signals.two_chirp(), 256.0, 0.5, analytic=True)
    path = str(tmp_path / 'signal.csv')
    tfio.write_signal_csv(signal, path, with_time=False)
    with open(path) as handle:
        assert handle.readline().strip() == 'sample_rate=256.0'
    loaded = tfio.read_signal_csv(path)
    assert loaded.is_complex
    assert loaded.sample_rate == 256.0
    assert np.array_equal(loaded.samples, signal.samples)


def test_headerless_time_value(tmp_path):
    path = write(tmp_path / 'plain.csv', '0.5,1\n0.75,2\n1.0,3\n')
    loaded = tfio.read_signal_csv(path)
    assert loaded.sample_rate == pytest.approx(4.0)
    assert loaded.t0 == 0.5
    assert list(loaded.samples) == [1.0, 2.0, 3.0]


def test_short_sampling_interval(tmp_path):
    'A 400-sample recording at a 7 microsecond interval keeps its rate'
    times = np.arange(400) * 7e-6
    values = np.sin(2 * np.pi * 30e3 * times)
    path = str(tmp_path / 'recording.csv')
    tfio.write_track_csv(times, values, path)
    loaded = tfio.read_signal_csv(path)
    assert len(loaded) == 400
    assert loaded.sample_rate == pytest.approx(1 / 7e-6, rel=1e-9)


@pytest.mark.parametrize('text, line', [
    ('', 1),
    ('time,value\n0,1\n0.1,2,3\n', 3),
    ('time,value\n0,1\n0.1,2\n0.1,3\n', 4),
    ('time,value\n0,1\n0.1,2\n0.3,3\n', 4),
    ('time,value\n0,1\n0.1,abc\n', 3),
    ('time,value\n0,1\n', 2),
    ('sample_rate=-5\n1\n2\n', 1),
])
def test_malformed_signal(tmp_path, text, line):
    with pytest.raises(ParseError) as info:
        tfio.read_signal_csv(write(tmp_path / 'bad.csv', text))
    assert info.value.line == line
    assert str(info.value).startswith('line {}:'.format(line))


class TestExport:
    @pytest.fixture
    def sst(self):
        signal = signals.synth(signals.two_chirp(), 64.0, 1.0)
        return squeeze.synchrosqueeze(signal, TimeVaryingParam.constant(0.1, 64), Variant.ADP_FSST2)

    def test_csv_round_trip(self, tmp_path, sst):
        path = str(tmp_path / 'sst.csv')
        tfio.export_tf(sst, path)
        magnitude, times, freqs = tfio.read_tf_csv(path)
        assert np.array_equal(magnitude, sst.magnitude())
        assert np.array_equal(times, sst.time_grid)
        assert np.array_equal(freqs, sst.out_freq_grid)

    def test_stft_csv(self, tmp_path):
        signal = signals.synth(signals.two_chirp(), 64.0, 1.0)
        tf = stft.adaptive_stft(signal, TimeVaryingParam.constant(0.1, 64))
        path = str(tmp_path / 'stft.dat')
        tfio.export_tf(tf, path, fmt='CSV')
        magnitude, _, freqs = tfio.read_tf_csv(path)
        assert magnitude.shape == tf.shape
        assert np.array_equal(freqs, tf.freq_grid)

    def test_pgm_layout(self, tmp_path):
        'Time runs left to right and frequency bottom to top'
        time_grid = np.arange(3) / 10.0
        freq_grid = np.arange(4.0)
        values = np.zeros((3, 4))
        values[0, 0] = 1.0
        values[2, 3] = 0.1
        tf = stft.TFMatrix(values, time_grid, freq_grid, sigma=TimeVaryingParam.constant(0.1, 3),
                           sample_rate=10.0, nfft=4, onesided=False)
        path = str(tmp_path / 'image.pgm')
        tfio.export_tf(tf, path)
        with open(path, 'rb') as handle:
            assert handle.readline() == b'P5\n'
            assert handle.readline() == b'3 4\n'
            assert handle.readline() == b'65535\n'
            pixels = np.frombuffer(handle.read(), dtype='>u2').reshape(4, 3)
        assert pixels[3, 0] == 65535
        assert pixels[0, 2] == int(round(0.75 * 65535))
        assert pixels[0, 0] == 0

    def test_zero_transform_is_black(self, tmp_path):
        signal = Signal(np.zeros(64), 64.0)
        sst = squeeze.synchrosqueeze(signal, TimeVaryingParam.constant(0.1, 64), Variant.FSST)
        path = str(tmp_path / 'zero.pgm')
        tfio.export_tf(sst, path)
        with open(path, 'rb') as handle:
            for _ in range(3):
                handle.readline()
            assert not any(np.frombuffer(handle.read(), dtype='>u2'))

    def test_bad_export(self, tmp_path, sst):
        with pytest.raises(DomainError):
            tfio.export_tf(sst, str(tmp_path / 'sst.png'))
        sst.energy[0, 0] = np.nan
        with pytest.raises(DomainError):
            tfio.export_tf(sst, str(tmp_path / 'sst.csv'))


def test_report_turns_nan_into_null(tmp_path):
    path = str(tmp_path / 'report.json')
    tfio.write_report({'rmse': float('nan'), 'sigma': np.array([0.1, np.inf]), 'count': np.int64(3)}, path)
    with open(path) as handle:
        assert json.load(handle) == {'count': 3, 'rmse': None, 'sigma': [0.1, None]}
