import math
import unittest

import numpy as np

import signals
import stft
import window
from errors import DomainError, ResolutionError
from signals import ComponentSpec, Signal
from stft import TimeVaryingParam
from window import WindowKind


def interior(times, low, high):
    return (times >= low) & (times <= high)


class TestTimeVaryingParam(unittest.TestCase):
    def test_constant(self):
        param = TimeVaryingParam.constant(0.05, 10)
        self.assertTrue(param.is_constant)
        self.assertTrue(np.all(param.sigma_prime == 0))

    def test_from_sigma(self):
        t = np.arange(100) / 100.0
        param = TimeVaryingParam.from_sigma(0.04 + 0.01 * t, 100.0)
        self.assertTrue(np.allclose(param.sigma_prime, 0.01))
        self.assertFalse(param.is_constant)

    def test_positive(self):
        with self.assertRaises(DomainError):
            TimeVaryingParam([0.1, 0.0], [0.0, 0.0])
        with self.assertRaises(DomainError):
            TimeVaryingParam([0.1, 0.1], [0.0])


class TestAdaptiveSTFT(unittest.TestCase):
    def test_matches_closed_form(self):
        'Numeric transform of a complex LFM equals the closed form away from the ends'
        fs, sigma = 256.0, 0.05
        signal = signals.synth([ComponentSpec.lfm(34.0, 64.0)], fs, 1.0, analytic=True)
        tf = stft.adaptive_stft(signal, TimeVaryingParam.constant(sigma, len(signal)))
        rows = interior(tf.time_grid, 0.25, 0.75)
        t = tf.time_grid[rows][:, None]
        exact = stft.lfm_stft_closed_form(1.0, 34.0, 64.0, sigma, t, tf.freq_grid[None, :])
        error = np.abs(tf.values[rows] - exact).max() / np.abs(exact).max()
        self.assertLess(error, 1e-3)

    def test_grids(self):
        real = signals.synth(signals.two_chirp(), 256.0, 1.0)
        tf = stft.adaptive_stft(real, TimeVaryingParam.constant(0.05, 256))
        self.assertEqual((256, 129), tf.shape)
        self.assertEqual(128.0, tf.freq_grid[-1])
        self.assertTrue(tf.onesided)

        analytic = signals.synth(signals.two_chirp(), 256.0, 1.0, analytic=True)
        tf = stft.adaptive_stft(analytic, TimeVaryingParam.constant(0.05, 256), nfft=128)
        self.assertEqual((256, 128), tf.shape)
        self.assertEqual(-128.0, tf.freq_grid[0])
        self.assertTrue(np.all(np.diff(tf.freq_grid) > 0))
        self.assertFalse(tf.onesided)

    def test_round_trip_time_varying(self):
        'reconstruct_full inverts the transform for a smooth sigma(t) in [0.02, 0.06]'
        signal = signals.synth(signals.two_chirp(), 256.0, 1.0)
        sigma = TimeVaryingParam.from_sigma(0.04 + 0.02 * np.sin(2 * math.pi * signal.times), 256.0)
        recovered = stft.reconstruct_full(stft.adaptive_stft(signal, sigma))
        rows = interior(signal.times, 0.1, 0.9)
        error = np.linalg.norm(recovered.samples[rows] - signal.samples[rows]) / np.linalg.norm(signal.samples[rows])
        self.assertLess(error, 1e-2)
        self.assertTrue(np.allclose(recovered.samples, signal.samples, atol=1e-9))

    def test_round_trip_complex(self):
        signal = signals.synth(signals.two_chirp(), 256.0, 1.0, analytic=True)
        sigma = TimeVaryingParam.constant(0.03, len(signal))
        recovered = stft.reconstruct_full(stft.adaptive_stft(signal, sigma))
        self.assertTrue(recovered.is_complex)
        self.assertTrue(np.allclose(recovered.samples, signal.samples, atol=1e-9))

    def test_time_derivative_matches_finite_difference(self):
        fs = 1024.0
        components = [ComponentSpec.lfm(5.0, 0.0), ComponentSpec.lfm(8.0, 6.0, amplitude=0.5)]
        signal = signals.synth(components, fs, 2.0)
        sigma = TimeVaryingParam.from_sigma(0.05 + 0.01 * np.sin(2 * math.pi * signal.times), fs)
        V = stft.adaptive_stft(signal, sigma, nfft=256)
        dV = stft.stft_time_derivative(signal, sigma, nfft=256)
        numeric = np.gradient(V.values, 1.0 / fs, axis=0)
        rows = interior(signal.times, 0.6, 1.4)
        cells = np.abs(V.values[rows]) > 1e-2 * np.abs(V.values[rows]).max()
        error = np.abs(numeric[rows] - dV.values[rows])[cells].max()
        self.assertLess(error, 1e-2 * np.abs(dV.values[rows]).max())

    def test_bundle_shares_grids(self):
        signal = signals.synth(signals.two_chirp(), 256.0, 1.0)
        bundle = stft.transform_bundle(signal, TimeVaryingParam.constant(0.05, 256))
        for tf in bundle:
            self.assertTrue(bundle.V.same_grid(tf))
        self.assertIs(WindowKind.TAU_G, bundle.V_tau_g.kind)
        self.assertIsNone(bundle.dV_dt.kind)

    def test_sigma_length_mismatch(self):
        signal = signals.synth(signals.two_chirp(), 256.0, 1.0)
        with self.assertRaises(DomainError):
            stft.adaptive_stft(signal, TimeVaryingParam.constant(0.05, 100))

    def test_complex_signal_needs_full_band(self):
        signal = signals.synth(signals.two_chirp(), 256.0, 1.0, analytic=True)
        with self.assertRaises(DomainError):
            stft.adaptive_stft(signal, TimeVaryingParam.constant(0.05, 256), onesided=True)

    def test_under_resolved(self):
        signal = Signal(np.ones(100), 100.0)
        with self.assertRaises(ResolutionError):
            stft.adaptive_stft(signal, TimeVaryingParam.constant(0.001, 100))

    def test_reconstruction_needs_g_transform(self):
        signal = signals.synth(signals.two_chirp(), 256.0, 1.0)
        tf = stft.adaptive_stft(signal, TimeVaryingParam.constant(0.05, 256), kind=WindowKind.TAU_G)
        with self.assertRaises(DomainError):
            stft.reconstruct_full(tf)

    def test_recovery_weights(self):
        self.assertListEqual([1.0, 2.0, 2.0, 1.0], list(stft.recovery_weights(4, 6, True)))
        self.assertListEqual([1.0, 2.0, 2.0], list(stft.recovery_weights(3, 5, True)))
        self.assertListEqual([1.0] * 5, list(stft.recovery_weights(5, 5, False)))


class TestTransformProperties(unittest.TestCase):
    def setUp(self):
        self.times = np.arange(256) / 256.0
        self.sigma = TimeVaryingParam.from_sigma(0.04 + 0.01 * np.sin(2 * math.pi * self.times), 256.0)

    def test_linearity(self):
        x = signals.synth([signals.two_chirp()[0]], 256.0, 1.0)
        y = signals.synth([signals.two_chirp()[1]], 256.0, 1.0)
        both = stft.adaptive_stft(x.with_samples(x.samples + 2.5 * y.samples), self.sigma)
        parts = stft.adaptive_stft(x, self.sigma).values + 2.5 * stft.adaptive_stft(y, self.sigma).values
        self.assertTrue(np.allclose(both.values, parts, rtol=0, atol=1e-12))

    def test_conjugate_symmetry_of_real_input(self):
        'On the two-sided band V(t, -eta) = conj V(t, eta) for a real signal'
        signal = signals.synth(signals.two_chirp(), 256.0, 1.0)
        tf = stft.adaptive_stft(signal, self.sigma, onesided=False)
        self.assertEqual(-128.0, tf.freq_grid[0])
        self.assertTrue(np.allclose(tf.values[:, 1:], np.conj(tf.values[:, :0:-1]), rtol=0, atol=1e-12))

    def test_ridge_width_matches_support_law(self):
        'Bins above epsilon times the ridge value span 2 alpha sqrt(1/sigma^2 + (2 pi r sigma)^2)'
        signal = signals.synth([ComponentSpec.lfm(34.0, 64.0)], 256.0, 1.0, analytic=True)
        alpha = window.alpha_from_epsilon(0.2)
        for sigma in (0.05, 0.02):
            tf = stft.adaptive_stft(signal, TimeVaryingParam.constant(sigma, 256))
            row = np.abs(tf.values[128])
            measured = np.count_nonzero(row >= 0.2 * row.max()) * tf.freq_step
            expected = 2 * alpha * math.sqrt(1 / sigma ** 2 + (2 * math.pi * 64.0 * sigma) ** 2)
            self.assertLessEqual(abs(measured - expected), tf.freq_step, 'sigma={}'.format(sigma))
