import math
import unittest

import numpy as np
from numpy.polynomial import Polynomial

import signals
from errors import DomainError, RangeError
from signals import ComponentSpec, Harmonic, Signal


class TestSignal(unittest.TestCase):
    def test_validation(self):
        with self.assertRaises(DomainError):
            Signal(np.zeros((2, 2)), 100.0)
        with self.assertRaises(DomainError):
            Signal([1.0], 100.0)
        with self.assertRaises(DomainError):
            Signal([1.0, 2.0], 0.0)

    def test_grid(self):
        s = Signal(np.arange(4), 2.0, 1.0)
        self.assertTrue(np.allclose(s.times, [1.0, 1.5, 2.0, 2.5]))
        self.assertEqual(2.0, s.duration)
        self.assertFalse(s.is_complex)
        self.assertTrue(Signal(np.ones(4) * 1j, 2.0).is_complex)

    def test_eq(self):
        self.assertEqual(Signal([1, 2], 10.0), Signal([1.0, 2.0], 10.0))
        self.assertNotEqual(Signal([1, 2], 10.0), Signal([1, 2], 20.0))
        self.assertNotEqual(Signal([1, 2], 10.0), Signal([1, 3], 10.0))


class TestComponents(unittest.TestCase):
    def test_lfm_derivatives(self):
        spec = ComponentSpec.lfm(59.0, 100.0, support=(0.5, 1.0), origin=0.5)
        t = np.linspace(0.5, 1.0, 11)
        self.assertTrue(np.allclose(spec.frequency_at(t), 59.0 + 100.0 * (t - 0.5)))
        self.assertTrue(np.allclose(spec.chirp_rate_at(t), 100.0))

    def test_harmonic_frequency_matches_phase(self):
        'phi\' agrees with a central difference of phi'
        spec = signals.three_component()[1]
        t = np.linspace(0.05, 0.95, 19)
        h = 1e-6
        numeric = (spec.phase_at(t + h) - spec.phase_at(t - h)) / (2 * h)
        self.assertTrue(np.allclose(numeric, spec.frequency_at(t), atol=1e-4))
        self.assertTrue(np.allclose(spec.frequency_at(t), 47 + 110 * t + 26 * np.cos(4 * math.pi * t)))
        numeric_rate = (spec.frequency_at(t + h) - spec.frequency_at(t - h)) / (2 * h)
        self.assertTrue(np.allclose(numeric_rate, spec.chirp_rate_at(t), atol=1e-3))

    def test_zero_outside_support(self):
        spec = ComponentSpec.lfm(10.0, 0.0, support=(0.25, 0.5))
        t = np.array([0.0, 0.3, 0.75])
        values = spec.evaluate(t)
        self.assertEqual(0.0, values[0])
        self.assertEqual(0.0, values[2])
        self.assertNotEqual(0.0, values[1])

    def test_callable_amplitude(self):
        spec = ComponentSpec(Polynomial([0.0, 5.0]), amplitude=lambda t: np.exp(-t))
        t = np.array([0.0, 1.0])
        self.assertTrue(np.allclose(np.abs(spec.evaluate(t, analytic=True)), np.exp(-t)))

    def test_invalid_support(self):
        with self.assertRaises(DomainError):
            ComponentSpec.lfm(1.0, 1.0, support=(1.0, 0.0))

    def test_ground_truth_outside_support(self):
        spec = signals.three_component()[0]
        with self.assertRaises(RangeError):
            signals.ground_truth_if(spec, 0.2)
        with self.assertRaises(RangeError):
            signals.ground_truth_chirp_rate(spec, [0.6, 0.2])
        self.assertAlmostEqual(69.0, float(signals.ground_truth_if(spec, 0.6)))

    def test_ground_truth_tracks(self):
        components = signals.three_component()
        ifs, rates = signals.ground_truth_tracks(components, [0.2, 0.9])
        self.assertEqual(2, len(ifs[0]))
        self.assertEqual(2, len(ifs[1]))
        for values in ifs:
            self.assertTrue(np.all(np.diff(values) > 0))
        self.assertAlmostEqual(99.0, ifs[1][0])
        self.assertAlmostEqual(100.0, rates[1][0])

    def test_two_chirp(self):
        components = signals.two_chirp()
        t = np.linspace(0, 1, 5)
        self.assertTrue(np.allclose(components[0].frequency_at(t), 12 + 50 * t))
        self.assertTrue(np.allclose(components[1].frequency_at(t), 34 + 64 * t))

    def test_harmonic_tuple(self):
        self.assertEqual(Harmonic(1.0, 2.0, 0.0), ComponentSpec(Polynomial([0.0]), harmonics=[(1.0, 2.0, 0.0)]).harmonics[0])

    def test_phase_polynomial_is_kept(self):
        phase = Polynomial([0.0, 12.0, 25.0])
        spec = ComponentSpec(phase)
        self.assertIs(phase, spec.phase)
        self.assertTrue(np.allclose(spec.phase_at([0.0, 1.0]), [0.0, 37.0]))
        self.assertEqual(spec.phase, ComponentSpec([0.0, 12.0, 25.0]).phase)


class TestSynth(unittest.TestCase):
    def test_synth_sums_components(self):
        components = signals.two_chirp()
        total = signals.synth(components, 256.0, 1.0)
        parts = signals.component_signals(components, 256.0, 1.0)
        self.assertEqual(256, len(total))
        self.assertTrue(np.allclose(total.samples, parts[0].samples + parts[1].samples))

    def test_builtin_signals(self):
        'Every builtin signal synthesises at its own rate'
        for name, (factory, sample_rate, duration) in signals.BUILTINS.items():
            signal = signals.synth(factory(), sample_rate, duration)
            self.assertEqual(int(sample_rate * duration), len(signal), name)
            self.assertTrue(np.all(np.isfinite(signal.samples)), name)
            self.assertGreater(signal.power, 0, name)

    def test_synth_needs_components(self):
        with self.assertRaises(DomainError):
            signals.synth([], 256.0, 1.0)

    def test_analytic(self):
        s = signals.synth([ComponentSpec.lfm(10.0, 0.0)], 100.0, 1.0, analytic=True)
        self.assertTrue(s.is_complex)
        self.assertTrue(np.allclose(np.abs(s.samples), 1.0))


class TestNoise(unittest.TestCase):
    def test_realised_snr(self):
        clean = signals.synth(signals.two_chirp(), 256.0, 1.0)
        for snr in (0.0, 10.0, 20.0):
            noisy = signals.add_noise(clean, snr, seed=3)
            noise_power = np.mean((noisy.samples - clean.samples) ** 2)
            self.assertAlmostEqual(snr, 10 * math.log10(clean.power / noise_power), places=9)

    def test_seeded(self):
        clean = signals.synth(signals.two_chirp(), 256.0, 1.0)
        self.assertEqual(signals.add_noise(clean, 5.0, 1), signals.add_noise(clean, 5.0, 1))
        self.assertNotEqual(signals.add_noise(clean, 5.0, 1), signals.add_noise(clean, 5.0, 2))

    def test_complex_noise(self):
        clean = signals.synth(signals.two_chirp(), 256.0, 1.0, analytic=True)
        noise = signals.add_noise(clean, 5.0, 0).samples - clean.samples
        self.assertTrue(np.any(noise.imag != 0))

    def test_zero_power(self):
        with self.assertRaises(DomainError):
            signals.add_noise(Signal(np.zeros(8), 8.0), 10.0, 0)
