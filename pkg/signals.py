"""Sampled signals, synthetic multicomponent models and their ground truth.

A component is A(t) cos(2 pi phi(t)) on a finite support, where phi is a
polynomial in (t - origin) plus a sum of cosine terms. Both derivatives of
phi are therefore known exactly, which is what the separability oracles and
the ridge scoring compare against.

Available Classes:
    - Signal: uniformly sampled real or complex series
    - ComponentSpec: one amplitude/frequency modulated mode
    - Harmonic: a cosine term of a component's phase

Available Functions:
    - synth: sums components on a sample grid
    - component_signals: each component sampled on its own
    - ground_truth_if, ground_truth_chirp_rate: analytic phi' and phi''
    - ground_truth_tracks: per-time IFs and rates of the active components
    - add_noise: white Gaussian noise at a given SNR
    - two_chirp, three_component: the builtin test signals
"""
import math
from collections import namedtuple
from typing import Callable, List, Sequence, Tuple, Union

import numpy as np
from numpy.polynomial import Polynomial

from errors import DomainError, RangeError

Harmonic = namedtuple('Harmonic', ['amplitude', 'rate', 'offset'])
Harmonic.__doc__ = 'The phase term amplitude * cos(2 pi rate t + offset), in cycles.'

Amplitude = Union[float, Callable[[np.ndarray], np.ndarray]]


class Signal:
    def __init__(self, samples, sample_rate: float, t0: float = 0.0):
        samples = np.asarray(samples)
        if samples.ndim != 1:
            raise DomainError('samples must be one dimensional, got shape {}'.format(samples.shape))
        if samples.size < 2:
            raise DomainError('a signal needs at least 2 samples, got {}'.format(samples.size))
        if not (np.isfinite(sample_rate) and sample_rate > 0):
            raise DomainError('sample_rate must be positive, got {}'.format(sample_rate))
        if not np.iscomplexobj(samples):
            samples = samples.astype(float)
        self.samples = samples
        self.sample_rate = float(sample_rate)
        self.t0 = float(t0)

    @property
    def times(self) -> np.ndarray:
        return self.t0 + np.arange(len(self)) / self.sample_rate

    @property
    def duration(self) -> float:
        return len(self) / self.sample_rate

    @property
    def is_complex(self) -> bool:
        return np.iscomplexobj(self.samples)

    @property
    def power(self) -> float:
        return float(np.mean(np.abs(self.samples) ** 2))

    def with_samples(self, samples) -> 'Signal':
        return Signal(samples, self.sample_rate, self.t0)

    def __len__(self):
        return self.samples.size

    def __eq__(self, other):
        return (isinstance(other, Signal) and
                self.sample_rate == other.sample_rate and
                self.t0 == other.t0 and
                np.array_equal(self.samples, other.samples))

    def __repr__(self):
        return 'Signal(<{} samples>, {s.sample_rate!r}, {s.t0!r})'.format(len(self), s=self)


class ComponentSpec:
    def __init__(self, phase: Polynomial, amplitude: Amplitude = 1.0,
                 support: Tuple[float, float] = (0.0, math.inf),
                 harmonics: Sequence[Harmonic] = (), origin: float = 0.0):
        if support[1] < support[0]:
            raise DomainError('support must be ordered, got {}'.format(support))
        if not callable(amplitude) and amplitude < 0:
            raise DomainError('amplitude must be non-negative, got {}'.format(amplitude))
        self.phase = phase if isinstance(phase, Polynomial) else Polynomial(phase)
        self.amplitude = amplitude
        self.support = (float(support[0]), float(support[1]))
        self.harmonics = tuple(Harmonic(*h) for h in harmonics)
        self.origin = float(origin)

    @classmethod
    def lfm(cls, c: float, r: float, amplitude: Amplitude = 1.0,
            support: Tuple[float, float] = (0.0, math.inf), origin: float = 0.0) -> 'ComponentSpec':
        """phi(t) = c (t - origin) + r (t - origin)^2 / 2."""
        return cls(Polynomial([0.0, c, r / 2.0]), amplitude, support, origin=origin)

    def active(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        return (t >= self.support[0]) & (t <= self.support[1])

    def phase_at(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        value = self.phase(t - self.origin)
        for h in self.harmonics:
            value = value + h.amplitude * np.cos(2 * math.pi * h.rate * t + h.offset)
        return value

    def frequency_at(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        value = self.phase.deriv(1)(t - self.origin)
        for h in self.harmonics:
            w = 2 * math.pi * h.rate
            value = value - h.amplitude * w * np.sin(w * t + h.offset)
        return value

    def chirp_rate_at(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        value = self.phase.deriv(2)(t - self.origin) + np.zeros_like(t)
        for h in self.harmonics:
            w = 2 * math.pi * h.rate
            value = value - h.amplitude * w * w * np.cos(w * t + h.offset)
        return value

    def amplitude_at(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        if callable(self.amplitude):
            return np.asarray(self.amplitude(t), dtype=float) + np.zeros_like(t)
        return np.full_like(t, float(self.amplitude))

    def evaluate(self, t, analytic: bool = False) -> np.ndarray:
        """Samples the component, zero outside its support."""
        t = np.asarray(t, dtype=float)
        amplitude = self.amplitude_at(t) * self.active(t)
        angle = 2 * math.pi * self.phase_at(t)
        if analytic:
            return amplitude * np.exp(1j * angle)
        return amplitude * np.cos(angle)

    def __repr__(self):
        return 'ComponentSpec({c.phase!r}, {c.amplitude!r}, {c.support!r}, {c.harmonics!r}, {c.origin!r})'.format(
            c=self)


def sample_times(sample_rate: float, duration: float) -> np.ndarray:
    count = int(round(duration * sample_rate))
    if count < 2:
        raise DomainError('duration {} at {} Hz gives fewer than 2 samples'.format(duration, sample_rate))
    return np.arange(count) / sample_rate


def synth(components: Sequence[ComponentSpec], sample_rate: float, duration: float,
          analytic: bool = False) -> Signal:
    """Sums the components sampled at n/Fs for n < duration*Fs.

    :type components: list[ComponentSpec]
    :type analytic: bool  # e^{i 2 pi phi} instead of cos(2 pi phi)
    :rtype: Signal
    """
    if not components:
        raise DomainError('synth needs at least one component')
    t = sample_times(sample_rate, duration)
    return Signal(sum(c.evaluate(t, analytic) for c in components), sample_rate)


def component_signals(components: Sequence[ComponentSpec], sample_rate: float, duration: float,
                      analytic: bool = False) -> List[Signal]:
    t = sample_times(sample_rate, duration)
    return [Signal(c.evaluate(t, analytic), sample_rate) for c in components]


def _check_support(spec: ComponentSpec, t):
    if not np.all(spec.active(t)):
        raise RangeError('t={} lies outside the support {}'.format(t, spec.support))


def ground_truth_if(spec: ComponentSpec, t):
    _check_support(spec, t)
    return spec.frequency_at(t)


def ground_truth_chirp_rate(spec: ComponentSpec, t):
    _check_support(spec, t)
    return spec.chirp_rate_at(t)


def ground_truth_tracks(components: Sequence[ComponentSpec], times) -> Tuple[List[np.ndarray], List[np.ndarray]]:
    """Per time, the IFs and chirp rates of the components active there, sorted by IF."""
    times = np.asarray(times, dtype=float)
    freqs = np.array([c.frequency_at(times) for c in components])
    rates = np.array([c.chirp_rate_at(times) for c in components])
    active = np.array([c.active(times) for c in components])
    ifs, chirp_rates = [], []
    for n in range(times.size):
        keep = active[:, n]
        order = np.argsort(freqs[keep, n], kind='stable')
        ifs.append(freqs[keep, n][order])
        chirp_rates.append(rates[keep, n][order])
    return ifs, chirp_rates


def add_noise(signal: Signal, snr_db: float, seed: int) -> Signal:
    """Adds white Gaussian noise scaled so the realised SNR equals snr_db.

    :type signal: Signal
    :type snr_db: float
    :type seed: int
    :rtype: Signal
    """
    if not np.isfinite(snr_db):
        raise DomainError('snr_db must be finite, got {}'.format(snr_db))
    power = signal.power
    if power == 0:
        raise DomainError('cannot set an SNR on a zero-power signal')
    rng = np.random.default_rng(seed)
    noise = rng.standard_normal(len(signal))
    if signal.is_complex:
        noise = noise + 1j * rng.standard_normal(len(signal))
    noise *= math.sqrt(power / (np.mean(np.abs(noise) ** 2) * 10 ** (snr_db / 10)))
    return signal.with_samples(signal.samples + noise)


def two_chirp() -> List[ComponentSpec]:
    """cos(2 pi (12t + 25t^2)) + cos(2 pi (34t + 32t^2)) on [0, 1]."""
    return [ComponentSpec.lfm(12.0, 50.0, support=(0.0, 1.0)),
            ComponentSpec.lfm(34.0, 64.0, support=(0.0, 1.0))]


def three_component() -> List[ComponentSpec]:
    """Three modes with different supports, one with a sinusoidal IF."""
    return [
        ComponentSpec.lfm(59.0, 100.0, support=(0.5, 1.0), origin=0.5),
        ComponentSpec(Polynomial([0.0, 47.0, 55.0]), support=(0.0, 1.0),
                      harmonics=[Harmonic(13.0 / (2 * math.pi), 2.0, -math.pi / 2)]),
        ComponentSpec.lfm(97.0, 112.0, support=(0.0, 0.75)),
    ]


# name -> (component factory, sample rate, duration)
BUILTINS = {
    'two-chirp': (two_chirp, 256.0, 1.0),
    'three-component': (three_component, 512.0, 1.0),
}
