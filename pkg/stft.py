"""Adaptive short-time Fourier transform with a time-varying Gaussian width.

    V[n, m] = sum_k x[n + k] w_{sigma(t_n)}(k/Fs) exp(-i 2 pi eta_m k/Fs) / Fs

with eta_m = m Fs/nfft and zero padding outside the signal. Real signals keep
the bins of [0, Fs/2]; complex signals keep the full band on an increasing
grid. The time derivative of V is assembled from auxiliary transforms:

    dV/dt = i 2 pi eta V - V^{g'}/sigma - (sigma'/sigma) (V + V^{tau g'})

Available Classes:
    - TimeVaryingParam: sigma(t) and sigma'(t)
    - TFMatrix: a complex time-frequency matrix with its grids

Available Functions:
    - adaptive_stft, stft_time_derivative, transform_bundle
    - reconstruct_full: inverse of the G transform
    - lfm_stft_closed_form: exact transform of a linear chirp
"""
import logging
import math
from collections import namedtuple
from typing import Dict, Iterable, Optional

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

import window
from errors import DomainError, ResolutionError
from signals import Signal
from window import WindowKind

logger = logging.getLogger(__name__)

TransformBundle = namedtuple('TransformBundle', ['V', 'V_tau_g', 'V_tau_gprime', 'dV_dt'])


class TimeVaryingParam:
    def __init__(self, sigma, sigma_prime):
        sigma = np.asarray(sigma, dtype=float)
        sigma_prime = np.asarray(sigma_prime, dtype=float)
        if sigma.ndim != 1 or sigma.shape != sigma_prime.shape:
            raise DomainError('sigma and sigma_prime must be matching 1-d arrays, got {} and {}'.format(
                sigma.shape, sigma_prime.shape))
        if not np.all(np.isfinite(sigma) & (sigma > 0)):
            raise DomainError('sigma must be positive everywhere')
        if not np.all(np.isfinite(sigma_prime)):
            raise DomainError('sigma_prime must be finite')
        self.sigma = sigma
        self.sigma_prime = sigma_prime

    @classmethod
    def from_sigma(cls, sigma, sample_rate: float) -> 'TimeVaryingParam':
        """Derivative by central differences, one-sided at both ends."""
        sigma = np.asarray(sigma, dtype=float)
        if sigma.size < 2:
            raise DomainError('a sigma track needs at least 2 samples')
        return cls(sigma, np.gradient(sigma, 1.0 / sample_rate))

    @classmethod
    def constant(cls, value: float, length: int) -> 'TimeVaryingParam':
        return cls(np.full(length, float(value)), np.zeros(length))

    @property
    def is_constant(self) -> bool:
        return bool(np.all(self.sigma == self.sigma[0]))

    def __len__(self):
        return self.sigma.size

    def __eq__(self, other):
        return (isinstance(other, TimeVaryingParam) and
                np.array_equal(self.sigma, other.sigma) and
                np.array_equal(self.sigma_prime, other.sigma_prime))

    def __repr__(self):
        return 'TimeVaryingParam(<{} samples in [{:.4g}, {:.4g}]>)'.format(
            len(self), self.sigma.min(), self.sigma.max())


class TFMatrix:
    def __init__(self, values, time_grid, freq_grid, sigma: TimeVaryingParam,
                 sample_rate: float, nfft: int, kind: Optional[WindowKind] = WindowKind.G,
                 onesided: bool = True):
        values = np.asarray(values)
        if values.shape != (len(time_grid), len(freq_grid)):
            raise DomainError('values of shape {} do not match grids ({}, {})'.format(
                values.shape, len(time_grid), len(freq_grid)))
        if np.any(np.diff(time_grid) <= 0) or np.any(np.diff(freq_grid) <= 0):
            raise DomainError('grids must be strictly increasing')
        self.values = values
        self.time_grid = np.asarray(time_grid, dtype=float)
        self.freq_grid = np.asarray(freq_grid, dtype=float)
        self.sigma = sigma
        self.sample_rate = float(sample_rate)
        self.nfft = int(nfft)
        self.kind = kind
        self.onesided = onesided

    @property
    def freq_step(self) -> float:
        return self.sample_rate / self.nfft

    @property
    def shape(self):
        return self.values.shape

    def magnitude(self) -> np.ndarray:
        return np.abs(self.values)

    def nonnegative(self):
        """Magnitudes and frequencies restricted to eta >= 0."""
        keep = self.freq_grid >= 0
        return np.abs(self.values[:, keep]), self.freq_grid[keep]

    def with_values(self, values, kind: Optional[WindowKind] = None) -> 'TFMatrix':
        return TFMatrix(values, self.time_grid, self.freq_grid, self.sigma, self.sample_rate,
                        self.nfft, kind, self.onesided)

    def same_grid(self, other: 'TFMatrix') -> bool:
        return (self.shape == other.shape and
                np.array_equal(self.time_grid, other.time_grid) and
                np.array_equal(self.freq_grid, other.freq_grid))

    def __repr__(self):
        return 'TFMatrix(<{}x{} {}>, onesided={!r})'.format(
            self.shape[0], self.shape[1], self.kind, self.onesided)


def frequency_grid(nfft: int, sample_rate: float, onesided: bool) -> np.ndarray:
    if onesided:
        return np.arange(nfft // 2 + 1) * (sample_rate / nfft)
    return np.fft.fftshift(np.fft.fftfreq(nfft, 1.0 / sample_rate))


def recovery_weights(num_freqs: int, nfft: int, onesided: bool) -> np.ndarray:
    """Per-bin weights turning a band sum into the real part of the full-band sum.

    Interior bins of a one-sided band stand for a frequency and its mirror
    image; DC and Nyquist stand for themselves."""
    if not onesided:
        return np.ones(num_freqs)
    weights = np.full(num_freqs, 2.0)
    weights[0] = 1.0
    if nfft % 2 == 0:
        weights[-1] = 1.0
    return weights


def _folded_fft(weighted: np.ndarray, radius: int, nfft: int) -> np.ndarray:
    # Offsets k = -radius..radius fold onto k mod nfft; exact at the bins m Fs/nfft.
    rows, width = weighted.shape
    reps = -(-width // nfft)
    padded = np.zeros((rows, reps * nfft), dtype=complex)
    padded[:, :width] = weighted
    folded = np.roll(padded.reshape(rows, reps, nfft).sum(axis=1), -radius, axis=1)
    return np.fft.fft(folded, axis=1)


def _auxiliary(signal: Signal, sigma: TimeVaryingParam, kinds: Iterable[WindowKind],
               epsilon: float, nfft: Optional[int], onesided: Optional[bool]):
    """Transforms of one signal with several kernels sharing the frame matrix."""
    if len(sigma) != len(signal):
        raise DomainError('sigma track has {} samples, signal has {}'.format(len(sigma), len(signal)))
    nfft = len(signal) if nfft is None else int(nfft)
    if nfft < 2:
        raise DomainError('nfft must be at least 2, got {}'.format(nfft))
    if onesided is None:
        onesided = not signal.is_complex
    elif onesided and signal.is_complex:
        raise DomainError('a complex signal needs the two-sided band')

    fs = signal.sample_rate
    taps = window.half_taps(sigma.sigma, epsilon, fs)
    if taps.min() < 1:
        raise ResolutionError('sigma={:.4g} yields fewer than 3 taps at {} Hz'.format(
            sigma.sigma[taps.argmin()], fs))
    radius = int(min(taps.max(), len(signal) - 1))
    frames = sliding_window_view(np.pad(signal.samples, radius), 2 * radius + 1)
    offsets = np.arange(-radius, radius + 1)
    keep = np.abs(offsets)[None, :] <= taps[:, None]
    logger.debug('transforming %d samples: nfft=%d, radius=%d taps, onesided=%s',
                 len(signal), nfft, radius, onesided)

    values = {}
    for kind in kinds:
        weights = window.kernel(kind, offsets[None, :] / fs, sigma.sigma[:, None]) * keep
        spectrum = _folded_fft(frames * weights, radius, nfft) / fs
        if onesided:
            values[kind] = spectrum[:, :nfft // 2 + 1]
        else:
            values[kind] = np.fft.fftshift(spectrum, axes=1)
    return values, nfft, onesided


def _matrix(signal, sigma, values, nfft, kind, onesided) -> TFMatrix:
    return TFMatrix(values, signal.times, frequency_grid(nfft, signal.sample_rate, onesided),
                    sigma, signal.sample_rate, nfft, kind, onesided)


def _time_derivative(values: Dict[WindowKind, np.ndarray], sigma: TimeVaryingParam,
                     freq_grid: np.ndarray) -> np.ndarray:
    V = values[WindowKind.G]
    s = sigma.sigma[:, None]
    ds = sigma.sigma_prime[:, None]
    return (2j * math.pi * freq_grid[None, :] * V
            - values[WindowKind.G_PRIME] / s
            - (ds / s) * (V + values[WindowKind.TAU_G_PRIME]))


def adaptive_stft(signal: Signal, sigma: TimeVaryingParam, kind: WindowKind = WindowKind.G,
                  epsilon: float = window.DEFAULT_EPSILON, nfft: Optional[int] = None,
                  onesided: Optional[bool] = None) -> TFMatrix:
    """Transforms a signal with the kernel `kind` of width sigma(t_n) at every sample.

    :type signal: Signal
    :type sigma: TimeVaryingParam
    :type kind: WindowKind
    :type nfft: int  # defaults to len(signal)
    :type onesided: bool  # defaults to True for real signals
    :rtype: TFMatrix
    """
    values, nfft, onesided = _auxiliary(signal, sigma, [kind], epsilon, nfft, onesided)
    return _matrix(signal, sigma, values[kind], nfft, kind, onesided)


def stft_time_derivative(signal: Signal, sigma: TimeVaryingParam,
                         epsilon: float = window.DEFAULT_EPSILON, nfft: Optional[int] = None,
                         onesided: Optional[bool] = None) -> TFMatrix:
    kinds = [WindowKind.G, WindowKind.G_PRIME, WindowKind.TAU_G_PRIME]
    values, nfft, onesided = _auxiliary(signal, sigma, kinds, epsilon, nfft, onesided)
    freq_grid = frequency_grid(nfft, signal.sample_rate, onesided)
    return _matrix(signal, sigma, _time_derivative(values, sigma, freq_grid), nfft, None, onesided)


def transform_bundle(signal: Signal, sigma: TimeVaryingParam,
                     epsilon: float = window.DEFAULT_EPSILON, nfft: Optional[int] = None,
                     onesided: Optional[bool] = None) -> TransformBundle:
    """Every transform the phase transformations need, from one frame matrix."""
    values, nfft, onesided = _auxiliary(signal, sigma, list(WindowKind), epsilon, nfft, onesided)
    freq_grid = frequency_grid(nfft, signal.sample_rate, onesided)
    dV_dt = _time_derivative(values, sigma, freq_grid)

    def matrix(v, kind):
        return _matrix(signal, sigma, v, nfft, kind, onesided)

    return TransformBundle(matrix(values[WindowKind.G], WindowKind.G),
                           matrix(values[WindowKind.TAU_G], WindowKind.TAU_G),
                           matrix(values[WindowKind.TAU_G_PRIME], WindowKind.TAU_G_PRIME),
                           matrix(dV_dt, None))


def reconstruct_full(tf: TFMatrix, sigma: Optional[TimeVaryingParam] = None,
                     real_input: Optional[bool] = None) -> Signal:
    """x(t_n) = sigma(t_n)/g(0) * sum_m V[n, m] d_eta, with 2 Re over [0, Fs/2] for real input.

    :type tf: TFMatrix
    :type sigma: TimeVaryingParam  # defaults to the track tf was computed with
    :type real_input: bool  # defaults to tf.onesided
    :rtype: Signal
    """
    if tf.kind is not WindowKind.G:
        raise DomainError('reconstruction needs a G transform, got {}'.format(tf.kind))
    sigma = tf.sigma if sigma is None else sigma
    if len(sigma) != tf.shape[0]:
        raise DomainError('sigma track has {} samples, transform has {} times'.format(
            len(sigma), tf.shape[0]))
    if real_input is None:
        real_input = tf.onesided
    if tf.onesided and not real_input:
        raise DomainError('complex recovery needs the two-sided band')
    weights = recovery_weights(tf.shape[1], tf.nfft, tf.onesided)
    total = (tf.values @ weights) * tf.freq_step * sigma.sigma / window.gaussian(0.0)
    samples = total.real if real_input else total
    return Signal(samples, tf.sample_rate, tf.time_grid[0])


def lfm_stft_closed_form(A, c, r, sigma, t, eta):
    """Transform of A exp(i 2 pi (c t + r t^2/2)) with the G window of width sigma."""
    if np.any(np.asarray(sigma) <= 0):
        raise DomainError('sigma must be positive')
    b = 2 * math.pi * sigma ** 2 * r
    offset = np.asarray(eta) - c - r * np.asarray(t)
    profile = np.exp(-(2 * math.pi ** 2 * sigma ** 2 / (1 + b ** 2)) * (1 + 1j * b) * offset ** 2)
    carrier = np.exp(2j * math.pi * (c * np.asarray(t) + r * np.asarray(t) ** 2 / 2))
    return A / np.sqrt(1 - 1j * b) * carrier * profile
