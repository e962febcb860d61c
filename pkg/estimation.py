"""Data-driven selection of the window width sigma(t).

Available Classes:
    - EstimatorConfig: sigma grid, epsilon (grid), peak threshold, entropy order
    - SupportIntervals: estimated frequency intervals of the components at one (t, sigma)
    - ConstantSigmaStack: |STFT| of one signal for every sigma of the grid

Available Functions:
    - renyi_entropy, renyi_entropy_curve: local concentration of a TF magnitude
    - sigma_u, sigma_u_track: entropy-minimising sigma per time
    - extract_peaks: dominant local maxima of one spectrum
    - estimate_chirp_rate: slope of the ridge near a peak
    - support_intervals: [l_k, h_k] from peaks and fitted rates
    - algorithm1, algorithm2: descend from sigma_u while the intervals stay disjoint
    - sigma_renyi_sst: entropy-minimising sigma of the conventional squeezed transforms
"""
import logging
import math
from collections import namedtuple
from typing import Dict, Optional, Sequence, Tuple

import numpy as np
from scipy.signal import find_peaks

import phase
import squeeze
import stft
import window
from errors import DomainError
from signals import Signal
from stft import TimeVaryingParam
from util import local_sum, smooth, uniform_grid

logger = logging.getLogger(__name__)

ChirpFit = namedtuple('ChirpFit', ['rate', 'degenerate'])
SigmaEstimate = namedtuple('SigmaEstimate', ['sigma', 'raw', 'sigma_u', 'epsilon'])
SigmaEstimate.__doc__ = """sigma: smoothed TimeVaryingParam; raw: C(t) before smoothing;
sigma_u: entropy upper bound per time; epsilon: per-time epsilon reached (algorithm2 only)."""

DEFAULT_SMOOTHING = (0.2, 0.2, 0.2, 0.2, 0.2)


class EstimatorConfig:
    def __init__(self, sigma_grid: Optional[Sequence[float]] = None,
                 epsilon: float = window.DEFAULT_EPSILON,
                 epsilon_grid: Optional[Sequence[float]] = None,
                 gamma1: float = 0.3, renyi_ell: float = 2.5, renyi_zeta: int = 4,
                 smoothing: Sequence[float] = DEFAULT_SMOOTHING,
                 strict_intervals: bool = False, nfft: Optional[int] = None,
                 threshold: float = phase.VALID_THRESHOLD):
        if sigma_grid is None:
            sigma_grid = uniform_grid(0.2, 0.001, 0.001)
        sigma_grid = np.asarray(sigma_grid, dtype=float)
        if sigma_grid.ndim != 1 or sigma_grid.size < 1:
            raise DomainError('sigma_grid must be a non-empty 1-d sequence')
        if np.any(sigma_grid <= 0):
            raise DomainError('sigma_grid must be positive')
        steps = -np.diff(sigma_grid)
        if np.any(steps <= 0) or (steps.size and not np.allclose(steps, steps[0], rtol=1e-6)):
            raise DomainError('sigma_grid must be uniform and descending')
        window.alpha_from_epsilon(epsilon)
        if epsilon_grid is not None:
            epsilon_grid = np.asarray(epsilon_grid, dtype=float)
            for value in epsilon_grid:
                window.alpha_from_epsilon(value)
            if epsilon_grid.size < 1 or np.any(np.diff(epsilon_grid) >= 0):
                raise DomainError('epsilon_grid must be non-empty and strictly descending')
        if not 0.0 < gamma1 < 1.0:
            raise DomainError('gamma1 must lie in (0, 1), got {}'.format(gamma1))
        if renyi_ell <= 1:
            raise DomainError('renyi_ell must exceed 1, got {}'.format(renyi_ell))
        if int(renyi_zeta) != renyi_zeta or renyi_zeta < 0:
            raise DomainError('renyi_zeta must be a non-negative integer, got {}'.format(renyi_zeta))
        if len(smoothing) < 1:
            raise DomainError('smoothing needs at least one tap')

        self.sigma_grid = sigma_grid
        self.epsilon = float(epsilon)
        self.epsilon_grid = epsilon_grid
        self.gamma1 = float(gamma1)
        self.renyi_ell = float(renyi_ell)
        self.renyi_zeta = int(renyi_zeta)
        self.smoothing = tuple(float(s) for s in smoothing)
        self.strict_intervals = bool(strict_intervals)
        self.nfft = nfft
        self.threshold = float(threshold)

    @classmethod
    def from_ranges(cls, sigma_max=0.2, sigma_min=0.001, sigma_step=0.001,
                    epsilon_max=None, epsilon_min=None, epsilon_step=None, **kwargs) -> 'EstimatorConfig':
        epsilon_grid = None
        if epsilon_max is not None:
            epsilon_grid = uniform_grid(epsilon_max, epsilon_min, epsilon_step)
        return cls(uniform_grid(sigma_max, sigma_min, sigma_step), epsilon_grid=epsilon_grid, **kwargs)

    @property
    def sigma_step(self) -> float:
        return float(self.sigma_grid[0] - self.sigma_grid[1]) if self.sigma_grid.size > 1 else 0.0

    def with_epsilon_grid(self, epsilon_grid) -> 'EstimatorConfig':
        return EstimatorConfig(self.sigma_grid, self.epsilon, epsilon_grid, self.gamma1,
                               self.renyi_ell, self.renyi_zeta, self.smoothing,
                               self.strict_intervals, self.nfft, self.threshold)

    def __eq__(self, other):
        return isinstance(other, EstimatorConfig) and repr(self) == repr(other)

    def __repr__(self):
        eps = None if self.epsilon_grid is None else self.epsilon_grid.tolist()
        return ('EstimatorConfig({}, {c.epsilon!r}, {}, {c.gamma1!r}, {c.renyi_ell!r}, '
                '{c.renyi_zeta!r}, {c.smoothing!r}, {c.strict_intervals!r}, {c.nfft!r}, '
                '{c.threshold!r})').format(self.sigma_grid.tolist(), eps, c=self)


class SupportIntervals:
    def __init__(self, peaks, chirp_rates, lows, highs):
        self.peaks = np.asarray(peaks, dtype=float)
        self.chirp_rates = np.asarray(chirp_rates, dtype=float)
        self.lows = np.asarray(lows, dtype=float)
        self.highs = np.asarray(highs, dtype=float)

    @property
    def disjoint(self) -> bool:
        """h_k <= l_{k+1} for every neighbouring pair."""
        return bool(np.all(self.highs[:-1] <= self.lows[1:]))

    def __len__(self):
        return self.peaks.size

    def __iter__(self):
        return iter(zip(self.lows, self.highs))

    def __repr__(self):
        return 'SupportIntervals({})'.format(
            ', '.join('[{:.2f}, {:.2f}]'.format(lo, hi) for lo, hi in self))


def renyi_entropy(tf_mag: np.ndarray, t_index: int, zeta: int = 4, ell: float = 2.5) -> float:
    """Entropy of order ell of |V|^2 over times [t - zeta, t + zeta] and all bins, in bits.

    :rtype: float  # inf for an all-zero window
    """
    tf_mag = np.abs(np.asarray(tf_mag))
    block = tf_mag[max(0, t_index - zeta):t_index + zeta + 1]
    peak = block.max() if block.size else 0.0
    if peak == 0:
        return math.inf
    p = block / peak
    return float(np.log2(np.sum(p ** (2 * ell)) / np.sum(p ** 2) ** ell) / (1 - ell))


def renyi_entropy_curve(tf_mag: np.ndarray, zeta: int = 4, ell: float = 2.5) -> np.ndarray:
    """renyi_entropy at every time index."""
    tf_mag = np.abs(np.asarray(tf_mag))
    peak = tf_mag.max() if tf_mag.size else 0.0
    if peak == 0:
        return np.full(tf_mag.shape[0], math.inf)
    p = tf_mag / peak
    high = local_sum(np.sum(p ** (2 * ell), axis=1), zeta)
    low = local_sum(np.sum(p ** 2, axis=1), zeta)
    out = np.full(tf_mag.shape[0], math.inf)
    nonzero = low > 0
    out[nonzero] = np.log2(high[nonzero] / low[nonzero] ** ell) / (1 - ell)
    return out


def extract_peaks(mag_slice: np.ndarray, gamma1: float = 0.3) -> np.ndarray:
    """Bin indices of the strict local maxima exceeding gamma1 times the slice maximum.
    A plateau reports its leftmost bin."""
    mag_slice = np.asarray(mag_slice, dtype=float)
    peak = mag_slice.max() if mag_slice.size else 0.0
    if peak <= 0:
        return np.zeros(0, dtype=int)
    _, properties = find_peaks(mag_slice, plateau_size=1)
    left = properties['left_edges']
    return left[mag_slice[left] > gamma1 * peak]


def estimate_chirp_rate(tf_mag: np.ndarray, time_grid: np.ndarray, freq_grid: np.ndarray,
                        t_index: int, eta_k: float, sigma: float, alpha: float) -> ChirpFit:
    """Least-squares slope of the ridge argmax within +-alpha/sigma Hz of eta_k,
    over times t +- 2 pi alpha sigma.

    :rtype: ChirpFit  # degenerate=True with rate 0 when fewer than 3 times fit
    """
    half = int(round(2 * math.pi * alpha * sigma / (time_grid[1] - time_grid[0])))
    first = max(0, t_index - half)
    last = min(len(time_grid) - 1, t_index + half)
    band_low = int(np.searchsorted(freq_grid, eta_k - alpha / sigma, side='left'))
    band_high = int(np.searchsorted(freq_grid, eta_k + alpha / sigma, side='right'))
    if last - first + 1 < 3 or band_high <= band_low:
        return ChirpFit(0.0, True)
    block = tf_mag[first:last + 1, band_low:band_high]
    ridge = freq_grid[band_low + np.argmax(block, axis=1)]
    return ChirpFit(float(np.polyfit(time_grid[first:last + 1], ridge, 1)[0]), False)


def support_intervals(peaks, chirp_rates, sigma: float, alpha: float,
                      strict: bool = False) -> SupportIntervals:
    """h_k = eta_k + alpha (1/sigma + 2 pi |r_k| sigma) and the matching l_k.

    strict=True builds l_k from peak k-1 (peak 1 uses its own values), which
    makes every pair overlap.
    """
    peaks = np.asarray(peaks, dtype=float)
    half = alpha * (1.0 / sigma + 2 * math.pi * np.abs(np.asarray(chirp_rates, dtype=float)) * sigma)
    lows = peaks - half
    if strict and peaks.size > 1:
        lows[1:] = lows[:-1].copy()
    return SupportIntervals(peaks, chirp_rates, lows, peaks + half)


class ConstantSigmaStack:
    """|STFT| of one signal for every sigma of the grid, with the peak and
    interval bookkeeping of the descent algorithms memoised per (sigma, t)."""

    def __init__(self, signal: Signal, config: EstimatorConfig):
        self.signal = signal
        self.config = config
        self.time_grid = signal.times
        self.freq_grid = None
        self.degenerate_fits = 0
        self._magnitudes = {}  # type: Dict[int, np.ndarray]
        self._peaks = {}  # type: Dict[Tuple[int, int], np.ndarray]
        self._fits = {}  # type: Dict[tuple, ChirpFit]

    def __len__(self):
        return self.config.sigma_grid.size

    def magnitude(self, j: int) -> np.ndarray:
        if j not in self._magnitudes:
            sigma = TimeVaryingParam.constant(self.config.sigma_grid[j], len(self.signal))
            tf = stft.adaptive_stft(self.signal, sigma, epsilon=self.config.epsilon, nfft=self.config.nfft)
            magnitude, self.freq_grid = tf.nonnegative()
            self._magnitudes[j] = magnitude.astype(np.float32)
        return self._magnitudes[j]

    def entropy_table(self) -> np.ndarray:
        """Entropy per (sigma index, time)."""
        return np.array([
            renyi_entropy_curve(self.magnitude(j), self.config.renyi_zeta, self.config.renyi_ell)
            for j in range(len(self))])

    def peaks(self, j: int, n: int) -> np.ndarray:
        key = (j, n)
        if key not in self._peaks:
            self._peaks[key] = extract_peaks(self.magnitude(j)[n], self.config.gamma1)
        return self._peaks[key]

    def chirp_rate(self, j: int, n: int, peak: int, alpha: float) -> float:
        sigma = self.config.sigma_grid[j]
        eta = self.freq_grid[peak]
        # fits only depend on the integer window and band they cover
        key = (j, n, peak, int(round(2 * math.pi * alpha * sigma * self.signal.sample_rate)),
               int(np.searchsorted(self.freq_grid, eta - alpha / sigma, side='left')),
               int(np.searchsorted(self.freq_grid, eta + alpha / sigma, side='right')))
        if key not in self._fits:
            fit = estimate_chirp_rate(self.magnitude(j), self.time_grid, self.freq_grid, n,
                                      eta, sigma, alpha)
            self.degenerate_fits += fit.degenerate
            self._fits[key] = fit
        return self._fits[key].rate

    def intervals(self, j: int, n: int, alpha: float) -> SupportIntervals:
        peaks = self.peaks(j, n)
        rates = [self.chirp_rate(j, n, p, alpha) for p in peaks]
        return support_intervals(self.freq_grid[peaks], rates, self.config.sigma_grid[j], alpha,
                                 self.config.strict_intervals)

    def disjoint(self, j: int, n: int, alphas: Sequence[float]) -> bool:
        # widest intervals first; the result does not depend on the order
        return all(self.intervals(j, n, alpha).disjoint for alpha in sorted(alphas, reverse=True))


def sigma_u_track(signal: Signal, config: EstimatorConfig,
                  stack: Optional[ConstantSigmaStack] = None) -> Tuple[np.ndarray, np.ndarray]:
    """Grid index of the entropy minimum at every time, and the entropy table.
    Ties resolve to the first (largest) sigma."""
    stack = ConstantSigmaStack(signal, config) if stack is None else stack
    table = stack.entropy_table()
    return np.argmin(table, axis=0), table


def sigma_u(signal: Signal, t_index: int, config: EstimatorConfig) -> float:
    stack = ConstantSigmaStack(signal, config)
    entropies = [renyi_entropy(stack.magnitude(j), t_index, config.renyi_zeta, config.renyi_ell)
                 for j in range(len(stack))]
    return float(config.sigma_grid[int(np.argmin(entropies))])


def _descend(stack: ConstantSigmaStack, n: int, start: int, alphas: Sequence[float]) -> int:
    """Grid index C(t): step sigma down from `start` while the peak count holds
    and the intervals stay disjoint at the smallest alpha and then at all of them."""
    peaks = stack.peaks(start, n)
    if peaks.size == 0 or not stack.disjoint(start, n, alphas):
        return start
    j = start
    while j + 1 < len(stack):
        if stack.peaks(j + 1, n).size != peaks.size or not stack.disjoint(j + 1, n, alphas[-1:]):
            break
        j += 1
        if not stack.disjoint(j, n, alphas):
            break
    return j


def _epsilon_reached(stack: ConstantSigmaStack, n: int, j: int, epsilons: np.ndarray) -> float:
    reached = math.nan
    if stack.peaks(j, n).size == 0:
        return reached
    for epsilon in epsilons:
        if not stack.intervals(j, n, window.alpha_from_epsilon(epsilon)).disjoint:
            break
        reached = float(epsilon)
    return reached


def _estimate(signal: Signal, config: EstimatorConfig, epsilons: np.ndarray) -> SigmaEstimate:
    alphas = [window.alpha_from_epsilon(e) for e in epsilons]
    stack = ConstantSigmaStack(signal, config)
    start, _ = sigma_u_track(signal, config, stack)
    chosen = np.array([_descend(stack, n, int(start[n]), alphas) for n in range(len(signal))])
    if stack.degenerate_fits:
        logger.warning('%d chirp-rate fits had fewer than 3 samples and used rate 0',
                       stack.degenerate_fits)
    raw = config.sigma_grid[chosen]
    reached = None
    if len(epsilons) > 1:
        reached = np.array([_epsilon_reached(stack, n, int(chosen[n]), epsilons)
                            for n in range(len(signal))])
    logger.info('sigma estimate: C(t) in [%.4g, %.4g], %d of %d times left at sigma_u',
                raw.min(), raw.max(), int(np.count_nonzero(chosen == start)), len(signal))
    smoothed = TimeVaryingParam.from_sigma(smooth(raw, config.smoothing), signal.sample_rate)
    return SigmaEstimate(smoothed, raw, config.sigma_grid[start], reached)


def algorithm1(signal: Signal, config: EstimatorConfig) -> SigmaEstimate:
    """Separability-driven sigma with a single epsilon.

    :type signal: Signal
    :type config: EstimatorConfig
    :rtype: SigmaEstimate
    """
    return _estimate(signal, config, np.array([config.epsilon]))


def algorithm2(signal: Signal, config: EstimatorConfig) -> SigmaEstimate:
    """As algorithm1, but a sigma is only accepted when its intervals stay
    disjoint for every epsilon of the descending grid down to the smallest."""
    if config.epsilon_grid is None:
        raise DomainError('algorithm2 needs an epsilon_grid')
    return _estimate(signal, config, config.epsilon_grid)


def sigma_renyi_sst(signal: Signal, config: EstimatorConfig,
                    variant: squeeze.Variant = squeeze.Variant.FSST2) -> TimeVaryingParam:
    """Per time, the constant sigma whose conventional squeezed transform has
    the lowest local entropy."""
    if variant not in (squeeze.Variant.FSST, squeeze.Variant.FSST2):
        raise DomainError('sigma_renyi_sst needs FSST or FSST2, got {}'.format(variant))
    table = []
    for value in config.sigma_grid:
        sst = squeeze.synchrosqueeze(signal, TimeVaryingParam.constant(value, len(signal)), variant,
                                     config.epsilon, config.nfft, config.threshold)
        magnitude, _ = sst.nonnegative()
        table.append(renyi_entropy_curve(magnitude, config.renyi_zeta, config.renyi_ell))
    chosen = config.sigma_grid[np.argmin(np.array(table), axis=0)]
    return TimeVaryingParam.from_sigma(chosen, signal.sample_rate)
