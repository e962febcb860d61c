"""Greedy multi-ridge extraction from squeezed transforms, mode recovery and scoring.

Each ridge starts at the largest remaining value of |energy| and is tracked
forward and backward in time, moving at most jump_bins per step. A point is
present when the residual band of +-gamma_bins around it still holds at least
`presence` times the peak energy of its original column; elsewhere the ridge
holds its last bin and is reported as -1. The band is zeroed where the ridge
is present before the next ridge is searched.

Modes are recovered from disjoint bands: each bin near a ridge belongs to the
nearest present ridge, up to the half width of that ridge's support zone.
"""
import logging
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import linear_sum_assignment

import window
from errors import DomainError
from signals import ComponentSpec, Signal
from separability import support_zone
from squeeze import SSTResult, recover_band
from util import interpolate_nonfinite

logger = logging.getLogger(__name__)

ABSENT = -1
DEFAULT_GAMMA_BINS = 15
DEFAULT_JUMP_BINS = 3
DEFAULT_PRESENCE = 1e-3


class RidgeSet:
    def __init__(self, indices, freq_grid, time_grid, exhausted: bool = False):
        indices = np.asarray(indices, dtype=int).reshape(-1, len(time_grid))
        self.indices = indices
        self.freq_grid = np.asarray(freq_grid, dtype=float)
        self.time_grid = np.asarray(time_grid, dtype=float)
        self.exhausted = exhausted

    def present(self, k: int) -> np.ndarray:
        return self.indices[k] != ABSENT

    def frequencies(self, k: int) -> np.ndarray:
        """Ridge k in Hz, NaN where absent."""
        return np.where(self.present(k), self.freq_grid[np.maximum(self.indices[k], 0)], np.nan)

    def __getitem__(self, k):
        return self.indices[k]

    def __len__(self):
        return self.indices.shape[0]

    def __iter__(self):
        return iter(self.indices)

    def __eq__(self, other):
        return (isinstance(other, RidgeSet) and
                np.array_equal(self.indices, other.indices) and
                np.array_equal(self.freq_grid, other.freq_grid) and
                self.exhausted == other.exhausted)

    def __repr__(self):
        return 'RidgeSet(<{} ridges over {} times>, exhausted={!r})'.format(
            len(self), self.indices.shape[1], self.exhausted)


def _track(residual, start, stop, step, origin, jump_bins, band, presence_floor, path, present):
    num_bins = residual.shape[1]
    previous = origin
    for n in range(start, stop, step):
        low = max(0, previous - jump_bins)
        window = residual[n, low:previous + jump_bins + 1]
        candidate = low + int(np.argmax(window))
        band_energy = np.sum(residual[n, max(0, candidate - band):min(num_bins, candidate + band + 1)] ** 2)
        if residual[n, candidate] > 0 and band_energy >= presence_floor[n]:
            previous = candidate
            present[n] = True
        path[n] = previous


def extract_ridges(sst: SSTResult, num_components: int, gamma_bins: int = DEFAULT_GAMMA_BINS,
                   jump_bins: int = DEFAULT_JUMP_BINS, presence: float = DEFAULT_PRESENCE) -> RidgeSet:
    """Extracts up to num_components ridges one after the other.

    :type sst: SSTResult
    :type num_components: int
    :type gamma_bins: int  # half width of the band zeroed around each ridge
    :rtype: RidgeSet  # exhausted=True when the residual ran out first
    """
    if num_components < 1:
        raise DomainError('num_components must be at least 1, got {}'.format(num_components))
    if gamma_bins < 0 or jump_bins < 0:
        raise DomainError('gamma_bins and jump_bins must be non-negative')
    energy = sst.magnitude()
    residual = energy.copy()
    presence_floor = presence * np.max(energy ** 2, axis=1)
    offsets = np.arange(energy.shape[1])[None, :]
    ridges = []
    exhausted = False

    for k in range(num_components):
        if residual.max() <= 0:
            exhausted = True
            logger.warning('residual energy exhausted after %d of %d ridges', k, num_components)
            break
        n0, m0 = np.unravel_index(np.argmax(residual), residual.shape)
        path = np.empty(energy.shape[0], dtype=int)
        present = np.zeros(energy.shape[0], dtype=bool)
        path[n0], present[n0] = m0, True
        _track(residual, n0 + 1, energy.shape[0], 1, m0, jump_bins, gamma_bins, presence_floor, path, present)
        _track(residual, n0 - 1, -1, -1, m0, jump_bins, gamma_bins, presence_floor, path, present)

        band = (np.abs(offsets - path[:, None]) <= gamma_bins) & present[:, None]
        residual[band] = 0
        ridges.append(np.where(present, path, ABSENT))
        logger.debug('ridge %d: started at (%d, %d), present at %d of %d times',
                     k, n0, m0, int(present.sum()), present.size)

    return RidgeSet(np.array(ridges, dtype=int).reshape(len(ridges), energy.shape[0]),
                    sst.out_freq_grid, sst.time_grid, exhausted)


def _mean_distance(frequencies: np.ndarray, spec: ComponentSpec, times: np.ndarray) -> float:
    overlap = ~np.isnan(frequencies) & spec.active(times)
    if not np.any(overlap):
        return np.inf
    return float(np.mean(np.abs(frequencies[overlap] - spec.frequency_at(times[overlap]))))


def match_ridges(ridges: RidgeSet, components: Sequence[ComponentSpec]) -> List[Tuple[int, int]]:
    """Pairs (ridge index, component index) minimising the total mean IF distance."""
    cost = np.array([[_mean_distance(ridges.frequencies(k), spec, ridges.time_grid)
                      for spec in components] for k in range(len(ridges))])
    if cost.size == 0:
        return []
    finite = np.isfinite(cost)
    ceiling = 1.0 + 2.0 * (cost[finite].max() if np.any(finite) else 0.0) * cost.size
    rows, cols = linear_sum_assignment(np.where(finite, cost, ceiling))
    return [(int(k), int(j)) for k, j in zip(rows, cols)]


def if_error_bins(ridges: RidgeSet, k: int, spec: ComponentSpec) -> np.ndarray:
    """|ridge - phi'| in bins at the times where both are present."""
    times = ridges.time_grid
    overlap = ridges.present(k) & spec.active(times)
    step = ridges.freq_grid[1] - ridges.freq_grid[0]
    return np.abs(ridges.frequencies(k)[overlap] - spec.frequency_at(times[overlap])) / step


def ridge_chirp_rate(ridges: RidgeSet, k: int, span: int) -> np.ndarray:
    """Slope of ridge k in Hz/s by central differences over +-span samples.

    Absent times are bridged by linear interpolation; both ends are extended
    by odd reflection so the slope carries on past them.
    """
    freqs = ridges.frequencies(k)
    if freqs.size < 2 or not np.any(np.isfinite(freqs)):
        return np.zeros(freqs.size)
    span = int(min(max(span, 1), freqs.size - 1))
    padded = np.pad(interpolate_nonfinite(freqs), span, mode='reflect', reflect_type='odd')
    step = ridges.time_grid[1] - ridges.time_grid[0]
    return (padded[2 * span:] - padded[:-2 * span]) / (2 * span * step)


def zone_half_widths(sst: SSTResult, ridges: RidgeSet,
                     epsilon: float = window.DEFAULT_EPSILON) -> np.ndarray:
    """Half width in bins of each ridge's enlarged support zone, shape (ridges, times).

    The chirp rate is read off the ridge slope over one window width.
    """
    alpha = window.alpha_from_epsilon(epsilon)
    sigma = sst.sigma.sigma
    span = int(round(np.mean(sigma) * sst.sample_rate))
    widths = np.zeros(ridges.indices.shape)
    for k in range(len(ridges)):
        rate = ridge_chirp_rate(ridges, k, span)
        low, high = support_zone(0.0, rate, sigma, alpha)
        widths[k] = (high - low) / (2 * sst.freq_step)
    return widths


def partition_bands(ridges: RidgeSet, half_widths, num_bins: int) -> np.ndarray:
    """Boolean masks (ridges, times, bins): bins within half_widths of a present
    ridge and no closer to any other present ridge. Ties go to the lower index.
    """
    offsets = np.arange(num_bins)[None, None, :]
    distance = np.abs(offsets - ridges.indices[:, :, None]).astype(float)
    distance[~(ridges.indices >= 0)] = np.inf
    owner = np.argmin(distance, axis=0)
    inside = distance <= np.asarray(half_widths, dtype=float)[:, :, None]
    return inside & (owner[None, :, :] == np.arange(len(ridges))[:, None, None])


def separate(sst: SSTResult, ridges: RidgeSet, gamma_bins: Optional[int] = None,
             real_input: Optional[bool] = None, epsilon: float = window.DEFAULT_EPSILON) -> List[Signal]:
    """Recovers one signal per ridge from disjoint bands around the ridges.

    Each band spans the ridge's support zone at the transform's sigma, or
    +-gamma_bins when given, and is cut where another ridge is nearer.
    """
    if gamma_bins is not None and gamma_bins < 0:
        raise DomainError('gamma_bins must be non-negative, got {}'.format(gamma_bins))
    if len(ridges) == 0:
        return []
    if gamma_bins is None:
        half_widths = zone_half_widths(sst, ridges, epsilon)
    else:
        half_widths = np.full(ridges.indices.shape, float(gamma_bins))
    bands = partition_bands(ridges, half_widths, sst.shape[1])
    return [recover_band(sst, band, real_input=real_input) for band in bands]


def rmse(true_components: Sequence[Signal], reconstructed: Sequence[Signal]) -> float:
    """(1/K) sum_k ||z_k - z_hat_k|| / ||z_k||."""
    if len(true_components) != len(reconstructed) or not true_components:
        raise DomainError('rmse needs equally many true and reconstructed components, got {} and {}'.format(
            len(true_components), len(reconstructed)))
    errors = []
    for k, (z, z_hat) in enumerate(zip(true_components, reconstructed)):
        if len(z) != len(z_hat):
            raise DomainError('component {} has {} samples, reconstruction has {}'.format(
                k, len(z), len(z_hat)))
        norm = np.linalg.norm(z.samples)
        if norm == 0:
            raise DomainError('true component {} has zero norm'.format(k))
        errors.append(np.linalg.norm(z.samples - z_hat.samples) / norm)
    return float(np.mean(errors))
