"""Synchrosqueezing: reassignment of STFT values along frequency.

Every valid cell contributes V[n, m] * d_eta to the output bin nearest its
phase transform omega[n, m]. Cells whose omega leaves the output band are
counted in SSTResult.dropped, so the per-time sums of energy and dropped
equal the masked STFT sums exactly.

Available Classes:
    - Variant: which phase transform and sigma regime produced a result
    - SSTResult: squeezed energy with its grids

Available Functions:
    - squeeze: the reassignment step
    - synchrosqueeze: transforms, phase transform and squeeze in one call
    - recover_band: recovery of the energy inside a time-frequency mask
    - reconstruct_component: recovery of one mode around a ridge
"""
import logging
from enum import Enum
from typing import Optional

import numpy as np

import phase
import stft
import window
from errors import DomainError
from phase import PhaseField
from signals import Signal
from stft import TFMatrix, TimeVaryingParam
from util import nearest_bins

logger = logging.getLogger(__name__)


class Variant(Enum):
    FSST = 'FSST'
    FSST2 = 'FSST2'
    ADP_FSST = 'ADP_FSST'
    ADP_FSST2 = 'ADP_FSST2'
    REGULAR_PT_ADP = 'REGULAR_PT_ADP'
    REGULAR_PT_ADP2 = 'REGULAR_PT_ADP2'

    @property
    def conventional(self) -> bool:
        """Constant sigma, recovered with 1/h(0)."""
        return self in (Variant.FSST, Variant.FSST2)

    @property
    def second_order(self) -> bool:
        return self in (Variant.FSST2, Variant.ADP_FSST2, Variant.REGULAR_PT_ADP2)


class SSTResult:
    def __init__(self, energy, out_freq_grid, time_grid, source_phase: PhaseField,
                 variant: Variant, sigma: TimeVaryingParam, sample_rate: float, nfft: int,
                 onesided: bool, dropped):
        self.energy = np.asarray(energy)
        self.out_freq_grid = np.asarray(out_freq_grid, dtype=float)
        self.time_grid = np.asarray(time_grid, dtype=float)
        self.source_phase = source_phase
        self.variant = variant
        self.sigma = sigma
        self.sample_rate = float(sample_rate)
        self.nfft = int(nfft)
        self.onesided = onesided
        self.dropped = np.asarray(dropped)

    @property
    def freq_step(self) -> float:
        return self.sample_rate / self.nfft

    @property
    def shape(self):
        return self.energy.shape

    def magnitude(self) -> np.ndarray:
        return np.abs(self.energy)

    def nonnegative(self):
        keep = self.out_freq_grid >= 0
        return np.abs(self.energy[:, keep]), self.out_freq_grid[keep]

    def __repr__(self):
        return 'SSTResult(<{}x{}>, {})'.format(self.shape[0], self.shape[1], self.variant.name)


def squeeze(V: TFMatrix, omega: PhaseField, variant: Variant = Variant.ADP_FSST) -> SSTResult:
    """Moves each valid V[n, m] d_eta to the bin of the output grid nearest omega[n, m].

    :type V: TFMatrix
    :type omega: PhaseField
    :rtype: SSTResult
    """
    if omega.omega.shape != V.shape or omega.valid_mask.shape != V.shape:
        raise DomainError('phase field of shape {} does not match transform {}'.format(
            omega.omega.shape, V.shape))
    grid = V.freq_grid
    step = V.freq_step
    rows, cols = np.nonzero(omega.valid_mask)
    targets = omega.omega[rows, cols]
    contributions = V.values[rows, cols] * step

    inside = (targets >= grid[0]) & (targets <= grid[-1])
    bins = np.clip(nearest_bins(targets[inside], grid[0], step), 0, grid.size - 1)
    energy = np.zeros(V.shape, dtype=complex)
    np.add.at(energy, (rows[inside], bins), contributions[inside])
    dropped = np.zeros(V.shape[0], dtype=complex)
    np.add.at(dropped, rows[~inside], contributions[~inside])

    outside = int(np.count_nonzero(~inside))
    if outside:
        logger.debug('%d of %d squeezed cells fell outside [%g, %g] Hz and were dropped',
                     outside, targets.size, grid[0], grid[-1])
    return SSTResult(energy, grid, V.time_grid, omega, variant, V.sigma, V.sample_rate,
                     V.nfft, V.onesided, dropped)


def phase_field(bundle: stft.TransformBundle, variant: Variant, threshold: float) -> PhaseField:
    V, V_tau_g, V_tau_gprime, dV_dt = bundle
    if variant in (Variant.FSST, Variant.REGULAR_PT_ADP):
        return phase.omega_conventional(V, dV_dt, threshold)
    elif variant is Variant.ADP_FSST:
        return phase.omega_adaptive(V, V_tau_gprime, dV_dt, threshold=threshold)
    elif variant in (Variant.FSST2, Variant.REGULAR_PT_ADP2):
        return phase.omega_conventional_2nd(V, V_tau_g, dV_dt, threshold)
    elif variant is Variant.ADP_FSST2:
        return phase.omega_adaptive_2nd(V, V_tau_g, V_tau_gprime, dV_dt, threshold=threshold)
    else:
        raise DomainError('Invalid variant {!r}'.format(variant))


def synchrosqueeze(signal: Signal, sigma: TimeVaryingParam, variant: Variant,
                   epsilon: float = window.DEFAULT_EPSILON, nfft: Optional[int] = None,
                   threshold: float = phase.VALID_THRESHOLD,
                   onesided: Optional[bool] = None) -> SSTResult:
    if variant.conventional and not sigma.is_constant:
        raise DomainError('{} needs a constant sigma'.format(variant.name))
    bundle = stft.transform_bundle(signal, sigma, epsilon, nfft, onesided)
    return squeeze(bundle.V, phase_field(bundle, variant, threshold), variant)


def recover_band(sst: SSTResult, band, sigma: Optional[TimeVaryingParam] = None,
                 real_input: Optional[bool] = None) -> Signal:
    """Sums the energy inside a boolean (time, frequency) mask and rescales it to a signal.

    :type sst: SSTResult
    :type band: np.ndarray  # same shape as sst.energy
    :rtype: Signal
    """
    band = np.asarray(band, dtype=bool)
    if band.shape != sst.shape:
        raise DomainError('band has shape {}, expected {}'.format(band.shape, sst.shape))
    sigma = sst.sigma if sigma is None else sigma
    if real_input is None:
        real_input = sst.onesided
    if sst.onesided and not real_input:
        raise DomainError('complex recovery needs the two-sided band')

    weights = stft.recovery_weights(sst.shape[1], sst.nfft, sst.onesided)
    total = (sst.energy * band) @ weights
    if sst.variant.conventional:
        scale = 1.0 / window.window_peak(sigma.sigma[0])
    else:
        scale = sigma.sigma / window.gaussian(0.0)
    samples = total * scale
    return Signal(samples.real if real_input else samples, sst.sample_rate, sst.time_grid[0])


def reconstruct_component(sst: SSTResult, ridge, gamma_bins: Optional[int] = None,
                          sigma: Optional[TimeVaryingParam] = None,
                          real_input: Optional[bool] = None) -> Signal:
    """Sums the energy within gamma_bins of the ridge and rescales it to a signal.

    Ridge entries of -1 mark times where the component is absent; they
    reconstruct to zero. gamma_bins=None sums the whole band.

    :type sst: SSTResult
    :type ridge: np.ndarray  # one bin index per time
    :rtype: Signal
    """
    ridge = np.asarray(ridge, dtype=int)
    num_times, num_bins = sst.shape
    if ridge.shape != (num_times,):
        raise DomainError('ridge has shape {}, expected ({},)'.format(ridge.shape, num_times))
    if np.any(ridge >= num_bins) or np.any(ridge < -1):
        raise DomainError('ridge indices must lie in [-1, {})'.format(num_bins))
    if gamma_bins is not None and gamma_bins < 0:
        raise DomainError('gamma_bins must be non-negative, got {}'.format(gamma_bins))

    band = np.broadcast_to((ridge >= 0)[:, None], sst.shape)
    if gamma_bins is not None:
        band = band & (np.abs(np.arange(num_bins)[None, :] - ridge[:, None]) <= gamma_bins)
    return recover_band(sst, band, sigma, real_input)
