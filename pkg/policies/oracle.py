"""sigma tracks computed from the ground-truth IFs and chirp rates of a builtin signal."""
import logging

import numpy as np

import separability
import window
from errors import DomainError
from signals import ground_truth_tracks
from stft import TimeVaryingParam
from util import interpolate_nonfinite

logger = logging.getLogger(__name__)


def _as_param(track, signal, config, name) -> TimeVaryingParam:
    if track is None or not np.any(np.isfinite(track)):
        raise DomainError('{} is undefined at every time'.format(name))
    missing = int(np.count_nonzero(~np.isfinite(track)))
    if missing:
        logger.warning('%s undefined at %d of %d times, filled by interpolation', name, missing, track.size)
    grid = config.estimator.sigma_grid
    track = np.clip(interpolate_nonfinite(track), grid.min(), grid.max())
    return TimeVaryingParam.from_sigma(track, signal.sample_rate)


def _truth(signal, components):
    if not components:
        raise DomainError('the oracle policies need ground-truth components')
    return ground_truth_tracks(components, signal.times)


def sigma1_policy(signal, components, config) -> TimeVaryingParam:
    ifs, _ = _truth(signal, components)
    return _as_param(separability.sigma1(ifs, window.alpha_from_epsilon(config.epsilon)),
                     signal, config, 'sigma1')


def sigma2_policy(signal, components, config) -> TimeVaryingParam:
    ifs, rates = _truth(signal, components)
    track, _ = separability.sigma2(ifs, rates, window.alpha_from_epsilon(config.epsilon))
    return _as_param(track, signal, config, 'sigma2')
