from typing import Sequence

import numpy as np
from scipy.ndimage import convolve1d


def uniform_grid(start: float, stop: float, step: float) -> np.ndarray:
    """Returns start, start - step, ... down to stop (inclusive) when start > stop,
    or the ascending grid otherwise. The count is rounded so the endpoint survives
    floating point drift."""
    if step <= 0:
        raise ValueError('step must be positive, got {}'.format(step))
    count = int(round(abs(stop - start) / step)) + 1
    direction = -1.0 if stop < start else 1.0
    return start + direction * step * np.arange(count)


def safe_ratio(numerator: np.ndarray, denominator: np.ndarray) -> np.ndarray:
    """Elementwise numerator / denominator, 0 where the denominator vanishes."""
    out = np.zeros(np.broadcast(numerator, denominator).shape, dtype=complex)
    np.divide(numerator, denominator, out=out, where=denominator != 0)
    return out


def smooth(track: np.ndarray, taps: Sequence[float]) -> np.ndarray:
    """Filters a per-time track with reflect padding at both ends."""
    return convolve1d(np.asarray(track, dtype=float), np.asarray(taps, dtype=float),
                      mode='reflect')


def local_sum(values: np.ndarray, half_width: int) -> np.ndarray:
    """Sums values over [n - half_width, n + half_width], clipped to the array."""
    return convolve1d(np.asarray(values, dtype=float), np.ones(2 * half_width + 1), mode='constant')


def nearest_bins(frequencies: np.ndarray, grid_start: float, step: float) -> np.ndarray:
    return np.rint((frequencies - grid_start) / step).astype(int)


def interpolate_nonfinite(values: np.ndarray) -> np.ndarray:
    """Replaces NaN and inf entries by linear interpolation over the finite ones.
    Raises ValueError when nothing is finite."""
    values = np.asarray(values, dtype=float)
    finite = np.isfinite(values)
    if not finite.any():
        raise ValueError('no finite values to interpolate from')
    if finite.all():
        return values.copy()
    index = np.arange(values.size)
    return np.interp(index, index[finite], values[finite])
