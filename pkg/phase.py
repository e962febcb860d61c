"""Phase transformations: instantaneous frequency fields computed from STFT ratios.

First order:   omega = Re{dV/dt / (i 2 pi V)} [+ (sigma'/sigma) Re{V^{tau g'} / (i 2 pi V)}]
Second order:  omega2 = omega - Re{P0 V^{tau g} / (i 2 pi V)} with
               P0 = [d_eta(dV/dt / V) + (sigma'/sigma) d_eta(V^{tau g'} / V)] / d_eta(V^{tau g} / V)

The bracketed sigma' terms are what the adaptive transforms add; the
conventional ones drop them. Cells where |d_eta(V^{tau g}/V)| falls below
the degeneracy tolerance keep the first-order value.

Near both ends of the signal the window reaches into zero padding, so the
fields there describe a truncated signal; interior_cells marks the rows
clear of that.
"""
import math
from collections import namedtuple
from typing import Optional

import numpy as np

import window
from errors import DomainError
from stft import TFMatrix, TimeVaryingParam
from util import safe_ratio

VALID_THRESHOLD = 1e-4
DEGENERACY_TOLERANCE = 1e-8

PhaseField = namedtuple('PhaseField', ['omega', 'valid_mask'])


def _check_grids(V: TFMatrix, *others: TFMatrix):
    for other in others:
        if not V.same_grid(other):
            raise DomainError('transforms are on different grids: {!r} vs {!r}'.format(V, other))


def valid_cells(V: TFMatrix, threshold: float) -> np.ndarray:
    magnitude = V.magnitude()
    peak = magnitude.max() if magnitude.size else 0.0
    if peak == 0:
        return np.zeros(V.shape, dtype=bool)
    return magnitude > threshold * peak


def interior_cells(V: TFMatrix, epsilon: float = window.DEFAULT_EPSILON) -> np.ndarray:
    """Cells whose sampled window stays inside the signal span."""
    radius = window.truncation_radius(V.sigma.sigma, epsilon)
    rows = (V.time_grid - radius >= V.time_grid[0]) & (V.time_grid + radius <= V.time_grid[-1])
    return np.broadcast_to(rows[:, None], V.shape)


def _field(omega: np.ndarray, mask: np.ndarray) -> PhaseField:
    return PhaseField(np.where(mask, omega, np.nan), mask)


def _imag_unit_ratio(numerator: np.ndarray, V: np.ndarray) -> np.ndarray:
    """Re{numerator / (i 2 pi V)}."""
    return (safe_ratio(numerator, V) / (2j * math.pi)).real


def _sigma_ratio(sigma: TimeVaryingParam) -> np.ndarray:
    return (sigma.sigma_prime / sigma.sigma)[:, None]


def _eta_derivative(values: np.ndarray, step: float) -> np.ndarray:
    edge_order = 2 if values.shape[1] >= 3 else 1
    return np.gradient(values, step, axis=1, edge_order=edge_order)


def _second_order(V: TFMatrix, V_tau_g: TFMatrix, dV_dt: TFMatrix, first: np.ndarray,
                  numerator_extra: Optional[np.ndarray], tolerance: float) -> np.ndarray:
    step = V.freq_step
    ratio = safe_ratio(V_tau_g.values, V.values)
    denominator = _eta_derivative(ratio, step)
    numerator = _eta_derivative(safe_ratio(dV_dt.values, V.values), step)
    if numerator_extra is not None:
        numerator = numerator + numerator_extra
    regular = np.abs(denominator) >= tolerance
    p0 = np.where(regular, safe_ratio(numerator, denominator), 0.0)
    return first - ((ratio * p0) / (2j * math.pi)).real


def omega_conventional(V: TFMatrix, dV_dt: TFMatrix, threshold: float = VALID_THRESHOLD) -> PhaseField:
    _check_grids(V, dV_dt)
    return _field(_imag_unit_ratio(dV_dt.values, V.values), valid_cells(V, threshold))


def omega_adaptive(V: TFMatrix, V_tau_gprime: TFMatrix, dV_dt: TFMatrix,
                   sigma: Optional[TimeVaryingParam] = None,
                   threshold: float = VALID_THRESHOLD) -> PhaseField:
    _check_grids(V, V_tau_gprime, dV_dt)
    sigma = V.sigma if sigma is None else sigma
    omega = (_imag_unit_ratio(dV_dt.values, V.values)
             + _sigma_ratio(sigma) * _imag_unit_ratio(V_tau_gprime.values, V.values))
    return _field(omega, valid_cells(V, threshold))


def omega_conventional_2nd(V: TFMatrix, V_tau_g: TFMatrix, dV_dt: TFMatrix,
                           threshold: float = VALID_THRESHOLD,
                           tolerance: float = DEGENERACY_TOLERANCE) -> PhaseField:
    _check_grids(V, V_tau_g, dV_dt)
    first = _imag_unit_ratio(dV_dt.values, V.values)
    omega = _second_order(V, V_tau_g, dV_dt, first, None, tolerance)
    return _field(omega, valid_cells(V, threshold))


def omega_adaptive_2nd(V: TFMatrix, V_tau_g: TFMatrix, V_tau_gprime: TFMatrix, dV_dt: TFMatrix,
                       sigma: Optional[TimeVaryingParam] = None,
                       threshold: float = VALID_THRESHOLD,
                       tolerance: float = DEGENERACY_TOLERANCE) -> PhaseField:
    _check_grids(V, V_tau_g, V_tau_gprime, dV_dt)
    sigma = V.sigma if sigma is None else sigma
    scale = _sigma_ratio(sigma)
    first = (_imag_unit_ratio(dV_dt.values, V.values)
             + scale * _imag_unit_ratio(V_tau_gprime.values, V.values))
    extra = scale * _eta_derivative(safe_ratio(V_tau_gprime.values, V.values), V.freq_step)
    omega = _second_order(V, V_tau_g, dV_dt, first, extra, tolerance)
    return _field(omega, valid_cells(V, threshold))
