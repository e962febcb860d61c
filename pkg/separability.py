"""Separability of multicomponent signals from ground-truth IFs and chirp rates.

For neighbouring components k-1, k at one time:

    a_k = 2 pi alpha (|phi''_{k-1}| + |phi''_k|)
    b_k = phi'_k - phi'_{k-1}

Their enlarged support zones phi' +- alpha (1/sigma + 2 pi |phi''| sigma) are
disjoint exactly when a_k sigma^2 - b_k sigma + 2 alpha <= 0, i.e. for sigma
between 4 alpha / (b_k + sqrt(D)) and 4 alpha / (b_k - sqrt(D)) with
D = b_k^2 - 8 alpha a_k.

All functions take per-time sequences of IFs (and rates) sorted by IF; the
number of components may change from one time to the next.
"""
import logging
import math
from typing import List, Optional, Sequence, Tuple

import numpy as np

logger = logging.getLogger(__name__)


class SeparabilityReport:
    def __init__(self, a: List[np.ndarray], b: List[np.ndarray], discriminant: List[np.ndarray],
                 sigma_lower: List[np.ndarray], sigma_upper: List[np.ndarray]):
        self.a = a
        self.b = b
        self.discriminant = discriminant
        self.sigma_lower = sigma_lower
        self.sigma_upper = sigma_upper

    @property
    def separable(self) -> np.ndarray:
        """True where every pair has a real interval and the intervals intersect."""
        return np.array([
            bool(b.size) and bool(np.all(b > 0)) and bool(np.all(d >= 0)) and
            float(np.max(lo)) <= float(np.min(hi))
            for b, d, lo, hi in zip(self.b, self.discriminant, self.sigma_lower, self.sigma_upper)
        ])

    def __len__(self):
        return len(self.b)

    def __repr__(self):
        return 'SeparabilityReport(<{} times, {} separable>)'.format(
            len(self), int(self.separable.sum()))


def _pairs(values: Sequence[float]) -> Tuple[np.ndarray, np.ndarray]:
    values = np.asarray(values, dtype=float)
    return values[:-1], values[1:]


def sigma1(ifs: Sequence[Sequence[float]], alpha: float) -> Optional[np.ndarray]:
    """max_k 2 alpha / (phi'_k - phi'_{k-1}) per time; NaN with fewer than two
    components, inf where adjacent IFs coincide. None when no time has a pair.

    :rtype: np.ndarray | None
    """
    out = np.full(len(ifs), np.nan)
    for n, values in enumerate(ifs):
        if len(values) < 2:
            continue
        lower, upper = _pairs(values)
        with np.errstate(divide='ignore'):
            out[n] = np.max(2 * alpha / (upper - lower))
    if np.all(np.isnan(out)):
        return None
    return out


def _bounds(ifs_t, rates_t, alpha):
    lower_if, upper_if = _pairs(ifs_t)
    lower_rate, upper_rate = _pairs(np.abs(np.asarray(rates_t, dtype=float)))
    a = 2 * math.pi * alpha * (lower_rate + upper_rate)
    b = upper_if - lower_if
    discriminant = b * b - 8 * alpha * a
    root = np.sqrt(np.where(discriminant >= 0, discriminant, np.nan))
    with np.errstate(divide='ignore', invalid='ignore'):
        lower = np.where(b + root > 0, 4 * alpha / (b + root), np.inf)
        upper = np.where(b - root > 0, 4 * alpha / (b - root), np.inf)
    lower = np.where(discriminant >= 0, lower, np.nan)
    upper = np.where(discriminant >= 0, upper, np.nan)
    return a, b, discriminant, lower, upper


def separability_report(ifs, chirp_rates, alpha: float) -> SeparabilityReport:
    if len(ifs) != len(chirp_rates):
        raise ValueError('ifs and chirp_rates cover {} and {} times'.format(len(ifs), len(chirp_rates)))
    fields = ([], [], [], [], [])
    for f, r in zip(ifs, chirp_rates):
        for field, value in zip(fields, _bounds(f, r, alpha)):
            field.append(value)
    return SeparabilityReport(*fields)


def sigma2(ifs, chirp_rates, alpha: float) -> Tuple[np.ndarray, SeparabilityReport]:
    """Smallest sigma keeping every enlarged zone disjoint, per time.

    NaN where a pair cannot be separated or fewer than two components are active.
    """
    report = separability_report(ifs, chirp_rates, alpha)
    out = np.full(len(report), np.nan)
    for n, (d, lower) in enumerate(zip(report.discriminant, report.sigma_lower)):
        if lower.size and np.all(d >= 0):
            out[n] = np.max(lower)
    blocked = int(np.count_nonzero([d.size and np.any(d < 0) for d in report.discriminant]))
    if blocked:
        logger.warning('%d of %d times hold a pair that no sigma separates', blocked, len(report))
    return out, report


def support_zone(if_value, chirp_rate, sigma, alpha: float):
    """Enlarged zone phi' +- alpha (1/sigma + 2 pi |phi''| sigma)."""
    half = alpha * (1.0 / sigma + 2 * math.pi * np.abs(chirp_rate) * sigma)
    return if_value - half, if_value + half


def exact_support_zone(if_value, chirp_rate, sigma, alpha: float):
    """Zone phi' +- alpha sqrt(1/sigma^2 + (2 pi phi'' sigma)^2) where |V| >= epsilon times its ridge value."""
    half = alpha * np.sqrt(1.0 / sigma ** 2 + (2 * math.pi * np.asarray(chirp_rate) * sigma) ** 2)
    return if_value - half, if_value + half


def zones_disjoint(ifs_t, rates_t, sigma: float, alpha: float) -> bool:
    low, high = support_zone(np.asarray(ifs_t, dtype=float), np.asarray(rates_t, dtype=float),
                             sigma, alpha)
    return bool(np.all(high[:-1] <= low[1:]))


def well_separated(ifs, chirp_rates, alpha: float) -> np.ndarray:
    """Per time: 4 alpha sqrt(pi) sqrt(|phi''_k| + |phi''_{k-1}|) <= b_k for every
    pair, and the admissible sigma intervals of all pairs intersect."""
    report = separability_report(ifs, chirp_rates, alpha)
    separable = report.separable
    verdict = np.zeros(len(report), dtype=bool)
    for n, (f, r) in enumerate(zip(ifs, chirp_rates)):
        if len(f) < 2:
            continue
        lower_rate, upper_rate = _pairs(np.abs(np.asarray(r, dtype=float)))
        b = report.b[n]
        first = np.all(4 * alpha * math.sqrt(math.pi) * np.sqrt(lower_rate + upper_rate) <= b)
        verdict[n] = bool(first and separable[n])
    return verdict
