"""Gaussian windows and the auxiliary kernels used by the transforms.

The unit Gaussian is g(u) = exp(-u^2/2)/sqrt(2 pi) and the window of width
sigma is g_sigma(tau) = g(tau/sigma)/sigma, whose Fourier transform is
exp(-2 pi^2 sigma^2 xi^2). Every kernel is evaluated from its continuous
definition; the 1/Fs quadrature weight belongs to the transform.

Available Classes:
    - WindowKind: which kernel a transform uses
    - WindowSpec: a window width together with its threshold epsilon

Available Functions:
    - alpha_from_epsilon: half-width of the epsilon support of the unit spectrum
    - kernel: evaluates any kernel on arbitrary (tau, sigma) arrays
    - sample_window: samples a kernel on the tap grid of a sample rate
    - window_duration: effective duration 4 pi sigma alpha
"""
import math
from collections import namedtuple
from enum import Enum

import numpy as np

from errors import DomainError, ResolutionError

# Tail cut in units of sigma. exp(-32) keeps the boundary term of the
# integration-by-parts identity below double precision noise.
TAIL_SIGMAS = 8.0

DEFAULT_EPSILON = 0.2

Kernel = namedtuple('Kernel', ['offsets', 'weights', 'sample_rate'])


class WindowKind(Enum):
    """Kernels, with u = tau/sigma:

    G            g(u)/sigma
    G_PRIME      g'(u)/sigma
    TAU_G        (tau/sigma^2) g(u)
    TAU_G_PRIME  (tau/sigma^2) g'(u)
    """
    G = 'g'
    G_PRIME = 'g_prime'
    TAU_G = 'tau_g'
    TAU_G_PRIME = 'tau_g_prime'


def alpha_from_epsilon(epsilon: float) -> float:
    """Returns alpha such that exp(-2 pi^2 xi^2) < epsilon exactly when |xi| > alpha.

    :type epsilon: float
    :rtype: float
    """
    if not 0.0 < epsilon < 1.0:
        raise DomainError('epsilon must lie in (0, 1), got {}'.format(epsilon))
    return math.sqrt(-2.0 * math.log(epsilon)) / (2.0 * math.pi)


def gaussian(u):
    return np.exp(-0.5 * np.square(u)) / math.sqrt(2.0 * math.pi)


def gaussian_spectrum(xi, sigma=1.0):
    return np.exp(-2.0 * math.pi ** 2 * np.square(sigma * np.asarray(xi, dtype=float)))


def window_peak(sigma):
    """g_sigma(0) = g(0)/sigma."""
    return gaussian(0.0) / sigma


def kernel(kind: WindowKind, tau, sigma) -> np.ndarray:
    u = np.asarray(tau, dtype=float) / sigma
    base = gaussian(u) / sigma
    if kind is WindowKind.G:
        return base
    elif kind is WindowKind.G_PRIME:
        return -u * base
    elif kind is WindowKind.TAU_G:
        return u * base
    elif kind is WindowKind.TAU_G_PRIME:
        return -u * u * base
    else:
        raise DomainError('Invalid window kind {!r}'.format(kind))


def truncation_radius(sigma, epsilon=DEFAULT_EPSILON):
    return np.maximum(2.0 * math.pi * alpha_from_epsilon(epsilon), TAIL_SIGMAS) * np.asarray(sigma)


def half_taps(sigma, epsilon, sample_rate) -> np.ndarray:
    """Number of taps on each side of the centre tap, per sigma value."""
    return np.floor(truncation_radius(sigma, epsilon) * sample_rate).astype(int)


class WindowSpec:
    def __init__(self, sigma: float, epsilon: float = DEFAULT_EPSILON):
        if not (np.isfinite(sigma) and sigma > 0):
            raise DomainError('sigma must be positive, got {}'.format(sigma))
        self.sigma = float(sigma)
        self.epsilon = float(epsilon)
        self.alpha = alpha_from_epsilon(epsilon)

    @property
    def truncation_radius(self) -> float:
        """Largest |tau| kept when the window is sampled, in seconds."""
        return float(truncation_radius(self.sigma, self.epsilon))

    def __eq__(self, other):
        return (isinstance(other, WindowSpec) and
                (self.sigma, self.epsilon) == (other.sigma, other.epsilon))

    def __repr__(self):
        return 'WindowSpec({w.sigma!r}, {w.epsilon!r})'.format(w=self)


def sample_window(spec: WindowSpec, kind: WindowKind, sample_rate: float) -> Kernel:
    """Samples a kernel at offsets k/Fs covering the truncation radius.

    :type spec: WindowSpec
    :type kind: WindowKind
    :type sample_rate: float
    :rtype: Kernel
    """
    if sample_rate <= 0:
        raise DomainError('sample_rate must be positive, got {}'.format(sample_rate))
    taps = int(half_taps(spec.sigma, spec.epsilon, sample_rate))
    if taps < 1:
        raise ResolutionError('sigma={} yields fewer than 3 taps at {} Hz'.format(
            spec.sigma, sample_rate))
    offsets = np.arange(-taps, taps + 1)
    return Kernel(offsets, kernel(kind, offsets / sample_rate, spec.sigma), sample_rate)


def window_duration(spec: WindowSpec) -> float:
    return 4.0 * math.pi * spec.sigma * spec.alpha
