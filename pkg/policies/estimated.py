"""sigma tracks estimated from the signal alone."""
import estimation
from squeeze import Variant
from stft import TimeVaryingParam


def sigma_u(signal, components, config) -> TimeVaryingParam:
    chosen, _ = estimation.sigma_u_track(signal, config.estimator)
    return TimeVaryingParam.from_sigma(config.estimator.sigma_grid[chosen], signal.sample_rate)


def sigma_est(signal, components, config) -> TimeVaryingParam:
    return estimation.algorithm1(signal, config.estimator).sigma


def sigma_est2(signal, components, config) -> TimeVaryingParam:
    return estimation.algorithm2(signal, config.estimator).sigma


def sigma_re(signal, components, config) -> TimeVaryingParam:
    return estimation.sigma_renyi_sst(signal, config.estimator, Variant.FSST)


def sigma_re2(signal, components, config) -> TimeVaryingParam:
    return estimation.sigma_renyi_sst(signal, config.estimator, Variant.FSST2)
