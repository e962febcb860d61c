from stft import TimeVaryingParam


def policy(signal, components, config) -> TimeVaryingParam:
    return TimeVaryingParam.constant(config.constant_sigma, len(signal))
