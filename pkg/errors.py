"""Exceptions raised by the time-frequency toolkit.

Numerical failures derive from ComputeError so the command line can map
them to exit code 3. Bad configuration and malformed input files raise
ConfigError and ParseError, which map to exit code 2.
"""


class ComputeError(Exception):
    """Base class for failures inside a transform or estimator."""


class DomainError(ComputeError, ValueError):
    """An argument lies outside the domain an operation is defined on."""


class ResolutionError(ComputeError, ValueError):
    """A window is too narrow to be sampled at the given sample rate."""


class RangeError(ComputeError, IndexError):
    """A ground-truth query falls outside a component's support."""


class ConfigError(ValueError):
    def __init__(self, field: str, message: str):
        super().__init__('{}: {}'.format(field, message))
        self.field = field


class ParseError(ValueError):
    def __init__(self, line: int, message: str):
        super().__init__('line {}: {}'.format(line, message))
        self.line = line
