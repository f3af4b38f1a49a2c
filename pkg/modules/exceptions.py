"""
Exceptions Module

Error types raised by the simulator. The CLI maps ConfigError to exit code 1
and every other BoardSimError to exit code 2.
"""


class BoardSimError(Exception):
    """Base class for all simulator errors"""


class ConfigError(BoardSimError, ValueError):
    """Invalid scenario, preset or configuration value"""

    def __init__(self, message: str, key: str = None):
        super().__init__(message)
        self.key = key


class InsufficientDataError(BoardSimError, ValueError):
    """Not enough (or degenerate) data for an estimator"""


class ConvergenceError(BoardSimError, RuntimeError):
    """An iterative method did not converge"""


class SimulationError(BoardSimError, RuntimeError):
    """A simulation run failed"""

    def __init__(self, message: str, run_index: int = None):
        super().__init__(message)
        self.run_index = run_index
