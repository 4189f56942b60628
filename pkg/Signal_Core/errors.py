# errors.py


class SimulationError(Exception):
    """Base class for every error raised by the simulator."""


class ConfigurationError(SimulationError, ValueError):
    """Invalid configuration, scenario, or a violated length contract."""


class InputError(SimulationError, ValueError):
    """Input data that cannot be processed (bit counts, frame alignment...)."""


class UndefinedMetricError(SimulationError, ValueError):
    """A metric was requested on data for which it is not defined."""


class ConfigFileError(ConfigurationError):
    """A run-configuration file could not be parsed; `line_no` is 1-based when known."""

    def __init__(self, message: str, line_no: int = None, path: str = None):
        self.line_no = line_no
        self.path = path
        where = path or "<config>"
        if line_no is not None:
            where = f"{where}:{line_no}"
        super().__init__(f"{where}: {message}")
