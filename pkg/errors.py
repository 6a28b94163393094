"""
Exception hierarchy for dqhinf
"""
from typing import Optional


class DqHinfError(Exception):
    """Base class for every error raised by dqhinf"""


class ConstraintViolationError(DqHinfError, ValueError):
    """A value does not belong to the constrained set an operation requires"""


class DimensionMismatchError(DqHinfError, ValueError):
    """Array or joint vector length does not match the chain"""


class ConfigError(DqHinfError):
    """Malformed scenario configuration"""

    def __init__(self, message: str, line: Optional[int] = None, path: Optional[str] = None):
        self.message = message
        self.line = line
        self.path = path
        super().__init__(self.__str__())

    def __str__(self) -> str:
        location = self.path or '<config>'
        if self.line is not None:
            return f"{location}:{self.line}: {self.message}"
        return f"{location}: {self.message}"


class ChainFileError(ConfigError):
    """Missing or malformed chain file"""


class UnknownControllerError(ConfigError):
    """Controller kind not in the registry"""


class HorizonError(DqHinfError, ValueError):
    """Disturbance or trajectory sampled outside its horizon"""


class SimulationAbortedError(DqHinfError):
    """A run produced a non-finite control input"""

    def __init__(self, step: int, t: float, reason: str):
        self.step = step
        self.t = t
        self.reason = reason
        super().__init__(f"simulation aborted at step {step} (t={t:.6g} s): {reason}")


class ConvergenceError(DqHinfError):
    """Iterative solver did not reach its tolerance"""
