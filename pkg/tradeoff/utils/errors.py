"""Error types raised by the planner

Each error also derives from the built-in exception a caller would expect,
so ``except ValueError`` keeps working for input problems.
"""

from typing import List, Optional


class TradeoffError(Exception):
    """Base class for all planner errors"""


class CycleDetected(TradeoffError, ValueError):
    """The computation graph is not acyclic"""


class InvalidConfig(TradeoffError, ValueError):
    """A tensor map does not fit the tensor shape or device mesh"""


class ProfileOutOfRange(TradeoffError, ValueError):
    """A message is larger than the largest profiled size"""


class OverlappingStrategies(TradeoffError, ValueError):
    """Two partial strategies assign the same operator"""


class PreconditionViolated(TradeoffError, ValueError):
    """An elimination was requested where it does not apply"""


class NotLinear(TradeoffError, ValueError):
    """A linear graph was required"""


class TooLarge(TradeoffError, ValueError):
    """The strategy space exceeds the brute-force limit"""


class Unreachable(TradeoffError, RuntimeError):
    """No sequence of collectives connects two tensor layouts"""


class SpaceExplosion(TradeoffError, RuntimeError):
    """A composite configuration space grew past the configured cap"""


class NotLinearizable(TradeoffError, RuntimeError):
    """Eliminations could not reduce the graph to a linear one"""


class BrokenProvenance(TradeoffError, RuntimeError):
    """A frontier tuple cannot be unrolled into a full strategy"""


class NoFeasibleCount(TradeoffError, RuntimeError):
    """No candidate device count fits the memory budget"""


class MissingCost(TradeoffError, KeyError):
    """A cost table lacks a required key"""

    def __str__(self):
        return str(self.args[0]) if self.args else "missing cost"


class MissingScheme(TradeoffError, KeyError):
    """A device graph has no partition scheme for a group size"""

    def __str__(self):
        return str(self.args[0]) if self.args else "missing partition scheme"


class FileFormatError(TradeoffError, ValueError):
    """An input file failed to parse or validate"""

    def __init__(self, path: str, errors: List[str], message: Optional[str] = None):
        self.path = str(path)
        self.errors = list(errors)
        detail = "; ".join(self.errors)
        super().__init__(message or f"{self.path}: {detail}")
