"""Planning options on top of the frontier: fastest strategy under a memory
limit, fewest devices that fit, and the time/parallelism curve"""

import logging
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Sequence, Tuple, Union

from .configs import build_config_space
from .costmodel import CostTables, StrategyCost, SyntheticOpModel, build_cost_tables
from .solver import FTOptions, FrontierResult, ft
from ..graph.models import ComputationGraph, DeviceGraph, default_device_graph
from ..utils.errors import NoFeasibleCount

logger = logging.getLogger(__name__)

DeviceFamily = Callable[[int], DeviceGraph]


@dataclass(frozen=True)
class Infeasible:
    """No frontier point fits; a result, not an error"""

    reason: str

    def __bool__(self) -> bool:
        return False


@dataclass(frozen=True)
class Choice:
    memory: float
    time: float
    strategy: Dict[int, int]
    cost: Optional[StrategyCost] = None


Outcome = Union[Choice, Infeasible]


def pick_min_time(result: FrontierResult, memory_limit: float) -> Outcome:
    """Fastest frontier point using at most ``memory_limit`` bytes"""
    # times fall as memory grows, so scan from the fast end
    for i in reversed(range(len(result.frontier))):
        t = result.frontier[i]
        if t.memory <= memory_limit:
            cost = result.costs[i] if i < len(result.costs) else None
            return Choice(memory=t.memory, time=t.time, strategy=result.strategies[i], cost=cost)
    if len(result.frontier):
        needed = result.frontier.min_memory().memory
        return Infeasible(f"needs at least {needed} bytes, limit is {memory_limit}")
    return Infeasible("empty frontier")


def mini_time(g: ComputationGraph, dev: Optional[DeviceGraph], tables: CostTables,
              memory_limit: float = float('inf'), options: Optional[FTOptions] = None) -> Outcome:
    return pick_min_time(ft(g, dev, tables, options), memory_limit)


def device_family(template: Optional[DeviceGraph] = None) -> DeviceFamily:
    """Device graphs per count, derived from ``template`` when one is given"""
    def build(count: int) -> DeviceGraph:
        if template is None:
            return default_device_graph(count)
        if template.device_count == count:
            return template
        return template.resized(count)
    return build


class ParallelismSweep:
    """Frontier per device count, computed once each.

    The config space and the cost tables are rebuilt for every count since
    the number of configs per operator depends on it.
    """

    def __init__(self, g: ComputationGraph, family: Optional[DeviceFamily] = None,
                 op_model: Optional[SyntheticOpModel] = None, options: Optional[FTOptions] = None,
                 max_rank: int = 2):
        self.g = g
        self.family = family or device_family()
        self.op_model = op_model or SyntheticOpModel()
        self.options = options or FTOptions()
        self.max_rank = max_rank
        self._results: Dict[int, FrontierResult] = {}

    def result(self, count: int) -> FrontierResult:
        if count not in self._results:
            dev = self.family(count)
            space = build_config_space(self.g, count, self.max_rank)
            tables = build_cost_tables(self.g, space, dev, self.op_model,
                                       threads=self.options.threads, max_rank=self.max_rank)
            self._results[count] = ft(self.g, dev, tables, self.options)
            logger.info("%d devices: %d frontier points", count, len(self._results[count]))
        return self._results[count]


def _check_counts(counts: Sequence[int]) -> List[int]:
    counts = list(counts)
    if not counts:
        raise ValueError("counts must not be empty")
    if any(c < 1 for c in counts):
        raise ValueError("device counts must be >= 1")
    if counts != sorted(counts):
        raise ValueError("counts must be sorted ascending")
    return counts


def mini_parallelism(sweep: ParallelismSweep, per_device_memory: float,
                     counts: Sequence[int]) -> Tuple[int, Choice]:
    """Smallest device count whose frontier has a point within ``per_device_memory``"""
    for count in _check_counts(counts):
        outcome = pick_min_time(sweep.result(count), per_device_memory)
        if outcome:
            return count, outcome
        logger.debug("%d devices: %s", count, outcome.reason)
    raise NoFeasibleCount(f"No device count in {list(counts)} fits in {per_device_memory} bytes per device")


def profile(sweep: ParallelismSweep, per_device_memory: float,
            counts: Sequence[int]) -> List[Tuple[int, Outcome]]:
    """(count, fastest choice or Infeasible) for every count"""
    return [(count, pick_min_time(sweep.result(count), per_device_memory))
            for count in _check_counts(counts)]
