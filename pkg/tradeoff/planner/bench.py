"""Timing of dynamic programming against FT-Elimination on chains"""

import logging
import time
from dataclasses import asdict, dataclass
from typing import List, Sequence

from .eliminate import ElimState
from .fixtures import gen_fixture
from .oracle import compare
from .solver import ft_elimination, ldp

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class BenchRow:
    k: int
    ldp_s: float
    ft_elimination_s: float
    frontier_size: int

    @property
    def ratio(self) -> float:
        return self.ft_elimination_s / self.ldp_s if self.ldp_s > 0 else float('inf')

    def to_dict(self) -> dict:
        row = asdict(self)
        row['ratio'] = self.ratio
        return row


def benchmark_linear(n: int = 16, ks: Sequence[int] = (8, 16, 32), seed: int = 0,
                     threads: int = 1) -> List[BenchRow]:
    """Time both solvers on an n-operator chain for each config count in ``ks``"""
    if n < 2:
        raise ValueError("n must be >= 2")
    rows = []
    for k in ks:
        g, tables = gen_fixture('chain', n, k, seed)
        st = ElimState.from_tables(g, tables, threads=threads)

        started = time.perf_counter()
        by_ldp = ldp(st, threads)
        ldp_s = time.perf_counter() - started

        started = time.perf_counter()
        by_elimination = ft_elimination(st)
        elimination_s = time.perf_counter() - started

        missing, extra = compare(by_elimination, by_ldp)
        if missing or extra:
            raise RuntimeError(f"ldp and ft_elimination disagree at k={k}: {missing} vs {extra}")
        rows.append(BenchRow(k=k, ldp_s=ldp_s, ft_elimination_s=elimination_s, frontier_size=len(by_ldp)))
        logger.info("k=%d: ldp %.4fs, ft_elimination %.4fs", k, ldp_s, elimination_s)
    return rows
