"""POWER9 CPI breakdown from PMU counters and memory/compute boundness."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Literal

RUN_CYC = "PM_RUN_CYC"
STALL = "PM_CMPLU_STALL"
STALL_THRD = "PM_CMPLU_STALL_THRD"
CMPL = "PM_1PLUS_PPC_CMPL"
NTC_ISSUE_HOLD = "PM_NTC_ISSUE_HOLD"
ICT_NOSLOT = "PM_ICT_NOSLOT_CYC"
STALL_LSU = "PM_CMPLU_STALL_LSU"
STALL_EXEC = "PM_CMPLU_STALL_EXEC_UNIT"

# parent of every counter in the breakdown tree
CPI_TREE = {
    STALL: RUN_CYC,
    CMPL: RUN_CYC,
    ICT_NOSLOT: RUN_CYC,
    STALL_THRD: STALL,
    NTC_ISSUE_HOLD: STALL,
    STALL_LSU: STALL,
    STALL_EXEC: STALL,
}
COUNTERS = (RUN_CYC, STALL, STALL_THRD, CMPL, NTC_ISSUE_HOLD, ICT_NOSLOT, STALL_LSU, STALL_EXEC)

Boundness = Literal["memory_bound", "compute_bound", "mixed"]

__all__ = [
    "COUNTERS",
    "CPI_TREE",
    "CpiValidationError",
    "PmuSample",
    "Thresholds",
    "classify_boundness",
    "cpi_breakdown",
    "tree_level",
]


class CpiValidationError(ValueError):
    pass


def tree_level(counter: str) -> int:
    depth = 0
    while counter != RUN_CYC:
        counter = CPI_TREE[counter]
        depth += 1
    return depth


@dataclass
class PmuSample:
    """Counter values for one kernel run; absent counters read as zero."""

    kernel: str
    counters: dict[str, int] = field(default_factory=dict)

    def validate(self) -> None:
        unknown = set(self.counters) - set(COUNTERS)
        if unknown:
            raise CpiValidationError(f"{self.kernel}: unknown counters {sorted(unknown)}")
        run = self.counters.get(RUN_CYC)
        if not run or run <= 0:
            raise CpiValidationError(f"{self.kernel}: {RUN_CYC} missing or zero")
        for name, value in self.counters.items():
            if value < 0:
                raise CpiValidationError(f"{self.kernel}: {name} is negative")
        for child, parent in CPI_TREE.items():
            if self.get(child) > self.get(parent):
                raise CpiValidationError(
                    f"{self.kernel}: {child} ({self.get(child)}) exceeds parent "
                    f"{parent} ({self.get(parent)})"
                )

    def get(self, counter: str) -> int:
        return self.counters.get(counter, 0)


def cpi_breakdown(sample: PmuSample) -> dict[str, float]:
    """Percent of run cycles per counter, ordered by tree level then name."""
    sample.validate()
    run = sample.counters[RUN_CYC]
    names = sorted(sample.counters, key=lambda c: (tree_level(c), COUNTERS.index(c)))
    return {c: 100.0 * sample.counters[c] / run for c in names}


@dataclass(frozen=True)
class Thresholds:
    lsu_min: float = 55.0
    lsu_over_exec: float = 2.0
    cmpl_min: float = 50.0


def classify_boundness(pct: dict[str, float], th: Thresholds = Thresholds()) -> Boundness:
    """Memory-bound when LSU stalls dominate, compute-bound when completion dominates.

    memory_bound: LSU% >= lsu_min and LSU% >= lsu_over_exec * EXEC%.
    compute_bound: CMPL% >= cmpl_min and CMPL% > STALL%.
    """
    lsu = pct.get(STALL_LSU, 0.0)
    exe = pct.get(STALL_EXEC, 0.0)
    cmpl = pct.get(CMPL, 0.0)
    stall = pct.get(STALL, 0.0)
    if lsu >= th.lsu_min and lsu >= th.lsu_over_exec * exe:
        return "memory_bound"
    if cmpl >= th.cmpl_min and cmpl > stall:
        return "compute_bound"
    return "mixed"
