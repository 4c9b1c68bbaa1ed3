"""The seed-generated class corpus used by the acceptance suite and scripts."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Optional

from .codec import default_cap
from .core import Dyadic, LevelSchedule, parse_schedule
from .invariants import CheckReport, check_all
from .labelling import ConstructionTerminated, init
from .piclass import EnumeratedClass, generate_class

SCHEDULES = ("geometric:2", "log:2,3")


@dataclass(frozen=True)
class CorpusSpec:
    size: int = 200
    first_seed: int = 0
    measure_cap: str = "3/8"
    min_depth: int = 4
    max_depth: int = 12
    max_stages: int = 4
    schedules: tuple[str, ...] = SCHEDULES

    def depth(self, k: int) -> int:
        return self.min_depth + k % (self.max_depth - self.min_depth + 1)

    def stages(self, k: int) -> int:
        return 1 + k % self.max_stages

    def classes(self) -> Iterator[tuple[int, EnumeratedClass]]:
        cap = Dyadic.parse(self.measure_cap)
        for k in range(self.size):
            seed = self.first_seed + k
            yield seed, generate_class(seed, cap, self.depth(k), self.stages(k))

    def parsed_schedules(self) -> list[LevelSchedule]:
        return [parse_schedule(s) for s in self.schedules]


@dataclass
class RunSummary:
    seed: int
    schedule: str
    stages: int = 0
    dvls: int = 0
    terminated: bool = False
    reached: bool = False
    first_failure: Optional[CheckReport] = None
    kinds: dict[str, int] = field(default_factory=dict)


def run_checked(seed: int, schedule: LevelSchedule, cls: EnumeratedClass, dvls_goal: int = 10, cap: Optional[int] = None) -> RunSummary:
    """Run until ``dvls_goal`` is reached, checking every stage."""
    cap = default_cap(dvls_goal, cls) if cap is None else cap
    out = RunSummary(seed, schedule.name)
    st = init(schedule, cls)
    report = check_all(st)
    if not report.ok:
        out.first_failure = report
    while st.dvls < dvls_goal and st.stage < cap:
        try:
            ev = st.step()
        except ConstructionTerminated:
            out.terminated = True
            break
        out.kinds[ev.kind] = out.kinds.get(ev.kind, 0) + 1
        report = check_all(st)
        if not report.ok and out.first_failure is None:
            out.first_failure = report
    out.stages = st.stage
    out.dvls = st.dvls
    out.reached = st.dvls >= dvls_goal
    return out
