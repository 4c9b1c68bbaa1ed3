"""Stage-by-stage labelling of the full binary tree.

A label ``x_sigma`` is represented by the bit string ``sigma`` itself; the
state maps labelled tree nodes to their labels.  Every stage is either
expansionary (each active leaf receives labels ``sigma*0`` and ``sigma*1`` on
its leftmost and rightmost extensions one level up) or adaptive (a leaf that
entered the filtered enumeration ``D`` is cloned above the deepest unsaturated
active clone on its chain).
"""

from __future__ import annotations

import json
import logging
from collections import Counter
from dataclasses import dataclass, field
from typing import Callable, Iterable, Iterator, Optional

from .core import EMPTY, BitString, Dyadic, LevelSchedule, ONE, ScheduleCheck, has_prefix_in, parse_schedule, validate_schedule, weight
from .piclass import EnumeratedClass

log = logging.getLogger(__name__)

INIT = "Init"
EXPANSIONARY = "Expansionary"
ADAPTIVE = "Adaptive"
TERMINATED = "Terminated"


class HypothesisError(ValueError):
    """The schedule's certified sum is not strictly below ``1 - mu(Q)``."""

    def __init__(self, message: str, check: ScheduleCheck | None = None, budget: Dyadic | None = None):
        super().__init__(message)
        self.check = check
        self.budget = budget


class CapExhausted(RuntimeError):
    def __init__(self, message: str, stage: int):
        super().__init__(message)
        self.stage = stage


class ConstructionTerminated(RuntimeError):
    """No unsaturated clone was left to receive a dead branch."""

    def __init__(self, event: "StageEvent"):
        super().__init__(f"construction terminated at stage {event.stage} (delta={event.d_append})")
        self.event = event


@dataclass
class StageEvent:
    kind: str
    stage: int
    placements: list[tuple[BitString, BitString]] = field(default_factory=list)
    deactivations: list[BitString] = field(default_factory=list)
    d_append: Optional[BitString] = None

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "stage": self.stage,
            "placements": [[s, sigma] for s, sigma in self.placements],
            "deactivations": list(self.deactivations),
            "d_append": self.d_append,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, d: dict) -> "StageEvent":
        return cls(
            kind=d["kind"],
            stage=int(d["stage"]),
            placements=[(p[0], p[1]) for p in d.get("placements", [])],
            deactivations=list(d.get("deactivations", [])),
            d_append=d.get("d_append"),
        )

    @classmethod
    def from_json(cls, line: str) -> "StageEvent":
        return cls.from_dict(json.loads(line))


def dumps_trace(events: Iterable[StageEvent]) -> str:
    return "".join(e.to_json() + "\n" for e in events)


def loads_trace(text: str) -> list[StageEvent]:
    return [StageEvent.from_json(line) for line in text.splitlines() if line.strip()]


@dataclass(frozen=True)
class Snapshot:
    """Plain, engine-independent picture of the construction after one stage.

    ``labels`` may in principle hold a string twice (a corrupt trace); the
    checker is responsible for noticing.
    """

    schedule: LevelSchedule
    cls: EnumeratedClass
    stage: int
    dvls: int
    labels: tuple[tuple[BitString, BitString], ...]
    active: frozenset[BitString]
    D: tuple[tuple[int, BitString], ...]
    history: tuple[tuple[int, BitString, BitString], ...]

    def to_dict(self) -> dict:
        """JSON-ready form; the schedule is stored by its spec string."""
        return {
            "schedule": self.schedule.name,
            "class": [list(e) for e in self.cls.entries],
            "stage": self.stage,
            "dvls": self.dvls,
            "labels": [list(x) for x in self.labels],
            "active": sorted(self.active),
            "D": [list(x) for x in self.D],
            "history": [list(x) for x in self.history],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Snapshot":
        return cls(
            schedule=parse_schedule(d["schedule"]),
            cls=EnumeratedClass.of((int(a), b) for a, b in d["class"]),
            stage=d["stage"],
            dvls=d["dvls"],
            labels=tuple((s, sig) for s, sig in d["labels"]),
            active=frozenset(d["active"]),
            D=tuple((int(a), b) for a, b in d["D"]),
            history=tuple((int(a), s, sig) for a, s, sig in d["history"]),
        )


class LabelledTree:
    """Mutable construction state; advance it with :meth:`step`."""

    def __init__(self, schedule: LevelSchedule, cls: EnumeratedClass):
        self.schedule = schedule
        self.cls = cls
        self.label_of: dict[BitString, BitString] = {}
        self.active_clone: dict[BitString, BitString] = {}
        self.active: set[BitString] = set()
        self.D: list[BitString] = []
        self.d_stage: dict[BitString, int] = {}
        self.stage = 0
        self.dvls = 0
        self.trace: list[StageEvent] = []
        self.terminated = False
        self._levels: list[int] = []
        self._index: dict[int, int] = {}
        self._internal: set[BitString] = set()
        self._children: Counter[BitString] = Counter()
        # leaves outside D, and those among them with a prefix in _pending_q
        self._open: set[BitString] = set()
        self._pending: set[BitString] = set()
        self._pending_q: frozenset[BitString] = frozenset()

    # -- schedule helpers

    def level(self, i: int) -> int:
        while len(self._levels) <= i:
            j = len(self._levels)
            lj = self.schedule.level(j)
            if self._levels and lj <= self._levels[-1]:
                raise ValueError(f"schedule not strictly increasing at {j}")
            self._levels.append(lj)
            self._index[lj] = j
        return self._levels[i]

    def level_index(self, length: int) -> Optional[int]:
        """Index ``i`` with ``l_i == length``, or ``None`` when ``length`` is not a level."""
        while not self._levels or self._levels[-1] < length:
            self.level(len(self._levels))
        return self._index.get(length)

    def _parent(self, s: BitString) -> BitString:
        k = self.level_index(len(s))
        return EMPTY if k == 0 else s[: self.level(k - 1)]

    # -- queries

    def is_labelled(self, s: BitString) -> bool:
        return s in self.label_of

    def leaves(self) -> list[BitString]:
        """Labelled strings without labelled proper extensions, in lexicographic order."""
        return sorted(s for s in self.label_of if s not in self._internal)

    def active_leaves(self) -> list[BitString]:
        return sorted(s for s in self.active if s not in self._internal)

    def leaf_level(self) -> int:
        return self.level(self.dvls)

    def is_saturated(self, rho: BitString) -> bool:
        """Whether every extension of ``rho`` at the next level carries a label.

        The empty string counts as sitting one level below ``l_0``.
        """
        if rho == EMPTY:
            return self._children[EMPTY] == 1 << self.level(0)
        if rho not in self.label_of:
            raise ValueError(f"{rho!r} is neither the empty string nor labelled")
        k = self.level_index(len(rho))
        return self._children[rho] == 1 << (self.level(k + 1) - self.level(k))

    def filtered_step(self) -> Optional[BitString]:
        """Lexicographically least leaf outside ``D`` with a prefix in ``Q_s``."""
        q = self.cls.strings_at(self.stage)
        if q != self._pending_q:
            self._pending_q = q
            self._pending = {leaf for leaf in self._open if has_prefix_in(leaf, q)}
        return min(self._pending) if self._pending else None

    def open_leaves(self) -> set[BitString]:
        """Leaves not yet enumerated into ``D``."""
        return set(self._open)

    def weight_of_active(self) -> Dyadic:
        return weight(self.active)

    # -- mutation

    def _place(self, s: BitString, sigma: BitString) -> None:
        if s in self.label_of:
            raise RuntimeError(f"{s!r} already carries label x_{sigma!r}")
        old = self.active_clone.get(sigma)
        if old is not None:
            self.active.discard(old)
        self.label_of[s] = sigma
        self.active_clone[sigma] = s
        self.active.add(s)
        k = self.level_index(len(s))
        for i in range(k):
            p = s[: self.level(i)]
            if p in self.label_of:
                self._internal.add(p)
        parent = self._parent(s)
        self._children[parent] += 1
        self._open.discard(parent)
        self._pending.discard(parent)
        self._open.add(s)
        if self._pending_q and has_prefix_in(s, self._pending_q):
            self._pending.add(s)

    def _finish(self, event: StageEvent) -> StageEvent:
        self.stage = event.stage
        self.trace.append(event)
        return event

    def expansionary_stage(self) -> StageEvent:
        new_stage = self.stage + 1
        target = self.level(self.dvls + 1)
        placements = []
        for rho in self.active_leaves():
            sigma = self.label_of[rho]
            gap = target - len(rho)
            placements.append((rho + "0" * gap, sigma + "0"))
            placements.append((rho + "1" * gap, sigma + "1"))
        for s, sigma in placements:
            self._place(s, sigma)
        if placements:
            self.dvls += 1
        return self._finish(StageEvent(EXPANSIONARY, new_stage, placements))

    def clone_above(self, delta: BitString, beta: BitString) -> list[tuple[BitString, BitString]]:
        """Copy the labels on ``delta``'s chain above ``beta`` onto the leftmost free branch."""
        if delta not in self.label_of or delta in self._internal:
            raise ValueError(f"{delta!r} is not a leaf")
        if beta != EMPTY:
            if beta not in self.label_of:
                raise ValueError(f"{beta!r} is not labelled")
            sb, sd = self.label_of[beta], self.label_of[delta]
            if not (len(sb) < len(sd) and sd.startswith(sb)):
                raise ValueError(f"label x_{sb!r} of beta does not properly precede x_{sd!r}")
        if self.is_saturated(beta):
            raise ValueError(f"{beta!r} is saturated")
        kb = -1 if beta == EMPTY else self.level_index(len(beta))
        kd = self.level_index(len(delta))
        nxt = self.level(kb + 1)
        gap = nxt - len(beta)
        for v in range(1 << gap):
            u = beta + format(v, f"0{gap}b")
            if u not in self.label_of:
                break
        else:  # pragma: no cover - excluded by the saturation test above
            raise AssertionError("unsaturated string without a free extension")
        eta = u + "0" * (len(delta) - len(u))
        placements = []
        for i in range(kb + 1, kd + 1):
            li = self.level(i)
            placements.append((eta[:li], self.label_of[delta[:li]]))
        for s, sigma in placements:
            self._place(s, sigma)
        return placements

    def adaptive_stage(self, delta: BitString) -> StageEvent:
        new_stage = self.stage + 1
        if delta not in self.d_stage:
            self.D.append(delta)
            self.d_stage[delta] = new_stage
            self._open.discard(delta)
            self._pending.discard(delta)
        k = self.level_index(len(delta)) + 1
        alpha = [EMPTY] + [delta[: self.level(i)] for i in range(k)]
        beta = [EMPTY] + [self.active_clone[self.label_of[a]] for a in alpha[1:]]
        j0 = next((j for j in range(k - 1, -1, -1) if not self.is_saturated(beta[j])), None)
        if j0 is None:
            self.terminated = True
            event = self._finish(StageEvent(TERMINATED, new_stage, d_append=delta))
            log.error("construction terminated at stage %d on %s", new_stage, delta)
            raise ConstructionTerminated(event)
        deactivated = beta[j0 + 1 :]
        for b in deactivated:
            self.active.discard(b)
            sigma = self.label_of[b]
            if self.active_clone.get(sigma) == b:
                del self.active_clone[sigma]
        placements = self.clone_above(delta, beta[j0])
        return self._finish(StageEvent(ADAPTIVE, new_stage, placements, deactivated, delta))

    def step(self) -> StageEvent:
        if self.terminated:
            raise RuntimeError("construction already terminated")
        delta = self.filtered_step()
        if delta is None:
            return self.expansionary_stage()
        return self.adaptive_stage(delta)

    # -- views

    def snapshot(self) -> Snapshot:
        history = tuple((e.stage, s, sigma) for e in self.trace for s, sigma in e.placements)
        return Snapshot(
            schedule=self.schedule,
            cls=self.cls,
            stage=self.stage,
            dvls=self.dvls,
            labels=tuple(self.label_of.items()),
            active=frozenset(self.active),
            D=tuple((self.d_stage[d], d) for d in self.D),
            history=history,
        )

    def to_dot(self) -> str:
        return snapshot_to_dot(self.snapshot())


def init(schedule: LevelSchedule, cls: EnumeratedClass, *, check: bool = True, horizon: int | None = None) -> LabelledTree:
    """Stage 0: ``x_lambda`` on the all-zeros string of length ``l_0``.

    With ``check`` the schedule must certify ``sum 2**(i - l_i) < 1 - mu(Q)``.
    """
    if check:
        budget = ONE - cls.measure
        if budget <= Dyadic(0):
            raise HypothesisError(f"mu(Q) = {cls.measure} leaves no room", None, budget)
        result = validate_schedule(schedule, budget, horizon or schedule.horizon)
        if not result.accepted:
            raise HypothesisError(
                f"schedule {schedule.name} rejected against budget 1 - mu(Q) = {budget}: {result.reason}",
                result,
                budget,
            )
    st = LabelledTree(schedule, cls)
    root = "0" * st.level(0)
    st._place(root, EMPTY)
    st.trace.append(StageEvent(INIT, 0, [(root, EMPTY)]))
    return st


def step(st: LabelledTree) -> StageEvent:
    return st.step()


@dataclass(frozen=True)
class RunOutcome:
    satisfied: bool
    stage: int


def run_until(st: LabelledTree, predicate: Callable[[LabelledTree], bool], cap: int) -> RunOutcome:
    """Step until ``predicate`` holds or the stage number reaches ``cap``."""
    while True:
        if predicate(st):
            return RunOutcome(True, st.stage)
        if st.stage >= cap:
            return RunOutcome(False, st.stage)
        st.step()


def run_stages(schedule: LevelSchedule, cls: EnumeratedClass, stages: int, **kw) -> LabelledTree:
    st = init(schedule, cls, **kw)
    for _ in range(stages):
        st.step()
    return st


# -- trace replay and exports


def replay(events: Iterable[StageEvent], schedule: LevelSchedule, cls: EnumeratedClass) -> Iterator[Snapshot]:
    """Rebuild a snapshot after each event by applying it literally.

    No construction logic is used: placements label and activate strings (the
    previous holder of the label becomes inactive), deactivations clear flags,
    and ``d_append`` extends ``D``.
    """
    labels: list[tuple[str, str]] = []
    holder: dict[str, str] = {}
    active: set[str] = set()
    D: list[tuple[int, str]] = []
    history: list[tuple[int, str, str]] = []
    for ev in events:
        if ev.d_append is not None and ev.kind != TERMINATED:
            D.append((ev.stage, ev.d_append))
        for s in ev.deactivations:
            active.discard(s)
        for s, sigma in ev.placements:
            old = holder.get(sigma)
            if old is not None:
                active.discard(old)
            holder[sigma] = s
            active.add(s)
            labels.append((s, sigma))
            history.append((ev.stage, s, sigma))
        dvls = max((len(sigma) for _, sigma in labels), default=0)
        yield Snapshot(
            schedule=schedule,
            cls=cls,
            stage=ev.stage,
            dvls=dvls,
            labels=tuple(labels),
            active=frozenset(active),
            D=tuple(D),
            history=tuple(history),
        )


def snapshot_to_dot(snap: Snapshot) -> str:
    """Graphviz rendering of the labelled strings, edges to the nearest labelled ancestor."""
    label_of = dict(snap.labels)
    in_d = {d for _, d in snap.D}
    lines = ["digraph labelled_tree {", '  node [shape=box, fontname="monospace"];', '  "root" [label="λ", shape=point];']
    for s in sorted(label_of):
        sigma = label_of[s]
        attrs = [f'label="{s}\\nx_{sigma or "λ"}"']
        if s in snap.active:
            attrs.append('style=filled, fillcolor="palegreen"')
        if s in in_d:
            attrs.append('color="red", peripheries=2')
        lines.append(f'  "{s}" [{", ".join(attrs)}];')
    for s in sorted(label_of):
        parent = "root"
        for k in range(len(s) - 1, 0, -1):
            if s[:k] in label_of:
                parent = s[:k]
                break
        lines.append(f'  "{parent}" -> "{s}";')
    lines.append("}")
    return "\n".join(lines) + "\n"
