"""Encoding finite prefixes into the class and decoding them back.

Both directions replay the same deterministic construction.  Replays are
memoised per ``(schedule, class)`` pair; since the construction is a pure
function of its inputs this changes nothing observable except speed.
"""

from __future__ import annotations

import threading
from dataclasses import asdict, dataclass
from functools import lru_cache
from typing import Optional

from .core import BitString, LevelSchedule, check_bits, has_prefix_in
from .labelling import ADAPTIVE, CapExhausted, LabelledTree, init
from .piclass import EnumeratedClass, is_extendible


@dataclass(frozen=True)
class CodeResult:
    code_prefix: BitString
    settled_at_stage: int
    extendible: bool
    leaf_witness: BitString

    def to_dict(self) -> dict:
        return asdict(self)


class OracleTape:
    """Read-only bit source that records which positions were inspected."""

    def __init__(self, bits: str):
        self._bits = check_bits(bits)
        self.touched: set[int] = set()

    def __getitem__(self, i: int) -> str:
        self.touched.add(i)
        return self._bits[i]

    @property
    def reads(self) -> int:
        return len(self.touched)

    @property
    def max_index(self) -> int:
        return max(self.touched, default=-1)


def default_cap(n: int, cls: EnumeratedClass) -> int:
    return 10 * (n + 1 + len(cls) * (1 << cls.max_len))


class _Replay:
    """One growing run of the construction plus per-stage bookkeeping."""

    def __init__(self, schedule: LevelSchedule, cls: EnumeratedClass):
        self.tree: LabelledTree = init(schedule, cls)
        self.placed_at: dict[str, int] = {s: 0 for s in self.tree.label_of}
        self.dvls_at: list[int] = [0]
        self.quiet_from: Optional[int] = None
        self.lock = threading.Lock()
        self._note_quiet()

    def _note_quiet(self) -> None:
        if self.quiet_from is not None:
            return
        t = self.tree
        if t.leaf_level() < t.cls.max_len:
            return
        q = t.cls.strings
        for leaf in t.open_leaves():
            if has_prefix_in(leaf, q):
                return
        self.quiet_from = t.stage

    def advance(self) -> None:
        ev = self.tree.step()
        if self.quiet_from is not None and ev.kind == ADAPTIVE:
            raise AssertionError(f"adaptive stage {ev.stage} after the run settled at {self.quiet_from}")
        for s, _ in ev.placements:
            self.placed_at[s] = ev.stage
        self.dvls_at.append(self.tree.dvls)
        self._note_quiet()

    def labelled_by(self, y: str, cap: int) -> tuple[str, int]:
        with self.lock:
            while y not in self.placed_at:
                if self.tree.stage >= cap:
                    raise CapExhausted(f"{y!r} unlabelled after {cap} stages", self.tree.stage)
                if self.quiet_from is not None and self.tree.leaf_level() >= len(y):
                    # only expansionary stages remain and they label deeper levels only
                    raise CapExhausted(f"{y!r} can no longer be labelled (settled at stage {self.quiet_from})", self.tree.stage)
                self.advance()
            stage = self.placed_at[y]
        if stage > cap:
            raise CapExhausted(f"{y!r} first labelled at stage {stage} > cap {cap}", stage)
        return self.tree.label_of[y], stage

    def settled_stage(self, n: int, cap: int) -> int:
        with self.lock:
            while True:
                if self.quiet_from is not None:
                    for s in range(self.quiet_from, len(self.dvls_at)):
                        if self.dvls_at[s] >= n:
                            if s > cap:
                                break
                            return s
                if self.tree.stage >= cap:
                    raise CapExhausted(f"no settled stage for n={n} within {cap} stages", self.tree.stage)
                self.advance()


@lru_cache(maxsize=32)
def _replay_for(schedule: LevelSchedule, cls: EnumeratedClass) -> _Replay:
    return _Replay(schedule, cls)


def clear_cache() -> None:
    _replay_for.cache_clear()


def decode_oracle(tape: OracleTape, n: int, schedule: LevelSchedule, cls: EnumeratedClass, stage_cap: Optional[int] = None) -> BitString:
    """Recover the first ``n`` input bits from exactly ``l_n`` bits of ``tape``."""
    y = "".join(tape[i] for i in range(schedule.level(n)))
    cap = default_cap(n, cls) if stage_cap is None else stage_cap
    sigma, _ = _replay_for(schedule, cls).labelled_by(y, cap)
    return sigma


def decode(y: BitString, schedule: LevelSchedule, cls: EnumeratedClass, stage_cap: Optional[int] = None) -> BitString:
    check_bits(y)
    n = schedule.index_of(len(y))
    if n is None:
        raise ValueError(f"length {len(y)} is not a schedule level")
    return decode_oracle(OracleTape(y), n, schedule, cls, stage_cap)


def encode(x: BitString, schedule: LevelSchedule, cls: EnumeratedClass, stage_cap: Optional[int] = None) -> CodeResult:
    """Code for ``x`` read off the active leaf above ``x`` at the settled stage."""
    check_bits(x)
    n = len(x)
    cap = default_cap(n, cls) if stage_cap is None else stage_cap
    run = _replay_for(schedule, cls)
    stage = run.settled_stage(n, cap)
    N = run.dvls_at[stage]
    with run.lock:
        witness = run.tree.active_clone[x + "0" * (N - n)]
        prefix = witness[: schedule.level(n)]
        label = run.tree.label_of.get(prefix)
    if label != x:
        raise AssertionError(f"prefix {prefix} of witness carries {label!r}, not {x!r}")
    return CodeResult(prefix, stage, is_extendible(prefix, cls), witness)


def roundtrip(x: BitString, schedule: LevelSchedule, cls: EnumeratedClass, stage_cap: Optional[int] = None) -> bool:
    """Decode the code of ``x`` from an oracle holding the full witness and count reads."""
    result = encode(x, schedule, cls, stage_cap)
    tape = OracleTape(result.leaf_witness)
    back = decode_oracle(tape, len(x), schedule, cls, stage_cap)
    ln = schedule.level(len(x))
    return back == x and tape.reads == ln and tape.max_index == ln - 1


def oracle_use_profile(schedule: LevelSchedule, n_max: int) -> list[tuple[int, int, int]]:
    return [(n, schedule.level(n), schedule.level(n) - n) for n in range(n_max + 1)]
