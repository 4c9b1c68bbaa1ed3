"""Finite stage-annotated excluded-string sets ``Q`` standing for ``P = 2^omega - [[Q]]``."""

from __future__ import annotations

import random
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import Iterable

from .core import BitString, Dyadic, ONE, check_bits, has_prefix_in, measure_of


@dataclass(frozen=True)
class EnumeratedClass:
    """``entries`` are ``(stage, string)`` pairs; ``string`` enters ``Q`` at ``stage``."""

    entries: tuple[tuple[int, BitString], ...]

    def __post_init__(self):
        norm = []
        for stage, bits in self.entries:
            if stage < 0:
                raise ValueError(f"negative stage {stage}")
            norm.append((int(stage), check_bits(bits)))
        object.__setattr__(self, "entries", tuple(sorted(set(norm))))

    @classmethod
    def of(cls, pairs: Iterable[tuple[int, BitString]]) -> "EnumeratedClass":
        return cls(tuple(pairs))

    @cached_property
    def strings(self) -> frozenset[BitString]:
        return frozenset(b for _, b in self.entries)

    @cached_property
    def max_len(self) -> int:
        return max((len(b) for _, b in self.entries), default=0)

    @cached_property
    def complete_by(self) -> int:
        return max((s for s, _ in self.entries), default=0)

    @cached_property
    def measure(self) -> Dyadic:
        return measure_of(self.strings)

    def strings_at(self, s: int) -> frozenset[BitString]:
        if s >= self.complete_by:
            return self.strings
        return frozenset(b for t, b in self.entries if t <= s)

    def __len__(self):
        return len(self.entries)

    # file format: stage<TAB>bits per line, '#' comments

    @classmethod
    def load(cls, path: str | Path) -> "EnumeratedClass":
        return cls.parse(Path(path).read_text(encoding="utf-8"), source=str(path))

    @classmethod
    def parse(cls, text: str, source: str = "<class>") -> "EnumeratedClass":
        pairs = []
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            fields = line.split("\t")
            if len(fields) != 2:
                raise ValueError(f"{source}:{lineno}: expected stage<TAB>bits, got {raw!r}")
            stage, bits = fields
            if not bits or not all(ch in "01" for ch in bits):
                raise ValueError(f"{source}:{lineno}: bad bit string {bits!r}")
            pairs.append((int(stage), bits))
        return cls(tuple(pairs))

    def dumps(self) -> str:
        return "".join(f"{s}\t{b}\n" for s, b in self.entries)

    def save(self, path: str | Path) -> None:
        Path(path).write_text(self.dumps(), encoding="utf-8")


def strings_at(c: EnumeratedClass, s: int) -> frozenset[BitString]:
    return c.strings_at(s)


def is_extendible(tau: BitString, c: EnumeratedClass) -> bool:
    """Whether ``[[tau]]`` is not covered by ``[[Q]]`` for the fully enumerated class."""
    q = c.strings
    depth = max(len(tau), c.max_len)
    if has_prefix_in(tau, q):
        return False

    def search(t: str) -> bool:
        if t in q:
            return False
        if len(t) >= depth:
            return True
        return search(t + "0") or search(t + "1")

    return search(tau)


def generate_class(seed: int, measure_cap: Dyadic, depth: int, stages: int, max_entries: int | None = None) -> EnumeratedClass:
    """Seed-deterministic random class with measure strictly below ``measure_cap``."""
    measure_cap = Dyadic.coerce(measure_cap)
    if not (Dyadic(0) < measure_cap < ONE):
        raise ValueError("measure_cap must lie strictly between 0 and 1")
    if depth < 1 or stages < 1:
        raise ValueError("depth and stages must be positive")
    rng = random.Random(seed)
    if max_entries is None:
        max_entries = rng.randint(1, 2 * depth)
    chosen: list[str] = []
    pairs = []
    lo = min(2, depth)
    for _ in range(8 * max_entries):
        if len(chosen) >= max_entries:
            break
        n = rng.randint(lo, depth)
        bits = format(rng.getrandbits(n), f"0{n}b")
        if bits in chosen:
            continue
        if measure_of(chosen + [bits]) < measure_cap:
            chosen.append(bits)
            pairs.append((rng.randint(1, stages), bits))
    return EnumeratedClass(tuple(pairs))
