"""Bit strings, exact dyadic arithmetic and level schedules.

Bit strings are plain ``str`` objects over ``{'0', '1'}``.  Python's own string
ordering on such strings is exactly the order used throughout the package:
``'0' < '1'`` and a proper prefix precedes its extensions.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cache, total_ordering
from pathlib import Path
from typing import Callable, Iterable, Optional

BitString = str

EMPTY: BitString = ""


def is_bits(s: object) -> bool:
    return isinstance(s, str) and all(ch in "01" for ch in s)


def check_bits(s: str) -> str:
    if not is_bits(s):
        raise ValueError(f"not a bit string: {s!r}")
    return s


def lex_compare(a: BitString, b: BitString) -> int:
    """Return -1, 0 or 1 as ``a`` precedes, equals or follows ``b``."""
    for x, y in zip(a, b):
        if x != y:
            return -1 if x < y else 1
    if len(a) == len(b):
        return 0
    return -1 if len(a) < len(b) else 1


def is_prefix(a: BitString, b: BitString) -> bool:
    return len(a) <= len(b) and b.startswith(a)


def has_prefix_in(s: BitString, strings: set[str] | frozenset[str]) -> bool:
    """True when some element of ``strings`` is a (not necessarily proper) prefix of ``s``."""
    return any(s[:k] in strings for k in range(len(s) + 1))


def all_strings(n: int) -> Iterable[BitString]:
    """All strings of length ``n`` in lexicographic order."""
    if n == 0:
        yield ""
        return
    for v in range(1 << n):
        yield format(v, f"0{n}b")


def extensions(s: BitString, n: int) -> Iterable[BitString]:
    """Extensions of ``s`` of total length ``n``, leftmost first."""
    for tail in all_strings(n - len(s)):
        yield s + tail


@total_ordering
@dataclass(frozen=True, init=False)
class Dyadic:
    """Exact rational ``numerator / 2**exponent`` in canonical form.

    The numerator is odd unless the value is zero, in which case the exponent
    is zero as well.
    """

    numerator: int
    exponent: int

    def __init__(self, numerator: int = 0, exponent: int = 0):
        if exponent < 0:
            numerator <<= -exponent
            exponent = 0
        if numerator == 0:
            exponent = 0
        else:
            tz = (numerator & -numerator).bit_length() - 1
            shift = min(tz, exponent)
            numerator >>= shift
            exponent -= shift
        object.__setattr__(self, "numerator", numerator)
        object.__setattr__(self, "exponent", exponent)

    @classmethod
    def pow2(cls, k: int) -> "Dyadic":
        """The value ``2**k`` for any integer ``k``."""
        return cls(1, -k)

    @classmethod
    def coerce(cls, x: "Dyadic | int") -> "Dyadic":
        if isinstance(x, Dyadic):
            return x
        if isinstance(x, int):
            return cls(x, 0)
        if isinstance(x, Fraction):
            d = x.denominator
            if d & (d - 1):
                raise ValueError(f"{x} is not dyadic")
            return cls(x.numerator, d.bit_length() - 1)
        return NotImplemented

    @classmethod
    def parse(cls, text: str) -> "Dyadic":
        return cls.coerce(Fraction(text))

    def _align(self, other: "Dyadic") -> tuple[int, int, int]:
        e = max(self.exponent, other.exponent)
        return self.numerator << (e - self.exponent), other.numerator << (e - other.exponent), e

    def __add__(self, other):
        other = Dyadic.coerce(other)
        if other is NotImplemented:
            return other
        a, b, e = self._align(other)
        return Dyadic(a + b, e)

    __radd__ = __add__

    def __sub__(self, other):
        other = Dyadic.coerce(other)
        if other is NotImplemented:
            return other
        a, b, e = self._align(other)
        return Dyadic(a - b, e)

    def __rsub__(self, other):
        other = Dyadic.coerce(other)
        if other is NotImplemented:
            return other
        return other - self

    def __mul__(self, other):
        other = Dyadic.coerce(other)
        if other is NotImplemented:
            return other
        return Dyadic(self.numerator * other.numerator, self.exponent + other.exponent)

    __rmul__ = __mul__

    def __neg__(self):
        return Dyadic(-self.numerator, self.exponent)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Dyadic.coerce(other)
        if not isinstance(other, Dyadic):
            return NotImplemented
        return self.numerator == other.numerator and self.exponent == other.exponent

    def __hash__(self):
        return hash((self.numerator, self.exponent))

    def __lt__(self, other):
        other = Dyadic.coerce(other)
        if other is NotImplemented:
            return other
        a, b, _ = self._align(other)
        return a < b

    def __bool__(self):
        return self.numerator != 0

    def to_fraction(self) -> Fraction:
        return Fraction(self.numerator, 1 << self.exponent)

    def __float__(self):
        return self.numerator / (1 << self.exponent)

    def __str__(self):
        if self.exponent == 0:
            return str(self.numerator)
        return f"{self.numerator}/{1 << self.exponent}"

    def __repr__(self):
        return f"Dyadic({self.numerator}, {self.exponent})"


ZERO = Dyadic(0)
ONE = Dyadic(1)


def measure_of(strings: Iterable[BitString]) -> Dyadic:
    """Measure of the union of the cylinders of ``strings`` (overlaps counted once)."""
    s = set(strings)
    return weight(t for t in s if not any(t[:k] in s for k in range(len(t))))


def weight(strings: Iterable[BitString]) -> Dyadic:
    """Sum of ``2**-len`` over ``strings``, overlaps counted with multiplicity."""
    lengths = [len(t) for t in strings]
    if not lengths:
        return ZERO
    top = max(lengths)
    return Dyadic(sum(1 << (top - n) for n in lengths), top)


# --------------------------------------------------------------------------
# level schedules

TailBound = Callable[[int], Optional[Dyadic]]


@dataclass(frozen=True, eq=False)
class LevelSchedule:
    """Strictly increasing levels ``i -> l_i`` with a certified tail bound.

    ``tail_bound(N)`` must be an upper bound on ``sum_{i >= N} 2**(i - l_i)``,
    or ``None`` when no certificate is available.
    """

    name: str
    levels: Callable[[int], int]
    tail_bound: TailBound
    horizon: int = 16

    def level(self, i: int) -> int:
        return self.levels(i)

    def __getitem__(self, i: int) -> int:
        return self.levels(i)

    def upto(self, n: int) -> list[int]:
        return [self.levels(i) for i in range(n + 1)]

    def index_of(self, length: int) -> Optional[int]:
        """The ``i`` with ``l_i == length``, or ``None``."""
        i = 0
        while True:
            li = self.levels(i)
            if li == length:
                return i
            if li > length:
                return None
            i += 1

    def term(self, i: int) -> Dyadic:
        return Dyadic.pow2(i - self.levels(i))


@dataclass(frozen=True)
class ScheduleCheck:
    accepted: bool
    total: Optional[Dyadic]
    partial: Optional[Dyadic]
    tail: Optional[Dyadic]
    reason: str = ""

    def __bool__(self):
        return self.accepted


def validate_schedule(s: LevelSchedule, budget: Dyadic | int, horizon: int) -> ScheduleCheck:
    """Accept iff the certified total ``sum_{i<horizon} 2**(i-l_i) + B(horizon)`` is below ``budget``."""
    budget = Dyadic.coerce(budget)
    if budget <= ZERO:
        raise ValueError("budget must be positive")
    if horizon < 1:
        raise ValueError("horizon must be at least 1")
    try:
        ls = [s.level(i) for i in range(horizon)]
    except (ValueError, IndexError) as exc:
        return ScheduleCheck(False, None, None, None, f"schedule undefined: {exc}")
    if ls[0] < 0:
        return ScheduleCheck(False, None, None, None, f"negative level {ls[0]}")
    for i in range(horizon - 1):
        if ls[i] >= ls[i + 1]:
            return ScheduleCheck(False, None, None, None, f"not strictly increasing at i={i}: {ls[i]} >= {ls[i + 1]}")
    partial = ZERO
    for i in range(horizon):
        partial += Dyadic.pow2(i - ls[i])
    tail = s.tail_bound(horizon)
    if tail is None:
        return ScheduleCheck(False, None, partial, None, "no tail certificate")
    total = partial + tail
    if not total < budget:
        return ScheduleCheck(False, total, partial, tail, f"certified total {total} is not below budget {budget}")
    return ScheduleCheck(True, total, partial, tail)


def _floor_log2(k: int) -> int:
    return k.bit_length() - 1


@cache
def geometric(c: int) -> LevelSchedule:
    """``l_i = 2i + c``; the tail from N is exactly ``2**(1 - N - c)``."""
    return LevelSchedule(
        name=f"geometric:{c}",
        levels=lambda i: 2 * i + c,
        tail_bound=lambda n: Dyadic.pow2(1 - n - c),
    )


@cache
def log_schedule(a: int, b: int) -> LevelSchedule:
    """``l_i = i + a*floor(log2(i+1)) + b``.

    Terms are constant on blocks ``i + 1 in [2**k, 2**(k+1))``, so the tail
    splits into the rest of the current block plus a geometric series over the
    later blocks; the series is bounded by twice its first term (exact for a=2).
    """

    def tail(n: int) -> Optional[Dyadic]:
        if a < 2:
            return None
        k0 = _floor_log2(n + 1)
        rest = (1 << (k0 + 1)) - (n + 1)
        in_block = Dyadic(rest, a * k0 + b)
        later = Dyadic.pow2((1 - a) * (k0 + 1) - b + 1)
        return in_block + later

    return LevelSchedule(
        name=f"log:{a},{b}",
        levels=lambda i: i + a * _floor_log2(i + 1) + b,
        tail_bound=tail,
    )


def from_redundancy(g: Callable[[int], int], tail_cert: TailBound, name: str = "redundancy", check_upto: int = 64) -> LevelSchedule:
    """Schedule ``l_i = i + g(i)``, whose terms are ``2**-g(i)``."""
    prev = None
    for i in range(check_upto + 1):
        li = i + g(i)
        if prev is not None and li <= prev:
            raise ValueError(f"i + g(i) not strictly increasing at i={i}")
        prev = li
    return LevelSchedule(name=name, levels=lambda i: i + g(i), tail_bound=tail_cert)


def schedule_from_pairs(pairs: dict[int, int], tail_at: int, tail_value: Dyadic, name: str = "file") -> LevelSchedule:
    """Explicit finite schedule with a single certificate ``B(tail_at)``.

    Bounds at other indices are derived: below ``tail_at`` by adding the known
    terms, above it by monotonicity.
    """
    if sorted(pairs) != list(range(len(pairs))):
        raise ValueError("explicit schedule must list indices 0..k without gaps")
    if tail_at > len(pairs):
        raise ValueError("tail certificate index lies beyond the listed levels")

    def levels(i: int) -> int:
        if i not in pairs:
            raise ValueError(f"level {i} not given by the schedule file")
        return pairs[i]

    def tail(n: int) -> Optional[Dyadic]:
        if n >= tail_at:
            return tail_value
        total = tail_value
        for i in range(n, tail_at):
            total += Dyadic.pow2(i - pairs[i])
        return total

    return LevelSchedule(name=name, levels=levels, tail_bound=tail, horizon=max(1, tail_at))


def load_schedule_file(path: str | Path) -> LevelSchedule:
    pairs: dict[int, int] = {}
    tail = None
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        fields = line.split("\t")
        if fields[0] == "tail":
            if len(fields) != 4:
                raise ValueError(f"{path}:{lineno}: expected tail<TAB>N<TAB>num<TAB>exp")
            tail = (int(fields[1]), Dyadic(int(fields[2]), int(fields[3])))
        else:
            if len(fields) != 2:
                raise ValueError(f"{path}:{lineno}: expected i<TAB>level")
            pairs[int(fields[0])] = int(fields[1])
    if tail is None:
        raise ValueError(f"{path}: missing tail certificate line")
    return schedule_from_pairs(pairs, tail[0], tail[1], name=f"file:{path}")


def parse_schedule(spec: str) -> LevelSchedule:
    """Parse ``geometric:c``, ``log:a,b`` or ``file:<path>``."""
    kind, _, arg = spec.partition(":")
    if kind == "geometric":
        return geometric(int(arg))
    if kind == "log":
        a, b = (int(x) for x in arg.split(","))
        return log_schedule(a, b)
    if kind == "file":
        return load_schedule_file(arg)
    raise ValueError(f"unknown schedule spec {spec!r}")


def certified_sum(s: LevelSchedule, horizon: Optional[int] = None) -> Optional[Dyadic]:
    """Certified upper bound on the whole series, or ``None``."""
    if horizon is None:
        horizon = s.horizon
    tail = s.tail_bound(horizon)
    if tail is None:
        return None
    return sum((s.term(i) for i in range(horizon)), ZERO) + tail


def log2_floor(k: int) -> int:
    return _floor_log2(k)


__all__ = [
    "BitString", "EMPTY", "Dyadic", "ZERO", "ONE", "LevelSchedule", "ScheduleCheck",
    "lex_compare", "is_prefix", "has_prefix_in", "all_strings", "extensions", "is_bits", "check_bits",
    "measure_of", "weight", "validate_schedule", "geometric", "log_schedule", "from_redundancy",
    "schedule_from_pairs", "load_schedule_file", "parse_schedule", "certified_sum", "log2_floor",
]
