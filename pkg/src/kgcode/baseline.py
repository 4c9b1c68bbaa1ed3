"""Bit-by-bit coding inside a finite class, for redundancy comparison.

Each code ``tau`` for ``sigma`` of length ``n`` sits on level ``l_n``.  The next
level is the least length at which every current code has two extendible
extensions; ``sigma*0`` and ``sigma*1`` take the two lexicographically least.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from .core import BitString, check_bits
from .piclass import EnumeratedClass, is_extendible


class LevelSearchError(RuntimeError):
    pass


@dataclass(frozen=True)
class KuceraLevels:
    levels: tuple[int, ...]
    codes: tuple[dict, ...]  # codes[n] maps sigma (|sigma| = n) to its code

    def __len__(self):
        return len(self.levels)


def _extendible_extensions(tau: str, length: int, cls: EnumeratedClass, need: int) -> list[str]:
    """Lexicographically least ``need`` extendible extensions of ``tau`` at ``length``."""
    found = []
    q = cls.strings

    def walk(t: str) -> None:
        if len(found) >= need or t in q:
            return
        if len(t) == length:
            if is_extendible(t, cls):
                found.append(t)
            return
        walk(t + "0")
        walk(t + "1")

    if any(tau[:k] in q for k in range(len(tau) + 1)):
        return []
    walk(tau)
    return found


def _first_level(cls: EnumeratedClass) -> tuple[int, str]:
    limit = cls.max_len + 2
    for length in range(1, limit + 1):
        ext = _extendible_extensions("", length, cls, 1)
        if ext:
            return length, ext[0]
    raise LevelSearchError("no extendible string: the class is empty")


@lru_cache(maxsize=64)
def _levels_cached(cls: EnumeratedClass, n_max: int) -> KuceraLevels:
    l0, root = _first_level(cls)
    levels = [l0]
    codes: list[dict] = [{"": root}]
    for n in range(n_max):
        current = codes[-1]
        limit = cls.max_len + n_max + 2
        for length in range(levels[-1] + 1, max(limit, levels[-1] + 1) + 1):
            pairs = {}
            for sigma in sorted(current):
                two = _extendible_extensions(current[sigma], length, cls, 2)
                if len(two) < 2:
                    break
                pairs[sigma] = two
            else:
                break
        else:
            raise LevelSearchError(f"no level for n={n + 1} up to {limit}")
        levels.append(length)
        nxt = {}
        for sigma in sorted(pairs):
            nxt[sigma + "0"], nxt[sigma + "1"] = pairs[sigma]
        codes.append(nxt)
    return KuceraLevels(tuple(levels), tuple(codes))


def kucera_levels(cls: EnumeratedClass, n_max: int) -> KuceraLevels:
    if not is_extendible("", cls):
        raise LevelSearchError("the class is empty")
    return _levels_cached(cls, n_max)


def kucera_encode(x: BitString, cls: EnumeratedClass) -> BitString:
    check_bits(x)
    return kucera_levels(cls, len(x)).codes[len(x)][x]


def kucera_decode(y: BitString, cls: EnumeratedClass, n_max: int | None = None) -> BitString:
    check_bits(y)
    if n_max is None:
        n_max = len(y)
    kl = kucera_levels(cls, n_max)
    if len(y) not in kl.levels:
        raise ValueError(f"length {len(y)} is not a coding level")
    n = kl.levels.index(len(y))
    sigma = ""
    if y[: kl.levels[0]] != kl.codes[0][""]:
        raise ValueError(f"{y!r} is not a code")
    for i in range(n):
        head = y[: kl.levels[i + 1]]
        if kl.codes[i + 1][sigma + "0"] == head:
            sigma += "0"
        elif kl.codes[i + 1][sigma + "1"] == head:
            sigma += "1"
        else:
            raise ValueError(f"{y!r} is not a code")
    return sigma
