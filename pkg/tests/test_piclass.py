from itertools import product

import pytest
from hypothesis import given, settings, strategies as st

from kgcode.core import Dyadic, measure_of
from kgcode.piclass import EnumeratedClass, generate_class, is_extendible


def brute_extendible(tau, q, max_len):
    """Some length-(max_len + 1) extension of tau avoids every prefix in q."""
    n = max(max_len + 1, len(tau))
    for tail in product("01", repeat=n - len(tau)):
        z = tau + "".join(tail)
        if not any(z.startswith(x) for x in q):
            return True
    return False


def test_strings_at_examples():
    c = EnumeratedClass.of([(1, "0000")])
    assert c.strings_at(0) == set()
    assert c.strings_at(1) == {"0000"}
    c = EnumeratedClass.of([(1, "0000"), (3, "11")])
    assert c.strings_at(2) == {"0000"}
    assert c.strings_at(3) == {"0000", "11"}
    assert c.complete_by == 3 and c.max_len == 4


@given(st.lists(st.tuples(st.integers(0, 6), st.text("01", min_size=1, max_size=5)), max_size=6))
def test_strings_at_monotone(pairs):
    c = EnumeratedClass.of(pairs)
    for s in range(8):
        assert c.strings_at(s) <= c.strings_at(s + 1)
    assert c.strings_at(c.complete_by) == c.strings


@pytest.mark.parametrize(
    "tau,q,want",
    [("0001", {"0000"}, True), ("0000", {"0000"}, False), ("00", {"000", "0010"}, True), ("1", {"10", "11"}, False), ("", {"0", "1"}, False)],
)
def test_is_extendible_examples(tau, q, want):
    c = EnumeratedClass.of((1, x) for x in q)
    assert is_extendible(tau, c) is want


def test_is_extendible_exhaustive_small_instances():
    classes = [
        {"000", "0010"},
        {"01", "1"},
        {"0000", "0001", "001"},
        {"10", "110", "1110"},
        {"0101", "011", "00"},
    ]
    for q in classes:
        c = EnumeratedClass.of((1, x) for x in q)
        for n in range(0, 8):
            for t in product("01", repeat=n):
                tau = "".join(t)
                assert is_extendible(tau, c) == brute_extendible(tau, q, c.max_len), (q, tau)


@settings(max_examples=60)
@given(st.sets(st.text("01", min_size=1, max_size=6), max_size=5), st.text("01", max_size=7))
def test_is_extendible_matches_brute_force(q, tau):
    c = EnumeratedClass.of((1, x) for x in q)
    assert is_extendible(tau, c) == brute_extendible(tau, q, c.max_len)


def test_parse_and_dump(tmp_path):
    text = "# excluded strings\n3\t11\n1\t0000  # first\n\n"
    c = EnumeratedClass.parse(text)
    assert c.entries == ((1, "0000"), (3, "11"))
    p = tmp_path / "c.tsv"
    c.save(p)
    assert EnumeratedClass.load(p) == c
    with pytest.raises(ValueError):
        EnumeratedClass.parse("1 0000\n")
    with pytest.raises(ValueError):
        EnumeratedClass.parse("1\t0200\n")


@pytest.mark.parametrize("seed", range(25))
def test_generate_class_respects_cap(seed):
    cap = Dyadic(1, 2 + seed % 3)
    c = generate_class(seed, cap, 4 + seed % 9, 1 + seed % 5)
    assert measure_of(c.strings) < cap
    assert c.measure == measure_of(c.strings)
    assert all(len(b) <= 4 + seed % 9 for b in c.strings)
    assert all(1 <= s <= 1 + seed % 5 for s, _ in c.entries)


def test_generate_class_deterministic():
    a = generate_class(7, Dyadic(1, 2), 8, 4)
    b = generate_class(7, Dyadic(1, 2), 8, 4)
    assert a.entries == b.entries
    assert a.dumps() == b.dumps()


def test_generate_class_half_cap_extendible():
    for seed in range(20):
        c = generate_class(seed, Dyadic(1, 1), 8, 4)
        assert is_extendible("", c)
        assert brute_extendible("", c.strings, c.max_len)


def test_generate_class_bad_cap():
    with pytest.raises(ValueError):
        generate_class(0, Dyadic(1), 4, 2)
