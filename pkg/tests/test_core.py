from fractions import Fraction
from itertools import product

import pytest
from hypothesis import given, strategies as st

from kgcode.core import (
    Dyadic,
    LevelSchedule,
    ONE,
    ZERO,
    certified_sum,
    from_redundancy,
    geometric,
    is_prefix,
    lex_compare,
    load_schedule_file,
    log2_floor,
    log_schedule,
    measure_of,
    parse_schedule,
    validate_schedule,
)

bits = st.text(alphabet="01", max_size=8)
dyadics = st.builds(Dyadic, st.integers(min_value=-(10**6), max_value=10**6), st.integers(min_value=0, max_value=40))


def brute_measure(strings, d):
    covered = sum(1 for z in product("01", repeat=d) if any("".join(z).startswith(s) for s in strings))
    return Fraction(covered, 2**d)


# -- bit strings


@pytest.mark.parametrize("a,b,want", [("0000", "0001", -1), ("0011", "0011", 0), ("00", "0001", -1), ("1", "01", 1), ("", "0", -1)])
def test_lex_compare_examples(a, b, want):
    assert lex_compare(a, b) == want


@given(bits, bits)
def test_lex_compare_is_python_string_order(a, b):
    assert lex_compare(a, b) == (a > b) - (a < b)
    assert lex_compare(a, b) == -lex_compare(b, a)
    if is_prefix(a, b):
        assert lex_compare(a, b) <= 0


# -- dyadic arithmetic


def test_dyadic_canonical_form():
    assert Dyadic(6, 4) == Dyadic(3, 3)
    assert (Dyadic(6, 4).numerator, Dyadic(6, 4).exponent) == (3, 3)
    assert (Dyadic(0, 9).numerator, Dyadic(0, 9).exponent) == (0, 0)
    assert str(Dyadic(3, 3)) == "3/8"
    assert Dyadic.parse("7/16") == Dyadic(7, 4)
    assert Dyadic.pow2(-3) == Dyadic(1, 3)


@given(dyadics, dyadics)
def test_dyadic_matches_fraction(a, b):
    fa, fb = a.to_fraction(), b.to_fraction()
    assert (a + b).to_fraction() == fa + fb
    assert (a - b).to_fraction() == fa - fb
    assert (a * b).to_fraction() == fa * fb
    assert (a < b) == (fa < fb)
    assert (a == b) == (fa == fb)
    assert (a + b) - b == a


@given(dyadics)
def test_dyadic_canonical(a):
    assert a.numerator % 2 == 1 or a.exponent == 0
    if a.numerator == 0:
        assert a.exponent == 0


# -- measure


@pytest.mark.parametrize("strings,want", [(set(), ZERO), ({"00", "0000"}, Dyadic(1, 2)), ({"0", "10"}, Dyadic(3, 2))])
def test_measure_of_examples(strings, want):
    assert measure_of(strings) == want


@given(st.sets(st.text(alphabet="01", max_size=7), max_size=6))
def test_measure_of_matches_brute_force(strings):
    assert measure_of(strings).to_fraction() == brute_measure(strings, 7)


def test_measure_of_exhaustive_small():
    # every family of strings of length <= 3 drawn from a fixed pool, checked at depth 12
    pool = ["", "0", "1", "01", "10", "000", "011", "110"]
    for mask in range(1 << len(pool)):
        s = {p for k, p in enumerate(pool) if mask >> k & 1}
        assert measure_of(s).to_fraction() == brute_measure(s, 12 if mask % 37 == 0 else 4)


@given(st.sets(bits, max_size=5), st.sets(bits, max_size=5))
def test_measure_of_monotone(a, b):
    assert measure_of(a) <= measure_of(a | b)


# -- schedules


def test_geometric_validates_to_one_half():
    s = geometric(2)
    assert s.upto(3) == [2, 4, 6, 8]
    check = validate_schedule(s, ONE, 10)
    assert check.accepted
    assert check.total == Dyadic(1, 1)


def test_identity_schedule_rejected():
    s = from_redundancy(lambda i: 0, lambda n: None, name="identity")
    assert s.upto(3) == [0, 1, 2, 3]
    for budget in (ONE, Dyadic(1, 1)):
        assert not validate_schedule(s, budget, 10).accepted


def test_rejects_non_increasing():
    bad = LevelSchedule("bad", lambda i: 5 - i, lambda n: ZERO)
    check = validate_schedule(bad, ONE, 4)
    assert not check.accepted and "increasing" in check.reason


def test_from_redundancy_examples():
    assert from_redundancy(lambda i: i + 2, lambda n: Dyadic.pow2(1 - n - 2)).upto(3) == [2, 4, 6, 8]
    g = lambda i: 2 * log2_floor(i + 1) + 3  # noqa: E731
    assert from_redundancy(g, lambda n: None).upto(3) == [3, 6, 7, 10]
    assert log_schedule(2, 3).upto(3) == [3, 6, 7, 10]
    with pytest.raises(ValueError):
        from_redundancy(lambda i: -i, lambda n: None)


def test_log_schedule_total_is_one_quarter():
    s = log_schedule(2, 3)
    check = validate_schedule(s, ONE, 10)
    assert check.accepted
    assert check.total == Dyadic(1, 2)
    assert certified_sum(s) == Dyadic(1, 2)


def _remainder(spec, start):
    """Exact sum of all terms from index ``start`` on, by closed form per family."""
    kind, _, arg = spec.partition(":")
    if kind == "geometric":
        return Fraction(2, 2 ** (start + int(arg)))
    a, b = (int(x) for x in arg.split(","))
    k = start + 1
    assert k & (k - 1) == 0, "start must open a block"
    K = k.bit_length() - 1
    # block j holds 2**j equal terms 2**-(a*j + b)
    ratio = Fraction(1, 2 ** (a - 1))
    return Fraction(1, 2 ** ((a - 1) * K + b)) / (1 - ratio)


@pytest.mark.parametrize("spec,exact", [("geometric:2", True), ("geometric:5", True), ("log:2,3", True), ("log:3,1", False)])
def test_tail_certificate_against_deep_sum(spec, exact):
    s = parse_schedule(spec)
    deep_from = (1 << 10) - 1
    rest = _remainder(spec, deep_from)
    for n in range(0, 40):
        brute = sum((s.term(i).to_fraction() for i in range(n, deep_from)), Fraction(0)) + rest
        bound = s.tail_bound(n).to_fraction()
        assert bound >= brute
        if exact:
            assert bound == brute


@pytest.mark.parametrize("spec", ["geometric:2", "log:2,3", "log:3,2"])
def test_tail_certificate_coherence(spec):
    s = parse_schedule(spec)
    for n in range(64):
        b0, b1 = s.tail_bound(n), s.tail_bound(n + 1)
        assert b1 <= b0
        assert b0 >= b1 + s.term(n)
        assert b0 >= s.term(n)


def test_log_schedule_without_certificate():
    s = log_schedule(1, 3)
    assert s.tail_bound(4) is None
    assert not validate_schedule(s, ONE, 8).accepted


def test_schedule_file(tmp_path):
    p = tmp_path / "sched.tsv"
    p.write_text("# levels\n0\t2\n1\t4\n2\t6\ntail\t3\t1\t3\n", encoding="utf-8")
    s = load_schedule_file(p)
    assert s.upto(2) == [2, 4, 6]
    assert s.tail_bound(3) == Dyadic(1, 3)
    assert s.tail_bound(0) == Dyadic(1, 2) + Dyadic(1, 3) + Dyadic(1, 4) + Dyadic(1, 3)
    check = validate_schedule(s, ONE, s.horizon)
    assert check.accepted and check.total == Dyadic(9, 4)
    assert parse_schedule(f"file:{p}").upto(2) == [2, 4, 6]


def test_schedule_file_errors(tmp_path):
    p = tmp_path / "sched.tsv"
    p.write_text("0\t2\n1\t4\n", encoding="utf-8")
    with pytest.raises(ValueError, match="tail"):
        load_schedule_file(p)
    with pytest.raises(ValueError):
        parse_schedule("triangular:3")
