import ctypes
from functools import reduce

import pytest
from hypothesis import given
from hypothesis import strategies as st

from alertcache.rng import Rng, SeedMode, SeedSpec, derive_seed


def fnv1a_oracle(text):
    return reduce(lambda h, b: ((h ^ b) * 0x01000193) % 2**32, text.encode("utf-8"), 0x811C9DC5)


def _imul(a, b):
    return ctypes.c_int32((ctypes.c_int32(a).value * ctypes.c_int32(b).value) & 0xFFFFFFFF).value


def mulberry32_oracle(seed, n):
    """Transcription of the JavaScript reference using signed 32-bit emulation."""
    a = ctypes.c_int32(seed).value
    out = []
    for _ in range(n):
        a = ctypes.c_int32(a + 0x6D2B79F5).value
        t = _imul(a ^ ((a & 0xFFFFFFFF) >> 15), 1 | a)
        t = ctypes.c_int32((t + _imul(t ^ ((t & 0xFFFFFFFF) >> 7), 61 | t)) ^ t).value
        out.append((t ^ ((t & 0xFFFFFFFF) >> 14)) & 0xFFFFFFFF)
    return out


def test_derive_seed_single_byte():
    assert derive_seed("a") == 0xE40C292C == (2166136261 ^ 0x61) * 16777619 % 2**32


def test_derive_seed_matches_oracle():
    assert derive_seed("FISHDINNER") == fnv1a_oracle("FISHDINNER") == 3143801319


@given(st.text(min_size=1))
def test_derive_seed_matches_oracle_everywhere(text):
    assert derive_seed(text) == fnv1a_oracle(text)


def test_derive_seed_rejects_empty():
    with pytest.raises(ValueError):
        derive_seed("")


def test_mulberry32_seed0_first_outputs():
    r = Rng(0)
    got = [r.next_u32() for _ in range(3)]
    assert got == mulberry32_oracle(0, 3) == [1144304738, 1416247, 958946056]


@given(st.integers(0, 2**32 - 1))
def test_mulberry32_matches_oracle(seed):
    r = Rng(seed)
    assert [r.next_u32() for _ in range(8)] == mulberry32_oracle(seed, 8)


def test_same_seed_same_sequence():
    a, b = Rng(12345), Rng(12345)
    assert [a.next_u32() for _ in range(10_000)] == [b.next_u32() for _ in range(10_000)]


def test_neighbouring_seeds_diverge_early():
    a, b = Rng(1), Rng(2)
    assert [a.next_u32() for _ in range(4)] != [b.next_u32() for _ in range(4)]
    assert mulberry32_oracle(1, 4) != mulberry32_oracle(2, 4)


class FixedRng(Rng):
    def __init__(self, values):
        super().__init__(0)
        self._values = iter(values)

    def next_u32(self):
        return next(self._values)


def test_next_float_edges():
    assert FixedRng([0]).next_float() == 0.0
    assert FixedRng([2**31]).next_float() == 0.5
    assert FixedRng([2**32 - 1]).next_float() < 1.0


@given(st.integers(0, 2**32 - 1))
def test_next_float_in_unit_interval(seed):
    r = Rng(seed)
    for _ in range(20):
        assert 0.0 <= r.next_float() < 1.0


def test_next_range_lower_bound_and_errors():
    assert FixedRng([0]).next_range(3.0, 7.0) == 3.0
    with pytest.raises(ValueError):
        Rng(0).next_range(1.0, 1.0)


def test_next_choice():
    assert Rng(5).next_choice([1]) == 0
    assert FixedRng([0]).next_choice([0, 2, 1]) == 1  # zero-weight options are skipped
    with pytest.raises(ValueError):
        Rng(0).next_choice([0, 0])
    with pytest.raises(ValueError):
        Rng(0).next_choice([])


def test_next_choice_frequencies():
    r = Rng(derive_seed("choice"))
    draws = [r.next_choice([1, 1, 2]) for _ in range(10_000)]
    assert draws.count(2) / len(draws) == pytest.approx(0.5, abs=0.03)


def test_next_exponential_mean():
    r = Rng(99)
    xs = [r.next_exponential(2.0) for _ in range(20_000)]
    assert sum(xs) / len(xs) == pytest.approx(2.0, rel=0.05)


def test_spawn_is_pure_and_distinct():
    r = Rng(7)
    s1, s2 = r.spawn(1), r.spawn(1)
    assert s1.state == s2.state and r.state == 7
    assert r.spawn(2).state != s1.state


def test_seed_spec_modes():
    fixed = SeedSpec("FISHDINNER", SeedMode.FIXED, 3)
    assert fixed.seeds() == [derive_seed("FISHDINNER")] * 3
    per = SeedSpec("FISHDINNER", "perReplicate", 3)
    base = derive_seed("FISHDINNER")
    assert per.seeds() == [base, base ^ 1, base ^ 2]
    with pytest.raises(ValueError):
        SeedSpec("", SeedMode.FIXED, 1)
    with pytest.raises(ValueError):
        SeedSpec("x", SeedMode.FIXED, 0)
