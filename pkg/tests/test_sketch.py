import random

from hypothesis import given, settings
from hypothesis import strategies as st

from alertcache.sketch import FrequencySketch, next_power_of_two, row_hash


def test_sizing():
    sk = FrequencySketch(128)
    assert sk.width == 512 and sk.sample_size == 1280
    assert FrequencySketch(3).width == 16
    assert next_power_of_two(1) == 1 and next_power_of_two(17) == 32


def test_unseen_key_is_zero():
    assert FrequencySketch(8).estimate("never") == 0


def _collision_free(sk, keys):
    slots = {}
    for k in keys:
        for salt in range(4):
            slots.setdefault((salt, row_hash(k, salt) & (sk.width - 1)), set()).add(k)
    return all(len(v) == 1 for v in slots.values())


def test_three_increments_no_collision():
    sk = FrequencySketch(64)
    keys = ["a", "b", "c"]
    assert _collision_free(sk, keys)
    for _ in range(3):
        sk.increment("a")
    sk.increment("b")
    assert sk.estimate("a") == 3 and sk.estimate("b") == 1 and sk.estimate("c") == 0


def test_saturates_at_15():
    sk = FrequencySketch(64)
    for _ in range(40):
        sk.increment("hot")
    assert sk.estimate("hot") == 15


@settings(max_examples=200)
@given(st.lists(st.integers(0, 31), max_size=60), st.integers(2, 16))
def test_never_undercounts_below_saturation(stream, capacity):
    sk = FrequencySketch(capacity)
    exact = {}
    for n, k in enumerate(stream):
        if sk.increment_count + 1 >= sk.sample_size:
            break  # stop before the first aging step
        sk.increment(f"k{k}")
        exact[k] = exact.get(k, 0) + 1
    for k, count in exact.items():
        assert sk.estimate(f"k{k}") >= min(count, 15)


def test_reset_halves_counters_and_count():
    sk = FrequencySketch(4)  # sample size 40
    for _ in range(7):
        sk.increment("a")
    for i in range(32):
        sk.increment(f"cold{i}")
    before = sk.estimate("a")
    counters = [row[:] for row in sk._rows]
    sk.increment("b")  # 40th increment triggers aging
    assert sk.resets == 1 and sk.increment_count == 20
    assert sk.estimate("a") == before // 2 or sk.estimate("a") >= before // 2
    for old, new in zip(counters, sk._rows):
        assert all(n <= max(o, o + 1) >> 1 or n == (o + 1) >> 1 for o, n in zip(old, new))


@given(st.lists(st.integers(0, 20), min_size=1, max_size=80))
def test_aging_preserves_estimate_order(stream):
    sk = FrequencySketch(32)
    for k in stream:
        sk.increment(f"k{k}")
    keys = [f"k{k}" for k in set(stream)]
    before = {k: sk.estimate(k) for k in keys}
    sk.reset()
    after = {k: sk.estimate(k) for k in keys}
    for a in keys:
        for b in keys:
            if before[a] >= before[b]:
                assert after[a] >= after[b]


def test_random_workload_overestimates_only():
    rng = random.Random(3)
    sk = FrequencySketch(16)
    exact = {}
    for _ in range(150):
        k = f"k{rng.randrange(32)}"
        sk.increment(k)
        exact[k] = exact.get(k, 0) + 1
    assert sk.resets == 0
    assert all(sk.estimate(k) >= min(c, 15) for k, c in exact.items())
