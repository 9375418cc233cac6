import math

from qps.rng import RandomStream, child_key, mix64, root_key, uniform_at


def test_same_seed_same_sequence():
    a = RandomStream(42)
    b = RandomStream(42)
    assert [a.uniform() for _ in range(100)] == [b.uniform() for _ in range(100)]


def test_different_seeds_differ():
    a = [RandomStream(1).uniform() for _ in range(10)]
    b = [RandomStream(2).uniform() for _ in range(10)]
    assert a != b


def test_draws_are_counter_based():
    s = RandomStream(7)
    drawn = [s.uniform() for _ in range(50)]
    assert drawn == [uniform_at(s.key, j) for j in range(1, 51)]


def test_substream_reproducible_and_independent_of_parent_position():
    parent = RandomStream(99)
    early = parent.substream(3)
    for _ in range(17):
        parent.uniform()
    late = parent.substream(3)
    assert [early.uniform() for _ in range(20)] == [late.uniform() for _ in range(20)]


def test_substreams_do_not_collide():
    parent = RandomStream(5)
    keys = {parent.substream(i).key for i in range(10_000)}
    assert len(keys) == 10_000
    assert parent.key not in keys


def test_nested_substreams_distinct():
    s = RandomStream(17)
    assert s.substream(0).substream(1).key != s.substream(1).substream(0).key


def test_range_and_moments():
    s = RandomStream(2024)
    draws = [s.uniform() for _ in range(20_000)]
    assert all(0.0 <= u < 1.0 for u in draws)
    mean = sum(draws) / len(draws)
    var = sum((u - mean) ** 2 for u in draws) / len(draws)
    assert math.isclose(mean, 0.5, abs_tol=0.01)
    assert math.isclose(var, 1 / 12, abs_tol=0.01)


def test_mix64_is_a_bijection_on_samples():
    seen = {mix64(z) for z in range(100_000)}
    assert len(seen) == 100_000


def test_root_key_masks_to_64_bits():
    assert root_key(1 << 200) == root_key(0)
    assert root_key(-1) == root_key((1 << 64) - 1)


def test_child_key_matches_formula():
    key = root_key(8)
    assert child_key(key, 0) != child_key(key, 1)
    assert RandomStream(8).substream(4).key == child_key(key, 4)
