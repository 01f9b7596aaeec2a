"""Deterministic PRNG stream behavior."""

import math

from hypothesis import given, settings
from hypothesis import strategies as st

from mailcat.rng import Rng, fnv1a64

# Regression anchors: first outputs of this implementation, frozen so that
# any change to the generator or the stream-derivation rule is caught
# (trained models and corpora would silently change otherwise).
GOLDEN_SEED42 = [
    3119888025082367609,
    15701146790222189748,
    10409750383466758954,
]


def test_first_outputs_are_stable():
    rng = Rng(42, "init")
    assert [rng.next_u64() for _ in range(3)] == GOLDEN_SEED42


def test_same_seed_same_label_identical_streams():
    a = Rng(7, "shuffle")
    b = Rng(7, "shuffle")
    assert [a.next_u64() for _ in range(100)] == [b.next_u64() for _ in range(100)]


def test_labels_derive_distinct_streams():
    a = Rng(7, "shuffle")
    b = Rng(7, "init")
    assert [a.next_u64() for _ in range(8)] != [b.next_u64() for _ in range(8)]


def test_seeds_derive_distinct_streams():
    assert Rng(1).next_u64() != Rng(2).next_u64()


def test_random_in_unit_interval():
    rng = Rng(3, "x")
    values = [rng.random() for _ in range(10_000)]
    assert all(0.0 <= v < 1.0 for v in values)
    mean = sum(values) / len(values)
    assert abs(mean - 0.5) < 0.02  # ~5 sigma for 10k uniforms


def test_uniform_respects_bounds():
    rng = Rng(3, "u")
    values = [rng.uniform(-2.5, 1.5) for _ in range(1000)]
    assert all(-2.5 <= v < 1.5 for v in values)


@given(st.integers(min_value=1, max_value=1000), st.integers(min_value=0, max_value=2**64 - 1))
@settings(max_examples=50, derandomize=True)
def test_randrange_in_bounds(n, seed):
    rng = Rng(seed, "r")
    assert 0 <= rng.randrange(n) < n


def test_randrange_covers_small_range():
    rng = Rng(11, "cover")
    seen = {rng.randrange(3) for _ in range(200)}
    assert seen == {0, 1, 2}


def test_shuffle_is_a_permutation():
    rng = Rng(5, "perm")
    items = list(range(100))
    rng.shuffle(items)
    assert sorted(items) == list(range(100))
    assert items != list(range(100))  # astronomically unlikely to be identity


def test_randint_inclusive_bounds():
    rng = Rng(9, "i")
    values = [rng.randint(15, 120) for _ in range(2000)]
    assert min(values) >= 15 and max(values) <= 120
    assert 15 in values and 120 in values


def test_fnv1a64_known_values():
    # FNV-1a test vectors: empty string hashes to the offset basis.
    assert fnv1a64("") == 0xCBF29CE484222325
    assert fnv1a64("a") == 0xAF63DC4C8601EC8C


def test_mean_of_unit_floats_has_53_bit_resolution():
    rng = Rng(1, "res")
    v = rng.random()
    assert math.isfinite(v)
    assert v == (int(v * 2**53)) * 2.0**-53
