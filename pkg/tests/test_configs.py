import numpy as np
import pytest
from scipy import stats

from dynmix import configs, degrees, oracle
from conftest import rng


def test_sample_unique_pairing_ell2():
    seq = degrees.from_degrees([2])  # one vertex, one self-loop pair
    c = configs.sample_configuration(seq, rng(0))
    assert list(c.pairing) == [1, 0]


def test_sample_invariants_various():
    for seed, (n, d) in enumerate([(4, 3), (6, 2), (5, 4), (30, 3)]):
        seq = degrees.make_regular(n, d)
        c = configs.sample_configuration(seq, rng(seed))
        c.validate()


@pytest.mark.parametrize("ell", [4, 6, 8])
def test_sampler_uniform_chisquare(ell):
    seq = degrees.from_degrees([2] * (ell // 2))
    space = oracle.enumerate_configurations(seq)
    counts = np.zeros(space.size)
    draws = 100_000
    r = rng(ell)
    for _ in range(draws):
        c = configs.sample_configuration(seq, r)
        counts[space.locate(c)] += 1
    _, p = stats.chisquare(counts)
    assert p > 0.001, f"uniformity rejected at ell={ell}: p={p}"


def test_uniform_pairing_matches_counts():
    # all 3 matchings of 4 indices occur with equal frequency
    r = rng(1)
    counts = {}
    for _ in range(30_000):
        pairs = configs.uniform_pairing([3, 7, 11, 20], r)
        key = tuple(sorted(tuple(sorted(p)) for p in pairs))
        counts[key] = counts.get(key, 0) + 1
    assert len(counts) == 3
    _, p = stats.chisquare(list(counts.values()))
    assert p > 0.001


def test_pair_of():
    c = configs.from_pairs([(0, 1)])
    assert configs.pair_of(c, 0) == 1
    seq = degrees.make_regular(4, 3)
    c = configs.sample_configuration(seq, rng(2))
    for x in range(seq.ell):
        assert configs.pair_of(c, configs.pair_of(c, x)) == x
    with pytest.raises(IndexError):
        configs.pair_of(c, seq.ell)


def test_hamming():
    a = configs.from_pairs([(0, 1), (2, 3)])
    b = configs.from_pairs([(0, 2), (1, 3)])
    assert configs.hamming(a, a) == 0
    assert configs.hamming(a, b) == 2
    seq = degrees.make_regular(8, 3)
    c1 = configs.sample_configuration(seq, rng(3))
    c2 = configs.sample_configuration(seq, rng(4))
    assert configs.hamming(c1, c2) == configs.hamming(c2, c1)
    with pytest.raises(ValueError):
        configs.hamming(a, configs.from_pairs([(0, 1), (2, 3), (4, 5)]))


def test_multigraph_stats():
    seq = degrees.from_degrees([2, 2])
    both_between = configs.from_pairs([(0, 2), (1, 3)])
    assert configs.multigraph_stats(both_between, seq) == (0, 1)
    self_loop = configs.from_pairs([(0, 1), (2, 3)])
    loops, excess = configs.multigraph_stats(self_loop, seq)
    assert loops == 2 and excess == 0
    seq4 = degrees.make_regular(4, 2)
    simple_cycle = configs.from_pairs([(1, 2), (3, 4), (5, 6), (7, 0)])
    assert configs.multigraph_stats(simple_cycle, seq4) == (0, 0)


def test_mean_self_loops_bounded_large_n():
    seq = degrees.make_regular(10_000, 3)
    loops = []
    for seed in range(5):
        c = configs.sample_configuration(seq, rng(100 + seed))
        loops.append(configs.multigraph_stats(c, seq)[0])
    assert np.mean(loops) < 10


def test_q_probability_zero_beyond_k():
    seq = degrees.make_regular(6, 2)
    r = rng(5)
    a = configs.sample_configuration(seq, r)
    while True:
        b = configs.sample_configuration(seq, r)
        if configs.hamming(a, b) > 2:
            break
    assert configs.q_probability(a, b, 2) == 0.0


def test_q_probability_self_m2():
    a = configs.from_pairs([(0, 1), (2, 3)])
    assert configs.q_probability(a, a, 2) == pytest.approx(1 / 3)


def test_q_probability_symmetric_and_guarded():
    seq = degrees.make_regular(4, 3)
    a = configs.sample_configuration(seq, rng(6))
    b = configs.sample_configuration(seq, rng(7))
    for k in (2, 3, 6):
        assert configs.q_probability(a, b, k) == pytest.approx(
            configs.q_probability(b, a, k)
        )
    with pytest.raises(ValueError):
        configs.q_probability(a, b, 1)
    with pytest.raises(ValueError):
        configs.q_probability(a, b, 7)


def test_double_factorial():
    assert [configs.double_factorial(n) for n in (-1, 1, 3, 5, 9)] == [1, 1, 3, 15, 945]


def test_json_roundtrip():
    seq = degrees.make_regular(4, 3)
    c = configs.sample_configuration(seq, rng(8))
    again = configs.from_json(c.to_json())
    assert np.array_equal(again.pairing, c.pairing)
    with pytest.raises(ValueError):
        configs.from_json([0, 1, 2, 2])
