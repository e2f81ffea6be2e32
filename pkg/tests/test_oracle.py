import numpy as np
import pytest

from dynmix import configs, degrees, oracle, walk
from conftest import load_fixture, rng


def test_enumeration_counts():
    assert oracle.enumerate_configurations(degrees.from_degrees([2])).size == 1
    assert oracle.enumerate_configurations(degrees.from_degrees([2, 2, 2])).size == 15
    assert oracle.enumerate_configurations(degrees.make_regular(5, 2)).size == 945


def test_enumeration_entries_valid_and_distinct():
    space = oracle.enumerate_configurations(degrees.from_degrees([4, 2, 2]))
    seen = set()
    for c in space.configurations:
        c.validate()
        seen.add(c.canonical())
    assert len(seen) == space.size == 105


def test_enumeration_scale_guard():
    with pytest.raises(ValueError, match="limited"):
        oracle.enumerate_configurations(degrees.make_regular(6, 2))


@pytest.mark.parametrize("degs,k", [([2, 2, 2], 2), ([2, 2, 2, 2], 3), ([2] * 5, 2)])
def test_exact_q_matrix_properties(degs, k):
    space = oracle.enumerate_configurations(degrees.from_degrees(degs))
    Q = oracle.exact_q_matrix(space, k)
    assert np.allclose(Q.sum(axis=1), 1.0, atol=1e-12)
    assert np.allclose(Q, Q.T, atol=1e-15)
    u = np.full(space.size, 1.0 / space.size)
    assert np.allclose(u @ Q, u, atol=1e-12)


def test_exact_walk_distribution_point_mass_at_zero():
    seq = degrees.from_degrees([2, 2, 2])
    space = oracle.enumerate_configurations(seq)
    eta = space.configurations[3]
    law = oracle.exact_walk_distribution(space, seq, eta, 4, 2, 0)
    expect = np.zeros(seq.ell)
    expect[4] = 1.0
    assert np.allclose(law, expect, atol=1e-15)


def test_exact_walk_distribution_normalizes():
    seq = degrees.from_degrees([3, 3, 2])
    space = oracle.enumerate_configurations(seq)
    eta = space.configurations[0]
    for t in (1, 2, 5):
        law = oracle.exact_walk_distribution(space, seq, eta, 0, 2, t)
        assert law.sum() == pytest.approx(1.0, abs=1e-12)
        assert np.all(law >= -1e-15)


def test_exact_walk_full_resample_equals_annealed_one_step():
    # k = m: C_1 is a fresh uniform configuration, so the law of X_1 is the
    # average over all configurations of one static walk step
    seq = degrees.from_degrees([2, 2, 2])
    space = oracle.enumerate_configurations(seq)
    eta = space.configurations[7]
    x0 = 1
    law = oracle.exact_walk_distribution(space, seq, eta, x0, seq.m, 1)
    direct = np.zeros(seq.ell)
    for c in space.configurations:
        direct += walk.transition_matrix(c, seq)[x0]
    direct /= space.size
    assert np.allclose(law, direct, atol=1e-12)


def test_exact_walk_uniform_start_stays_uniform():
    seq = degrees.from_degrees([2, 2, 2])
    space = oracle.enumerate_configurations(seq)
    eta = space.configurations[2]
    for t in (1, 3):
        acc = np.zeros(seq.ell)
        for x0 in range(seq.ell):
            acc += oracle.exact_walk_distribution(space, seq, eta, x0, 2, t)
        acc /= seq.ell
        assert np.allclose(acc, 1.0 / seq.ell, atol=1e-12)


def test_exact_tv_known_values():
    seq = degrees.make_regular(5, 2)
    space = oracle.enumerate_configurations(seq)
    eta = configs.sample_configuration(seq, rng(1))
    tv0 = oracle.exact_tv(space, seq, eta, 0, 2, 0)
    assert tv0 == pytest.approx(1 - 1 / seq.ell, abs=1e-12)
    for t in (1, 4):
        tv = oracle.exact_tv(space, seq, eta, 0, 2, t)
        assert 0.0 <= tv <= 1 - 1 / seq.ell + 1e-12


def test_exact_tv_positive_part_equivalence():
    seq = degrees.from_degrees([2, 2, 2])
    space = oracle.enumerate_configurations(seq)
    eta = space.configurations[5]
    law = oracle.exact_walk_distribution(space, seq, eta, 0, 2, 3)
    u = 1.0 / seq.ell
    half_l1 = 0.5 * np.abs(law - u).sum()
    pos_part = np.maximum(law - u, 0).sum()
    assert half_l1 == pytest.approx(pos_part, abs=1e-12)


@pytest.mark.slow
def test_exact_tv_decays_small_by_t12():
    seq = degrees.make_regular(5, 2)
    space = oracle.enumerate_configurations(seq)
    eta = configs.sample_configuration(seq, rng(1))
    assert oracle.exact_tv(space, seq, eta, 0, 2, 12) < 0.05


def test_exact_tau_tail_basics():
    seq = degrees.make_regular(3, 2)
    eta = configs.sample_configuration(seq, rng(2))
    assert oracle.exact_tau_tail(seq, eta, 0, 2, 0) == 1.0
    assert oracle.exact_tau_tail(seq, eta, 0, seq.m, 1) == 0.0


def test_exact_tau_tail_matches_fixture():
    fx = load_fixture("tau_m3_k2.json")
    seq = degrees.from_degrees(fx["degrees"])
    eta = configs.from_json(fx["pairing"])
    got = [oracle.exact_tau_tail(seq, eta, fx["x0"], fx["k"], t) for t in fx["ts"]]
    assert got == pytest.approx(fx["exact_tau_tail"], abs=1e-12)


def test_exact_tau_paths_mass_split():
    fx = load_fixture("tau_m4_k2.json")
    seq = degrees.from_degrees(fx["degrees"])
    eta = configs.from_json(fx["pairing"])
    tail, surviving, stopped = oracle.exact_tau_paths(
        seq, eta, fx["x0"], fx["k"], fx["conditional_t"]
    )
    assert float(tail) == pytest.approx(fx["exact_tau_tail"][fx["conditional_t"]])
    assert float(sum(surviving.values())) == pytest.approx(float(tail))
    assert float(sum(stopped.values())) == pytest.approx(1 - float(tail))


def test_exact_tau_scale_guard():
    seq = degrees.make_regular(5, 2)
    eta = configs.sample_configuration(seq, rng(3))
    with pytest.raises(ValueError, match="limited"):
        oracle.exact_tau_tail(seq, eta, 0, 2, 2)


def test_dp_scale_guard():
    seq = degrees.from_degrees([2, 2, 2])
    space = oracle.enumerate_configurations(seq)
    with pytest.raises(ValueError, match="limited"):
        oracle.exact_walk_distribution(space, seq, space.configurations[0], 0, 2, 13)
