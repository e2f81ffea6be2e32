import numpy as np
import pytest
from scipy import stats

from dynmix import configs, degrees, oracle, simcore
from conftest import load_fixture


def small_setup(seed=1):
    seq = degrees.from_degrees([2, 2, 2])
    space = oracle.enumerate_configurations(seq)
    eta = space.configurations[seed % space.size]
    return seq, space, eta


def test_engine_deterministic_and_chunk_invariant():
    seq = degrees.make_regular(20, 3)
    eta = configs.Configuration(simcore.sample_pairing(seq.ell, 5, 0))
    kwargs = dict(x0=0, k=3, horizon=8, walkers_per_group=2, master_seed=11,
                  record_ts=[0, 4, 8])
    a = simcore.run_joint_replicas(seq, eta.pairing, n_groups=500, jobs=1, **kwargs)
    b = simcore.run_joint_replicas(seq, eta.pairing, n_groups=500, jobs=2, **kwargs)
    assert np.array_equal(a.tau_hist, b.tau_hist)
    assert np.array_equal(a.hist_all, b.hist_all)
    assert np.array_equal(a.hist_stopped, b.hist_stopped)
    # split runs with a group offset merge to the full run
    c1 = simcore.run_joint_replicas(seq, eta.pairing, n_groups=300, jobs=1, **kwargs)
    c2 = simcore.run_joint_replicas(seq, eta.pairing, n_groups=200, jobs=1,
                                    group_offset=300, **kwargs)
    merged = c1.merge(c2)
    assert np.array_equal(merged.tau_hist, a.tau_hist)
    assert np.array_equal(merged.hist_all, a.hist_all)
    assert np.array_equal(merged.surv_sumsq, a.surv_sumsq)


def test_engine_survival_consistent_with_tau_hist(backend):
    seq = degrees.make_regular(12, 3)
    eta = configs.Configuration(simcore.sample_pairing(seq.ell, 2, 0))
    res = simcore.run_joint_replicas(
        seq, eta.pairing, x0=3, k=2, horizon=6, n_groups=800,
        walkers_per_group=3, master_seed=9, backend=backend,
    )
    n = res.n_walkers
    cum = np.cumsum(res.tau_hist[: res.horizon + 1])
    for t in range(res.horizon + 1):
        assert res.surv_sum[t] == n - cum[t]
    assert res.tau_hist[res.horizon + 1] == res.surv_sum[res.horizon]


def test_engine_one_step_law_matches_dp(backend):
    seq, space, eta = small_setup(4)
    k = 2
    exact = oracle.exact_walk_distribution(space, seq, eta, 0, k, 1)
    n = 200_000 if backend == "cython" else 20_000
    res = simcore.run_joint_replicas(
        seq, eta.pairing, x0=0, k=k, horizon=1, n_groups=n,
        master_seed=33, record_ts=[1], backend=backend,
    )
    freq = res.hist_all[0] / n
    se = np.sqrt(np.maximum(exact * (1 - exact), 1e-12) / n)
    assert np.all(np.abs(freq - exact) <= 4 * se + 1e-9)


def test_engine_two_step_law_matches_dp(backend):
    seq, space, eta = small_setup(9)
    k = 2
    exact = oracle.exact_walk_distribution(space, seq, eta, 2, k, 2)
    n = 200_000 if backend == "cython" else 20_000
    res = simcore.run_joint_replicas(
        seq, eta.pairing, x0=2, k=k, horizon=2, n_groups=n,
        master_seed=17, record_ts=[2], backend=backend,
    )
    freq = res.hist_all[0] / n
    se = np.sqrt(np.maximum(exact * (1 - exact), 1e-12) / n)
    assert np.all(np.abs(freq - exact) <= 4 * se + 1e-9)


@pytest.mark.parametrize("fixture", ["tau_m3_k2.json", "tau_m4_k2.json"])
def test_engine_tau_tail_matches_exact(backend, fixture):
    fx = load_fixture(fixture)
    seq = degrees.from_degrees(fx["degrees"])
    eta = configs.from_json(fx["pairing"])
    horizon = fx["ts"][-1]
    n = 200_000 if backend == "cython" else 20_000
    res = simcore.run_joint_replicas(
        seq, eta.pairing, x0=fx["x0"], k=fx["k"], horizon=horizon,
        n_groups=n, master_seed=21, stop_at_tau=True, backend=backend,
    )
    tail = res.surv_sum / n
    for t, expect in zip(fx["ts"], fx["exact_tau_tail"]):
        se = np.sqrt(max(expect * (1 - expect), 1e-12) / n)
        assert abs(tail[t] - expect) <= 4 * se + 1e-9, f"t={t}"


def test_engine_conditional_histograms_match_exact(backend):
    fx = load_fixture("tau_m4_k2.json")
    seq = degrees.from_degrees(fx["degrees"])
    eta = configs.from_json(fx["pairing"])
    t = fx["conditional_t"]
    n = 150_000 if backend == "cython" else 15_000
    res = simcore.run_joint_replicas(
        seq, eta.pairing, x0=fx["x0"], k=fx["k"], horizon=t,
        n_groups=n, master_seed=8, record_ts=[t], backend=backend,
    )
    stopped = res.hist_stopped[0] / n
    unstopped = (res.hist_all[0] - res.hist_stopped[0]) / n
    for got, expect in [
        (stopped, np.array(fx["stopped_law"])),
        (unstopped, np.array(fx["unstopped_law"])),
    ]:
        se = np.sqrt(np.maximum(expect * (1 - expect), 1e-12) / n)
        assert np.all(np.abs(got - expect) <= 4 * se + 1e-9)


def test_stop_at_tau_statistically_consistent(backend):
    seq = degrees.make_regular(16, 3)
    eta = configs.Configuration(simcore.sample_pairing(seq.ell, 3, 0))
    n = 40_000 if backend == "cython" else 6_000
    a = simcore.run_joint_replicas(seq, eta.pairing, x0=1, k=2, horizon=8,
                                   n_groups=n, master_seed=4, stop_at_tau=True,
                                   backend=backend)
    b = simcore.run_joint_replicas(seq, eta.pairing, x0=1, k=2, horizon=8,
                                   n_groups=n, master_seed=5, stop_at_tau=False,
                                   backend=backend)
    pa, pb = a.surv_sum / n, b.surv_sum / n
    se = np.sqrt(np.maximum(pa * (1 - pa), 1e-12) / n) * np.sqrt(2)
    assert np.all(np.abs(pa - pb) <= 4 * se + 1e-9)


def test_walker_sharing_unbiased(backend):
    # walkers sharing one graph trajectory must produce the same survival
    # curve as independent trajectories
    seq = degrees.make_regular(16, 3)
    eta = configs.Configuration(simcore.sample_pairing(seq.ell, 7, 0))
    n = 40_000 if backend == "cython" else 6_000
    shared = simcore.run_joint_replicas(seq, eta.pairing, x0=0, k=2, horizon=6,
                                        n_groups=n // 10, walkers_per_group=10,
                                        master_seed=12, stop_at_tau=True,
                                        backend=backend)
    solo = simcore.run_joint_replicas(seq, eta.pairing, x0=0, k=2, horizon=6,
                                      n_groups=n, master_seed=13,
                                      stop_at_tau=True, backend=backend)
    ps, po = shared.surv_sum / shared.n_walkers, solo.surv_sum / n
    # cluster-inflated error bound for the shared run
    se = np.sqrt(np.maximum(ps * (1 - ps), 1e-12) / (n // 10)) + np.sqrt(
        np.maximum(po * (1 - po), 1e-12) / n
    )
    assert np.all(np.abs(ps - po) <= 4 * se + 1e-9)


def test_event_kernel_base_rate(backend):
    # path (x0, x1), no boundary steps: the event is "x0 untouched at step
    # 1", whose probability is (m - k) / m exactly
    seq = degrees.make_regular(10, 3)  # m = 15
    eta = configs.Configuration(simcore.sample_pairing(seq.ell, 9, 0))
    x0 = 4
    y = int(eta.pairing[x0])
    start, end = seq.sibling_range(seq.half_edge_owner(y))
    x1 = next(s for s in range(start, end) if s != y)
    k = 3
    n = 100_000 if backend == "cython" else 10_000
    hits = simcore.run_event_replicas(eta.pairing, k, [x0, x1], [], n,
                                      master_seed=1, backend=backend)
    p = hits / n
    expect = (seq.m - k) / seq.m
    se = np.sqrt(expect * (1 - expect) / n)
    assert abs(p - expect) <= 4 * se


def test_event_kernel_boundary_rate(backend):
    # single step with boundary: P(x0 in R_1) = k / m
    seq = degrees.make_regular(10, 3)
    eta = configs.Configuration(simcore.sample_pairing(seq.ell, 10, 0))
    x0, k = 2, 3
    y = int(eta.pairing[x0])
    start, end = seq.sibling_range(seq.half_edge_owner(y))
    x1 = next(s for s in range(start, end) if s != y)
    n = 100_000 if backend == "cython" else 10_000
    hits = simcore.run_event_replicas(eta.pairing, k, [x0, x1], [1], n,
                                      master_seed=2, backend=backend)
    expect = k / seq.m
    se = np.sqrt(expect * (1 - expect) / n)
    assert abs(hits / n - expect) <= 4 * se


def test_sample_pairing_uniform(backend):
    seq = degrees.from_degrees([2, 2, 2])
    space = oracle.enumerate_configurations(seq)
    n = 60_000 if backend == "cython" else 20_000
    counts = np.zeros(space.size)
    for i in range(n):
        c = configs.Configuration(simcore.sample_pairing(seq.ell, 77, i, backend=backend))
        counts[space.locate(c)] += 1
    _, p = stats.chisquare(counts)
    assert p > 0.001


def test_engine_rejects_bad_inputs():
    seq = degrees.make_regular(6, 3)
    eta = configs.Configuration(simcore.sample_pairing(seq.ell, 0, 0))
    with pytest.raises(ValueError):
        simcore.run_joint_replicas(seq, eta.pairing, x0=0, k=1, horizon=3, n_groups=5)
    with pytest.raises(IndexError):
        simcore.run_joint_replicas(seq, eta.pairing, x0=seq.ell, k=2, horizon=3, n_groups=5)
    with pytest.raises(ValueError):
        simcore.run_joint_replicas(seq, eta.pairing, x0=0, k=2, horizon=3,
                                   n_groups=5, record_ts=[4])
    with pytest.raises(ValueError):
        simcore.run_joint_replicas(seq, eta.pairing, x0=0, k=2, horizon=3,
                                   n_groups=5, record_ts=[1], stop_at_tau=True)
