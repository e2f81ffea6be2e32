#!/usr/bin/env python3
"""Throughput comparison between the compiled engine and the pure-Python
fallback on the three hot kernels. Run: python benchmarks/bench_backends.py
"""
from __future__ import annotations

import argparse
import time

from dynmix import degrees, simcore


def time_call(fn, *args, repeat=3, **kwargs):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args, **kwargs)
        best = min(best, time.perf_counter() - t0)
    return best


def bench_joint(backend, n, d, alpha, replicas, horizon):
    seq = degrees.make_regular(n, d)
    pairing = simcore.sample_pairing(seq.ell, 1, 0, backend=backend)
    k = max(2, int(round(alpha * seq.m)))
    return time_call(
        simcore.run_joint_replicas, seq, pairing, 0, k, horizon,
        replicas, master_seed=5, stop_at_tau=True, backend=backend, repeat=2,
    )


def bench_events(backend, n, d, k, replicas):
    seq = degrees.make_regular(n, d)
    pairing = simcore.sample_pairing(seq.ell, 2, 0, backend=backend)
    x0 = 0
    y = int(pairing[x0])
    start, end = seq.sibling_range(seq.half_edge_owner(y))
    x1 = next(s for s in range(start, end) if s != y)
    return time_call(
        simcore.run_event_replicas, pairing, k, [x0, x1], [], replicas,
        master_seed=3, backend=backend, repeat=2,
    )


def bench_sampler(backend, ell, samples):
    def run():
        for i in range(samples):
            simcore.sample_pairing(ell, 7, i, backend=backend)

    return time_call(run, repeat=2)


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--quick", action="store_true", help="smaller sizes")
    args = parser.parse_args()

    if args.quick:
        joint = dict(n=2_000, d=3, alpha=0.05, replicas=2_000, horizon=12)
        events = dict(n=1_000, d=3, k=50, replicas=2_000)
        sampler = dict(ell=30_000, samples=50)
    else:
        joint = dict(n=10_000, d=3, alpha=0.05, replicas=20_000, horizon=15)
        events = dict(n=1_000, d=3, k=150, replicas=50_000)
        sampler = dict(ell=300_000, samples=100)

    backends = ["python"]
    if simcore.BACKEND == "cython":
        backends.insert(0, "cython")
    else:
        print("compiled engine unavailable; timing fallback only")

    rows = []
    for name, fn, kw in [
        ("joint replicas", bench_joint, joint),
        ("event replicas", bench_events, events),
        ("pairing sampler", bench_sampler, sampler),
    ]:
        times = {b: fn(b, **kw) for b in backends}
        rows.append((name, kw, times))

    print(f"{'kernel':<18}{'cython':>12}{'python':>12}{'speedup':>10}")
    for name, kw, times in rows:
        cy = times.get("cython")
        py = times["python"]
        cy_s = f"{cy:.3f}s" if cy is not None else "-"
        speed = f"{py / cy:,.0f}x" if cy else "-"
        print(f"{name:<18}{cy_s:>12}{py:>11.3f}s{speed:>10}")
        print(f"    {kw}")


if __name__ == "__main__":
    main()
