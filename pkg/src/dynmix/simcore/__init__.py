"""Batch simulation core with a compiled backend and a pure-Python fallback.

The compiled Cython extension is used when available; otherwise the numpy
fallback provides the same interface and the same sampling distributions.
Random streams are derived per graph trajectory from
(master_seed, trajectory_index), so results are deterministic for a fixed
seed and independent of chunking or worker count. The two backends draw
from differently implemented generators, so their outputs are
reproducible per backend rather than bit-identical across backends.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

try:  # pragma: no cover - exercised implicitly by backend selection
    from . import _engine as _impl

    BACKEND = "cython"
except ImportError:  # pragma: no cover
    from . import _engine_py as _impl

    BACKEND = "python"

from . import _engine_py


@dataclass
class EngineResult:
    """Aggregated counts from a batch of joint-chain replicas.

    tau_hist[t] counts walkers with tau == t for t in 1..horizon, and
    tau_hist[horizon+1] counts walkers that never stopped. surv_sum[t] is
    the number of walkers with tau > t; surv_sumsq[t] sums the squared
    per-trajectory survivor counts (for cluster-aware errors when several
    walkers share a graph trajectory). Histograms are indexed by the
    position of t in record_ts.
    """

    n_groups: int
    walkers_per_group: int
    horizon: int
    record_ts: np.ndarray
    tau_hist: np.ndarray
    surv_sum: np.ndarray
    surv_sumsq: np.ndarray
    hist_all: np.ndarray
    hist_stopped: np.ndarray

    @property
    def n_walkers(self) -> int:
        return self.n_groups * self.walkers_per_group

    def merge(self, other: "EngineResult") -> "EngineResult":
        if (self.horizon != other.horizon or self.walkers_per_group != other.walkers_per_group
                or not np.array_equal(self.record_ts, other.record_ts)):
            raise ValueError("incompatible engine results")
        return EngineResult(
            n_groups=self.n_groups + other.n_groups,
            walkers_per_group=self.walkers_per_group,
            horizon=self.horizon,
            record_ts=self.record_ts,
            tau_hist=self.tau_hist + other.tau_hist,
            surv_sum=self.surv_sum + other.surv_sum,
            surv_sumsq=self.surv_sumsq + other.surv_sumsq,
            hist_all=self.hist_all + other.hist_all,
            hist_stopped=self.hist_stopped + other.hist_stopped,
        )


def _edge_reps(pairing: np.ndarray) -> np.ndarray:
    idx = np.arange(len(pairing), dtype=np.int32)
    return idx[idx < pairing].astype(np.int32)


def _walk_tables(seq) -> tuple[np.ndarray, np.ndarray]:
    """Per-half-edge sibling block start and onward degree."""
    block_start = seq.offsets[seq.vertex_of].astype(np.int32)
    out_deg = (seq.degrees[seq.vertex_of] - 1).astype(np.int32)
    return block_start, out_deg


def run_joint_replicas(
    seq,
    pairing0: np.ndarray,
    x0: int,
    k: int,
    horizon: int,
    n_groups: int,
    walkers_per_group: int = 1,
    master_seed: int = 0,
    record_ts=(),
    stop_at_tau: bool = False,
    jobs: int = 1,
    backend: str | None = None,
    group_offset: int = 0,
) -> EngineResult:
    """Simulate n_groups independent graph trajectories from the fixed
    initial configuration, each carrying walkers_per_group independent
    walkers started at x0. All counts are summed over replicas.

    group_offset shifts the trajectory indices used for stream seeding,
    so disjoint batches of one logical run can be launched separately and
    later merged without stream overlap."""
    impl = _select(backend)
    ell = seq.ell
    m = ell // 2
    if not 2 <= k <= m:
        raise ValueError(f"k={k} out of range [2, {m}]")
    if not 0 <= x0 < ell:
        raise IndexError(f"start half-edge {x0} out of range [0, {ell})")
    if horizon < 0:
        raise ValueError("horizon must be >= 0")
    record_ts = np.asarray(sorted(set(int(t) for t in record_ts)), dtype=np.int32)
    if len(record_ts) and (record_ts[0] < 0 or record_ts[-1] > horizon):
        raise ValueError("record_ts outside [0, horizon]")
    if stop_at_tau and len(record_ts):
        raise ValueError("cannot record positions when walkers stop at tau")
    pairing0 = np.ascontiguousarray(pairing0, dtype=np.int32)
    ereps0 = _edge_reps(pairing0)
    block_start, out_deg = _walk_tables(seq)

    bounds = [(g0 + group_offset, g1 + group_offset) for g0, g1 in _chunks(n_groups, jobs)]
    results = []

    def run_chunk(bound):
        g0, g1 = bound
        return impl.joint_chunk(
            pairing0, ereps0, block_start, out_deg,
            int(x0), int(k), int(horizon), int(g0), int(g1),
            int(walkers_per_group), int(master_seed) & 0xFFFFFFFFFFFFFFFF,
            record_ts, bool(stop_at_tau),
        )

    if len(bounds) == 1 or impl is _engine_py:
        results = [run_chunk(b) for b in bounds]
    else:
        with ThreadPoolExecutor(max_workers=len(bounds)) as pool:
            results = list(pool.map(run_chunk, bounds))

    tau_hist = np.zeros(horizon + 2, dtype=np.int64)
    surv_sum = np.zeros(horizon + 1, dtype=np.int64)
    surv_sumsq = np.zeros(horizon + 1, dtype=np.int64)
    hist_all = np.zeros((len(record_ts), ell), dtype=np.int64)
    hist_stopped = np.zeros((len(record_ts), ell), dtype=np.int64)
    for th, ss, sq, ha, hs in results:
        tau_hist += th
        surv_sum += ss
        surv_sumsq += sq
        if len(record_ts):
            hist_all += ha
            hist_stopped += hs
    return EngineResult(
        n_groups=n_groups,
        walkers_per_group=walkers_per_group,
        horizon=horizon,
        record_ts=record_ts,
        tau_hist=tau_hist,
        surv_sum=surv_sum,
        surv_sumsq=surv_sumsq,
        hist_all=hist_all,
        hist_stopped=hist_stopped,
    )


def run_event_replicas(
    pairing0: np.ndarray,
    k: int,
    path,
    boundary_steps,
    n_replicas: int,
    master_seed: int = 0,
    jobs: int = 1,
    backend: str | None = None,
) -> int:
    """Count, over independent dynamics replicas, how often the rewiring
    history hits exactly the prescribed pattern along `path`: position
    path[i-1] already rewired by step i for i in boundary_steps, and not
    yet rewired for every other i in 1..len(path)-1."""
    impl = _select(backend)
    pairing0 = np.ascontiguousarray(pairing0, dtype=np.int32)
    ereps0 = _edge_reps(pairing0)
    m = len(pairing0) // 2
    if not 2 <= k <= m:
        raise ValueError(f"k={k} out of range [2, {m}]")
    path = np.asarray(path, dtype=np.int32)
    t = len(path) - 1
    if t < 1:
        raise ValueError("path must contain at least two positions")
    in_t = np.zeros(t + 1, dtype=np.uint8)
    for s in boundary_steps:
        if not 1 <= s <= t:
            raise ValueError(f"boundary step {s} outside [1, {t}]")
        in_t[s] = 1

    bounds = _chunks(n_replicas, jobs)

    def run_chunk(bound):
        g0, g1 = bound
        return impl.event_chunk(
            pairing0, ereps0, int(k), path, in_t, int(g0), int(g1),
            int(master_seed) & 0xFFFFFFFFFFFFFFFF,
        )

    if len(bounds) == 1 or impl is _engine_py:
        counts = [run_chunk(b) for b in bounds]
    else:
        with ThreadPoolExecutor(max_workers=len(bounds)) as pool:
            counts = list(pool.map(run_chunk, bounds))
    return int(sum(counts))


def sample_pairing(ell: int, master_seed: int, index: int = 0, backend: str | None = None) -> np.ndarray:
    """Uniform configuration pairing on [0, ell), as an int32 array."""
    impl = _select(backend)
    if ell % 2 != 0 or ell < 2:
        raise ValueError("ell must be a positive even integer")
    return impl.sample_pairing(int(ell), int(master_seed) & 0xFFFFFFFFFFFFFFFF, int(index))


def _select(backend: str | None):
    if backend in (None, BACKEND):
        return _impl
    if backend == "python":
        return _engine_py
    if backend == "cython":
        if _impl is _engine_py:
            raise RuntimeError("compiled engine not available")
        return _impl
    raise ValueError(f"unknown backend {backend!r}")


def _chunks(n: int, jobs: int) -> list[tuple[int, int]]:
    jobs = max(1, min(int(jobs), n if n else 1))
    step = (n + jobs - 1) // jobs
    return [(lo, min(lo + step, n)) for lo in range(0, n, step)] or [(0, 0)]
