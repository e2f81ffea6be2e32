"""Pure-Python/numpy fallback engine. Mirrors the compiled kernels'
sampling distributions; streams are seeded per trajectory from
(master_seed, trajectory_index) via numpy's SeedSequence."""
from __future__ import annotations

import numpy as np


def _group_rng(master_seed: int, g: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence((master_seed, g))))


def joint_chunk(
    pairing0, ereps0, block_start, out_deg,
    x0: int, k: int, horizon: int, g_start: int, g_end: int,
    walkers: int, master_seed: int, record_ts, stop_at_tau: bool,
):
    ell = len(pairing0)
    m = ell // 2
    n_rec = len(record_ts)
    rec_of = {int(t): i for i, t in enumerate(record_ts)}

    tau_hist = np.zeros(horizon + 2, dtype=np.int64)
    surv_sum = np.zeros(horizon + 1, dtype=np.int64)
    surv_sumsq = np.zeros(horizon + 1, dtype=np.int64)
    hist_all = np.zeros((n_rec, ell), dtype=np.int64)
    hist_stopped = np.zeros((n_rec, ell), dtype=np.int64)

    for g in range(g_start, g_end):
        rng = _group_rng(master_seed, g)
        pairing = pairing0.copy()
        ereps = ereps0.copy()
        rewired = np.zeros(ell, dtype=bool)
        pos = np.full(walkers, x0, dtype=np.int64)
        tau = np.zeros(walkers, dtype=np.int64)

        surv_sum[0] += walkers
        surv_sumsq[0] += walkers * walkers
        if 0 in rec_of:
            hist_all[rec_of[0], x0] += walkers

        for t in range(1, horizon + 1):
            slots = rng.choice(m, size=k, replace=False)
            a = ereps[slots]
            b = pairing[a]
            cut = np.concatenate([a, b])
            rewired[cut] = True
            perm = rng.permutation(cut)
            left, right = perm[0::2], perm[1::2]
            pairing[left] = right
            pairing[right] = left
            ereps[slots] = left

            active = tau == 0
            if stop_at_tau and not active.any():
                break
            hit = active & rewired[pos]
            tau[hit] = t
            if stop_at_tau:
                movers = active & ~hit
            else:
                movers = np.ones(walkers, dtype=bool)
            if movers.any():
                p = pos[movers]
                y = pairing[p]
                deg = out_deg[y]
                r = rng.integers(0, deg)
                start = block_start[y]
                sib = start + r + (r >= (y - start))
                pos[movers] = sib
            c = int((tau == 0).sum())
            surv_sum[t] += c
            surv_sumsq[t] += c * c
            if t in rec_of:
                i = rec_of[t]
                hist_all[i] += np.bincount(pos, minlength=ell)
                stopped = tau != 0
                if stopped.any():
                    hist_stopped[i] += np.bincount(pos[stopped], minlength=ell)

        vals = tau.copy()
        vals[vals == 0] = horizon + 1
        tau_hist += np.bincount(vals, minlength=horizon + 2)

    return tau_hist, surv_sum, surv_sumsq, hist_all, hist_stopped


def event_chunk(
    pairing0, ereps0, k: int, path, in_t, g_start: int, g_end: int, master_seed: int
):
    ell = len(pairing0)
    m = ell // 2
    t_steps = len(path) - 1
    count = 0
    for g in range(g_start, g_end):
        rng = _group_rng(master_seed, g)
        pairing = pairing0.copy()
        ereps = ereps0.copy()
        first_step = np.zeros(ell, dtype=np.int64)  # 0 = never rewired
        for t in range(1, t_steps + 1):
            slots = rng.choice(m, size=k, replace=False)
            a = ereps[slots]
            b = pairing[a]
            cut = np.concatenate([a, b])
            fresh = first_step[cut] == 0
            first_step[cut[fresh]] = t
            perm = rng.permutation(cut)
            left, right = perm[0::2], perm[1::2]
            pairing[left] = right
            pairing[right] = left
            ereps[slots] = left
        ok = True
        for i in range(1, t_steps + 1):
            x = path[i - 1]
            hit = first_step[x] != 0 and first_step[x] <= i
            if bool(hit) != bool(in_t[i]):
                ok = False
                break
        if ok:
            count += 1
    return count


def sample_pairing(ell: int, master_seed: int, index: int) -> np.ndarray:
    """Uniform pairing via a uniform permutation paired off consecutively
    (same distribution as the sequential lowest-index rule)."""
    rng = _group_rng(master_seed, index)
    perm = rng.permutation(ell).astype(np.int32)
    pairing = np.empty(ell, dtype=np.int32)
    left, right = perm[0::2], perm[1::2]
    pairing[left] = right
    pairing[right] = left
    return pairing
