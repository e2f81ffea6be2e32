# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled batch kernels: joint graph-rewiring + walk replicas, rewiring
pattern events, and uniform pairing sampling.

Each graph trajectory owns an xoshiro256++ stream seeded from
(master_seed, trajectory_index) through splitmix64, so results do not
depend on chunk boundaries or thread count. The working graph arrays are
shared across trajectories inside a chunk and restored via an undo log,
which keeps the per-trajectory cost proportional to the work actually
done instead of the graph size.
"""

from libc.stdint cimport int32_t, int64_t, uint8_t, uint64_t
from libc.stdlib cimport calloc, free, malloc
from libc.string cimport memcpy

import numpy as np

cdef extern from *:
    ctypedef unsigned long long u128 "unsigned __int128"


# ---------------------------------------------------------------- RNG --

cdef inline uint64_t _splitmix64(uint64_t* state) nogil:
    cdef uint64_t z
    state[0] = state[0] + <uint64_t>0x9E3779B97F4A7C15
    z = state[0]
    z = (z ^ (z >> 30)) * <uint64_t>0xBF58476D1CE4E5B9
    z = (z ^ (z >> 27)) * <uint64_t>0x94D049BB133111EB
    return z ^ (z >> 31)


cdef struct Xo:
    uint64_t s0
    uint64_t s1
    uint64_t s2
    uint64_t s3


cdef inline void _xo_seed(Xo* x, uint64_t master, uint64_t stream) nogil:
    cdef uint64_t sm = master ^ (<uint64_t>0xD1B54A32D192ED03 * (stream + 1))
    x.s0 = _splitmix64(&sm)
    x.s1 = _splitmix64(&sm)
    x.s2 = _splitmix64(&sm)
    x.s3 = _splitmix64(&sm)
    if x.s0 == 0 and x.s1 == 0 and x.s2 == 0 and x.s3 == 0:
        x.s0 = 1


cdef inline uint64_t _rotl(uint64_t v, int r) nogil:
    return (v << r) | (v >> (64 - r))


cdef inline uint64_t _xo_next(Xo* x) nogil:
    cdef uint64_t result = _rotl(x.s0 + x.s3, 23) + x.s0
    cdef uint64_t t = x.s1 << 17
    x.s2 = x.s2 ^ x.s0
    x.s3 = x.s3 ^ x.s1
    x.s1 = x.s1 ^ x.s2
    x.s0 = x.s0 ^ x.s3
    x.s2 = x.s2 ^ t
    x.s3 = _rotl(x.s3, 45)
    return result


cdef inline uint64_t _below(Xo* x, uint64_t n) nogil:
    """Unbiased draw from [0, n) (Lemire multiply-shift with rejection)."""
    cdef u128 mul = <u128>_xo_next(x) * <u128>n
    cdef uint64_t low = <uint64_t>mul
    cdef uint64_t thr
    if low < n:
        thr = (0 - n) % n
        while low < thr:
            mul = <u128>_xo_next(x) * <u128>n
            low = <uint64_t>mul
    return <uint64_t>(mul >> 64)


# ------------------------------------------------------- joint kernel --

def joint_chunk(
    int32_t[::1] pairing0,
    int32_t[::1] ereps0,
    int32_t[::1] block_start,
    int32_t[::1] out_deg,
    int x0,
    int k,
    int horizon,
    long g_start,
    long g_end,
    int walkers,
    unsigned long long master_seed,
    int32_t[::1] record_ts,
    bint stop_at_tau,
):
    cdef long ell = pairing0.shape[0]
    cdef long m = ell // 2
    cdef int n_rec = record_ts.shape[0]

    tau_hist_a = np.zeros(horizon + 2, dtype=np.int64)
    surv_sum_a = np.zeros(horizon + 1, dtype=np.int64)
    surv_sumsq_a = np.zeros(horizon + 1, dtype=np.int64)
    hist_all_a = np.zeros((n_rec, ell), dtype=np.int64)
    hist_stopped_a = np.zeros((n_rec, ell), dtype=np.int64)
    cdef int64_t[::1] th = tau_hist_a
    cdef int64_t[::1] ss = surv_sum_a
    cdef int64_t[::1] sq = surv_sumsq_a
    cdef int64_t[:, ::1] ha = hist_all_a
    cdef int64_t[:, ::1] hs = hist_stopped_a

    rec_at_a = np.full(horizon + 1, -1, dtype=np.int32)
    cdef Py_ssize_t ri
    for ri in range(n_rec):
        rec_at_a[record_ts[ri]] = ri
    cdef int32_t[::1] rec_at = rec_at_a

    cdef int32_t* pairing = <int32_t*>malloc(ell * sizeof(int32_t))
    cdef int32_t* ereps = <int32_t*>malloc(m * sizeof(int32_t))
    cdef int32_t* idx = <int32_t*>malloc(m * sizeof(int32_t))
    cdef int32_t* stamp = <int32_t*>calloc(ell, sizeof(int32_t))
    cdef int32_t* buf = <int32_t*>malloc(2 * k * sizeof(int32_t))
    cdef int32_t* slotbuf = <int32_t*>malloc(k * sizeof(int32_t))
    cdef int32_t* jlog = <int32_t*>malloc(k * sizeof(int32_t))
    cdef int64_t* pos = <int64_t*>malloc(walkers * sizeof(int64_t))
    cdef int32_t* tau = <int32_t*>malloc(walkers * sizeof(int32_t))
    cdef long cap_p = <long>horizon * 2 * k
    cdef long cap_e = <long>horizon * k
    cdef int32_t* lpos = <int32_t*>malloc(max(cap_p, 1) * sizeof(int32_t))
    cdef int32_t* lold = <int32_t*>malloc(max(cap_p, 1) * sizeof(int32_t))
    cdef int32_t* epos = <int32_t*>malloc(max(cap_e, 1) * sizeof(int32_t))
    cdef int32_t* eold = <int32_t*>malloc(max(cap_e, 1) * sizeof(int32_t))
    if (pairing == NULL or ereps == NULL or idx == NULL or stamp == NULL or buf == NULL
            or slotbuf == NULL or jlog == NULL
            or pos == NULL or tau == NULL or lpos == NULL or lold == NULL
            or epos == NULL or eold == NULL):
        free(pairing); free(ereps); free(idx); free(stamp); free(buf)
        free(slotbuf); free(jlog)
        free(pos); free(tau); free(lpos); free(lold); free(epos); free(eold)
        raise MemoryError("joint_chunk workspace allocation failed")

    cdef Xo rng
    cdef long g, i, j, slot, np_log, ne_log, wlk
    cdef long a, b, p, y, sib, tmp
    cdef long alive, c, t, rec_i
    cdef int32_t gen = 0
    cdef bint stopped

    with nogil:
        memcpy(pairing, &pairing0[0], ell * sizeof(int32_t))
        memcpy(ereps, &ereps0[0], m * sizeof(int32_t))
        for i in range(m):
            idx[i] = <int32_t>i
        for g in range(g_start, g_end):
            gen += 1
            _xo_seed(&rng, <uint64_t>master_seed, <uint64_t>g)
            np_log = 0
            ne_log = 0
            for wlk in range(walkers):
                pos[wlk] = x0
                tau[wlk] = 0
            alive = walkers
            ss[0] += walkers
            sq[0] += <int64_t>walkers * walkers
            if rec_at[0] >= 0:
                ha[rec_at[0], x0] += walkers
            for t in range(1, horizon + 1):
                if stop_at_tau and alive == 0:
                    break
                # k distinct edge slots via partial Fisher-Yates; the swaps
                # are undone right away so the draw-to-slot mapping depends
                # only on this trajectory's stream (thread-count invariance)
                for i in range(k):
                    j = i + <long>_below(&rng, <uint64_t>(m - i))
                    jlog[i] = <int32_t>j
                    tmp = idx[i]
                    idx[i] = idx[j]
                    idx[j] = <int32_t>tmp
                for i in range(k):
                    slotbuf[i] = idx[i]
                for i in range(k - 1, -1, -1):
                    j = jlog[i]
                    tmp = idx[i]
                    idx[i] = idx[j]
                    idx[j] = <int32_t>tmp
                for i in range(k):
                    slot = slotbuf[i]
                    a = ereps[slot]
                    b = pairing[a]
                    buf[2 * i] = <int32_t>a
                    buf[2 * i + 1] = <int32_t>b
                    stamp[a] = gen
                    stamp[b] = gen
                # uniform re-pairing of the cut half-edges
                for i in range(2 * k - 1, 0, -1):
                    j = <long>_below(&rng, <uint64_t>(i + 1))
                    tmp = buf[i]
                    buf[i] = buf[j]
                    buf[j] = <int32_t>tmp
                for i in range(k):
                    a = buf[2 * i]
                    b = buf[2 * i + 1]
                    lpos[np_log] = <int32_t>a
                    lold[np_log] = pairing[a]
                    np_log += 1
                    lpos[np_log] = <int32_t>b
                    lold[np_log] = pairing[b]
                    np_log += 1
                    pairing[a] = <int32_t>b
                    pairing[b] = <int32_t>a
                    slot = slotbuf[i]
                    epos[ne_log] = <int32_t>slot
                    eold[ne_log] = ereps[slot]
                    ne_log += 1
                    ereps[slot] = <int32_t>a
                # walk moves, stopping-time check first (pre-move position)
                c = 0
                for wlk in range(walkers):
                    stopped = tau[wlk] != 0
                    if not stopped:
                        p = pos[wlk]
                        if stamp[p] == gen:
                            tau[wlk] = <int32_t>t
                            th[t] += 1
                            alive -= 1
                            stopped = True
                        else:
                            c += 1
                    if stopped and stop_at_tau:
                        continue
                    p = pos[wlk]
                    y = pairing[p]
                    j = <long>_below(&rng, <uint64_t>out_deg[y])
                    sib = block_start[y] + j
                    if sib >= y:
                        sib += 1
                    pos[wlk] = sib
                ss[t] += c
                sq[t] += c * c
                rec_i = rec_at[t]
                if rec_i >= 0:
                    for wlk in range(walkers):
                        ha[rec_i, pos[wlk]] += 1
                        if tau[wlk] != 0:
                            hs[rec_i, pos[wlk]] += 1
            th[horizon + 1] += alive
            # undo this trajectory's writes so the next starts from base
            while np_log > 0:
                np_log -= 1
                pairing[lpos[np_log]] = lold[np_log]
            while ne_log > 0:
                ne_log -= 1
                ereps[epos[ne_log]] = eold[ne_log]

    free(pairing); free(ereps); free(idx); free(stamp); free(buf)
    free(slotbuf); free(jlog)
    free(pos); free(tau); free(lpos); free(lold); free(epos); free(eold)
    return tau_hist_a, surv_sum_a, surv_sumsq_a, hist_all_a, hist_stopped_a


# ------------------------------------------------------- event kernel --

def event_chunk(
    int32_t[::1] pairing0,
    int32_t[::1] ereps0,
    int k,
    int32_t[::1] path,
    uint8_t[::1] in_t,
    long g_start,
    long g_end,
    unsigned long long master_seed,
):
    cdef long ell = pairing0.shape[0]
    cdef long m = ell // 2
    cdef long t_steps = path.shape[0] - 1

    cdef int32_t* pairing = <int32_t*>malloc(ell * sizeof(int32_t))
    cdef int32_t* ereps = <int32_t*>malloc(m * sizeof(int32_t))
    cdef int32_t* idx = <int32_t*>malloc(m * sizeof(int32_t))
    cdef int32_t* stamp = <int32_t*>calloc(ell, sizeof(int32_t))
    cdef int32_t* fstep = <int32_t*>malloc(ell * sizeof(int32_t))
    cdef int32_t* buf = <int32_t*>malloc(2 * k * sizeof(int32_t))
    cdef int32_t* slotbuf = <int32_t*>malloc(k * sizeof(int32_t))
    cdef int32_t* jlog = <int32_t*>malloc(k * sizeof(int32_t))
    cdef long cap_p = t_steps * 2 * k
    cdef long cap_e = t_steps * k
    cdef int32_t* lpos = <int32_t*>malloc(max(cap_p, 1) * sizeof(int32_t))
    cdef int32_t* lold = <int32_t*>malloc(max(cap_p, 1) * sizeof(int32_t))
    cdef int32_t* epos = <int32_t*>malloc(max(cap_e, 1) * sizeof(int32_t))
    cdef int32_t* eold = <int32_t*>malloc(max(cap_e, 1) * sizeof(int32_t))
    if (pairing == NULL or ereps == NULL or idx == NULL or stamp == NULL or fstep == NULL
            or buf == NULL or slotbuf == NULL or jlog == NULL
            or lpos == NULL or lold == NULL or epos == NULL or eold == NULL):
        free(pairing); free(ereps); free(idx); free(stamp); free(fstep); free(buf)
        free(slotbuf); free(jlog)
        free(lpos); free(lold); free(epos); free(eold)
        raise MemoryError("event_chunk workspace allocation failed")

    cdef Xo rng
    cdef long g, i, j, slot, t, a, b, x, tmp, np_log, ne_log
    cdef int64_t count = 0
    cdef int32_t gen = 0
    cdef bint ok, hit

    with nogil:
        memcpy(pairing, &pairing0[0], ell * sizeof(int32_t))
        memcpy(ereps, &ereps0[0], m * sizeof(int32_t))
        for i in range(m):
            idx[i] = <int32_t>i
        for g in range(g_start, g_end):
            gen += 1
            _xo_seed(&rng, <uint64_t>master_seed, <uint64_t>g)
            np_log = 0
            ne_log = 0
            for t in range(1, t_steps + 1):
                for i in range(k):
                    j = i + <long>_below(&rng, <uint64_t>(m - i))
                    jlog[i] = <int32_t>j
                    tmp = idx[i]
                    idx[i] = idx[j]
                    idx[j] = <int32_t>tmp
                for i in range(k):
                    slotbuf[i] = idx[i]
                for i in range(k - 1, -1, -1):
                    j = jlog[i]
                    tmp = idx[i]
                    idx[i] = idx[j]
                    idx[j] = <int32_t>tmp
                for i in range(k):
                    slot = slotbuf[i]
                    a = ereps[slot]
                    b = pairing[a]
                    buf[2 * i] = <int32_t>a
                    buf[2 * i + 1] = <int32_t>b
                    if stamp[a] != gen:
                        stamp[a] = gen
                        fstep[a] = <int32_t>t
                    if stamp[b] != gen:
                        stamp[b] = gen
                        fstep[b] = <int32_t>t
                for i in range(2 * k - 1, 0, -1):
                    j = <long>_below(&rng, <uint64_t>(i + 1))
                    tmp = buf[i]
                    buf[i] = buf[j]
                    buf[j] = <int32_t>tmp
                for i in range(k):
                    a = buf[2 * i]
                    b = buf[2 * i + 1]
                    lpos[np_log] = <int32_t>a
                    lold[np_log] = pairing[a]
                    np_log += 1
                    lpos[np_log] = <int32_t>b
                    lold[np_log] = pairing[b]
                    np_log += 1
                    pairing[a] = <int32_t>b
                    pairing[b] = <int32_t>a
                    slot = slotbuf[i]
                    epos[ne_log] = <int32_t>slot
                    eold[ne_log] = ereps[slot]
                    ne_log += 1
                    ereps[slot] = <int32_t>a
            ok = True
            for t in range(1, t_steps + 1):
                x = path[t - 1]
                hit = stamp[x] == gen and fstep[x] <= t
                if hit != (in_t[t] != 0):
                    ok = False
                    break
            if ok:
                count += 1
            while np_log > 0:
                np_log -= 1
                pairing[lpos[np_log]] = lold[np_log]
            while ne_log > 0:
                ne_log -= 1
                ereps[epos[ne_log]] = eold[ne_log]

    free(pairing); free(ereps); free(idx); free(stamp); free(fstep); free(buf)
    free(slotbuf); free(jlog)
    free(lpos); free(lold); free(epos); free(eold)
    return int(count)


# ---------------------------------------------------- pairing sampler --

def sample_pairing(long ell, unsigned long long master_seed, long index):
    """Uniform pairing on [0, ell): repeatedly pair the lowest unpaired
    index with a uniform draw from the remaining unpaired ones."""
    out_a = np.full(ell, -1, dtype=np.int32)
    cdef int32_t[::1] out = out_a
    cdef int32_t* pool = <int32_t*>malloc(ell * sizeof(int32_t))
    cdef int32_t* pos = <int32_t*>malloc(ell * sizeof(int32_t))
    if pool == NULL or pos == NULL:
        free(pool); free(pos)
        raise MemoryError("sample_pairing workspace allocation failed")
    cdef Xo rng
    cdef long size, low, i, j, partner, last
    with nogil:
        _xo_seed(&rng, <uint64_t>master_seed, <uint64_t>index)
        for i in range(ell):
            pool[i] = <int32_t>i
            pos[i] = <int32_t>i
        size = ell
        low = 0
        while size > 0:
            while out[low] >= 0:
                low += 1
            i = pos[low]
            last = pool[size - 1]
            pool[i] = <int32_t>last
            pos[last] = <int32_t>i
            size -= 1
            j = <long>_below(&rng, <uint64_t>size)
            partner = pool[j]
            last = pool[size - 1]
            pool[j] = <int32_t>last
            pos[last] = <int32_t>j
            size -= 1
            out[low] = <int32_t>partner
            out[partner] = <int32_t>low
    free(pool)
    free(pos)
    return out_a
