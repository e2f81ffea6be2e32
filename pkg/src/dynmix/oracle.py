"""Exact small-instance computations used as ground truth for the
Monte Carlo estimators: full configuration-space enumeration, the exact
rewiring kernel, the exact law of the walk position via a joint dynamic
program, and the exact stopping-time tail via trajectory enumeration.

Everything here is guarded to tiny sizes; the guards are part of the
contract, not tunables.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from math import comb

import numpy as np

from .configs import Configuration, double_factorial
from .degrees import DegreeSequence
from .walk import transition_matrix

ORACLE_MAX_ELL = 10
DP_MAX_T = 12
TAU_MAX_M = 4
TAU_MAX_T = 4


@dataclass
class ConfSpace:
    """All configurations on a half-edge set, canonically ordered."""

    configurations: list[Configuration]
    index: dict[tuple, int]

    def __post_init__(self):
        self._q_cache: dict[int, np.ndarray] = {}
        self._p_cache: dict[int, list[np.ndarray]] = {}

    @property
    def size(self) -> int:
        return len(self.configurations)

    def locate(self, c: Configuration) -> int:
        return self.index[c.canonical()]

    def pairing_matrix(self) -> np.ndarray:
        return np.stack([c.pairing for c in self.configurations])

    def q_matrix(self, k: int) -> np.ndarray:
        if k not in self._q_cache:
            self._q_cache[k] = exact_q_matrix(self, k)
        return self._q_cache[k]

    def walk_matrices(self, seq: DegreeSequence) -> list[np.ndarray]:
        key = id(seq)
        if key not in self._p_cache:
            self._p_cache[key] = [transition_matrix(c, seq) for c in self.configurations]
        return self._p_cache[key]


def _enumerate_pairings(indices: tuple[int, ...]):
    if not indices:
        yield ()
        return
    low = indices[0]
    rest = indices[1:]
    for i, partner in enumerate(rest):
        tail = rest[:i] + rest[i + 1 :]
        for sub in _enumerate_pairings(tail):
            yield ((low, partner),) + sub


def enumerate_configurations(seq: DegreeSequence, max_ell: int = ORACLE_MAX_ELL) -> ConfSpace:
    """Exhaustive, duplicate-free list of all (ell-1)!! configurations."""
    ell = seq.ell
    if ell > max_ell:
        raise ValueError(f"configuration space enumeration limited to ell <= {max_ell}, got {ell}")
    configs: list[Configuration] = []
    index: dict[tuple, int] = {}
    for pairs in _enumerate_pairings(tuple(range(ell))):
        pairing = np.empty(ell, dtype=np.int32)
        for x, y in pairs:
            pairing[x] = y
            pairing[y] = x
        c = Configuration(pairing)
        key = c.canonical()
        index[key] = len(configs)
        configs.append(c)
    expected = double_factorial(ell - 1)
    if len(configs) != expected or len(index) != expected:
        raise AssertionError("enumeration produced duplicates or missed configurations")
    return ConfSpace(configurations=configs, index=index)


def exact_q_matrix(space: ConfSpace, k: int) -> np.ndarray:
    """Dense rewiring kernel over the enumerated configuration space.

    Entries depend only on the pairwise edge Hamming distance, so the
    distance matrix is computed vectorised and mapped through the exact
    per-distance probabilities.
    """
    P = space.pairing_matrix()
    S, ell = P.shape
    m = ell // 2
    if not 2 <= k <= m:
        raise ValueError(f"k={k} out of range [2, {m}]")
    denom = comb(m, k) * double_factorial(2 * k - 1)
    weights = np.array(
        [
            float(Fraction(comb(m - d, k - d), denom)) if d <= k else 0.0
            for d in range(m + 1)
        ]
    )
    dist = (P[:, None, :] != P[None, :, :]).sum(axis=2) // 2
    return weights[dist]


def exact_walk_distribution(
    space: ConfSpace,
    seq: DegreeSequence,
    eta: Configuration,
    x0: int,
    k: int,
    t: int,
) -> np.ndarray:
    """Exact law of the walk position after t joint steps from (eta, x0).

    Forward dynamic program on the joint state (configuration, half-edge):
    the configuration mixes through the rewiring kernel, then the walk
    moves under the new configuration.
    """
    if t > DP_MAX_T:
        raise ValueError(f"joint dynamic program limited to t <= {DP_MAX_T}, got {t}")
    ell = seq.ell
    S = space.size
    Q = space.q_matrix(k)
    P = space.walk_matrices(seq)
    pi = np.zeros((S, ell))
    pi[space.locate(eta), x0] = 1.0
    for _ in range(t):
        mixed = Q.T @ pi  # mixed[c', y] = sum_c pi[c, y] Q[c, c']
        for ci in range(S):
            pi[ci] = mixed[ci] @ P[ci]
    return pi.sum(axis=0)


def tv_distance(p: np.ndarray, q: np.ndarray) -> float:
    """Total variation distance: half the L1 distance."""
    return 0.5 * float(np.abs(np.asarray(p) - np.asarray(q)).sum())


def exact_tv(
    space: ConfSpace,
    seq: DegreeSequence,
    eta: Configuration,
    x0: int,
    k: int,
    t: int,
) -> float:
    """Exact TV distance between the walk law at time t and uniform."""
    law = exact_walk_distribution(space, seq, eta, x0, k, t)
    return tv_distance(law, np.full(seq.ell, 1.0 / seq.ell))


def _walk_moves(pairing: tuple[int, ...], seq: DegreeSequence, x: int):
    """[(next position, probability)] for one walk move; exact fractions."""
    y = pairing[x]
    v = int(seq.vertex_of[y])
    start, end = seq.sibling_range(v)
    deg = end - start - 1
    p = Fraction(1, deg)
    return [(sib, p) for sib in range(start, end) if sib != y]


def exact_tau_paths(
    seq: DegreeSequence,
    eta: Configuration,
    x0: int,
    k: int,
    t: int,
) -> tuple[Fraction, dict[int, Fraction], dict[int, Fraction]]:
    """Exhaustive enumeration of all rewiring choices, re-pairings and walk
    moves to depth t.

    Returns (P(tau > t), law of X_t on {tau > t}, law of X_t on {tau <= t}),
    all as exact fractions; the two partial laws sum to the corresponding
    event probabilities.
    """
    m = seq.m
    if m > TAU_MAX_M or t > TAU_MAX_T:
        raise ValueError(
            f"stopping-time enumeration limited to m <= {TAU_MAX_M}, t <= {TAU_MAX_T}"
        )
    if not 2 <= k <= m:
        raise ValueError(f"k={k} out of range [2, {m}]")
    ell = seq.ell
    edge_choice_p = Fraction(1, comb(m, k))
    match_p = Fraction(1, double_factorial(2 * k - 1))

    surviving: dict[int, Fraction] = {}
    stopped: dict[int, Fraction] = {}

    def recurse(pairing: tuple[int, ...], rewired: frozenset[int], x: int, step: int,
                prob: Fraction, hit: bool) -> None:
        if step == t:
            bucket = stopped if hit else surviving
            bucket[x] = bucket.get(x, Fraction(0)) + prob
            return
        edges = [(a, pairing[a]) for a in range(ell) if a < pairing[a]]
        for subset in combinations(range(m), k):
            cut = []
            for idx in subset:
                cut.extend(edges[idx])
            new_rewired = rewired | frozenset(cut)
            now_hit = hit or (x in new_rewired)
            for match in _enumerate_pairings(tuple(sorted(cut))):
                new_pairing = list(pairing)
                for a, b in match:
                    new_pairing[a] = b
                    new_pairing[b] = a
                np_t = tuple(new_pairing)
                base = prob * edge_choice_p * match_p
                for nxt, wp in _walk_moves(np_t, seq, x):
                    recurse(np_t, new_rewired, nxt, step + 1, base * wp, now_hit)

    recurse(tuple(int(v) for v in eta.pairing), frozenset(), int(x0), 0, Fraction(1), False)
    tail = sum(surviving.values(), Fraction(0))
    total = tail + sum(stopped.values(), Fraction(0))
    if total != 1:
        raise AssertionError(f"enumeration mass {total} != 1")
    return tail, surviving, stopped


def exact_tau_tail(
    seq: DegreeSequence,
    eta: Configuration,
    x0: int,
    k: int,
    t: int,
) -> float:
    """Exact P(tau > t) for the joint chain started at (eta, x0)."""
    if t == 0:
        return 1.0
    tail, _, _ = exact_tau_paths(seq, eta, x0, k, t)
    return float(tail)
