"""Configurations: fixed-point-free involutions pairing the half-edges.

A configuration is stored as an int32 array `pairing` with
pairing[pairing[x]] == x and pairing[x] != x for every half-edge x.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb

import numpy as np

from .degrees import DegreeSequence


@dataclass(frozen=True)
class Configuration:
    pairing: np.ndarray  # int32, length ell

    @property
    def ell(self) -> int:
        return len(self.pairing)

    @property
    def m(self) -> int:
        return self.ell // 2

    def validate(self) -> None:
        p = self.pairing
        if np.any(p[p] != np.arange(len(p))):
            raise ValueError("pairing is not an involution")
        if np.any(p == np.arange(len(p))):
            raise ValueError("pairing has a fixed point")

    def edges(self) -> list[tuple[int, int]]:
        """Canonical edge list: (min, max) pairs in ascending order."""
        p = self.pairing
        return [(x, int(p[x])) for x in range(len(p)) if x < p[x]]

    def canonical(self) -> tuple[tuple[int, int], ...]:
        """Hashable normal form used for enumeration and deduplication."""
        return tuple(self.edges())

    def copy(self) -> "Configuration":
        return Configuration(self.pairing.copy())

    def to_json(self) -> list[int]:
        return [int(v) for v in self.pairing]


def from_pairs(pairs, ell: int | None = None) -> Configuration:
    """Build a configuration from explicit (x, y) pairs."""
    pairs = [tuple(p) for p in pairs]
    if ell is None:
        ell = 2 * len(pairs)
    pairing = np.full(ell, -1, dtype=np.int32)
    for x, y in pairs:
        if x == y:
            raise ValueError(f"self-pair {x}")
        if pairing[x] != -1 or pairing[y] != -1:
            raise ValueError(f"half-edge reused in pair ({x}, {y})")
        pairing[x] = y
        pairing[y] = x
    if np.any(pairing < 0):
        raise ValueError("pairs do not cover all half-edges")
    return Configuration(pairing)


def from_json(data) -> Configuration:
    c = Configuration(np.asarray(data, dtype=np.int32))
    c.validate()
    return c


def uniform_pairing(indices, rng: np.random.Generator) -> list[tuple[int, int]]:
    """Uniform perfect matching on the given half-edge indices.

    Sequential rule: pair the lowest unpaired index with a uniform draw from
    the remaining unpaired ones. Swap removal keeps each draw O(1).
    """
    order = sorted(int(i) for i in indices)
    if len(order) % 2 != 0:
        raise ValueError("cannot pair an odd number of half-edges")
    if len(set(order)) != len(order):
        raise ValueError("duplicate half-edge index")
    remaining = list(order)
    pos = {h: i for i, h in enumerate(remaining)}
    size = len(remaining)
    paired: set[int] = set()
    pairs: list[tuple[int, int]] = []
    for low in order:
        if low in paired:
            continue
        i = pos[low]
        last = remaining[size - 1]
        remaining[i] = last
        pos[last] = i
        size -= 1
        j = int(rng.integers(size))
        partner = remaining[j]
        last = remaining[size - 1]
        remaining[j] = last
        pos[last] = j
        size -= 1
        paired.add(low)
        paired.add(partner)
        pairs.append((low, partner))
    return pairs


def sample_configuration(seq: DegreeSequence, rng: np.random.Generator) -> Configuration:
    """Uniform configuration on seq's half-edges.

    Same sequential pairing as `uniform_pairing`, specialised to the full
    index range with array-based swap removal. Self-loops and multi-edges
    are allowed.
    """
    ell = seq.ell
    pairing = np.full(ell, -1, dtype=np.int32)
    pool = np.arange(ell, dtype=np.int32)
    pos = np.arange(ell, dtype=np.int32)  # pos[h] = index of h in pool[:size]
    size = ell
    low = 0
    while size > 0:
        while pairing[low] >= 0:
            low += 1
        i = int(pos[low])
        last = int(pool[size - 1])
        pool[i] = last
        pos[last] = i
        size -= 1
        j = int(rng.integers(size))
        partner = int(pool[j])
        last = int(pool[size - 1])
        pool[j] = last
        pos[last] = j
        size -= 1
        pairing[low] = partner
        pairing[partner] = low
    return Configuration(pairing)


def pair_of(c: Configuration, x: int) -> int:
    """The half-edge paired to x."""
    if not 0 <= x < c.ell:
        raise IndexError(f"half-edge {x} out of range [0, {c.ell})")
    return int(c.pairing[x])


def hamming(a: Configuration, b: Configuration) -> int:
    """Number of edges present in `a` but not in `b` (symmetric)."""
    if a.ell != b.ell:
        raise ValueError(f"configurations have different sizes: {a.ell} != {b.ell}")
    return int(np.count_nonzero(a.pairing != b.pairing)) // 2


def multigraph_stats(c: Configuration, seq: DegreeSequence) -> tuple[int, int]:
    """(self_loops, multi_edge_excess) of the multigraph induced by c.

    self_loops counts pairs whose two half-edges share a vertex.
    multi_edge_excess counts, over unordered vertex pairs u != v, every
    edge beyond the first.
    """
    if c.ell != seq.ell:
        raise ValueError("configuration and degree sequence sizes differ")
    v = seq.vertex_of
    self_loops = 0
    seen: dict[tuple[int, int], int] = {}
    for x, y in c.edges():
        a, b = int(v[x]), int(v[y])
        if a == b:
            self_loops += 1
            continue
        key = (a, b) if a < b else (b, a)
        seen[key] = seen.get(key, 0) + 1
    excess = sum(cnt - 1 for cnt in seen.values())
    return self_loops, excess


def double_factorial(n: int) -> int:
    """n!! for odd n >= -1; (2k-1)!! counts the matchings of 2k points."""
    if n < -1:
        raise ValueError("double factorial undefined below -1")
    out = 1
    while n > 1:
        out *= n
        n -= 2
    return out


def q_probability(a: Configuration, b: Configuration, k: int) -> float:
    """One-step probability of moving from configuration `a` to `b` when k
    uniformly chosen edges are cut and their half-edges uniformly re-paired.

    Equals C(m-d, k-d) / (C(m, k) * (2k-1)!!) with d the edge Hamming
    distance between `a` and `b`, and 0 when d > k. Evaluated in exact
    rational arithmetic before conversion to float.
    """
    if a.ell != b.ell:
        raise ValueError("configurations have different sizes")
    m = a.m
    if not 2 <= k <= m:
        raise ValueError(f"k={k} out of range [2, {m}]")
    d = hamming(a, b)
    if d > k:
        return 0.0
    val = Fraction(comb(m - d, k - d), comb(m, k) * double_factorial(2 * k - 1))
    return float(val)
