"""Graph dynamics: cut k uniformly chosen edges per step and uniformly
re-pair their 2k half-edges. Degrees never change.

This module is the readable reference implementation used by tests and
small-scale runs; mass simulation goes through `dynmix.simcore`.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .configs import Configuration, uniform_pairing
from .degrees import DegreeSequence


@dataclass
class RewiringTrace:
    """Per-step rewired half-edge sets plus their running union."""

    ell: int
    per_step: list[frozenset[int]] = field(default_factory=list)
    cumulative: np.ndarray = None  # bool, length ell

    def __post_init__(self):
        if self.cumulative is None:
            self.cumulative = np.zeros(self.ell, dtype=bool)

    def record(self, rewired: frozenset[int]) -> None:
        self.per_step.append(rewired)
        self.cumulative[list(rewired)] = True

    def union_upto(self, t: int) -> frozenset[int]:
        """R_{<=t}: union of the first t recorded steps."""
        out: set[int] = set()
        for s in self.per_step[:t]:
            out |= s
        return frozenset(out)

    @property
    def steps(self) -> int:
        return len(self.per_step)


def rewire_step(
    c: Configuration, k: int, rng: np.random.Generator
) -> tuple[Configuration, frozenset[int]]:
    """One dynamics step: returns the new configuration and the set of the
    2k half-edges that were re-paired (re-pairing stays inside that set).

    A cut edge may be recreated by the uniform re-pairing; no rejection.
    """
    m = c.m
    if not 2 <= k <= m:
        raise ValueError(f"k={k} out of range [2, {m}]")
    edges = c.edges()
    chosen = rng.choice(m, size=k, replace=False)
    rewired: list[int] = []
    for idx in chosen:
        x, y = edges[int(idx)]
        rewired.append(x)
        rewired.append(y)
    new_pairing = c.pairing.copy()
    for x, y in uniform_pairing(rewired, rng):
        new_pairing[x] = y
        new_pairing[y] = x
    return Configuration(new_pairing), frozenset(rewired)


def evolve(
    c0: Configuration, k: int, T: int, rng: np.random.Generator
) -> tuple[Configuration, RewiringTrace]:
    """Apply T rewiring steps, recording every rewired set."""
    trace = RewiringTrace(ell=c0.ell)
    c = c0
    for _ in range(T):
        c, rewired = rewire_step(c, k, rng)
        trace.record(rewired)
    return c, trace


def alpha_to_k(seq: DegreeSequence, alpha: float) -> tuple[int, float]:
    """Translate a target rewired fraction alpha = k/m into an edge count.

    Returns (k, effective_alpha) with k = round(alpha*m) clamped into
    [2, m]; callers should report the effective value when it differs.
    """
    if not 0 < alpha <= 1:
        raise ValueError(f"alpha={alpha} outside (0, 1]")
    m = seq.m
    k = int(round(alpha * m))
    k = max(2, min(k, m))
    return k, k / m
