"""Non-backtracking random walk on half-edges, and the joint chain that
rewires the graph before each walk move.

From half-edge x the walker jumps to a uniformly chosen sibling of the
half-edge x is currently paired to, never onto that half-edge itself. The
stopping time tau is the first step t whose pre-move position lies in the
union of the rewired sets R_1..R_t (the step-t set included), so tau = 1
is possible.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .configs import Configuration
from .degrees import DegreeSequence
from .dynamics import RewiringTrace, rewire_step

TRANSITION_MATRIX_MAX_ELL = 128


@dataclass
class JointTrajectory:
    positions: list[int]  # X_0 .. X_T
    tau: int | None
    trace: RewiringTrace
    configs: list[Configuration] | None = None  # C_1..C_T when recorded

    @property
    def steps(self) -> int:
        return len(self.positions) - 1


def walk_step(
    c: Configuration, seq: DegreeSequence, x: int, rng: np.random.Generator
) -> int:
    """One walk move under configuration c from half-edge x."""
    y = int(c.pairing[x])
    v = int(seq.vertex_of[y])
    start, end = seq.sibling_range(v)
    deg = end - start - 1  # onward choices exclude y itself
    r = int(rng.integers(deg))
    sib = start + r
    if sib >= y:
        sib += 1
    return sib


def transition_matrix(c: Configuration, seq: DegreeSequence) -> np.ndarray:
    """Dense one-step walk matrix P[x, y] = 1/deg(y) when y is a sibling of
    the half-edge paired to x. Rows and columns both sum to 1. Guarded to
    small instances; meant for exact checks."""
    ell = seq.ell
    if ell > TRANSITION_MATRIX_MAX_ELL:
        raise ValueError(
            f"transition_matrix limited to ell <= {TRANSITION_MATRIX_MAX_ELL}, got {ell}"
        )
    P = np.zeros((ell, ell))
    for x in range(ell):
        y0 = int(c.pairing[x])
        v = int(seq.vertex_of[y0])
        start, end = seq.sibling_range(v)
        deg = end - start - 1
        for y in range(start, end):
            if y != y0:
                P[x, y] = 1.0 / deg
    return P


def run_joint(
    eta: Configuration,
    seq: DegreeSequence,
    x0: int,
    k: int,
    T: int,
    rng: np.random.Generator,
    keep_configs: bool = False,
) -> JointTrajectory:
    """Simulate T steps of the joint chain from (eta, x0).

    Step order is rewire-then-move: at step t the graph rewires to C_t,
    tau is checked against the updated union of rewired sets, and the
    walker then moves under C_t. keep_configs retains every C_t for
    post-hoc validation (test scale only).
    """
    if not 0 <= x0 < seq.ell:
        raise IndexError(f"start half-edge {x0} out of range [0, {seq.ell})")
    trace = RewiringTrace(ell=seq.ell)
    positions = [int(x0)]
    configs: list[Configuration] | None = [] if keep_configs else None
    tau: int | None = None
    c = eta
    x = int(x0)
    for t in range(1, T + 1):
        c, rewired = rewire_step(c, k, rng)
        trace.record(rewired)
        if configs is not None:
            configs.append(c)
        if tau is None and trace.cumulative[x]:
            tau = t
        x = walk_step(c, seq, x, rng)
        positions.append(x)
    return JointTrajectory(positions=positions, tau=tau, trace=trace, configs=configs)


def rescan_tau(traj: JointTrajectory) -> int | None:
    """Recompute tau from the recorded trace and positions by direct scan:
    the first t with X_{t-1} in R_1 u ... u R_t. Used as an independent
    consistency check on simulated trajectories."""
    seen: set[int] = set()
    for t, rewired in enumerate(traj.trace.per_step, start=1):
        seen |= rewired
        if traj.positions[t - 1] in seen:
            return t
    return None
