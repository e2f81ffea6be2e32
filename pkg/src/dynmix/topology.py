"""Structural diagnostics on a frozen configuration: forward balls under
the walk metric, tree checks, the breadth-first exploration process,
segmented-path enumeration, good tuples, and the Monte Carlo check that
rewiring-pattern events depend only on a path's shape.

A "ball" here is the set of half-edges the walk can stand on within a
given number of moves: distance is the length of the shortest
non-backtracking path, so balls are forward cones, not metric balls of
the underlying multigraph.
"""
from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field

import numpy as np

from . import simcore
from .configs import Configuration
from .degrees import DegreeSequence

SEGMENTED_PATH_MAX_ELL = 20
SEGMENTED_PATH_MAX_T = 6


def ball_stats(
    c: Configuration, seq: DegreeSequence, x: int, tmax: int
) -> tuple[list[int], list[bool], set[int]]:
    """Breadth-first expansion of the walk-reachable set from x.

    Returns (sizes, tree_flags, members): sizes[d] = |B_d(x)|, tree_flags[d]
    is True when no traversed edge up to depth d closed a cycle, touched an
    already-visited vertex, or was a self-loop; members is B_tmax(x).
    """
    pairing = c.pairing
    vertex_of = seq.vertex_of
    offsets = seq.offsets
    seen_pos: set[int] = {int(x)}
    seen_vertex: set[int] = {int(vertex_of[x])}
    frontier: list[int] = [int(x)]
    sizes = [1]
    tree_flags = [True]
    is_tree = True
    for _ in range(1, tmax + 1):
        nxt: list[int] = []
        for z in frontier:
            y = int(pairing[z])
            w = int(vertex_of[y])
            if w == int(vertex_of[z]) or w in seen_vertex:
                is_tree = False
            if w not in seen_vertex:
                seen_vertex.add(w)
            start, end = int(offsets[w]), int(offsets[w + 1])
            for s in range(start, end):
                if s != y and s not in seen_pos:
                    seen_pos.add(s)
                    nxt.append(s)
        frontier = nxt
        sizes.append(len(seen_pos))
        tree_flags.append(is_tree)
    return sizes, tree_flags, seen_pos


def ball(c: Configuration, seq: DegreeSequence, x: int, t: int) -> set[int]:
    """All half-edges reachable from x in at most t walk moves."""
    if t < 0:
        raise ValueError("radius must be >= 0")
    _, _, members = ball_stats(c, seq, x, t)
    return members


def is_tree_ball(c: Configuration, seq: DegreeSequence, x: int, t: int) -> bool:
    """True when the radius-t expansion sees no repeated vertex and no
    self-loop."""
    _, flags, _ = ball_stats(c, seq, x, t)
    return flags[t]


# ------------------------------------------------------------ explore --


@dataclass
class ThornyGraph:
    """Partially explored graph: some half-edges are still unpaired."""

    paired_edges: list[tuple[int, int]] = field(default_factory=list)
    dangling: set[int] = field(default_factory=set)
    active_queue: deque = field(default_factory=deque)
    unpaired_pool: set[int] = field(default_factory=set)
    vertices: set[int] = field(default_factory=set)
    root: int = -1


def explore(
    seq: DegreeSequence,
    rng: np.random.Generator,
    s_max: int | float,
    x: int | None = None,
) -> ThornyGraph:
    """Breadth-first uniform-pairing exploration from a half-edge.

    Starts from x (uniform when omitted) with its vertex and siblings
    present, then repeatedly pairs the front of the active queue with a
    uniformly sampled half-edge, rejecting draws that are already paired
    or equal to the one being paired. Halts after s_max pairings or when
    the active queue empties, whichever comes first.
    """
    ell = seq.ell
    if x is None:
        x = int(rng.integers(ell))
    g = ThornyGraph(root=int(x))
    g.unpaired_pool = set(range(ell))
    v0 = seq.half_edge_owner(x)
    start, end = seq.sibling_range(v0)
    g.vertices.add(v0)
    g.dangling = set(range(start, end))
    g.active_queue.append(int(x))
    in_queue = {int(x)}
    paired: set[int] = set()

    s = 0
    while g.active_queue and s < s_max:
        y = g.active_queue.popleft()
        in_queue.discard(y)
        if y in paired:
            continue
        while True:
            z = int(rng.integers(ell))
            if z != y and z not in paired:
                break
        g.paired_edges.append((y, z))
        paired.add(y)
        paired.add(z)
        g.unpaired_pool.discard(y)
        g.unpaired_pool.discard(z)
        g.dangling.discard(y)
        g.dangling.discard(z)
        in_queue.discard(z)
        w = seq.half_edge_owner(z)
        ws, we = seq.sibling_range(w)
        g.vertices.add(w)
        for h in range(ws, we):
            if h != z and h not in paired:
                g.dangling.add(h)
                if h not in in_queue:
                    g.active_queue.append(h)
                    in_queue.add(h)
        s += 1
    return g


# ---------------------------------------------------- segmented paths --


@dataclass(frozen=True)
class SegmentedPath:
    """A walk-shaped half-edge sequence whose segments follow the frozen
    configuration; positions listed in segment_ends start new segments and
    their incoming step is unconstrained."""

    half_edges: tuple[int, ...]
    segment_ends: frozenset[int]

    @property
    def length(self) -> int:
        return len(self.half_edges) - 1


def _step_candidates(c: Configuration, seq: DegreeSequence, z: int) -> list[int]:
    y = int(c.pairing[z])
    start, end = seq.sibling_range(seq.half_edge_owner(y))
    return [s for s in range(start, end) if s != y]


def validate_segmented_path(
    c: Configuration,
    seq: DegreeSequence,
    half_edges,
    segment_ends,
    self_avoiding: bool = True,
) -> None:
    """Raise ValueError unless the sequence is a segmented path for the
    given boundary set (and vertex self-avoiding when requested)."""
    hes = [int(h) for h in half_edges]
    t = len(hes) - 1
    ends = set(int(i) for i in segment_ends)
    if any(i < 1 or i > t for i in ends):
        raise ValueError(f"segment boundaries {sorted(ends)} outside [1, {t}]")
    for i in range(1, t + 1):
        if i in ends:
            continue
        y = int(c.pairing[hes[i - 1]])
        if seq.half_edge_owner(hes[i]) != seq.half_edge_owner(y) or hes[i] == y:
            raise ValueError(f"step {i} does not follow the configuration")
    if self_avoiding:
        verts = [seq.half_edge_owner(h) for h in hes]
        if len(set(verts)) != len(verts):
            raise ValueError("path visits a vertex twice")


def enumerate_segmented_paths(
    c: Configuration,
    seq: DegreeSequence,
    x: int,
    y: int,
    segment_ends,
    t: int,
) -> list[SegmentedPath]:
    """Exhaustive list of vertex self-avoiding segmented paths of length
    t+1 from x to y with boundaries exactly at segment_ends. Guarded to
    tiny instances because boundary steps branch over every half-edge."""
    ends = frozenset(int(i) for i in segment_ends)
    if seq.ell > SEGMENTED_PATH_MAX_ELL and t > SEGMENTED_PATH_MAX_T:
        raise ValueError(
            f"enumeration limited to ell <= {SEGMENTED_PATH_MAX_ELL} or t <= {SEGMENTED_PATH_MAX_T}"
        )
    if any(i < 1 or i > t for i in ends):
        raise ValueError(f"segment boundaries {sorted(ends)} outside [1, {t}]")
    out: list[SegmentedPath] = []
    path = [int(x)]
    used_vertices = {seq.half_edge_owner(x)}

    def recurse(i: int) -> None:
        if i > t:
            if path[-1] == int(y):
                out.append(SegmentedPath(tuple(path), ends))
            return
        if i in ends:
            candidates = range(seq.ell)
        else:
            candidates = _step_candidates(c, seq, path[-1])
        for nxt in candidates:
            w = seq.half_edge_owner(nxt)
            if w in used_vertices:
                continue
            path.append(int(nxt))
            used_vertices.add(w)
            recurse(i + 1)
            path.pop()
            used_vertices.remove(w)

    recurse(1)
    return out


# -------------------------------------------------------- good tuples --


def _segment_radii(segment_ends, t: int) -> list[int]:
    ends = sorted(int(i) for i in segment_ends)
    if any(i < 1 or i > t for i in ends):
        raise ValueError(f"segment boundaries {ends} outside [1, {t}]")
    cuts = [0] + ends + [t]
    return [cuts[j + 1] - cuts[j] for j in range(len(cuts) - 1)]


def is_good_tuple(
    c: Configuration, seq: DegreeSequence, xs, segment_ends, t: int
) -> bool:
    """A tuple (one half-edge per segment) is good when every segment's
    ball of radius equal to that segment's length is a tree and the balls
    are pairwise disjoint as half-edge sets."""
    radii = _segment_radii(segment_ends, t)
    xs = [int(v) for v in xs]
    if len(xs) != len(radii):
        raise ValueError(f"expected {len(radii)} half-edges, got {len(xs)}")
    balls: list[set[int]] = []
    for x, r in zip(xs, radii):
        _, flags, members = ball_stats(c, seq, x, r)
        if not flags[r]:
            return False
        balls.append(members)
    taken: set[int] = set()
    for b in balls:
        if taken & b:
            return False
        taken |= b
    return True


def good_tuple_density(
    c: Configuration,
    seq: DegreeSequence,
    segment_ends,
    t: int,
    samples: int,
    rng: np.random.Generator,
) -> float:
    """Fraction of uniformly sampled tuples that are good for the given
    boundary set at horizon t."""
    radii = _segment_radii(segment_ends, t)
    hits = 0
    for _ in range(samples):
        xs = rng.integers(seq.ell, size=len(radii))
        if is_good_tuple(c, seq, xs, segment_ends, t):
            hits += 1
    return hits / samples


# ------------------------------------------- rewiring-pattern events --


def _window_counts(hes) -> dict[tuple[int, int], int]:
    t = len(hes) - 1
    return {
        (s, s2): len(set(hes[s : s2 + 1]))
        for s in range(0, t)
        for s2 in range(s + 1, t + 1)
    }


def isomorphic_path_event_check(
    eta: Configuration,
    seq: DegreeSequence,
    path_a,
    path_b,
    segment_ends,
    k: int,
    replicas: int,
    master_seed: int = 0,
    jobs: int = 1,
    backend: str | None = None,
) -> tuple[float, float, float]:
    """Estimate, for two same-shape segmented paths, the probability that
    the rewiring history hits the pattern prescribed by the boundary set,
    using `replicas` independent dynamics runs per path.

    Returns (p_a, p_b, z) with z the two-proportion z-score. Requires the
    paths to have equal distinct-half-edge counts on every index window;
    same-shape paths must have equal probabilities, so |z| should look
    like a standard normal draw.
    """
    a = [int(v) for v in path_a]
    b = [int(v) for v in path_b]
    if len(a) != len(b):
        raise ValueError("paths have different lengths")
    validate_segmented_path(eta, seq, a, segment_ends, self_avoiding=False)
    validate_segmented_path(eta, seq, b, segment_ends, self_avoiding=False)
    if _window_counts(a) != _window_counts(b):
        raise ValueError("paths are not isomorphic: window half-edge counts differ")
    hits_a = simcore.run_event_replicas(
        eta.pairing, k, a, segment_ends, replicas,
        master_seed=master_seed, jobs=jobs, backend=backend,
    )
    seed_b = master_seed if a == b else master_seed + 0x9E3779B9
    hits_b = simcore.run_event_replicas(
        eta.pairing, k, b, segment_ends, replicas,
        master_seed=seed_b, jobs=jobs, backend=backend,
    )
    p_a = hits_a / replicas
    p_b = hits_b / replicas
    pooled = (hits_a + hits_b) / (2 * replicas)
    denom = math.sqrt(max(pooled * (1 - pooled) * 2 / replicas, 1e-300))
    z = (p_a - p_b) / denom
    return p_a, p_b, z
