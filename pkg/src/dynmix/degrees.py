"""Degree sequences and the half-edge index space they induce.

Half-edges are numbered 0..ell-1 in vertex order, so the half-edges of a
vertex occupy one contiguous block. All degree sequences must have an even
total and minimum degree 2; the walk is undefined on dead ends.
"""
from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

MIN_DEGREE = 2


@dataclass(frozen=True)
class DegreeSequence:
    """Per-vertex degrees plus derived half-edge indexing arrays.

    Attributes
    ----------
    degrees : int64 array, one entry per vertex
    offsets : int64 array of length n+1; vertex v owns half-edges
        offsets[v] .. offsets[v+1]-1
    vertex_of : int32 array of length ell mapping a half-edge to its vertex
    """

    degrees: np.ndarray
    offsets: np.ndarray = field(repr=False)
    vertex_of: np.ndarray = field(repr=False)

    @property
    def n(self) -> int:
        return len(self.degrees)

    @property
    def ell(self) -> int:
        return int(self.offsets[-1])

    @property
    def m(self) -> int:
        return self.ell // 2

    def half_edge_owner(self, x: int) -> int:
        """Vertex incident to half-edge x."""
        if not 0 <= x < self.ell:
            raise IndexError(f"half-edge {x} out of range [0, {self.ell})")
        return int(self.vertex_of[x])

    def sibling_range(self, v: int) -> tuple[int, int]:
        """Half-open index range of the half-edges incident to vertex v."""
        return int(self.offsets[v]), int(self.offsets[v + 1])

    def sibling_ranges(self) -> list[tuple[int, int]]:
        return [self.sibling_range(v) for v in range(self.n)]

    def out_degree(self, x: int) -> int:
        """Number of onward choices from half-edge x: d(v(x)) - 1."""
        return int(self.degrees[self.vertex_of[x]]) - 1

    def digest(self) -> str:
        """Short stable hash of the degree list, for output provenance."""
        h = hashlib.sha256(np.ascontiguousarray(self.degrees, dtype=np.int64).tobytes())
        return h.hexdigest()[:12]


@dataclass(frozen=True)
class RegularityReport:
    """Summary statistics checked against the walk's well-posedness needs."""

    nu: float
    max_degree: int
    min_degree: int
    ell_even: bool
    min_degree_ok: bool


def _build(degrees: np.ndarray) -> DegreeSequence:
    degrees = np.asarray(degrees, dtype=np.int64)
    if degrees.ndim != 1 or len(degrees) == 0:
        raise ValueError("degree sequence must be a non-empty 1-d list of integers")
    if degrees.min() < MIN_DEGREE:
        bad = int(np.argmin(degrees))
        raise ValueError(
            f"vertex {bad} has degree {int(degrees[bad])}; all degrees must be >= {MIN_DEGREE}"
        )
    total = int(degrees.sum())
    if total % 2 != 0:
        raise ValueError(f"total degree {total} is odd; half-edges cannot be paired")
    offsets = np.zeros(len(degrees) + 1, dtype=np.int64)
    np.cumsum(degrees, out=offsets[1:])
    vertex_of = np.repeat(np.arange(len(degrees), dtype=np.int32), degrees)
    return DegreeSequence(degrees=degrees, offsets=offsets, vertex_of=vertex_of)


def make_regular(n: int, d: int) -> DegreeSequence:
    """Regular degree sequence: n vertices of degree d. Requires n*d even."""
    if n < 2:
        raise ValueError(f"need at least 2 vertices, got {n}")
    if d < MIN_DEGREE:
        raise ValueError(f"degree {d} below minimum {MIN_DEGREE}")
    if (n * d) % 2 != 0:
        raise ValueError(f"n*d = {n * d} is odd; total half-edge count must be even")
    return _build(np.full(n, d, dtype=np.int64))


def from_degrees(degrees: Iterable[int]) -> DegreeSequence:
    """Degree sequence from an explicit list, validated."""
    return _build(np.asarray(list(degrees), dtype=np.int64))


def load_degrees(source) -> DegreeSequence:
    """Parse a degree sequence from text: whitespace/newline separated integers.

    `source` may be a string, an open text file, or a path-like object.
    """
    if hasattr(source, "read"):
        text = source.read()
    else:
        try:
            import os

            if isinstance(source, (str, os.PathLike)) and "\n" not in str(source) and os.path.exists(source):
                with open(source, "r", encoding="utf-8") as fh:
                    text = fh.read()
            else:
                text = str(source)
        except OSError:
            text = str(source)
    tokens = text.split()
    if not tokens:
        raise ValueError("no degrees found in input")
    values = []
    for tok in tokens:
        try:
            values.append(int(tok))
        except ValueError:
            raise ValueError(f"non-integer degree token: {tok!r}") from None
    return _build(np.asarray(values, dtype=np.int64))


def regularity(seq: DegreeSequence) -> RegularityReport:
    """Compute nu = sum d(d-1) / sum d, the mean onward degree of a
    uniformly chosen half-edge, plus basic degree diagnostics."""
    d = seq.degrees.astype(np.float64)
    nu = float((d * (d - 1.0)).sum() / d.sum())
    return RegularityReport(
        nu=nu,
        max_degree=int(seq.degrees.max()),
        min_degree=int(seq.degrees.min()),
        ell_even=seq.ell % 2 == 0,
        min_degree_ok=int(seq.degrees.min()) >= MIN_DEGREE,
    )
