#!/usr/bin/env python3
"""Regenerate the committed oracle regression fixtures under
tests/fixtures/. Run from the repository root. The fixtures are frozen
outputs of the exact enumerators plus one seeded path pair; regression
tests must not depend on re-running the enumerators."""
from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from dynmix import degrees, oracle, topology
from dynmix.configs import Configuration, sample_configuration
from dynmix.simcore import sample_pairing

FIXDIR = Path(__file__).resolve().parent.parent / "tests" / "fixtures"


def _rng(seed):
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))


def oracle_l10_k2() -> None:
    """ell=10 walk-law fixture: exact TV curve for t = 0..8."""
    seq = degrees.make_regular(5, 2)
    eta = sample_configuration(seq, _rng(1))
    x0 = 0
    k = 2
    space = oracle.enumerate_configurations(seq)
    ts = list(range(9))
    tvs = [oracle.exact_tv(space, seq, eta, x0, k, t) for t in ts]
    payload = {
        "degrees": [int(d) for d in seq.degrees],
        "pairing": eta.to_json(),
        "x0": x0,
        "k": k,
        "ts": ts,
        "exact_tv": tvs,
        "tolerance_note": "MC plug-in should agree within 3 standard errors",
    }
    _write("oracle_l10_k2.json", payload)


def tau_m3_k2() -> None:
    """m=3 stopping-time fixture: exact tail for t = 0..3 plus the exact
    conditional endpoint laws at t = 2."""
    seq = degrees.make_regular(3, 2)
    eta = sample_configuration(seq, _rng(2))
    x0 = 0
    k = 2
    ts = list(range(4))
    tails = [oracle.exact_tau_tail(seq, eta, x0, k, t) for t in ts]
    _, surviving, stopped = oracle.exact_tau_paths(seq, eta, x0, k, 2)
    ell = seq.ell
    payload = {
        "degrees": [int(d) for d in seq.degrees],
        "pairing": eta.to_json(),
        "x0": x0,
        "k": k,
        "ts": ts,
        "exact_tau_tail": tails,
        "conditional_t": 2,
        "unstopped_law": [float(surviving.get(y, 0)) for y in range(ell)],
        "stopped_law": [float(stopped.get(y, 0)) for y in range(ell)],
    }
    _write("tau_m3_k2.json", payload)


def tau_m4_k2() -> None:
    """m=4 stopping-time fixture with a slower exact tail (t = 0..3)."""
    seq = degrees.make_regular(4, 2)
    eta = sample_configuration(seq, _rng(5))
    x0 = 0
    k = 2
    ts = list(range(4))
    tails = [oracle.exact_tau_tail(seq, eta, x0, k, t) for t in ts]
    _, surviving, stopped = oracle.exact_tau_paths(seq, eta, x0, k, 2)
    ell = seq.ell
    payload = {
        "degrees": [int(d) for d in seq.degrees],
        "pairing": eta.to_json(),
        "x0": x0,
        "k": k,
        "ts": ts,
        "exact_tau_tail": tails,
        "conditional_t": 2,
        "unstopped_law": [float(surviving.get(y, 0)) for y in range(ell)],
        "stopped_law": [float(stopped.get(y, 0)) for y in range(ell)],
    }
    _write("tau_m4_k2.json", payload)


def _segmented_path(conf, seq, start, t, boundaries, used_vertices, rng):
    """Greedy search for a self-avoiding segmented path from `start` whose
    vertices avoid `used_vertices`."""
    ends = set(boundaries)
    path = [start]
    verts = {seq.half_edge_owner(start)}
    if verts & used_vertices:
        return None
    for i in range(1, t + 1):
        if i in ends:
            candidates = list(rng.permutation(seq.ell))
        else:
            y = int(conf.pairing[path[-1]])
            s, e = seq.sibling_range(seq.half_edge_owner(y))
            candidates = [h for h in range(s, e) if h != y]
        placed = False
        for nxt in candidates:
            w = seq.half_edge_owner(int(nxt))
            if w in verts or w in used_vertices:
                continue
            path.append(int(nxt))
            verts.add(w)
            placed = True
            break
        if not placed:
            return None
    return path, verts


def iso_paths() -> None:
    """Two vertex-disjoint same-shape segmented paths on a 3-regular
    1000-vertex configuration, with one interior segment boundary."""
    n, d = 1000, 3
    seq = degrees.make_regular(n, d)
    pairing = sample_pairing(seq.ell, 12345, 0)
    conf = Configuration(pairing)
    t, boundaries = 4, [2]
    rng = _rng(3)
    found = None
    for start_a in range(0, seq.ell, 7):
        got_a = _segmented_path(conf, seq, start_a, t, boundaries, set(), rng)
        if got_a is None:
            continue
        path_a, verts_a = got_a
        for start_b in range(1, seq.ell, 11):
            got_b = _segmented_path(conf, seq, start_b, t, boundaries, verts_a, rng)
            if got_b is not None:
                found = (path_a, got_b[0])
                break
        if found:
            break
    if not found:
        raise RuntimeError("no disjoint path pair found")
    path_a, path_b = found
    topology.validate_segmented_path(conf, seq, path_a, boundaries)
    topology.validate_segmented_path(conf, seq, path_b, boundaries)
    payload = {
        "n": n,
        "d": d,
        "pairing": conf.to_json(),
        "path_a": path_a,
        "path_b": path_b,
        "boundaries": boundaries,
        "t": t,
        "k": 150,
    }
    _write("iso_paths_n1000.json", payload)


def _write(name: str, payload: dict) -> None:
    FIXDIR.mkdir(parents=True, exist_ok=True)
    path = FIXDIR / name
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=1)
        fh.write("\n")
    print(f"wrote {path}")


if __name__ == "__main__":
    oracle_l10_k2()
    tau_m3_k2()
    tau_m4_k2()
    iso_paths()
