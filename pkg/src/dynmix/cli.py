"""Experiment runner. One subcommand per activity:

  generate   sample a configuration and dump its pairing
  dynamics   run the rewiring chain, dump per-step rewired sets
  walk       run one joint trajectory, dump positions and the stop time
  tau        survival curve of the stopping time (Monte Carlo)
  mixing     TV curve, measured mixing time, optional conditional TVs
  oracle     exact small-instance values (enumeration / dynamic program)
  topology   ball growth, tree fraction, good-tuple density

All commands accept --config FILE with a JSON object holding the same
keys as the flags (flags win on conflict). Outputs are deterministic for
a fixed seed; pass --timestamp to stamp headers with wall-clock time.
Exit codes: 1 for validation errors, 2 for I/O failures.
"""
from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import degrees as degrees_mod
from . import dynamics as dynamics_mod
from . import estimators, oracle, reporting, simcore, topology
from . import walk as walk_mod
from .configs import Configuration, sample_configuration


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command is None:
        parser.print_help()
        return 1
    try:
        args = apply_config(parser, args, argv)
        handler = HANDLERS[args.command]
        handler(args)
        return 0
    except (ValueError, IndexError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 2


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dynmix", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command")

    def common(p, replicas=False, horizon=False, alpha=True):
        p.add_argument("--regular", nargs=2, type=int, metavar=("N", "D"),
                       help="regular degree sequence: N vertices of degree D")
        p.add_argument("--degrees", metavar="FILE",
                       help="file of whitespace-separated vertex degrees")
        if alpha:
            p.add_argument("--alpha", type=float, help="fraction of edges rewired per step")
            p.add_argument("--k", type=int, help="edges rewired per step (overrides --alpha)")
        p.add_argument("--seed", type=int, default=0, help="master seed (default 0)")
        p.add_argument("--out", default="-", help="output path ('-' = stdout)")
        p.add_argument("--format", choices=["csv", "json"], default="csv")
        p.add_argument("--timestamp", action="store_true",
                       help="stamp output headers with wall-clock time")
        p.add_argument("--threads", type=int, default=1, help="worker threads")
        p.add_argument("--backend", choices=["cython", "python"], default=None)
        p.add_argument("--config", metavar="FILE", help="JSON file with these keys")
        if replicas:
            p.add_argument("--replicas", type=int, default=10000)
            p.add_argument("--walkers-per-group", type=int, default=1,
                           help="walkers sharing each simulated graph trajectory")
        if horizon:
            p.add_argument("--horizon", type=int, default=None)

    p = sub.add_parser("generate", help="sample and dump a configuration")
    common(p, alpha=False)

    p = sub.add_parser("dynamics", help="run the rewiring chain")
    common(p)
    p.add_argument("--steps", type=int, default=10)

    p = sub.add_parser("walk", help="run one joint trajectory")
    common(p)
    p.add_argument("--steps", type=int, default=10)
    p.add_argument("--x0", type=int, default=None)

    p = sub.add_parser("tau", help="stopping-time survival curve")
    common(p, replicas=True, horizon=True)

    p = sub.add_parser("mixing", help="TV curve and measured mixing time")
    common(p, replicas=True, horizon=True)
    p.add_argument("--epsilon", type=float, default=0.1)
    p.add_argument("--conditional", action="store_true",
                   help="also estimate stopped/unstopped conditional TVs")

    p = sub.add_parser("oracle", help="exact small-instance values")
    common(p)
    p.add_argument("--t", type=int, default=6, help="largest step to evaluate")
    p.add_argument("--x0", type=int, default=None)
    p.add_argument("--fixture-out", default=None,
                   help="also write a JSON fixture with the exact values")

    p = sub.add_parser("topology", help="ball growth and tree diagnostics")
    common(p, alpha=False)
    p.add_argument("--samples", type=int, default=1000)
    p.add_argument("--tmax", type=int, default=8)
    p.add_argument("--tuple-size", type=int, default=2,
                   help="number of segment boundaries for good-tuple rows")
    return parser


def apply_config(parser, args, argv):
    """Merge values from --config (JSON object) under explicit flags."""
    if not getattr(args, "config", None):
        return args
    with open(args.config, "r", encoding="utf-8") as fh:
        payload = json.load(fh)
    if not isinstance(payload, dict):
        raise ValueError("config file must hold a JSON object")
    payload.pop("command", None)
    base = [args.command] + [f"--config={args.config}"]
    ns = parser.parse_args(base)  # defaults for this subcommand
    for key, value in payload.items():
        attr = key.replace("-", "_")
        if not hasattr(ns, attr):
            raise ValueError(f"unknown config key {key!r} for command {args.command!r}")
        setattr(ns, attr, value)
    # explicit command-line flags win over config values
    explicit = parser.parse_args(argv if argv is not None else sys.argv[1:])
    defaults = parser.parse_args(base)
    for attr, value in vars(explicit).items():
        if getattr(defaults, attr, None) != value:
            setattr(ns, attr, value)
    return ns


def _sequence(args) -> degrees_mod.DegreeSequence:
    if getattr(args, "regular", None) and getattr(args, "degrees", None):
        raise ValueError("give either --regular or --degrees, not both")
    if getattr(args, "regular", None):
        n, d = args.regular
        return degrees_mod.make_regular(n, d)
    if getattr(args, "degrees", None):
        return degrees_mod.load_degrees(args.degrees)
    raise ValueError("a degree sequence is required: --regular N D or --degrees FILE")


def _k_of(args, seq) -> tuple[int, float]:
    if getattr(args, "k", None) is not None:
        k = args.k
        m = seq.m
        if not 2 <= k <= m:
            raise ValueError(f"k={k} out of range [2, {m}]")
        return k, k / m
    if getattr(args, "alpha", None) is None:
        raise ValueError("either --alpha or --k is required")
    return dynamics_mod.alpha_to_k(seq, args.alpha)


def _open_out(args):
    if args.out == "-":
        return sys.stdout, False
    return open(args.out, "w", encoding="utf-8", newline=""), True


def _emit_rows(args, columns, rows, header) -> None:
    if args.format == "csv":
        text = reporting.render_csv(columns, rows, header)
    else:
        text = reporting.render_json_rows(columns, rows, header)
    fh, close = _open_out(args)
    try:
        fh.write(text)
    finally:
        if close:
            fh.close()


def _sidecar_path(out: str) -> str | None:
    if out == "-":
        return None
    base = out[: -len(".csv")] if out.endswith(".csv") else out
    return base + ".json"


def cmd_generate(args) -> None:
    seq = _sequence(args)
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(args.seed)))
    conf = sample_configuration(seq, rng)
    conf.validate()
    header = reporting.provenance(
        args.seed,
        {"degree_digest": seq.digest(), "n": seq.n, "ell": seq.ell},
        timestamp=args.timestamp,
    )
    payload = {"provenance": header, "pairing": conf.to_json()}
    fh, close = _open_out(args)
    try:
        fh.write(json.dumps(payload) + "\n")
    finally:
        if close:
            fh.close()


def cmd_dynamics(args) -> None:
    seq = _sequence(args)
    k, alpha_eff = _k_of(args, seq)
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(args.seed)))
    conf = sample_configuration(seq, rng)
    _, trace = dynamics_mod.evolve(conf, k, args.steps, rng)
    header = reporting.provenance(
        args.seed,
        {"degree_digest": seq.digest(), "k": k, "alpha_effective": alpha_eff},
        timestamp=args.timestamp,
    )
    fh, close = _open_out(args)
    try:
        fh.write(json.dumps({"provenance": header}) + "\n")
        for t, rewired in enumerate(trace.per_step, start=1):
            fh.write(json.dumps({"t": t, "rewired": sorted(int(h) for h in rewired)}) + "\n")
    finally:
        if close:
            fh.close()


def cmd_walk(args) -> None:
    seq = _sequence(args)
    k, alpha_eff = _k_of(args, seq)
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(args.seed)))
    conf = sample_configuration(seq, rng)
    x0 = args.x0 if args.x0 is not None else int(rng.integers(seq.ell))
    traj = walk_mod.run_joint(conf, seq, x0, k, args.steps, rng)
    header = reporting.provenance(
        args.seed,
        {"degree_digest": seq.digest(), "k": k, "alpha_effective": alpha_eff, "x0": x0},
        timestamp=args.timestamp,
    )
    fh, close = _open_out(args)
    try:
        fh.write(json.dumps({"provenance": header}) + "\n")
        for t, pos in enumerate(traj.positions):
            rec = {"t": t, "x": int(pos)}
            if traj.tau is not None and t == traj.tau:
                rec["tau"] = traj.tau
            fh.write(json.dumps(rec) + "\n")
    finally:
        if close:
            fh.close()


def _experiment_spec(args, seq, curves) -> estimators.ExperimentSpec:
    k, _ = _k_of(args, seq)
    return estimators.ExperimentSpec(
        seq=seq,
        alpha=k / seq.m,
        epsilon=getattr(args, "epsilon", 0.1),
        horizon=args.horizon,
        replicas=args.replicas,
        master_seed=args.seed,
        walkers_per_group=args.walkers_per_group,
        jobs=args.threads,
        curves=curves,
        backend=args.backend,
    )


def _result_header(args, seq, table) -> dict:
    return reporting.provenance(
        args.seed,
        {
            "degree_digest": seq.digest(),
            "n": seq.n,
            "ell": seq.ell,
            "alpha_effective": table.scalars["alpha_effective"],
            "k": table.scalars["k"],
            "mode": table.scalars["mode"],
            "backend": table.scalars["backend"],
        },
        timestamp=args.timestamp,
    )


def cmd_tau(args) -> None:
    seq = _sequence(args)
    table = estimators.estimate_tau_tail(_experiment_spec(args, seq, ("tau",)))
    header = _result_header(args, seq, table)
    _emit_rows(args, reporting.RESULT_COLUMNS, table.row_dicts(), header)
    side = _sidecar_path(args.out)
    if side:
        reporting.write_sidecar(side, _scalars(table), header)


def cmd_mixing(args) -> None:
    seq = _sequence(args)
    curves = ("tau", "tv") + (("conditional",) if args.conditional else ())
    table = estimators.run_experiment(_experiment_spec(args, seq, curves))
    header = _result_header(args, seq, table)
    _emit_rows(args, reporting.RESULT_COLUMNS, table.row_dicts(), header)
    side = _sidecar_path(args.out)
    if side:
        reporting.write_sidecar(side, _scalars(table), header)


def _scalars(table) -> dict:
    keep = (
        "t_mix_hat", "t_mix_theory", "t_mix_note", "alpha_effective", "k",
        "epsilon", "seed", "n_endpoints", "walkers_per_group", "mode",
        "x0", "backend", "tau_theory_trusted_horizon",
    )
    return {key: table.scalars[key] for key in keep if key in table.scalars}


def cmd_oracle(args) -> None:
    seq = _sequence(args)
    k, alpha_eff = _k_of(args, seq)
    space = oracle.enumerate_configurations(seq)
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(args.seed)))
    eta = sample_configuration(seq, rng)
    x0 = args.x0 if args.x0 is not None else int(rng.integers(seq.ell))
    ts = list(range(args.t + 1))
    tvs = [oracle.exact_tv(space, seq, eta, x0, k, t) for t in ts]
    rows = [{"t": t, "exact_tv": tv} for t, tv in zip(ts, tvs)]
    header = reporting.provenance(
        args.seed,
        {
            "degree_digest": seq.digest(),
            "ell": seq.ell,
            "k": k,
            "alpha_effective": alpha_eff,
            "x0": x0,
            "configurations": space.size,
        },
        timestamp=args.timestamp,
    )
    _emit_rows(args, ["t", "exact_tv"], rows, header)
    if args.fixture_out:
        fixture = {
            "provenance": header,
            "degrees": [int(d) for d in seq.degrees],
            "pairing": eta.to_json(),
            "x0": x0,
            "k": k,
            "ts": ts,
            "exact_tv": tvs,
        }
        if seq.m <= oracle.TAU_MAX_M:
            tmax = min(args.t, oracle.TAU_MAX_T)
            fixture["tau_ts"] = list(range(tmax + 1))
            fixture["exact_tau_tail"] = [
                oracle.exact_tau_tail(seq, eta, x0, k, t) for t in range(tmax + 1)
            ]
        with open(args.fixture_out, "w", encoding="utf-8") as fh:
            json.dump(fixture, fh, indent=2)
            fh.write("\n")


def cmd_topology(args) -> None:
    seq = _sequence(args)
    rows = topology_experiment(
        seq,
        samples=args.samples,
        tmax=args.tmax,
        tuple_size=args.tuple_size,
        master_seed=args.seed,
        backend=args.backend,
    )
    header = reporting.provenance(
        args.seed,
        {"degree_digest": seq.digest(), "n": seq.n, "samples": args.samples},
        timestamp=args.timestamp,
    )
    _emit_rows(args, reporting.TOPOLOGY_COLUMNS, rows, header)


def topology_experiment(
    seq, samples: int, tmax: int, tuple_size: int, master_seed: int,
    backend: str | None = None,
) -> list[dict]:
    """Fresh (configuration, half-edge) samples feeding three diagnostics:
    mean forward-ball size per radius, tree fraction per radius, and
    good-tuple density per horizon (evenly spaced boundaries)."""
    from . import degrees as _degrees

    nu = _degrees.regularity(seq).nu
    size_sums = np.zeros(tmax + 1)
    tree_sums = np.zeros(tmax + 1)
    good_sums = np.zeros(tmax + 1)
    good_n = np.zeros(tmax + 1)
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence((master_seed, 1))))
    for i in range(samples):
        pairing = simcore.sample_pairing(seq.ell, master_seed, i, backend=backend)
        conf = Configuration(pairing)
        x0 = int(rng.integers(seq.ell))
        sizes, flags, _ = topology.ball_stats(conf, seq, x0, tmax)
        size_sums += sizes
        tree_sums += flags
        xs = [int(v) for v in rng.integers(seq.ell, size=tuple_size + 1)]
        for t in range(tuple_size + 1, tmax + 1):
            bounds = boundaries_for(t, tuple_size)
            good_sums[t] += topology.is_good_tuple(conf, seq, xs, bounds, t)
            good_n[t] += 1
    rows = []
    for t in range(tmax + 1):
        rows.append(
            {
                "t": t,
                "mean_ball_size": size_sums[t] / samples,
                "nu_power_prediction": nu ** (t + 1),
                "tree_fraction": tree_sums[t] / samples,
                "good_density": (good_sums[t] / good_n[t]) if good_n[t] else float("nan"),
            }
        )
    return rows


def boundaries_for(t: int, size: int) -> list[int]:
    """Evenly spaced segment boundaries: size values in [1, t]."""
    if size == 0:
        return []
    if t < size + 1:
        raise ValueError(f"horizon {t} too short for {size} boundaries")
    out = sorted({max(1, min(t, round(j * t / (size + 1)))) for j in range(1, size + 1)})
    if len(out) != size:
        raise ValueError(f"cannot place {size} distinct boundaries in [1, {t}]")
    return out


HANDLERS = {
    "generate": cmd_generate,
    "dynamics": cmd_dynamics,
    "walk": cmd_walk,
    "tau": cmd_tau,
    "mixing": cmd_mixing,
    "oracle": cmd_oracle,
    "topology": cmd_topology,
}


if __name__ == "__main__":
    sys.exit(main())
