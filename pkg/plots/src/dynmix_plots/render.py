"""Offline figure rendering from dynmix outputs.

Four figure kinds: tau_tail (survival curve with the closed-form overlay),
tv_curve (TV decay with the epsilon line and measured/predicted mixing
times), mixing_sweep (measured vs predicted mixing time across runs), and
ball_growth (mean ball size against the branching-power prediction).
Rendering is pure: every plotted number comes from the input files.
"""
from __future__ import annotations

import argparse
import math
import sys
from dataclasses import dataclass, field

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .io import MissingColumn, column, read_sidecar, read_table  # noqa: E402

KINDS = ("tau_tail", "tv_curve", "mixing_sweep", "ball_growth")


@dataclass
class FigureSpec:
    kind: str
    csv_paths: list[str]
    out_path: str
    sidecar_paths: list[str] = field(default_factory=list)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown figure kind {self.kind!r}; choose from {KINDS}")
        if not self.csv_paths and self.kind != "mixing_sweep":
            raise ValueError("at least one input CSV is required")


def render(spec: FigureSpec) -> str:
    """Render one figure; returns the output path."""
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    try:
        RENDERERS[spec.kind](spec, ax)
        fig.tight_layout()
        fig.savefig(spec.out_path, dpi=130)
    finally:
        plt.close(fig)
    return spec.out_path


def _finite(xs, ys, *extra):
    keep = [
        i for i in range(len(xs))
        if not any(math.isnan(v[i]) for v in (ys, *extra))
    ]
    pick = lambda v: [v[i] for i in keep]  # noqa: E731
    return (pick(xs), pick(ys), *[pick(v) for v in extra])


def _render_tau_tail(spec: FigureSpec, ax) -> None:
    path = spec.csv_paths[0]
    _, rows = read_table(path)
    t = column(rows, "t", path)
    tail = column(rows, "tau_tail", path)
    se = column(rows, "tau_tail_se", path)
    theory = column(rows, "tau_theory", path)
    ax.errorbar(t, tail, yerr=[2 * v for v in se], fmt="o", ms=3.5,
                capsize=2, label="empirical P(tau > t)")
    ax.plot(*_finite(t, theory), "-", lw=1.2, label="(1-alpha)^(t(t+1)/2)")
    ax.set_xlabel("t")
    ax.set_ylabel("survival probability")
    ax.set_title("Stopping-time tail")
    ax.legend()


def _render_tv_curve(spec: FigureSpec, ax) -> None:
    path = spec.csv_paths[0]
    _, rows = read_table(path)
    t = column(rows, "t", path)
    plotted = False
    for col, label in [("tv_plugin", "plug-in TV"), ("tv_struct", "structural TV")]:
        try:
            vals = column(rows, col, path)
        except MissingColumn:
            continue
        ax.plot(*_finite(t, vals), "o-", ms=3, lw=1, label=label)
        plotted = True
    if not plotted:
        raise MissingColumn("tv_plugin/tv_struct", path)
    try:
        theory = column(rows, "tau_theory", path)
        ax.plot(*_finite(t, theory), "--", lw=1, label="(1-alpha)^(t(t+1)/2)")
    except MissingColumn:
        pass
    for side_path in spec.sidecar_paths:
        side = read_sidecar(side_path)
        if side.get("epsilon") is not None:
            ax.axhline(side["epsilon"], color="grey", lw=0.8)
        if side.get("t_mix_hat") is not None:
            ax.axvline(side["t_mix_hat"], color="C2", lw=0.9,
                       label=f"measured t_mix = {side['t_mix_hat']}")
        if side.get("t_mix_theory") is not None:
            ax.axvline(side["t_mix_theory"], color="C3", lw=0.9, ls=":",
                       label=f"predicted t_mix = {side['t_mix_theory']:.1f}")
    ax.set_xlabel("t")
    ax.set_ylabel("distance to uniform")
    ax.set_title("TV decay")
    ax.legend(fontsize=8)


def _render_mixing_sweep(spec: FigureSpec, ax) -> None:
    if not spec.sidecar_paths:
        raise ValueError("mixing_sweep needs --sidecar JSON inputs")
    pts = []
    for side_path in spec.sidecar_paths:
        side = read_sidecar(side_path)
        alpha = side.get("alpha_effective")
        measured = side.get("t_mix_hat")
        theory = side.get("t_mix_theory")
        if alpha is None or measured is None:
            raise ValueError(f"sidecar {side_path} lacks alpha_effective/t_mix_hat")
        pts.append((alpha, measured, theory))
    pts.sort()
    alphas = [p[0] for p in pts]
    ax.plot(alphas, [p[1] for p in pts], "o", label="measured")
    if all(p[2] is not None for p in pts):
        ax.plot(alphas, [p[2] for p in pts], "-", lw=1.2, label="predicted")
    ax.set_xlabel("rewired fraction alpha")
    ax.set_ylabel("mixing time (steps)")
    ax.set_xscale("log")
    ax.set_title("Mixing time vs rewiring rate")
    ax.legend()


def _render_ball_growth(spec: FigureSpec, ax) -> None:
    path = spec.csv_paths[0]
    _, rows = read_table(path)
    t = column(rows, "t", path)
    mean = column(rows, "mean_ball_size", path)
    pred = column(rows, "nu_power_prediction", path)
    ax.plot(*_finite(t, mean), "o", label="mean |B_t|")
    ax.plot(*_finite(t, pred), "-", lw=1.2, label="nu^(t+1)")
    ax.set_yscale("log")
    ax.set_xlabel("radius t")
    ax.set_ylabel("half-edges")
    ax.set_title("Forward-ball growth")
    ax.legend()


RENDERERS = {
    "tau_tail": _render_tau_tail,
    "tv_curve": _render_tv_curve,
    "mixing_sweep": _render_mixing_sweep,
    "ball_growth": _render_ball_growth,
}


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="dynmix-plots", description=__doc__)
    parser.add_argument("--kind", required=True, choices=KINDS)
    parser.add_argument("--csv", action="append", default=[],
                        help="input CSV produced by the dynmix CLI")
    parser.add_argument("--sidecar", action="append", default=[],
                        help="JSON sidecar produced alongside a CSV")
    parser.add_argument("--out", required=True, help="output image path")
    args = parser.parse_args(argv)
    try:
        spec = FigureSpec(kind=args.kind, csv_paths=args.csv,
                          out_path=args.out, sidecar_paths=args.sidecar)
        render(spec)
        return 0
    except (ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
