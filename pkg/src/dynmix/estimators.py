"""Monte Carlo estimation of the walk's distance to uniform, the
stopping-time tail, conditional (stopped/unstopped) distances, the
measured mixing time, and the matching closed-form predictions.

Plug-in TV estimates are variance-debiased per cell (the known binomial
variance is removed inside the square) so that estimates near zero read
near zero instead of the O(sqrt(cells/samples)) sampling bias; the raw
plug-in is kept alongside. When the endpoint sample is too small for the
plug-in to be trustworthy (below PLUGIN_MIN_FACTOR per cell), the
experiment falls back to the structural proxy
P(tau > t) * (1 - |B_t|/ell), which tracks the same decay through the
stopping-time tail and the start ball.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import simcore, topology
from .configs import Configuration
from .degrees import DegreeSequence
from .dynamics import alpha_to_k

PLUGIN_MIN_FACTOR = 20  # endpoints per half-edge required for plug-in TV


# ------------------------------------------------------------- theory --


def theory_tau_tail(t: int, alpha: float) -> float:
    """Leading-order survival probability (1-alpha)^(t(t+1)/2)."""
    if t < 0:
        raise ValueError("t must be >= 0")
    if not 0 < alpha <= 1:
        raise ValueError(f"alpha={alpha} outside (0, 1]")
    return float((1.0 - alpha) ** (t * (t + 1) / 2))


def theory_mixing_time(epsilon: float, alpha: float) -> float:
    """Closed-form mixing-time prediction sqrt(2 log(1/eps) / log(1/(1-alpha))).

    alpha = 1 resamples the whole graph every step; the prediction
    degenerates to 0 and is returned as such.
    """
    if not 0 < epsilon < 1:
        raise ValueError(f"epsilon={epsilon} outside (0, 1)")
    if not 0 < alpha <= 1:
        raise ValueError(f"alpha={alpha} outside (0, 1]")
    if alpha == 1.0:
        return 0.0
    return math.sqrt(2.0 * math.log(1.0 / epsilon) / math.log(1.0 / (1.0 - alpha)))


# ------------------------------------------------------ plug-in TV ----


def plugin_tv(counts: np.ndarray, n: int | None = None) -> tuple[float, float]:
    """(corrected, raw) plug-in TV distance to uniform from an endpoint
    histogram with n samples.

    The corrected estimator subtracts each cell's known binomial variance
    inside the square before taking the root,
    sqrt(max((p_hat - u)^2 - p_hat(1-p_hat)/n, 0)), so cells whose
    deviation is indistinguishable from sampling noise contribute nothing,
    while well-resolved cells keep essentially their full deviation. The
    raw value keeps the uncorrected half-L1 distance.
    """
    counts = np.asarray(counts, dtype=np.float64)
    if n is None:
        n = int(counts.sum())
    if n <= 0:
        raise ValueError("empty histogram")
    p_hat = counts / n
    dev = p_hat - 1.0 / len(counts)
    raw = 0.5 * float(np.abs(dev).sum())
    var = p_hat * (1.0 - p_hat) / n
    corrected = 0.5 * float(np.sqrt(np.maximum(dev * dev - var, 0.0)).sum())
    return corrected, raw


def plugin_tv_jackknife_se(counts: np.ndarray) -> float:
    """Delete-one-replica jackknife standard error of the plug-in TV,
    grouped by cell (exact and O(cells))."""
    counts = np.asarray(counts, dtype=np.int64)
    n = int(counts.sum())
    if n < 2:
        return float("nan")
    ell = len(counts)
    m = n - 1
    u_m = m / ell
    base = np.abs(counts - u_m)
    s = float(base.sum())
    occupied = counts > 0
    s_y = s - base[occupied] + np.abs(counts[occupied] - 1 - u_m)
    tv_y = s_y / (2.0 * m)
    w = counts[occupied].astype(np.float64)
    mean_j = float((w * tv_y).sum() / n)
    var = (n - 1) / n * float((w * (tv_y - mean_j) ** 2).sum())
    return math.sqrt(max(var, 0.0))


def _spread_se(values: list[float]) -> float:
    vals = np.asarray([v for v in values if np.isfinite(v)], dtype=np.float64)
    if len(vals) < 2:
        return float("nan")
    return float(vals.std(ddof=1) / math.sqrt(len(vals)))


# ----------------------------------------------------------- spec ----


@dataclass
class ExperimentSpec:
    """Declarative description of one Monte Carlo experiment.

    All replicas share one initial (configuration, half-edge) pair drawn
    uniformly from the experiment seed unless eta/x0 are pinned.
    walkers_per_group > 1 runs that many walkers on each simulated graph
    trajectory; estimates stay unbiased and errors are then computed per
    trajectory rather than per walker.
    """

    seq: DegreeSequence
    alpha: float
    epsilon: float = 0.1
    horizon: int | None = None
    replicas: int = 10000
    master_seed: int = 0
    walkers_per_group: int = 1
    subbatches: int = 4
    jobs: int = 1
    curves: tuple[str, ...] = ("tau",)
    eta: Configuration | None = None
    x0: int | None = None
    backend: str | None = None

    def __post_init__(self):
        if not 0 < self.epsilon < 1:
            raise ValueError(f"epsilon={self.epsilon} outside (0, 1)")
        if self.replicas < 1:
            raise ValueError("replicas must be >= 1")
        if self.horizon is not None and self.horizon < 1:
            raise ValueError("horizon must be >= 1")
        unknown = set(self.curves) - {"tau", "tv", "conditional"}
        if unknown:
            raise ValueError(f"unknown curves: {sorted(unknown)}")


@dataclass
class ResultTable:
    """Per-step estimates plus experiment-level scalars."""

    t: np.ndarray
    tau_tail: np.ndarray
    tau_tail_se: np.ndarray
    tau_theory: np.ndarray
    tv_plugin: np.ndarray
    tv_plugin_se: np.ndarray
    tv_plugin_raw: np.ndarray
    tv_struct: np.ndarray
    tv_struct_se: np.ndarray
    tv_stopped: np.ndarray
    tv_stopped_se: np.ndarray
    tv_unstopped: np.ndarray
    tv_unstopped_se: np.ndarray
    ball_sizes: np.ndarray
    scalars: dict = field(default_factory=dict)

    def row_dicts(self) -> list[dict]:
        out = []
        for i, t in enumerate(self.t):
            out.append(
                {
                    "t": int(t),
                    "tv_plugin": self.tv_plugin[i],
                    "tv_plugin_se": self.tv_plugin_se[i],
                    "tv_struct": self.tv_struct[i],
                    "tau_tail": self.tau_tail[i],
                    "tau_tail_se": self.tau_tail_se[i],
                    "tau_theory": self.tau_theory[i],
                    "tv_stopped": self.tv_stopped[i],
                    "tv_unstopped": self.tv_unstopped[i],
                }
            )
        return out


# ------------------------------------------------------ experiment ----


def default_horizon(epsilon: float, alpha: float) -> int:
    """Three times the predicted mixing time, rounded up."""
    return max(4, math.ceil(3.0 * theory_mixing_time(epsilon, alpha)))


def draw_initial(
    seq: DegreeSequence, master_seed: int, backend: str | None = None
) -> tuple[Configuration, int]:
    """One (configuration, start half-edge) pair, uniform in both."""
    ss = np.random.SeedSequence(master_seed)
    s_init = int(ss.generate_state(2, dtype=np.uint64)[0])
    pairing = simcore.sample_pairing(seq.ell, s_init, 0, backend=backend)
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence((s_init, 1))))
    x0 = int(rng.integers(seq.ell))
    return Configuration(pairing), x0


def run_experiment(spec: ExperimentSpec) -> ResultTable:
    """Run one experiment and fill every requested curve.

    tau curves always come out. "tv" adds the plug-in TV when the sample
    is large enough (replicas >= PLUGIN_MIN_FACTOR * ell), otherwise the
    run warns and only the structural proxy column is meaningful.
    "conditional" adds stopped/unstopped conditional TV rows where the
    conditional sample passes the same threshold.
    """
    seq = spec.seq
    ell = seq.ell
    k, alpha_eff = alpha_to_k(seq, spec.alpha)
    horizon = spec.horizon or default_horizon(spec.epsilon, alpha_eff)

    if spec.eta is not None:
        eta, x0 = spec.eta, spec.x0
        if x0 is None:
            raise ValueError("x0 must be given when eta is pinned")
    else:
        eta, x0 = draw_initial(seq, spec.master_seed, backend=spec.backend)

    want_tv = "tv" in spec.curves
    want_cond = "conditional" in spec.curves
    plugin_ok = spec.replicas >= PLUGIN_MIN_FACTOR * ell
    if want_tv and not plugin_ok:
        warnings.warn(
            f"replicas={spec.replicas} below plug-in threshold "
            f"{PLUGIN_MIN_FACTOR}*ell={PLUGIN_MIN_FACTOR * ell}; "
            "TV curve falls back to the structural proxy",
            stacklevel=2,
        )
    recording = (want_tv and plugin_ok) or want_cond
    record_ts = np.arange(horizon + 1, dtype=np.int32) if recording else np.array([], dtype=np.int32)

    walkers = spec.walkers_per_group
    n_groups = -(-spec.replicas // walkers)  # ceil
    sim_seed = int(np.random.SeedSequence(spec.master_seed).generate_state(2, dtype=np.uint64)[1])

    batches: list[simcore.EngineResult] = []
    nb = max(1, min(spec.subbatches, n_groups))
    bounds = np.linspace(0, n_groups, nb + 1, dtype=np.int64)
    for b in range(nb):
        g0, g1 = int(bounds[b]), int(bounds[b + 1])
        if g1 <= g0:
            continue
        batches.append(
            simcore.run_joint_replicas(
                seq, eta.pairing, x0, k, horizon,
                n_groups=g1 - g0, walkers_per_group=walkers,
                master_seed=sim_seed, record_ts=record_ts,
                stop_at_tau=not recording, jobs=spec.jobs,
                backend=spec.backend, group_offset=g0,
            )
        )
    total = batches[0]
    for b in batches[1:]:
        total = total.merge(b)
    n_endpoints = total.n_walkers

    ts = np.arange(horizon + 1)
    tail = total.surv_sum / n_endpoints
    tail_se = _cluster_se(total)
    tau_theory = np.array([theory_tau_tail(int(t), alpha_eff) for t in ts])

    sizes, _, _ = topology.ball_stats(eta, seq, x0, horizon)
    ball_sizes = np.asarray(sizes, dtype=np.int64)
    ball_factor = np.maximum(0.0, 1.0 - ball_sizes / ell)
    tv_struct = tail * ball_factor
    tv_struct_se = tail_se * ball_factor

    nan = np.full(horizon + 1, np.nan)
    tv_plugin = nan.copy()
    tv_plugin_se = nan.copy()
    tv_plugin_raw = nan.copy()
    tv_stopped = nan.copy()
    tv_stopped_se = nan.copy()
    tv_unstopped = nan.copy()
    tv_unstopped_se = nan.copy()

    if recording:
        threshold = PLUGIN_MIN_FACTOR * ell
        for i, t in enumerate(ts):
            hist = total.hist_all[i]
            if want_tv and plugin_ok:
                tv_plugin[i], tv_plugin_raw[i] = plugin_tv(hist, n_endpoints)
                if walkers == 1:
                    tv_plugin_se[i] = plugin_tv_jackknife_se(hist)
                else:
                    tv_plugin_se[i] = _spread_se(
                        [plugin_tv(b.hist_all[i], b.n_walkers)[0] for b in batches]
                    )
            if want_cond:
                stopped = total.hist_stopped[i]
                unstopped = hist - stopped
                n_stop = int(stopped.sum())
                n_unstop = int(unstopped.sum())
                if n_stop >= threshold:
                    tv_stopped[i], _ = plugin_tv(stopped, n_stop)
                    tv_stopped_se[i] = _spread_se(
                        [_cond_tv(b.hist_stopped[i]) for b in batches]
                    )
                if n_unstop >= threshold:
                    tv_unstopped[i], _ = plugin_tv(unstopped, n_unstop)
                    tv_unstopped_se[i] = _spread_se(
                        [_cond_tv(b.hist_all[i] - b.hist_stopped[i]) for b in batches]
                    )

    mode = "plugin" if (want_tv and plugin_ok) else "structural"
    table = ResultTable(
        t=ts,
        tau_tail=tail,
        tau_tail_se=tail_se,
        tau_theory=tau_theory,
        tv_plugin=tv_plugin,
        tv_plugin_se=tv_plugin_se,
        tv_plugin_raw=tv_plugin_raw,
        tv_struct=tv_struct,
        tv_struct_se=tv_struct_se,
        tv_stopped=tv_stopped,
        tv_stopped_se=tv_stopped_se,
        tv_unstopped=tv_unstopped,
        tv_unstopped_se=tv_unstopped_se,
        ball_sizes=ball_sizes,
        scalars={
            "alpha_effective": alpha_eff,
            "k": k,
            "epsilon": spec.epsilon,
            "seed": spec.master_seed,
            "n_endpoints": n_endpoints,
            "walkers_per_group": walkers,
            "n_groups": n_groups,
            "mode": mode,
            "x0": x0,
            "backend": spec.backend or simcore.BACKEND,
            "t_mix_theory": theory_mixing_time(spec.epsilon, alpha_eff),
            "tau_theory_trusted_horizon": int(math.floor(math.log(seq.n))),
        },
    )
    t_mix, note = measure_mixing_time(table, spec.epsilon)
    table.scalars["t_mix_hat"] = t_mix
    table.scalars["t_mix_note"] = note
    return table


def _cond_tv(counts: np.ndarray) -> float:
    n = int(counts.sum())
    if n == 0:
        return float("nan")
    return plugin_tv(counts, n)[0]


def _cluster_se(res: simcore.EngineResult) -> np.ndarray:
    """Standard error of the survival fraction, treating each graph
    trajectory as one cluster. For one walker per trajectory this is the
    usual binomial error."""
    g = res.n_groups
    w = res.walkers_per_group
    mean = res.surv_sum / g  # mean walkers surviving per cluster
    var = res.surv_sumsq / g - mean**2
    var = np.maximum(var, 0.0)
    if g > 1:
        var = var * g / (g - 1)
    return np.sqrt(var / g) / w


def measure_mixing_time(
    table: "ResultTable | ExperimentSpec", epsilon: float | None = None
) -> tuple[int | None, str]:
    """Smallest t whose TV upper confidence bound (estimate + 2 se) is at
    most epsilon, scanning every t without assuming the curve decreases.
    Uses the plug-in curve when the run produced one, else the structural
    proxy. Accepts either a finished ResultTable or an ExperimentSpec to
    run first."""
    if isinstance(table, ExperimentSpec):
        spec = table
        table = estimate_tv_curve(spec)
        epsilon = spec.epsilon if epsilon is None else epsilon
    if epsilon is None:
        epsilon = float(table.scalars.get("epsilon", 0.1))
    if not 0 < epsilon < 1:
        raise ValueError(f"epsilon={epsilon} outside (0, 1)")
    if table.scalars.get("mode") == "plugin":
        est, se, label = table.tv_plugin, table.tv_plugin_se, "plugin"
    else:
        est, se, label = table.tv_struct, table.tv_struct_se, "structural"
    for i, t in enumerate(table.t):
        if not np.isfinite(est[i]):
            continue
        bound = est[i] + 2.0 * (se[i] if np.isfinite(se[i]) else 0.0)
        if bound <= epsilon:
            return int(t), f"{label} TV curve crossed {epsilon} at t={int(t)}"
    return None, f"no crossing within horizon {int(table.t[-1])} ({label} curve)"


# ------------------------------------------------------- op wrappers --


def estimate_tau_tail(spec: ExperimentSpec) -> ResultTable:
    """Survival curve of the stopping time (walkers halt when stopped)."""
    spec = _with_curves(spec, ("tau",))
    return run_experiment(spec)


def estimate_tv_curve(spec: ExperimentSpec) -> ResultTable:
    """TV curve: plug-in when the sample clears the threshold, otherwise
    structural proxy with a warning."""
    curves = ("tau", "tv") + (("conditional",) if "conditional" in spec.curves else ())
    return run_experiment(_with_curves(spec, curves))


def estimate_conditional_tv(spec: ExperimentSpec) -> ResultTable:
    """Stopped/unstopped conditional TV rows (alongside the usual curves)."""
    return run_experiment(_with_curves(spec, ("tau", "tv", "conditional")))


def _with_curves(spec: ExperimentSpec, curves: tuple[str, ...]) -> ExperimentSpec:
    from dataclasses import replace

    return replace(spec, curves=curves)
