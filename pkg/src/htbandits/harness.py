"""Experiment harness: configs, single runs, replication, aggregation, CSV output.

A run is fully determined by its :class:`ExperimentConfig` and repetition
index: reward and noise streams derive from ``(base_seed, rep, arm, purpose)``
keys, so reruns are bit-identical and parallel execution equals sequential.
Regret traces record exact pseudo-regret (gap-weighted pull counts), not
realized reward differences.
"""

import csv
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, fields
from pathlib import Path

import numpy as np

from . import __version__
from .distributions import (
    BanditInstance,
    format_value,
    instance_description,
    make_central_hard_instance,
    make_pareto_instance,
    make_two_arm_hard_instance,
)
from .mechanisms import NoiseHook, NoiseSource, PrivacyLedger
from .policies import DPRobustSE, DPRobustUCB, LDPRobustSE, RobustUCB
from .schedules import MomentParams
from .seeding import (
    ELIMINATION_NOISE,
    PERTURBATION_NOISE,
    REWARDS,
    TREE_NOISE,
    derive_stream,
)

__all__ = [
    "ALGORITHMS",
    "SETTINGS",
    "ExperimentConfig",
    "RegretTrace",
    "SummaryStats",
    "checkpoint_schedule",
    "make_instance_for",
    "make_policy",
    "run_single",
    "run_experiment",
    "aggregate",
    "write_csv",
    "read_runs_csv",
    "RUNS_HEADER",
    "SUMMARY_HEADER",
]

ALGORITHMS = ("dprucb", "dprse", "ldprse", "rucb")
SETTINGS = ("S1", "S2", "S3", "two_arm_hard", "k_arm_hard")

RUNS_HEADER = ["algo", "setting", "epsilon", "v", "rep", "t", "cum_regret"]
SUMMARY_HEADER = ["algo", "setting", "epsilon", "v", "t", "mean", "std", "n_reps"]

# Default parameters of the hard-instance settings.
TWO_ARM_HARD_DELTA = 0.1
K_ARM_HARD_MEANS = (0.5, 0.4, 0.3, 0.2, 0.1)


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything that determines an experiment's outcome.

    ``checkpoint_stride`` set gives a linear checkpoint grid; left as None,
    ``checkpoint_count`` geometric checkpoints are used.  ``beta`` is the
    elimination confidence; None means ``1/horizon``.  ``zero_noise`` swaps in
    the zero-noise test hook (no privacy guarantee).
    """

    algo: str
    setting: str
    v: float
    eps: float
    horizon: int
    reps: int
    base_seed: int
    checkpoint_count: int = 200
    checkpoint_stride: int | None = None
    beta: float | None = None
    zero_noise: bool = False
    output_path: str | None = None

    def __post_init__(self) -> None:
        if self.algo not in ALGORITHMS:
            raise ValueError(f"algo must be one of {ALGORITHMS}, got {self.algo!r}")
        if self.setting not in SETTINGS:
            raise ValueError(f"setting must be one of {SETTINGS}, got {self.setting!r}")
        if not 0.0 < self.v <= 1.0:
            raise ValueError(f"v must lie in (0, 1], got {self.v}")
        if not self.eps > 0.0:
            raise ValueError(f"eps must be positive, got {self.eps}")
        if self.horizon < 1:
            raise ValueError(f"horizon must be >= 1, got {self.horizon}")
        if self.reps < 1:
            raise ValueError(f"reps must be >= 1, got {self.reps}")
        if self.base_seed < 0:
            raise ValueError(f"base_seed must be non-negative, got {self.base_seed}")
        if self.checkpoint_count < 1:
            raise ValueError(f"checkpoint_count must be >= 1, got {self.checkpoint_count}")
        if self.checkpoint_stride is not None and self.checkpoint_stride < 1:
            raise ValueError(
                f"checkpoint_stride must be >= 1, got {self.checkpoint_stride}"
            )
        if self.beta is not None and not 0.0 < self.beta < 1.0:
            raise ValueError(f"beta must lie in (0, 1), got {self.beta}")

    @property
    def resolved_beta(self) -> float:
        return self.beta if self.beta is not None else 1.0 / self.horizon

    def checkpoints(self) -> tuple:
        return checkpoint_schedule(
            self.horizon, count=self.checkpoint_count, stride=self.checkpoint_stride
        )


@dataclass(frozen=True)
class RegretTrace:
    """One repetition's pseudo-regret at the checkpoint rounds.

    ``checkpoints`` is a tuple of ``(t, cumulative_regret)`` pairs, strictly
    increasing in ``t`` and non-decreasing in regret.
    """

    rep: int
    checkpoints: tuple

    @property
    def final_regret(self) -> float:
        return self.checkpoints[-1][1]


@dataclass(frozen=True)
class SummaryStats:
    """Across-rep mean and population std (ddof=0) of regret per checkpoint."""

    checkpoints: tuple
    means: tuple
    stds: tuple
    n_reps: int


def checkpoint_schedule(horizon: int, count: int = 200, stride: int | None = None) -> tuple:
    """Checkpoint rounds: linear every ``stride``, or ``count`` geometric points.

    Both modes always include the final round.  Geometric points are rounded
    to integers and deduplicated, so fewer than ``count`` may remain.
    """
    if horizon < 1:
        raise ValueError(f"horizon must be >= 1, got {horizon}")
    if stride is not None:
        if stride < 1:
            raise ValueError(f"stride must be >= 1, got {stride}")
        points = set(range(stride, horizon + 1, stride))
        points.add(horizon)
        return tuple(sorted(points))
    if count < 1:
        raise ValueError(f"count must be >= 1, got {count}")
    raw = np.geomspace(1.0, float(horizon), num=min(count, horizon))
    points = {min(max(int(round(x)), 1), horizon) for x in raw}
    points.add(horizon)
    return tuple(sorted(points))


def make_instance_for(setting: str, v: float) -> BanditInstance:
    """Build the reward instance of a named setting."""
    if setting in ("S1", "S2", "S3"):
        return make_pareto_instance(setting, v)
    if setting == "two_arm_hard":
        return make_two_arm_hard_instance(TWO_ARM_HARD_DELTA, v, flavor="low")
    if setting == "k_arm_hard":
        return make_central_hard_instance(K_ARM_HARD_MEANS, v)
    raise ValueError(f"unknown setting {setting!r}")


def make_policy(
    config: ExperimentConfig,
    instance: BanditInstance,
    rep: int,
    ledger: PrivacyLedger | None = None,
):
    """Construct the configured policy with its per-arm noise streams."""
    params = MomentParams(u=instance.u, v=instance.v)
    hook = NoiseHook.ZERO if config.zero_noise else NoiseHook.LAPLACE
    algo = config.algo

    def sources(purpose: int) -> list:
        return [
            NoiseSource(
                rng=derive_stream(config.base_seed, rep, arm=a, purpose=purpose),
                hook=hook,
                ledger=ledger,
            )
            for a in range(instance.num_arms)
        ]

    if algo == "dprucb":
        return DPRobustUCB(
            params, config.eps, config.horizon, sources(TREE_NOISE), ledger=ledger
        )
    if algo == "dprse":
        return DPRobustSE(
            params,
            config.eps,
            config.horizon,
            sources(ELIMINATION_NOISE),
            beta=config.resolved_beta,
            ledger=ledger,
        )
    if algo == "ldprse":
        return LDPRobustSE(
            params,
            config.eps,
            config.horizon,
            sources(PERTURBATION_NOISE),
            beta=config.resolved_beta,
            ledger=ledger,
        )
    if algo == "rucb":
        return RobustUCB(instance.num_arms, params)
    raise ValueError(f"unknown algo {algo!r}")


def run_single(
    config: ExperimentConfig,
    rep: int,
    instance: BanditInstance | None = None,
    ledger: PrivacyLedger | None = None,
    return_policy: bool = False,
):
    """Play one repetition and return its :class:`RegretTrace`.

    With ``return_policy=True`` returns ``(trace, policy)`` so tests can
    inspect final policy state.
    """
    if not 0 <= rep:
        raise ValueError(f"rep must be non-negative, got {rep}")
    if instance is None:
        instance = make_instance_for(config.setting, config.v)
    policy = make_policy(config, instance, rep, ledger=ledger)
    reward_rngs = [
        derive_stream(config.base_seed, rep, arm=a, purpose=REWARDS)
        for a in range(instance.num_arms)
    ]
    samplers = [model.sample for model in instance.arms]
    gaps = instance.gaps
    counts = [0] * instance.num_arms
    cps = config.checkpoints()
    values = []
    cp_iter = iter(cps)
    next_cp = next(cp_iter)
    select = policy.select_arm
    observe = policy.observe
    for t in range(1, config.horizon + 1):
        arm = select(t)
        observe(arm, samplers[arm](reward_rngs[arm]))
        counts[arm] += 1
        if t == next_cp:
            values.append(math.fsum(g * c for g, c in zip(gaps, counts)))
            next_cp = next(cp_iter, None)
    trace = RegretTrace(rep=rep, checkpoints=tuple(zip(cps, values)))
    if return_policy:
        return trace, policy
    return trace


def _run_rep(args) -> RegretTrace:
    config, rep = args
    return run_single(config, rep)


def run_experiment(config: ExperimentConfig, workers: int = 1):
    """Run all repetitions and return ``(traces, summary)``.

    ``workers > 1`` fans repetitions out to a process pool; results are
    identical to the sequential run, in repetition order.
    """
    if workers < 1:
        raise ValueError(f"workers must be >= 1, got {workers}")
    reps = range(config.reps)
    if workers == 1:
        traces = [run_single(config, rep) for rep in reps]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            traces = list(pool.map(_run_rep, [(config, rep) for rep in reps]))
    return traces, aggregate(traces)


def aggregate(traces) -> SummaryStats:
    """Across-rep mean/std (ddof=0) of regret at each checkpoint."""
    if not traces:
        raise ValueError("need at least one trace")
    cps = tuple(t for t, _ in traces[0].checkpoints)
    for trace in traces:
        if tuple(t for t, _ in trace.checkpoints) != cps:
            raise ValueError("traces have mismatched checkpoint grids")
    matrix = np.array([[value for _, value in trace.checkpoints] for trace in traces])
    return SummaryStats(
        checkpoints=cps,
        means=tuple(float(x) for x in matrix.mean(axis=0)),
        stds=tuple(float(x) for x in matrix.std(axis=0)),
        n_reps=len(traces),
    )


def write_csv(
    path,
    config: ExperimentConfig,
    instance: BanditInstance,
    traces,
    summary: SummaryStats,
) -> dict:
    """Write ``<path>.runs.csv``, ``<path>.summary.csv`` and ``<path>.meta``.

    Floats are written with 17 significant digits, so values round-trip
    exactly.  Returns the three paths keyed by ``"runs"``, ``"summary"``,
    ``"meta"``.
    """
    base = Path(path)
    base.parent.mkdir(parents=True, exist_ok=True)
    runs_path = base.with_name(base.name + ".runs.csv")
    summary_path = base.with_name(base.name + ".summary.csv")
    meta_path = base.with_name(base.name + ".meta")

    eps_s = format_value(config.eps)
    v_s = format_value(config.v)
    with open(runs_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(RUNS_HEADER)
        for trace in traces:
            for t, value in trace.checkpoints:
                writer.writerow(
                    [config.algo, config.setting, eps_s, v_s, trace.rep, t, format_value(value)]
                )
    with open(summary_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(SUMMARY_HEADER)
        for t, mean, std in zip(summary.checkpoints, summary.means, summary.stds):
            writer.writerow(
                [
                    config.algo,
                    config.setting,
                    eps_s,
                    v_s,
                    t,
                    format_value(mean),
                    format_value(std),
                    summary.n_reps,
                ]
            )
    with open(meta_path, "w") as fh:
        fh.write(f"package_version={__version__}\n")
        for f in fields(config):
            value = getattr(config, f.name)
            if f.name == "beta":
                value = config.resolved_beta
            if isinstance(value, float):
                value = format_value(value)
            fh.write(f"{f.name}={value}\n")
        for line in instance_description(instance, setting=config.setting):
            fh.write(f"instance.{line}\n")
    return {"runs": runs_path, "summary": summary_path, "meta": meta_path}


def read_runs_csv(path) -> list:
    """Read a ``.runs.csv`` back into :class:`RegretTrace` objects."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if header != RUNS_HEADER:
            raise ValueError(f"unexpected header {header}")
        per_rep: dict = {}
        for row in reader:
            rep = int(row[4])
            per_rep.setdefault(rep, []).append((int(row[5]), float(row[6])))
    return [
        RegretTrace(rep=rep, checkpoints=tuple(points))
        for rep, points in sorted(per_rep.items())
    ]
