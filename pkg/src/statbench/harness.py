"""Episode runner, seeded evaluation protocol and report aggregation."""
from __future__ import annotations

import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence

from . import world
from .diagnostics import AGGREGATE_METRICS, MetricsRecord, StepRecord, episode_metrics
from .policies import JointPolicy, get_policy
from .rng import SplitMix64, derive_seed
from .scenario import EnvConfig, config_from_dict, config_to_dict
from .stats import Comparison, ci95, compare_samples

POLICY_STREAM = 0x50C7
DEFAULT_EPISODES = 20
DEFAULT_SEEDS = 5


@dataclass
class EpisodeLog:
    cfg: EnvConfig
    seed: int
    policy: str
    steps: list[StepRecord]
    final: dict
    episode_return: float

    @property
    def terminal_reason(self) -> str:
        return self.final["terminal_reason"]

    def metrics(self) -> MetricsRecord:
        return episode_metrics(self, self.cfg)

    def header(self) -> dict:
        return {"type": "header", "config": config_to_dict(self.cfg), "seed": self.seed, "policy": self.policy}

    def summary(self) -> dict:
        return {"type": "summary", "final": self.final, "episode_return": self.episode_return}

    @classmethod
    def from_parts(cls, header: dict, steps: list[StepRecord], summary: dict) -> EpisodeLog:
        return cls(
            cfg=config_from_dict(header["config"]),
            seed=header["seed"],
            policy=header["policy"],
            steps=steps,
            final=summary["final"],
            episode_return=summary["episode_return"],
        )


def _resolve_policy(policy: str | JointPolicy) -> tuple[str, JointPolicy]:
    if callable(policy):
        return getattr(policy, "__name__", "custom"), policy
    return str(getattr(policy, "value", policy)), get_policy(policy)


def run_episode(cfg: EnvConfig, policy: str | JointPolicy, seed: int) -> EpisodeLog:
    """Run one episode to termination; task placement and policy randomness both derive from ``seed``."""
    name, act = _resolve_policy(policy)
    state = world.reset(cfg, seed)
    rng = SplitMix64(derive_seed(seed, POLICY_STREAM))
    steps = []
    ret = 0.0
    while state.terminal_reason is None:
        actions = act(state, rng)
        _, outcome = world.step(state, actions)
        steps.append(StepRecord.from_outcome(actions, outcome))
        ret += outcome.team_reward
    final = {
        "t": state.t,
        "completed_count": state.completed_count,
        "task_status": list(state.task_status),
        "task_locations": [list(p) for p in state.task_locations],
        "terminal_reason": state.terminal_reason.value,
    }
    return EpisodeLog(cfg, seed, name, steps, final, ret)


def replay(log: EpisodeLog) -> EpisodeLog:
    """Re-run the recorded actions from scratch; the result must equal ``log``."""
    actions = iter([rec.actions for rec in log.steps])
    return run_episode(log.cfg, lambda state, rng: next(actions), log.seed)


def episode_seed(root_seed: int, seed_index: int, episode_index: int) -> int:
    return derive_seed(root_seed, seed_index, episode_index)


@dataclass
class MetricSummary:
    mean: float
    ci95: float
    per_seed: list[float]


@dataclass
class AggregateReport:
    config: str
    policy: str
    episodes_per_seed: int
    seeds: list[int]
    root_seed: int
    metrics: dict[str, MetricSummary]
    episodes: list[tuple[int, int, MetricsRecord]] = field(default_factory=list, repr=False)
    cfg: EnvConfig | None = field(default=None, repr=False)

    @property
    def seed_count(self) -> int:
        return len(self.seeds)

    @property
    def degenerate(self) -> bool:
        """True when a single seed makes the interval meaningless (reported as 0)."""
        return len(self.seeds) < 2

    def to_dict(self) -> dict:
        return {
            "config": self.config,
            "config_params": config_to_dict(self.cfg) if self.cfg is not None else None,
            "policy": self.policy,
            "episodes_per_seed": self.episodes_per_seed,
            "seeds": list(self.seeds),
            "seed_count": self.seed_count,
            "root_seed": self.root_seed,
            "degenerate": self.degenerate,
            "metrics": {
                k: {"mean": s.mean, "ci95": s.ci95, "per_seed": list(s.per_seed)}
                for k, s in self.metrics.items()
            },
        }

    @classmethod
    def from_dict(cls, d: dict) -> AggregateReport:
        cfg = config_from_dict(d["config_params"]) if d.get("config_params") else None
        return cls(
            config=d["config"],
            policy=d["policy"],
            episodes_per_seed=d["episodes_per_seed"],
            seeds=list(d["seeds"]),
            root_seed=d.get("root_seed", 0),
            metrics={k: MetricSummary(v["mean"], v["ci95"], list(v["per_seed"])) for k, v in d["metrics"].items()},
            cfg=cfg,
        )


def _episode_job(args) -> MetricsRecord:
    cfg, policy, seed = args
    return run_episode(cfg, policy, seed).metrics()


def evaluate(
    cfg: EnvConfig,
    policy: str | JointPolicy,
    seeds: Sequence[int] = tuple(range(DEFAULT_SEEDS)),
    episodes_per_seed: int = DEFAULT_EPISODES,
    root_seed: int = 0,
    workers: int = 1,
) -> AggregateReport:
    """Run ``episodes_per_seed`` episodes per seed and aggregate per-seed means.

    Every metric is averaged over each seed's episodes first; the reported
    mean and 95% interval are taken across those per-seed means. Results are
    merged in (seed, episode) order, so ``workers`` never changes the output.
    """
    if episodes_per_seed < 1:
        raise ValueError("episodes_per_seed must be >= 1")
    seeds = list(seeds)
    if not seeds:
        raise ValueError("need at least one seed")
    name, act = _resolve_policy(policy)
    jobs = [
        (s, e, episode_seed(root_seed, s, e)) for s in seeds for e in range(episodes_per_seed)
    ]
    if workers > 1:
        if callable(policy):
            raise ValueError("parallel evaluation needs a named policy")
        with ProcessPoolExecutor(max_workers=workers) as pool:
            records = list(pool.map(_episode_job, [(cfg, name, sd) for _, _, sd in jobs], chunksize=8))
    else:
        records = [run_episode(cfg, act, sd).metrics() for _, _, sd in jobs]

    episodes = [(s, e, rec) for (s, e, _), rec in zip(jobs, records)]
    metrics = {}
    for key in AGGREGATE_METRICS:
        per_seed = []
        for s in seeds:
            vals = [float(getattr(rec, key)) for ss, _, rec in episodes if ss == s]
            acc = 0.0
            for v in vals:
                acc += v
            per_seed.append(acc / len(vals))
        mean, half = ci95(per_seed)
        metrics[key] = MetricSummary(mean, half, per_seed)
    return AggregateReport(cfg.label, name, episodes_per_seed, seeds, root_seed, metrics, episodes, cfg)


def scaling_comparison(
    report_a: AggregateReport, report_b: AggregateReport, metric: str, alpha: float = 0.05
) -> Comparison:
    """Welch test on the per-seed means of ``metric``; direction is b relative to a."""
    for r in (report_a, report_b):
        if metric not in r.metrics:
            raise KeyError(f"report {r.config}/{r.policy} has no metric {metric!r}")
    return compare_samples(metric, report_a.metrics[metric].per_seed, report_b.metrics[metric].per_seed, alpha)


def benchmark(
    cfg: EnvConfig, policy: str | JointPolicy = "random_valid", steps: int = 200_000, seed: int = 0,
    clock: Callable[[], float] = time.perf_counter,
) -> dict:
    """Single-threaded env steps per second, policy and resets included."""
    _, act = _resolve_policy(policy)
    rng = SplitMix64(derive_seed(seed, POLICY_STREAM))
    step = world.step
    done = 0
    episodes = 0
    t0 = clock()
    while done < steps:
        state = world.reset(cfg, derive_seed(seed, episodes))
        episodes += 1
        while state.terminal_reason is None and done < steps:
            step(state, act(state, rng))
            done += 1
    elapsed = clock() - t0
    return {"steps": done, "episodes": episodes, "seconds": elapsed, "steps_per_second": done / elapsed}
