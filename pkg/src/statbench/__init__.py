"""Commitment-constrained spatial task allocation testbed with coordination diagnostics."""
from .scenario import EnvConfig, RewardParams, derived_quantities, make_config, preset, PRESETS
from .world import AgentMode, TaskStatus, TerminalReason, WorldState, StepOutcome, reset, step
from .diagnostics import MetricsRecord, StepRecord, episode_metrics
from .harness import AggregateReport, EpisodeLog, evaluate, run_episode, scaling_comparison
from .stats import ci95, welch_t

__version__ = "0.1.0"

__all__ = [
    "EnvConfig", "RewardParams", "derived_quantities", "make_config", "preset", "PRESETS",
    "AgentMode", "TaskStatus", "TerminalReason", "WorldState", "StepOutcome", "reset", "step",
    "MetricsRecord", "StepRecord", "episode_metrics",
    "AggregateReport", "EpisodeLog", "evaluate", "run_episode", "scaling_comparison",
    "ci95", "welch_t",
]
