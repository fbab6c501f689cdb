"""Command-line entry point: ``statbench {presets,run,eval,compare,serve,bench}``."""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .. import harness
from ..errors import StatError
from ..policies import POLICIES
from ..scenario import PRESETS, REGIMES, derived_quantities, load_config, preset
from ..stats import compare_samples
from . import io


def _add_config_args(p: argparse.ArgumentParser, default: str | None = "3A-6T-5x3") -> None:
    g = p.add_mutually_exclusive_group()
    g.add_argument("--preset", default=None, help=f"preset name (default {default})")
    g.add_argument("--config", default=None, help="path to a key = value config file, or a preset name")
    p.set_defaults(_default_preset=default)


def _config(args):
    if args.config:
        return load_config(args.config)
    return preset(args.preset or args._default_preset)


def _figures(args) -> bool:
    return not getattr(args, "no_figures", False)


def cmd_presets(args) -> int:
    cols = ["preset", "regime", "agents", "tasks", "grid", "task_density", "tasks_per_agent",
            "choices_per_agent", "joint_actions"]
    rows = []
    for name, (n, m, w, h) in PRESETS.items():
        d = derived_quantities(preset(name))
        tpa = f"{d.tasks_per_agent:.2f}".rstrip("0")
        tpa = tpa + "0" if tpa.endswith(".") else tpa
        rows.append([name, REGIMES[name], n, m, f"{w}x{h}", f"{d.task_density:.3f}", tpa,
                     d.choices_per_agent, f"{d.joint_actions:,}"])
    if args.format == "csv":
        print(",".join(cols))
        for r in rows:
            print(",".join(str(c).replace(",", "") for c in r))
    else:
        widths = [max(len(str(x)) for x in col) for col in zip(cols, *rows)]
        print("  ".join(c.ljust(wd) for c, wd in zip(cols, widths)))
        for r in rows:
            print("  ".join(str(c).ljust(wd) for c, wd in zip(r, widths)))
    return 0


def _print_metrics(rec) -> None:
    for key, value in zip(rec.columns(), rec.values()):
        print(f"{key:40s} {value}")


def cmd_run(args) -> int:
    cfg = _config(args)
    log = harness.run_episode(cfg, args.policy, args.seed)
    rec = log.metrics()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    io.write_episode_log(log, out / "episode.jsonl")
    io.write_metrics_csv([rec], out / "metrics.csv")
    if _figures(args):
        from ..plotting import plot_episode_timeline

        (out / "figures").mkdir(exist_ok=True)
        plot_episode_timeline(log, out / "figures" / "timeline.png")
    print(f"# {cfg.label} policy={log.policy} seed={args.seed} terminal={log.terminal_reason}")
    _print_metrics(rec)
    return 0


def cmd_eval(args) -> int:
    cfg = _config(args)
    seeds = list(range(args.seeds))
    report = harness.evaluate(cfg, args.policy, seeds, args.episodes, root_seed=args.root_seed,
                              workers=args.workers)
    paths = io.write_report(report, args.out)
    if _figures(args):
        from ..plotting import plot_report

        fig_dir = Path(args.out) / "figures"
        fig_dir.mkdir(exist_ok=True)
        plot_report(report, fig_dir / "summary.png")
    flag = " (degenerate: single seed, CI reported as 0)" if report.degenerate else ""
    print(f"# {report.config} policy={report.policy} seeds={report.seed_count} "
          f"episodes/seed={report.episodes_per_seed}{flag}")
    for key, s in report.metrics.items():
        print(f"{key:40s} {s.mean:.6g} ± {s.ci95:.3g}")
    print(f"# wrote {', '.join(str(p) for p in paths.values())}")
    return 0


DEFAULT_COMPARE = ["episode_return", "conflict_rate", "conflicts_per_task", "per_agent_diversity", "throughput"]


def cmd_compare(args) -> int:
    a = io.read_report(args.report_a)
    b = io.read_report(args.report_b)
    metrics = args.metric or DEFAULT_COMPARE
    rows = []
    for key in metrics:
        if key not in a.metrics or key not in b.metrics:
            print(f"statbench compare: metric {key!r} missing from a report", file=sys.stderr)
            return 2
        rows.append(compare_samples(key, a.metrics[key].per_seed, b.metrics[key].per_seed, args.alpha))
    print(f"# {a.config}/{a.policy} -> {b.config}/{b.policy}  (Welch, alpha={args.alpha})")
    print(f"{'metric':36s} {'mean_a':>12s} {'mean_b':>12s} {'p':>10s}  cell")
    for r in rows:
        print(f"{r.metric:36s} {r.mean_a:12.6g} {r.mean_b:12.6g} {r.p_value:10.3g}  {r.cell}")
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        io.write_comparison_csv(rows, out / "comparison.csv")
        if _figures(args):
            from ..plotting import plot_comparison

            (out / "figures").mkdir(exist_ok=True)
            plot_comparison(a, b, rows, out / "figures" / "comparison.png")
    return 0


def cmd_serve(args) -> int:
    from .protocol import serve

    cfg = _config(args) if (args.preset or args.config) else None
    serve(cfg, args.transport, args.host, args.port)
    return 0


def cmd_bench(args) -> int:
    cfg = _config(args)
    res = harness.benchmark(cfg, args.policy, args.steps, args.seed)
    res.update({"config": cfg.label, "policy": args.policy})
    if args.json:
        print(json.dumps(res))
    else:
        print(f"{cfg.label} {args.policy}: {res['steps']} steps over {res['episodes']} episodes "
              f"in {res['seconds']:.3f}s -> {res['steps_per_second']:,.0f} steps/s")
    if args.min_rate is not None and res["steps_per_second"] < args.min_rate:
        print(f"statbench bench: below required {args.min_rate:,.0f} steps/s", file=sys.stderr)
        return 1
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="statbench", description="Spatial task-allocation testbed tools")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    p = sub.add_parser("presets", help="list the benchmark presets and derived quantities")
    p.add_argument("--format", choices=("table", "csv"), default="table")
    p.set_defaults(func=cmd_presets)

    p = sub.add_parser("run", help="run one episode and write its log and metrics")
    _add_config_args(p)
    p.add_argument("--policy", choices=sorted(POLICIES), default="coordinated_greedy")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default="run_out")
    p.add_argument("--no-figures", action="store_true")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("eval", help="seeded evaluation protocol with 95%% intervals")
    _add_config_args(p)
    p.add_argument("--policy", choices=sorted(POLICIES), default="coordinated_greedy")
    p.add_argument("--seeds", type=int, default=harness.DEFAULT_SEEDS, help="number of seeds")
    p.add_argument("--episodes", type=int, default=harness.DEFAULT_EPISODES, help="test episodes per seed")
    p.add_argument("--root-seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", default="eval_out")
    p.add_argument("--no-figures", action="store_true")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("compare", help="Welch comparison of two eval outputs")
    p.add_argument("report_a", help="eval output directory or report.json (reference)")
    p.add_argument("report_b", help="eval output directory or report.json (changed setting)")
    p.add_argument("--metric", action="append", help="metric to compare (repeatable)")
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--out", default=None)
    p.add_argument("--no-figures", action="store_true")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("serve", help="line-protocol environment server")
    _add_config_args(p, default=None)
    p.add_argument("--transport", choices=("stdio", "tcp"), default="stdio")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=5555)
    p.set_defaults(func=cmd_serve)

    p = sub.add_parser("bench", help="single-threaded environment throughput")
    _add_config_args(p, default="5A-25T-25x15")
    p.add_argument("--policy", choices=sorted(POLICIES), default="random_valid")
    p.add_argument("--steps", type=int, default=200_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--min-rate", type=float, default=None, help="exit 1 when slower than this")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, stream=sys.stderr)
    try:
        return args.func(args)
    except (StatError, OSError, KeyError, ValueError) as exc:
        print(f"statbench {args.command}: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
