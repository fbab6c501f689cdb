from statbench.harness import evaluate, run_episode, scaling_comparison
from statbench.plotting import MAIN_METRICS, plot_comparison, plot_episode_timeline, plot_report
from statbench.scenario import preset


def _is_png(path):
    with open(path, "rb") as fh:
        return fh.read(8) == b"\x89PNG\r\n\x1a\n"


def test_figures_are_written(tmp_path):
    cfg = preset("3A-6T-5x3")
    log = run_episode(cfg, "random_valid", 0)
    assert _is_png(plot_episode_timeline(log, tmp_path / "t.png"))
    a = evaluate(cfg, "coordinated_greedy", seeds=range(3), episodes_per_seed=2)
    b = evaluate(cfg, "greedy_nearest", seeds=range(3), episodes_per_seed=2)
    assert _is_png(plot_report(a, tmp_path / "r.png"))
    single = evaluate(cfg, "random_valid", seeds=[0], episodes_per_seed=1)
    assert _is_png(plot_report(single, tmp_path / "s.png"))
    rows = [scaling_comparison(a, b, m) for m in MAIN_METRICS]
    assert _is_png(plot_comparison(a, b, rows, tmp_path / "c.png"))
