"""
Artifact outputs: runs.json, summary/timing/correlation CSV files and one
trajectory and one cognitive-map SVG per run.
"""

import csv
import json
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Union

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
from matplotlib.patches import Polygon  # noqa: E402

from .core import Rect, RobotModel  # noqa: E402
from .errors import ExportError  # noqa: E402
from .harness import RunRecord, ScenarioSpec  # noqa: E402
from .logging_setup import get_module_logger  # noqa: E402
from .planner import CognitiveMap  # noqa: E402
from .statistics import (  # noqa: E402
    CORRELATION_COLUMNS,
    SUMMARY_COLUMNS,
    SummaryStats,
    correlations,
)

logger = get_module_logger("export")

plt.rcParams["svg.hashsalt"] = "configurator"
_SVG_METADATA = {"Date": None}

TIMING_COLUMNS = ("scenario", "strategy", "variant", "repetition", "seed",
                  "n_objects", "n_states", "planning_time_s", "success")


def run_stem(record: RunRecord) -> str:
    return f"{record.scenario}_s{record.strategy}_v{record.variant}_r{record.repetition}"


def _write_text(path: Path, text: str) -> Path:
    try:
        path.write_text(text, encoding="utf-8")
    except OSError as e:
        raise ExportError(f"cannot write {path}: {e}") from e
    return path


def _write_csv(path: Path, header: Sequence[str], rows: Sequence[Sequence]) -> Path:
    try:
        with path.open("w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(header)
            writer.writerows(rows)
    except OSError as e:
        raise ExportError(f"cannot write {path}: {e}") from e
    return path


def write_runs(records: Sequence[RunRecord], path: Path) -> Path:
    payload = [r.to_dict() for r in records]
    return _write_text(path, json.dumps(payload, indent=2, sort_keys=True) + "\n")


def read_runs(path: Union[str, Path]) -> List[RunRecord]:
    path = Path(path)
    try:
        payload = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as e:
        raise ExportError(f"cannot read {path}: {e}") from e
    return [RunRecord.from_dict(d) for d in payload]


def _fmt(value) -> str:
    return f"{value:.6f}" if isinstance(value, float) else str(value)


def write_summary(stats: Sequence[SummaryStats], path: Path) -> Path:
    return _write_csv(path, SUMMARY_COLUMNS, [[_fmt(v) for v in s.row()] for s in stats])


def write_timings(records: Sequence[RunRecord], path: Path) -> Path:
    rows = [(r.scenario, r.strategy, r.variant, r.repetition, r.seed, r.n_objects,
             r.n_states, _fmt(r.planning_time), int(r.success)) for r in records]
    return _write_csv(path, TIMING_COLUMNS, rows)


def write_correlations(records: Sequence[RunRecord], path: Path) -> Path:
    rows = [(s, pair, n, _fmt(r)) for s, pair, n, r in correlations(records)]
    return _write_csv(path, CORRELATION_COLUMNS, rows)


# =============================================================================
# SVG
# =============================================================================

def _draw_rect(ax, rect: Rect, **style):
    ax.add_patch(Polygon(rect.corners(), closed=True, **style))


def _save(fig, path: Path) -> Path:
    try:
        fig.savefig(path, format="svg", bbox_inches="tight", metadata=_SVG_METADATA)
    except OSError as e:
        raise ExportError(f"cannot write {path}: {e}") from e
    finally:
        plt.close(fig)
    return path


def plot_trajectory(record: RunRecord, scenario: Optional[ScenarioSpec], path: Path,
                    robot: Optional[RobotModel] = None) -> Path:
    """Executed path with obstacles, goal and the end poses of plan states"""
    robot = robot or RobotModel()
    fig, ax = plt.subplots(figsize=(6, 6))
    if scenario is not None:
        for obstacle in scenario.obstacles:
            _draw_rect(ax, obstacle, facecolor="0.6", edgecolor="0.2")
        if scenario.goal is not None:
            _draw_rect(ax, scenario.goal, facecolor="tab:red", alpha=0.6)
        if scenario.keep_out is not None:
            _draw_rect(ax, scenario.keep_out, fill=False, edgecolor="tab:orange", linestyle="--")
    if record.trajectory:
        xs = [p.x for p in record.trajectory]
        ys = [p.y for p in record.trajectory]
        ax.plot(xs, ys, color="tab:blue", linewidth=1.5, label="executed")
        _draw_rect(ax, robot.footprint(record.trajectory[0]), fill=False, edgecolor="tab:blue")
        _draw_rect(ax, robot.footprint(record.trajectory[-1]), fill=False,
                   edgecolor="tab:green" if record.success else "tab:red")
    if record.cognitive_map is not None and record.plan:
        cmap = CognitiveMap.from_dict(record.cognitive_map)
        ends = [cmap[i].end_pose() for i in record.plan]
        ax.scatter([p.x for p in ends], [p.y for p in ends], color="black", s=12, zorder=3,
                   label="plan states")
    ax.set_aspect("equal")
    ax.autoscale_view()
    ax.set_title(f"{record.scenario} S{record.strategy} variant {record.variant} "
                 f"({'success' if record.success else 'failure'})")
    ax.legend(loc="best", fontsize="small")
    return _save(fig, path)


def plot_cognitive_map(record: RunRecord, path: Path) -> Path:
    """State end poses linked by transitions, phi next to each state, plan in red"""
    fig, ax = plt.subplots(figsize=(6, 6))
    data = record.cognitive_map
    if data is None or not data["states"]:
        ax.text(0.5, 0.5, "no cognitive map", ha="center", va="center", transform=ax.transAxes)
        ax.set_axis_off()
        return _save(fig, path)

    cmap = CognitiveMap.from_dict(data)
    psi = {s["id"]: s.get("psi", 0) for s in data["states"]}
    ends = {s.id: s.end_pose() for s in cmap.states}
    for parent, child in cmap.edges:
        a, b = ends[parent], ends[child]
        on_plan = psi.get(parent) and psi.get(child)
        ax.annotate("", xy=(b.x, b.y), xytext=(a.x, a.y),
                    arrowprops={"arrowstyle": "->", "color": "tab:red" if on_plan else "0.5",
                                "linewidth": 1.5 if on_plan else 0.8})
    for state in cmap.states:
        end = ends[state.id]
        if state.collided:
            color = "black"
        elif psi.get(state.id):
            color = "tab:red"
        else:
            color = "tab:blue"
        ax.scatter([end.x], [end.y], color=color, s=18, zorder=3)
        ax.annotate(f"q{state.id} {state.mode.value} {state.phi:.2f}", (end.x, end.y),
                    fontsize=6, xytext=(3, 3), textcoords="offset points")
    ax.set_aspect("equal")
    ax.autoscale_view()
    ax.set_title(f"{record.scenario} S{record.strategy}: {len(cmap)} states")
    return _save(fig, path)


def render_run(record: RunRecord, out_dir: Path,
               scenarios: Optional[Dict[str, ScenarioSpec]] = None) -> List[Path]:
    stem = run_stem(record)
    scenario = (scenarios or {}).get(record.scenario)
    return [plot_trajectory(record, scenario, out_dir / f"{stem}_trajectory.svg"),
            plot_cognitive_map(record, out_dir / f"{stem}_map.svg")]


def export_outputs(records: Sequence[RunRecord], stats: Sequence[SummaryStats],
                   out_dir: Union[str, Path],
                   scenarios: Optional[Sequence[ScenarioSpec]] = None) -> List[Path]:
    """
    runs.json, summary.csv, timings.csv, correlations.csv and two SVGs per run.
    """
    out_dir = Path(out_dir)
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
    except OSError as e:
        raise ExportError(f"cannot create {out_dir}: {e}") from e
    by_name = {s.name: s for s in (scenarios or [])}

    written = [
        write_runs(records, out_dir / "runs.json"),
        write_summary(stats, out_dir / "summary.csv"),
        write_timings(records, out_dir / "timings.csv"),
        write_correlations(records, out_dir / "correlations.csv"),
    ]
    for record in records:
        written.extend(render_run(record, out_dir, by_name))
    logger.info("outputs written", out_dir=str(out_dir), n_files=len(written),
                n_runs=len(records))
    return written
