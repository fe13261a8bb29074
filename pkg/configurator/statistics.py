"""
Descriptive statistics over run records.
"""

from dataclasses import dataclass
from typing import Dict, List, Sequence, Tuple

import numpy as np

from .errors import DegenerateInput

SUMMARY_COLUMNS = ("scenario", "strategy", "mean_objects", "sd_objects",
                   "mean_states", "sd_states", "mean_time_s", "sd_time_s")
CORRELATION_COLUMNS = ("scenario", "pair", "n", "r")


@dataclass(frozen=True)
class SummaryStats:
    scenario: str
    strategy: int
    n_runs: int
    mean_objects: float
    sd_objects: float
    mean_states: float
    sd_states: float
    mean_time_s: float
    sd_time_s: float

    def row(self) -> Tuple:
        return tuple(getattr(self, c) for c in SUMMARY_COLUMNS)


def _groups(records) -> Dict[Tuple[str, int], list]:
    groups: Dict[Tuple[str, int], list] = {}
    for record in records:
        groups.setdefault((record.scenario, record.strategy), []).append(record)
    return groups


def summarize(records: Sequence) -> List[SummaryStats]:
    """
    Mean and population standard deviation per (scenario, strategy), over the
    runs that produced a plan. Groups without any plan get no row.
    """
    rows = []
    for (scenario, strategy), group in sorted(_groups(records).items()):
        planned = [r for r in group if r.has_plan]
        if not planned:
            continue
        objects = np.array([r.n_objects for r in planned], dtype=float)
        states = np.array([r.n_states for r in planned], dtype=float)
        times = np.array([r.planning_time for r in planned], dtype=float)
        rows.append(SummaryStats(
            scenario, strategy, len(planned),
            float(objects.mean()), float(objects.std()),
            float(states.mean()), float(states.std()),
            float(times.mean()), float(times.std()),
        ))
    return rows


def pearson(xs: Sequence[float], ys: Sequence[float]) -> float:
    if len(xs) != len(ys):
        raise DegenerateInput(f"length mismatch: {len(xs)} vs {len(ys)}")
    if len(xs) < 2:
        raise DegenerateInput("at least two samples are required")
    x = np.asarray(xs, dtype=float)
    y = np.asarray(ys, dtype=float)
    dx, dy = x - x.mean(), y - y.mean()
    sx, sy = np.sqrt((dx ** 2).sum()), np.sqrt((dy ** 2).sum())
    if sx == 0 or sy == 0:
        raise DegenerateInput("zero variance")
    return float(np.clip((dx * dy).sum() / (sx * sy), -1.0, 1.0))


def correlations(records: Sequence) -> List[Tuple[str, str, int, float]]:
    """
    Per scenario, Pearson r of planning time against the number of simulated
    bodies and against the number of states, over map-building runs with a
    plan. Degenerate samples are skipped.
    """
    rows = []
    by_scenario: Dict[str, list] = {}
    for record in records:
        if record.strategy > 0 and record.has_plan:
            by_scenario.setdefault(record.scenario, []).append(record)
    for scenario, group in sorted(by_scenario.items()):
        times = [r.planning_time for r in group]
        for pair, values in (("time_objects", [r.n_objects for r in group]),
                             ("time_states", [r.n_states for r in group])):
            try:
                rows.append((scenario, pair, len(group), pearson(times, values)))
            except DegenerateInput:
                continue
    return rows
