"""
Closed-loop Task planning with a hybrid automaton: the Configurator builds a
cognitive map by simulating Task chains and extracts a plan from it.
"""

from .core import Disturbance, DisturbanceKind, Pose2, Rect, RobotModel
from .errors import ConfiguratorError
from .harness import ScenarioSpec, RunRecord, builtin_scenarios, run_experiment, run_suite
from .planner import CognitiveMap, Plan, PlanState, Strategy, StrategyKind, extract_plan, synthesize
from .simulator import SimConfig, World

__all__ = [
    "CognitiveMap",
    "ConfiguratorError",
    "Disturbance",
    "DisturbanceKind",
    "Plan",
    "PlanState",
    "Pose2",
    "Rect",
    "RobotModel",
    "RunRecord",
    "ScenarioSpec",
    "SimConfig",
    "Strategy",
    "StrategyKind",
    "World",
    "builtin_scenarios",
    "extract_plan",
    "run_experiment",
    "run_suite",
    "synthesize",
]
