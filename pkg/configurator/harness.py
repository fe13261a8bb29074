"""
Experiment harness: scenario files, single runs for every strategy, open-loop
rollout of plans in the ground-truth scenario and the full suite.
"""

import json
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple, Union

from .core import Disturbance, DisturbanceKind, Pose2, Rect, RobotModel, obb_overlap
from .errors import NoPlan, RobotInCollision, ScenarioFormatError, StateSpaceExhausted
from .logging_setup import get_module_logger
from .planner import (
    GOAL_TOLERANCE,
    CognitiveMap,
    Configurator,
    Plan,
    ReactiveAgent,
    Strategy,
    extract_plan,
)
from .sensing import ScanConfig, synthesize_scan
from .simulator import SimConfig, World, execute_motor_command, simulate_task

logger = get_module_logger("harness")

SCENARIO_DIR = Path(__file__).parent / "scenarios"
BUILTIN_SCENARIOS = ("cul_de_sac", "overtaking")

N_VARIANTS = 3
N_REPETITIONS = 3
STRATEGIES = (0, 1, 2, 3, 4)
# Strategy 0 gives up after this many Tasks
REACTIVE_TASK_CAP = 25


# =============================================================================
# SCENARIOS
# =============================================================================

@dataclass(frozen=True)
class ScenarioSpec:
    """
    A fixed-frame test world.

    `keep_out` is the area the robot must not enter for the run to count as a
    success (the inside of a cul-de-sac), used when there is no goal.
    """
    name: str
    obstacles: Tuple[Disturbance, ...]
    robot_start: Pose2
    variants: Tuple[Pose2, ...]
    goal: Optional[Disturbance] = None
    d_sub: float = 0.5
    keep_out: Optional[Rect] = None

    def __post_init__(self):
        for i, o in enumerate(self.obstacles):
            if o.w <= 0 or o.l <= 0:
                raise ScenarioFormatError(f"{self.name}: obstacle {i} has non-positive extents")
        if not self.variants:
            raise ScenarioFormatError(f"{self.name}: at least one start variant is required")
        if self.d_sub <= 0:
            raise ScenarioFormatError(f"{self.name}: d_sub must be > 0")
        robot = RobotModel()
        for pose in (self.robot_start,) + tuple(self.variants):
            footprint = robot.footprint(pose)
            if any(obb_overlap(footprint, o) for o in self.obstacles):
                raise RobotInCollision(
                    f"{self.name}: start ({pose.x:.3f}, {pose.y:.3f}) overlaps an obstacle")

    def start(self, variant: int) -> Pose2:
        if not 0 <= variant < len(self.variants):
            raise ScenarioFormatError(
                f"{self.name}: variant {variant} out of range 0..{len(self.variants) - 1}")
        return self.variants[variant]

    def to_dict(self) -> Dict[str, Any]:
        def rect(r):
            return {"x": r.x, "y": r.y, "theta": r.theta, "w": r.w, "l": r.l}
        return {
            "name": self.name,
            "obstacles": [rect(o) for o in self.obstacles],
            "robot_start": self.robot_start.to_dict(),
            "variants": [p.to_dict() for p in self.variants],
            "goal": None if self.goal is None else rect(self.goal),
            "d_sub": self.d_sub,
            "keep_out": None if self.keep_out is None else rect(self.keep_out),
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "ScenarioSpec":
        try:
            def rect(r, kind):
                return Disturbance(float(r["x"]), float(r["y"]), float(r.get("theta", 0.0)),
                                   float(r["w"]), float(r["l"]), kind)
            obstacles = tuple(rect(o, DisturbanceKind.OBSTACLE_LOOMING) for o in data["obstacles"])
            goal = data.get("goal")
            keep_out = data.get("keep_out")
            return cls(
                name=str(data["name"]),
                obstacles=obstacles,
                robot_start=Pose2.from_dict(data["robot_start"]),
                variants=tuple(Pose2.from_dict(p) for p in data["variants"]),
                goal=None if goal is None else rect(goal, DisturbanceKind.TARGET),
                d_sub=float(data["d_sub"]),
                keep_out=None if keep_out is None else Rect(
                    float(keep_out["x"]), float(keep_out["y"]), float(keep_out.get("theta", 0.0)),
                    float(keep_out["w"]), float(keep_out["l"])),
            )
        except (KeyError, TypeError, ValueError) as e:
            raise ScenarioFormatError(f"malformed scenario: {e!r}") from e


def load_scenario(path: Union[str, Path]) -> ScenarioSpec:
    path = Path(path)
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as e:
        raise ScenarioFormatError(f"cannot read scenario {path}: {e}") from e
    return ScenarioSpec.from_dict(data)


def dump_scenario(spec: ScenarioSpec, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.write_text(json.dumps(spec.to_dict(), indent=2) + "\n", encoding="utf-8")
    return path


def builtin_scenarios() -> List[ScenarioSpec]:
    return [load_scenario(SCENARIO_DIR / f"{name}.json") for name in BUILTIN_SCENARIOS]


def resolve_scenario(name_or_file: str) -> ScenarioSpec:
    """A built-in scenario by name (dashes or underscores) or a scenario file"""
    key = name_or_file.replace("-", "_")
    if key in BUILTIN_SCENARIOS:
        return load_scenario(SCENARIO_DIR / f"{key}.json")
    return load_scenario(name_or_file)


# =============================================================================
# RUNS
# =============================================================================

@dataclass
class RunRecord:
    scenario: str
    strategy: int
    variant: int
    repetition: int
    seed: int
    n_objects: int
    n_states: int
    planning_time: float
    success: bool
    collided: bool = False
    plan: Optional[List[int]] = None
    n_motor: Optional[List[int]] = None
    error: Optional[str] = None
    trajectory: List[Pose2] = field(default_factory=list)
    cognitive_map: Optional[Dict[str, Any]] = None

    @property
    def has_plan(self) -> bool:
        return self.plan is not None

    def to_dict(self, include_timing: bool = False) -> Dict[str, Any]:
        """Serializable form; wall-clock timing is left out unless asked for"""
        data = {
            "scenario": self.scenario,
            "strategy": self.strategy,
            "variant": self.variant,
            "repetition": self.repetition,
            "seed": self.seed,
            "n_objects": self.n_objects,
            "n_states": self.n_states,
            "success": self.success,
            "collided": self.collided,
            "plan": self.plan,
            "n_motor": self.n_motor,
            "error": self.error,
            "trajectory": [p.to_dict() for p in self.trajectory],
            "cognitive_map": self.cognitive_map,
        }
        if include_timing:
            data["planning_time"] = self.planning_time
        return data

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "RunRecord":
        return cls(
            scenario=data["scenario"], strategy=data["strategy"], variant=data["variant"],
            repetition=data["repetition"], seed=data["seed"], n_objects=data["n_objects"],
            n_states=data["n_states"], planning_time=data.get("planning_time", 0.0),
            success=data["success"], collided=data.get("collided", False),
            plan=data.get("plan"), n_motor=data.get("n_motor"), error=data.get("error"),
            trajectory=[Pose2.from_dict(p) for p in data.get("trajectory", [])],
            cognitive_map=data.get("cognitive_map"),
        )


def rollout(ground: World, cmap: CognitiveMap, plan: Plan, cfg: SimConfig,
            robot: Optional[RobotModel] = None) -> Tuple[List[Pose2], bool]:
    """Execute every plan state's motor command open-loop in the real scenario"""
    pose = ground.robot_pose
    trajectory = [pose]
    per_step = cfg.motor_rate * cfg.step
    for index, n_motor in zip(plan.states[1:], plan.n_motor[1:]):
        steps = int(round(n_motor / per_step))
        poses, hit = execute_motor_command(ground, pose, cmap[index].mode, steps, cfg, robot)
        trajectory.extend(poses)
        if poses:
            pose = poses[-1]
        if hit is not None:
            logger.warning("rollout collision", state=index, x=round(pose.x, 3), y=round(pose.y, 3))
            return trajectory, True
    return trajectory, False


def _in_keep_out(scenario: ScenarioSpec, trajectory: Sequence[Pose2]) -> bool:
    if scenario.keep_out is None:
        return False
    return any(obb_overlap(scenario.keep_out, Rect(p.x, p.y, 0.0, 0.0, 0.0)) for p in trajectory)


def evaluate_success(scenario: ScenarioSpec, trajectory: Sequence[Pose2], collided: bool,
                     tolerance: float = GOAL_TOLERANCE) -> bool:
    if collided or not trajectory:
        return False
    if scenario.goal is not None:
        end = trajectory[-1]
        return end.distance_to(Pose2(scenario.goal.x, scenario.goal.y)) <= tolerance
    return not _in_keep_out(scenario, trajectory)


def _goal_reached(scenario: ScenarioSpec, pose: Pose2) -> bool:
    return (scenario.goal is not None
            and pose.distance_to(Pose2(scenario.goal.x, scenario.goal.y)) <= GOAL_TOLERANCE)


def _reactive_run(scenario: ScenarioSpec, strategy: Strategy, start: Pose2, seed: int,
                  cfg: SimConfig, robot: RobotModel, scan_cfg: ScanConfig
                  ) -> Tuple[List[Pose2], bool, float, int]:
    agent = ReactiveAgent(scenario.goal, strategy.d_sub, cfg, robot)
    ground = World(scenario.obstacles, start, scenario.goal)
    pose, trajectory = start, [start]
    elapsed, collided = 0.0, False
    for k in range(REACTIVE_TASK_CAP):
        if _goal_reached(scenario, pose) or start.distance_to(pose) >= cfg.horizon:
            break
        cloud = synthesize_scan(scenario, pose, scan_cfg, seed + k, robot)
        started = time.perf_counter()
        task = agent.step(World((), pose, scenario.goal, cloud))
        elapsed += time.perf_counter() - started
        limit = strategy.d_sub if task.mode.is_straight else None
        result = simulate_task(ground.at(pose), task, cfg, robot,
                               distance_limit=limit, detect_looming=False)
        trajectory.extend(result.poses[1:])
        pose = result.end_pose
        if result.collided:
            collided = True
            break
    return trajectory, collided, elapsed, agent.n_objects


def run_experiment(scenario: ScenarioSpec, strategy: Strategy, variant: int, seed: int,
                   repetition: int = 0, cfg: Optional[SimConfig] = None,
                   robot: Optional[RobotModel] = None, scan_cfg: Optional[ScanConfig] = None,
                   planner_settings: Optional[Dict[str, Any]] = None) -> RunRecord:
    """
    One run: scan, build the map and extract a plan (timed), roll the plan out
    in the real scenario and score it. Strategy 0 instead alternates scanning
    and reactive Tasks.
    """
    cfg = cfg or SimConfig()
    robot = robot or RobotModel()
    scan_cfg = scan_cfg or ScanConfig(max_range=cfg.horizon)
    start = scenario.start(variant)
    record = RunRecord(scenario.name, strategy.index, variant, repetition, seed,
                       n_objects=0, n_states=0, planning_time=0.0, success=False)

    if not strategy.builds_map:
        trajectory, collided, elapsed, n_objects = _reactive_run(
            scenario, strategy, start, seed, cfg, robot, scan_cfg)
        record.trajectory, record.collided = trajectory, collided
        record.planning_time, record.n_objects = elapsed, n_objects
    else:
        cloud = synthesize_scan(scenario, start, scan_cfg, seed, robot)
        world = World((), start, scenario.goal, cloud)
        configurator = Configurator(world, strategy, scenario.goal, cfg, robot,
                                    **(planner_settings or {}))
        plan = None
        started = time.perf_counter()
        try:
            cmap = configurator.synthesize()
            plan = extract_plan(cmap, cfg)
        except StateSpaceExhausted as e:
            cmap = e.cognitive_map or configurator.map
            record.error = str(e)
        except NoPlan as e:
            cmap = configurator.map
            record.error = str(e)
        record.planning_time = time.perf_counter() - started
        configurator.report()
        record.n_objects = configurator.n_objects
        record.n_states = len(cmap)
        record.cognitive_map = cmap.to_dict(plan)
        record.trajectory = [start]
        if plan is not None:
            record.plan, record.n_motor = list(plan.states), list(plan.n_motor)
            ground = World(scenario.obstacles, start, scenario.goal)
            record.trajectory, record.collided = rollout(ground, cmap, plan, cfg, robot)

    record.success = ((record.has_plan or not strategy.builds_map)
                      and evaluate_success(scenario, record.trajectory, record.collided))
    logger.info("run finished", scenario=scenario.name, strategy=strategy.index,
                variant=variant, seed=seed, n_states=record.n_states,
                n_objects=record.n_objects, planning_time=round(record.planning_time, 4),
                success=record.success, error=record.error)
    return record


def run_suite(scenarios: Optional[Iterable[ScenarioSpec]] = None,
              strategies: Iterable[int] = STRATEGIES, repetitions: int = N_REPETITIONS,
              base_seed: int = 0, **kwargs) -> List[RunRecord]:
    """Every scenario x strategy x variant x repetition, run sequentially"""
    records = []
    for scenario in (builtin_scenarios() if scenarios is None else scenarios):
        for index in strategies:
            strategy = Strategy.from_index(index, scenario.d_sub)
            for variant in range(len(scenario.variants)):
                for rep in range(repetitions):
                    records.append(run_experiment(scenario, strategy, variant, base_seed + rep,
                                                  repetition=rep, **kwargs))
    logger.info("suite finished", n_runs=len(records),
                n_success=sum(r.success for r in records))
    return records
