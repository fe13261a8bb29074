"""
The Configurator: synthesis of the cognitive map by best-first unwinding of the
hybrid automaton, cost functions, disturbance shift and state split, resets,
plan extraction and the reactive baseline.

Disturbances stored in a PlanState are expressed in the moving frame at the
end of the Task the state summarises. Disturbances handed to the simulator are
in the fixed frame.
"""

import heapq
import math
import time
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from .automaton import (
    TARGET_TOLERANCE,
    ContinuousState,
    ControlMode,
    Edge,
    TaskSpec,
    VelocityCommand,
    flow,
    obstacle_not_passed,
    permitted_jumps,
    target_pending,
)
from .core import (
    Disturbance,
    DisturbanceKind,
    Pose2,
    RobotModel,
    obb_overlap,
    to_fixed_frame,
    to_moving_frame,
)
from .errors import (
    NoPlan,
    NotSplittable,
    StateSpaceExhausted,
    UndefinedReset,
    UnsupportedStrategy,
)
from .logging_setup import get_module_logger
from .sensing import label_clusters, perceive, region
from .simulator import (
    AttentionWindow,
    SimConfig,
    SimResult,
    World,
    in_view,
    make_attention_window,
    motor_duration,
    reconstruct_disturbance,
    simulate_task,
)

logger = get_module_logger("planner")

# Cost constants, distances relative to the horizon r
THETA_OBSTACLE = math.pi / 2
THETA_MAX = math.pi
COLLISION_PENALTY = 2.0
MAX_GAMMA = 6.0
MAX_CHI = 4.0

DEFAULT_STATE_CAP = 500
GOAL_TOLERANCE = 0.15


class StrategyKind(Enum):
    S0_REACTIVE = 0
    S1_VANILLA = 1
    S2_STEP_WISE = 2
    S3_SPLIT_ONLY = 3
    S4_SPLIT_WINDOW = 4


@dataclass(frozen=True)
class Strategy:
    """Map-building policy: which reset, step-wise truncation and split apply"""
    kind: StrategyKind
    d_sub: float = 0.5

    def __post_init__(self):
        if self.kind is not StrategyKind.S1_VANILLA and self.d_sub <= 0:
            raise ValueError(f"{self.kind.name} needs d_sub > 0")

    @classmethod
    def from_index(cls, index: int, d_sub: float) -> "Strategy":
        return cls(StrategyKind(int(index)), d_sub)

    @property
    def index(self) -> int:
        return self.kind.value

    @property
    def builds_map(self) -> bool:
        return self.kind is not StrategyKind.S0_REACTIVE

    @property
    def step_wise(self) -> bool:
        return self.kind is StrategyKind.S2_STEP_WISE

    @property
    def splits(self) -> bool:
        return self.kind in (StrategyKind.S3_SPLIT_ONLY, StrategyKind.S4_SPLIT_WINDOW)

    @property
    def uses_window(self) -> bool:
        return self.kind is StrategyKind.S4_SPLIT_WINDOW


# =============================================================================
# STATES AND MAP
# =============================================================================

@dataclass(frozen=True)
class PlanState:
    """
    Summary q of one simulated Task.

    v0 is the Task's start pose and vd its displacement, both in the fixed
    frame; `dtheta` is the heading change. `hindsight` holds an obstacle a
    child collided with, re-read as looming from this state.
    """
    id: int
    mode: ControlMode
    d_i: Optional[Disturbance]
    d_n: Optional[Disturbance]
    v0: Pose2
    vd: Tuple[float, float]
    n_steps: int
    gamma: float
    chi: float
    phi: float
    parent: Optional[int]
    dtheta: float = 0.0
    counteracted: bool = False
    truncated: bool = False
    split_from: Optional[int] = None
    hindsight: Optional[Disturbance] = None
    terminal: bool = False

    @property
    def collided(self) -> bool:
        return self.d_n is not None and self.d_n.kind is DisturbanceKind.OBSTACLE_COLLIDED

    @property
    def length(self) -> float:
        return math.hypot(*self.vd)

    def label(self) -> Tuple[Tuple[float, float], Tuple[float, float]]:
        """lambda(q) = (v0, vd)"""
        return (self.v0.x, self.v0.y), self.vd

    def end_pose(self) -> Pose2:
        return Pose2(self.v0.x + self.vd[0], self.v0.y + self.vd[1], self.v0.theta + self.dtheta)

    def fixed(self, d: Optional[Disturbance]) -> Optional[Disturbance]:
        """A disturbance of this state back in the fixed frame"""
        return None if d is None else to_fixed_frame(self.end_pose(), d)

    def to_dict(self) -> dict:
        def dist(d):
            return None if d is None else d.to_dict()
        return {
            "id": self.id,
            "mode": self.mode.value,
            "d_i": dist(self.d_i),
            "d_n": dist(self.d_n),
            "v0": self.v0.to_dict(),
            "vd": list(self.vd),
            "dtheta": self.dtheta,
            "n_steps": self.n_steps,
            "gamma": self.gamma,
            "chi": self.chi,
            "phi": self.phi,
            "parent": self.parent,
            "counteracted": self.counteracted,
            "truncated": self.truncated,
            "split_from": self.split_from,
            "hindsight": dist(self.hindsight),
            "terminal": self.terminal,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "PlanState":
        def dist(d):
            return None if d is None else Disturbance.from_dict(d)
        return cls(
            id=data["id"], mode=ControlMode(data["mode"]), d_i=dist(data["d_i"]),
            d_n=dist(data["d_n"]), v0=Pose2.from_dict(data["v0"]), vd=tuple(data["vd"]),
            n_steps=data["n_steps"], gamma=data["gamma"], chi=data["chi"], phi=data["phi"],
            parent=data["parent"], dtheta=data.get("dtheta", 0.0),
            counteracted=data.get("counteracted", False), truncated=data.get("truncated", False),
            split_from=data.get("split_from"), hindsight=dist(data.get("hindsight")),
            terminal=data.get("terminal", False),
        )


@dataclass
class CognitiveMap:
    """Rooted graph (Q, ↪) of PlanStates; state ids are list positions"""
    states: List[PlanState] = field(default_factory=list)
    edges: List[Tuple[int, int]] = field(default_factory=list)
    goal: Optional[Disturbance] = None
    strategy: Optional[str] = None

    root = 0

    def __len__(self) -> int:
        return len(self.states)

    def __getitem__(self, index: int) -> PlanState:
        return self.states[index]

    def add(self, state: PlanState, parent: Optional[int] = None) -> PlanState:
        state = replace(state, id=len(self.states), parent=parent)
        self.states.append(state)
        if parent is not None:
            self.edges.append((parent, state.id))
        return state

    def update(self, state: PlanState) -> PlanState:
        self.states[state.id] = state
        return state

    def pre(self, index: int) -> List[int]:
        return [p for p, c in self.edges if c == index]

    def post(self, index: int) -> List[int]:
        return [c for p, c in self.edges if p == index]

    def path_to(self, index: int) -> List[int]:
        path = [index]
        while self.states[path[-1]].parent is not None:
            path.append(self.states[path[-1]].parent)
        return path[::-1]

    def is_path(self, sequence: Sequence[int]) -> bool:
        if not sequence or sequence[0] != self.root:
            return False
        linked = set(self.edges)
        return all((a, b) in linked for a, b in zip(sequence, sequence[1:]))

    def to_dict(self, plan: Optional["Plan"] = None) -> dict:
        on_plan = set(plan.states) if plan is not None else set()
        return {
            "strategy": self.strategy,
            "goal": None if self.goal is None else self.goal.to_dict(),
            "states": [dict(s.to_dict(), psi=int(s.id in on_plan)) for s in self.states],
            "edges": [list(e) for e in self.edges],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "CognitiveMap":
        goal = data.get("goal")
        return cls(
            states=[PlanState.from_dict(s) for s in data["states"]],
            edges=[tuple(e) for e in data["edges"]],
            goal=None if goal is None else Disturbance.from_dict(goal),
            strategy=data.get("strategy"),
        )


@dataclass(frozen=True)
class Plan:
    """Root-to-q_n path with the motor duration of every state"""
    states: Tuple[int, ...]
    n_motor: Tuple[int, ...]

    def psi(self, cmap: CognitiveMap) -> Dict[int, int]:
        on_plan = set(self.states)
        return {s.id: int(s.id in on_plan) for s in cmap.states}

    def motor_commands(self, cmap: CognitiveMap, robot: Optional[RobotModel] = None
                       ) -> List[Tuple[ControlMode, VelocityCommand, int]]:
        """(mode, velocities, motor intervals) for every Task after the root"""
        robot = robot or RobotModel()
        return [(cmap[i].mode, flow(cmap[i].mode, robot), n)
                for i, n in zip(self.states[1:], self.n_motor[1:])]


# =============================================================================
# COSTS, SHIFT, SPLIT, RESETS
# =============================================================================

def _gamma_value(d_n: Optional[Disturbance], horizon: float) -> float:
    if d_n is None:
        return 0.0
    d_max = 2.0 * horizon
    numerator = (abs((horizon - math.hypot(d_n.x, d_n.y)) / d_max)
                 + abs((THETA_OBSTACLE - abs(d_n.theta)) / THETA_MAX))
    if d_n.kind is DisturbanceKind.OBSTACLE_COLLIDED:
        numerator += COLLISION_PENALTY
    return numerator / MAX_GAMMA


def _chi_value(goal: Optional[Disturbance], horizon: float) -> float:
    if goal is None:
        return 0.0
    d_max = 2.0 * horizon
    return (abs(math.hypot(goal.x, goal.y) / d_max) + abs(abs(goal.theta) / THETA_MAX)) / MAX_CHI


def gamma(q: PlanState, horizon: float = 1.0) -> float:
    """Past cost: closeness to the obstacle met, plus a penalty on collision"""
    return _gamma_value(q.d_n, horizon)


def chi(q: PlanState, goal: Optional[Disturbance], horizon: float = 1.0) -> float:
    """Heuristic cost to the goal; `goal` is in the moving frame at q's end"""
    return _chi_value(goal, horizon)


def shift(d: Disturbance, v: Tuple[float, float]) -> Disturbance:
    return replace(d, x=d.x + v[0], y=d.y + v[1])


def split(q: PlanState, d_sub: float, goal: Optional[Disturbance] = None,
          horizon: float = 1.0) -> List[PlanState]:
    """
    Break a collided straight-drive state into sub-states d_sub apart.

    The first sub-state keeps q's id and parent; later ones carry id -1 and
    chain onto their predecessor when added to a map. Sub-states short of the
    collision see the obstacle as looming, the last keeps the collision.
    `goal` is in the fixed frame.
    """
    if not q.mode.is_straight:
        raise NotSplittable(f"state q{q.id} is a {q.mode.value} turn")
    if not q.collided:
        return [q]
    total = q.length
    n_full = int(math.floor(total / d_sub + 1e-12))
    segments = [d_sub] * n_full
    remainder = total - n_full * d_sub
    if remainder > 1e-9:
        segments.append(remainder)
    if len(segments) <= 1:
        return [q]

    # cumulative rounding keeps the step counts summing to q.n_steps
    bounds = np.round(np.cumsum([0.0] + segments) * q.n_steps / total).astype(int)
    steps = [int(s) for s in np.diff(bounds)]
    ux, uy = q.vd[0] / total, q.vd[1] / total
    subs = []
    travelled = 0.0
    for k, seg in enumerate(segments):
        start = travelled
        travelled += seg
        last = k == len(segments) - 1
        ahead = (total - travelled, 0.0)
        d_n = shift(q.d_n, ahead)
        if not last:
            d_n = d_n.with_kind(DisturbanceKind.OBSTACLE_LOOMING)
        d_i = shift(q.d_i, ahead) if q.d_i is not None else None
        v0 = Pose2(q.v0.x + ux * start, q.v0.y + uy * start, q.v0.theta)
        vd = (ux * seg, uy * seg)
        end = Pose2(v0.x + vd[0], v0.y + vd[1], v0.theta)
        g = _gamma_value(d_n, horizon)
        c = _chi_value(None if goal is None else to_moving_frame(end, goal), horizon)
        subs.append(replace(
            q, id=q.id if k == 0 else -1, parent=q.parent if k == 0 else None,
            d_i=d_i, d_n=d_n, v0=v0, vd=vd,
            n_steps=steps[k],
            gamma=g, chi=c, phi=g + c, counteracted=False, truncated=False,
            split_from=q.id, hindsight=None, terminal=False,
        ))
    return subs


def reset_basic(c_end: ContinuousState, goal: Optional[Disturbance]) -> Optional[Disturbance]:
    """Next initial disturbance: the looming obstacle met, else the goal"""
    if c_end.collided:
        raise UndefinedReset("no reset out of a collided state")
    if c_end.d_n is not None:
        return c_end.d_n
    return goal


def reset_window(c_end: ContinuousState, goal: Optional[Disturbance],
                 window: AttentionWindow) -> Optional[Disturbance]:
    """
    Reset using the attention window: keep counteracting the previous initial
    disturbance while it overlaps the window. All arguments share the moving
    frame at the next Task's start.
    """
    if c_end.collided:
        raise UndefinedReset("no reset out of a collided state")
    if c_end.d_n is not None:
        return c_end.d_n
    if c_end.d_i is not None and c_end.d_i.kind.is_obstacle and in_view(window, c_end.d_i):
        return c_end.d_i
    return goal


# =============================================================================
# PERCEPTION PER TASK
# =============================================================================

def build_task_world(world: World, start: Pose2, mode: ControlMode,
                     d_i: Optional[Disturbance], cfg: SimConfig,
                     robot: RobotModel) -> World:
    """
    The bodies a Task is simulated with: the scan filtered for the Task and
    clustered, or the world's obstacles inside the Task's area when no scan
    is attached, plus the initial disturbance when it is not represented.
    """
    d_local = None if d_i is None else to_moving_frame(start, d_i)
    if world.cloud is not None:
        obstacles = perceive(world.cloud, mode, d_local, cfg.horizon, robot, start)
    else:
        area = to_fixed_frame(start, region(mode, d_local, cfg.horizon, robot))
        obstacles = [o for o in world.obstacles if obb_overlap(area, o)]
    task_world = world.at(start, obstacles)
    if d_i is not None:
        represented = d_i.kind.is_obstacle and any(obb_overlap(d_i, o) for o in obstacles)
        if not represented:
            task_world = reconstruct_disturbance(d_i, task_world)
    return task_world


# =============================================================================
# SYNTHESIS
# =============================================================================

class Configurator:
    """
    Builds the cognitive map for one world, goal and strategy.

    Frontier states are expanded in order of least phi; ties go to the lower
    state id. A successor behind a turn is chained straight away, so every
    state pushed to the queue is a straight drive.
    """

    def __init__(self, world: World, strategy: Strategy, goal: Optional[Disturbance] = None,
                 cfg: Optional[SimConfig] = None, robot: Optional[RobotModel] = None,
                 state_cap: int = DEFAULT_STATE_CAP, goal_tolerance: float = GOAL_TOLERANCE,
                 target_tolerance: float = TARGET_TOLERANCE):
        if not strategy.builds_map:
            raise UnsupportedStrategy(f"{strategy.kind.name} does not build a cognitive map")
        self.world = world
        self.strategy = strategy
        self.goal = goal
        self.cfg = cfg or SimConfig()
        self.robot = robot or RobotModel()
        self.state_cap = state_cap
        self.goal_tolerance = goal_tolerance
        self.target_tolerance = target_tolerance

        self.map = CognitiveMap(goal=goal, strategy=strategy.kind.name)
        self.n_objects = 0
        self.expansion_log: List[Tuple[int, float, float]] = []
        self.reached: Optional[int] = None
        self._queue: List[Tuple[float, int]] = []
        self._closed = set()
        self._origin = world.robot_pose
        self.elapsed = 0.0

    # -- helpers -------------------------------------------------------------

    def _goal_local(self, pose: Pose2) -> Optional[Disturbance]:
        return None if self.goal is None else to_moving_frame(pose, self.goal)

    def _is_terminal(self, q: PlanState) -> bool:
        if q.d_n is not None or not q.mode.is_straight or q.n_steps == 0:
            return False
        end = q.end_pose()
        if self.goal is not None:
            goal = to_moving_frame(end, self.goal)
            return math.hypot(goal.x, goal.y) <= self.goal_tolerance
        return self._origin.distance_to(end) >= self.cfg.horizon - self.target_tolerance

    def _obstacle_policy(self, start: Pose2) -> Callable[[Disturbance], bool]:
        if self.strategy.uses_window and self.goal is not None:
            window = make_attention_window(start, self.goal, self.robot)
            return lambda view: in_view(window, view)
        return obstacle_not_passed

    def _simulate(self, start: Pose2, mode: ControlMode, d_i: Optional[Disturbance],
                  distance_limit: Optional[float] = None) -> SimResult:
        task_world = build_task_world(self.world, start, mode, d_i, self.cfg, self.robot)
        self.n_objects += len(task_world.obstacles) + 1
        task = TaskSpec(mode, ContinuousState(d_i, None), start)
        return simulate_task(task_world, task, self.cfg, self.robot,
                             distance_limit=distance_limit,
                             obstacle_policy=self._obstacle_policy(start),
                             tol=self.target_tolerance)

    def _record(self, mode: ControlMode, d_i: Optional[Disturbance], start: Pose2,
                result: SimResult, parent: Optional[int]) -> PlanState:
        end = result.end_pose
        d_i_local = None if d_i is None else to_moving_frame(end, d_i)
        d_n_local = None if result.d_n is None else to_moving_frame(end, result.d_n)
        g = _gamma_value(d_n_local, self.cfg.horizon)
        c = _chi_value(self._goal_local(end), self.cfg.horizon)
        state = PlanState(
            id=-1, mode=mode, d_i=d_i_local, d_n=d_n_local, v0=start,
            vd=result.displacement, n_steps=result.n_steps, gamma=g, chi=c, phi=g + c,
            parent=parent, dtheta=result.turned, counteracted=result.counteracted,
            truncated=result.truncated,
        )
        state = replace(state, terminal=self._is_terminal(state))
        return self.map.add(state, parent)

    def _effective_dn(self, q: PlanState) -> Optional[Disturbance]:
        return q.d_n if q.d_n is not None else q.hindsight

    def _guard_state(self, q: PlanState) -> ContinuousState:
        cleared = q.counteracted or q.d_i is None
        return ContinuousState(None if cleared else q.d_i, self._effective_dn(q))

    def _next_initial(self, q: PlanState) -> Optional[Disturbance]:
        """Reset across an edge out of q, in the moving frame at q's end"""
        c_end = ContinuousState(q.d_i, self._effective_dn(q))
        goal = self._goal_local(q.end_pose())
        if self.strategy.uses_window and self.goal is not None:
            window = make_attention_window(q.end_pose(), self.goal, self.robot)
            return reset_window(c_end, goal, window)
        return reset_basic(c_end, goal)

    def _straight_choice(self, start: Pose2, d_i_local: Optional[Disturbance]
                         ) -> Tuple[ControlMode, Optional[Disturbance]]:
        """H_S when there is something ahead to counteract, H_D otherwise"""
        if d_i_local is None:
            return ControlMode.H_D, None
        if d_i_local.kind is DisturbanceKind.TARGET:
            if target_pending(d_i_local, self.target_tolerance):
                return ControlMode.H_S, d_i_local
            return ControlMode.H_D, None
        if self._obstacle_policy(start)(d_i_local):
            return ControlMode.H_S, d_i_local
        return ControlMode.H_D, None

    def _mark_hindsight(self, parent_id: Optional[int], collided: PlanState):
        if parent_id is None:
            return
        parent = self.map[parent_id]
        if parent.d_n is not None or parent.hindsight is not None:
            return
        obstacle = to_moving_frame(parent.end_pose(), collided.fixed(collided.d_n))
        self.map.update(replace(parent, hindsight=obstacle.with_kind(DisturbanceKind.OBSTACLE_LOOMING)))

    def _push(self, q: PlanState):
        heapq.heappush(self._queue, (q.phi, q.id))

    def _settle_straight(self, q: PlanState):
        """Hindsight, split and queueing for a freshly simulated straight drive"""
        if not q.collided:
            self._push(q)
            return
        self._mark_hindsight(q.parent, q)
        if not self.strategy.splits:
            return
        subs = split(q, self.strategy.d_sub, self.goal, self.cfg.horizon)
        if len(subs) == 1:
            return
        head = self.map.update(replace(subs[0], terminal=self._is_terminal(subs[0])))
        chain = [head]
        for sub in subs[1:]:
            added = self.map.add(sub, chain[-1].id)
            chain.append(self.map.update(replace(added, terminal=self._is_terminal(added))))
        for sub in chain:
            if not sub.collided:
                self._push(sub)
        logger.debug("state split", state=q.id, parts=len(chain))

    def _drive(self, source: PlanState, d_i_local: Optional[Disturbance],
               mode: Optional[ControlMode] = None) -> Optional[PlanState]:
        """Simulate and record a straight drive following `source`"""
        start = source.end_pose()
        if mode is None:
            mode, d_i_local = self._straight_choice(start, d_i_local)
            allowed = permitted_jumps(source.mode, self._guard_state(source))
            if Edge(source.mode, mode) not in allowed:
                return None
        d_i = None if d_i_local is None else to_fixed_frame(start, d_i_local)
        limit = self.strategy.d_sub if self.strategy.step_wise else None
        result = self._simulate(start, mode, d_i, limit)
        if result.n_steps == 0 and not result.collided:
            return None
        state = self._record(mode, d_i, start, result, source.id)
        self._settle_straight(state)
        return state

    def _turn_chain(self, source: PlanState, mode: ControlMode):
        source = self.map[source.id]
        if Edge(source.mode, mode) not in permitted_jumps(source.mode, self._guard_state(source)):
            return
        start = source.end_pose()
        d_i_local = self._next_initial(source)
        d_i = None if d_i_local is None else to_fixed_frame(start, d_i_local)
        result = self._simulate(start, mode, d_i)
        turn = self._record(mode, d_i, start, result, source.id)
        if turn.collided:
            self._mark_hindsight(source.id, turn)
            return
        self._drive(turn, self._next_initial(turn))

    def _expand(self, q: PlanState):
        if self.strategy.step_wise and q.truncated:
            straight = self._drive(q, q.d_i, mode=q.mode)
        else:
            straight = self._drive(q, self._next_initial(q))
        # nothing left to counteract once the straight drive ends the plan
        if straight is not None and self.map[straight.id].terminal:
            return
        self._turn_chain(q, ControlMode.H_L)
        self._turn_chain(q, ControlMode.H_R)

    def _closed_key(self, q: PlanState) -> tuple:
        end = q.end_pose()
        d_i = q.fixed(q.d_i)
        d_key = None if d_i is None else (d_i.kind.value, round(d_i.x, 3), round(d_i.y, 3))
        return (q.mode.is_straight, round(end.x, 3), round(end.y, 3), round(end.theta, 3), d_key)

    # -- main loop -----------------------------------------------------------

    def synthesize(self) -> CognitiveMap:
        started = time.perf_counter()
        if self.world.cloud is not None:
            self.world = replace(self.world, cloud=label_clusters(self.world.cloud))
        root = PlanState(
            id=0, mode=ControlMode.H_S, d_i=None, d_n=None, v0=self._origin, vd=(0.0, 0.0),
            n_steps=0, gamma=0.0, chi=0.0, phi=0.0, parent=None,
        )
        c = _chi_value(self._goal_local(self._origin), self.cfg.horizon)
        root = self.map.add(replace(root, chi=c, phi=c))
        self._push(root)

        while self._queue:
            phi, index = heapq.heappop(self._queue)
            remaining = min((p for p, _ in self._queue), default=math.inf)
            self.expansion_log.append((index, phi, remaining))
            q = self.map[index]
            if q.terminal:
                self.reached = index
                break
            key = self._closed_key(q)
            if key in self._closed:
                continue
            self._closed.add(key)
            self._expand(q)
            if len(self.map) >= self.state_cap:
                break

        self.elapsed = time.perf_counter() - started
        if self.reached is None and self.goal is not None and len(self.map) >= self.state_cap:
            raise StateSpaceExhausted(
                f"{self.strategy.kind.name}: {len(self.map)} states without reaching the goal",
                cognitive_map=self.map,
            )
        return self.map

    def report(self):
        """Log the outcome of the last synthesize() call"""
        logger.info("cognitive map synthesized", strategy=self.strategy.kind.name,
                    n_states=len(self.map), n_objects=self.n_objects,
                    reached=self.reached, elapsed_s=round(self.elapsed, 4))


def synthesize(world: World, strategy: Strategy, goal: Optional[Disturbance] = None,
               cfg: Optional[SimConfig] = None, **kwargs) -> CognitiveMap:
    """Synthesis of the cognitive map for `world`, see Configurator"""
    configurator = Configurator(world, strategy, goal, cfg, **kwargs)
    try:
        return configurator.synthesize()
    finally:
        configurator.report()


def extract_plan(cmap: CognitiveMap, cfg: Optional[SimConfig] = None) -> Plan:
    """
    Guard: the plan ends at the least-phi state. States meeting the goal
    criterion are preferred; without any, the least-phi non-root state is
    used and must neither be collided nor fall short of an existing goal.
    """
    cfg = cfg or SimConfig()
    if not cmap.states:
        raise NoPlan("empty cognitive map")
    candidates = ([s for s in cmap.states if s.terminal]
                  or cmap.states[cmap.root + 1:] or cmap.states)
    last = min(candidates, key=lambda s: (s.phi, s.id))
    if last.collided:
        raise NoPlan(f"least-cost state q{last.id} ends in a collision")
    if cmap.goal is not None and not last.terminal:
        raise NoPlan(f"no state reaches the goal (best: q{last.id}, phi={last.phi:.3f})")
    path = cmap.path_to(last.id)
    return Plan(tuple(path), tuple(motor_duration(cmap[i].n_steps, cfg) for i in path))


# =============================================================================
# STRATEGY 0
# =============================================================================

class ReactiveAgent:
    """One Task at a time: turn away from obstacles, towards targets"""

    def __init__(self, goal: Optional[Disturbance], d_sub: float, cfg: Optional[SimConfig] = None,
                 robot: Optional[RobotModel] = None, target_tolerance: float = TARGET_TOLERANCE):
        self.goal = goal
        self.d_sub = d_sub
        self.cfg = cfg or SimConfig()
        self.robot = robot or RobotModel()
        self.target_tolerance = target_tolerance
        self.n_objects = 0

    def step(self, world: World) -> TaskSpec:
        pose = world.robot_pose
        goal_local = None if self.goal is None else to_moving_frame(pose, self.goal)
        if goal_local is not None and target_pending(goal_local, self.target_tolerance):
            straight = TaskSpec(ControlMode.H_S, ContinuousState(self.goal, None), pose)
        else:
            straight = TaskSpec(ControlMode.H_D, ContinuousState(), pose)

        task_world = build_task_world(world, pose, straight.mode, straight.c.d_i,
                                      self.cfg, self.robot)
        self.n_objects += len(task_world.obstacles) + 1
        result = simulate_task(task_world, straight, self.cfg, self.robot,
                               distance_limit=self.d_sub, detect_looming=False,
                               tol=self.target_tolerance)
        if result.collided:
            lateral = to_moving_frame(pose, result.d_n).y
            mode = ControlMode.H_R if lateral > 0 else ControlMode.H_L
            obstacle = result.d_n.with_kind(DisturbanceKind.OBSTACLE_LOOMING)
            return TaskSpec(mode, ContinuousState(obstacle, None), pose)
        if goal_local is not None and not target_pending(goal_local, self.target_tolerance):
            mode = ControlMode.H_L if goal_local.y > 0 else ControlMode.H_R
            return TaskSpec(mode, ContinuousState(self.goal, None), pose)
        return straight


def reactive_step(world: World, goal: Optional[Disturbance], d_sub: float,
                  cfg: Optional[SimConfig] = None, **kwargs) -> TaskSpec:
    return ReactiveAgent(goal, d_sub, cfg, **kwargs).step(world)
