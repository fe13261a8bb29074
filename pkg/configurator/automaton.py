"""
Hybrid automaton for Task switching: control modes, flows, invariants and
jump guards.
"""

import math
from dataclasses import dataclass
from enum import Enum
from typing import List, NamedTuple, Optional

from .core import Disturbance, DisturbanceKind, Pose2, RobotModel
from .errors import InvalidTask

# x_M below this counts as "target reached" for straight-drive Tasks
TARGET_TOLERANCE = 0.05
QUARTER_TURN = math.pi / 2


class ControlMode(Enum):
    H_S = "H_S"
    H_D = "H_D"
    H_L = "H_L"
    H_R = "H_R"

    @property
    def is_straight(self) -> bool:
        return self in (ControlMode.H_S, ControlMode.H_D)

    @property
    def is_turn(self) -> bool:
        return not self.is_straight


class Edge(NamedTuple):
    source: ControlMode
    target: ControlMode


# Static edge set K
_GUARDED_BY_COLLISION = (
    Edge(ControlMode.H_S, ControlMode.H_L),
    Edge(ControlMode.H_S, ControlMode.H_R),
    Edge(ControlMode.H_S, ControlMode.H_S),
    Edge(ControlMode.H_D, ControlMode.H_S),
    Edge(ControlMode.H_D, ControlMode.H_L),
    Edge(ControlMode.H_D, ControlMode.H_R),
)
_GUARDED_BY_CLEARANCE = (
    Edge(ControlMode.H_L, ControlMode.H_S),
    Edge(ControlMode.H_L, ControlMode.H_D),
    Edge(ControlMode.H_R, ControlMode.H_D),
    Edge(ControlMode.H_R, ControlMode.H_S),
)
_GUARDED_BY_EMPTY_DN = (Edge(ControlMode.H_S, ControlMode.H_D),)
EDGES = frozenset(_GUARDED_BY_COLLISION + _GUARDED_BY_CLEARANCE + _GUARDED_BY_EMPTY_DN)


class VelocityCommand(NamedTuple):
    linear: float
    angular: float


@dataclass(frozen=True)
class ContinuousState:
    """C = {D_I, D_N}"""
    d_i: Optional[Disturbance] = None
    d_n: Optional[Disturbance] = None

    @property
    def collided(self) -> bool:
        return self.d_n is not None and self.d_n.kind is DisturbanceKind.OBSTACLE_COLLIDED


@dataclass(frozen=True)
class TaskSpec:
    mode: ControlMode
    c: ContinuousState
    start: Pose2

    def __post_init__(self):
        if self.mode is ControlMode.H_D and self.c.d_i is not None:
            raise InvalidTask("H_D Tasks carry no initial disturbance")
        if self.c.d_i is not None and self.c.d_i.kind is DisturbanceKind.OBSTACLE_COLLIDED:
            raise InvalidTask("a Task cannot be contingent on a collided obstacle")


@dataclass
class TaskProgress:
    """Accumulated motion of a running Task"""
    turned: float = 0.0
    distance: float = 0.0
    d_i_view: Optional[Disturbance] = None
    obstacle_active: bool = True


def flow(mode: ControlMode, robot: RobotModel) -> VelocityCommand:
    if mode.is_straight:
        return VelocityCommand(robot.linear_speed, 0.0)
    if mode is ControlMode.H_L:
        return VelocityCommand(0.0, robot.angular_speed)
    return VelocityCommand(0.0, -robot.angular_speed)


def target_pending(d_view: Disturbance, tol: float = TARGET_TOLERANCE) -> bool:
    """A target still lies ahead of the robot"""
    return d_view.x > tol


def invariant_holds(mode: ControlMode, c: ContinuousState, progress: TaskProgress,
                    r: float = 1.0, tol: float = TARGET_TOLERANCE) -> bool:
    if c.d_n is not None:
        return False
    if mode.is_turn:
        return abs(progress.turned) < QUARTER_TURN - 1e-9
    if progress.distance >= r - 1e-9:
        return False
    if mode is ControlMode.H_D:
        return True
    if c.d_i is None:
        return False
    if c.d_i.kind is DisturbanceKind.TARGET:
        view = progress.d_i_view if progress.d_i_view is not None else c.d_i
        return target_pending(view, tol)
    return progress.obstacle_active


def obstacle_not_passed(d_view: Disturbance) -> bool:
    """Default straight-drive termination for obstacles: the far edge is still ahead"""
    return d_view.furthest_x() >= 0.0


def permitted_jumps(source: ControlMode, c: ContinuousState) -> List[Edge]:
    """
    Edges out of `source` whose guard holds for the end-of-Task state `c`.

    For turn sources `c.d_i` must already be cleared by the turn.
    """
    allowed = []
    for edge in _GUARDED_BY_COLLISION:
        if edge.source is source and not c.collided:
            allowed.append(edge)
    for edge in _GUARDED_BY_CLEARANCE:
        if edge.source is source and c.d_i is None and c.d_n is None:
            allowed.append(edge)
    for edge in _GUARDED_BY_EMPTY_DN:
        if edge.source is source and c.d_n is None:
            allowed.append(edge)
    return allowed
