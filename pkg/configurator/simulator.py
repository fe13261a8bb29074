"""
Core knowledge: a deterministic kinematic simulator that advances one Task at a
time, reports collisions and looming obstacles, and carries the sliding
attention window.
"""

import math
from dataclasses import dataclass, field, replace
from typing import Callable, List, Optional, Tuple

from .automaton import (
    QUARTER_TURN,
    TARGET_TOLERANCE,
    ContinuousState,
    ControlMode,
    TaskProgress,
    TaskSpec,
    flow,
    invariant_holds,
    obstacle_not_passed,
    target_pending,
)
from .core import (
    Disturbance,
    DisturbanceKind,
    Pose2,
    Rect,
    RobotModel,
    obb_overlap,
    to_moving_frame,
)
from .errors import InvalidTask, NoGoal
from .sensing import CORRIDOR_WIDTH, PointCloud

ObstaclePolicy = Callable[[Disturbance], bool]


@dataclass(frozen=True)
class SimConfig:
    step: float = 0.1
    horizon: float = 1.0
    motor_rate: float = 10.0
    max_steps: int = 200

    def __post_init__(self):
        if self.step <= 0 or self.horizon <= 0 or self.motor_rate <= 0:
            raise ValueError("step, horizon and motor_rate must be > 0")
        if self.max_steps < 1:
            raise ValueError("max_steps must be >= 1")


@dataclass(frozen=True, eq=False)
class World:
    """Fixed-frame environment; `cloud` is the scan the obstacles came from"""
    obstacles: Tuple[Disturbance, ...]
    robot_pose: Pose2
    goal: Optional[Disturbance] = None
    cloud: Optional[PointCloud] = None

    def at(self, pose: Pose2, obstacles=None) -> "World":
        return replace(self, robot_pose=pose,
                       obstacles=tuple(self.obstacles if obstacles is None else obstacles))


@dataclass(frozen=True)
class SimResult:
    n_steps: int
    end_pose: Pose2
    displacement: Tuple[float, float]
    d_n: Optional[Disturbance]
    collided: bool
    d_i_after: Optional[Disturbance]
    counteracted: bool = False
    truncated: bool = False
    turned: float = 0.0
    poses: Tuple[Pose2, ...] = field(default_factory=tuple, compare=False)


@dataclass(frozen=True)
class AttentionWindow:
    """Axis-aligned box in the robot's moving frame; rides with the robot"""
    x_min: float
    x_max: float
    y_min: float
    y_max: float

    @property
    def rect(self) -> Rect:
        return Rect((self.x_min + self.x_max) / 2, (self.y_min + self.y_max) / 2, 0.0,
                    self.x_max - self.x_min, self.y_max - self.y_min)

    def at(self, pose: Pose2) -> Rect:
        """The window in the fixed frame while the robot is at `pose`"""
        local = self.rect
        c, s = math.cos(pose.theta), math.sin(pose.theta)
        return Rect(pose.x + c * local.x - s * local.y, pose.y + s * local.x + c * local.y,
                    pose.theta, local.w, local.l)


def make_attention_window(robot_pose: Pose2, goal: Optional[Disturbance],
                          robot: Optional[RobotModel] = None) -> AttentionWindow:
    """Smallest box around the robot footprint and the goal, in the moving frame"""
    if goal is None:
        raise NoGoal("the attention window needs a goal disturbance")
    robot = robot or RobotModel()
    footprint = robot.footprint(Pose2(0.0, 0.0, 0.0)).corners()
    goal_corners = to_moving_frame(robot_pose, goal).corners()
    xs = list(footprint[:, 0]) + list(goal_corners[:, 0])
    ys = list(footprint[:, 1]) + list(goal_corners[:, 1])
    return AttentionWindow(float(min(xs)), float(max(xs)), float(min(ys)), float(max(ys)))


def in_view(window: AttentionWindow, d_i: Disturbance) -> bool:
    """`d_i` must be in the same moving frame as the window"""
    return obb_overlap(window.rect, d_i)


def motor_duration(n_sim_steps: int, cfg: SimConfig) -> int:
    """Number of motor update intervals covering `n_sim_steps` simulation steps"""
    if n_sim_steps < 0:
        raise ValueError("n_sim_steps must be >= 0")
    return int(round(n_sim_steps * cfg.motor_rate * cfg.step))


def reconstruct_disturbance(d_i: Disturbance, world: World) -> World:
    """Add an initial disturbance missing from the world as a body at its pose"""
    if d_i in world.obstacles:
        return world
    return replace(world, obstacles=tuple(world.obstacles) + (d_i,))


def corridor_rect(pose: Pose2, length: float) -> Rect:
    """Fixed-frame straight-drive corridor starting at the centre of mass"""
    c, s = math.cos(pose.theta), math.sin(pose.theta)
    return Rect(pose.x + c * length / 2, pose.y + s * length / 2, pose.theta,
                length, CORRIDOR_WIDTH)


def _step(pose: Pose2, linear: float, angular: float, dt: float) -> Pose2:
    return Pose2(pose.x + linear * math.cos(pose.theta) * dt,
                 pose.y + linear * math.sin(pose.theta) * dt,
                 pose.theta + angular * dt)


def _reachable(obstacles, pose: Pose2, reach: float) -> List[Disturbance]:
    return [o for o in obstacles
            if o.kind.is_obstacle and math.hypot(o.x - pose.x, o.y - pose.y) <= reach + o.radius]


def simulate_task(world: World, task: TaskSpec, cfg: SimConfig,
                  robot: Optional[RobotModel] = None,
                  distance_limit: Optional[float] = None,
                  obstacle_policy: Optional[ObstaclePolicy] = None,
                  detect_looming: bool = True,
                  tol: float = TARGET_TOLERANCE) -> SimResult:
    """
    Integrate the flow of `task.mode` until the Task terminates.

    Stops at the first collision (no motion into the obstacle), when the mode
    invariant fails, at the distance limit, or when an obstacle that was not
    in the corridor at Task start enters it.
    """
    robot = robot or RobotModel()
    if task.start != world.robot_pose:
        raise InvalidTask("Task start must match the world's robot pose")
    mode, d_i = task.mode, task.c.d_i
    limit = cfg.horizon if distance_limit is None else min(cfg.horizon, distance_limit)
    command = flow(mode, robot)

    start = task.start
    body_reach = math.hypot(robot.rear, robot.width / 2)
    travel = limit if mode.is_straight else 0.0
    candidates = _reachable(world.obstacles, start, travel + body_reach)

    watch_looming = detect_looming and mode.is_straight
    known = set()
    if watch_looming:
        start_corridor = corridor_rect(start, cfg.horizon)
        known = {i for i, o in enumerate(world.obstacles)
                 if o.kind.is_obstacle and obb_overlap(start_corridor, o)}

    def track(pose: Pose2, progress: TaskProgress):
        if d_i is None:
            return
        progress.d_i_view = to_moving_frame(pose, d_i)
        if d_i.kind.is_obstacle:
            policy = obstacle_policy or obstacle_not_passed
            progress.obstacle_active = policy(progress.d_i_view)

    pose = start
    poses = [start]
    progress = TaskProgress()
    track(pose, progress)
    d_n: Optional[Disturbance] = None
    collided = False
    n_steps = 0

    while n_steps < cfg.max_steps:
        if not invariant_holds(mode, ContinuousState(d_i, d_n), progress, r=limit, tol=tol):
            break
        nxt = _step(pose, command.linear, command.angular, cfg.step)
        footprint = robot.footprint(nxt)
        for obstacle in candidates:
            if obb_overlap(footprint, obstacle):
                d_n = obstacle.with_kind(DisturbanceKind.OBSTACLE_COLLIDED)
                collided = True
                break
        if collided:
            break

        pose = nxt
        poses.append(pose)
        n_steps += 1
        progress.distance += abs(command.linear) * cfg.step
        progress.turned += command.angular * cfg.step
        track(pose, progress)

        if watch_looming:
            corridor = corridor_rect(pose, cfg.horizon)
            for i, obstacle in enumerate(world.obstacles):
                if i in known or not obstacle.kind.is_obstacle:
                    continue
                if obb_overlap(corridor, obstacle):
                    d_n = obstacle.with_kind(DisturbanceKind.OBSTACLE_LOOMING)
                    break
            if d_n is not None:
                break

    counteracted = False
    if not collided and d_n is None:
        if mode.is_turn:
            counteracted = abs(progress.turned) >= QUARTER_TURN - 1e-9
        elif d_i is not None and mode is ControlMode.H_S:
            if d_i.kind is DisturbanceKind.TARGET:
                counteracted = not target_pending(progress.d_i_view, tol)
            else:
                counteracted = not progress.obstacle_active
    truncated = (mode.is_straight and not collided and d_n is None and not counteracted
                 and limit < cfg.horizon and progress.distance >= limit - 1e-9)

    return SimResult(
        n_steps=n_steps,
        end_pose=pose,
        displacement=(pose.x - start.x, pose.y - start.y),
        d_n=d_n,
        collided=collided,
        d_i_after=None if counteracted else d_i,
        counteracted=counteracted,
        truncated=truncated,
        turned=progress.turned,
        poses=tuple(poses),
    )


def execute_motor_command(world: World, pose: Pose2, mode: ControlMode, n_steps: int,
                          cfg: SimConfig, robot: Optional[RobotModel] = None
                          ) -> Tuple[List[Pose2], Optional[Disturbance]]:
    """
    Drive open-loop with the velocities of `mode` for `n_steps` steps.

    Returns the visited poses and the obstacle hit, if any; motion stops at
    the first contact.
    """
    robot = robot or RobotModel()
    command = flow(mode, robot)
    poses = []
    for _ in range(n_steps):
        nxt = _step(pose, command.linear, command.angular, cfg.step)
        footprint = robot.footprint(nxt)
        for obstacle in world.obstacles:
            if obstacle.kind.is_obstacle and obb_overlap(footprint, obstacle):
                return poses, obstacle.with_kind(DisturbanceKind.OBSTACLE_COLLIDED)
        pose = nxt
        poses.append(pose)
    return poses, None
