"""
Geometry shared by every module: poses, the robot model, rectangle-shaped
disturbances, frame changes and the oriented-rectangle overlap test.

Frames
------
The fixed frame is ego-centric to the real robot and stays put while the
cognitive map is built. The moving frame rides on the simulated robot's centre
of mass: x_M points along the heading, y_M to the left.
"""

import math
from dataclasses import dataclass, replace
from enum import Enum
from typing import Tuple

import numpy as np


def normalize_angle(theta: float) -> float:
    """Wrap an angle into (-pi, pi]"""
    if -math.pi < theta <= math.pi:
        return theta
    wrapped = math.fmod(theta + math.pi, 2.0 * math.pi)
    if wrapped <= 0.0:
        wrapped += 2.0 * math.pi
    return wrapped - math.pi


class FrameTag(Enum):
    """Frame a point cloud is expressed in"""
    FIXED = "fixed"
    MOVING = "moving"


class DisturbanceKind(Enum):
    """Collided obstacle (■), looming obstacle (□) or target (♥)"""
    OBSTACLE_COLLIDED = "collided"
    OBSTACLE_LOOMING = "looming"
    TARGET = "target"

    @property
    def is_obstacle(self) -> bool:
        return self is not DisturbanceKind.TARGET


@dataclass(frozen=True)
class Pose2:
    x: float
    y: float
    theta: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "theta", normalize_angle(self.theta))

    def distance_to(self, other: "Pose2") -> float:
        return math.hypot(other.x - self.x, other.y - self.y)

    def to_dict(self) -> dict:
        return {"x": self.x, "y": self.y, "theta": self.theta}

    @classmethod
    def from_dict(cls, data: dict) -> "Pose2":
        return cls(float(data["x"]), float(data["y"]), float(data.get("theta", 0.0)))


@dataclass(frozen=True)
class RobotModel:
    """Box-shaped robot whose centre of mass sits ahead of the box centroid"""
    length: float = 0.27
    width: float = 0.18
    com_forward_offset: float = 0.05
    linear_speed: float = 0.2
    angular_speed: float = math.pi / 4

    def __post_init__(self):
        for name in ("length", "width", "com_forward_offset", "linear_speed", "angular_speed"):
            if getattr(self, name) <= 0:
                raise ValueError(f"RobotModel.{name} must be > 0")
        if self.com_forward_offset >= self.length / 2:
            raise ValueError("com_forward_offset must be smaller than half the length")

    @property
    def front(self) -> float:
        """Forward reach of the box from the centre of mass"""
        return self.length / 2 - self.com_forward_offset

    @property
    def rear(self) -> float:
        """Backward reach of the box from the centre of mass"""
        return self.length / 2 + self.com_forward_offset

    def footprint(self, pose: Pose2) -> "Rect":
        """Robot rectangle in the frame the pose is expressed in"""
        cx = pose.x - self.com_forward_offset * math.cos(pose.theta)
        cy = pose.y - self.com_forward_offset * math.sin(pose.theta)
        return Rect(cx, cy, pose.theta, self.length, self.width)


@dataclass(frozen=True)
class Rect:
    """Oriented rectangle: w spans the local x axis, l the local y axis"""
    x: float
    y: float
    theta: float
    w: float
    l: float

    def corners(self) -> np.ndarray:
        c, s = math.cos(self.theta), math.sin(self.theta)
        hw, hl = self.w / 2, self.l / 2
        local = np.array([[hw, hl], [-hw, hl], [-hw, -hl], [hw, -hl]])
        rot = np.array([[c, -s], [s, c]])
        return local @ rot.T + np.array([self.x, self.y])

    def axes(self) -> np.ndarray:
        c, s = math.cos(self.theta), math.sin(self.theta)
        return np.array([[c, s], [-s, c]])

    @property
    def radius(self) -> float:
        return math.hypot(self.w, self.l) / 2


@dataclass(frozen=True)
class Disturbance(Rect):
    """Rectangle-shaped stimulus D = (x, y, theta, w, l) with its kind"""
    kind: DisturbanceKind = DisturbanceKind.OBSTACLE_LOOMING

    def __post_init__(self):
        if self.w < 0 or self.l < 0:
            raise ValueError("disturbance extents must be >= 0")

    def with_kind(self, kind: DisturbanceKind) -> "Disturbance":
        return replace(self, kind=kind)

    def furthest_x(self) -> float:
        return float(self.corners()[:, 0].max())

    def to_dict(self) -> dict:
        return {"x": self.x, "y": self.y, "theta": self.theta,
                "w": self.w, "l": self.l, "kind": self.kind.value}

    @classmethod
    def from_dict(cls, data: dict) -> "Disturbance":
        return cls(float(data["x"]), float(data["y"]), float(data.get("theta", 0.0)),
                   float(data["w"]), float(data["l"]),
                   DisturbanceKind(data.get("kind", DisturbanceKind.OBSTACLE_LOOMING.value)))


def to_moving_frame(pose: Pose2, d: Disturbance) -> Disturbance:
    """Express a fixed-frame disturbance relative to the robot's centre of mass"""
    dx, dy = d.x - pose.x, d.y - pose.y
    c, s = math.cos(pose.theta), math.sin(pose.theta)
    return replace(d, x=c * dx + s * dy, y=-s * dx + c * dy,
                   theta=normalize_angle(d.theta - pose.theta))


def to_fixed_frame(pose: Pose2, d: Disturbance) -> Disturbance:
    """Inverse of to_moving_frame"""
    c, s = math.cos(pose.theta), math.sin(pose.theta)
    return replace(d, x=pose.x + c * d.x - s * d.y, y=pose.y + s * d.x + c * d.y,
                   theta=normalize_angle(d.theta + pose.theta))


def points_to_moving_frame(origin: Pose2, points: np.ndarray) -> np.ndarray:
    """Rotate an (N, 2) array of fixed-frame points into the moving frame"""
    if len(points) == 0:
        return np.empty((0, 2))
    c, s = math.cos(origin.theta), math.sin(origin.theta)
    shifted = points - np.array([origin.x, origin.y])
    return shifted @ np.array([[c, -s], [s, c]])


def obb_overlap(a: Rect, b: Rect) -> bool:
    """
    Separating-axis test for two oriented rectangles.

    Touching rectangles count as overlapping.
    """
    if math.hypot(a.x - b.x, a.y - b.y) > a.radius + b.radius + 1e-12:
        return False
    corners_a, corners_b = a.corners(), b.corners()
    for axis in np.vstack((a.axes(), b.axes())):
        proj_a = corners_a @ axis
        proj_b = corners_b @ axis
        if proj_a.min() > proj_b.max() + 1e-12 or proj_b.min() > proj_a.max() + 1e-12:
            return False
    return True


def bounding_box(points: np.ndarray) -> Tuple[float, float, float, float]:
    """(x_min, x_max, y_min, y_max) of an (N, 2) array"""
    return (float(points[:, 0].min()), float(points[:, 0].max()),
            float(points[:, 1].min()), float(points[:, 1].max()))
