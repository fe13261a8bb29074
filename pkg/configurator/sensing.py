"""
Simulated LiDAR, Task-specific point-cloud filtering and clustering of the
retained points into rectangular disturbances.
"""

import math
from dataclasses import dataclass, field, replace
from typing import List, Optional, Sequence

import numpy as np
from sklearn.cluster import DBSCAN

from .automaton import ControlMode
from .core import (
    Disturbance,
    DisturbanceKind,
    FrameTag,
    Pose2,
    Rect,
    RobotModel,
    bounding_box,
    obb_overlap,
    points_to_moving_frame,
    to_fixed_frame,
)
from .errors import RobotInCollision

# Lateral width of the straight-drive corridor
CORRIDOR_WIDTH = 0.2
# Side of the square retained around the centre of mass while turning
TURN_SQUARE = 0.39
# Points closer than this belong to the same object
CLUSTER_EPS = 0.1


@dataclass(frozen=True)
class ScanConfig:
    n_beams: int = 360
    max_range: float = 1.0
    noise_std: float = 0.0

    def __post_init__(self):
        if self.n_beams < 8:
            raise ValueError("n_beams must be >= 8")
        if self.max_range <= 0:
            raise ValueError("max_range must be > 0")
        if self.noise_std < 0:
            raise ValueError("noise_std must be >= 0")


@dataclass(frozen=True, eq=False)
class PointCloud:
    """
    (N, 2) array of points captured from `origin`.

    `labels` holds the scan-wide cluster of every point, in scan order; it
    follows the points through subset().
    """
    points: np.ndarray
    max_range: float
    origin: Pose2 = field(default_factory=lambda: Pose2(0.0, 0.0, 0.0))
    frame: FrameTag = FrameTag.FIXED
    labels: Optional[np.ndarray] = None

    def __len__(self) -> int:
        return len(self.points)

    @property
    def labelled(self) -> bool:
        return self.labels is not None

    def subset(self, mask: np.ndarray) -> "PointCloud":
        labels = None if self.labels is None else self.labels[mask]
        return replace(self, points=self.points[mask], labels=labels)


def _segments(rects: Sequence[Rect]) -> np.ndarray:
    """Edges of every rectangle as an (M, 2, 2) array of endpoints"""
    segs = []
    for rect in rects:
        corners = rect.corners()
        for i in range(4):
            segs.append((corners[i], corners[(i + 1) % 4]))
    return np.array(segs).reshape(-1, 2, 2)


def synthesize_scan(scenario, robot: Pose2, cfg: ScanConfig, seed: int,
                    robot_model: Optional[RobotModel] = None) -> PointCloud:
    """
    Cast `cfg.n_beams` rays from the robot against the scenario rectangles.

    Beams that hit nothing within max_range produce no point. Radial Gaussian
    noise is drawn from a generator seeded with `seed`.
    """
    robot_model = robot_model or RobotModel()
    obstacles = list(scenario.obstacles)
    footprint = robot_model.footprint(robot)
    for obstacle in obstacles:
        if obb_overlap(footprint, obstacle):
            raise RobotInCollision(
                f"robot at ({robot.x:.3f}, {robot.y:.3f}) overlaps scenario '{scenario.name}'"
            )
    if not obstacles:
        return PointCloud(np.empty((0, 2)), cfg.max_range, robot)

    angles = robot.theta + 2.0 * math.pi * np.arange(cfg.n_beams) / cfg.n_beams
    dirs = np.stack((np.cos(angles), np.sin(angles)), axis=1)
    segs = _segments(obstacles)
    origin = np.array([robot.x, robot.y])

    # Ray p + t*d against segment a + u*(b - a)
    a = segs[:, 0, :]
    e = segs[:, 1, :] - a
    ao = a - origin
    denom = dirs[:, None, 0] * e[None, :, 1] - dirs[:, None, 1] * e[None, :, 0]
    with np.errstate(divide="ignore", invalid="ignore"):
        t = (ao[None, :, 0] * e[None, :, 1] - ao[None, :, 1] * e[None, :, 0]) / denom
        u = (ao[None, :, 0] * dirs[:, None, 1] - ao[None, :, 1] * dirs[:, None, 0]) / denom
    valid = (np.abs(denom) > 1e-12) & (t >= 0) & (u >= 0) & (u <= 1)
    t = np.where(valid, t, np.inf)
    ranges = t.min(axis=1)

    if cfg.noise_std > 0:
        rng = np.random.default_rng(seed)
        ranges = ranges + rng.normal(0.0, cfg.noise_std, size=ranges.shape)

    hit = ranges <= cfg.max_range
    ranges = np.clip(ranges[hit], 0.0, cfg.max_range)
    points = origin + dirs[hit] * ranges[:, None]
    return PointCloud(points, cfg.max_range, robot)


def corridor_length(mode: ControlMode, d_i: Optional[Disturbance], r: float,
                    robot: RobotModel) -> float:
    """Forward reach of the straight-drive corridor for a Task"""
    if mode is ControlMode.H_S and d_i is not None and d_i.kind.is_obstacle:
        return d_i.furthest_x() + robot.width
    return r


def region(mode: ControlMode, d_i: Optional[Disturbance], r: float,
           robot: RobotModel) -> Rect:
    """Retained area for a Task, in the moving frame at Task start"""
    if mode in (ControlMode.H_L, ControlMode.H_R):
        return Rect(0.0, 0.0, 0.0, TURN_SQUARE, TURN_SQUARE)
    length = max(corridor_length(mode, d_i, r, robot), 0.0)
    return Rect(length / 2, 0.0, 0.0, length, CORRIDOR_WIDTH)


def filter_points(cloud: PointCloud, mode: ControlMode, d_i: Optional[Disturbance],
                  r: float, robot: RobotModel, origin: Optional[Pose2] = None) -> PointCloud:
    """
    Keep only the points relevant to a Task.

    `d_i` is expressed in the moving frame at Task start. When `origin` is
    given the cloud must be in the fixed frame and is transformed internally;
    otherwise it is already in the moving frame.
    """
    if origin is not None and cloud.frame is FrameTag.MOVING:
        raise ValueError("cloud is already in the moving frame")
    if len(cloud) == 0:
        return cloud
    local = points_to_moving_frame(origin, cloud.points) if origin is not None else cloud.points
    x, y = local[:, 0], local[:, 1]
    if mode in (ControlMode.H_L, ControlMode.H_R):
        half = TURN_SQUARE / 2
        mask = (np.abs(x) <= half) & (np.abs(y) <= half)
    else:
        length = corridor_length(mode, d_i, r, robot)
        mask = (x >= 0.0) & (x <= length) & (np.abs(y) <= CORRIDOR_WIDTH / 2)
    return cloud.subset(mask)


def label_clusters(cloud: PointCloud, eps: float = CLUSTER_EPS) -> PointCloud:
    """Single-linkage labels for the whole scan, computed once per scan"""
    if eps <= 0:
        raise ValueError("eps must be > 0")
    if cloud.labelled or len(cloud) == 0:
        return cloud
    return replace(cloud, labels=DBSCAN(eps=eps, min_samples=1).fit_predict(cloud.points))


def _pieces(labels: np.ndarray, points: np.ndarray, eps: Optional[float]) -> List[np.ndarray]:
    """
    Point indices per label, in order of first appearance. With `eps`, a label
    is also cut wherever two successive points in scan order are more than
    eps apart, so filtered-out parts of a cluster no longer join what is left.
    """
    pieces = []
    _, first = np.unique(labels, return_index=True)
    for label in labels[np.sort(first)]:
        idx = np.flatnonzero(labels == label)
        if eps is None or len(idx) == 1:
            pieces.append(idx)
            continue
        members = points[idx]
        gaps = np.linalg.norm(np.diff(members, axis=0), axis=1)
        runs = np.split(idx, np.flatnonzero(gaps > eps) + 1)
        # scan order wraps around at the first beam
        if len(runs) > 1 and np.linalg.norm(members[-1] - members[0]) <= eps:
            runs = [np.concatenate((runs[-1], runs[0]))] + runs[1:-1]
        pieces.extend(runs)
    return pieces


def cluster(cloud: PointCloud, eps: float = CLUSTER_EPS) -> List[Disturbance]:
    """
    Axis-aligned disturbances for the clusters of the cloud.

    An unlabelled cloud is clustered on the spot. A labelled one reuses its
    scan-wide labels, cut where filtering broke a cluster apart. Each box
    spans the extreme member points and is centred between them.
    """
    if eps <= 0:
        raise ValueError("eps must be > 0")
    if len(cloud) == 0:
        return []
    if cloud.labelled:
        pieces = _pieces(cloud.labels, cloud.points, eps)
    else:
        pieces = _pieces(label_clusters(cloud, eps).labels, cloud.points, None)
    disturbances = []
    for piece in pieces:
        x_min, x_max, y_min, y_max = bounding_box(cloud.points[piece])
        disturbances.append(Disturbance((x_min + x_max) / 2, (y_min + y_max) / 2, 0.0,
                                        x_max - x_min, y_max - y_min,
                                        DisturbanceKind.OBSTACLE_LOOMING))
    return disturbances


def perceive(cloud: PointCloud, mode: ControlMode, d_i_local: Optional[Disturbance],
             r: float, robot: RobotModel, origin: Pose2) -> List[Disturbance]:
    """
    Filter the fixed-frame cloud for a Task starting at `origin`, box the
    retained part of every cluster in the moving frame and return fixed-frame
    disturbances. A labelled cloud keeps its scan-wide clusters.
    """
    retained = filter_points(cloud, mode, d_i_local, r, robot, origin)
    if len(retained) == 0:
        return []
    local = replace(retained, points=points_to_moving_frame(origin, retained.points),
                    frame=FrameTag.MOVING)
    return [to_fixed_frame(origin, d) for d in cluster(local)]
