"""
Tests du simulateur cinématique, de la fenêtre d'attention et des durées
moteur.
"""

import math
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent.parent.parent))
from conftest import get_module_logger  # noqa: E402

from configurator.automaton import ContinuousState, ControlMode, TaskSpec  # noqa: E402
from configurator.core import Disturbance, DisturbanceKind, Pose2  # noqa: E402
from configurator.errors import InvalidTask, NoGoal  # noqa: E402
from configurator.simulator import (  # noqa: E402
    SimConfig,
    World,
    execute_motor_command,
    in_view,
    make_attention_window,
    motor_duration,
    reconstruct_disturbance,
    simulate_task,
)

logger = get_module_logger('test_simulator')

ORIGIN = Pose2(0.0, 0.0, 0.0)
GOAL = Disturbance(1.0, 0.0, 0.0, 0.1, 0.1, DisturbanceKind.TARGET)


def _task(mode, d_i=None, start=ORIGIN):
    return TaskSpec(mode, ContinuousState(d_i, None), start)


class TestSimulateTask:
    def test01_drive_to_horizon(self, sim_config):
        result = simulate_task(World((), ORIGIN), _task(ControlMode.H_D), sim_config)
        assert result.n_steps == 50
        assert result.displacement == pytest.approx((1.0, 0.0), abs=1e-9)
        assert not result.collided and result.d_n is None

    def test02_quarter_turn(self, sim_config):
        result = simulate_task(World((), ORIGIN), _task(ControlMode.H_L), sim_config)
        assert result.n_steps == 20
        assert result.end_pose.theta == pytest.approx(math.pi / 2, abs=1e-9)
        assert result.counteracted
        assert result.displacement == pytest.approx((0.0, 0.0))

    def test03_wall_ahead(self, sim_config, robot):
        """Mur à 0.3 m : collision, aucun mouvement dans l'obstacle"""
        wall = Disturbance(0.325, 0.0, 0.0, 0.05, 0.6)
        result = simulate_task(World((wall,), ORIGIN), _task(ControlMode.H_D), sim_config)
        assert result.collided
        assert result.d_n.kind is DisturbanceKind.OBSTACLE_COLLIDED
        assert result.displacement[0] < 0.3
        assert result.end_pose.x + robot.front <= 0.3 + 1e-9
        assert result.d_i_after is None

    def test04_target_reached(self, sim_config):
        result = simulate_task(World((), ORIGIN, GOAL), _task(ControlMode.H_S, GOAL), sim_config)
        assert result.counteracted
        assert result.end_pose.x == pytest.approx(0.96, abs=1e-9)

    def test05_looming_obstacle(self, sim_config):
        """Un obstacle hors du corridor initial qui y entre donne un D_N □"""
        side = Disturbance(1.1, 0.0, 0.0, 0.1, 0.1)
        result = simulate_task(World((side,), ORIGIN), _task(ControlMode.H_D), sim_config)
        assert not result.collided
        assert result.d_n.kind is DisturbanceKind.OBSTACLE_LOOMING
        assert result.n_steps == 3
        quiet = simulate_task(World((side,), ORIGIN), _task(ControlMode.H_D), sim_config,
                              detect_looming=False)
        # sans détection, le robot avance jusqu'à la face à 1.05 m et la touche
        assert quiet.collided
        assert quiet.d_n.kind is DisturbanceKind.OBSTACLE_COLLIDED
        assert quiet.n_steps > result.n_steps

    def test06_distance_limit_truncates(self, sim_config):
        result = simulate_task(World((), ORIGIN), _task(ControlMode.H_D), sim_config,
                               distance_limit=0.5)
        assert result.n_steps == 25
        assert result.truncated

    def test07_start_must_match_world(self, sim_config):
        with pytest.raises(InvalidTask):
            simulate_task(World((), ORIGIN), _task(ControlMode.H_D, start=Pose2(1, 0, 0)), sim_config)

    def test08_deterministic(self, sim_config):
        wall = Disturbance(0.7, 0.1, 0.3, 0.05, 0.6)
        world = World((wall,), ORIGIN)
        assert (simulate_task(world, _task(ControlMode.H_D), sim_config)
                == simulate_task(world, _task(ControlMode.H_D), sim_config))

    def test09_displacement_bounds(self, sim_config, robot, faker):
        for _ in range(20):
            wall = Disturbance(faker.pyfloat(min_value=0.3, max_value=1.5),
                               faker.pyfloat(min_value=-0.3, max_value=0.3),
                               faker.pyfloat(min_value=-1, max_value=1), 0.05, 0.5)
            result = simulate_task(World((wall,), ORIGIN), _task(ControlMode.H_D), sim_config)
            length = math.hypot(*result.displacement)
            assert length <= robot.linear_speed * sim_config.step * result.n_steps + 1e-9
            assert length <= sim_config.horizon + robot.linear_speed * sim_config.step

    def test10_obstacle_policy_ends_contingent_drive(self, sim_config):
        """H_S contre un obstacle latéral : se termine une fois l'obstacle dépassé"""
        beside = Disturbance(0.21, 0.3, 0.0, 0.2, 0.1)
        result = simulate_task(World((beside,), ORIGIN), _task(ControlMode.H_S, beside), sim_config)
        assert result.counteracted
        assert result.end_pose.x == pytest.approx(0.32, abs=1e-9)


class TestAttentionWindow:
    def test01_window_spans_robot_and_goal(self):
        window = make_attention_window(ORIGIN, GOAL)
        assert window.x_min == pytest.approx(-0.185)
        assert window.x_max == pytest.approx(1.05)
        assert window.y_min == pytest.approx(-0.09)
        assert window.y_max == pytest.approx(0.09)

    def test02_goal_on_robot(self, robot):
        window = make_attention_window(ORIGIN, Disturbance(0.0, 0.0, 0.0, 0.1, 0.1,
                                                           DisturbanceKind.TARGET))
        xs = robot.footprint(ORIGIN).corners()[:, 0]
        assert (window.x_min, window.x_max) == pytest.approx((xs.min(), xs.max()))

    def test03_window_rides_with_robot(self):
        window = make_attention_window(ORIGIN, GOAL)
        moved = window.at(Pose2(0.5, 0.0, 0.0))
        assert moved.x == pytest.approx(window.rect.x + 0.5)
        assert (moved.w, moved.l) == (window.rect.w, window.rect.l)

    def test04_no_goal(self):
        with pytest.raises(NoGoal):
            make_attention_window(ORIGIN, None)

    def test05_in_view(self):
        window = make_attention_window(ORIGIN, GOAL)
        assert in_view(window, Disturbance(0.5, 0.0, 0.0, 0.1, 0.1))
        assert not in_view(window, Disturbance(0.5, 2.0, 0.0, 0.1, 0.1))
        # bord à bord
        assert in_view(window, Disturbance(0.5, 0.14, 0.0, 0.1, 0.1))


class TestMotorAndWorld:
    @pytest.mark.parametrize("n, expected", [(0, 0), (50, 50), (20, 20)])
    def test01_motor_duration(self, n, expected):
        assert motor_duration(n, SimConfig()) == expected

    def test02_motor_duration_rate(self):
        assert motor_duration(50, SimConfig(motor_rate=20.0)) == 100

    def test03_reconstruct(self):
        d_i = Disturbance(0.5, 0.0, 0.0, 0.1, 0.1)
        world = reconstruct_disturbance(d_i, World((), ORIGIN))
        assert world.obstacles == (d_i,)
        assert reconstruct_disturbance(d_i, world) is world

    def test04_target_body_never_collides(self, sim_config):
        world = reconstruct_disturbance(GOAL, World((), ORIGIN))
        result = simulate_task(world, _task(ControlMode.H_D), sim_config)
        assert not result.collided and result.n_steps == 50

    def test05_open_loop_execution(self, sim_config):
        wall = Disturbance(0.325, 0.0, 0.0, 0.05, 0.6)
        poses, hit = execute_motor_command(World((wall,), ORIGIN), ORIGIN, ControlMode.H_D,
                                           50, sim_config)
        assert hit is not None and hit.kind is DisturbanceKind.OBSTACLE_COLLIDED
        assert len(poses) < 50
        poses, hit = execute_motor_command(World((), ORIGIN), ORIGIN, ControlMode.H_R,
                                           20, sim_config)
        assert hit is None
        assert poses[-1].theta == pytest.approx(-math.pi / 2, abs=1e-9)
        logger.info("✅ open-loop execution", n_poses=len(poses))
