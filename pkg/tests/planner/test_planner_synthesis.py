"""
Tests de la synthèse de la carte cognitive, de l'extraction du plan et de la
stratégie réactive.
"""

import math
import sys
from dataclasses import replace
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent.parent.parent))
from conftest import get_module_logger  # noqa: E402

from configurator.automaton import ControlMode  # noqa: E402
from configurator.core import Disturbance, DisturbanceKind, Pose2  # noqa: E402
from configurator.errors import NoPlan, StateSpaceExhausted, UnsupportedStrategy  # noqa: E402
from configurator.planner import (  # noqa: E402
    CognitiveMap,
    Configurator,
    PlanState,
    Strategy,
    StrategyKind,
    extract_plan,
    reactive_step,
    synthesize,
)
from configurator.sensing import ScanConfig, synthesize_scan  # noqa: E402
from configurator.simulator import World  # noqa: E402

logger = get_module_logger('test_planner')

ORIGIN = Pose2(0.0, 0.0, 0.0)


def _scanned_world(scenario, variant=0):
    start = scenario.start(variant)
    cloud = synthesize_scan(scenario, start, ScanConfig(), seed=0)
    return World((), start, scenario.goal, cloud)


def _strategy(kind, scenario):
    return Strategy(kind, scenario.d_sub)


class TestSynthesisBasics:
    def test01_empty_world_no_goal(self):
        """Rien à contrecarrer : le plan est la conduite par défaut jusqu'à l'horizon"""
        cmap = synthesize(World((), ORIGIN), Strategy(StrategyKind.S1_VANILLA))
        plan = extract_plan(cmap)
        assert len(plan.states) == 2
        drive = cmap[plan.states[1]]
        assert drive.mode is ControlMode.H_D
        assert drive.vd == pytest.approx((1.0, 0.0), abs=1e-9)
        assert drive.terminal
        assert plan.n_motor == (0, 50)

    def test01b_empty_world_map_stays_minimal(self):
        """Conduite ininterrompue jusqu'à l'horizon : aucun virage n'est développé"""
        cmap = synthesize(World((), ORIGIN), Strategy(StrategyKind.S1_VANILLA))
        assert len(cmap) == 2
        assert [s.mode for s in cmap.states] == [ControlMode.H_S, ControlMode.H_D]
        assert cmap.post(0) == [1]

    def test01c_turns_expanded_when_goal_is_aside(self):
        """But sur le côté : la conduite droite ne suffit pas, les virages sont développés"""
        goal = Disturbance(0.0, 1.0, 0.0, 0.1, 0.1, DisturbanceKind.TARGET)
        cmap = synthesize(World((), ORIGIN, goal), Strategy(StrategyKind.S1_VANILLA), goal)
        plan = extract_plan(cmap)
        assert [cmap[i].mode for i in plan.states[1:]] == [ControlMode.H_L, ControlMode.H_S]
        logger.info("✅ goal aside", n_states=len(cmap))

    def test02_root_is_placeholder(self):
        cmap = synthesize(World((), ORIGIN), Strategy(StrategyKind.S1_VANILLA))
        root = cmap[0]
        assert root.parent is None and root.n_steps == 0 and root.vd == (0.0, 0.0)
        assert cmap.path_to(0) == [0]

    def test03_reactive_strategy_has_no_map(self):
        with pytest.raises(UnsupportedStrategy):
            Configurator(World((), ORIGIN), Strategy(StrategyKind.S0_REACTIVE))

    def test04_map_structure(self, scenarios):
        scenario = scenarios['overtaking']
        cmap = synthesize(_scanned_world(scenario), _strategy(StrategyKind.S3_SPLIT_ONLY, scenario),
                          scenario.goal)
        for state in cmap.states[1:]:
            assert cmap.pre(state.id) == [state.parent]
            assert state.id in cmap.post(state.parent)
            assert cmap.is_path(cmap.path_to(state.id))
            assert state.phi == state.gamma + state.chi
        assert not cmap.is_path([1, 2])

    def test05_pop_order(self, scenarios):
        """Chaque état dépilé a le φ minimal de la file au moment du dépilement"""
        scenario = scenarios['overtaking']
        configurator = Configurator(_scanned_world(scenario),
                                    _strategy(StrategyKind.S2_STEP_WISE, scenario), scenario.goal)
        configurator.synthesize()
        assert configurator.expansion_log
        for _, popped, remaining in configurator.expansion_log:
            assert popped <= remaining

    def test06_state_cap(self):
        """But enfermé : la recherche s'arrête au plafond"""
        goal = Disturbance(1.0, 0.0, 0.0, 0.1, 0.1, DisturbanceKind.TARGET)
        walls = (Disturbance(1.0, 0.3, 0.0, 0.65, 0.05), Disturbance(1.0, -0.3, 0.0, 0.65, 0.05),
                 Disturbance(0.7, 0.0, 0.0, 0.05, 0.65), Disturbance(1.3, 0.0, 0.0, 0.05, 0.65))
        with pytest.raises(StateSpaceExhausted) as excinfo:
            synthesize(World(walls, ORIGIN, goal), Strategy(StrategyKind.S2_STEP_WISE, 0.27),
                       goal, state_cap=20)
        assert excinfo.value.cognitive_map is not None
        assert len(excinfo.value.cognitive_map) >= 20


class TestScenarios:
    def test01_cul_de_sac_vanilla(self, scenarios):
        scenario = scenarios['cul-de-sac']
        for variant in range(3):
            cmap = synthesize(_scanned_world(scenario, variant),
                              _strategy(StrategyKind.S1_VANILLA, scenario))
            logger.info("cul-de-sac S1", variant=variant, n_states=len(cmap))
            assert 5 <= len(cmap) <= 9
            plan = extract_plan(cmap)
            assert not any(cmap[i].collided for i in plan.states)
            assert cmap[plan.states[1]].mode in (ControlMode.H_L, ControlMode.H_R)

    def test02_cul_de_sac_step_wise_builds_more(self, scenarios):
        scenario = scenarios['cul-de-sac']
        counts = {kind: len(synthesize(_scanned_world(scenario), _strategy(kind, scenario)))
                  for kind in (StrategyKind.S1_VANILLA, StrategyKind.S2_STEP_WISE,
                               StrategyKind.S3_SPLIT_ONLY, StrategyKind.S4_SPLIT_WINDOW)}
        logger.info("cul-de-sac state counts", **{k.name: v for k, v in counts.items()})
        assert 6 <= counts[StrategyKind.S4_SPLIT_WINDOW] <= 10
        for kind in (StrategyKind.S1_VANILLA, StrategyKind.S3_SPLIT_ONLY,
                     StrategyKind.S4_SPLIT_WINDOW):
            assert counts[StrategyKind.S2_STEP_WISE] > counts[kind]

    def test03_overtaking_vanilla_fails(self, scenarios):
        """Stratégie 1 : toutes les conduites simulées finissent en collision"""
        scenario = scenarios['overtaking']
        cmap = synthesize(_scanned_world(scenario), _strategy(StrategyKind.S1_VANILLA, scenario),
                          scenario.goal)
        drives = [s for s in cmap.states[1:] if s.mode.is_straight]
        assert drives and all(s.collided for s in drives)
        with pytest.raises(NoPlan):
            extract_plan(cmap)

    @pytest.mark.parametrize("kind", [StrategyKind.S2_STEP_WISE, StrategyKind.S3_SPLIT_ONLY,
                                      StrategyKind.S4_SPLIT_WINDOW])
    def test04_overtaking_succeeds(self, scenarios, kind):
        scenario = scenarios['overtaking']
        for variant in range(3):
            cmap = synthesize(_scanned_world(scenario, variant), _strategy(kind, scenario),
                              scenario.goal)
            plan = extract_plan(cmap)
            last = cmap[plan.states[-1]]
            end = last.end_pose()
            assert end.distance_to(Pose2(1.0, 0.0)) <= 0.15
            assert not any(cmap[i].collided for i in plan.states)
            if kind is StrategyKind.S3_SPLIT_ONLY:
                assert any(cmap[i].split_from is not None for i in plan.states)

    def test05_overtaking_step_wise_builds_most(self, scenarios):
        scenario = scenarios['overtaking']
        sizes = {}
        for kind in (StrategyKind.S2_STEP_WISE, StrategyKind.S3_SPLIT_ONLY,
                     StrategyKind.S4_SPLIT_WINDOW):
            configurator = Configurator(_scanned_world(scenario), _strategy(kind, scenario),
                                        scenario.goal)
            configurator.synthesize()
            sizes[kind] = (len(configurator.map), configurator.n_objects)
        assert sizes[StrategyKind.S2_STEP_WISE][0] > sizes[StrategyKind.S3_SPLIT_ONLY][0]
        assert sizes[StrategyKind.S2_STEP_WISE][0] > sizes[StrategyKind.S4_SPLIT_WINDOW][0]
        assert sizes[StrategyKind.S2_STEP_WISE][1] == max(v[1] for v in sizes.values())


class TestExtraction:
    @staticmethod
    def _map(phis, terminal=()):
        cmap = CognitiveMap()
        root = PlanState(0, ControlMode.H_S, None, None, ORIGIN, (0.0, 0.0), 0, 0.0, 0.0, 0.0, None)
        cmap.add(root)
        for i, (g, c) in enumerate(phis, start=1):
            state = PlanState(-1, ControlMode.H_D, None, None, Pose2(0.1 * i, 0, 0), (0.1, 0.0),
                              5, g, c, g + c, 0, terminal=i in terminal)
            cmap.add(state, 0)
        return cmap

    def test01_single_state(self):
        cmap = CognitiveMap()
        cmap.add(PlanState(0, ControlMode.H_S, None, None, ORIGIN, (0.0, 0.0), 0, 0.0, 0.0, 0.0, None))
        assert extract_plan(cmap).states == (0,)

    def test02_tie_goes_to_lower_id(self):
        cmap = self._map([(0.1, 0.1), (0.1, 0.1)], terminal=(1, 2))
        assert extract_plan(cmap).states == (0, 1)

    def test03_terminal_states_first(self):
        cmap = self._map([(0.0, 0.1), (0.2, 0.2)], terminal=(2,))
        assert extract_plan(cmap).states == (0, 2)

    def test04_scaling_leaves_choice_unchanged(self, faker):
        for _ in range(30):
            phis = [(faker.pyfloat(min_value=0, max_value=1), faker.pyfloat(min_value=0, max_value=0.5))
                    for _ in range(6)]
            terminal = tuple(i for i in range(1, 7) if faker.pybool())
            scale = faker.pyfloat(min_value=0.1, max_value=10)
            base = extract_plan(self._map(phis, terminal)).states
            scaled = extract_plan(self._map([(g * scale, c * scale) for g, c in phis], terminal)).states
            assert base == scaled

    def test05_collided_choice_is_no_plan(self):
        cmap = self._map([(0.1, 0.0)])
        cmap.update(replace(cmap[1], d_n=Disturbance(0.1, 0, 0, 0.1, 0.1,
                                                     DisturbanceKind.OBSTACLE_COLLIDED)))
        with pytest.raises(NoPlan):
            extract_plan(cmap)

    def test06_psi_and_motor_commands(self, robot):
        cmap = self._map([(0.1, 0.0), (0.3, 0.0)], terminal=(1,))
        plan = extract_plan(cmap)
        assert plan.psi(cmap) == {0: 1, 1: 1, 2: 0}
        commands = plan.motor_commands(cmap, robot)
        assert commands == [(ControlMode.H_D, (robot.linear_speed, 0.0), 5)]

    def test07_map_dict_round_trip(self, scenarios):
        scenario = scenarios['cul-de-sac']
        cmap = synthesize(_scanned_world(scenario), _strategy(StrategyKind.S3_SPLIT_ONLY, scenario))
        plan = extract_plan(cmap)
        data = cmap.to_dict(plan)
        assert sum(s['psi'] for s in data['states']) == len(plan.states)
        again = CognitiveMap.from_dict(data)
        assert again.states == cmap.states
        assert again.edges == cmap.edges


class TestReactive:
    def test01_turn_away_from_obstacle(self):
        wall = Disturbance(0.4, 0.01, 0.0, 0.05, 0.6)
        task = reactive_step(World((wall,), ORIGIN), None, 0.5)
        assert task.mode is ControlMode.H_R

    def test02_turn_towards_target(self):
        goal = Disturbance(0.0, 0.8, 0.0, 0.1, 0.1, DisturbanceKind.TARGET)
        task = reactive_step(World((), ORIGIN, goal), goal, 0.5)
        assert task.mode is ControlMode.H_L
        assert task.c.d_i == goal

    def test03_clear_corridor(self):
        task = reactive_step(World((), ORIGIN), None, 0.5)
        assert task.mode is ControlMode.H_D
        assert task.start == ORIGIN

    def test04_target_ahead(self):
        goal = Disturbance(2.0, 0.0, 0.0, 0.1, 0.1, DisturbanceKind.TARGET)
        task = reactive_step(World((), ORIGIN, goal), goal, 0.5)
        assert task.mode is ControlMode.H_S
        assert math.isclose(task.c.d_i.x, 2.0)
