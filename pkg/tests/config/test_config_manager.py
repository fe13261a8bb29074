"""
Tests du gestionnaire de configuration.
"""

import math
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent.parent.parent))
from conftest import get_module_logger  # noqa: E402

from configurator.config import ConfigManager  # noqa: E402
from configurator.errors import ConfiguratorError  # noqa: E402

logger = get_module_logger('test_config')

VARIABLES = ('SIM_STEP', 'SIM_HORIZON', 'MOTOR_RATE', 'MAX_STEPS', 'LINEAR_SPEED',
             'ANGULAR_SPEED', 'SCAN_BEAMS', 'SCAN_NOISE_STD', 'STATE_CAP', 'TARGET_TOL')


@pytest.fixture
def clean_env(monkeypatch):
    # setenv puis delenv : la valeur d'origine est restaurée même si load_dotenv écrit
    for variable in VARIABLES:
        monkeypatch.setenv(variable, "")
        monkeypatch.delenv(variable)
    return monkeypatch


class TestConfigManager:
    def test01_defaults(self, clean_env, tmp_path):
        manager = ConfigManager(env_file=str(tmp_path / 'absent.env'))
        sim = manager.sim_config()
        assert (sim.step, sim.horizon, sim.motor_rate) == (0.1, 1.0, 10.0)
        robot = manager.robot_model()
        assert robot.linear_speed == 0.2
        assert robot.angular_speed == pytest.approx(math.pi / 4)
        assert manager.scan_config().max_range == sim.horizon
        assert manager.planner_settings() == {'state_cap': 500, 'target_tolerance': 0.05}

    def test02_env_file(self, clean_env, tmp_path):
        env_file = tmp_path / 'test.env'
        env_file.write_text('SIM_HORIZON=2.0\nSTATE_CAP=50\n', encoding='utf-8')
        manager = ConfigManager(env_file=str(env_file))
        assert manager.sim_config().horizon == 2.0
        assert manager.scan_config().max_range == 2.0
        assert manager.planner_settings()['state_cap'] == 50

    def test03_overrides_win(self, clean_env):
        clean_env.setenv('SCAN_BEAMS', '180')
        manager = ConfigManager(env_file='.env.test', overrides={'scan_beams': '90'})
        assert manager.scan_config().n_beams == 90

    def test04_malformed_value(self, clean_env):
        clean_env.setenv('SIM_STEP', 'fast')
        with pytest.raises(ConfiguratorError):
            ConfigManager(env_file='.env.test')

    def test05_invalid_settings(self, clean_env):
        with pytest.raises(ConfiguratorError):
            ConfigManager(env_file='.env.test', overrides={'sim_step': '-1'}).sim_config()
        with pytest.raises(ConfiguratorError):
            ConfigManager(env_file='.env.test', overrides={'state_cap': '0'}).planner_settings()

    def test06_display(self, clean_env):
        manager = ConfigManager(env_file='.env.test')
        manager.display_config(logger)
        assert manager.get('output_dir') == 'out'
        logger.info("✅ configuration displayed", n_keys=len(manager.config))
