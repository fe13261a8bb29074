"""
Configuration: dotenv file plus environment variables, turned into the frozen
settings objects used by the simulator, the scanner and the planner.
"""

import math
import os
from typing import Any, Callable, Dict, Optional

import structlog
from dotenv import load_dotenv

from .automaton import TARGET_TOLERANCE
from .core import RobotModel
from .errors import ConfiguratorError
from .planner import DEFAULT_STATE_CAP
from .sensing import ScanConfig
from .simulator import SimConfig

# (environment variable, key, parser, default)
_SETTINGS = (
    ("LOG_LEVEL", "log_level", str, "INFO"),
    ("LOG_DIR", "log_dir", str, None),
    ("SIM_STEP", "sim_step", float, 0.1),
    ("SIM_HORIZON", "sim_horizon", float, 1.0),
    ("MOTOR_RATE", "motor_rate", float, 10.0),
    ("MAX_STEPS", "max_steps", int, 200),
    ("LINEAR_SPEED", "linear_speed", float, 0.2),
    ("ANGULAR_SPEED", "angular_speed", float, math.pi / 4),
    ("SCAN_BEAMS", "scan_beams", int, 360),
    ("SCAN_NOISE_STD", "scan_noise_std", float, 0.0),
    ("STATE_CAP", "state_cap", int, DEFAULT_STATE_CAP),
    ("TARGET_TOL", "target_tol", float, TARGET_TOLERANCE),
    ("OUTPUT_DIR", "output_dir", str, "out"),
)


class ConfigManager:
    """Experiment settings from .env, the environment and explicit overrides"""

    def __init__(self, env_file: str = '.env', overrides: Optional[Dict[str, Any]] = None):
        self.env_file = env_file
        self._overrides = dict(overrides or {})
        self._config: Dict[str, Any] = {}
        self.load_config()

    def load_config(self) -> None:
        """Load the .env file, then the environment, then the overrides"""
        env_path = self.env_file
        if not os.path.isabs(env_path):
            env_path = os.path.join(os.getcwd(), env_path)
        if os.path.exists(env_path):
            load_dotenv(dotenv_path=env_path)

        config = {}
        for variable, key, parse, default in _SETTINGS:
            raw = self._overrides.get(key, os.getenv(variable))
            config[key] = default if raw in (None, "") else self._parse(variable, raw, parse)
        self._config = config

    @staticmethod
    def _parse(variable: str, raw: Any, parse: Callable[[Any], Any]) -> Any:
        try:
            return parse(raw)
        except (TypeError, ValueError) as e:
            raise ConfiguratorError(f"{variable}={raw!r} is not a valid {parse.__name__}") from e

    @property
    def config(self) -> Dict[str, Any]:
        """The loaded settings"""
        return self._config

    def get(self, key: str, default: Any = None) -> Any:
        return self._config.get(key, default)

    def _build(self, factory, **kwargs):
        try:
            return factory(**kwargs)
        except ValueError as e:
            raise ConfiguratorError(f"invalid {factory.__name__}: {e}") from e

    def sim_config(self) -> SimConfig:
        return self._build(SimConfig, step=self.get('sim_step'), horizon=self.get('sim_horizon'),
                           motor_rate=self.get('motor_rate'), max_steps=self.get('max_steps'))

    def robot_model(self) -> RobotModel:
        return self._build(RobotModel, linear_speed=self.get('linear_speed'),
                           angular_speed=self.get('angular_speed'))

    def scan_config(self) -> ScanConfig:
        return self._build(ScanConfig, n_beams=self.get('scan_beams'),
                           max_range=self.get('sim_horizon'),
                           noise_std=self.get('scan_noise_std'))

    def planner_settings(self) -> Dict[str, Any]:
        """Keyword arguments for the Configurator"""
        cap = self.get('state_cap')
        if cap < 1:
            raise ConfiguratorError(f"STATE_CAP must be >= 1, got {cap}")
        return {'state_cap': cap, 'target_tolerance': self.get('target_tol')}

    def display_config(self, logger: structlog.BoundLogger) -> None:
        """Log every setting"""
        logger.info("Configuration loaded:")
        for key, value in self._config.items():
            logger.info(f"  {key}: {value}")
