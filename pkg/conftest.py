import os
from pathlib import Path

from pytest import fixture

# Fichiers de log des tests dans logs/ sauf si LOG_DIR est déjà défini
os.environ.setdefault('LOG_DIR', str(Path(__file__).parent / 'logs'))

from configurator.config import ConfigManager  # noqa: E402
from configurator.core import RobotModel  # noqa: E402
from configurator.harness import builtin_scenarios  # noqa: E402
from configurator.logging_setup import get_module_logger  # noqa: E402
from configurator.simulator import SimConfig  # noqa: E402

logger = get_module_logger('tests')

__all__ = ['get_module_logger']


@fixture(scope="session")
def config_manager():
    """Configuration par défaut (aucun fichier .env.test requis)"""
    return ConfigManager(env_file='.env.test')


@fixture(scope="session")
def robot():
    return RobotModel()


@fixture(scope="session")
def sim_config():
    return SimConfig()


@fixture(scope="session")
def scenarios():
    """Scénarios intégrés indexés par nom"""
    return {s.name: s for s in builtin_scenarios()}


@fixture(scope="session")
def faker_seed():
    """Graine fixe pour le fixture faker (tests reproductibles)"""
    return 20240917


@fixture(scope="session", autouse=True)
def test_session_banner():
    logger.info("=" * 60)
    logger.info("Starting test session")
    logger.info("=" * 60)
    yield
    logger.info("=" * 60)
    logger.info("Test session completed")
    logger.info("=" * 60)
