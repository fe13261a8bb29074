"""
Exceptions raised by the configurator package.

Every error derives from ConfiguratorError so the command-line entry point can
catch a single type, log it and exit with a non-zero status.
"""


class ConfiguratorError(Exception):
    """Base class for all configurator errors"""


class RobotInCollision(ConfiguratorError):
    """The robot footprint overlaps the scenario geometry"""


class InvalidTask(ConfiguratorError):
    """A Task combines a control mode with a disallowed initial disturbance"""


class NoGoal(ConfiguratorError):
    """An attention window was requested without a goal disturbance"""


class NotSplittable(ConfiguratorError):
    """Only straight-drive states can be split"""


class UndefinedReset(ConfiguratorError):
    """No reset is defined out of a state that ended in a collision"""


class UnsupportedStrategy(ConfiguratorError):
    """The strategy does not build a cognitive map"""


class StateSpaceExhausted(ConfiguratorError):
    """The state cap was reached before the goal"""

    def __init__(self, message: str, cognitive_map=None):
        super().__init__(message)
        self.cognitive_map = cognitive_map


class NoPlan(ConfiguratorError):
    """The cognitive map holds no safe plan"""


class DegenerateInput(ConfiguratorError):
    """Statistics were requested on input with zero variance"""


class ScenarioFormatError(ConfiguratorError):
    """A scenario file is missing fields or holds invalid geometry"""


class ExportError(ConfiguratorError):
    """An output file could not be written"""
