"""Running fixed-point iterations for time-varying convex optimization."""

__version__ = "0.1.0"

from .analysis import BoundReport, measure_and_verify  # noqa: E402
from .config import ScenarioConfig, load_config, parse_config  # noqa: E402
from .errors import (ConfigError, ContractError, DivergenceError, NumericalError,  # noqa: E402
                     OracleFailure, ParameterError, TVFixError, UnsupportedOperation)
from .experiment import execute  # noqa: E402
from .operators import AveragedOperator, apply, compose_averaged  # noqa: E402
from .oracle import solution_trajectory, solve_instance  # noqa: E402
from .problems import ProblemInstance, ProblemStream, make_scenario  # noqa: E402
from .running import RunRecord, run_algorithm, run_bounded_mk, run_mk  # noqa: E402

__all__ = [
    "AveragedOperator", "BoundReport", "ConfigError", "ContractError", "DivergenceError", "NumericalError",
    "OracleFailure", "ParameterError", "ProblemInstance", "ProblemStream", "RunRecord", "ScenarioConfig",
    "TVFixError", "UnsupportedOperation", "apply", "compose_averaged", "execute", "load_config",
    "make_scenario", "measure_and_verify", "parse_config", "run_algorithm", "run_bounded_mk", "run_mk",
    "solution_trajectory", "solve_instance",
]
