"""Transient solver for time-varying M/M/s/n queuing systems.

Piecewise-constant arrival/service/staffing schedules are solved step by
step via uniformization with steady-state detection after each change, and
a single error budget covers the whole horizon.
"""

from .chain import (
    StepParams,
    dtmc_step,
    empty_system,
    is_converging,
    steady_state,
    uniformization_rate,
)
from .metrics import error_series, expected_state, service_level, tail_probability
from .poisson import MeanRangeError, PoissonWeights, build_poisson_weights
from .scenario import (
    BudgetError,
    Period,
    Scenario,
    Timeline,
    TimelineRecord,
    delta_threshold,
    proportional_budget,
    solve_scenario,
)
from .scenario_io import (
    ScenarioFormatError,
    gen_example,
    load_scenario,
    read_scenario,
    save_results,
    scenario_to_document,
    write_scenario,
)
from .unistep import SolverConfig, StepResult, relative_distance, solve_step

__version__ = "0.1.0"
