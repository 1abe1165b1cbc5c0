"""smclab: sliding mode control synthesis, simulation, and verification.

The package synthesizes the classic switching control law for control-affine
SISO plants, integrates the discontinuous closed loop with fixed-step methods
plus sign-crossing refinement, and verifies the finite-time reaching and
Lyapunov-decrease claims numerically.
"""

from .analysis import (
    ChatterReport,
    LyapunovReport,
    MarginReport,
    ReachReport,
    chattering_metrics,
    compare_closed_form,
    default_eps_band,
    estimate_sup_sdot,
    lyapunov_monotonicity,
    measure_reaching_time,
    spot_check_margins,
    verify_reaching_bound,
)
from .config import (
    OutputPaths,
    RunConfig,
    config_to_dict,
    get_param,
    load_config,
    parse_config,
    set_param,
    write_config,
)
from .controller import (
    ControlDecision,
    ControllerConfig,
    closed_form_s,
    control,
    margin_report,
    reaching_residual,
    reaching_time_predicted,
    sgn_eff,
    switching_control,
)
from .dynamics import (
    DisturbanceSignal,
    SlidingSurface,
    StateVector,
    SystemModel,
    eval_plant_derivative,
    sgn,
    state_coords,
    surface_gradient,
    surface_gradient_fd,
    surface_value,
)
from .errors import (
    ConfigSyntaxError,
    ConfigValidationError,
    DataError,
    DimensionError,
    DivergenceError,
    NotReachedError,
    NumericsError,
    ParameterError,
    SingularSurfaceGain,
    SlidingModeError,
)
from .runner import RunResult, run_scenario, sweep, sweep_rows, write_trajectory_csv
from .scenarios import (
    SCENARIO_NAMES,
    ScenarioSpec,
    build_scenario,
    default_initial_state,
    implied_w_uim,
    known_scenarios,
)
from .simulator import (
    IntegratorConfig,
    Trajectory,
    TrajectorySample,
    grid_step_count,
    lyapunov_of,
    simulate,
    simulate_reaching_law,
)
from .verification import (
    CriterionResult,
    SUITE_NAMES,
    format_results,
    gradient_check,
    run_suite,
)

__version__ = "0.1.0"
