"""Shared fixtures: canonical plants, surfaces, and the cached criteria run."""

import pytest

from smclab import (
    ControllerConfig,
    IntegratorConfig,
    SlidingSurface,
    SystemModel,
    run_suite,
    simulate,
)


@pytest.fixture(scope="session")
def acceptance():
    """Every acceptance criterion, run once and shared across the session."""
    return {r.criterion: r for r in run_suite("all")}


@pytest.fixture
def integrator_plant():
    """Pure integrator xdot = u with s = x: the reaching law in closed loop."""
    model = SystemModel(
        dimension=1,
        drift=lambda x, t: (0.0,),
        input_vector=lambda x: (1.0,),
    )
    surface = SlidingSurface(
        value=lambda x: x[0],
        gradient=lambda x: (1.0,),
        description="s = x",
        dimension=1,
    )
    return model, surface


@pytest.fixture
def quadratic_surface():
    """s = x1^2 + x2 on a two-dimensional state, gradient (2*x1, 1)."""
    return SlidingSurface(
        value=lambda x: x[0] * x[0] + x[1],
        gradient=lambda x: (2.0 * x[0], 1.0),
        description="s = x1^2 + x2",
        dimension=2,
    )


@pytest.fixture(scope="session")
def euler_coarse_run():
    """Explicit Euler, h = 1e-3, n = 1, s0 = 2: visible chattering band n*h."""
    from smclab import simulate_reaching_law

    integ = IntegratorConfig(method="explicit-euler", step=1e-3, t_end=3.0)
    return simulate_reaching_law(1.0, 2.0, integ)


@pytest.fixture(scope="session")
def rk4_reference_run():
    """RK4, h = 1e-4, n = 1, s0 = 2: the high-accuracy reference trajectory."""
    from smclab import simulate_reaching_law

    integ = IntegratorConfig(method="rk4", step=1e-4, t_end=3.0)
    return simulate_reaching_law(1.0, 2.0, integ)
