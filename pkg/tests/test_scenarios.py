"""Named benchmark scenarios and their materialized plants."""

import math

import pytest

from smclab import (
    DimensionError,
    DisturbanceSignal,
    ParameterError,
    ScenarioSpec,
    build_scenario,
    eval_plant_derivative,
    surface_gradient,
    surface_value,
)
from smclab.scenarios import (
    SCENARIO_NAMES,
    allowed_parameters,
    default_initial_state,
    implied_w_uim,
    known_scenarios,
    scenario_dimension,
)


class TestScenarioSpec:
    def test_catalog(self):
        assert known_scenarios() == SCENARIO_NAMES
        assert scenario_dimension("pure-integrator") == 1
        assert scenario_dimension("double-integrator") == 2
        assert scenario_dimension("pendulum") == 2
        assert allowed_parameters("pendulum") == {"a": 1.0, "c": 1.0}
        assert default_initial_state("double-integrator") == (1.0, 1.0)

    def test_unknown_name_rejected(self):
        with pytest.raises(ParameterError, match="unknown scenario"):
            ScenarioSpec("triple-integrator")
        with pytest.raises(ParameterError):
            scenario_dimension("nope")

    def test_parameters_normalized_against_defaults(self):
        spec = ScenarioSpec("pendulum", parameters={"a": 2.0})
        assert spec.parameters == {"a": 2.0, "c": 1.0}
        assert spec.initial_state == (0.5, 0.0)

    def test_unknown_parameter_rejected(self):
        with pytest.raises(ParameterError, match="allowed"):
            ScenarioSpec("double-integrator", parameters={"q": 1.0})

    def test_surface_slope_must_be_positive(self):
        with pytest.raises(ParameterError):
            ScenarioSpec("double-integrator", parameters={"c": 0.0})
        with pytest.raises(ParameterError):
            ScenarioSpec("double-integrator", parameters={"c": -1.0})

    def test_initial_state_dimension_checked(self):
        with pytest.raises(DimensionError):
            ScenarioSpec("pure-integrator", initial_state=(1.0, 2.0))


class TestBuiltPlants:
    def test_pure_integrator(self):
        model, surface = build_scenario(ScenarioSpec("pure-integrator"))
        assert model.dimension == 1
        assert surface_value(surface, (3.0,)) == 3.0
        assert eval_plant_derivative(model, (3.0,), 0.0, -1.0) == (-1.0,)

    def test_double_integrator_chain(self):
        spec = ScenarioSpec("double-integrator", parameters={"c": 2.0})
        model, surface = build_scenario(spec)
        assert surface_value(surface, (1.0, 1.0)) == 3.0
        assert surface_gradient(surface, (0.0, 0.0)) == (2.0, 1.0)
        # x1' = x2, x2' = u
        assert eval_plant_derivative(model, (1.0, 4.0), 0.0, -0.5) == (4.0, -0.5)

    def test_pendulum_gravity_term(self):
        spec = ScenarioSpec("pendulum", parameters={"a": 2.0})
        model, _ = build_scenario(spec)
        deriv = eval_plant_derivative(model, (math.pi / 2.0, 0.0), 0.0, 0.0)
        assert deriv == pytest.approx((0.0, -2.0))

    def test_matched_signal_enters_the_input_channel(self):
        sig = DisturbanceSignal(kind="constant", amplitude=0.7)
        model, _ = build_scenario(ScenarioSpec("double-integrator"), matched=sig)
        base, _ = build_scenario(ScenarioSpec("double-integrator"))
        d1 = eval_plant_derivative(model, (1.0, 1.0), 0.0, 0.0)
        d0 = eval_plant_derivative(base, (1.0, 1.0), 0.0, 0.0)
        assert d1[0] == d0[0]  # no disturbance in the kinematic equation
        assert d1[1] - d0[1] == pytest.approx(0.7)

    def test_unmatched_signal_enters_the_first_state(self):
        sig = DisturbanceSignal(kind="sinusoid", amplitude=0.5, frequency=3.0)
        model, _ = build_scenario(ScenarioSpec("pendulum"), unmatched=sig)
        w = model.unmatched_disturbance((0.0, 0.0), 0.4)
        assert w == pytest.approx((0.5 * math.sin(1.2), 0.0))
        assert model.unmatched_bound_vector == (0.5, 0.0)


class TestImpliedUnmatchedBound:
    def test_scalar_channel_passes_through(self):
        sig = DisturbanceSignal(kind="sinusoid", amplitude=0.3, frequency=1.0)
        assert implied_w_uim(ScenarioSpec("pure-integrator"), sig) == 0.3

    def test_surface_slope_scales_the_bound(self):
        sig = DisturbanceSignal(kind="sinusoid", amplitude=0.3, frequency=1.0)
        spec = ScenarioSpec("pendulum", parameters={"c": 2.0})
        assert implied_w_uim(spec, sig) == pytest.approx(0.6)
