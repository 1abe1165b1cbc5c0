"""Closed-loop integration: grids, crossing refinement, failure modes."""

import math

import pytest

from smclab import (
    ControllerConfig,
    DivergenceError,
    IntegratorConfig,
    ParameterError,
    SingularSurfaceGain,
    SlidingSurface,
    SystemModel,
    grid_step_count,
    lyapunov_of,
    simulate,
    simulate_reaching_law,
)


class TestIntegratorConfig:
    def test_defaults(self):
        integ = IntegratorConfig()
        assert integ.method == "rk4"
        assert integ.step == 1e-4
        assert integ.t_end == 10.0
        assert integ.crossing_refine is True

    def test_validation(self):
        with pytest.raises(ParameterError):
            IntegratorConfig(method="rk45")
        with pytest.raises(ParameterError):
            IntegratorConfig(step=0.0)
        with pytest.raises(ParameterError):
            IntegratorConfig(t_end=-1.0)
        with pytest.raises(ParameterError):
            IntegratorConfig(step=2.0, t_end=1.0)
        with pytest.raises(ParameterError):
            IntegratorConfig(refine_iters=0)


class TestGridStepCount:
    def test_exact_ratios(self):
        assert grid_step_count(3.0, 1e-4) == 30000
        assert grid_step_count(1.0, 1e-3) == 1000

    def test_quotient_just_under_an_integer(self):
        # 0.3/0.1 = 2.9999999999999996 in floating point; must still be 3 steps
        assert grid_step_count(0.3, 0.1) == 3
        assert grid_step_count(0.7, 0.1) == 7

    def test_non_integer_ratio_truncates(self):
        assert grid_step_count(1.05, 0.1) == 10


class TestLyapunov:
    def test_quarter_square(self):
        assert lyapunov_of(2.0) == 1.0
        assert lyapunov_of(-2.0) == 1.0
        assert lyapunov_of(0.0) == 0.0


class TestReachingLawIntegration:
    def test_rk4_tracks_closed_form(self, rk4_reference_run):
        from smclab.analysis import compare_closed_form

        dev = compare_closed_form(rk4_reference_run, 1.0, 2.0)
        assert dev <= 1e-12

    def test_rk4_negative_start(self):
        from smclab.analysis import compare_closed_form, measure_reaching_time

        integ = IntegratorConfig(method="rk4", step=1e-4, t_end=2.0)
        traj = simulate_reaching_law(2.0, -3.0, integ)
        assert compare_closed_form(traj, 2.0, -3.0) <= 1e-12
        reach = measure_reaching_time(traj, 1e-3)
        assert reach.t_reach_measured == pytest.approx(1.5, abs=1e-3)

    def test_start_on_surface_stays_there(self):
        integ = IntegratorConfig(method="rk4", step=1e-3, t_end=0.05)
        traj = simulate_reaching_law(1.0, 0.0, integ)
        assert max(abs(s) for s in traj.s_values()) == 0.0

    def test_euler_deviation_halves_with_step(self):
        from smclab.analysis import compare_closed_form

        devs = []
        for h in (1e-3, 5e-4):
            integ = IntegratorConfig(method="explicit-euler", step=h, t_end=3.0)
            devs.append(compare_closed_form(simulate_reaching_law(1.0, 2.0, integ), 1.0, 2.0))
        assert devs[0] / devs[1] >= 1.8

    def test_euler_chattering_band_is_one_step(self, euler_coarse_run):
        # after reaching, s oscillates one Euler step deep: |s| <= n*h
        post = [smp.s for smp in euler_coarse_run.samples if smp.t >= 2.1]
        assert post
        assert max(abs(s) for s in post) <= 1.0 * 1e-3 * 1.001

    def test_refinement_places_samples_near_crossings(self, euler_coarse_run):
        refined = [smp for smp in euler_coarse_run.samples if smp.refined]
        assert len(refined) > 100
        assert max(abs(smp.s) for smp in refined) <= 1e-11


@pytest.fixture(scope="module")
def traj():
    integ = IntegratorConfig(method="rk4", step=1e-3, t_end=1.0)
    return simulate_reaching_law(1.0, 0.5, integ)


class TestTrajectoryStructure:
    def test_sample_count_is_grid_plus_refinements(self, traj):
        n_grid = grid_step_count(traj.integrator.t_end, traj.integrator.step) + 1
        assert traj.grid_sample_count() == n_grid
        assert len(traj) == n_grid + traj.refined_sample_count()

    def test_times_strictly_increase(self, traj):
        ts = traj.times()
        assert all(t1 > t0 for t0, t1 in zip(ts, ts[1:]))

    def test_v_is_quarter_s_squared_at_every_sample(self, traj):
        for smp in traj.samples:
            assert smp.V == 0.25 * smp.s * smp.s

    def test_initial_sample_is_the_initial_state(self, traj):
        first = traj.samples[0]
        assert first.t == 0.0
        assert first.x == (0.5,)
        assert first.refined is False

    def test_refinement_can_be_disabled(self):
        integ = IntegratorConfig(method="rk4", step=1e-3, t_end=1.0,
                                 crossing_refine=False)
        traj = simulate_reaching_law(1.0, 0.5, integ)
        assert traj.refined_sample_count() == 0
        assert len(traj) == grid_step_count(1.0, 1e-3) + 1


class TestDeterminism:
    def test_identical_runs_are_bit_identical(self):
        from smclab import DisturbanceSignal, ScenarioSpec, build_scenario

        spec = ScenarioSpec("pendulum")
        sig = DisturbanceSignal(kind="seeded-bounded-random", amplitude=0.5, seed=11)
        model, surface = build_scenario(spec, matched=sig)
        cfg = ControllerConfig(n=0.5, d_m=0.6)
        integ = IntegratorConfig(method="rk4", step=1e-3, t_end=1.0)
        a = simulate(model, surface, cfg, integ, (0.5, 0.0))
        b = simulate(model, surface, cfg, integ, (0.5, 0.0))
        assert a.samples == b.samples

    def test_disturbance_seed_changes_the_run(self):
        from smclab import DisturbanceSignal, ScenarioSpec, build_scenario

        spec = ScenarioSpec("pendulum")
        cfg = ControllerConfig(n=0.5, d_m=0.6)
        integ = IntegratorConfig(method="rk4", step=1e-3, t_end=1.0)
        runs = []
        for seed in (11, 12):
            sig = DisturbanceSignal(kind="seeded-bounded-random", amplitude=0.5, seed=seed)
            model, surface = build_scenario(spec, matched=sig)
            runs.append(simulate(model, surface, cfg, integ, (0.5, 0.0)))
        assert runs[0].samples != runs[1].samples


class TestFailureModes:
    def test_divergence_attaches_partial_trajectory(self):
        # the controlled surface is fine, but x2 = e^(10 t) explodes on its own
        model = SystemModel(
            dimension=2,
            drift=lambda x, t: (0.0, 10.0 * x[1]),
            input_vector=lambda x: (1.0, 0.0),
        )
        surface = SlidingSurface(
            value=lambda x: x[0], gradient=lambda x: (1.0, 0.0), dimension=2
        )
        integ = IntegratorConfig(method="rk4", step=1e-3, t_end=4.0)
        with pytest.raises(DivergenceError) as excinfo:
            simulate(model, surface, ControllerConfig(n=1.0), integ, (1.0, 1.0))
        traj = excinfo.value.trajectory
        assert traj is not None and len(traj) > 0
        # e^(10 t) crosses 1e12 at t = ln(1e12)/10 = 2.7631
        assert traj.samples[-1].t == pytest.approx(2.763, abs=0.05)

    def test_singular_gain_mid_run_attaches_partial_trajectory(self):
        # b(x) = (x,) shrinks along the run until |ds/dx . b| < sing_tol
        model = SystemModel(
            dimension=1,
            drift=lambda x, t: (0.0,),
            input_vector=lambda x: (x[0],),
        )
        surface = SlidingSurface(
            value=lambda x: x[0], gradient=lambda x: (1.0,), dimension=1
        )
        cfg = ControllerConfig(n=1.0, sing_tol=1e-3)
        integ = IntegratorConfig(method="rk4", step=1e-3, t_end=2.0)
        with pytest.raises(SingularSurfaceGain) as excinfo:
            simulate(model, surface, cfg, integ, (0.5,))
        traj = excinfo.value.trajectory
        assert traj is not None and len(traj) > 400
        # u = -n/x makes xdot = -n, so x hits the threshold near t = 0.5
        assert traj.samples[-1].t == pytest.approx(0.498, abs=0.01)

    def test_singular_at_initial_state_has_empty_or_no_samples(self):
        model = SystemModel(
            dimension=1,
            drift=lambda x, t: (0.0,),
            input_vector=lambda x: (0.0,),
        )
        surface = SlidingSurface(
            value=lambda x: x[0], gradient=lambda x: (1.0,), dimension=1
        )
        integ = IntegratorConfig(method="rk4", step=1e-3, t_end=1.0)
        with pytest.raises(SingularSurfaceGain) as excinfo:
            simulate(model, surface, ControllerConfig(n=1.0), integ, (1.0,))
        assert excinfo.value.trajectory is not None
        assert len(excinfo.value.trajectory) == 0
