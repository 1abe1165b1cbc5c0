"""Numeric verification of the controller's reaching and stability claims.

Each criterion compares a measured quantity against an independently derived
expectation (closed-form reaching solution, residual sign analysis, or
finite-difference oracle) at a pinned tolerance.  Criteria share expensive
trajectories through a per-suite memo so `verify all` stays in the seconds
range at the default step sizes.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from typing import Callable, Dict, List, Tuple

from .analysis import (
    chattering_metrics,
    compare_closed_form,
    estimate_sup_sdot,
    lyapunov_monotonicity,
    measure_reaching_time,
    verify_reaching_bound,
)
from .controller import ControllerConfig, reaching_residual
from .dynamics import (
    DisturbanceSignal,
    surface_gradient,
    surface_gradient_fd,
    surface_value,
)
from .errors import ParameterError
from .scenarios import SCENARIO_NAMES, ScenarioSpec, build_scenario
from .simulator import IntegratorConfig, simulate, simulate_reaching_law

# absolute slack added to every tolerance comparison so measurements landing
# exactly on a tolerance boundary are not failed by the last rounding bit
TOL_HAIR = 1e-12

SUITE_NAMES = ("reaching", "disturbance", "gradients", "lyapunov", "all")


@dataclass(frozen=True)
class CriterionResult:
    criterion: str
    description: str
    measured: str
    expected: str
    tolerance: str
    passed: bool
    details: Tuple[str, ...] = ()


def _within(value: float, target: float, tol: float) -> bool:
    return abs(value - target) <= tol + TOL_HAIR


def _memo(ctx: Dict, key: str, build: Callable):
    if key not in ctx:
        ctx[key] = build()
    return ctx[key]


def _pure_integrator_traj(ctx, n, s0, method="rk4", step=1e-4, t_end=3.0):
    key = f"pure:{n}:{s0}:{method}:{step}:{t_end}"

    def build():
        spec = ScenarioSpec("pure-integrator", initial_state=(s0,))
        model, surface = build_scenario(spec)
        return simulate(
            model, surface, ControllerConfig(n=n),
            IntegratorConfig(method=method, step=step, t_end=t_end),
            spec.initial_state, model_label=spec.name,
        )

    return _memo(ctx, key, build)


def _reaching_law_traj(ctx, n, s0, step=1e-4, t_end=3.0):
    key = f"rl:{n}:{s0}:{step}:{t_end}"
    return _memo(
        ctx, key,
        lambda: simulate_reaching_law(
            n, s0, IntegratorConfig(method="rk4", step=step, t_end=t_end)
        ),
    )


# the matched/unmatched disturbance criteria need a reaching gain small
# enough that an undersized bound actually breaks sliding (the excess
# |d| - d_m = 0.5 must exceed n), hence n = 0.25 on the double integrator
_DI_N = 0.25
_DI_STEP = 1e-4
_DI_T_END = 5.0


def _a4_traj(ctx):
    def build():
        spec = ScenarioSpec("double-integrator", initial_state=(1.0, 1.0))
        d = DisturbanceSignal(kind="sinusoid", amplitude=0.8, frequency=5.0)
        model, surface = build_scenario(spec, matched=d)
        cfg = ControllerConfig(n=_DI_N, d_m=1.0)
        integ = IntegratorConfig(method="rk4", step=_DI_STEP, t_end=_DI_T_END)
        return simulate(model, surface, cfg, integ, spec.initial_state,
                        model_label=spec.name), cfg

    return _memo(ctx, "a4", build)


def _a5_traj(ctx):
    def build():
        spec = ScenarioSpec("double-integrator", initial_state=(1.0, 1.0))
        d = DisturbanceSignal(kind="constant", amplitude=1.5)
        model, surface = build_scenario(spec, matched=d)
        cfg = ControllerConfig(n=_DI_N, d_m=1.0)
        integ = IntegratorConfig(method="rk4", step=_DI_STEP, t_end=_DI_T_END)
        return simulate(model, surface, cfg, integ, spec.initial_state,
                        model_label=spec.name), cfg

    return _memo(ctx, "a5", build)


def _a6_trajs(ctx):
    def build():
        spec = ScenarioSpec("double-integrator", initial_state=(0.5, 0.0))
        w = DisturbanceSignal(kind="sinusoid", amplitude=0.5, frequency=3.0)
        model, surface = build_scenario(spec, unmatched=w)
        integ = IntegratorConfig(method="rk4", step=_DI_STEP, t_end=_DI_T_END)
        comp = simulate(model, surface, ControllerConfig(n=_DI_N, w_uim=0.5),
                        integ, spec.initial_state, model_label=spec.name)
        uncomp = simulate(model, surface, ControllerConfig(n=_DI_N),
                          integ, spec.initial_state, model_label=spec.name)
        return comp, uncomp

    return _memo(ctx, "a6", build)


def _a3_setups():
    w_di = DisturbanceSignal(kind="sinusoid", amplitude=0.5, frequency=3.0)
    return (
        (ScenarioSpec("pure-integrator"), None, 0.0),
        (ScenarioSpec("double-integrator"), w_di, 0.5),
        (ScenarioSpec("pendulum"), None, 0.0),
    )


def criterion_a1(ctx) -> CriterionResult:
    """Measured reaching time equals |s0|/n on the pure integrator."""
    details = []
    traj = _pure_integrator_traj(ctx, 1.0, 2.0)
    reach = measure_reaching_time(traj, 1e-3)
    t1 = reach.t_reach_measured
    ok = t1 is not None and 1.997 <= t1 <= 2.003
    details.append(f"n=1: t_reach={t1!r} (window [1.997, 2.003])")

    worst = 0.0
    for n in (0.5, 1.0, 2.0, 4.0):
        t_end = 4.5 if n == 0.5 else 3.0
        tr = _pure_integrator_traj(ctx, n, 2.0, t_end=t_end)
        t_n = measure_reaching_time(tr, 1e-3).t_reach_measured
        if t_n is None:
            ok = False
            details.append(f"n={n}: band never reached")
            continue
        dev = abs(t_n - 2.0 / n)
        worst = max(worst, dev)
        if dev > 2e-3 + TOL_HAIR:
            ok = False
        details.append(f"n={n}: t_reach={t_n:.6f}, |dev|={dev:.2e}")
    return CriterionResult(
        criterion="A1",
        description="reaching time matches the |s0|/n prediction (single run + gain sweep)",
        measured=f"t_reach={t1 if t1 is None else format(t1, '.6f')}, sweep max dev={worst:.2e}",
        expected="t_reach in [1.997, 2.003]; sweep t_reach = 2/n each",
        tolerance="sweep +/-2e-3",
        passed=bool(ok),
        details=tuple(details),
    )


def criterion_a2(ctx) -> CriterionResult:
    """Numerical s(t) tracks the exact reaching-law solution."""
    details = []
    ok = True
    worst = 0.0
    for n, s0, tol in ((1.0, 2.0, 1e-3), (2.0, -3.0, 1e-3), (1.0, 0.0, 1e-4)):
        traj = _reaching_law_traj(ctx, n, s0)
        dev = compare_closed_form(traj, n, s0)
        worst = max(worst, dev)
        good = dev <= tol + TOL_HAIR
        ok = ok and good
        details.append(f"n={n}, s0={s0}: max dev={dev:.2e} (tol {tol:g})")
    return CriterionResult(
        criterion="A2",
        description="closed-form equivalence of the integrated reaching law",
        measured=f"max deviation={worst:.2e}",
        expected="<= 1e-3 for s0 != 0; <= step*n for s0 = 0",
        tolerance="1e-3 / 1e-4",
        passed=ok,
        details=tuple(details),
    )


def criterion_a3(ctx) -> CriterionResult:
    """Reaching-condition residual s*sdot + n|s| <= 0 under bounded disturbances."""
    rng = random.Random(20260825)
    worst_dist = -math.inf
    worst_nom = 0.0
    details = []
    for spec, w_signal, w_uim in _a3_setups():
        model, surface = build_scenario(spec, unmatched=w_signal)
        model_nom, _ = build_scenario(spec)
        cfg = ControllerConfig(n=1.0, d_m=1.0, w_uim=w_uim)
        cfg_nom = ControllerConfig(n=1.0)
        dim = spec.dimension
        w_d = w_n = -math.inf
        for _ in range(1000):
            x = tuple(rng.uniform(-10.0, 10.0) for _ in range(dim))
            if surface_value(surface, x) == 0.0:
                continue
            t = rng.uniform(0.0, 10.0)
            d = rng.uniform(-1.0, 1.0)
            w_d = max(w_d, reaching_residual(cfg, model, surface, x, t, d))
            w_n = max(w_n, abs(reaching_residual(cfg_nom, model_nom, surface, x, t, 0.0)))
        worst_dist = max(worst_dist, w_d)
        worst_nom = max(worst_nom, w_n)
        details.append(f"{spec.name}: max residual={w_d:.2e}, nominal |residual|={w_n:.2e}")
    ok = worst_dist <= 1e-9 and worst_nom <= 1e-12
    return CriterionResult(
        criterion="A3",
        description="reaching condition holds pointwise for 1000 random states per scenario",
        measured=f"max residual={worst_dist:.2e}, nominal max |residual|={worst_nom:.2e}",
        expected="residual <= 1e-9 with bounded disturbances; |residual| <= 1e-12 nominal",
        tolerance="1e-9 / 1e-12",
        passed=ok,
        details=tuple(details),
    )


def criterion_a4(ctx) -> CriterionResult:
    """Sinusoidal matched disturbance inside d_m leaves reaching and sliding intact."""
    traj, cfg = _a4_traj(ctx)
    ok_bound, reach = verify_reaching_bound(traj, cfg, 1e-3)
    band = math.inf
    if reach.t_reach_measured is not None:
        band = chattering_metrics(traj, reach).band_amplitude
    ok = bool(reach.bound_satisfied) and band <= 1e-3 + TOL_HAIR
    return CriterionResult(
        criterion="A4",
        description="matched-disturbance rejection: d(t)=0.8*sin(5t) under d_m=1",
        measured=f"bound_satisfied={reach.bound_satisfied}, band={band:.2e}",
        expected="bound_satisfied true, post-reach band <= 1e-3",
        tolerance="band 1e-3",
        passed=ok,
        details=(f"t_reach={reach.t_reach_measured}, predicted={reach.t_r_predicted}",
                 f"2*step bound check={ok_bound}"),
    )


def criterion_a5(ctx) -> CriterionResult:
    """Undersized d_m (|d|=1.5 vs d_m=1) must break sliding."""
    traj, cfg = _a5_traj(ctx)
    ok_bound, reach = verify_reaching_bound(traj, cfg, 1e-3)
    t_tail = 0.8 * _DI_T_END
    tail = max(abs(smp.s) for smp in traj.samples if smp.t >= t_tail)
    nominal_band = 1e-3
    ok = (not ok_bound) and tail >= 10.0 * nominal_band
    return CriterionResult(
        criterion="A5",
        description="bound necessity: constant d=1.5 with d_m=1 defeats the law",
        measured=f"bound_satisfied={ok_bound}, tail max |s|={tail:.3f}",
        expected="bound_satisfied false, |s| exceeds 10x the nominal 1e-3 band",
        tolerance=">= 1e-2 tail amplitude",
        passed=ok,
        details=(f"t_reach={reach.t_reach_measured}",),
    )


def criterion_a6(ctx) -> CriterionResult:
    """Unmatched disturbance compensated through w_uim; uncompensated run degrades."""
    comp, uncomp = _a6_trajs(ctx)
    reach = measure_reaching_time(comp, 1e-3)
    band = math.inf
    if reach.t_reach_measured is not None:
        band = chattering_metrics(comp, reach).band_amplitude
    tail = max(abs(smp.s) for smp in uncomp.samples if smp.t >= 0.5 * _DI_T_END)
    ok = band <= 1e-3 + TOL_HAIR and tail >= 5e-3
    return CriterionResult(
        criterion="A6",
        description="unmatched disturbance: w on x1' with |w| <= 0.5, w_uim 0.5 vs 0",
        measured=f"compensated band={band:.2e}, uncompensated tail |s|={tail:.3f}",
        expected="band <= 1e-3 with w_uim=0.5; band violated >= 5x with w_uim=0",
        tolerance="1e-3 / >= 5e-3",
        passed=ok,
        details=(f"compensated t_reach={reach.t_reach_measured}",),
    )


def criterion_a7(ctx) -> CriterionResult:
    """V = 0.25*s^2 never increases beyond discretization slack before reach."""
    runs = [
        ("pure-integrator n=1", _pure_integrator_traj(ctx, 1.0, 2.0)),
        ("reaching-law n=1 s0=2", _reaching_law_traj(ctx, 1.0, 2.0)),
        ("reaching-law n=2 s0=-3", _reaching_law_traj(ctx, 2.0, -3.0)),
        ("matched-disturbance run", _a4_traj(ctx)[0]),
        ("unmatched-compensated run", _a6_trajs(ctx)[0]),
    ]
    details = []
    total = 0
    for label, traj in runs:
        sup = estimate_sup_sdot(traj)
        tol_V = 10.0 * traj.integrator.step * sup * sup
        rep = lyapunov_monotonicity(traj, tol_V, eps_band=1e-3)
        total += rep.violations
        details.append(
            f"{label}: violations={rep.violations}, worst excess={rep.worst_excess:.2e}, "
            f"tol_V={tol_V:.2e}, pairs={rep.checked_pairs}"
        )
    return CriterionResult(
        criterion="A7",
        description="Lyapunov decrease during reaching at tol_V = 10*step*sup|sdot|^2",
        measured=f"total violations={total}",
        expected="0 violations on every passing run",
        tolerance="tol_V per run (see details)",
        passed=total == 0,
        details=tuple(details),
    )


def gradient_check(
    scenario_name: str, samples: int = 1000, seed: int = 20260825, h: float = 1e-5
) -> float:
    """Max relative error between analytic and central-difference gradients."""
    spec = ScenarioSpec(scenario_name)
    _, surface = build_scenario(spec)
    rng = random.Random(seed)
    dim = spec.dimension
    worst = 0.0
    for _ in range(samples):
        x = tuple(rng.uniform(-10.0, 10.0) for _ in range(dim))
        ga = surface_gradient(surface, x)
        gf = surface_gradient_fd(surface, x, h)
        scale = max(1.0, max(abs(c) for c in ga))
        err = max(abs(ga[i] - gf[i]) for i in range(dim)) / scale
        worst = max(worst, err)
    return worst


def criterion_a8(ctx) -> CriterionResult:
    """Analytic surface gradients agree with the finite-difference oracle."""
    details = []
    worst = 0.0
    for name in SCENARIO_NAMES:
        err = gradient_check(name)
        worst = max(worst, err)
        details.append(f"{name}: max rel err={err:.2e}")
    return CriterionResult(
        criterion="A8",
        description="analytic vs central-difference surface gradients, 1000 states each",
        measured=f"max rel err={worst:.2e}",
        expected="<= 1e-6",
        tolerance="1e-6 relative",
        passed=worst <= 1e-6,
        details=tuple(details),
    )


def criterion_a9(ctx) -> CriterionResult:
    """First-order step-halving convergence for the explicit Euler method."""
    devs = {}
    for step in (1e-3, 5e-4):
        traj = _pure_integrator_traj(ctx, 1.0, 2.0, method="explicit-euler", step=step)
        devs[step] = compare_closed_form(traj, 1.0, 2.0)
    if devs[5e-4] <= 1e-15:
        ratio = math.inf
    else:
        ratio = devs[1e-3] / devs[5e-4]
    return CriterionResult(
        criterion="A9",
        description="halving the explicit-euler step shrinks closed-form deviation",
        measured=f"dev(1e-3)={devs[1e-3]:.2e}, dev(5e-4)={devs[5e-4]:.2e}, ratio={ratio:.2f}",
        expected="ratio >= 1.8",
        tolerance="ratio 1.8",
        passed=ratio >= 1.8,
    )


CRITERIA: Dict[str, Callable] = {
    "A1": criterion_a1,
    "A2": criterion_a2,
    "A3": criterion_a3,
    "A4": criterion_a4,
    "A5": criterion_a5,
    "A6": criterion_a6,
    "A7": criterion_a7,
    "A8": criterion_a8,
    "A9": criterion_a9,
}

SUITES: Dict[str, Tuple[str, ...]] = {
    "reaching": ("A1", "A2", "A3", "A9"),
    "disturbance": ("A4", "A5", "A6"),
    "gradients": ("A8",),
    "lyapunov": ("A7",),
    "all": tuple(sorted(CRITERIA)),
}


def run_suite(name: str) -> List[CriterionResult]:
    """Run every criterion in a suite, sharing simulated trajectories."""
    if name not in SUITES:
        raise ParameterError(
            f"unknown suite {name!r} (known: {', '.join(SUITE_NAMES)})"
        )
    ctx: Dict = {}
    return [CRITERIA[c](ctx) for c in SUITES[name]]


def format_results(results: List[CriterionResult], verbose: bool = False) -> str:
    """Fixed-width pass/fail table, one criterion per line."""
    lines = []
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        lines.append(
            f"{r.criterion:<4} {status:<5} {r.description}\n"
            f"     measured:  {r.measured}\n"
            f"     expected:  {r.expected}  [tolerance: {r.tolerance}]"
        )
        if (verbose or not r.passed) and r.details:
            lines.extend(f"       - {d}" for d in r.details)
    n_pass = sum(1 for r in results if r.passed)
    lines.append(f"{n_pass}/{len(results)} criteria passed")
    return "\n".join(lines)
