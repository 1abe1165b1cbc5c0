"""Trajectory post-processing: reaching time, chattering, Lyapunov checks.

"Reached" in discrete time means |s| <= eps_band persisting for at least
PERSIST consecutive samples; persistence rejects transversal crossings of the
band during the approach.  All functions are pure and operate on immutable
trajectories.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from typing import List, Optional, Tuple

from .controller import ControllerConfig, closed_form_s, margin_report
from .dynamics import SlidingSurface, SystemModel
from .errors import DataError, NotReachedError, ParameterError
from .simulator import Trajectory

PERSIST = 10


@dataclass(frozen=True)
class ReachReport:
    """Measured vs predicted reaching time for one trajectory.

    bound_satisfied is t_reach_measured <= t_r_predicted + step; it is None
    when the band was never persistently entered.
    """

    t_reach_measured: Optional[float]
    eps_band: float
    t_r_predicted: float
    bound_satisfied: Optional[bool]


@dataclass(frozen=True)
class ChatterReport:
    """Post-reach band occupancy and switching statistics."""

    band_amplitude: float
    switch_count: int
    mean_switch_freq: float


@dataclass(frozen=True)
class MarginReport:
    """Reaching-condition margin m = -(s*sdot + n|s|) at one state.

    rate is m normalized by |s|*|B| (the aggregate margin coefficient); None
    when |s|*|B| = 0 and the normalization is not applicable.
    """

    m: float
    rate: Optional[float]


@dataclass(frozen=True)
class LyapunovReport:
    """Discrete monotonicity check of V = 0.25*s^2 during reaching."""

    violations: int
    worst_excess: float
    checked_pairs: int


def estimate_sup_sdot(traj: Trajectory) -> float:
    """Empirical stand-in for sup|sdot|: max slope |ds/dt| between samples."""
    sup = 0.0
    smps = traj.samples
    for k in range(len(smps) - 1):
        dt = smps[k + 1].t - smps[k].t
        if dt > 0.0:
            rate = abs(smps[k + 1].s - smps[k].s) / dt
            if rate > sup:
                sup = rate
    return sup


def default_eps_band(traj: Trajectory) -> float:
    """max(1e-3, 4*step*sup|sdot|); must exceed the chattering band or reach
    is never detected."""
    return max(1e-3, 4.0 * traj.integrator.step * estimate_sup_sdot(traj))


def measure_reaching_time(traj: Trajectory, eps_band: float) -> ReachReport:
    """First entry into |s| <= eps_band persisting PERSIST consecutive samples."""
    if not (math.isfinite(eps_band) and eps_band > 0.0):
        raise ParameterError(f"eps_band must be > 0, got {eps_band!r}")
    if not traj.samples:
        raise DataError("cannot measure reaching time of an empty trajectory")
    s0 = traj.samples[0].s
    t_r_pred = abs(s0) / traj.controller.n
    t_reach: Optional[float] = None
    run_start = 0.0
    run_len = 0
    for smp in traj.samples:
        if abs(smp.s) <= eps_band:
            if run_len == 0:
                run_start = smp.t
            run_len += 1
            if run_len >= PERSIST:
                t_reach = run_start
                break
        else:
            run_len = 0
    bound: Optional[bool] = None
    if t_reach is not None:
        bound = t_reach <= t_r_pred + traj.integrator.step
    return ReachReport(
        t_reach_measured=t_reach,
        eps_band=eps_band,
        t_r_predicted=t_r_pred,
        bound_satisfied=bound,
    )


def chattering_metrics(traj: Trajectory, reach: ReachReport) -> ChatterReport:
    """Band amplitude and sign-switch statistics of the sliding regime.

    The regime is taken to start where |s| first attains its post-reach
    minimum: the tail of the descent through the detection band still belongs
    to reaching, and including it would report eps_band instead of the
    discretization-induced chattering band.
    """
    if reach.t_reach_measured is None:
        raise NotReachedError(
            "chattering metrics are undefined: the band was never reached"
        )
    post = [smp for smp in traj.samples if smp.t >= reach.t_reach_measured]
    start = len(post) - 1
    for i in range(len(post) - 1):
        if abs(post[i + 1].s) >= abs(post[i].s):
            start = i
            break
    t0 = post[start].t
    band = 0.0
    switches = 0
    last_sign = 0
    t_last = t0
    for smp in post[start:]:
        a = abs(smp.s)
        if a > band:
            band = a
        sg = 1 if smp.s > 0.0 else (-1 if smp.s < 0.0 else 0)
        if sg != 0:
            if last_sign != 0 and sg != last_sign:
                switches += 1
            last_sign = sg
        t_last = smp.t
    elapsed = t_last - t0
    freq = switches / elapsed if elapsed > 0.0 else 0.0
    return ChatterReport(
        band_amplitude=band, switch_count=switches, mean_switch_freq=freq
    )


def verify_reaching_bound(
    traj: Trajectory, config: ControllerConfig, eps_band: float
) -> Tuple[bool, ReachReport]:
    """Check t_reach <= |s(0)|/n + 2*step (valid when the bounds d_m, w_uim hold)."""
    report = measure_reaching_time(traj, eps_band)
    s0 = traj.samples[0].s
    limit = abs(s0) / config.n + 2.0 * traj.integrator.step
    ok = report.t_reach_measured is not None and report.t_reach_measured <= limit
    return ok, report


def lyapunov_monotonicity(
    traj: Trajectory, tol_V: float, eps_band: Optional[float] = None
) -> LyapunovReport:
    """Count V(t_{k+1}) > V(t_k) + tol_V over consecutive samples before reach.

    V decreases strictly in continuous time; tol_V absorbs the discretization
    slack.  Samples past the measured reach time (chattering) are excluded;
    if the band is never reached every pair is checked.
    """
    if not (math.isfinite(tol_V) and tol_V > 0.0):
        raise ParameterError(f"tol_V must be > 0, got {tol_V!r}")
    band = default_eps_band(traj) if eps_band is None else eps_band
    reach = measure_reaching_time(traj, band)
    cutoff = reach.t_reach_measured if reach.t_reach_measured is not None else math.inf
    violations = 0
    worst = 0.0
    checked = 0
    smps = traj.samples
    for k in range(len(smps) - 1):
        if smps[k + 1].t > cutoff:
            break
        checked += 1
        excess = smps[k + 1].V - smps[k].V - tol_V
        if excess > 0.0:
            violations += 1
            if excess > worst:
                worst = excess
    return LyapunovReport(violations=violations, worst_excess=worst, checked_pairs=checked)


def compare_closed_form(traj: Trajectory, n: float, s0: float) -> float:
    """Max |s_sample - closed_form_s(n, s0, t_sample)| over the trajectory."""
    worst = 0.0
    for smp in traj.samples:
        dev = abs(smp.s - closed_form_s(n, s0, smp.t))
        if dev > worst:
            worst = dev
    return worst


def spot_check_margins(
    config: ControllerConfig,
    model: SystemModel,
    surface: SlidingSurface,
    traj: Trajectory,
    count: int = 100,
    seed: int = 0,
) -> float:
    """Minimum reaching-condition margin over `count` random trajectory samples.

    Uses the disturbance value recorded at each sample, so a nonnegative
    result certifies the reaching condition held pointwise along the run.
    """
    if count < 1:
        raise ParameterError(f"count must be >= 1, got {count}")
    if not traj.samples:
        raise DataError("cannot spot-check margins on an empty trajectory")
    rng = random.Random(seed)
    k = min(count, len(traj.samples))
    picks = rng.sample(range(len(traj.samples)), k)
    worst = math.inf
    for i in picks:
        smp = traj.samples[i]
        rep = margin_report(config, model, surface, smp.x, smp.t, smp.d)
        if rep.m < worst:
            worst = rep.m
    return worst


def margin_reports_along(
    config: ControllerConfig,
    model: SystemModel,
    surface: SlidingSurface,
    traj: Trajectory,
    stride: int = 1,
) -> List[MarginReport]:
    """MarginReport at every stride-th sample, in trajectory order."""
    if stride < 1:
        raise ParameterError(f"stride must be >= 1, got {stride}")
    out = []
    for i in range(0, len(traj.samples), stride):
        smp = traj.samples[i]
        out.append(margin_report(config, model, surface, smp.x, smp.t, smp.d))
    return out
