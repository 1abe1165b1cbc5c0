"""Classic sliding mode control law and reaching-law closed forms.

For a plant ``xdot = f + b*u + b*d + w_u`` with switching function ``s(x)``,
write ``B = ds/dx . b``, ``F = ds/dx . f``.  The implemented law is

    u = -(F + n*sgn(s))/B - (d_m + w_uim)*sgn(B)*sgn(s)

which enforces the reaching condition ``s*sdot <= -n*|s|`` whenever the
disturbance bounds hold (|d| <= d_m and |(ds/dx . w_u)/B| <= w_uim).  An
optional boundary layer replaces sgn(s) with the saturated surrogate
``clip(s/boundary_layer, -1, 1)``; it is a numerical device only and defaults
to off.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

from .dynamics import (
    SlidingSurface,
    StateLike,
    SystemModel,
    sgn,
    state_coords,
    surface_gradient,
    surface_value,
)
from .errors import NumericsError, ParameterError, SingularSurfaceGain


@dataclass(frozen=True)
class ControllerConfig:
    """Reaching gain and disturbance-bound estimates for the switching law.

    n : reaching gain, must be positive.
    d_m : bound estimate on |d| (matched channel).
    w_uim : bound estimate on |(ds/dx . b)^-1 (ds/dx . w_u)|, the unmatched
        disturbance seen as an equivalent input disturbance.
    sing_tol : hard lower threshold on |ds/dx . b|; below it the law has no
        bounded solution and control raises SingularSurfaceGain.
    boundary_layer : half-width of the saturated-sgn region; 0 = pure sgn.
    """

    n: float
    d_m: float = 0.0
    w_uim: float = 0.0
    sing_tol: float = 1e-9
    boundary_layer: float = 0.0

    def __post_init__(self):
        for name in ("n", "d_m", "w_uim", "sing_tol", "boundary_layer"):
            v = getattr(self, name)
            if not math.isfinite(v):
                raise ParameterError(f"controller {name} must be finite, got {v!r}")
        if self.n <= 0.0:
            raise ParameterError(f"reaching gain n must be > 0, got {self.n}")
        if self.d_m < 0.0:
            raise ParameterError(f"d_m must be >= 0, got {self.d_m}")
        if self.w_uim < 0.0:
            raise ParameterError(f"w_uim must be >= 0, got {self.w_uim}")
        if self.sing_tol <= 0.0:
            raise ParameterError(f"sing_tol must be > 0, got {self.sing_tol}")
        if self.boundary_layer < 0.0:
            raise ParameterError(
                f"boundary_layer must be >= 0, got {self.boundary_layer}"
            )


@dataclass(frozen=True)
class ControlDecision:
    """Control value plus the contracted quantities it was assembled from.

    switching_term is the coefficient multiplying sgn_eff(s):
    u = -F/B - switching_term*sgn_eff(s) with
    switching_term = n/B + (d_m + w_uim)*sgn(B).  d_g_term and w_uig_term are
    the disturbance-guess contributions d_m*sgn(B)*sgn_eff(s) and
    w_uim*sgn(B)*sgn_eff(s).
    """

    u: float
    B: float
    F: float
    W: float
    s: float
    switching_term: float
    d_g_term: float
    w_uig_term: float


def sgn_eff(s: float, boundary_layer: float) -> float:
    """sgn(s) for boundary_layer = 0, else the clipped linear surrogate."""
    if boundary_layer == 0.0:
        return float(sgn(s))
    r = s / boundary_layer
    if r > 1.0:
        return 1.0
    if r < -1.0:
        return -1.0
    return r


def switching_control(
    B: float,
    F: float,
    s: float,
    n: float,
    d_m: float = 0.0,
    w_uim: float = 0.0,
    boundary_layer: float = 0.0,
    sing_tol: float = 1e-9,
) -> float:
    """Scalar core of the law; shared by control() and the simulator loop."""
    if abs(B) < sing_tol:
        raise SingularSurfaceGain(
            f"surface input gain |ds/dx . b| = {abs(B):.3e} is below "
            f"sing_tol = {sing_tol:.3e}; control law is singular"
        )
    e = sgn_eff(s, boundary_layer)
    u = -(F + n * e) / B - (d_m + w_uim) * sgn(B) * e
    if not math.isfinite(u):
        raise NumericsError(f"control law produced a non-finite value: {u!r}")
    return u


def control(
    config: ControllerConfig,
    model: SystemModel,
    surface: SlidingSurface,
    x: StateLike,
    t: float,
) -> ControlDecision:
    """Evaluate the sliding mode law at (x, t) and return the full decision.

    Raises SingularSurfaceGain when |ds/dx . b| < sing_tol and NumericsError
    when any intermediate is non-finite.
    """
    xs = state_coords(x, model.dimension)
    g = surface_gradient(surface, xs)
    f = model.drift(xs, t)
    b = model.input_vector(xs)
    w = model.unmatched_disturbance(xs, t)
    dim = model.dimension
    B = sum(g[i] * b[i] for i in range(dim))
    F = sum(g[i] * f[i] for i in range(dim))
    W = sum(g[i] * w[i] for i in range(dim))
    s = surface_value(surface, xs)
    for name, v in (("B", B), ("F", F), ("W", W)):
        if not math.isfinite(v):
            raise NumericsError(f"contracted quantity {name} is non-finite: {v!r}")

    u = switching_control(
        B, F, s, config.n, config.d_m, config.w_uim,
        config.boundary_layer, config.sing_tol,
    )

    e = sgn_eff(s, config.boundary_layer)
    sB = sgn(B)
    switching_term = config.n / B + (config.d_m + config.w_uim) * sB
    d_g_term = config.d_m * sB * e
    w_uig_term = config.w_uim * sB * e
    u_check = -F / B - switching_term * e
    if abs(u - u_check) > 1e-9 * max(1.0, abs(u)):
        raise NumericsError(
            f"control decomposition mismatch: u = {u!r}, "
            f"-F/B - switching_term*sgn_eff(s) = {u_check!r}"
        )
    return ControlDecision(
        u=u, B=B, F=F, W=W, s=s,
        switching_term=switching_term,
        d_g_term=d_g_term,
        w_uig_term=w_uig_term,
    )


def closed_form_s(n: float, s0: float, t: float) -> float:
    """Exact solution of sdot = -n*sgn(s): linear descent, then zero.

    Returns s0 - n*t*sgn(s0) for t <= |s0|/n and 0 afterwards (once the
    surface is reached it is never left).
    """
    if not (math.isfinite(n) and n > 0.0):
        raise ParameterError(f"reaching gain n must be > 0, got {n!r}")
    if not (math.isfinite(t) and t >= 0.0):
        raise ParameterError(f"time must be >= 0, got {t!r}")
    if not math.isfinite(s0):
        raise ParameterError(f"s0 must be finite, got {s0!r}")
    t_r = abs(s0) / n
    if t >= t_r:
        return 0.0
    return s0 - n * t * sgn(s0)


def reaching_time_predicted(n: float, s0: float) -> float:
    """Finite reaching time |s0|/n of the law sdot = -n*sgn(s)."""
    if not (math.isfinite(n) and n > 0.0):
        raise ParameterError(f"reaching gain n must be > 0, got {n!r}")
    if not math.isfinite(s0):
        raise ParameterError(f"s0 must be finite, got {s0!r}")
    return abs(s0) / n


def reaching_residual(
    config: ControllerConfig,
    model: SystemModel,
    surface: SlidingSurface,
    x: StateLike,
    t: float,
    d_value: float,
) -> float:
    """Pointwise reaching-condition residual s*sdot + n*|s|.

    sdot is the closed-loop surface velocity with the matched disturbance
    forced to d_value (the actual sample, not the bound).  A nonpositive
    residual certifies the reaching condition at (x, t); its negation is the
    margin by which s*sdot undershoots -n*|s|.
    """
    if not math.isfinite(d_value):
        raise ParameterError(f"d_value must be finite, got {d_value!r}")
    dec = control(config, model, surface, x, t)
    xs = state_coords(x, model.dimension)
    g = surface_gradient(surface, xs)
    f = model.drift(xs, t)
    b = model.input_vector(xs)
    w = model.unmatched_disturbance(xs, t)
    ud = dec.u + d_value
    sdot = sum(g[i] * (f[i] + b[i] * ud + w[i]) for i in range(model.dimension))
    return dec.s * sdot + config.n * abs(dec.s)


def margin_report(
    config: ControllerConfig,
    model: SystemModel,
    surface: SlidingSurface,
    x: StateLike,
    t: float,
    d_value: float,
):
    """Margin m = -residual, with the rate m/(|s|*|B|) when that is defined.

    The rate aggregates the matched and unmatched margin coefficients; it is
    reported as None (not applicable) when |s|*|B| = 0.
    """
    from .analysis import MarginReport

    dec = control(config, model, surface, x, t)
    m = -reaching_residual(config, model, surface, x, t, d_value)
    denom = abs(dec.s) * abs(dec.B)
    rate: Optional[float] = m / denom if denom > 0.0 else None
    return MarginReport(m=m, rate=rate)
