"""Built-in benchmark scenarios resolvable by name.

Each scenario is a control-affine SISO plant plus a linear sliding surface
with slope parameter c (default 1, giving first-order dynamics x1dot = -c*x1
on the surface):

    pure-integrator    x' = u + d,                    s = x
    double-integrator  x1' = x2 + w, x2' = u + d,     s = c*x1 + x2
    pendulum           x1' = x2 + w, x2' = -a*sin(x1) + u + d,  s = c*x1 + x2

The scalar unmatched signal w enters the first state equation (for the
one-dimensional pure integrator it shares the only channel).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, Optional, Tuple

from .dynamics import DisturbanceSignal, SlidingSurface, SystemModel, Vector
from .errors import DimensionError, ParameterError

SCENARIO_NAMES = ("pure-integrator", "double-integrator", "pendulum")

_DIMENSIONS = {"pure-integrator": 1, "double-integrator": 2, "pendulum": 2}

_PARAMETER_DEFAULTS: Dict[str, Dict[str, float]] = {
    "pure-integrator": {},
    "double-integrator": {"c": 1.0},
    "pendulum": {"a": 1.0, "c": 1.0},
}

_DEFAULT_INITIAL_STATE: Dict[str, Vector] = {
    "pure-integrator": (2.0,),
    "double-integrator": (1.0, 1.0),
    "pendulum": (0.5, 0.0),
}


def known_scenarios() -> Tuple[str, ...]:
    return SCENARIO_NAMES


def scenario_dimension(name: str) -> int:
    _require_known(name)
    return _DIMENSIONS[name]


def allowed_parameters(name: str) -> Dict[str, float]:
    _require_known(name)
    return dict(_PARAMETER_DEFAULTS[name])


def default_initial_state(name: str) -> Vector:
    _require_known(name)
    return _DEFAULT_INITIAL_STATE[name]


def _require_known(name: str) -> None:
    if name not in SCENARIO_NAMES:
        raise ParameterError(
            f"unknown scenario {name!r} (known: {', '.join(SCENARIO_NAMES)})"
        )


@dataclass(frozen=True)
class ScenarioSpec:
    """Named scenario with parameter overrides and an initial state.

    Parameters are normalized against the scenario's defaults at construction
    so two specs naming the same plant compare equal field-for-field.
    """

    name: str
    parameters: Dict[str, float] = field(default_factory=dict)
    initial_state: Optional[Vector] = None

    def __post_init__(self):
        _require_known(self.name)
        defaults = _PARAMETER_DEFAULTS[self.name]
        params = dict(defaults)
        for key, val in self.parameters.items():
            if key not in defaults:
                allowed = ", ".join(sorted(defaults)) or "none"
                raise ParameterError(
                    f"scenario {self.name!r} has no parameter {key!r} "
                    f"(allowed: {allowed})"
                )
            params[key] = float(val)
        for key, val in params.items():
            if not math.isfinite(val):
                raise ParameterError(f"scenario parameter {key} must be finite")
        if "c" in params and params["c"] <= 0.0:
            raise ParameterError(
                f"surface slope c must be > 0 for stable sliding dynamics, "
                f"got {params['c']}"
            )
        object.__setattr__(self, "parameters", params)
        dim = _DIMENSIONS[self.name]
        x0 = self.initial_state
        if x0 is None:
            x0 = _DEFAULT_INITIAL_STATE[self.name]
        x0 = tuple(float(v) for v in x0)
        if len(x0) != dim:
            raise DimensionError(
                f"scenario {self.name!r} needs a {dim}-dimensional initial "
                f"state, got {len(x0)} coordinates"
            )
        for v in x0:
            if not math.isfinite(v):
                raise ParameterError("initial state coordinates must be finite")
        object.__setattr__(self, "initial_state", x0)

    @property
    def dimension(self) -> int:
        return _DIMENSIONS[self.name]


def _unmatched_fn(dim: int, signal: DisturbanceSignal):
    w = signal.as_callable()
    if dim == 1:
        return lambda x, t: (w(t),)
    return lambda x, t: (w(t), 0.0)


def build_scenario(
    spec: ScenarioSpec,
    matched: Optional[DisturbanceSignal] = None,
    unmatched: Optional[DisturbanceSignal] = None,
) -> Tuple[SystemModel, SlidingSurface]:
    """Materialize a ScenarioSpec into a SystemModel and SlidingSurface."""
    if matched is None:
        matched = DisturbanceSignal.zero()
    if unmatched is None:
        unmatched = DisturbanceSignal.zero()
    dim = spec.dimension
    p = spec.parameters

    if spec.name == "pure-integrator":
        model = SystemModel(
            dimension=1,
            drift=lambda x, t: (0.0,),
            input_vector=lambda x: (1.0,),
            matched_disturbance=matched,
            unmatched_disturbance=_unmatched_fn(1, unmatched),
            unmatched_bound_vector=(unmatched.sup_abs,),
        )
        surface = SlidingSurface(
            value=lambda x: x[0],
            gradient=lambda x: (1.0,),
            description="s = x",
            dimension=1,
        )
        return model, surface

    c = p["c"]
    grad = (c, 1.0)
    surface = SlidingSurface(
        value=lambda x: c * x[0] + x[1],
        gradient=lambda x: grad,
        description=f"s = {c:g}*x1 + x2",
        dimension=2,
    )
    if spec.name == "double-integrator":
        drift = lambda x, t: (x[1], 0.0)
    else:
        a = p["a"]
        drift = lambda x, t: (x[1], -a * math.sin(x[0]))
    model = SystemModel(
        dimension=2,
        drift=drift,
        input_vector=lambda x: (0.0, 1.0),
        matched_disturbance=matched,
        unmatched_disturbance=_unmatched_fn(2, unmatched),
        unmatched_bound_vector=(unmatched.sup_abs, 0.0),
    )
    return model, surface


def implied_w_uim(spec: ScenarioSpec, unmatched: DisturbanceSignal) -> float:
    """Tight bound on |(ds/dx . b)^-1 (ds/dx . w_u)| for the given w signal.

    All built-in scenarios have ds/dx . b = 1, so the bound is |ds/dx[0]|
    times the signal supremum.
    """
    if spec.dimension == 1:
        return unmatched.sup_abs
    return abs(spec.parameters["c"]) * unmatched.sup_abs
