"""Run configuration: JSON schema, defaults, validation, round-trip.

A run config is a single JSON document.  Only scenario.name and controller.n
are required; everything else defaults (rk4, step 1e-4, t_end 10, eps_band
1e-3, zero disturbances).  Validation collects every violation with its field
path before raising, so a bad file is reported in one pass.  The environment
variable SMC_SEED, when set, overrides the top-level seed; disturbance
stanzas that do not pin their own seed inherit it.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

from .controller import ControllerConfig
from .dynamics import DISTURBANCE_KINDS, DisturbanceSignal
from .errors import (
    ConfigSyntaxError,
    ConfigValidationError,
    ParameterError,
    SlidingModeError,
)
from .scenarios import (
    SCENARIO_NAMES,
    ScenarioSpec,
    allowed_parameters,
    scenario_dimension,
)
from .simulator import METHODS, IntegratorConfig

SEED_ENV_VAR = "SMC_SEED"

DEFAULT_EPS_BAND = 1e-3


@dataclass(frozen=True)
class OutputPaths:
    trajectory_csv: str = "trajectory.csv"
    report_json: str = "report.json"


@dataclass(frozen=True)
class RunConfig:
    """Everything one experiment needs: plant, law, integrator, signals, outputs."""

    scenario: ScenarioSpec
    controller: ControllerConfig
    integrator: IntegratorConfig = field(default_factory=IntegratorConfig)
    disturbance: DisturbanceSignal = field(default_factory=DisturbanceSignal.zero)
    unmatched: DisturbanceSignal = field(default_factory=DisturbanceSignal.zero)
    eps_band: float = DEFAULT_EPS_BAND
    seed: int = 0
    outputs: OutputPaths = field(default_factory=OutputPaths)

    def __post_init__(self):
        if not (math.isfinite(self.eps_band) and self.eps_band > 0.0):
            raise ParameterError(f"eps_band must be > 0, got {self.eps_band!r}")


class _Checker:
    """Accumulates validation failures with dotted field paths."""

    def __init__(self):
        self.failures: List[str] = []

    def fail(self, path: str, message: str) -> None:
        self.failures.append(f"{path}: {message}")

    def section(self, doc: Dict[str, Any], key: str, known: Dict[str, Any]):
        raw = doc.get(key)
        if raw is None:
            return {}
        if not isinstance(raw, dict):
            self.fail(key, "must be a JSON object")
            return {}
        for k in raw:
            if k not in known:
                self.fail(f"{key}.{k}", f"unknown field (allowed: {', '.join(sorted(known))})")
        return raw

    def number(self, raw, path, default=None, required=False, minimum=None,
               exclusive_min=None):
        if raw is None:
            if required:
                self.fail(path, "is required")
            return default
        if isinstance(raw, bool) or not isinstance(raw, (int, float)):
            self.fail(path, f"must be a number, got {raw!r}")
            return default
        v = float(raw)
        if not math.isfinite(v):
            self.fail(path, f"must be finite, got {raw!r}")
            return default
        if minimum is not None and v < minimum:
            self.fail(path, f"must be >= {minimum}, got {raw}")
            return default
        if exclusive_min is not None and v <= exclusive_min:
            self.fail(path, f"must be > {exclusive_min}, got {raw}")
            return default
        return v

    def integer(self, raw, path, default=None, minimum=None):
        if raw is None:
            return default
        if isinstance(raw, bool) or not isinstance(raw, int):
            self.fail(path, f"must be an integer, got {raw!r}")
            return default
        if minimum is not None and raw < minimum:
            self.fail(path, f"must be >= {minimum}, got {raw}")
            return default
        return raw

    def boolean(self, raw, path, default):
        if raw is None:
            return default
        if not isinstance(raw, bool):
            self.fail(path, f"must be true or false, got {raw!r}")
            return default
        return raw

    def string(self, raw, path, default=None, choices=None, required=False):
        if raw is None:
            if required:
                self.fail(path, "is required")
            return default
        if not isinstance(raw, str):
            self.fail(path, f"must be a string, got {raw!r}")
            return default
        if choices is not None and raw not in choices:
            self.fail(path, f"must be one of: {', '.join(choices)} (got {raw!r})")
            return default
        return raw


_CONTROLLER_FIELDS = {"n": None, "d_m": 0.0, "w_uim": 0.0, "sing_tol": 1e-9,
                      "boundary_layer": 0.0}
_INTEGRATOR_FIELDS = {"method": "rk4", "step": 1e-4, "t_end": 10.0,
                      "crossing_refine": True, "refine_iters": 50}
_SIGNAL_FIELDS = {"kind": "zero", "amplitude": 0.0, "frequency": 0.0,
                  "offset": 0.0, "seed": None, "sup_abs": None}
_TOP_FIELDS = ("scenario", "controller", "integrator", "disturbance",
               "unmatched", "eps_band", "seed", "outputs")


def _parse_signal(chk: _Checker, doc: Dict[str, Any], key: str,
                  run_seed: int) -> DisturbanceSignal:
    raw = chk.section(doc, key, _SIGNAL_FIELDS)
    kind = chk.string(raw.get("kind"), f"{key}.kind", default="zero",
                      choices=DISTURBANCE_KINDS)
    amplitude = chk.number(raw.get("amplitude"), f"{key}.amplitude", default=0.0)
    frequency = chk.number(raw.get("frequency"), f"{key}.frequency", default=0.0)
    offset = chk.number(raw.get("offset"), f"{key}.offset", default=0.0)
    seed = chk.integer(raw.get("seed"), f"{key}.seed", default=run_seed)
    sup_abs = chk.number(raw.get("sup_abs"), f"{key}.sup_abs", default=None,
                         minimum=0.0)
    if chk.failures:
        return DisturbanceSignal.zero()
    try:
        return DisturbanceSignal(kind=kind, amplitude=amplitude,
                                 frequency=frequency, offset=offset,
                                 seed=seed, sup_abs=sup_abs)
    except ParameterError as exc:
        chk.fail(key, str(exc))
        return DisturbanceSignal.zero()


def parse_config(doc: Dict[str, Any]) -> RunConfig:
    """Validate a decoded JSON document and build the RunConfig.

    Raises ConfigValidationError listing every violation with its field path.
    """
    chk = _Checker()
    if not isinstance(doc, dict):
        raise ConfigValidationError("top level: config must be a JSON object")
    for k in doc:
        if k not in _TOP_FIELDS:
            chk.fail(k, f"unknown field (allowed: {', '.join(_TOP_FIELDS)})")

    seed = chk.integer(doc.get("seed"), "seed", default=0)
    if seed is None:
        seed = 0
    env_seed = os.environ.get(SEED_ENV_VAR)
    if env_seed is not None:
        try:
            seed = int(env_seed)
        except ValueError:
            chk.fail("seed", f"{SEED_ENV_VAR} must be an integer, got {env_seed!r}")

    # scenario
    scn_raw = doc.get("scenario")
    spec = None
    if not isinstance(scn_raw, dict):
        chk.fail("scenario", "is required and must be a JSON object")
    else:
        for k in scn_raw:
            if k not in ("name", "parameters", "initial_state"):
                chk.fail(f"scenario.{k}", "unknown field (allowed: name, parameters, initial_state)")
        name = chk.string(scn_raw.get("name"), "scenario.name",
                          choices=SCENARIO_NAMES, required=True)
        params: Dict[str, float] = {}
        praw = scn_raw.get("parameters")
        if praw is not None:
            if not isinstance(praw, dict):
                chk.fail("scenario.parameters", "must be a JSON object")
            elif name is not None:
                allowed = allowed_parameters(name)
                for k, v in praw.items():
                    if k not in allowed:
                        chk.fail(f"scenario.parameters.{k}",
                                 f"unknown parameter (allowed: {', '.join(sorted(allowed)) or 'none'})")
                        continue
                    val = chk.number(v, f"scenario.parameters.{k}")
                    if val is not None:
                        params[k] = val
                if "c" in params and params["c"] <= 0.0:
                    chk.fail("scenario.parameters.c", f"must be > 0, got {params['c']}")
                    del params["c"]
        x0 = None
        xraw = scn_raw.get("initial_state")
        if xraw is not None:
            if not isinstance(xraw, list) or not xraw:
                chk.fail("scenario.initial_state", "must be a non-empty array of numbers")
            else:
                coords = []
                for i, v in enumerate(xraw):
                    c = chk.number(v, f"scenario.initial_state[{i}]")
                    coords.append(0.0 if c is None else c)
                x0 = tuple(coords)
                if name is not None and len(x0) != scenario_dimension(name):
                    chk.fail("scenario.initial_state",
                             f"scenario {name!r} needs {scenario_dimension(name)} "
                             f"coordinates, got {len(x0)}")
                    x0 = None
        if name is not None:
            try:
                spec = ScenarioSpec(name=name, parameters=params, initial_state=x0)
            except SlidingModeError as exc:
                chk.fail("scenario", str(exc))

    # controller
    craw = chk.section(doc, "controller", _CONTROLLER_FIELDS)
    if "controller" not in doc:
        chk.fail("controller", "is required (at least controller.n)")
    n = chk.number(craw.get("n"), "controller.n", required=True, exclusive_min=0.0)
    d_m = chk.number(craw.get("d_m"), "controller.d_m", default=0.0, minimum=0.0)
    w_uim = chk.number(craw.get("w_uim"), "controller.w_uim", default=0.0, minimum=0.0)
    sing_tol = chk.number(craw.get("sing_tol"), "controller.sing_tol",
                          default=1e-9, exclusive_min=0.0)
    blayer = chk.number(craw.get("boundary_layer"), "controller.boundary_layer",
                        default=0.0, minimum=0.0)

    # integrator
    iraw = chk.section(doc, "integrator", _INTEGRATOR_FIELDS)
    method = chk.string(iraw.get("method"), "integrator.method", default="rk4",
                        choices=METHODS)
    step = chk.number(iraw.get("step"), "integrator.step", default=1e-4,
                      exclusive_min=0.0)
    t_end = chk.number(iraw.get("t_end"), "integrator.t_end", default=10.0,
                       exclusive_min=0.0)
    if step is not None and t_end is not None and step > t_end:
        chk.fail("integrator.step", f"must not exceed t_end = {t_end}, got {step}")
    refine = chk.boolean(iraw.get("crossing_refine"), "integrator.crossing_refine", True)
    refine_iters = chk.integer(iraw.get("refine_iters"), "integrator.refine_iters",
                               default=50, minimum=1)

    disturbance = _parse_signal(chk, doc, "disturbance", seed)
    unmatched = _parse_signal(chk, doc, "unmatched", seed)

    eps_band = chk.number(doc.get("eps_band"), "eps_band",
                          default=DEFAULT_EPS_BAND, exclusive_min=0.0)

    oraw = chk.section(doc, "outputs", {"trajectory_csv": None, "report_json": None})
    csv_name = chk.string(oraw.get("trajectory_csv"), "outputs.trajectory_csv",
                          default="trajectory.csv")
    json_name = chk.string(oraw.get("report_json"), "outputs.report_json",
                           default="report.json")

    if chk.failures:
        raise ConfigValidationError(chk.failures)

    return RunConfig(
        scenario=spec,
        controller=ControllerConfig(n=n, d_m=d_m, w_uim=w_uim,
                                    sing_tol=sing_tol, boundary_layer=blayer),
        integrator=IntegratorConfig(method=method, step=step, t_end=t_end,
                                    crossing_refine=refine, refine_iters=refine_iters),
        disturbance=disturbance,
        unmatched=unmatched,
        eps_band=eps_band,
        seed=seed,
        outputs=OutputPaths(trajectory_csv=csv_name, report_json=json_name),
    )


def load_config(path: Union[str, Path]) -> RunConfig:
    """Read, parse, and validate a JSON run config from disk."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigSyntaxError(f"cannot read config file {path}: {exc}") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigSyntaxError(f"config file {path} is not valid JSON: {exc}") from exc
    return parse_config(doc)


def _signal_dict(sig: DisturbanceSignal) -> Dict[str, Any]:
    return {
        "kind": sig.kind,
        "amplitude": sig.amplitude,
        "frequency": sig.frequency,
        "offset": sig.offset,
        "seed": sig.seed,
        "sup_abs": sig.sup_abs,
    }


def config_to_dict(cfg: RunConfig) -> Dict[str, Any]:
    """Full JSON document (all defaults explicit) reproducing cfg on reload."""
    return {
        "scenario": {
            "name": cfg.scenario.name,
            "parameters": dict(cfg.scenario.parameters),
            "initial_state": list(cfg.scenario.initial_state),
        },
        "controller": {
            "n": cfg.controller.n,
            "d_m": cfg.controller.d_m,
            "w_uim": cfg.controller.w_uim,
            "sing_tol": cfg.controller.sing_tol,
            "boundary_layer": cfg.controller.boundary_layer,
        },
        "integrator": {
            "method": cfg.integrator.method,
            "step": cfg.integrator.step,
            "t_end": cfg.integrator.t_end,
            "crossing_refine": cfg.integrator.crossing_refine,
            "refine_iters": cfg.integrator.refine_iters,
        },
        "disturbance": _signal_dict(cfg.disturbance),
        "unmatched": _signal_dict(cfg.unmatched),
        "eps_band": cfg.eps_band,
        "seed": cfg.seed,
        "outputs": {
            "trajectory_csv": cfg.outputs.trajectory_csv,
            "report_json": cfg.outputs.report_json,
        },
    }


def write_config(cfg: RunConfig, path: Union[str, Path]) -> Path:
    """Serialize cfg to JSON such that load_config(path) reproduces it."""
    p = Path(path)
    p.write_text(json.dumps(config_to_dict(cfg), indent=2, sort_keys=True) + "\n",
                 encoding="utf-8")
    return p


def get_param(cfg: RunConfig, path: str) -> float:
    """Read the numeric field at a dotted path (same paths as set_param)."""
    parts = path.split(".")
    try:
        if parts == ["eps_band"]:
            return cfg.eps_band
        if parts == ["seed"]:
            return float(cfg.seed)
        if len(parts) == 2 and parts[0] == "controller":
            if parts[1] not in _CONTROLLER_FIELDS:
                raise KeyError
            return float(getattr(cfg.controller, parts[1]))
        if len(parts) == 2 and parts[0] == "integrator":
            if parts[1] not in ("step", "t_end", "refine_iters"):
                raise KeyError
            return float(getattr(cfg.integrator, parts[1]))
        if len(parts) == 2 and parts[0] in ("disturbance", "unmatched"):
            if parts[1] not in ("amplitude", "frequency", "offset", "seed", "sup_abs"):
                raise KeyError
            return float(getattr(getattr(cfg, parts[0]), parts[1]))
        if len(parts) == 3 and parts[0] == "scenario" and parts[1] == "parameters":
            return float(cfg.scenario.parameters[parts[2]])
        raise KeyError
    except KeyError:
        raise ConfigValidationError(
            [f"{path}: not a sweepable numeric field"]
        ) from None


def set_param(cfg: RunConfig, path: str, value: float) -> RunConfig:
    """Return a copy of cfg with the numeric field at a dotted path replaced.

    Sweepable paths: controller.<field>, integrator.step/t_end/refine_iters,
    disturbance.<field>, unmatched.<field>, scenario.parameters.<name>,
    eps_band, seed.
    """
    parts = path.split(".")
    try:
        if parts == ["eps_band"]:
            return replace(cfg, eps_band=float(value))
        if parts == ["seed"]:
            return replace(cfg, seed=int(value))
        if len(parts) == 2 and parts[0] == "controller":
            if parts[1] not in _CONTROLLER_FIELDS:
                raise KeyError
            return replace(cfg, controller=replace(cfg.controller,
                                                   **{parts[1]: float(value)}))
        if len(parts) == 2 and parts[0] == "integrator":
            if parts[1] not in ("step", "t_end", "refine_iters"):
                raise KeyError
            v = int(value) if parts[1] == "refine_iters" else float(value)
            return replace(cfg, integrator=replace(cfg.integrator, **{parts[1]: v}))
        if len(parts) == 2 and parts[0] in ("disturbance", "unmatched"):
            if parts[1] not in ("amplitude", "frequency", "offset", "seed", "sup_abs"):
                raise KeyError
            v = int(value) if parts[1] == "seed" else float(value)
            sig = getattr(cfg, parts[0])
            kwargs = _signal_dict(sig)
            kwargs[parts[1]] = v
            if parts[1] == "amplitude" and sig.sup_abs == abs(sig.offset) + abs(sig.amplitude):
                kwargs["sup_abs"] = None  # keep the tight default bound
            return replace(cfg, **{parts[0]: DisturbanceSignal(**kwargs)})
        if len(parts) == 3 and parts[0] == "scenario" and parts[1] == "parameters":
            if parts[2] not in allowed_parameters(cfg.scenario.name):
                raise KeyError
            params = dict(cfg.scenario.parameters)
            params[parts[2]] = float(value)
            return replace(cfg, scenario=ScenarioSpec(
                name=cfg.scenario.name, parameters=params,
                initial_state=cfg.scenario.initial_state))
        raise KeyError
    except KeyError:
        raise ConfigValidationError(
            [f"{path}: not a sweepable numeric field"]
        ) from None
    except ParameterError as exc:
        raise ConfigValidationError([f"{path}: {exc}"]) from None
