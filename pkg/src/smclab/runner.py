"""Experiment orchestration: single runs, parameter sweeps, file output.

run_scenario writes the trajectory CSV (exact header
``t,x0,...,x{dim-1},s,u,V,d,w_norm``, 17-significant-digit decimals for
lossless round-trips) and a JSON report with reach, chattering, and Lyapunov
stanzas.  Simulator failures still produce both files (partial trajectory
plus an error stanza) before the exception propagates.  Analysis outcomes
such as bound_satisfied=false are data, not errors.
"""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Union

from . import analysis
from .config import RunConfig, config_to_dict, get_param, set_param
from .errors import SlidingModeError
from .scenarios import build_scenario
from .simulator import Trajectory, simulate

SWEEP_HEADER = "param,value,t_reach,band_amplitude,bound_satisfied"


@dataclass
class RunResult:
    trajectory: Trajectory
    report: Dict[str, Any]
    csv_path: Optional[Path]
    json_path: Optional[Path]
    figure_paths: List[Path]
    error: Optional[str]


def _g17(v: float) -> str:
    return f"{v:.17g}"


def write_trajectory_csv(traj: Trajectory, path: Union[str, Path], dim: int) -> Path:
    p = Path(path)
    lines = ["t," + ",".join(f"x{i}" for i in range(dim)) + ",s,u,V,d,w_norm"]
    for smp in traj.samples:
        cells = [_g17(smp.t)]
        cells.extend(_g17(c) for c in smp.x)
        cells.extend(_g17(v) for v in (smp.s, smp.u, smp.V, smp.d, smp.w_norm))
        lines.append(",".join(cells))
    p.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return p


def trajectory_to_json_dict(traj: Trajectory) -> Dict[str, Any]:
    """Sample array with TrajectorySample field names, plus config echoes."""
    return {
        "model": traj.model_label,
        "surface": traj.surface_label,
        "controller": dataclasses.asdict(traj.controller),
        "integrator": dataclasses.asdict(traj.integrator),
        "samples": [
            {
                "t": smp.t, "x": list(smp.x), "s": smp.s, "u": smp.u,
                "V": smp.V, "d": smp.d, "w_norm": smp.w_norm,
                "refined": smp.refined,
            }
            for smp in traj.samples
        ],
    }


def _analyze(traj: Trajectory, eps_band: float) -> Dict[str, Any]:
    """Reach / chatter / Lyapunov stanzas for the report JSON."""
    out: Dict[str, Any] = {"reach": None, "chatter": None, "lyapunov": None}
    if not traj.samples:
        return out
    reach = analysis.measure_reaching_time(traj, eps_band)
    out["reach"] = dataclasses.asdict(reach)
    if reach.t_reach_measured is not None:
        chat = analysis.chattering_metrics(traj, reach)
        out["chatter"] = dataclasses.asdict(chat)
    else:
        out["chatter"] = {"reason": "band never persistently entered"}
    sup = analysis.estimate_sup_sdot(traj)
    tol_V = 10.0 * traj.integrator.step * sup * sup
    if tol_V > 0.0:
        lyap = analysis.lyapunov_monotonicity(traj, tol_V, eps_band)
        out["lyapunov"] = dict(dataclasses.asdict(lyap), tol_V=tol_V)
    else:
        out["lyapunov"] = {"reason": "trajectory has no surface motion"}
    return out


def run_scenario(
    cfg: RunConfig,
    out_dir: Union[str, Path] = ".",
    write_files: bool = True,
    plot: bool = False,
) -> RunResult:
    """Simulate one configuration and write its trajectory CSV + report JSON.

    On SingularSurfaceGain or DivergenceError the partial trajectory and a
    report with an error stanza are still written, then the exception
    propagates to the caller.
    """
    model, surface = build_scenario(cfg.scenario, cfg.disturbance, cfg.unmatched)
    out = Path(out_dir)
    error: Optional[str] = None
    caught: Optional[SlidingModeError] = None
    try:
        traj = simulate(
            model, surface, cfg.controller, cfg.integrator,
            cfg.scenario.initial_state, model_label=cfg.scenario.name,
        )
    except SlidingModeError as exc:
        caught = exc
        error = f"{type(exc).__name__}: {exc}"
        traj = getattr(exc, "trajectory", None)
        if traj is None:
            traj = Trajectory(samples=[], controller=cfg.controller,
                              integrator=cfg.integrator,
                              model_label=cfg.scenario.name,
                              surface_label=surface.description)

    report: Dict[str, Any] = {
        "config": config_to_dict(cfg),
        "samples": len(traj.samples),
        "error": error,
    }
    report.update(_analyze(traj, cfg.eps_band))

    csv_path = json_path = None
    figures: List[Path] = []
    if write_files:
        out.mkdir(parents=True, exist_ok=True)
        csv_path = write_trajectory_csv(
            traj, out / cfg.outputs.trajectory_csv, model.dimension
        )
        if plot and traj.samples:
            from .plotting import render_report_figures

            figures = render_report_figures(traj, out, Path(cfg.outputs.trajectory_csv).stem)
        report["files"] = {
            "trajectory_csv": csv_path.name,
            "report_json": cfg.outputs.report_json,
            "figures": [f.name for f in figures],
        }
        json_path = out / cfg.outputs.report_json
        json_path.write_text(
            json.dumps(report, indent=2, sort_keys=True) + "\n", encoding="utf-8"
        )

    if caught is not None:
        raise caught
    return RunResult(
        trajectory=traj, report=report, csv_path=csv_path,
        json_path=json_path, figure_paths=figures, error=error,
    )


def sweep_rows(cfg: RunConfig, param: str, values: Sequence[float]) -> List[str]:
    """One CSV row per value; runs are independent of each other.

    Rows hold t_reach, band_amplitude, and bound_satisfied; the numeric cells
    are empty when the band was never reached, and bound_satisfied is false
    both when the bound fails and when the run errored out.
    """
    rows = []
    for v in values:
        cfg_v = set_param(cfg, param, v)
        t_cell = band_cell = ""
        bound = False
        try:
            result = run_scenario(cfg_v, write_files=False)
        except SlidingModeError:
            rows.append(f"{param},{_g17(float(v))},,,false")
            continue
        reach = result.report["reach"]
        if reach is not None and reach["t_reach_measured"] is not None:
            t_cell = _g17(reach["t_reach_measured"])
            bound = bool(reach["bound_satisfied"])
            chat = result.report["chatter"]
            if chat is not None and "band_amplitude" in chat:
                band_cell = _g17(chat["band_amplitude"])
        rows.append(
            f"{param},{_g17(float(v))},{t_cell},{band_cell},"
            f"{'true' if bound else 'false'}"
        )
    return rows


def sweep(
    cfg: RunConfig,
    param: str,
    values: Sequence[float],
    out_dir: Union[str, Path] = ".",
    csv_name: str = "sweep.csv",
) -> Path:
    """Run the sweep and write the aggregated CSV (header + one row per value)."""
    get_param(cfg, param)  # reject invalid paths even when values is empty
    rows = sweep_rows(cfg, param, values)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    p = out / csv_name
    p.write_text("\n".join([SWEEP_HEADER] + rows) + "\n", encoding="utf-8")
    return p
