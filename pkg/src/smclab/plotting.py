"""Figure rendering for the report path (opt-in via the CLI --plot flag).

Uses the Agg backend so runs work headless; figures are written next to the
CSV/JSON output.  Long trajectories are strided down to a plottable number of
points, which does not affect any reported metric (figures are presentation
only, the CSV stays lossless).
"""

from __future__ import annotations

from pathlib import Path
from typing import List, Union

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .simulator import Trajectory

_MAX_POINTS = 20000


def _strided(traj: Trajectory):
    n = len(traj.samples)
    stride = max(1, n // _MAX_POINTS)
    picks = list(traj.samples[::stride])
    if picks and picks[-1] is not traj.samples[-1]:
        picks.append(traj.samples[-1])
    return picks


def render_report_figures(
    traj: Trajectory, out_dir: Union[str, Path], stem: str
) -> List[Path]:
    """Write <stem>_surface.png and <stem>_states.png; return the paths."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    smps = _strided(traj)
    t = [s.t for s in smps]
    paths = []

    fig, (ax_s, ax_v) = plt.subplots(2, 1, sharex=True, figsize=(8, 6))
    ax_s.plot(t, [s.s for s in smps], lw=0.8)
    ax_s.axhline(0.0, color="k", lw=0.5)
    ax_s.set_ylabel("s(t)")
    ax_s.set_title(traj.surface_label or "switching function")
    ax_v.plot(t, [s.V for s in smps], lw=0.8, color="tab:red")
    ax_v.set_ylabel("V = 0.25 s^2")
    ax_v.set_xlabel("t")
    fig.tight_layout()
    p = out / f"{stem}_surface.png"
    fig.savefig(p, dpi=120)
    plt.close(fig)
    paths.append(p)

    dim = len(smps[0].x) if smps else 0
    fig, (ax_x, ax_u) = plt.subplots(2, 1, sharex=True, figsize=(8, 6))
    for i in range(dim):
        ax_x.plot(t, [s.x[i] for s in smps], lw=0.8, label=f"x{i}")
    ax_x.set_ylabel("state")
    ax_x.legend(loc="best", fontsize=8)
    ax_x.set_title(traj.model_label or "closed-loop states")
    ax_u.plot(t, [s.u for s in smps], lw=0.5, color="tab:green")
    ax_u.set_ylabel("u(t)")
    ax_u.set_xlabel("t")
    fig.tight_layout()
    p = out / f"{stem}_states.png"
    fig.savefig(p, dpi=120)
    plt.close(fig)
    paths.append(p)
    return paths
