"""Plain-text and CSV rendering shared by the service and the CLI."""

from __future__ import annotations

import io

import numpy as np

from .sim import Trajectory, consensus_error

# 17 significant digits: lossless round-trip for IEEE doubles
CSV_FORMAT = ".17g"


def trajectory_csv(traj: Trajectory) -> str:
    """Render a trajectory as CSV: t, x_{agent,component}..., consensus_error."""
    errors = consensus_error(traj)
    header = ["t"]
    header += [
        f"x{agent}_{comp}"
        for agent in range(1, traj.n_agents + 1)
        for comp in range(1, traj.state_dim + 1)
    ]
    header.append("consensus_error")
    out = io.StringIO()
    out.write(",".join(header))
    out.write("\n")
    for t, row, err in zip(traj.times, traj.states, errors):
        out.write(format(t, CSV_FORMAT))
        for v in row:
            out.write(",")
            out.write(format(v, CSV_FORMAT))
        out.write(",")
        out.write(format(err, CSV_FORMAT))
        out.write("\n")
    return out.getvalue()


def format_matrix(m, indent: str = "  ") -> str:
    """Small-matrix pretty printer for reports."""
    m = np.atleast_2d(np.asarray(m, dtype=float))
    lines = []
    for row in m:
        lines.append(indent + "[" + ", ".join(format(v, ".10g") for v in row) + "]")
    return "\n".join(lines)
