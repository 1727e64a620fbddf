"""Result persistence: metadata JSON, summary CSV, snapshots, profile SVGs.

All text outputs use LF line endings, `,` separators, and `.` decimals,
and are byte-deterministic for identical inputs; the only
run-to-run-varying value (the wall-clock timestamp) lives in its own
metadata field so the rest of the document can be compared bytewise.
"""

from __future__ import annotations

import json
import math
import os
import platform
from datetime import datetime, timezone

import numpy as np
import scipy

from .pde_core import write_field_csv, write_snapshot
from .svgplot import line_plot

try:
    from importlib.metadata import version as _dist_version
    _PKG_VERSION = _dist_version("artifact")
except Exception:  # editable checkout without installed metadata
    _PKG_VERSION = "unknown"

__all__ = [
    "json_safe", "write_json", "write_metadata", "write_summary_csv",
    "persist_trajectory",
]


def json_safe(obj):
    """Copy with non-finite floats replaced by strings, for strict JSON."""
    if isinstance(obj, dict):
        return {k: json_safe(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [json_safe(v) for v in obj]
    if isinstance(obj, (np.floating, np.integer)):
        obj = obj.item()
    if isinstance(obj, float) and not math.isfinite(obj):
        return "inf" if obj > 0 else ("-inf" if obj < 0 else "nan")
    return obj


def write_json(path, obj):
    text = json.dumps(json_safe(obj), sort_keys=True, indent=2, allow_nan=False)
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        handle.write(text + "\n")
    return path


def write_metadata(path, command, config_echo, seed=None):
    """Persist the resolved config plus environment info.

    The timestamp is a separate top-level field; everything else is a
    pure function of the inputs.
    """
    meta = {
        "command": command,
        "config": config_echo,
        "seed": seed,
        "versions": {
            "package": _PKG_VERSION,
            "python": platform.python_version(),
            "numpy": np.__version__,
            "scipy": scipy.__version__,
        },
        "timestamp": datetime.now(timezone.utc).isoformat(),
    }
    return write_json(path, meta)


def write_summary_csv(path, traj):
    """Per-snapshot summary: time, total mass, min and max cell value."""
    lines = ["t,mass,min,max"]
    for t, snap in zip(traj.times, traj.snapshots):
        vals = snap.values
        mass = float(np.sum(vals)) * snap.grid.dx
        lines.append(f"{t:.17g},{mass:.17g},{float(np.min(vals)):.17g},"
                     f"{float(np.max(vals)):.17g}")
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        handle.write("\n".join(lines) + "\n")
    return path


def persist_trajectory(outdir, traj, command, config_echo, seed, formats):
    """Write the standard artifact set for one run; returns file list."""
    os.makedirs(outdir, exist_ok=True)
    written = []

    written.append(write_metadata(os.path.join(outdir, "metadata.json"),
                                  command, config_echo, seed))
    written.append(write_summary_csv(os.path.join(outdir, "summary.csv"), traj))

    for i, (t, snap) in enumerate(zip(traj.times, traj.snapshots)):
        path = os.path.join(outdir, f"snapshot_{i:06d}.bin")
        write_snapshot(path, snap, float(t))
        written.append(path)
        if traj.v_snapshots:
            for j, v_field in enumerate(traj.v_snapshots[i], start=1):
                vpath = os.path.join(outdir, f"v{j}_{i:06d}.bin")
                write_snapshot(vpath, v_field, float(t))
                written.append(vpath)

    if "csv" in formats:
        path = os.path.join(outdir, "final_state.csv")
        write_field_csv(path, traj.final)
        written.append(path)

    if "svg" in formats:
        x = traj.grid.centers
        for i, (t, snap) in enumerate(zip(traj.times, traj.snapshots)):
            path = os.path.join(outdir, f"profile_{i:06d}.svg")
            line_plot(path, x, [snap.values], title=f"t = {t:.6g}",
                      xlabel="x", ylabel="rho")
            written.append(path)
        # one overlay of up to six evenly spaced profiles for quick reading
        count = len(traj.snapshots)
        picks = sorted(set(np.linspace(0, count - 1, min(6, count)).astype(int)))
        path = os.path.join(outdir, "profiles_overlay.svg")
        line_plot(
            path, x,
            [traj.snapshots[i].values for i in picks],
            labels=[f"t = {traj.times[i]:.6g}" for i in picks],
            xlabel="x", ylabel="rho",
        )
        written.append(path)

    return written
