"""Headered CSV trajectories and the companion gnuplot script."""

from __future__ import annotations

import csv
import re
from pathlib import Path

import numpy as np

from .observables import Trajectory

SCHEMA = "ham-adiabatic v1"
COLUMNS = ("t", "p_success", "coherence", "purity", "drift")
_HEADER_RE = re.compile(r"^# ham-adiabatic v(\d+), digest=([0-9a-f]+)\s*$")


def _fmt(x: float) -> str:
    return repr(float(x))


def write_trajectory(path, traj: Trajectory) -> Path:
    """Write ``traj`` with the schema line, a metadata comment and the columns.

    Metadata values are written in sorted key order so identical runs give
    byte-identical files.
    """
    path = Path(path)
    digest = traj.metadata.get("digest", "0")
    meta = " ".join(f"{k}={_meta_value(v)}" for k, v in sorted(traj.metadata.items())
                    if k != "digest")
    with path.open("w", newline="") as fh:
        fh.write(f"# {SCHEMA}, digest={digest}\n")
        fh.write(f"# {meta}\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(COLUMNS)
        for row in zip(traj.times, traj.p_success, traj.coherence, traj.purity, traj.drift):
            w.writerow([_fmt(x) for x in row])
    return path


def _meta_value(v) -> str:
    if isinstance(v, (list, tuple)):
        return ",".join(str(x) for x in v)
    return str(v).replace(" ", "_")


def read_trajectory(path) -> Trajectory:
    path = Path(path)
    with path.open() as fh:
        first = fh.readline()
        m = _HEADER_RE.match(first)
        if not m:
            raise ValueError(f"{path}: missing '# {SCHEMA}, digest=...' header")
        if int(m.group(1)) != 1:
            raise ValueError(f"{path}: unsupported schema version {m.group(1)}")
        meta = {"digest": m.group(2)}
        second = fh.readline()
        if second.startswith("#"):
            for item in second[1:].split():
                k, _, v = item.partition("=")
                meta[k] = v
            header = fh.readline()
        else:
            header = second
        if tuple(h.strip() for h in header.split(",")) != COLUMNS:
            raise ValueError(f"{path}: unexpected columns {header.strip()!r}")
        data = np.loadtxt(fh, delimiter=",", ndmin=2)
    return Trajectory(times=data[:, 0], p_success=data[:, 1], coherence=data[:, 2],
                      purity=data[:, 3], drift=data[:, 4], metadata=meta)


def write_gnuplot_script(path, curves: list[tuple[str, str]]) -> Path:
    """Script plotting success probability (solid) and coherence (dotted).

    ``curves`` holds (csv file name relative to the script, legend label).
    Run it with ``gnuplot plot.gp`` inside the output directory.
    """
    path = Path(path)
    lines = [
        "# generated by ham-adiabatic",
        "set datafile separator ','",
        "set terminal pngcairo size 900,600",
        "set output 'figure.png'",
        "set xlabel 't'",
        "set ylabel 'P_m, C'",
        "set yrange [0:1.05]",
        "set key outside right",
    ]
    parts = []
    for name, label in curves:
        parts.append(f"'{name}' skip 3 using 1:2 with lines title '{label} P_m'")
        parts.append(f"'{name}' skip 3 using 1:3 with lines dt 3 title '{label} C'")
    lines.append("plot " + ", \\\n     ".join(parts) if parts else "# nothing to plot")
    path.write_text("\n".join(lines) + "\n")
    return path
