"""CSV emission and parsing, provenance files, and gnuplot script generation.

All numeric output uses a shortest round-trip decimal rendering (repr of a
Python float, up to 17 significant digits), so parsing an emitted CSV
recovers every double bit for bit.  Files are comma-delimited with LF line
endings and ASCII headers.  The package never renders images itself; plots
are delegated to generated gnuplot scripts that consume only the CSVs.
"""

from __future__ import annotations

import csv
import math
import os
import re
from typing import Iterable, Mapping, Optional

import numpy as np

from .integrate import PseudoOrbit
from .lbe import LbeSeries
from .sweep import SweepResult

__all__ = [
    "fmt_float",
    "parse_optional",
    "write_lbe_csv",
    "read_lbe_csv",
    "write_orbit_csv",
    "write_sweep_csv",
    "read_sweep_csv",
    "write_portrait_csv",
    "write_key_value",
    "read_key_value",
    "emit_plot_script",
]

LBE_HEADER = ("step", "t", "delta", "log10_2delta")
SWEEP_HEADER = ("k", "crossing_index", "never_crossed", "saturated", "sync",
                "sync_metric", "diverged_at")


def fmt_float(x: float) -> str:
    """Round-trip-exact decimal for a finite double.

    Integral values print without a fractional part (0 -> "0"); everything
    else uses repr, the shortest string that parses back to the same bits.
    """
    if not math.isfinite(x):
        raise ValueError(f"cannot format non-finite value {x!r}")
    if x == 0.0:
        return "-0.0" if math.copysign(1.0, x) < 0 else "0"
    if x == int(x) and abs(x) < 1e16:
        return str(int(x))
    return repr(x)


def parse_optional(field: str) -> Optional[float]:
    return None if field == "" else float(field)


def _open_out(path):
    return open(path, "w", newline="\n", encoding="ascii")


def write_lbe_csv(series: LbeSeries, path) -> None:
    """Schema: step,t,delta,log10_2delta.

    The log column is empty exactly where delta is zero (the minus-infinity
    marker).  `step` counts integration steps (row index times the recording
    stride).
    """
    with _open_out(path) as f:
        f.write(",".join(LBE_HEADER) + "\n")
        values = series.values
        logs = series.log10_2delta
        stride = series.stride
        for i in range(len(values)):
            log_field = "" if values[i] == 0.0 else fmt_float(float(logs[i]))
            f.write(f"{i * stride},{fmt_float(float(series.times[i]))},"
                    f"{fmt_float(float(values[i]))},{log_field}\n")


def read_lbe_csv(path):
    """Parse an emitted LBE CSV back into arrays (log markers become -inf)."""
    steps, times, deltas, logs = [], [], [], []
    with open(path, newline="") as f:
        reader = csv.reader(f)
        header = tuple(next(reader))
        if header != LBE_HEADER:
            raise ValueError(f"unexpected LBE header {header!r} in {path}")
        for row in reader:
            steps.append(int(row[0]))
            times.append(float(row[1]))
            deltas.append(float(row[2]))
            logs.append(float("-inf") if row[3] == "" else float(row[3]))
    return (np.array(steps), np.array(times), np.array(deltas), np.array(logs))


def write_orbit_csv(orbit: PseudoOrbit, path) -> None:
    """Schema: step,t,<one column per state component>."""
    labels = orbit.system.labels
    with _open_out(path) as f:
        f.write("step,t," + ",".join(labels) + "\n")
        for i in range(len(orbit)):
            comps = ",".join(fmt_float(float(c)) for c in orbit.states[i])
            f.write(f"{i * orbit.stride},{fmt_float(float(orbit.times[i]))},{comps}\n")


def write_portrait_csv(portrait: np.ndarray, times: np.ndarray, path,
                       stride: int = 1) -> None:
    """Schema: step,t,y,y_aux (slave component vs auxiliary component)."""
    with _open_out(path) as f:
        f.write("step,t,y,y_aux\n")
        for i in range(len(portrait)):
            f.write(f"{i * stride},{fmt_float(float(times[i]))},"
                    f"{fmt_float(float(portrait[i, 0]))},{fmt_float(float(portrait[i, 1]))}\n")


def write_sweep_csv(result: SweepResult, path) -> None:
    """Schema: k,crossing_index,never_crossed,saturated,sync,sync_metric,diverged_at.

    Booleans are "true"/"false"; absent values (no crossing, no divergence)
    are empty fields.
    """
    def b(v):
        return "true" if v else "false"

    with _open_out(path) as f:
        f.write(",".join(SWEEP_HEADER) + "\n")
        for rec in result.records:
            crossing = "" if rec.crossing_index is None else str(rec.crossing_index)
            diverged = "" if rec.diverged_at is None else str(rec.diverged_at)
            f.write(f"{fmt_float(rec.k)},{crossing},{b(rec.never_crossed)},"
                    f"{b(rec.saturated)},{b(rec.synchronized)},"
                    f"{fmt_float(rec.sync_metric)},{diverged}\n")


def read_sweep_csv(path):
    """Parse an emitted sweep CSV into a list of plain dicts."""
    out = []
    with open(path, newline="") as f:
        reader = csv.reader(f)
        header = tuple(next(reader))
        if header != SWEEP_HEADER:
            raise ValueError(f"unexpected sweep header {header!r} in {path}")
        for row in reader:
            out.append({
                "k": float(row[0]),
                "crossing_index": None if row[1] == "" else int(row[1]),
                "never_crossed": row[2] == "true",
                "saturated": row[3] == "true",
                "sync": row[4] == "true",
                "sync_metric": float(row[5]),
                "diverged_at": None if row[6] == "" else int(row[6]),
            })
    return out


def write_key_value(path, mapping: Mapping) -> None:
    """Flat key=value file (one pair per line, sorted by key)."""
    with _open_out(path) as f:
        for key in sorted(mapping):
            f.write(f"{key}={mapping[key]}\n")


def read_key_value(path) -> dict:
    out = {}
    with open(path, encoding="ascii") as f:
        for line in f:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ValueError(f"malformed config line {line!r} in {path}")
            key, _, value = line.partition("=")
            out[key.strip()] = value.strip()
    return out


_LBE_NAME = re.compile(r"lbe_k(.+)\.csv$")


def _peek_header(path):
    with open(path, newline="") as f:
        return f.readline().strip()


def emit_plot_script(csv_paths: Iterable, out_path) -> None:
    """Write a self-contained gnuplot script rendering the given CSVs.

    LBE series files become one log10(2*delta)-vs-iteration curve each
    (legend labels recover K from ``lbe_k<value>.csv`` names); a portrait
    file becomes a slave-vs-auxiliary scatter with the y = y' diagonal for
    reference.  Raises FileNotFoundError (and writes nothing) if no input
    file exists.
    """
    paths = [str(p) for p in csv_paths]
    if not paths:
        raise FileNotFoundError("no input CSVs given; refusing to write a plot script")
    for p in paths:
        if not os.path.exists(p):
            raise FileNotFoundError(f"plot input does not exist: {p}")

    lbe_files = []
    portrait_files = []
    for p in paths:
        header = _peek_header(p)
        if header == ",".join(LBE_HEADER):
            lbe_files.append(p)
        elif header == "step,t,y,y_aux":
            portrait_files.append(p)
        else:
            raise ValueError(f"unrecognized CSV header in {p}: {header!r}")

    out_dir = os.path.dirname(os.path.abspath(str(out_path)))
    stem = os.path.splitext(os.path.basename(str(out_path)))[0]
    lines = [
        "#!/usr/bin/env gnuplot",
        "# Generated by synclbe; plots the emitted CSVs without recomputation.",
        "set datafile separator ','",
        "set terminal pngcairo size 1100,520",
        "set grid",
    ]
    if lbe_files:
        lines += [
            f"set output '{stem}_lbe.png'",
            "set xlabel 'iteration'",
            "set ylabel 'log10(2*delta)'",
            "set key outside right",
        ]
        plot_parts = []
        for p in lbe_files:
            rel = os.path.relpath(p, out_dir)
            m = _LBE_NAME.search(os.path.basename(p))
            title = f"K={m.group(1)}" if m else os.path.basename(p)
            plot_parts.append(f"'{rel}' using 1:4 every ::1 with lines title '{title}'")
        lines.append("plot " + ", \\\n     ".join(plot_parts))
    if portrait_files:
        lines += [
            f"set output '{stem}_portrait.png'",
            "set xlabel 'slave component'",
            "set ylabel 'auxiliary component'",
            "set key inside left top",
            "set size square",
        ]
        plot_parts = [
            f"'{os.path.relpath(p, out_dir)}' using 3:4 every ::1 with dots title 'samples'"
            for p in portrait_files
        ]
        plot_parts.append("x with lines dashtype 2 title 'y = y'''")
        lines.append("plot " + ", \\\n     ".join(plot_parts))
    with _open_out(out_path) as f:
        f.write("\n".join(lines) + "\n")
