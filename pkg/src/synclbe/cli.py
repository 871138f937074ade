"""Command-line interface for batch experiments.

Subcommands:

* ``simulate``   one coupled master/slave run, emits both orbits
* ``lbe``        one lower-bound-error experiment, emits the series and
                 reports the threshold crossing
* ``sync``       one auxiliary-system check, emits the verdict and the
                 phase-portrait data
* ``sweep``      a full coupling-constant campaign, emits a summary and the
                 per-K series
* ``list-cases`` prints the built-in case studies

Every run writes its outputs into one directory (named ``<case>-<timestamp>``
unless ``--out`` is given) together with ``resolved_config.txt``, a flat
key=value echo of the fully resolved configuration, and ``provenance.txt``
(config hash, build, timestamp).  ``--config FILE`` loads such a key=value
file as defaults; explicit flags win.  Rerunning from a resolved config file
reproduces the CSVs bit for bit on the same platform.

Exit codes: 0 success, 2 usage or configuration error, 1 runtime/output
error.  Validation happens before any simulation starts.
"""

from __future__ import annotations

import argparse
import hashlib
import os
import sys
from dataclasses import dataclass, replace
from datetime import datetime, timezone
from typing import Optional

from ._version import __version__
from .csvio import (emit_plot_script, fmt_float, read_key_value, write_key_value,
                    write_lbe_csv, write_orbit_csv, write_portrait_csv,
                    write_sweep_csv)
from .integrate import IntegrationConfig, integrate_pair
from .lbe import default_component, first_crossing, run_lbe_experiment
from .sweep import CASE_STUDIES, case_study, resolve_workers, run_sweep
from .sync import auxiliary_run, phase_portrait_data
from .systems import ConfigurationError, duffing

__all__ = ["main", "RunConfig"]


@dataclass(frozen=True)
class RunConfig:
    """Fully resolved CLI configuration for one run."""

    command: str
    case: str
    k: float
    k_values: Optional[tuple]
    step_size: float
    n_steps: int
    record_stride: int
    component: Optional[int]
    threshold: float
    epsilon_rel: float
    transient_fraction: float
    delta: float
    gamma: float
    omega: float
    variant: str
    variants: tuple
    master_ic: Optional[tuple]
    slave_ic: Optional[tuple]
    aux_ic: Optional[tuple]
    out: Optional[str]
    workers: int


def _float_list(text: str) -> tuple:
    try:
        return tuple(float(v) for v in text.split(",") if v.strip() != "")
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _variant(text: str) -> str:
    if text not in ("A", "B"):
        raise argparse.ArgumentTypeError(f"variant must be A or B, got {text!r}")
    return text


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="synclbe",
        description="Coupled chaotic oscillator simulations with lower-bound-error analysis.")
    parser.add_argument("--version", action="version", version=f"synclbe {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--case", required=True, choices=CASE_STUDIES,
                        help="built-in case study to run")
    common.add_argument("--config", metavar="FILE",
                        help="key=value file supplying defaults (flags win)")
    common.add_argument("--k", type=float, default=0.0,
                        help="coupling constant for single-run commands (default 0)")
    common.add_argument("--k-values", type=_float_list, default=None,
                        help="comma-separated K grid for sweep (default: case grid)")
    common.add_argument("--step-size", type=float, default=None,
                        help="integration step size (default: case setting)")
    common.add_argument("--n-steps", type=int, default=None,
                        help="number of integration steps")
    common.add_argument("--record-stride", type=int, default=None,
                        help="record every Nth step (default 1)")
    common.add_argument("--component", type=int, default=None,
                        help="slave state component compared by the LBE "
                             "(default: y2 for Lorenz, x2 for Duffing)")
    common.add_argument("--threshold", type=float, default=None,
                        help="log10(2*delta) crossing threshold (default -0.3)")
    common.add_argument("--epsilon-rel", type=float, default=None,
                        help="sync tolerance relative to attractor diameter (default 1e-3)")
    common.add_argument("--transient-fraction", type=float, default=None,
                        help="fraction of the horizon discarded before the sync window "
                             "(default 0.5)")
    common.add_argument("--delta", type=float, default=None, help="Duffing damping")
    common.add_argument("--gamma", type=float, default=None, help="Duffing forcing amplitude")
    common.add_argument("--omega", type=float, default=None, help="Duffing forcing frequency")
    common.add_argument("--variant", type=_variant, default="A",
                        help="slave formulation for simulate/sync (default A)")
    common.add_argument("--variants", type=str, default="A,B",
                        help="formulation pair compared by lbe/sweep (default A,B)")
    common.add_argument("--master-ic", type=_float_list, default=None,
                        help="master initial condition, comma separated")
    common.add_argument("--slave-ic", type=_float_list, default=None,
                        help="slave initial condition, comma separated")
    common.add_argument("--aux-ic", type=_float_list, default=None,
                        help="auxiliary initial condition, comma separated")
    common.add_argument("--out", default=None,
                        help="output directory (default: <case>-<timestamp>)")
    common.add_argument("--workers", type=int, default=None,
                        help=f"sweep worker processes (default: $SYNCLBE_WORKERS or 1)")

    for name, handler, help_text in (
            ("simulate", _cmd_simulate, "integrate one coupled run and emit both orbits"),
            ("lbe", _cmd_lbe, "run one lower-bound-error experiment"),
            ("sync", _cmd_sync, "run one auxiliary-system synchronization check"),
            ("sweep", _cmd_sweep, "run a coupling-constant sweep campaign")):
        p = sub.add_parser(name, parents=[common], help=help_text)
        p.set_defaults(handler=handler)

    p = sub.add_parser("list-cases", help="print the built-in case studies")
    p.set_defaults(handler=_cmd_list_cases)
    return parser


_NON_FLAG_KEYS = {"command", "out"}


def _inject_config(argv: list) -> list:
    """Expand --config FILE into leading flags so explicit flags override."""
    if "--config" not in argv:
        return argv
    idx = argv.index("--config")
    if idx + 1 >= len(argv):
        return argv  # argparse will report the missing value
    mapping = read_key_value(argv[idx + 1])
    injected = []
    for key, value in sorted(mapping.items()):
        if key in _NON_FLAG_KEYS or value == "":
            continue
        injected += [f"--{key.replace('_', '-')}", value]
    return argv[:1] + injected + argv[1:]


def _resolve(args) -> RunConfig:
    base = case_study(args.case)
    cfg = base.cfg
    step_size = cfg.step_size if args.step_size is None else args.step_size
    n_steps = cfg.n_steps if args.n_steps is None else args.n_steps
    stride = cfg.record_stride if args.record_stride is None else args.record_stride
    dparams = dict(duffing().params)
    source = base.pair.master if base.pair.master.name == "duffing" else base.pair.slave
    dparams.update(source.params)
    variants = tuple(v.strip() for v in args.variants.split(",") if v.strip())
    if len(variants) != 2:
        raise ConfigurationError(f"--variants needs exactly two entries, got {args.variants!r}")
    return RunConfig(
        command=args.command,
        case=args.case,
        k=args.k,
        k_values=args.k_values,
        step_size=step_size,
        n_steps=n_steps,
        record_stride=stride,
        component=args.component,
        threshold=base.threshold_log10 if args.threshold is None else args.threshold,
        epsilon_rel=base.epsilon_rel if args.epsilon_rel is None else args.epsilon_rel,
        transient_fraction=(base.transient_fraction if args.transient_fraction is None
                            else args.transient_fraction),
        delta=dparams["delta"] if args.delta is None else args.delta,
        gamma=dparams["gamma"] if args.gamma is None else args.gamma,
        omega=dparams["omega"] if args.omega is None else args.omega,
        variant=args.variant,
        variants=variants,
        master_ic=args.master_ic,
        slave_ic=args.slave_ic,
        aux_ic=args.aux_ic,
        out=args.out,
        workers=resolve_workers(args.workers),
    )


def _build_plan(rc: RunConfig):
    plan = case_study(rc.case, cfg=IntegrationConfig(rc.step_size, rc.n_steps,
                                                     rc.record_stride))
    duf = duffing(rc.delta, rc.gamma, rc.omega)
    pair = plan.pair
    if pair.master.name == "duffing":
        pair = replace(pair, master=duf)
    if pair.slave.name == "duffing":
        pair = replace(pair, slave=duf)
    plan = replace(
        plan,
        pair=pair,
        component=rc.component,
        threshold_log10=rc.threshold,
        epsilon_rel=rc.epsilon_rel,
        transient_fraction=rc.transient_fraction,
        variants=rc.variants,
    )
    if rc.k_values is not None:
        plan = replace(plan, k_values=rc.k_values)
    if rc.master_ic is not None:
        plan = replace(plan, master_ic=rc.master_ic)
    if rc.slave_ic is not None:
        plan = replace(plan, slave_ic=rc.slave_ic)
    if rc.aux_ic is not None:
        plan = replace(plan, aux_ic=rc.aux_ic)
    return plan


def _config_mapping(rc: RunConfig, plan) -> dict:
    m = {
        "command": rc.command,
        "case": rc.case,
        "step_size": fmt_float(rc.step_size),
        "n_steps": str(rc.n_steps),
        "record_stride": str(rc.record_stride),
        "component": "" if rc.component is None else str(rc.component),
        "threshold": fmt_float(rc.threshold),
        "epsilon_rel": fmt_float(rc.epsilon_rel),
        "transient_fraction": fmt_float(rc.transient_fraction),
        "delta": fmt_float(rc.delta),
        "gamma": fmt_float(rc.gamma),
        "omega": fmt_float(rc.omega),
        "master_ic": ",".join(fmt_float(c) for c in plan.master_ic),
        "slave_ic": ",".join(fmt_float(c) for c in plan.slave_ic),
        "aux_ic": ",".join(fmt_float(c) for c in plan.aux_ic),
        "workers": str(rc.workers),
    }
    if rc.command == "sweep":
        m["k_values"] = ",".join(fmt_float(k) for k in plan.k_values)
        m["variants"] = ",".join(rc.variants)
    elif rc.command == "lbe":
        m["k"] = fmt_float(rc.k)
        m["variants"] = ",".join(rc.variants)
    else:
        m["k"] = fmt_float(rc.k)
        m["variant"] = rc.variant
    return m


def _prepare_outdir(rc: RunConfig) -> str:
    if rc.out is not None:
        outdir = rc.out
    else:
        stamp = datetime.now(timezone.utc).strftime("%Y%m%dT%H%M%SZ")
        outdir = f"{rc.case}-{stamp}"
    try:
        os.makedirs(outdir, exist_ok=True)
        probe = os.path.join(outdir, ".write_probe")
        with open(probe, "w") as f:
            f.write("")
        os.remove(probe)
    except OSError as exc:
        raise RuntimeError(f"output directory is not writable: {outdir} ({exc})")
    return outdir


def _write_run_metadata(outdir: str, mapping: dict) -> None:
    write_key_value(os.path.join(outdir, "resolved_config.txt"), mapping)
    hashed = {k: v for k, v in mapping.items() if k != "out"}
    text = "\n".join(f"{k}={v}" for k, v in sorted(hashed.items()))
    provenance = {
        "config_hash": hashlib.sha256(text.encode("ascii")).hexdigest(),
        "build": f"synclbe {__version__}",
        "timestamp": datetime.now(timezone.utc).isoformat(),
    }
    write_key_value(os.path.join(outdir, "provenance.txt"), provenance)


def _cmd_simulate(args) -> int:
    rc = _resolve(args)
    plan = _build_plan(rc)
    pair = plan.pair.with_k(rc.k)
    outdir = _prepare_outdir(rc)
    master_orbit, slave_orbit = integrate_pair(
        pair, plan.master_ic, plan.slave_ic, plan.cfg, slave_variant=rc.variant)
    write_orbit_csv(master_orbit, os.path.join(outdir, "master_orbit.csv"))
    write_orbit_csv(slave_orbit, os.path.join(outdir, "slave_orbit.csv"))
    _write_run_metadata(outdir, _config_mapping(rc, plan))
    if slave_orbit.diverged_at is not None:
        print(f"diverged at step {slave_orbit.diverged_at}")
    print(f"wrote {outdir}/master_orbit.csv and {outdir}/slave_orbit.csv "
          f"({len(slave_orbit)} samples)")
    return 0


def _cmd_lbe(args) -> int:
    rc = _resolve(args)
    plan = _build_plan(rc)
    pair = plan.pair.with_k(rc.k)
    outdir = _prepare_outdir(rc)
    series = run_lbe_experiment(pair, plan.master_ic, plan.slave_ic, plan.cfg,
                                component=plan.component, variants=plan.variants)
    crossing = first_crossing(series, plan.threshold_log10)
    path = os.path.join(outdir, f"lbe_k{fmt_float(rc.k)}.csv")
    write_lbe_csv(series, path)
    emit_plot_script([path], os.path.join(outdir, "plot.gp"))
    _write_run_metadata(outdir, _config_mapping(rc, plan))
    if crossing.never_crossed:
        print(f"K={fmt_float(rc.k)}: never crossed {plan.threshold_log10} "
              f"(max log10(2*delta) = {series.max_log10_2delta:.3g}, "
              f"saturated={str(series.saturated).lower()})")
    else:
        print(f"K={fmt_float(rc.k)}: crossed {plan.threshold_log10} at iteration "
              f"{crossing.crossing_index}")
    print(f"wrote {path}")
    return 0


def _cmd_sync(args) -> int:
    rc = _resolve(args)
    plan = _build_plan(rc)
    pair = replace(plan.pair.with_k(rc.k),
                   slave=plan.pair.slave.with_variant(rc.variant))
    outdir = _prepare_outdir(rc)
    transient = int(plan.transient_fraction * plan.cfg.n_recorded)
    verdict, slave_orbit, aux_orbit = auxiliary_run(
        pair, plan.master_ic, plan.slave_ic, plan.aux_ic, plan.cfg,
        transient_steps=transient, epsilon_rel=plan.epsilon_rel)
    component = plan.component if plan.component is not None else default_component(pair)
    portrait = phase_portrait_data(slave_orbit, aux_orbit, component)
    path = os.path.join(outdir, "phase_portrait.csv")
    write_portrait_csv(portrait, slave_orbit.times, path, slave_orbit.stride)
    emit_plot_script([path], os.path.join(outdir, "plot.gp"))
    _write_run_metadata(outdir, _config_mapping(rc, plan))
    write_key_value(os.path.join(outdir, "sync_verdict.txt"), {
        "synchronized": str(verdict.synchronized).lower(),
        "metric": fmt_float(verdict.metric),
        "epsilon": fmt_float(verdict.epsilon),
        "transient_steps": str(verdict.transient_steps),
        "window_steps": str(verdict.window_steps),
        "diverged_at": "" if verdict.diverged_at is None else str(verdict.diverged_at),
    })
    state = "undetermined (diverged)" if verdict.undetermined else (
        "synchronized" if verdict.synchronized else "not synchronized")
    print(f"K={fmt_float(rc.k)}: {state} "
          f"(metric {verdict.metric:.6g}, epsilon {verdict.epsilon:.6g})")
    print(f"wrote {path}")
    return 0


def _cmd_sweep(args) -> int:
    rc = _resolve(args)
    plan = _build_plan(rc)
    outdir = _prepare_outdir(rc)
    result = run_sweep(plan, workers=rc.workers)
    summary = os.path.join(outdir, "sweep_summary.csv")
    write_sweep_csv(result, summary)
    lbe_paths = []
    for rec in result.records:
        path = os.path.join(outdir, f"lbe_k{fmt_float(rec.k)}.csv")
        write_lbe_csv(rec.series, path)
        lbe_paths.append(path)
    emit_plot_script(lbe_paths, os.path.join(outdir, "plot.gp"))
    _write_run_metadata(outdir, _config_mapping(rc, plan))
    for rec in result.records:
        crossing = "never" if rec.never_crossed else str(rec.crossing_index)
        print(f"K={fmt_float(rec.k):>6}: crossing={crossing:>6} "
              f"saturated={str(rec.saturated).lower():5} "
              f"sync={str(rec.synchronized).lower():5} "
              f"metric={rec.sync_metric:.3e}")
    print(f"wrote {summary} and {len(lbe_paths)} series files")
    return 0


def _cmd_list_cases(args) -> int:
    print("duffing-lorenz    Duffing master driving Lorenz y2; K grid 0..40")
    print("rossler-duffing   Rossler master driving Duffing x1; K grid 0..400")
    return 0


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        argv = _inject_config(argv)
    except (OSError, ValueError) as exc:
        print(f"synclbe: cannot load config file: {exc}", file=sys.stderr)
        return 2
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except ConfigurationError as exc:
        print(f"synclbe: invalid configuration: {exc}", file=sys.stderr)
        return 2
    except RuntimeError as exc:
        print(f"synclbe: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"synclbe: output error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
