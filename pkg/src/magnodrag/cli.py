"""Command-line front end: steady-state inspection, sweeps, feature reports.

Exit codes:
    0  success
    2  configuration error (unreadable file, schema violation, bad flags)
    3  no physical steady-state root
    4  numerical failure (residual, response pole, too many failed rows)
    5  feature input schema mismatch
"""

from __future__ import annotations

import argparse
import datetime
import hashlib
import json
import os
import sys
import tempfile
from pathlib import Path

from . import __version__
from . import steady as st
from . import sweep as sw
from .errors import (AxisMismatchError, ConfigError, NoPhysicalRootError,
                     ResidualTooLargeError, SingularResponseError, SweepError)
from .params import SystemParams, derive_spin_count, load_config
from .presets import FIGURE_PRESETS

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NO_ROOT = 3
EXIT_NUMERICAL = 4
EXIT_SCHEMA = 5


def _atomic_write(path: Path, data: str):
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or Path("."),
                               prefix=path.name + ".")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _config_hash(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def _params_dict(params: SystemParams) -> dict:
    n, s = derive_spin_count(params.sphere)
    return {
        "omega_c": params.omega_c, "omega_m": params.omega_m,
        "omega_b": params.omega_b, "omega_d": params.omega_d,
        "kappa_c": params.kappa_c, "kappa_m": params.kappa_m,
        "gamma_b": params.gamma_b, "Gamma": params.Gamma,
        "g_mb": params.g_mb, "delta_c": params.delta_c,
        "delta_m0": params.delta_m0, "medium_length": params.medium_length,
        "detuning_convention": params.detuning_convention,
        "spin_count_N": n, "total_spin_S": s,
    }


def _manifest(config_path, params, extra: dict) -> str:
    doc = {
        "tool": "magnodrag",
        "version": __version__,
        "config_hash": _config_hash(config_path),
        "timestamp": datetime.datetime.now(datetime.timezone.utc).isoformat(),
        "params": _params_dict(params),
    }
    doc.update(extra)
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


# ---------------------------------------------------------------------------
# steady
# ---------------------------------------------------------------------------

def cmd_steady(args) -> int:
    params = load_config(args.config)
    state = st.solve_steady(params, branch_policy=args.branch)
    omega_b = params.omega_b
    print(f"epsilon_m       {state.epsilon_m:.10e} rad/s")
    print(f"branch policy   {state.branch}")
    print(f"Delta_m/omega_b {state.delta_m_eff / omega_b:.12f}")
    print(f"Delta_c/omega_b {state.delta_c / omega_b:.12f}")
    print(f"residual        {state.residual:.3e}")
    print()
    print(f"{'root':>4} {'x = |m_s|^2':>24} {'selected':>9}")
    for i, root in enumerate(state.roots):
        mark = "*" if abs(root - state.x) <= 1e-9 * max(root, 1e-300) else ""
        print(f"{i:>4} {root:>24.16e} {mark:>9}")
    print()
    print(f"m_s = {state.m_s.real:+.10e} {state.m_s.imag:+.10e}j")
    print(f"c_s = {state.c_s.real:+.10e} {state.c_s.imag:+.10e}j")
    print(f"b_s = {state.b_s.real:+.10e} {state.b_s.imag:+.10e}j")
    print(f"G_mb = {abs(st.effective_coupling(params, state)):.10e} rad/s")
    return EXIT_OK


# ---------------------------------------------------------------------------
# sweep
# ---------------------------------------------------------------------------

def _build_specs(args, params):
    """Return (specs, labels, headline_column, preset_note)."""
    if args.figure:
        preset = FIGURE_PRESETS[args.figure]
        return preset.specs(params), preset.labels(), preset.headline, preset.note
    lo, hi = args.range
    spec = sw.SweepSpec(base=params, axis=args.axis, lo=lo, hi=hi,
                        samples=args.samples, sigma=args.sigma,
                        velocity=args.velocity, branch_policy=args.branch)
    headline = "DragM" if args.axis == "velocity" else "ReEpsT"
    return [spec], [None], headline, ""


def cmd_sweep(args) -> int:
    params = load_config(args.config)
    specs, labels, headline, note = _build_specs(args, params)
    tables = [sw.run_sweep(spec) for spec in specs]

    out = Path(args.out)
    _atomic_write(out, sw.to_csv(tables, labels))

    extra = {
        "command": "sweep",
        "figure": args.figure,
        "axis": tables[0].axis_name,
        "samples": len(tables[0]),
        "range": [float(tables[0].axis_values[0]),
                  float(tables[0].axis_values[-1])],
        "labels": labels,
        "flagged_rows": sum(t.n_failed for t in tables),
        "members": [
            {"label": label, "overrides": dict(spec.overrides),
             "sigma_fixed": spec.sigma, "velocity_fixed": spec.velocity}
            for spec, label in zip(specs, labels)
        ],
    }
    if note:
        extra["note"] = note
    _atomic_write(out.with_name(out.name + ".manifest"),
                  _manifest(args.config, params, extra))

    if args.gnuplot:
        data, script = sw.to_gnuplot(tables, labels)
        dat = out.with_suffix(".dat")
        _atomic_write(dat, data)
        _atomic_write(out.with_suffix(".gp"),
                      script.replace("DATAFILE", dat.name))
    if args.plot:
        from . import report
        report.render_png(tables, labels, headline,
                          out.with_suffix(".png"),
                          title=f"figure {args.figure}" if args.figure else None)
    return EXIT_OK


# ---------------------------------------------------------------------------
# features
# ---------------------------------------------------------------------------

def _axis_from_manifest(csv_path) -> str | None:
    manifest = Path(str(csv_path) + ".manifest")
    if manifest.exists():
        try:
            return json.load(open(manifest))["axis"]
        except (OSError, ValueError, KeyError):
            return None
    return None


def cmd_features(args) -> int:
    try:
        text = Path(args.csv).read_text()
    except OSError as exc:
        print(f"error: cannot read {args.csv}: {exc}", file=sys.stderr)
        return EXIT_SCHEMA
    axis = args.axis or _axis_from_manifest(args.csv) or "sigma"
    try:
        tables, labels = sw.parse_csv(text, axis_name=axis)
        reports = [sw.extract_features(t) for t in tables]
    except (ValueError, AxisMismatchError) as exc:
        print(f"error: not a valid sweep CSV: {exc}", file=sys.stderr)
        return EXIT_SCHEMA
    doc = [{"label": label, "features": report.to_dict()}
           for label, report in zip(labels, reports)]
    print(json.dumps(doc, indent=2))
    return EXIT_OK


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="magnodrag",
        description="Magnomechanical transparency, group index, and light "
                    "drag simulator")
    parser.add_argument("--version", action="version", version=__version__)
    subs = parser.add_subparsers(dest="command", required=True)

    p = subs.add_parser("steady", help="solve and print the steady state")
    p.add_argument("--config", required=True)
    p.add_argument("--branch", default="lowest",
                   choices=["lowest", "highest", "continuation"])
    p.set_defaults(func=cmd_steady)

    p = subs.add_parser("sweep", help="run a parameter sweep to CSV")
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--figure", choices=sorted(FIGURE_PRESETS),
                   help="figure-reproduction preset (overrides axis/range)")
    p.add_argument("--axis", default="sigma", choices=list(sw.AXES))
    p.add_argument("--range", nargs=2, type=float,
                   default=list(sw.DEFAULT_SIGMA_RANGE), metavar=("LO", "HI"))
    p.add_argument("--samples", type=int, default=sw.DEFAULT_SIGMA_SAMPLES)
    p.add_argument("--sigma", type=float, default=0.0,
                   help="fixed sigma (omega_b units) for non-sigma axes")
    p.add_argument("--velocity", type=float, default=0.0,
                   help="fixed medium velocity (m/s) for non-velocity axes")
    p.add_argument("--branch", default="lowest",
                   choices=["lowest", "highest", "continuation"])
    p.add_argument("--gnuplot", action="store_true",
                   help="also emit a whitespace data file and plot stub")
    p.add_argument("--plot", action="store_true",
                   help="also render the headline column to a PNG")
    p.set_defaults(func=cmd_sweep)

    p = subs.add_parser("features", help="extract spectral features from a CSV")
    p.add_argument("csv")
    p.add_argument("--axis", choices=list(sw.AXES),
                   help="axis of the CSV (default: from manifest, else sigma)")
    p.set_defaults(func=cmd_features)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NoPhysicalRootError as exc:
        print(f"no physical root: {exc}", file=sys.stderr)
        return EXIT_NO_ROOT
    except (ResidualTooLargeError, SingularResponseError, SweepError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
