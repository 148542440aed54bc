"""Parameter-sweep engine and spectral feature extraction.

Sweep axes and their native units:
    sigma     probe detuning in omega_b units
    velocity  medium velocity in m/s
    Gamma     magnon-photon coupling in omega_b units
    power     drive power in watts

Tables carry one row per sample in the fixed column order
axis, ReEpsT, ImEpsT, ReNr, ImNr, ReNg, ImNg, DragM, branch, flag.
Failed rows (no physical root, response pole) are flagged gaps, never NaN.
"""

from __future__ import annotations

import concurrent.futures
import os
from dataclasses import dataclass, field

import numpy as np

from . import response as resp
from . import steady as st
from .errors import (AxisMismatchError, NoPhysicalRootError,
                     ResidualTooLargeError, SingularResponseError, SweepError)
from .params import SystemParams

AXES = ("sigma", "velocity", "Gamma", "power")
COLUMNS = ("axis", "ReEpsT", "ImEpsT", "ReNr", "ImNr", "ReNg", "ImNg",
           "DragM", "branch", "flag")
DEFAULT_SIGMA_RANGE = (-0.5, 0.5)
DEFAULT_SIGMA_SAMPLES = 4001
MAX_FAILED_FRACTION = 0.10


def thread_cap() -> int:
    """Row-evaluation parallelism, capped by MAGNODRAG_THREADS."""
    cap = os.environ.get("MAGNODRAG_THREADS")
    if cap is not None:
        try:
            return max(1, int(cap))
        except ValueError:
            return 1
    return os.cpu_count() or 1


@dataclass(frozen=True)
class SweepSpec:
    """One sweep: an axis, its range in axis-native units, and the base system."""

    base: SystemParams
    axis: str = "sigma"
    lo: float = DEFAULT_SIGMA_RANGE[0]
    hi: float = DEFAULT_SIGMA_RANGE[1]
    samples: int = DEFAULT_SIGMA_SAMPLES
    overrides: dict = field(default_factory=dict)
    sigma: float = 0.0        # fixed sigma (omega_b units) for non-sigma axes
    velocity: float = 0.0     # fixed v (m/s) for non-velocity axes
    branch_policy: str = "lowest"

    def __post_init__(self):
        if self.axis not in AXES:
            raise ValueError(f"axis must be one of {AXES}, got {self.axis!r}")
        if not self.lo < self.hi:
            raise ValueError("sweep range requires lo < hi")
        if self.samples < 2:
            raise ValueError("samples must be >= 2")

    def resolved_params(self) -> SystemParams:
        return self.base.with_(**self.overrides) if self.overrides else self.base


@dataclass
class SpectrumTable:
    """Columnar sweep output; value columns are None at flagged rows."""

    axis_name: str
    axis_values: np.ndarray
    eps_T: list            # complex | None per row
    n_r: list
    n_g: list
    drag: list             # float | None
    branch: list           # str
    flags: list            # "ok" | failure tag
    meta: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.axis_values)

    @property
    def n_failed(self) -> int:
        return sum(1 for f in self.flags if f != "ok")

    def column(self, name: str) -> np.ndarray:
        """Real-valued column by CSV name; flagged rows become NaN."""
        def part(vals, fn):
            return np.array([np.nan if v is None else fn(v) for v in vals])
        if name == "axis":
            return np.asarray(self.axis_values, dtype=float)
        picks = {"ReEpsT": (self.eps_T, np.real), "ImEpsT": (self.eps_T, np.imag),
                 "ReNr": (self.n_r, np.real), "ImNr": (self.n_r, np.imag),
                 "ReNg": (self.n_g, np.real), "ImNg": (self.n_g, np.imag),
                 "DragM": (self.drag, float)}
        vals, fn = picks[name]
        return part(vals, fn)


def _row_from_response(pr: resp.ProbeResponse, branch: str):
    return pr.eps_T, pr.n_r, pr.n_g, pr.drag, branch, "ok"


_FAILED = (None, None, None, None, "", None)  # flag filled by caller


def run_sweep(spec: SweepSpec) -> SpectrumTable:
    """Evaluate the sweep; deterministic for a fixed spec.

    The steady state is re-solved at every point whose axis value changes
    the drive or the couplings (power and Gamma axes); sigma and velocity
    axes share a single solve.  Aborts when more than 10% of rows fail.
    """
    params = spec.resolved_params()
    values = np.linspace(spec.lo, spec.hi, spec.samples)
    meta = {"axis": spec.axis, "branch_policy": spec.branch_policy,
            "sigma_fixed": spec.sigma, "velocity_fixed": spec.velocity}

    if spec.axis in ("sigma", "velocity"):
        table = _run_shared_steady(spec, params, values, meta)
    else:
        table = _run_per_point(spec, params, values, meta)

    if table.n_failed > MAX_FAILED_FRACTION * len(table):
        raise SweepError(
            f"{table.n_failed} of {len(table)} sweep rows failed")
    return table


def _evaluate_sigma_grid(params: SystemParams, state: st.SteadyState,
                         sigmas_rad: np.ndarray, v: float):
    """Vectorized response over a sigma grid for one steady state."""
    g = st.effective_coupling(params, state)
    eps_t = resp.susceptibility(params, g, sigmas_rad)
    n_r = resp.refractive_index(eps_t)
    dchi = resp.susceptibility_derivative(params, g, sigmas_rad)
    n_g = n_r + 2.0 * np.pi * params.omega_c * dchi
    drag = resp.light_drag(n_r, n_g, v, params.medium_length,
                           params.constants.c_vac)
    return eps_t, n_r, n_g, drag


def _run_shared_steady(spec, params, values, meta) -> SpectrumTable:
    state = st.solve_steady(params, branch_policy=spec.branch_policy)
    meta["steady_x"] = state.x
    n = len(values)
    if spec.axis == "sigma":
        sigmas = values * params.omega_b
        eps_t, n_r, n_g, drag = _evaluate_sigma_grid(params, state, sigmas,
                                                     spec.velocity)
        return SpectrumTable(
            axis_name="sigma", axis_values=values,
            eps_T=list(eps_t), n_r=list(n_r), n_g=list(n_g),
            drag=[float(d) for d in drag],
            branch=[state.branch] * n, flags=["ok"] * n, meta=meta)

    # velocity axis: single response point, drag linear in v
    sigma_rad = spec.sigma * params.omega_b
    eps_t, n_r, n_g, _ = _evaluate_sigma_grid(params, state,
                                              np.array([sigma_rad]), 0.0)
    drag = [float(resp.light_drag(n_r[0], n_g[0], v, params.medium_length,
                                  params.constants.c_vac)) for v in values]
    return SpectrumTable(
        axis_name="velocity", axis_values=values,
        eps_T=[complex(eps_t[0])] * n, n_r=[complex(n_r[0])] * n,
        n_g=[complex(n_g[0])] * n, drag=drag,
        branch=[state.branch] * n, flags=["ok"] * n, meta=meta)


def _run_per_point(spec, params, values, meta) -> SpectrumTable:
    sigma_rad = spec.sigma * params.omega_b

    def point(args):
        value, seed = args
        if spec.axis == "Gamma":
            p = params.with_(Gamma=value * params.omega_b)
        else:
            p = params.with_(power=value)
        try:
            state = st.solve_steady(p, branch_policy=spec.branch_policy,
                                    seed=seed)
            g = st.effective_coupling(p, state)
            pr = resp.evaluate_probe(p, g, sigma_rad, v=spec.velocity)
        except NoPhysicalRootError:
            return (*_FAILED[:5], "no-root"), None
        except (SingularResponseError, ResidualTooLargeError):
            return (*_FAILED[:5], "singular"), None
        return _row_from_response(pr, state.branch), state.x

    rows = []
    if spec.branch_policy == "continuation":
        seed = None
        for value in values:
            row, seed_next = point((value, seed))
            if seed_next is not None:
                seed = seed_next
            rows.append(row)
    else:
        workers = min(thread_cap(), len(values))
        if workers > 1:
            with concurrent.futures.ThreadPoolExecutor(workers) as pool:
                rows = [r for r, _ in pool.map(point, ((v, None) for v in values))]
        else:
            rows = [point((v, None))[0] for v in values]

    eps_t, n_r, n_g, drag, branch, flags = map(list, zip(*rows))
    return SpectrumTable(axis_name=spec.axis, axis_values=values,
                         eps_T=eps_t, n_r=n_r, n_g=n_g, drag=drag,
                         branch=branch, flags=flags, meta=meta)


# ---------------------------------------------------------------------------
# Feature extraction
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Window:
    center: float      # sigma, axis units
    fwhm: float
    floor: float


@dataclass(frozen=True)
class Peak:
    position: float
    height: float


@dataclass(frozen=True)
class FeatureReport:
    windows: tuple
    peaks: tuple
    resonance_slope_sign: int          # sign of d Im(n_r)/d sigma at sigma=0
    luminality: str                    # "subluminal" | "superluminal"
    drag_extrema: tuple                # ((axis_value, drag), ...)
    max_abs_im_ng: float

    def to_dict(self) -> dict:
        return {
            "windows": [{"center": w.center, "fwhm": w.fwhm, "floor": w.floor}
                        for w in self.windows],
            "peaks": [{"position": p.position, "height": p.height}
                      for p in self.peaks],
            "resonance_slope_sign": self.resonance_slope_sign,
            "luminality": self.luminality,
            "drag_extrema": [{"position": x, "drag": d}
                             for x, d in self.drag_extrema],
            "max_abs_im_ng": self.max_abs_im_ng,
        }


def _quadratic_refine(x, y, i):
    """Vertex of the parabola through three points around index i.

    Grids come from linspace, so uniform spacing is assumed locally.
    """
    y0, y1, y2 = y[i - 1], y[i], y[i + 1]
    denom = y0 - 2.0 * y1 + y2
    if denom == 0.0:
        return float(x[i]), float(y1)
    d = 0.5 * (y0 - y2) / denom
    d = min(1.0, max(-1.0, d))
    h = 0.5 * (x[i + 1] - x[i - 1])
    return float(x[i] + d * h), float(y1 - 0.25 * (y0 - y2) * d)


def _local_extrema(y: np.ndarray):
    maxima = [i for i in range(1, len(y) - 1)
              if y[i] > y[i - 1] and y[i] > y[i + 1]]
    minima = [i for i in range(1, len(y) - 1)
              if y[i] < y[i - 1] and y[i] < y[i + 1]]
    return maxima, minima


def _half_level_crossings(x, y, i_min, level):
    """Crossing positions of y == level walking outward from a minimum."""
    i = i_min
    while y[i] < level:
        i -= 1
    # y[i] >= level > y[i+1]: interpolate with increasing ordinate
    xl = x[i] if y[i] == y[i + 1] else float(
        np.interp(level, [y[i + 1], y[i]], [x[i + 1], x[i]]))
    j = i_min
    while y[j] < level:
        j += 1
    xr = x[j] if y[j] == y[j - 1] else float(
        np.interp(level, [y[j - 1], y[j]], [x[j - 1], x[j]]))
    return xl, xr


def extract_features(table: SpectrumTable) -> FeatureReport:
    """Transparency windows, absorption peaks, luminality, drag extrema.

    Requires a sigma-axis table for the spectral features; velocity tables
    still yield drag extrema.
    """
    if table.axis_name != "sigma":
        if table.axis_name == "velocity":
            return FeatureReport(windows=(), peaks=(), resonance_slope_sign=0,
                                 luminality="indeterminate",
                                 drag_extrema=_drag_extrema(table),
                                 max_abs_im_ng=float(np.nanmax(
                                     np.abs(table.column("ImNg")))))
        raise AxisMismatchError(
            f"spectral features need a sigma-axis table, got {table.axis_name}")
    if len(table) < 16:
        raise AxisMismatchError("need at least 16 rows for feature extraction")
    if table.n_failed:
        raise AxisMismatchError("feature extraction requires a gap-free table")

    x = table.column("axis")
    absorption = table.column("ReEpsT")
    maxima, minima = _local_extrema(absorption)

    peaks = tuple(Peak(*_quadratic_refine(x, absorption, i)) for i in maxima)

    windows = []
    for i_min in minima:
        left = [i for i in maxima if i < i_min]
        right = [i for i in maxima if i > i_min]
        if not left or not right:
            continue  # valley without two flanking peaks is not a window
        cx, floor = _quadratic_refine(x, absorption, i_min)
        lower_peak = min(absorption[left[-1]], absorption[right[0]])
        level = floor + 0.5 * (lower_peak - floor)
        xl, xr = _half_level_crossings(x, absorption, i_min, level)
        windows.append(Window(center=cx, fwhm=xr - xl, floor=floor))

    slope_sign = _resonance_slope_sign(x, table.column("ImNr"))
    luminality = "subluminal" if slope_sign > 0 else "superluminal"

    return FeatureReport(
        windows=tuple(windows), peaks=peaks,
        resonance_slope_sign=slope_sign, luminality=luminality,
        drag_extrema=_drag_extrema(table),
        max_abs_im_ng=float(np.nanmax(np.abs(table.column("ImNg")))))


def _resonance_slope_sign(x: np.ndarray, im_nr: np.ndarray) -> int:
    order = np.argsort(np.abs(x))
    i, j = sorted(order[:2])
    slope = (im_nr[j] - im_nr[i]) / (x[j] - x[i])
    return int(np.sign(slope))


def _drag_extrema(table: SpectrumTable):
    x = table.column("axis")
    d = table.column("DragM")
    if np.all(np.isnan(d)):
        return ()
    maxima, minima = _local_extrema(d)
    out = [(float(x[i]), float(d[i])) for i in sorted(maxima + minima)]
    return tuple(out)


def window_width_trend(specs, parameter_values) -> dict:
    """Total transparency-window FWHM for each spec; monotonicity verdict.

    specs must differ only in one trend parameter whose values are passed
    alongside (same order).
    """
    if len(specs) < 2 or len(specs) != len(parameter_values):
        raise ValueError("need >= 2 specs with matching parameter values")
    widths = []
    for spec, value in zip(specs, parameter_values):
        report = extract_features(run_sweep(spec))
        widths.append((value, sum(w.fwhm for w in report.windows)))
    ws = [w for _, w in widths]
    if all(b > a for a, b in zip(ws, ws[1:])):
        verdict = "increasing"
    elif all(b < a for a, b in zip(ws, ws[1:])):
        verdict = "decreasing"
    else:
        verdict = "none"
    return {"widths": widths, "verdict": verdict}


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------

def _fmt(v) -> str:
    if v is None:
        return ""
    return format(float(v), ".17g")


def table_rows(table: SpectrumTable):
    """String cells per row, in the fixed column order."""
    for i in range(len(table)):
        et, nr, ng = table.eps_T[i], table.n_r[i], table.n_g[i]
        yield (
            _fmt(table.axis_values[i]),
            _fmt(None if et is None else et.real),
            _fmt(None if et is None else et.imag),
            _fmt(None if nr is None else nr.real),
            _fmt(None if nr is None else nr.imag),
            _fmt(None if ng is None else ng.real),
            _fmt(None if ng is None else ng.imag),
            _fmt(table.drag[i]),
            table.branch[i],
            table.flags[i],
        )


def to_csv(tables, labels=None) -> str:
    """RFC-4180-style CSV; a single table or a labeled wide family."""
    if isinstance(tables, SpectrumTable):
        tables, labels = [tables], [None]
    if labels is None:
        labels = [None] * len(tables)
    n = len(tables[0])
    for t in tables[1:]:
        if len(t) != n or not np.array_equal(t.axis_values,
                                             tables[0].axis_values):
            raise ValueError("family tables must share the axis grid")

    header = ["axis"]
    for label in labels:
        suffix = f"[{label}]" if label else ""
        header += [c + suffix for c in COLUMNS[1:]]
    lines = [",".join(header)]
    row_iters = [list(table_rows(t)) for t in tables]
    for i in range(n):
        cells = [row_iters[0][i][0]]
        for rows in row_iters:
            cells += list(rows[i][1:])
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def parse_csv(text: str, axis_name: str = "sigma"):
    """Inverse of to_csv: returns (tables, labels). Raises ValueError on
    anything that is not a sweep CSV.  The axis name is not stored in the
    CSV itself; pass it in (the CLI reads it from the run manifest)."""
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise ValueError("empty CSV")
    header = lines[0].split(",")
    if header[0] != "axis":
        raise ValueError("first column must be 'axis'")
    body = COLUMNS[1:]
    groups = []
    i = 1
    while i < len(header):
        chunk = header[i:i + len(body)]
        if len(chunk) != len(body):
            raise ValueError("truncated column group")
        label = None
        names = []
        for cell in chunk:
            if "[" in cell:
                name, _, rest = cell.partition("[")
                label = rest.rstrip("]")
            else:
                name = cell
            names.append(name)
        if tuple(names) != body:
            raise ValueError(f"unexpected columns {names}")
        groups.append(label)
        i += len(body)
    if not groups:
        raise ValueError("no data column groups")

    n_rows = len(lines) - 1
    axis = np.empty(n_rows)
    per = [dict(eps_T=[], n_r=[], n_g=[], drag=[], branch=[], flags=[])
           for _ in groups]
    for r, line in enumerate(lines[1:]):
        cells = line.split(",")
        if len(cells) != len(header):
            raise ValueError(f"row {r + 2}: wrong cell count")
        axis[r] = float(cells[0])
        for gi in range(len(groups)):
            c = cells[1 + gi * len(body): 1 + (gi + 1) * len(body)]
            g = per[gi]
            if c[8] != "ok" or c[0] == "":
                g["eps_T"].append(None), g["n_r"].append(None)
                g["n_g"].append(None), g["drag"].append(None)
            else:
                g["eps_T"].append(complex(float(c[0]), float(c[1])))
                g["n_r"].append(complex(float(c[2]), float(c[3])))
                g["n_g"].append(complex(float(c[4]), float(c[5])))
                g["drag"].append(float(c[6]))
            g["branch"].append(c[7])
            g["flags"].append(c[8])

    tables = [SpectrumTable(axis_name=axis_name, axis_values=axis.copy(), **g)
              for g in per]
    return tables, groups


def to_gnuplot(tables, labels=None) -> tuple[str, str]:
    """(data, script) pair: whitespace-separated data plus a plot stub."""
    if isinstance(tables, SpectrumTable):
        tables, labels = [tables], [None]
    if labels is None:
        labels = [None] * len(tables)
    numeric = COLUMNS[1:8]
    cols = ["axis"]
    for label in labels:
        suffix = f"_{label}" if label else ""
        cols += [c + suffix for c in numeric]
    out = ["# " + " ".join(cols)]
    for i in range(len(tables[0])):
        cells = [_fmt(tables[0].axis_values[i])]
        for t in tables:
            et, nr, ng = t.eps_T[i], t.n_r[i], t.n_g[i]
            vals = ["nan" if et is None else _fmt(et.real),
                    "nan" if et is None else _fmt(et.imag),
                    "nan" if nr is None else _fmt(nr.real),
                    "nan" if nr is None else _fmt(nr.imag),
                    "nan" if ng is None else _fmt(ng.real),
                    "nan" if ng is None else _fmt(ng.imag),
                    "nan" if t.drag[i] is None else _fmt(t.drag[i])]
            cells += vals
        out.append(" ".join(cells))
    data = "\n".join(out) + "\n"

    plots = []
    for gi, label in enumerate(labels):
        col = 2 + gi * len(numeric)  # ReEpsT of this group
        title = label or "ReEpsT"
        plots.append(f"'DATAFILE' using 1:{col} with lines title '{title}'")
    script = ("# gnuplot stub generated by magnodrag\n"
              "set xlabel 'axis'\n"
              "set ylabel 'Re eps_T'\n"
              "plot " + ", \\\n     ".join(plots) + "\n")
    return data, script
