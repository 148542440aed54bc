"""Magnomechanical transparency, group index, and lateral light drag.

Library layout:
    params    physical symbols, unit conventions, config ingestion
    steady    self-consistent nonlinear steady state with root bookkeeping
    response  probe-frequency response, indices, and the drag formula
    sweep     parameter sweeps, spectral feature extraction, CSV output
    presets   figure-reproduction parameter families
    cli       command-line front end (also renders figures to files)
"""

from .errors import (AxisMismatchError, ConfigError, MagnodragError,
                     NoPhysicalRootError, NonphysicalIndexError,
                     ResidualTooLargeError, SingularResponseError, SweepError)
from .params import (DriveSpec, PhysicalConstants, SphereSpec, SystemParams,
                     derive_spin_count, inverse_power, load_config,
                     params_from_dict, rabi_from_field, rabi_from_power)
from .response import (ProbeResponse, evaluate_probe, group_index,
                       light_drag, light_drag_complex, output_amplitude,
                       probe_response_closed, probe_response_matrix,
                       refractive_index, susceptibility,
                       susceptibility_derivative, susceptibility_derivative_fd)
from .steady import (SteadyState, effective_coupling, solve_steady,
                     solve_steady_fixed_point, stationary_residual,
                     steady_cubic_coefficients)
from .sweep import (FeatureReport, SpectrumTable, SweepSpec, extract_features,
                    parse_csv, run_sweep, to_csv, to_gnuplot,
                    window_width_trend)

__version__ = "1.0.0"

__all__ = [
    "AxisMismatchError", "ConfigError", "MagnodragError",
    "NoPhysicalRootError", "NonphysicalIndexError", "ResidualTooLargeError",
    "SingularResponseError", "SweepError",
    "DriveSpec", "PhysicalConstants", "SphereSpec", "SystemParams",
    "derive_spin_count", "inverse_power", "load_config", "params_from_dict",
    "rabi_from_field", "rabi_from_power",
    "ProbeResponse", "evaluate_probe", "group_index", "light_drag",
    "light_drag_complex", "output_amplitude", "probe_response_closed",
    "probe_response_matrix", "refractive_index", "susceptibility",
    "susceptibility_derivative", "susceptibility_derivative_fd",
    "SteadyState", "effective_coupling", "solve_steady",
    "solve_steady_fixed_point", "stationary_residual",
    "steady_cubic_coefficients",
    "FeatureReport", "SpectrumTable", "SweepSpec", "extract_features",
    "parse_csv", "run_sweep", "to_csv", "to_gnuplot", "window_width_trend",
    "__version__",
]
