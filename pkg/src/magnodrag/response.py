"""Probe-frequency linear response, refractive/group indices, and light drag.

All functions accept scalar or numpy-array probe detunings sigma (rad/s),
measured from the phonon sideband.  The closed-form single-sideband result

    c_+ = (a_m a_b + |G|^2) eps_p / (a_c (a_m a_b + |G|^2) + Gamma^2 a_b)

with a_z = kappa_z - i sigma has an independent 3x3 matrix-solve twin used
as an oracle throughout the test suite.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NonphysicalIndexError, SingularResponseError
from .params import SystemParams

TWO_PI = 2.0 * np.pi

# A response point counts as "on a pole" when the closed-form denominator is
# this small relative to its largest additive term (or absolutely tiny).
POLE_REL_TOL = 1e-12
POLE_ABS_TOL = 1e-300


@dataclass(frozen=True)
class ProbeResponse:
    """Per-sigma record of everything the sweep engine reports."""

    sigma: float
    c_plus: complex
    eps_T: complex
    chi: complex
    n_r: complex
    n_g: complex
    drag: float | None = None           # Re part, meters
    drag_complex: complex | None = None  # diagnostics


def _alphas(params: SystemParams, sigma):
    a_c = params.kappa_c - 1j * np.asarray(sigma, dtype=float)
    a_m = params.kappa_m - 1j * np.asarray(sigma, dtype=float)
    a_b = params.gamma_b - 1j * np.asarray(sigma, dtype=float)
    return a_c, a_m, a_b


def _numerator_denominator(params: SystemParams, G_mb, sigma):
    a_c, a_m, a_b = _alphas(params, sigma)
    g2 = abs(G_mb) ** 2
    num = a_m * a_b + g2
    den = a_c * num + params.Gamma**2 * a_b
    return num, den, (a_c, a_m, a_b)


def _check_poles(den, a_c, num, gamma2, a_b):
    scale = np.maximum(np.abs(a_c * num), gamma2 * np.abs(a_b))
    bad = (np.abs(den) <= POLE_ABS_TOL) | (np.abs(den) <= POLE_REL_TOL * scale)
    if np.any(bad):
        raise SingularResponseError("probe response evaluated on a pole")


def probe_response_closed(params: SystemParams, G_mb, sigma, eps_p: float = 1.0):
    """Closed-form intracavity probe sideband amplitude c_+."""
    num, den, (a_c, _, a_b) = _numerator_denominator(params, G_mb, sigma)
    _check_poles(den, a_c, num, params.Gamma**2, a_b)
    out = eps_p * num / den
    return complex(out) if np.isscalar(sigma) else out


def probe_response_matrix(params: SystemParams, G_mb, sigma, eps_p: float = 1.0):
    """Oracle: direct dense solve of the three coupled sideband equations."""
    sig_arr = np.atleast_1d(np.asarray(sigma, dtype=float))
    out = np.empty(sig_arr.shape, dtype=complex)
    g = complex(G_mb)
    for i, s in enumerate(sig_arr):
        a_c, a_m, a_b = (params.kappa_c - 1j * s, params.kappa_m - 1j * s,
                         params.gamma_b - 1j * s)
        mat = np.array([
            [a_c, 1j * params.Gamma, 0.0],
            [1j * params.Gamma, a_m, 1j * g],
            [0.0, 1j * g.conjugate(), a_b],
        ], dtype=complex)
        try:
            sol = np.linalg.solve(mat, np.array([eps_p, 0.0, 0.0], dtype=complex))
        except np.linalg.LinAlgError as exc:
            raise SingularResponseError(str(exc)) from exc
        out[i] = sol[0]
    return complex(out[0]) if np.isscalar(sigma) else out


def output_amplitude(c_plus, kappa_c: float, eps_p: float):
    """Output quadrature amplitude eps_T = 2 kappa_c c_+ / eps_p."""
    if eps_p <= 0:
        raise ValueError("eps_p must be > 0")
    return 2.0 * kappa_c * c_plus / eps_p


def susceptibility(params: SystemParams, G_mb, sigma, eps_p: float = 1.0):
    """chi = eps_T (the normalized output field plays the susceptibility)."""
    return output_amplitude(probe_response_closed(params, G_mb, sigma, eps_p),
                            params.kappa_c, eps_p)


def refractive_index(chi):
    """n_r = 1 + 2 pi chi."""
    return 1.0 + TWO_PI * chi


def susceptibility_derivative(params: SystemParams, G_mb, sigma):
    """Analytic d chi / d sigma, differentiating the closed form.

    Every alpha_z has derivative -i, so with N = a_m a_b + |G|^2 and
    D = a_c N + Gamma^2 a_b:  N' = -i (a_m + a_b),
    D' = -i N + a_c N' - i Gamma^2, and chi' = 2 k_c (N'D - ND') / D^2.
    """
    num, den, (a_c, a_m, a_b) = _numerator_denominator(params, G_mb, sigma)
    _check_poles(den, a_c, num, params.Gamma**2, a_b)
    num_p = -1j * (a_m + a_b)
    den_p = -1j * num + a_c * num_p - 1j * params.Gamma**2
    out = 2.0 * params.kappa_c * (num_p * den - num * den_p) / den**2
    return complex(out) if np.isscalar(sigma) else out


def susceptibility_derivative_fd(params: SystemParams, G_mb, sigma,
                                 step: float | None = None):
    """Central finite difference of chi; default step 1e-6 * omega_b."""
    h = 1e-6 * params.omega_b if step is None else step
    return (susceptibility(params, G_mb, np.asarray(sigma) + h)
            - susceptibility(params, G_mb, np.asarray(sigma) - h)) / (2.0 * h)


def group_index(params: SystemParams, G_mb, sigma, omega_probe: float,
                method: str = "analytic", fd_step: float | None = None):
    """n_g = n_r + 2 pi omega_probe * d chi / d sigma."""
    if omega_probe <= 0:
        raise ValueError("omega_probe must be > 0")
    if method == "analytic":
        dchi = susceptibility_derivative(params, G_mb, sigma)
    elif method == "fd":
        dchi = susceptibility_derivative_fd(params, G_mb, sigma, fd_step)
    else:
        raise ValueError(f"unknown method {method!r}")
    n_r = refractive_index(susceptibility(params, G_mb, sigma))
    return n_r + TWO_PI * omega_probe * dchi


def light_drag_complex(n_r, n_g, v: float, length: float, c_vac: float):
    """Full complex lateral displacement (n_g - 1/n_r) v l / c."""
    if length <= 0:
        raise ValueError("medium length must be > 0")
    if np.any(np.abs(n_r) < 1e-12):
        raise NonphysicalIndexError("|n_r| too small for the drag formula")
    return (n_g - 1.0 / n_r) * v * length / c_vac


def light_drag(n_r, n_g, v: float, length: float, c_vac: float):
    """Physical lateral drag Delta_x (m): real part of the complex shift."""
    return np.real(light_drag_complex(n_r, n_g, v, length, c_vac))


def evaluate_probe(params: SystemParams, G_mb, sigma: float,
                   omega_probe: float | None = None,
                   v: float | None = None, eps_p: float = 1.0) -> ProbeResponse:
    """Convenience: the full per-sigma record at a single detuning."""
    omega = params.omega_c if omega_probe is None else omega_probe
    c_plus = probe_response_closed(params, G_mb, sigma, eps_p)
    eps_t = output_amplitude(c_plus, params.kappa_c, eps_p)
    n_r = refractive_index(eps_t)
    n_g = n_r + TWO_PI * omega * susceptibility_derivative(params, G_mb, sigma)
    drag = drag_c = None
    if v is not None:
        drag_c = light_drag_complex(n_r, n_g, v, params.medium_length,
                                    params.constants.c_vac)
        drag = float(np.real(drag_c))
    return ProbeResponse(sigma=float(sigma), c_plus=c_plus, eps_T=eps_t,
                         chi=eps_t, n_r=n_r, n_g=n_g, drag=drag,
                         drag_complex=drag_c)
