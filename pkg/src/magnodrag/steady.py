"""Self-consistent nonlinear steady state of the driven magnomechanical system.

The stationary amplitudes satisfy

    b_s = -i g_mb |m_s|^2 / (gamma_b + i omega_b)
    c_s = -i Gamma m_s / (kappa_c + i Delta_c)
    m_s = eps_m zeta_c / (zeta_c zeta_m + Gamma^2)

with zeta_s = kappa_s + i Delta_s and the magnetostrictive pull
Delta_m = Delta_m^0 + g_mb (b_s + b_s*).  Substituting

    b_s + b_s* = -2 g_mb omega_b x / (omega_b^2 + gamma_b^2),   x = |m_s|^2

into |m_s|^2 and clearing denominators turns the self-consistency into a
real cubic in x, which is solved in closed form, polished by Newton steps,
and verified against the stationary Langevin residual.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import NoPhysicalRootError, ResidualTooLargeError
from .params import SystemParams

RESIDUAL_TOL = 1e-9        # normalized stationary residual
ROOT_IMAG_TOL = 1e-8       # |Im|/|x| above which a root is unphysical

_BRANCH_POLICIES = ("lowest", "highest", "continuation")


@dataclass(frozen=True)
class SteadyState:
    """One selected steady-state branch plus root bookkeeping.

    delta_c / delta_m0 are the detunings actually used by the solve; in the
    "effective" convention they differ from the configured ones because the
    drive is retuned so that Delta_m equals the configured target post-pull.
    """

    m_s: complex
    c_s: complex
    b_s: complex
    delta_m_eff: float
    delta_c: float
    delta_m0: float
    epsilon_m: float
    roots: tuple[float, ...]      # all physical roots x = |m_s|^2, ascending
    root_count: int
    branch: str
    residual: float

    @property
    def x(self) -> float:
        return abs(self.m_s) ** 2


def _pull_coefficient(params: SystemParams) -> float:
    """eta such that Delta_m = Delta_m^0 - eta * |m_s|^2."""
    return (2.0 * params.g_mb**2 * params.omega_b
            / (params.omega_b**2 + params.gamma_b**2))


def steady_cubic_coefficients(params: SystemParams, epsilon_m: float,
                              delta_c: float | None = None,
                              delta_m0: float | None = None):
    """Real coefficients [c3, c2, c1, c0] of the cubic in x = |m_s|^2.

    With A = zeta_c zeta_m^0 + Gamma^2 and B = -i eta zeta_c the condition
    x |A + B x|^2 = eps_m^2 |zeta_c|^2 expands to
    |B|^2 x^3 + 2 Re(A conj(B)) x^2 + |A|^2 x - eps_m^2 |zeta_c|^2 = 0.
    """
    if epsilon_m < 0:
        raise ValueError("epsilon_m must be >= 0")
    dc = params.delta_c if delta_c is None else delta_c
    dm0 = params.delta_m0 if delta_m0 is None else delta_m0
    eta = _pull_coefficient(params)
    zc = complex(params.kappa_c, dc)
    zm0 = complex(params.kappa_m, dm0)
    a = zc * zm0 + params.Gamma**2
    b = -1j * eta * zc
    c3 = abs(b) ** 2
    c2 = 2.0 * (a * b.conjugate()).real
    c1 = abs(a) ** 2
    c0 = -(epsilon_m**2) * abs(zc) ** 2
    return [c3, c2, c1, c0]


def _real_cubic_roots(c3: float, c2: float, c1: float, c0: float) -> list[float]:
    """All real roots of c3 x^3 + c2 x^2 + c1 x + c0, closed form.

    Degenerate leading coefficients fall back to quadratic/linear solves.
    """
    if c3 == 0.0:
        if c2 == 0.0:
            if c1 == 0.0:
                return [0.0] if c0 == 0.0 else []
            return [-c0 / c1]
        disc = c1 * c1 - 4.0 * c2 * c0
        if disc < 0.0:
            return []
        s = math.sqrt(disc)
        return [(-c1 - s) / (2.0 * c2), (-c1 + s) / (2.0 * c2)]

    # Depressed form t^3 + p t + q with x = t - c2/(3 c3).
    b, c, d = c2 / c3, c1 / c3, c0 / c3
    shift = b / 3.0
    p = c - b * b / 3.0
    q = 2.0 * b**3 / 27.0 - b * c / 3.0 + d
    disc = (q / 2.0) ** 2 + (p / 3.0) ** 3
    if disc > 0.0:
        s = math.sqrt(disc)
        t = math.copysign(abs(-q / 2.0 + s) ** (1.0 / 3.0), -q / 2.0 + s) \
            + math.copysign(abs(-q / 2.0 - s) ** (1.0 / 3.0), -q / 2.0 - s)
        return [t - shift]
    if p == 0.0:  # triple root
        return [-shift]
    # Three real roots: trigonometric method.
    m = 2.0 * math.sqrt(-p / 3.0)
    arg = 3.0 * q / (p * m)
    arg = min(1.0, max(-1.0, arg))
    theta = math.acos(arg) / 3.0
    return [m * math.cos(theta - 2.0 * math.pi * k / 3.0) - shift
            for k in range(3)]


def _polish(coeffs, x: float) -> float:
    """A few Newton steps on the cubic; deterministic, fixed iteration count."""
    c3, c2, c1, c0 = coeffs
    for _ in range(3):
        f = ((c3 * x + c2) * x + c1) * x + c0
        df = (3.0 * c3 * x + 2.0 * c2) * x + c1
        if df == 0.0:
            break
        step = f / df
        x -= step
        if abs(step) <= 1e-16 * abs(x):
            break
    return x


def _physical_roots(coeffs) -> list[float]:
    roots = [_polish(coeffs, r) for r in _real_cubic_roots(*coeffs)]
    roots = sorted(r for r in roots if r >= 0.0 or r > -1e-30)
    roots = [max(r, 0.0) for r in roots]
    # Fold near-duplicates produced by polishing distinct closed-form roots.
    folded: list[float] = []
    for r in roots:
        if folded and abs(r - folded[-1]) <= 1e-9 * max(abs(r), 1e-300):
            continue
        folded.append(r)
    return folded


def _select(roots: list[float], policy: str, seed: float | None) -> tuple[float, str]:
    if policy == "lowest":
        return roots[0], "lowest"
    if policy == "highest":
        return roots[-1], "highest"
    if policy == "continuation":
        if seed is None:
            return roots[0], "continuation"
        return min(roots, key=lambda r: abs(r - seed)), "continuation"
    raise ValueError(f"unknown branch policy {policy!r}; "
                     f"choose one of {_BRANCH_POLICIES}")


def _amplitudes(params: SystemParams, epsilon_m: float, x: float,
                delta_c: float, delta_m0: float):
    eta = _pull_coefficient(params)
    dm = delta_m0 - eta * x
    zc = complex(params.kappa_c, delta_c)
    zm = complex(params.kappa_m, dm)
    denom = zc * zm + params.Gamma**2
    m_s = epsilon_m * zc / denom
    c_s = -1j * params.Gamma * m_s / zc
    b_s = -1j * params.g_mb * abs(m_s) ** 2 / complex(params.gamma_b, params.omega_b)
    return m_s, c_s, b_s, dm


def stationary_residual(params: SystemParams, epsilon_m: float,
                        state: SteadyState) -> float:
    """Max-norm of the stationary Langevin RHS, each equation normalized by
    its largest additive term (so an all-zero state under drive scores 1)."""
    dc, dm0 = state.delta_c, state.delta_m0
    m, c, b = state.m_s, state.c_s, state.b_s

    def norm(terms):
        scale = max(abs(t) for t in terms)
        if scale == 0.0:
            return 0.0
        return abs(sum(terms)) / scale

    r_c = norm([-(1j * dc + params.kappa_c) * c, -1j * params.Gamma * m])
    r_m = norm([-(1j * dm0 + params.kappa_m) * m, -1j * params.Gamma * c,
                -1j * params.g_mb * m * (b + b.conjugate()), epsilon_m])
    r_b = norm([-(params.gamma_b + 1j * params.omega_b) * b,
                -1j * params.g_mb * abs(m) ** 2])
    return max(r_c, r_m, r_b)


def _solve_at(params: SystemParams, epsilon_m: float, branch_policy: str,
              seed: float | None, delta_c: float, delta_m0: float) -> SteadyState:
    coeffs = steady_cubic_coefficients(params, epsilon_m, delta_c, delta_m0)
    roots = _physical_roots(coeffs)
    if not roots:
        raise NoPhysicalRootError(
            f"no non-negative real root for eps_m={epsilon_m:g}")
    x, branch = _select(roots, branch_policy, seed)
    m_s, c_s, b_s, dm = _amplitudes(params, epsilon_m, x, delta_c, delta_m0)
    state = SteadyState(
        m_s=m_s, c_s=c_s, b_s=b_s, delta_m_eff=dm, delta_c=delta_c,
        delta_m0=delta_m0, epsilon_m=epsilon_m, roots=tuple(roots),
        root_count=len(roots), branch=branch, residual=0.0)
    res = stationary_residual(params, epsilon_m, state)
    if res > RESIDUAL_TOL:
        raise ResidualTooLargeError(
            f"stationary residual {res:.3e} exceeds {RESIDUAL_TOL:g}")
    object.__setattr__(state, "residual", res)
    return state


def solve_steady(params: SystemParams, epsilon_m: float | None = None,
                 branch_policy: str = "lowest",
                 seed: float | None = None) -> SteadyState:
    """Solve the steady state; eps_m defaults to the drive spec of params.

    In the "effective" detuning convention the drive frequency is retuned so
    that the post-pull Delta_m equals the configured Delta_m^0 target; the
    retune shifts Delta_c by the same (tiny) amount in the other direction.
    """
    if branch_policy not in _BRANCH_POLICIES:
        raise ValueError(f"unknown branch policy {branch_policy!r}")
    if epsilon_m is None:
        epsilon_m = params.epsilon_m()

    delta_c, delta_m0 = params.delta_c, params.delta_m0
    if params.detuning_convention == "bare":
        return _solve_at(params, epsilon_m, branch_policy, seed, delta_c, delta_m0)

    # effective: fixed point on the retune shift eta*x
    eta = _pull_coefficient(params)
    shift = 0.0
    state = None
    for _ in range(100):
        state = _solve_at(params, epsilon_m, branch_policy, seed,
                          delta_c + shift, delta_m0 + shift)
        new_shift = eta * state.x
        if abs(new_shift - shift) <= 1e-14 * max(abs(new_shift), 1e-300):
            break
        shift = new_shift
    return state


def solve_steady_fixed_point(params: SystemParams, epsilon_m: float | None = None,
                             tol: float = 1e-14, max_iter: int = 10000) -> SteadyState:
    """Independent fixed-point solve m <- eps zeta_c / (zeta_c zeta_m(|m|^2) + G^2).

    Converges to the lower branch when it converges at all; used as an
    oracle for the cubic-root path.  Honors the detuning convention.
    """
    if epsilon_m is None:
        epsilon_m = params.epsilon_m()
    eta = _pull_coefficient(params)
    delta_c, delta_m0 = params.delta_c, params.delta_m0
    effective = params.detuning_convention == "effective"

    x = 0.0
    for _ in range(max_iter):
        shift = eta * x if effective else 0.0
        zc = complex(params.kappa_c, delta_c + shift)
        zm = complex(params.kappa_m, delta_m0 + shift - eta * x)
        x_new = epsilon_m**2 * abs(zc) ** 2 / abs(zc * zm + params.Gamma**2) ** 2
        converged = abs(x_new - x) <= tol * max(x_new, 1e-300)
        x = x_new
        if converged:
            break
    else:
        raise ResidualTooLargeError("fixed-point iteration did not converge")

    shift = eta * x if effective else 0.0
    dc, dm0 = delta_c + shift, delta_m0 + shift
    m_s, c_s, b_s, dm = _amplitudes(params, epsilon_m, x, dc, dm0)
    state = SteadyState(
        m_s=m_s, c_s=c_s, b_s=b_s, delta_m_eff=dm, delta_c=dc, delta_m0=dm0,
        epsilon_m=epsilon_m, roots=(x,), root_count=1,
        branch="fixed-point", residual=0.0)
    object.__setattr__(state, "residual",
                       stationary_residual(params, epsilon_m, state))
    return state


def effective_coupling(params: SystemParams, state: SteadyState) -> complex:
    """Linearized magnomechanical coupling G_mb = g_mb * m_s."""
    return params.g_mb * state.m_s
