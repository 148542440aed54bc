"""Acceptance gate: one test per headline guarantee, one printed line each.

Run with `pytest tests/test_acceptance.py -s` to see the PASS lines; every
test also enforces its stated runtime budget.
"""

import cmath
import time

import numpy as np
import pytest
from scipy.optimize import curve_fit

from magnodrag import (effective_coupling, light_drag, probe_response_closed,
                       probe_response_matrix, solve_steady,
                       solve_steady_fixed_point, susceptibility,
                       susceptibility_derivative, susceptibility_derivative_fd,
                       extract_features, run_sweep, window_width_trend,
                       SweepSpec)
from magnodrag.cli import main
from conftest import CONFIG_PATH, TWO_PI, make_params

OMEGA_B = TWO_PI * 15e6


def report(name, ok, detail=""):
    status = "PASS" if ok else "FAIL"
    print(f"[{status}] {name}" + (f"  ({detail})" if detail else ""))
    assert ok, name


def random_rate(rng):
    return OMEGA_B * 10.0 ** rng.uniform(-3.0, 0.0)


def random_system(rng):
    return make_params(kappa_c=random_rate(rng), kappa_m=random_rate(rng),
                       gamma_b=random_rate(rng), Gamma=random_rate(rng),
                       assume_sideband_resolved=False)


def sigma_sweep(params, samples=4001, velocity=0.0):
    return SweepSpec(base=params, axis="sigma", lo=-0.5, hi=0.5,
                     samples=samples, velocity=velocity)


class TestAcceptance:
    def test_oracle_equivalence(self):
        t0 = time.perf_counter()
        rng = np.random.default_rng(11)
        worst = 0.0
        for _ in range(1000):
            p = random_system(rng)
            g = random_rate(rng) * cmath.exp(1j * rng.uniform(0.0, TWO_PI))
            sigma = rng.uniform(-0.5, 0.5) * OMEGA_B
            closed = probe_response_closed(p, g, sigma)
            matrix = probe_response_matrix(p, g, sigma)
            worst = max(worst, abs(closed - matrix) / abs(closed))
        elapsed = time.perf_counter() - t0
        report("oracle equivalence: closed form vs 3x3 solve, 1000 draws",
               worst <= 1e-10 and elapsed < 1.0,
               f"max rel dev {worst:.2e}, {elapsed:.2f}s")

    def test_steady_state_correctness(self):
        t0 = time.perf_counter()
        worst_res, worst_dev = 0.0, 0.0
        for power in (0.0, 3e-3, 6e-3, 15e-3):
            for convention in ("effective", "bare"):
                p = make_params(power=power,
                                detuning_convention=convention)
                state = solve_steady(p)
                oracle = solve_steady_fixed_point(p)
                worst_res = max(worst_res, state.residual)
                if oracle.x > 0.0:
                    worst_dev = max(worst_dev,
                                    abs(state.x - oracle.x) / oracle.x)
        elapsed = time.perf_counter() - t0
        report("steady state: residual < 1e-9, cubic vs fixed point 1e-10",
               worst_res < 1e-9 and worst_dev <= 1e-10 and elapsed < 1.0,
               f"residual {worst_res:.2e}, dev {worst_dev:.2e}, "
               f"{elapsed:.2f}s")

    def test_derivative_check(self):
        t0 = time.perf_counter()
        rng = np.random.default_rng(42)
        p = make_params()
        g = effective_coupling(p, solve_steady(p))
        h = 1e-6 * p.omega_b
        worst = 0.0
        for _ in range(100):
            sigma = rng.uniform(-0.5, 0.5) * p.omega_b
            ana = susceptibility_derivative(p, g, sigma)
            fd = susceptibility_derivative_fd(p, g, sigma, step=h)
            worst = max(worst, abs(fd - ana) / abs(ana))
        elapsed = time.perf_counter() - t0
        report("derivative: analytic vs central difference at 100 points",
               worst <= 1e-6 and elapsed < 1.0,
               f"max rel dev {worst:.2e}, {elapsed:.2f}s")

    def test_symmetry_suite(self):
        rng = np.random.default_rng(7)
        grid = np.linspace(-0.5, 0.5, 201) * OMEGA_B
        worst = 0.0
        for _ in range(50):
            p = random_system(rng)
            g = random_rate(rng)
            plus = susceptibility(p, g, grid)
            minus = susceptibility(p, g, -grid)
            worst = max(worst,
                        float(np.max(np.abs(minus - np.conj(plus))
                                     / np.abs(plus))))
        report("symmetry: eps_T(-sigma) = conj(eps_T(sigma)), 50 sets",
               worst <= 1e-12, f"max rel dev {worst:.2e}")

    def test_limit_suite(self):
        p0 = make_params(Gamma=0.0, power=0.0)
        sig = np.linspace(-0.5, 0.5, 4001) * p0.omega_b
        re = np.real(susceptibility(p0, 0.0, sig))

        def lorentzian(s, amp, hwhm):
            return amp * hwhm**2 / (hwhm**2 + s**2)

        popt, _ = curve_fit(lorentzian, sig, re, p0=(1.0, p0.kappa_c / 2.0))
        fwhm_ok = abs(2.0 * popt[1] - 2.0 * p0.kappa_c) <= 1e-3 * 2.0 * p0.kappa_c

        p = make_params()
        expected = (2.0 * p.kappa_c * p.kappa_m
                    / (p.kappa_c * p.kappa_m + p.Gamma**2))
        val = susceptibility(p, 0.0, 0.0)
        point_ok = abs(val - expected) <= 1e-12 * abs(expected)

        zero = solve_steady(make_params(power=0.0))
        zero_ok = zero.m_s == 0.0 and zero.c_s == 0.0 and zero.b_s == 0.0

        report("limits: Lorentzian FWHM 2*kappa_c / G=0 resonance value / "
               "zero drive",
               fwhm_ok and point_ok and zero_ok,
               f"fwhm rel err {abs(2*popt[1]/(2*p0.kappa_c)-1):.2e}")

    def test_figure_family_gamma_windows(self):
        t0 = time.perf_counter()
        specs, values = [], []
        counts_ok = True
        for g in (0.1, 0.2, 0.4):
            p = make_params(Gamma=g * OMEGA_B, power=0.0)
            spec = sigma_sweep(p)
            feats = extract_features(run_sweep(spec))
            counts_ok &= (len(feats.windows) == 1 and len(feats.peaks) == 2)
            specs.append(spec)
            values.append(g)
        trend = window_width_trend(specs, values)
        elapsed = time.perf_counter() - t0
        report("family (a): coupling sweep gives 1 window / 2 peaks, "
               "FWHM strictly increasing",
               counts_ok and trend["verdict"] == "increasing"
               and elapsed < 5.0,
               f"widths {[f'{w:.4f}' for _, w in trend['widths']]}, "
               f"{elapsed:.2f}s")

    def test_figure_family_power_windows(self):
        t0 = time.perf_counter()
        specs, values = [], []
        counts_ok = True
        for power in (3e-3, 6e-3, 15e-3):
            p = make_params(Gamma=0.1 * OMEGA_B, power=power)
            spec = sigma_sweep(p, samples=8001)
            feats = extract_features(run_sweep(spec))
            counts_ok &= (len(feats.windows) == 2 and len(feats.peaks) == 3)
            specs.append(spec)
            values.append(power)
        trend = window_width_trend(specs, values)
        elapsed = time.perf_counter() - t0
        report("family (b): drive sweep gives 2 windows / 3 peaks, "
               "total width strictly increasing",
               counts_ok and trend["verdict"] == "increasing"
               and elapsed < 5.0,
               f"widths {[f'{w:.6f}' for _, w in trend['widths']]}, "
               f"{elapsed:.2f}s")

    def test_figure_family_luminality(self):
        t0 = time.perf_counter()
        sub = extract_features(run_sweep(sigma_sweep(
            make_params(Gamma=0.0, power=0.0))))
        sup = extract_features(run_sweep(sigma_sweep(
            make_params(Gamma=0.1 * OMEGA_B, power=0.0))))
        elapsed = time.perf_counter() - t0
        report("family (c): luminality subluminal at zero coupling, "
               "superluminal at 0.1 omega_b",
               sub.luminality == "subluminal"
               and sup.luminality == "superluminal" and elapsed < 5.0,
               f"{sub.luminality}/{sup.luminality}, {elapsed:.2f}s")

    def test_figure_family_drag_slope_flip(self):
        t0 = time.perf_counter()

        def slope(power):
            p = make_params(Gamma=0.1 * OMEGA_B, power=power)
            spec = SweepSpec(base=p, axis="velocity", lo=-300.0, hi=300.0,
                             samples=41, sigma=0.004)
            table = run_sweep(spec)
            return np.polyfit(table.column("axis"),
                              table.column("DragM"), 1)[0]

        s0, s3 = slope(0.0), slope(3e-3)
        elapsed = time.perf_counter() - t0
        report("family (d): drag-vs-velocity slope flips sign when the "
               "drive turns on",
               s0 > 0.0 > s3 and elapsed < 5.0,
               f"slopes {s0:.3e} -> {s3:.3e}, {elapsed:.2f}s")

    def test_drag_linearity(self):
        C_VAC = 2.99792458e8
        n_r, n_g = 1.7 - 0.2j, -3.1e4 + 2.2e4j
        v = np.linspace(-300.0, 300.0, 41)
        dx = np.array([light_drag(n_r, n_g, vi, 0.01, C_VAC) for vi in v])
        fit = np.polyval(np.polyfit(v, dx, 1), v)
        scale = np.max(np.abs(dx))
        v_ok = np.max(np.abs(dx - fit)) <= 1e-12 * scale
        ls = np.linspace(1e-4, 1.0, 41)
        dxl = np.array([light_drag(n_r, n_g, 200.0, li, C_VAC) for li in ls])
        fitl = np.polyval(np.polyfit(ls, dxl, 1), ls)
        l_ok = np.max(np.abs(dxl - fitl)) <= 1e-12 * np.max(np.abs(dxl))
        zero_ok = light_drag(n_r, n_g, 0.0, 0.01, C_VAC) == 0.0
        report("drag: exactly affine in velocity and length, zero at rest",
               v_ok and l_ok and zero_ok)

    def test_cli_determinism_and_presets(self, tmp_path):
        import json

        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        for out in (a, b):
            assert main(["sweep", "--config", str(CONFIG_PATH),
                         "--out", str(out), "--figure", "2b"]) == 0
        deterministic = a.read_bytes() == b.read_bytes()

        bad = tmp_path / "bad.json"
        bad.write_text("{broken")
        bad_exit = main(["steady", "--config", str(bad)]) == 2

        flagged = 0
        for figure in ("2a", "2b", "2c", "2d", "3a", "3b", "4a", "4b", "4c",
                       "4d", "5a", "5b", "6a", "6b", "6c", "6d", "7a", "7b"):
            out = tmp_path / f"{figure}.csv"
            assert main(["sweep", "--config", str(CONFIG_PATH),
                         "--out", str(out), "--figure", figure]) == 0
            manifest = json.loads((tmp_path / f"{figure}.csv.manifest")
                                  .read_text())
            flagged += manifest["flagged_rows"]
        report("CLI: byte-identical rerun, malformed config exits 2, "
               "all 18 presets gap-free",
               deterministic and bad_exit and flagged == 0,
               f"flagged rows {flagged}")
