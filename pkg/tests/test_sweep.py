import numpy as np
import pytest
from scipy.optimize import curve_fit

from magnodrag import (AxisMismatchError, SweepSpec, extract_features,
                       parse_csv, run_sweep, to_csv, to_gnuplot,
                       window_width_trend)
from magnodrag.presets import FIGURE_PRESETS
from conftest import TWO_PI, make_params


def sigma_spec(samples=4001, lo=-0.5, hi=0.5, **kwargs):
    base = kwargs.pop("base", make_params())
    return SweepSpec(base=base, axis="sigma", lo=lo, hi=hi,
                     samples=samples, **kwargs)


class TestRunSweep:
    def test_two_samples(self):
        table = run_sweep(sigma_spec(samples=2))
        assert len(table) == 2
        assert table.axis_values[0] == -0.5 and table.axis_values[1] == 0.5

    def test_bare_cavity_lorentzian(self):
        # Gamma = 0, G = 0: Re eps_T is a Lorentzian of FWHM 2 kappa_c
        p = make_params(Gamma=0.0, power=0.0)
        table = run_sweep(sigma_spec(base=p))
        sig = table.column("axis") * p.omega_b
        re = table.column("ReEpsT")

        def lorentzian(s, amp, hwhm):
            return amp * hwhm**2 / (hwhm**2 + s**2)

        popt, _ = curve_fit(lorentzian, sig, re, p0=(1.0, p.kappa_c / 2.0))
        assert popt[0] == pytest.approx(2.0, rel=1e-3)
        assert 2.0 * popt[1] == pytest.approx(2.0 * p.kappa_c, rel=1e-3)

    def test_velocity_sweep_exactly_affine(self):
        p = make_params()
        spec = SweepSpec(base=p, axis="velocity", lo=-300.0, hi=300.0,
                         samples=201, sigma=0.0)
        table = run_sweep(spec)
        v = table.column("axis")
        d = table.column("DragM")
        slope = np.polyfit(v, d, 1)
        fit = np.polyval(slope, v)
        scale = np.max(np.abs(d))
        assert np.max(np.abs(d - fit)) <= 1e-12 * scale
        assert abs(np.interp(0.0, v, d)) <= 1e-12 * scale

    def test_determinism(self):
        spec = sigma_spec(samples=501)
        csv_a = to_csv(run_sweep(spec))
        csv_b = to_csv(run_sweep(spec))
        assert csv_a == csv_b

    def test_symmetric_grid_column_symmetry(self):
        table = run_sweep(sigma_spec(samples=1001))
        # n_g and the drag mix even and odd terms, so only eps_T and n_r
        # have a definite parity
        for name, parity in [("ReEpsT", +1), ("ImEpsT", -1),
                             ("ReNr", +1), ("ImNr", -1)]:
            col = table.column(name)
            scale = np.max(np.abs(col))
            assert np.max(np.abs(col - parity * col[::-1])) <= 1e-12 * scale, name

    def test_power_axis_resolves_steady_per_point(self):
        p = make_params(Gamma=0.1 * TWO_PI * 15e6)
        spec = SweepSpec(base=p, axis="power", lo=0.0, hi=15e-3, samples=16,
                         sigma=0.0)
        table = run_sweep(spec)
        assert table.flags == ["ok"] * 16
        # response at resonance changes with power through G_mb
        re = table.column("ReEpsT")
        assert re[-1] != pytest.approx(re[0], rel=1e-3)

    def test_gamma_axis(self):
        spec = SweepSpec(base=make_params(power=0.0), axis="Gamma",
                         lo=0.01, hi=0.5, samples=25, sigma=0.0)
        table = run_sweep(spec)
        re = table.column("ReEpsT")
        assert np.all(np.diff(re) < 0)  # deeper transparency with coupling

    def test_continuation_policy_is_sequential(self):
        p = make_params(Gamma=0.1 * TWO_PI * 15e6, detuning_convention="bare")
        spec = SweepSpec(base=p, axis="power", lo=0.0, hi=15e-3, samples=31,
                         sigma=0.0, branch_policy="continuation")
        table = run_sweep(spec)
        assert table.flags == ["ok"] * 31

    def test_invalid_spec(self):
        with pytest.raises(ValueError):
            sigma_spec(samples=1)
        with pytest.raises(ValueError):
            sigma_spec(lo=0.5, hi=-0.5)
        with pytest.raises(ValueError):
            SweepSpec(base=make_params(), axis="frequency")


class TestFeatureExtraction:
    def test_single_window_two_peaks(self):
        p = make_params(Gamma=0.1 * TWO_PI * 15e6, power=0.0)
        report = extract_features(run_sweep(sigma_spec(base=p)))
        assert len(report.windows) == 1
        assert len(report.peaks) == 2
        assert report.windows[0].center == pytest.approx(0.0, abs=1e-6)
        w = report.windows[0]
        assert all(w.floor < pk.height for pk in report.peaks)

    def test_three_peaks_two_windows_with_power(self):
        p = make_params(Gamma=0.1 * TWO_PI * 15e6, power=3e-3)
        report = extract_features(run_sweep(sigma_spec(base=p)))
        assert len(report.peaks) == 3
        assert len(report.windows) == 2

    def test_monotone_table_has_no_features(self):
        # velocity table: drag strictly affine, no interior extrema
        spec = SweepSpec(base=make_params(), axis="velocity", lo=-100.0,
                         hi=100.0, samples=64, sigma=0.01)
        report = extract_features(run_sweep(spec))
        assert report.windows == () and report.peaks == ()
        assert report.drag_extrema == ()

    def test_axis_mismatch(self):
        spec = SweepSpec(base=make_params(), axis="Gamma", lo=0.01, hi=0.4,
                         samples=32)
        with pytest.raises(AxisMismatchError):
            extract_features(run_sweep(spec))

    def test_luminality_classifier(self):
        sub = extract_features(
            run_sweep(sigma_spec(base=make_params(Gamma=0.0, power=0.0))))
        assert sub.resonance_slope_sign > 0
        assert sub.luminality == "subluminal"
        sup = extract_features(run_sweep(sigma_spec(
            base=make_params(Gamma=0.1 * TWO_PI * 15e6, power=0.0))))
        assert sup.resonance_slope_sign < 0
        assert sup.luminality == "superluminal"

    def test_grid_stability(self):
        p = make_params(Gamma=0.2 * TWO_PI * 15e6, power=0.0)
        coarse = extract_features(run_sweep(sigma_spec(base=p, samples=2001)))
        fine = extract_features(run_sweep(sigma_spec(base=p, samples=4001)))
        wc, wf = coarse.windows[0], fine.windows[0]
        assert wc.fwhm == pytest.approx(wf.fwhm, rel=0.01)
        assert abs(wc.center - wf.center) <= 0.01 * wf.fwhm

    def test_drag_extrema_on_sigma_table(self):
        p = make_params(Gamma=0.1 * TWO_PI * 15e6, power=0.0)
        spec = sigma_spec(base=p, velocity=300.0)
        report = extract_features(run_sweep(spec))
        assert len(report.drag_extrema) >= 2


class TestWindowWidthTrend:
    def test_gamma_family_widens(self):
        specs, values = [], []
        for g in (0.1, 0.2, 0.4):
            p = make_params(Gamma=g * TWO_PI * 15e6, power=0.0)
            specs.append(sigma_spec(base=p))
            values.append(g)
        out = window_width_trend(specs, values)
        assert out["verdict"] == "increasing"
        assert [v for v, _ in out["widths"]] == values

    def test_power_family_widens(self):
        specs, values = [], []
        for power in (3e-3, 6e-3, 15e-3):
            p = make_params(Gamma=0.1 * TWO_PI * 15e6, power=power)
            specs.append(sigma_spec(base=p, samples=8001))
            values.append(power)
        out = window_width_trend(specs, values)
        assert out["verdict"] == "increasing"

    def test_identical_specs_identical_widths(self):
        p = make_params(Gamma=0.2 * TWO_PI * 15e6, power=0.0)
        out = window_width_trend([sigma_spec(base=p), sigma_spec(base=p)],
                                 [1.0, 1.0])
        (_, w1), (_, w2) = out["widths"]
        assert w1 == w2

    def test_requires_two_specs(self):
        with pytest.raises(ValueError):
            window_width_trend([sigma_spec()], [1.0])


class TestSerialization:
    def test_csv_round_trip(self):
        table = run_sweep(sigma_spec(samples=101, velocity=300.0))
        text = to_csv(table)
        tables, labels = parse_csv(text)
        assert labels == [None]
        back = tables[0]
        assert np.allclose(back.axis_values, table.axis_values)
        for name in ("ReEpsT", "ImNg", "DragM"):
            assert np.array_equal(back.column(name), table.column(name)), name

    def test_family_round_trip(self):
        t1 = run_sweep(sigma_spec(samples=51))
        t2 = run_sweep(sigma_spec(samples=51,
                                  base=make_params(Gamma=0.2 * TWO_PI * 15e6)))
        text = to_csv([t1, t2], ["a", "b"])
        tables, labels = parse_csv(text)
        assert labels == ["a", "b"]
        assert np.array_equal(tables[1].column("ReEpsT"), t2.column("ReEpsT"))

    def test_header_and_column_order(self):
        text = to_csv(run_sweep(sigma_spec(samples=2)))
        header = text.splitlines()[0]
        assert header == ("axis,ReEpsT,ImEpsT,ReNr,ImNr,ReNg,ImNg,"
                          "DragM,branch,flag")

    def test_parse_rejects_garbage(self):
        with pytest.raises(ValueError):
            parse_csv("")
        with pytest.raises(ValueError):
            parse_csv("x,y\n1,2\n")

    def test_gnuplot_pair(self):
        table = run_sweep(sigma_spec(samples=11))
        data, script = to_gnuplot(table)
        assert data.startswith("#")
        assert len(data.splitlines()) == 12
        assert "plot" in script


class TestPresets:
    def test_all_eighteen_ids_present(self):
        assert sorted(FIGURE_PRESETS) == sorted(
            ["2a", "2b", "2c", "2d", "3a", "3b", "4a", "4b", "4c", "4d",
             "5a", "5b", "6a", "6b", "6c", "6d", "7a", "7b"])

    def test_preset_families(self):
        assert len(FIGURE_PRESETS["2b"].family_values) == 3
        assert len(FIGURE_PRESETS["5a"].family_values) == 4
        specs = FIGURE_PRESETS["2b"].specs(make_params())
        assert all(s.axis == "sigma" for s in specs)
        assert FIGURE_PRESETS["5b"].specs(make_params())[0].axis == "velocity"
