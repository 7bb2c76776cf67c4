"""
Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run alone with ``pytest tests/test_acceptance.py -v -s`` to see the summary
lines inline; they are printed through ``capsys.disabled`` so plain
``pytest -v`` shows them too.
"""

import itertools
import math
import time

import numpy as np
import pytest

from grover_michelson.core import probability_matrix
from grover_michelson.errors import ResonanceError
from grover_michelson.imperfections import calibrate, predict_probability_matrix, read_matrix_csv, renormalize_columns
from grover_michelson.metrics import (
    Model,
    SweepSpec,
    enhancement_report,
    find_slope_configuration,
    max_slope,
    peak_slope,
    sweep,
    visibility,
)
from grover_michelson.resonator import (
    GmiConfig,
    b_c_coefficients,
    gmi_closed_form,
    iterate_round_trips,
    michelson_reference,
    round_trip_matrix,
    steady_state,
)
from grover_michelson.scatterers import BeamSplitterParams, CoinPhases, compose_network, generalized_coin

from oracles import brute_force_gmi, michelson_r_power

PI = math.pi
GROVER = [[-0.5, 0.5, 0.5, 0.5], [0.5, -0.5, 0.5, 0.5], [0.5, 0.5, -0.5, 0.5], [0.5, 0.5, 0.5, -0.5]]


@pytest.fixture
def report(capsys):
    """Call with (label, check, budget_s); prints one verdict line and re-raises failures."""

    def run(label, check, budget=None):
        start = time.perf_counter()
        try:
            detail = check()
            elapsed = time.perf_counter() - start
            if budget is not None:
                assert elapsed < budget, f"took {elapsed:.2f} s, budget {budget} s"
        except AssertionError as exc:
            with capsys.disabled():
                print(f"\nFAIL  {label}: {str(exc).splitlines()[0]}")
            raise
        with capsys.disabled():
            print(f"\nPASS  {label}: {detail} ({elapsed:.2f} s)")

    return run


def test_criterion_01_grover_identity(report):
    def check():
        g = generalized_coin(CoinPhases(0, 0, 0))
        exact = float(np.max(np.abs(g - np.array(GROVER))))
        assert exact <= 1e-15, exact
        ideal = BeamSplitterParams.ideal()
        grid = np.linspace(-PI, PI, 5, endpoint=False)
        worst = 0.0
        for t1, t2, t in itertools.product(grid, repeat=3):
            ph = CoinPhases(t1, t2, t)
            worst = max(worst, float(np.max(np.abs(compose_network(ideal, ideal, ph) - generalized_coin(ph)))))
        assert worst <= 1e-12, worst
        return f"coin error {exact:.1e}, network error {worst:.1e}"

    report("1 Grover identity", check, budget=1.0)


def test_criterion_02_probability_matrices(report, data_dir):
    def check():
        rng = np.random.default_rng(2)
        worst = 0.0
        for t1, t2, t in rng.uniform(-PI, PI, (200, 3)):
            worst = max(worst, float(np.max(np.abs(probability_matrix(generalized_coin(CoinPhases(t1, t2, t))) - 0.25))))
        assert worst <= 1e-12, worst
        out = renormalize_columns(read_matrix_csv(data_dir / "coin_measured.csv"))
        ref = read_matrix_csv(data_dir / "coin_renormalized.csv")
        de = float(np.max(np.abs(out.entries - ref.entries)))
        du = float(np.max(np.abs(out.uncertainties - ref.uncertainties)))
        assert de <= 5e-4 and du <= 1e-4, (de, du)
        return f"max |P-1/4| {worst:.1e}, entries within {de:.1e}, uncertainties within {du:.1e}"

    report("2 probability matrices", check, budget=1.0)


def test_criterion_03_closed_form_vs_oracles(report):
    def check():
        grid = np.linspace(0.0, 2 * PI, 50, endpoint=False)
        worst, worst_at, energy, used = 0.0, None, 0.0, 0
        for p1, p2 in itertools.product(grid, repeat=2):
            cf = gmi_closed_form(p1, p2)
            energy = max(energy, abs(cf.R + cf.T - 1.0))
            if abs(b_c_coefficients(p1, p2)[0]) > 0.999:
                continue
            cfg = GmiConfig(p1, p2)
            ss = steady_state(cfg)
            it = iterate_round_trips(cfg, tol=1e-10).amplitudes
            for other in (ss, it):
                err = max(abs(cf.r - other.r), abs(cf.t - other.t))
                if err > worst:
                    worst, worst_at = err, (p1, p2)
            used += 1
        assert energy <= 1e-12, energy
        assert worst <= 1e-9, f"max disagreement {worst:.3e} at phi=({worst_at[0]:.4f}, {worst_at[1]:.4f})"
        return f"{used} points agree within {worst:.1e}, energy defect {energy:.1e}"

    report("3 closed form vs oracles", check, budget=10.0)


def test_criterion_04_spot_values(report):
    cases = [((0.0, PI), 1.0, 0.0), ((PI, PI), 0.0, 1.0), ((PI / 2, PI), 0.2, 0.8)]

    def check():
        for (p1, p2), R, T in cases:
            out1, out2, _, left = brute_force_gmi(GROVER, p1, p2, trips=400)
            assert left < 1e-12
            assert abs(out1) ** 2 == pytest.approx(R, abs=1e-9)
            assert abs(out2) ** 2 == pytest.approx(T, abs=1e-9)
            a = gmi_closed_form(p1, p2)
            assert a.R == pytest.approx(R, abs=1e-9) and a.T == pytest.approx(T, abs=1e-9)
        m = michelson_reference(PI / 2, PI).R
        assert m == pytest.approx(0.5, abs=1e-9)
        assert michelson_r_power(PI / 2, PI) == pytest.approx(m, abs=1e-12)
        return "brute-force oracle and closed form agree on all spot values"

    report("4 spot values", check)


def test_criterion_05_supermode(report):
    def check():
        rng = np.random.default_rng(5)
        v = np.array([1.0, -1.0]) / math.sqrt(2.0)
        worst = 0.0
        for p1, p2 in rng.uniform(-PI, PI, (100, 2)):
            b, _ = b_c_coefficients(p1, p2)
            worst = max(worst, float(np.max(np.abs(round_trip_matrix(GmiConfig(p1, p2)) @ v - b * v))))
        assert worst <= 1e-12, worst
        return f"max |Mv - Bv| {worst:.1e}"

    report("5 supermode", check)


def test_criterion_06_michelson_slope(report):
    def check():
        curve = sweep(SweepSpec(0.0, phi1_start=0.0, phi1_end=2 * PI, points=2001, model=Model.MICHELSON))
        slope, _ = max_slope(curve)
        assert abs(slope - 0.5) <= 1e-4, slope
        return f"max slope {slope:.8f}"

    report("6 Michelson baseline slope", check, budget=1.0)


def test_criterion_07_slope_achievability(report):
    def check():
        found = find_slope_configuration(7.0)
        assert found is not None, "no phi2 in (0, pi] reached slope 7"
        phi2, slope, _ = found
        assert 0 < phi2 <= PI and slope >= 7
        slopes = [peak_slope(SweepSpec(p2))[0] for p2 in (PI, 2.0, 1.0, 0.5, 0.25)]
        assert all(a < b for a, b in zip(slopes, slopes[1:])), slopes
        return f"phi2={phi2:.5f} gives slope {slope:.3f}; sequence " + ", ".join(f"{s:.3f}" for s in slopes)

    report("7 slope achievability", check, budget=30.0)


def test_criterion_08_enhancement(report):
    def check():
        phi2, _, _ = find_slope_configuration(7.0)
        rep = enhancement_report(phi2, delta_phi=1e-3)
        assert rep.intensity_ratio >= 12, rep.intensity_ratio
        vis = visibility(sweep(SweepSpec(PI, phi1_start=0.0, phi1_end=2 * PI)))
        assert abs(vis - 1.0) <= 1e-6, vis
        return f"intensity ratio {rep.intensity_ratio:.2f} at phi2={phi2:.5f}, visibility {vis:.9f}"

    report("8 enhancement", check)


def test_criterion_09_calibration_round_trip(report):
    def check():
        rng = np.random.default_rng(9)
        worst_err, worst_res = 0.0, 0.0
        for _ in range(20):
            r1, r2 = rng.uniform(0.3, 0.7, 2)
            l1, l2 = rng.uniform(0.0, 0.2, 2)
            bs1, bs2 = BeamSplitterParams.from_split(r1, l1), BeamSplitterParams.from_split(r2, l2)
            fit = calibrate(predict_probability_matrix(bs1, bs2))
            got = (fit.bs1.reflectance, fit.bs1.loss, fit.bs2.reflectance, fit.bs2.loss)
            err = max(abs(a - b) for a, b in zip(got, (r1, l1, r2, l2)))
            worst_err, worst_res = max(worst_err, err), max(worst_res, fit.residual)
            assert err <= 1e-6, (err, (r1, l1, r2, l2))
            assert fit.residual < 1e-9, fit.residual
        return f"20 fits, parameter error {worst_err:.1e}, residual {worst_res:.1e}"

    report("9 calibration round trip", check, budget=30.0)


def test_criterion_10_degenerate_point(report):
    def check():
        a = gmi_closed_form(0.0, 0.0)
        assert (a.r, a.t) == (-1, 0)
        with pytest.raises(ResonanceError):
            steady_state(GmiConfig(0.0, 0.0))
        rep = iterate_round_trips(GmiConfig(0.0, 0.0))
        assert rep.converged is False
        return f"closed form (-1, 0), steady state raises, iteration unconverged (radius {rep.spectral_radius:.3f})"

    report("10 degenerate handling", check)
