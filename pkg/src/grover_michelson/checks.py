"""Runtime self-checks of the model's structural properties (the ``verify`` command)."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .core import is_unitary, probability_matrix
from .imperfections import ProbabilityMatrix, calibrate, predict_probability_matrix, renormalize_columns
from .metrics import Model, SweepSpec, max_slope, peak_slope, sweep
from .resonator import (
    GmiConfig,
    b_c_coefficients,
    gmi_closed_form,
    iterate_round_trips,
    round_trip_matrix,
    steady_state,
)
from .scatterers import BeamSplitterParams, CoinPhases, compose_network, generalized_coin, reduce_phases


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str


def _phase_grid(n: int) -> np.ndarray:
    return np.linspace(-math.pi, math.pi, n, endpoint=False)


def _coin_unitary(n: int) -> tuple[bool, str]:
    worst = 0.0
    for t1, t2, t in itertools.product(_phase_grid(n), repeat=3):
        g = generalized_coin(CoinPhases(t1, t2, t))
        worst = max(worst, float(np.max(np.abs(g.conj().T @ g - np.eye(4)))))
    return worst < 1e-12, f"max |G^H G - I| = {worst:.3e}"


def _network_matches_coin(n: int) -> tuple[bool, str]:
    ideal = BeamSplitterParams.ideal()
    worst = 0.0
    for t1, t2, t in itertools.product(_phase_grid(n), repeat=3):
        ph = CoinPhases(t1, t2, t)
        worst = max(worst, float(np.max(np.abs(compose_network(ideal, ideal, ph) - generalized_coin(ph)))))
    return worst < 1e-12, f"max entry difference = {worst:.3e}"


def _flat_probabilities(n: int) -> tuple[bool, str]:
    worst = 0.0
    for t1, t2, t in itertools.product(_phase_grid(n), repeat=3):
        p = probability_matrix(generalized_coin(CoinPhases(t1, t2, t)))
        worst = max(worst, float(np.max(np.abs(p - 0.25))))
    return worst < 1e-12, f"max |P - 1/4| = {worst:.3e}"


def _phase_reduction(n: int) -> tuple[bool, str]:
    worst = 0.0
    for t1, t2, t in itertools.product(_phase_grid(n), repeat=3):
        ph = CoinPhases(t1, t2, t)
        d = np.diag(np.exp(-0.5j * np.array([ph.theta1, ph.theta1, ph.theta2, ph.theta2])))
        reduced, _ = reduce_phases(ph)
        worst = max(worst, float(np.max(np.abs(reduced - d @ generalized_coin(ph) @ d))))
    return worst < 1e-12, f"max entry difference = {worst:.3e}"


def _phi_pairs(n: int):
    grid = np.linspace(0.0, 2 * math.pi, n, endpoint=False)
    return itertools.product(grid, repeat=2)


def _energy(n: int) -> tuple[bool, str]:
    worst = max(abs(a.R + a.T - 1.0) for a in (gmi_closed_form(p1, p2) for p1, p2 in _phi_pairs(n)))
    return worst < 1e-12, f"max |R + T - 1| = {worst:.3e}"


def _oracles_agree(n: int) -> tuple[bool, str]:
    worst, used = 0.0, 0
    for p1, p2 in _phi_pairs(n):
        b, _ = b_c_coefficients(p1, p2)
        if abs(b) > 0.999:
            continue
        cfg = GmiConfig(p1, p2)
        cf = gmi_closed_form(p1, p2)
        ss = steady_state(cfg)
        it = iterate_round_trips(cfg, tol=1e-12).amplitudes
        for other in (ss, it):
            worst = max(worst, abs(cf.r - other.r), abs(cf.t - other.t))
        used += 1
    return worst < 1e-9, f"{used} points, max amplitude difference = {worst:.3e}"


def _exchange_symmetry(n: int) -> tuple[bool, str]:
    worst = 0.0
    for p1, p2 in _phi_pairs(n):
        a, b = gmi_closed_form(p1, p2), gmi_closed_form(p2, p1)
        worst = max(worst, abs(a.r - b.r), abs(a.t - b.t))
    return worst == 0.0, f"max difference = {worst:.3e}"


def _supermode(n: int) -> tuple[bool, str]:
    v = np.array([1.0, -1.0]) / math.sqrt(2.0)
    worst = 0.0
    for p1, p2 in _phi_pairs(n):
        b, _ = b_c_coefficients(p1, p2)
        worst = max(worst, float(np.max(np.abs(round_trip_matrix(GmiConfig(p1, p2)) @ v - b * v))))
    return worst < 1e-12, f"max |M v - B v| = {worst:.3e}"


def _full_reflection(n: int) -> tuple[bool, str]:
    grid = np.linspace(-math.pi, math.pi, 20 * n)
    worst = max(abs(gmi_closed_form(0.0, p2).R - 1.0) for p2 in grid)
    return worst < 1e-12, f"max |R(0, phi2) - 1| = {worst:.3e}"


def _michelson_slope(_: int) -> tuple[bool, str]:
    slope, _at = max_slope(sweep(SweepSpec(0.0, phi1_start=0.0, phi1_end=2 * math.pi, model=Model.MICHELSON)))
    return abs(slope - 0.5) <= 1e-4, f"max slope = {slope:.9f}"


def _monotone_sharpening(_: int) -> tuple[bool, str]:
    slopes = [peak_slope(SweepSpec(p2))[0] for p2 in (math.pi, 2.0, 1.0, 0.5, 0.25)]
    ok = all(a < b for a, b in zip(slopes, slopes[1:]))
    return ok, "slopes = " + ", ".join(f"{s:.4f}" for s in slopes)


def _renormalize_idempotent(_: int) -> tuple[bool, str]:
    rng = np.random.default_rng(0)
    p = ProbabilityMatrix(rng.uniform(0.1, 0.3, (4, 4)))
    once = renormalize_columns(p)
    twice = renormalize_columns(once)
    diff = float(np.max(np.abs(once.entries - twice.entries)))
    return diff < 1e-12, f"max difference = {diff:.3e}"


def _calibration_round_trip(_: int) -> tuple[bool, str]:
    truth = (0.48, 0.02, 0.53, 0.05)
    bs1 = BeamSplitterParams.from_split(truth[0], truth[1])
    bs2 = BeamSplitterParams.from_split(truth[2], truth[3])
    fit = calibrate(predict_probability_matrix(bs1, bs2))
    got = (fit.bs1.reflectance, fit.bs1.loss, fit.bs2.reflectance, fit.bs2.loss)
    err = max(abs(a - b) for a, b in zip(got, truth))
    return err < 1e-6 and fit.residual < 1e-9, f"parameter error = {err:.3e}, residual = {fit.residual:.3e}"


CHECKS: list[tuple[str, Callable[[int], tuple[bool, str]]]] = [
    ("generalized coin is unitary", _coin_unitary),
    ("network trace reproduces generalized coin", _network_matches_coin),
    ("coin probabilities are all 1/4", _flat_probabilities),
    ("phase reduction equals external phase plates", _phase_reduction),
    ("closed form conserves energy", _energy),
    ("closed form, steady state and round trips agree", _oracles_agree),
    ("closed form symmetric under phi1<->phi2", _exchange_symmetry),
    ("(1,-1)/sqrt2 is a round-trip eigenvector with eigenvalue B", _supermode),
    ("R(phi1=0, phi2) = 1", _full_reflection),
    ("Michelson max slope is 0.5", _michelson_slope),
    ("max slope increases as phi2 decreases", _monotone_sharpening),
    ("column renormalization is idempotent", _renormalize_idempotent),
    ("calibration recovers known splitters", _calibration_round_trip),
]


def run_checks(grid: int = 10) -> list[CheckResult]:
    """Evaluate every check at the given grid density."""
    return [CheckResult(name, *fn(grid)) for name, fn in CHECKS]
