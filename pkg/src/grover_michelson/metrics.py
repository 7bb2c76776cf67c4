"""
Interferogram sweeps and figures of merit.

Arm phases are round-trip phases: a standard Michelson under this convention
has ``R = cos^2((phi1 - phi2)/2)`` and a maximum slope ``|dR/dphi1|`` of 0.5.
"""

from __future__ import annotations

import csv
import enum
import io
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from numpy.typing import NDArray

from .core import frozen
from .errors import InvalidParameterError, ResonanceError
from .resonator import (
    GmiAmplitudes,
    GmiConfig,
    gmi_closed_form,
    iterate_round_trips,
    michelson_reference,
    steady_state,
)
from .scatterers import BeamSplitterParams, CoinPhases, compose_network

__all__ = [
    "Model",
    "DeviceParams",
    "SweepSpec",
    "Gap",
    "InterferogramCurve",
    "EnhancementReport",
    "evaluate",
    "sweep",
    "visibility",
    "max_slope",
    "peak_slope",
    "find_slope_configuration",
    "enhancement_report",
    "write_curve_csv",
    "read_curve_csv",
    "format_report",
]

DEFAULT_POINTS = 2001
REFINE_LEVELS = 3
REFINE_POINTS = 41


class Model(str, enum.Enum):
    IDEAL_CLOSED_FORM = "ideal_closed_form"
    STEADY_STATE = "steady_state"
    ITERATIVE = "iterative"
    MICHELSON = "michelson"


@dataclass(frozen=True)
class DeviceParams:
    """Non-ideal hardware for the numeric models: two splitters plus arm losses."""

    bs1: BeamSplitterParams = field(default_factory=BeamSplitterParams.ideal)
    bs2: BeamSplitterParams = field(default_factory=BeamSplitterParams.ideal)
    arm_loss: tuple[float, float] = (0.0, 0.0)


@dataclass(frozen=True)
class SweepSpec:
    phi2: float
    theta: float = 0.0
    phi1_start: float = -math.pi
    phi1_end: float = math.pi
    points: int = DEFAULT_POINTS
    model: Model = Model.IDEAL_CLOSED_FORM
    device: DeviceParams | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "model", Model(self.model))
        if not self.phi1_end > self.phi1_start:
            raise InvalidParameterError(
                f"phi1 range must be increasing, got [{self.phi1_start}, {self.phi1_end}]"
            )
        if self.points < 3:
            raise InvalidParameterError(f"a sweep needs at least 3 points, got {self.points}")
        if self.model is Model.IDEAL_CLOSED_FORM and (self.theta != 0.0 or self.device is not None):
            raise InvalidParameterError(
                "the closed form holds only for the ideal coin with theta = 0; "
                "use the steady_state or iterative model"
            )


@dataclass(frozen=True)
class Gap:
    """A sweep sample that could not be evaluated."""

    phi1: float
    reason: str


@dataclass(frozen=True)
class InterferogramCurve:
    phi1: NDArray[np.float64]
    R: NDArray[np.float64]
    T: NDArray[np.float64]
    spec: SweepSpec | None = None
    gaps: tuple[Gap, ...] = ()

    @property
    def samples(self) -> list[tuple[float, float, float]]:
        return list(zip(self.phi1.tolist(), self.R.tolist(), self.T.tolist()))


@dataclass(frozen=True)
class EnhancementReport:
    gmi_max_slope: float
    michelson_max_slope: float
    slope_ratio: float
    gmi_visibility: float
    delta_phi: float
    gmi_delta_I: float
    michelson_delta_I: float
    intensity_ratio: float
    gmi_phi1: float
    michelson_phi1: float


def _config(spec: SweepSpec, phi1: float) -> GmiConfig:
    dev = spec.device
    if dev is None:
        return GmiConfig(phi1, spec.phi2, spec.theta)
    coin = compose_network(dev.bs1, dev.bs2, CoinPhases(0.0, 0.0, spec.theta))
    return GmiConfig(phi1, spec.phi2, spec.theta, coin=coin, arm_loss=dev.arm_loss)


def evaluate(spec: SweepSpec, phi1: float) -> GmiAmplitudes:
    """Output amplitudes of ``spec``'s model at a single ``phi1``.

    Raises :class:`ResonanceError` where the numeric models have no steady state.
    """
    model = spec.model
    if model is Model.IDEAL_CLOSED_FORM:
        return gmi_closed_form(phi1, spec.phi2)
    if model is Model.MICHELSON:
        return michelson_reference(phi1, spec.phi2)
    cfg = _config(spec, phi1)
    if model is Model.STEADY_STATE:
        return steady_state(cfg)
    report = iterate_round_trips(cfg)
    if not report.converged:
        raise ResonanceError(
            f"round trips did not converge at phi1={phi1:.12g} "
            f"(residual {report.residual:.3g} after {report.iterations} trips)",
            phi1=phi1,
            phi2=spec.phi2,
            theta=spec.theta,
        )
    return report.amplitudes


def _closed_form_grid(phi1: NDArray[np.float64], phi2: float):
    e1, e2 = np.exp(1j * phi1), np.exp(1j * phi2)
    b, c = 0.5 * (e1 + e2), 0.5 * (e1 - e2)
    denom = 2.0 * b - 2.0
    singular = (c == 0) | (np.abs(denom) < 1e-15)
    k = np.where(singular, 0.0, c * c / np.where(singular, 1.0, denom))
    return k - 0.5 * b - 0.5, k - 0.5 * b + 0.5


def sweep(spec: SweepSpec) -> InterferogramCurve:
    """Sample R and T at ``spec.points`` equally spaced values of ``phi1``.

    Samples where a numeric model hits a resonance are dropped and listed in
    ``gaps``; the remaining curve is no longer uniformly spaced.
    """
    grid = np.linspace(spec.phi1_start, spec.phi1_end, spec.points)
    if spec.model is Model.IDEAL_CLOSED_FORM:
        r, t = _closed_form_grid(grid, spec.phi2)
        return InterferogramCurve(frozen(grid), frozen(np.abs(r) ** 2), frozen(np.abs(t) ** 2), spec)
    if spec.model is Model.MICHELSON:
        d = 0.5 * (grid - spec.phi2)
        return InterferogramCurve(frozen(grid), frozen(np.cos(d) ** 2), frozen(np.sin(d) ** 2), spec)

    keep, rs, ts, gaps = [], [], [], []
    for x in grid:
        try:
            amp = evaluate(spec, float(x))
        except ResonanceError as exc:
            gaps.append(Gap(float(x), str(exc)))
            continue
        keep.append(x)
        rs.append(amp.R)
        ts.append(amp.T)
    return InterferogramCurve(
        frozen(np.array(keep, dtype=np.float64)),
        frozen(np.array(rs, dtype=np.float64)),
        frozen(np.array(ts, dtype=np.float64)),
        spec,
        tuple(gaps),
    )


def visibility(curve: InterferogramCurve) -> float:
    """Fringe visibility ``(max R - min R) / (max R + min R)``; 0 for an all-dark curve."""
    if curve.R.size < 3:
        raise InvalidParameterError("visibility needs at least 3 samples")
    hi, lo = float(np.max(curve.R)), float(np.min(curve.R))
    if hi + lo == 0.0:
        return 0.0
    return (hi - lo) / (hi + lo)


def _uniform_step(phi1: NDArray[np.float64]) -> float:
    if phi1.size < 3:
        raise InvalidParameterError("slope needs at least 3 samples")
    step = (phi1[-1] - phi1[0]) / (phi1.size - 1)
    # Relative slack absorbs 12-digit CSV rounding; a dropped sample doubles a step.
    if step <= 0 or np.max(np.abs(np.diff(phi1) - step)) > 1e-6 * step:
        raise InvalidParameterError("samples are not uniformly spaced; resample before taking slopes")
    return float(step)


def max_slope(curve: InterferogramCurve) -> tuple[float, float]:
    """Largest ``|dR/dphi1|`` and where it occurs.

    Central differences inside the grid, one-sided at the two ends.
    """
    step = _uniform_step(curve.phi1)
    slopes = np.abs(np.gradient(curve.R, step))
    k = int(np.argmax(slopes))
    return float(slopes[k]), float(curve.phi1[k])


def peak_slope(
    spec: SweepSpec,
    levels: int = REFINE_LEVELS,
) -> tuple[float, float]:
    """Max slope of ``spec``'s curve, refined by re-sampling around the peak.

    Each level re-sweeps a window of four grid steps centered on the current
    argmax with ``REFINE_POINTS`` samples, shrinking the spacing tenfold.
    """
    slope, at = max_slope(sweep(spec))
    step = (spec.phi1_end - spec.phi1_start) / (spec.points - 1)
    for _ in range(levels):
        lo, hi = at - 2 * step, at + 2 * step
        fine = SweepSpec(spec.phi2, spec.theta, lo, hi, REFINE_POINTS, spec.model, spec.device)
        fine_slope, fine_at = max_slope(sweep(fine))
        if fine_slope >= slope:
            slope, at = fine_slope, fine_at
        step = (hi - lo) / (REFINE_POINTS - 1)
    return slope, at


def find_slope_configuration(
    target: float,
    theta: float = 0.0,
    phi2_values: NDArray[np.float64] | None = None,
    points: int = DEFAULT_POINTS,
    model: Model = Model.IDEAL_CLOSED_FORM,
) -> tuple[float, float, float] | None:
    """Scan ``phi2`` downward from pi and return the first ``(phi2, slope, phi1)`` with slope >= target.

    The default scan is geometric, ``pi * 0.95**k`` for k = 0..99. Returns
    None when no scanned value reaches the target.
    """
    if phi2_values is None:
        phi2_values = math.pi * 0.95 ** np.arange(100)
    for phi2 in phi2_values:
        if not 0.0 < phi2 <= math.pi:
            raise InvalidParameterError(f"phi2 scan values must lie in (0, pi], got {phi2}")
        slope, at = peak_slope(SweepSpec(float(phi2), theta, points=points, model=model))
        if slope >= target:
            return float(phi2), slope, at
    return None


def _delta_intensity(spec: SweepSpec, center: float, delta_phi: float) -> float:
    return abs(evaluate(spec, center + 0.5 * delta_phi).R - evaluate(spec, center - 0.5 * delta_phi).R)


def enhancement_report(
    phi2: float,
    theta: float = 0.0,
    delta_phi: float = 1e-3,
    grid_points: int = DEFAULT_POINTS,
    model: Model = Model.IDEAL_CLOSED_FORM,
    device: DeviceParams | None = None,
) -> EnhancementReport:
    """
    Compare the interferometer with a standard Michelson at equal phase change.

    Both curves are operated at their own steepest point ``phi*``; the
    intensity change is ``|R(phi* + delta/2) - R(phi* - delta/2)|``. When both
    intensity changes vanish (below 1e-12, i.e. rounding noise) the ratio is
    reported as 1.
    """
    if not delta_phi > 0:
        raise InvalidParameterError(f"delta_phi must be positive, got {delta_phi}")
    gmi = SweepSpec(phi2, theta, points=grid_points, model=model, device=device)
    ref = SweepSpec(phi2, 0.0, points=grid_points, model=Model.MICHELSON)

    g_slope, g_at = peak_slope(gmi)
    m_slope, m_at = peak_slope(ref)
    g_di = _delta_intensity(gmi, g_at, delta_phi)
    m_di = _delta_intensity(ref, m_at, delta_phi)
    return EnhancementReport(
        gmi_max_slope=g_slope,
        michelson_max_slope=m_slope,
        slope_ratio=_ratio(g_slope, m_slope),
        gmi_visibility=visibility(sweep(gmi)),
        delta_phi=delta_phi,
        gmi_delta_I=g_di,
        michelson_delta_I=m_di,
        intensity_ratio=_ratio(g_di, m_di),
        gmi_phi1=g_at,
        michelson_phi1=m_at,
    )


_NOISE_FLOOR = 1e-12


def _ratio(num: float, den: float) -> float:
    if den < _NOISE_FLOOR:
        return 1.0 if num < _NOISE_FLOOR else math.inf
    return num / den


def _fmt(x: float) -> str:
    return f"{x:.11e}"


def write_curve_csv(curve: InterferogramCurve) -> str:
    """Curve as CSV with header ``phi1,R,T`` and 12 significant digits."""
    buf = io.StringIO()
    buf.write("phi1,R,T\n")
    for p, r, t in zip(curve.phi1, curve.R, curve.T):
        buf.write(f"{_fmt(p)},{_fmt(r)},{_fmt(t)}\n")
    return buf.getvalue()


def read_curve_csv(source: str | Path | io.TextIOBase) -> InterferogramCurve:
    if isinstance(source, (str, Path)):
        text = Path(source).read_text()
    else:
        text = source.read()
    reader = csv.DictReader(io.StringIO(text))
    if reader.fieldnames is None or [f.strip() for f in reader.fieldnames] != ["phi1", "R", "T"]:
        raise InvalidParameterError(f"curve CSV must have header phi1,R,T, got {reader.fieldnames}")
    rows = [(float(r["phi1"]), float(r["R"]), float(r["T"])) for r in reader]
    if not rows:
        raise InvalidParameterError("curve CSV has no samples")
    data = np.array(rows, dtype=np.float64)
    if np.any(np.diff(data[:, 0]) <= 0):
        raise InvalidParameterError("phi1 must be strictly increasing")
    return InterferogramCurve(frozen(data[:, 0].copy()), frozen(data[:, 1].copy()), frozen(data[:, 2].copy()))


def format_report(report: EnhancementReport) -> str:
    """Flat ``key=value`` lines, one per report field."""
    return "".join(f"{k}={_fmt(v)}\n" for k, v in report.__dict__.items())
