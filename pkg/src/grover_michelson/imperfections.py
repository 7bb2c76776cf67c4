"""
Measured probability matrices and beam-splitter calibration.

Matrix files are plain CSV: four rows of four values, optionally followed by
a blank line and a second 4x4 block of one-sigma uncertainties.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy.optimize import minimize

from .core import frozen, probability_matrix
from .errors import InvalidDataError
from .scatterers import BeamSplitterParams, CoinPhases, compose_network

__all__ = [
    "ProbabilityMatrix",
    "CalibrationResult",
    "renormalize_columns",
    "predict_probability_matrix",
    "calibrate",
    "read_matrix_csv",
    "write_matrix_csv",
    "format_calibration",
]

MAX_COLUMN_SUM = 1.05
# Per-run cap; a stalled simplex is cheaper to restart than to grind out.
_RUN_EVALUATIONS = 2_000


def _as_block(values: ArrayLike, what: str) -> NDArray[np.float64]:
    arr = np.array(values, dtype=np.float64)
    if arr.shape != (4, 4):
        raise InvalidDataError(f"{what} must be 4x4, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InvalidDataError(f"{what} has non-finite entries")
    return frozen(arr)


@dataclass(frozen=True)
class ProbabilityMatrix:
    """Port-to-port probabilities (column = input port) with optional uncertainties."""

    entries: NDArray[np.float64]
    uncertainties: NDArray[np.float64] | None = None

    def __post_init__(self) -> None:
        entries = _as_block(self.entries, "probability matrix")
        if np.any(entries < -1e-12) or np.any(entries > 1 + 1e-12):
            raise InvalidDataError("probabilities must lie in [0, 1]")
        object.__setattr__(self, "entries", entries)
        if self.uncertainties is not None:
            unc = _as_block(self.uncertainties, "uncertainty matrix")
            if np.any(unc < 0):
                raise InvalidDataError("uncertainties must be non-negative")
            object.__setattr__(self, "uncertainties", unc)

    @property
    def column_sums(self) -> NDArray[np.float64]:
        return self.entries.sum(axis=0)

    def is_physical(self) -> bool:
        """Column sums stay within 1 plus three times the summed column uncertainty."""
        slack = 0.0 if self.uncertainties is None else 3.0 * self.uncertainties.sum(axis=0)
        return bool(np.all(self.column_sums <= 1.0 + slack))


@dataclass(frozen=True)
class CalibrationResult:
    bs1: BeamSplitterParams
    bs2: BeamSplitterParams
    residual: float
    iterations: int


def renormalize_columns(p: ProbabilityMatrix) -> ProbabilityMatrix:
    """Divide each column (and its uncertainties) by the column sum."""
    sums = p.column_sums
    if np.any(sums <= 0):
        bad = [j + 1 for j in np.flatnonzero(sums <= 0)]
        raise InvalidDataError(f"column(s) {bad} sum to zero; cannot renormalize")
    unc = None if p.uncertainties is None else p.uncertainties / sums
    return ProbabilityMatrix(p.entries / sums, unc)


def predict_probability_matrix(
    bs1: BeamSplitterParams,
    bs2: BeamSplitterParams,
    ph: CoinPhases | None = None,
) -> ProbabilityMatrix:
    """Probabilities of the composed network. No path is shared, so phases drop out."""
    return ProbabilityMatrix(probability_matrix(compose_network(bs1, bs2, ph)))


def _params(x: NDArray[np.float64]) -> tuple[BeamSplitterParams, BeamSplitterParams]:
    r1, l1, r2, l2 = np.clip(x, 0.0, [1.0, 0.999, 1.0, 0.999])
    return BeamSplitterParams.from_split(r1, l1), BeamSplitterParams.from_split(r2, l2)


def calibrate(
    measured: ProbabilityMatrix,
    *,
    max_evaluations: int = 10_000,
    xatol: float = 1e-12,
    fatol: float = 1e-20,
) -> CalibrationResult:
    """
    Least-squares fit of both splitters to a measured probability matrix.

    The free parameters are each splitter's reflectance and loss. A bounded
    Nelder-Mead search starts from ideal 50:50 lossless splitters and is
    restarted from its own optimum until a run ends without moving, which clears the
    occasional premature simplex collapse. Deterministic for given data.

    Raises
    ------
    InvalidDataError
        If a column sums to zero or exceeds 1.05 (more light out than in).
    """
    sums = measured.column_sums
    if np.any(sums <= 0):
        raise InvalidDataError("every column must have a positive sum")
    if np.any(sums > MAX_COLUMN_SUM):
        cols = ", ".join(f"{j + 1}:{s:.4f}" for j, s in enumerate(sums) if s > MAX_COLUMN_SUM)
        raise InvalidDataError(
            f"non-physical data: column sums exceed {MAX_COLUMN_SUM} (column:sum {cols})"
        )
    target = measured.entries

    def objective(x: NDArray[np.float64]) -> float:
        bs1, bs2 = _params(x)
        diff = probability_matrix(compose_network(bs1, bs2)) - target
        return float(np.sum(diff * diff))

    bounds = [(0.0, 1.0), (0.0, 0.999), (0.0, 1.0), (0.0, 0.999)]
    x = np.array([0.5, 0.0, 0.5, 0.0])
    fx = objective(x)
    evaluations = 0
    while evaluations < max_evaluations:
        budget = min(_RUN_EVALUATIONS, max_evaluations - evaluations)
        res = minimize(
            objective,
            x,
            method="Nelder-Mead",
            bounds=bounds,
            options={"xatol": xatol, "fatol": fatol, "maxfev": budget},
        )
        evaluations += res.nfev
        moved = np.max(np.abs(res.x - x)) > xatol
        if res.fun <= fx:
            x, fx = res.x, res.fun
        if (res.success and not moved) or fx == 0.0:
            break

    bs1, bs2 = _params(x)
    return CalibrationResult(bs1, bs2, math.sqrt(fx / 16.0), evaluations)


def _fmt(x: float) -> str:
    return f"{x:.11e}"


def read_matrix_csv(source: str | Path | io.TextIOBase) -> ProbabilityMatrix:
    """Parse the 4x4 (+ optional 4x4 uncertainty) CSV format."""
    if isinstance(source, (str, Path)):
        text = Path(source).read_text()
    else:
        text = source.read()
    blocks: list[list[list[float]]] = [[]]
    for row in csv.reader(io.StringIO(text)):
        cells = [c.strip() for c in row]
        if not any(cells):
            if blocks[-1]:
                blocks.append([])
            continue
        try:
            blocks[-1].append([float(c) for c in cells])
        except ValueError as exc:
            raise InvalidDataError(f"non-numeric matrix entry in row {cells}") from exc
    blocks = [b for b in blocks if b]
    if len(blocks) not in (1, 2):
        raise InvalidDataError(f"expected one or two 4x4 blocks, found {len(blocks)}")
    unc = blocks[1] if len(blocks) == 2 else None
    return ProbabilityMatrix(_as_block(blocks[0], "probability block"),
                             None if unc is None else _as_block(unc, "uncertainty block"))


def write_matrix_csv(p: ProbabilityMatrix) -> str:
    lines = [",".join(_fmt(v) for v in row) for row in p.entries]
    if p.uncertainties is not None:
        lines.append("")
        lines.extend(",".join(_fmt(v) for v in row) for row in p.uncertainties)
    return "\n".join(lines) + "\n"


def format_calibration(result: CalibrationResult) -> str:
    """Flat ``key=value`` record of a calibration."""
    fields = [
        ("bs1_reflectance", _fmt(result.bs1.reflectance)),
        ("bs1_loss", _fmt(result.bs1.loss)),
        ("bs2_reflectance", _fmt(result.bs2.reflectance)),
        ("bs2_loss", _fmt(result.bs2.loss)),
        ("residual", _fmt(result.residual)),
        ("iterations", str(result.iterations)),
    ]
    return "".join(f"{k}={v}\n" for k, v in fields)
