"""
Grover-Michelson interferometer: a four-port coin with end mirrors on ports
3 and 4 (arm round-trip phases ``phi1``, ``phi2``) and light entering and
leaving through ports 1 and 2.

Three independent routes to the output amplitudes are provided:

* :func:`gmi_closed_form` -- the analytic result for the ideal Grover coin;
* :func:`iterate_round_trips` -- explicit trip-by-trip propagation;
* :func:`steady_state` -- the summed geometric series as a 2x2 linear solve.

The arm phases are round-trip (double-pass) phases. Each return from an arm
multiplies the amplitude by ``-exp(i*phi) * sqrt(1 - arm_loss)``.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np
from numpy.typing import NDArray

from .core import as_matrix, frozen
from .errors import InvalidParameterError, ResonanceError
from .scatterers import CoinPhases, generalized_coin

__all__ = [
    "GmiConfig",
    "GmiAmplitudes",
    "RoundTripReport",
    "Eigenmode",
    "b_c_coefficients",
    "gmi_closed_form",
    "iterate_round_trips",
    "steady_state",
    "round_trip_eigenmodes",
    "round_trip_matrix",
    "michelson_reference",
]

EXTERNAL = (0, 1)
INTERNAL = (2, 3)
DEFAULT_TOL = 1e-10
DEFAULT_MAX_TRIPS = 100_000
SINGULAR_TOL = 1e-12


@dataclass(frozen=True)
class GmiAmplitudes:
    """Reflection amplitude ``r`` (back to port 1) and transmission ``t`` (to port 2)."""

    r: complex
    t: complex

    @property
    def R(self) -> float:
        return abs(self.r) ** 2

    @property
    def T(self) -> float:
        return abs(self.t) ** 2


@dataclass(frozen=True)
class GmiConfig:
    """
    Operating point of the interferometer.

    ``coin`` defaults to the generalized Grover coin with bridge phase
    ``theta`` and zero mirror-arm phases. Supplying a coin (for example a
    lossy network from :func:`~grover_michelson.scatterers.compose_network`)
    overrides that default; ``theta`` is then informational.
    """

    phi1: float
    phi2: float
    theta: float = 0.0
    coin: NDArray[np.complex128] | None = field(default=None, compare=False)
    arm_loss: tuple[float, float] = (0.0, 0.0)

    def __post_init__(self) -> None:
        for name in ("phi1", "phi2", "theta"):
            value = float(getattr(self, name))
            if not math.isfinite(value):
                raise InvalidParameterError(f"{name} must be finite, got {value}")
            object.__setattr__(self, name, value)
        loss = tuple(float(x) for x in self.arm_loss)
        if len(loss) != 2 or not all(0.0 <= x < 1.0 for x in loss):
            raise InvalidParameterError(f"arm_loss must be two values in [0, 1), got {self.arm_loss}")
        object.__setattr__(self, "arm_loss", loss)
        coin = self.coin
        if coin is None:
            coin = generalized_coin(CoinPhases(0.0, 0.0, self.theta))
        coin = as_matrix(coin)
        if coin.shape != (4, 4):
            raise InvalidParameterError(f"coin must be 4x4, got {coin.shape}")
        object.__setattr__(self, "coin", coin)

    def arm_factors(self) -> NDArray[np.complex128]:
        """Per-round-trip amplitude factors ``-exp(i phi_k) sqrt(1 - loss_k)``."""
        return np.array(
            [
                -cmath.exp(1j * self.phi1) * math.sqrt(1.0 - self.arm_loss[0]),
                -cmath.exp(1j * self.phi2) * math.sqrt(1.0 - self.arm_loss[1]),
            ]
        )


@dataclass(frozen=True)
class RoundTripReport:
    """Outcome of :func:`iterate_round_trips`.

    ``converged`` requires both that the circulating amplitude fell to the
    tolerance and that the round-trip map is a strict contraction
    (``spectral_radius < 1``). At a lossless resonance the series is not
    summable in general, so the run is reported as not converged even when
    the injected light happens to miss the resonant supermode.
    """

    amplitudes: GmiAmplitudes
    iterations: int
    residual: float
    converged: bool
    spectral_radius: float


@dataclass(frozen=True)
class Eigenmode:
    eigenvalue: complex
    vector: NDArray[np.complex128]
    degenerate: bool = False


def b_c_coefficients(phi1: float, phi2: float) -> tuple[complex, complex]:
    """``B = (e^{i phi1} + e^{i phi2}) / 2`` and ``C = (e^{i phi1} - e^{i phi2}) / 2``."""
    e1, e2 = cmath.exp(1j * phi1), cmath.exp(1j * phi2)
    return 0.5 * (e1 + e2), 0.5 * (e1 - e2)


def gmi_closed_form(phi1: float, phi2: float) -> GmiAmplitudes:
    """
    Analytic output amplitudes for the ideal Grover coin (bridge phase 0).

    ``r = C^2/(2B-2) - B/2 - 1/2`` and ``t = C^2/(2B-2) - B/2 + 1/2``. At
    ``phi1 = phi2 = 0 (mod 2pi)`` the ratio is 0/0; the value returned there
    is the limit along ``C = 0``, i.e. ``(r, t) = (-1, 0)``.
    """
    b, c = b_c_coefficients(phi1, phi2)
    denom = 2.0 * b - 2.0
    if c == 0 or abs(denom) < 1e-15:
        k = 0j
    else:
        k = c * c / denom
    return GmiAmplitudes(k - 0.5 * b - 0.5, k - 0.5 * b + 0.5)


def michelson_reference(phi1: float, phi2: float) -> GmiAmplitudes:
    """Standard Michelson amplitudes ``(r, t) = (B, C)``; ``R = cos^2((phi1 - phi2)/2)``."""
    b, c = b_c_coefficients(phi1, phi2)
    return GmiAmplitudes(b, c)


def _blocks(cfg: GmiConfig):
    s = cfg.coin
    phi = np.diag(cfg.arm_factors())
    s_ee = s[np.ix_(EXTERNAL, EXTERNAL)]
    s_ei = s[np.ix_(EXTERNAL, INTERNAL)]
    s_ie = s[np.ix_(INTERNAL, EXTERNAL)]
    s_ii = s[np.ix_(INTERNAL, INTERNAL)]
    return s_ee, s_ei @ phi, s_ii @ phi, s_ie


def round_trip_matrix(cfg: GmiConfig) -> NDArray[np.complex128]:
    """``S_ii @ Phi``: maps light leaving the coin toward the mirrors to the next trip."""
    return frozen(_blocks(cfg)[2])


def _input_index(input_port: int) -> int:
    if input_port not in (1, 2):
        raise InvalidParameterError(f"input_port must be 1 or 2, got {input_port}")
    return input_port - 1


def iterate_round_trips(
    cfg: GmiConfig,
    input_port: int = 1,
    max_n: int = DEFAULT_MAX_TRIPS,
    tol: float = DEFAULT_TOL,
) -> RoundTripReport:
    """
    Propagate a unit input through explicit round trips.

    The coin scatters the input; amplitude at ports 1,2 is collected, while
    amplitude at ports 3,4 goes around its arm and re-enters the coin. The
    loop stops once the norm of the circulating amplitude is ``<= tol`` or
    after ``max_n`` trips. Running out of trips is not an error; the report
    carries ``converged=False``.
    """
    if max_n < 1:
        raise InvalidParameterError(f"max_n must be >= 1, got {max_n}")
    if tol <= 0:
        raise InvalidParameterError(f"tol must be positive, got {tol}")
    j = _input_index(input_port)
    s_ee, out_map, trip, s_ie = _blocks(cfg)

    # Scalar complex arithmetic; 2x2 numpy products are ~10x slower per trip.
    r, t = complex(s_ee[0, j]), complex(s_ee[1, j])
    a, b = complex(s_ie[0, j]), complex(s_ie[1, j])
    o00, o01, o10, o11 = (complex(x) for x in out_map.ravel())
    m00, m01, m10, m11 = (complex(x) for x in trip.ravel())
    tol2 = tol * tol

    n = 0
    residual2 = abs(a) ** 2 + abs(b) ** 2
    while n < max_n and residual2 > tol2:
        r += o00 * a + o01 * b
        t += o10 * a + o11 * b
        a, b = m00 * a + m01 * b, m10 * a + m11 * b
        residual2 = abs(a) ** 2 + abs(b) ** 2
        n += 1

    residual = math.sqrt(residual2)
    radius = float(np.max(np.abs(np.linalg.eigvals(trip))))
    converged = residual <= tol and radius < 1.0 - SINGULAR_TOL
    return RoundTripReport(GmiAmplitudes(r, t), n, residual, converged, radius)


def steady_state(cfg: GmiConfig, input_port: int = 1) -> GmiAmplitudes:
    """
    Closed summation of the round-trip series.

    ``out = S_ee + S_ei Phi (I - S_ii Phi)^-1 S_ie`` with the coin partitioned
    into external ports {1, 2} and mirrored ports {3, 4}. Valid for any coin
    and bridge phase.

    Raises
    ------
    ResonanceError
        If ``I - S_ii Phi`` is singular (smallest singular value below 1e-12).
    """
    j = _input_index(input_port)
    s_ee, out_map, trip, s_ie = _blocks(cfg)
    lhs = np.eye(2) - trip
    if np.linalg.svd(lhs, compute_uv=False)[-1] < SINGULAR_TOL:
        raise ResonanceError(
            f"lossless resonance at phi1={cfg.phi1:.12g}, phi2={cfg.phi2:.12g}, "
            f"theta={cfg.theta:.12g}: I - S_ii*Phi is singular",
            phi1=cfg.phi1,
            phi2=cfg.phi2,
            theta=cfg.theta,
        )
    out = s_ee[:, j] + out_map @ np.linalg.solve(lhs, s_ie[:, j])
    return GmiAmplitudes(complex(out[0]), complex(out[1]))


def round_trip_eigenmodes(cfg: GmiConfig) -> list[Eigenmode]:
    """Eigenpairs of the round-trip matrix, largest modulus first.

    Vectors are unit-normalized over the mirrored ports (3, 4). When the
    matrix is defective only one eigenvector is returned, flagged
    ``degenerate``.
    """
    trip = round_trip_matrix(cfg)
    values, vectors = np.linalg.eig(trip)
    order = np.argsort(-np.abs(values), kind="stable")
    values, vectors = values[order], vectors[:, order]

    # Repeated eigenvalue with parallel eigenvectors: defective matrix.
    if abs(values[0] - values[1]) < 1e-9 and np.linalg.matrix_rank(vectors, tol=1e-6) < 2:
        v = vectors[:, 0] / np.linalg.norm(vectors[:, 0])
        return [Eigenmode(complex(values[0]), frozen(v), degenerate=True)]

    modes = []
    for k in range(2):
        v = vectors[:, k] / np.linalg.norm(vectors[:, k])
        modes.append(Eigenmode(complex(values[k]), frozen(v)))
    return modes
