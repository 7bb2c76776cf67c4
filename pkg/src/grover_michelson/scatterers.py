"""
Device matrices: beam-splitter, Grover coin, generalized Grover coin, and the
two-splitter network that realizes the generalized coin.

Port map of the four-port network (device ports 1-4, zero-based indices 0-3)::

        port 1 ──┐                      ┌── port 3
                 BS1 ════ bridge θ ════ BS2
        port 2 ──┘                      └── port 4
                 │                      │
              mirror arm θ1          mirror arm θ2

Each splitter is described by the 4x4 matrix returned by :func:`beam_splitter`.
Its four facets are wired into the network as follows (splitter facet index
on the left, network role on the right)::

    BS1: 0 -> device port 2   1 -> device port 1   2 -> bridge   3 -> mirror arm 1
    BS2: 0 -> device port 4   1 -> device port 3   2 -> bridge   3 -> mirror arm 2

Reflection couples facets 0<->2 and 1<->3; the pi phase on reflection sits on
the 1<->3 coupling, i.e. between the mirror arm and the co-located external
port (ports 1 and 3). End mirrors contribute -exp(i*phase).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from .core import frozen
from .errors import InvalidParameterError

__all__ = [
    "BeamSplitterParams",
    "CoinPhases",
    "wrap_phase",
    "beam_splitter",
    "grover_coin",
    "generalized_coin",
    "reduce_phases",
    "compose_network",
]

_SPLIT_TOL = 1e-12


def wrap_phase(x: float) -> float:
    """Reduce an angle to the half-open interval (-pi, pi]."""
    y = math.remainder(float(x), 2 * math.pi)
    return math.pi if y == -math.pi else y


@dataclass(frozen=True)
class BeamSplitterParams:
    """
    Amplitudes of one (possibly lossy, imbalanced) beam-splitter.

    ``r_amp`` and ``t_amp`` are the actual field amplitudes, loss included,
    so ``|r_amp|**2 + |t_amp|**2 == 1 - loss``. Use :meth:`from_split` to
    build them from a reflectance and a loss.
    """

    r_amp: complex
    t_amp: complex
    loss: float = 0.0

    def __post_init__(self) -> None:
        r, t = complex(self.r_amp), complex(self.t_amp)
        object.__setattr__(self, "r_amp", r)
        object.__setattr__(self, "t_amp", t)
        object.__setattr__(self, "loss", float(self.loss))
        if not all(math.isfinite(x) for x in (r.real, r.imag, t.real, t.imag, self.loss)):
            raise InvalidParameterError("beam-splitter parameters must be finite")
        if not 0.0 <= self.loss < 1.0:
            raise InvalidParameterError(f"loss must lie in [0, 1), got {self.loss}")
        power = abs(r) ** 2 + abs(t) ** 2
        if power > 1.0 + _SPLIT_TOL:
            raise InvalidParameterError(
                f"|r|^2 + |t|^2 = {power:.12g} exceeds 1 (r={r}, t={t})"
            )
        if abs(power - (1.0 - self.loss)) > 1e-9:
            raise InvalidParameterError(
                f"|r|^2 + |t|^2 = {power:.12g} is inconsistent with loss={self.loss}"
            )

    @classmethod
    def ideal(cls) -> BeamSplitterParams:
        return cls(math.sqrt(0.5), math.sqrt(0.5), 0.0)

    @classmethod
    def from_split(cls, reflectance: float, loss: float = 0.0) -> BeamSplitterParams:
        """Real amplitudes for power reflectance ``reflectance`` of the surviving light."""
        if not 0.0 <= reflectance <= 1.0:
            raise InvalidParameterError(f"reflectance must lie in [0, 1], got {reflectance}")
        if not 0.0 <= loss < 1.0:
            raise InvalidParameterError(f"loss must lie in [0, 1), got {loss}")
        keep = 1.0 - loss
        return cls(math.sqrt(reflectance * keep), math.sqrt((1.0 - reflectance) * keep), loss)

    @property
    def reflectance(self) -> float:
        """Fraction of the surviving power that is reflected."""
        power = abs(self.r_amp) ** 2 + abs(self.t_amp) ** 2
        return abs(self.r_amp) ** 2 / power if power > 0 else 0.0


@dataclass(frozen=True)
class CoinPhases:
    """Mirror-arm phases ``theta1``, ``theta2`` and bridge phase ``theta``, wrapped to (-pi, pi]."""

    theta1: float = 0.0
    theta2: float = 0.0
    theta: float = 0.0

    def __post_init__(self) -> None:
        for name in ("theta1", "theta2", "theta"):
            value = float(getattr(self, name))
            if not math.isfinite(value):
                raise InvalidParameterError(f"{name} must be finite, got {value}")
            object.__setattr__(self, name, wrap_phase(value))


def beam_splitter(p: BeamSplitterParams) -> NDArray[np.complex128]:
    """
    Four-port beam-splitter matrix.

    Facets 0,1 couple only to facets 2,3. Reflection links 0<->2 and 1<->3,
    transmission links 0<->3 and 1<->2, and the 1<->3 reflection carries the
    pi phase. At ``r = t = 1/sqrt(2)`` this is::

        1/sqrt(2) * [[0, 0, 1,  1],
                     [0, 0, 1, -1],
                     [1, 1, 0,  0],
                     [1,-1, 0,  0]]

    The sign pattern is applied unchanged to imbalanced or complex
    amplitudes, which is a modeling assumption for non-ideal splitters.
    """
    r, t = p.r_amp, p.t_amp
    m = np.array(
        [
            [0, 0, r, t],
            [0, 0, t, -r],
            [r, t, 0, 0],
            [t, -r, 0, 0],
        ],
        dtype=np.complex128,
    )
    return frozen(m)


def grover_coin() -> NDArray[np.complex128]:
    """The four-port Grover coin ``(J - 2I) / 2``."""
    return frozen(0.5 * np.ones((4, 4), dtype=np.complex128) - np.eye(4, dtype=np.complex128))


def generalized_coin(ph: CoinPhases | None = None) -> NDArray[np.complex128]:
    """
    Generalized Grover coin with mirror-arm phases and bridge phase.

    Diagonal 2x2 blocks are ``exp(i*theta_k)/2 * [[-1, 1], [1, -1]]``; the
    off-diagonal blocks are ``exp(i*theta)/2`` times the all-ones matrix.
    """
    ph = ph or CoinPhases()
    e1, e2, eb = (np.exp(1j * x) for x in (ph.theta1, ph.theta2, ph.theta))
    arm = np.array([[-1, 1], [1, -1]], dtype=np.complex128)
    bridge = np.ones((2, 2), dtype=np.complex128)
    m = 0.5 * np.block([[e1 * arm, eb * bridge], [eb * bridge, e2 * arm]])
    return frozen(m)


def reduce_phases(ph: CoinPhases) -> tuple[NDArray[np.complex128], float]:
    """
    Absorb the mirror-arm phases into external phase plates.

    Returns the generalized coin with ``theta1 = theta2 = 0`` and bridge phase
    ``theta - (theta1 + theta2) / 2`` (wrapped), together with that phase. The
    matrix equals ``D @ generalized_coin(ph) @ D`` with
    ``D = diag(e^{-i theta1/2}, e^{-i theta1/2}, e^{-i theta2/2}, e^{-i theta2/2})``.
    """
    theta_eff = wrap_phase(ph.theta - 0.5 * (ph.theta1 + ph.theta2))
    return generalized_coin(CoinPhases(0.0, 0.0, theta_eff)), theta_eff


# (splitter, facet) wiring of the network; see the module docstring.
_EXTERNAL = ((0, 1), (0, 0), (1, 1), (1, 0))
_BRIDGE, _MIRROR = 2, 3
_MAX_PASSES = 8


def compose_network(
    bs1: BeamSplitterParams,
    bs2: BeamSplitterParams,
    ph: CoinPhases | None = None,
) -> NDArray[np.complex128]:
    """
    Trace amplitudes through the two-splitter, two-mirror, one-bridge network.

    Light entering a device port hits its splitter; whatever leaves through a
    mirror facet is reflected back into the same facet with ``-exp(i*theta_k)``,
    whatever leaves through the bridge facet enters the other splitter's bridge
    facet with ``exp(i*theta)``. Amplitude reaching an external facet is
    collected as output. Every path touches exactly two splitter facets, so the
    trace terminates after two passes.
    """
    ph = ph or CoinPhases()
    splitters = (beam_splitter(bs1), beam_splitter(bs2))
    mirror = (-np.exp(1j * ph.theta1), -np.exp(1j * ph.theta2))
    bridge = np.exp(1j * ph.theta)
    out_port = {facet: port for port, facet in enumerate(_EXTERNAL)}

    result = np.zeros((4, 4), dtype=np.complex128)
    for col, (bs_in, facet_in) in enumerate(_EXTERNAL):
        incoming = np.zeros((2, 4), dtype=np.complex128)
        incoming[bs_in, facet_in] = 1.0
        for _ in range(_MAX_PASSES):
            if not incoming.any():
                break
            outgoing = np.stack([splitters[k] @ incoming[k] for k in range(2)])
            incoming = np.zeros((2, 4), dtype=np.complex128)
            for k in range(2):
                for facet in range(4):
                    amp = outgoing[k, facet]
                    if amp == 0:
                        continue
                    if facet == _MIRROR:
                        incoming[k, _MIRROR] += mirror[k] * amp
                    elif facet == _BRIDGE:
                        incoming[1 - k, _BRIDGE] += bridge * amp
                    else:
                        result[out_port[(k, facet)], col] += amp
        else:
            raise RuntimeError("network trace did not terminate; wiring contains a loop")
    return frozen(result)
