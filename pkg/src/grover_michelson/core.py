"""
Complex linear-algebra substrate for port-mode optics.

Scattering matrices are ``(dim, dim)`` complex128 arrays with the row index
as the output port and the column index as the input port. Optical states are
length-``dim`` complex128 vectors. Functions here never modify their inputs;
returned arrays are marked read-only so they can be shared freely.
"""

from __future__ import annotations

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .errors import DimensionMismatchError, InvalidParameterError

__all__ = [
    "DEFAULT_UNITARY_TOL",
    "as_matrix",
    "as_state",
    "apply",
    "is_unitary",
    "probability_matrix",
    "norm_squared",
    "frozen",
]

DEFAULT_UNITARY_TOL = 1e-10


def frozen(a: NDArray) -> NDArray:
    """Mark ``a`` read-only and return it."""
    a.setflags(write=False)
    return a


def as_matrix(m: ArrayLike) -> NDArray[np.complex128]:
    """
    Validate and copy a scattering matrix.

    Raises
    ------
    InvalidParameterError
        If ``m`` is not square, smaller than 2x2, or has non-finite entries.
    """
    arr = np.array(m, dtype=np.complex128)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise InvalidParameterError(f"scattering matrix must be square, got shape {arr.shape}")
    if arr.shape[0] < 2:
        raise InvalidParameterError(f"scattering matrix needs at least 2 ports, got {arr.shape[0]}")
    if not np.all(np.isfinite(arr)):
        raise InvalidParameterError("scattering matrix has non-finite entries")
    return frozen(arr)


def as_state(v: ArrayLike) -> NDArray[np.complex128]:
    """Validate and copy an amplitude vector."""
    arr = np.array(v, dtype=np.complex128)
    if arr.ndim != 1 or arr.size == 0:
        raise InvalidParameterError(f"optical state must be a non-empty vector, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InvalidParameterError("optical state has non-finite amplitudes")
    return frozen(arr)


def apply(s: ArrayLike, psi: ArrayLike) -> NDArray[np.complex128]:
    """Return ``S @ psi`` after checking that the port counts agree."""
    s = np.asarray(s, dtype=np.complex128)
    psi = np.asarray(psi, dtype=np.complex128)
    if s.ndim != 2 or psi.ndim != 1 or s.shape[1] != psi.shape[0]:
        raise DimensionMismatchError(
            f"cannot apply a {s.shape} matrix to a state of shape {psi.shape}"
        )
    return frozen(s @ psi)


def is_unitary(s: ArrayLike, tol: float = DEFAULT_UNITARY_TOL) -> bool:
    """True iff every entry of ``S^dagger S - I`` is within ``tol`` of zero."""
    if tol <= 0:
        raise InvalidParameterError(f"tolerance must be positive, got {tol}")
    s = np.asarray(s, dtype=np.complex128)
    dev = s.conj().T @ s - np.eye(s.shape[1])
    return bool(np.max(np.abs(dev)) <= tol)


def probability_matrix(s: ArrayLike) -> NDArray[np.float64]:
    """Entrywise ``|S_ij|**2``, without any renormalization."""
    s = np.asarray(s, dtype=np.complex128)
    return frozen(np.abs(s) ** 2)


def norm_squared(psi: ArrayLike) -> float:
    psi = np.asarray(psi, dtype=np.complex128)
    return float(np.vdot(psi, psi).real)
