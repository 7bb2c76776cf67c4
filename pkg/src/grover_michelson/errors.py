"""Exception types shared across the package."""


class InvalidParameterError(ValueError):
    """A device or sweep parameter violates its physical constraints."""


class DimensionMismatchError(ValueError):
    """Matrix and state (or two matrices) disagree on the port count."""


class InvalidDataError(ValueError):
    """Measured data cannot be interpreted (zero columns, unphysical sums)."""


class ResonanceError(ArithmeticError):
    """The steady-state solve hit a lossless resonance.

    The round-trip operator has an eigenvalue on the unit circle at 1, so
    ``I - S_ii @ Phi`` is singular and no unique steady state exists.
    """

    def __init__(self, message: str, *, phi1: float, phi2: float, theta: float):
        super().__init__(message)
        self.phi1 = phi1
        self.phi2 = phi2
        self.theta = theta
