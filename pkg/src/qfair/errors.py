"""Exception types shared across the toolkit."""


class QfairError(Exception):
    """Base class for all toolkit errors."""


class DimensionMismatch(QfairError):
    """Operands act on Hilbert spaces of different dimension."""


class ValidationError(QfairError):
    """A value failed a structural invariant at construction or call time."""


class IncompletePovmError(ValidationError):
    """POVM effects do not sum to the identity."""


class ZeroProbabilityError(QfairError):
    """A measurement outcome with (numerically) zero probability was requested.

    Raised instead of dividing by a vanishing normalisation; the caller must
    decide how to proceed.
    """


class DegenerateMassError(QfairError):
    """Amplitude amplification is undefined: the marked subspace carries
    probability mass of (numerically) 0 or 1, so the oracle marks nothing
    or everything."""


class NonCommutingMeasurementsError(QfairError):
    """Sequential measurement audit refused: the group and outcome operators
    do not commute, so the joint distribution would be order-dependent."""


class InvariantViolation(QfairError):
    """A composed numerical result broke a hard invariant (e.g. a repaired
    state whose measured mass disagrees with the closed-form prediction)."""


class InputError(QfairError):
    """Malformed dataset, schema, or command-line input."""
