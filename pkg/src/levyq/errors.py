"""Exception types shared across the package."""


class NumericalIntegrityError(RuntimeError):
    """An internal cross-check failed beyond its stated tolerance.

    Raised when two independent evaluation routes (e.g. the CDF-side and
    quantile-side distance formulas, or a solver and its optimality
    certificate) disagree by more than the advertised tolerance.  This
    always indicates a bug or a numerically hostile input, never a
    legitimate result.
    """


class UnsupportedSpecError(ValueError):
    """The requested operation is not defined for this distribution."""
