"""Exception types shared across the package."""


class InputError(ValueError):
    """Raised when an argument violates a documented precondition."""


class UnsupportedSpectrum(ValueError):
    """A matrix eigenvalue lies outside the rational / rational-imaginary field.

    Carries the unfactorable remainder of the characteristic polynomial in
    ``factor`` (coefficients, highest degree first).
    """

    def __init__(self, message, factor=None):
        super().__init__(message)
        self.factor = factor


class NonUnitDeterminant(ValueError):
    """A symbolic matrix determinant is not a single exponential term."""


class EvalError(ValueError):
    """Evaluation hit a singular locus (division by zero)."""


class CorpusSyntaxError(ValueError):
    """Corpus text failed to parse; carries location info."""

    def __init__(self, message, line=None, col=None, filename=None):
        loc = ""
        if filename is not None:
            loc += f"{filename}:"
        if line is not None:
            loc += f"{line}:"
        if col is not None:
            loc += f"{col}:"
        super().__init__(f"{loc} {message}" if loc else message)
        self.line = line
        self.col = col
        self.filename = filename
