"""Exception types shared across the package.

The CLI maps these onto exit codes: argument/guard/regime errors exit 2,
convergence failures exit 3.
"""


class TPXError(Exception):
    pass


class ArgumentError(TPXError, ValueError):
    pass


class SizeLimitError(TPXError, ValueError):
    pass


class UnsupportedRegimeError(TPXError, ValueError):
    """Raised for N < 2k, where the I-state basis is incomplete."""


class DegenerateClassError(TPXError, ValueError):
    pass


class IllConditionedError(TPXError, ValueError):
    pass


class NoMixingError(TPXError, ValueError):
    pass


class ConvergenceError(TPXError, RuntimeError):
    def __init__(self, message, last_iterate=None, residual=None, iterations=None):
        super().__init__(message)
        self.last_iterate = last_iterate
        self.residual = residual
        self.iterations = iterations
