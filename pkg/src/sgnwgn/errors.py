"""Exception types raised by the solvers."""

import numpy as np


class ParameterError(ValueError):
    """Invalid or inconsistent input parameter."""


class CavitationError(ArithmeticError):
    """The water depth (or ``1 - eta``) came too close to zero."""

    def __init__(self, message, value=None):
        super().__init__(message)
        self.value = value


class ConvergenceError(ArithmeticError):
    """An iterative solve failed; ``history`` holds the residual trace."""

    def __init__(self, message, history=(), stats=None):
        super().__init__(message)
        self.history = list(history)
        self.stats = stats


class SingularMatrixError(np.linalg.LinAlgError):
    pass
