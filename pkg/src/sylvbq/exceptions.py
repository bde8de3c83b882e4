"""Exception hierarchy shared by the solver, the stepper and the CLI."""


class SylvbqError(Exception):
    """Base class for all package errors."""


class ConfigError(SylvbqError, ValueError):
    """Invalid grid, parameter or configuration value."""


class SolverError(SylvbqError):
    """A Sylvester back-end could not produce a solution meeting its contract.

    ``step`` is filled in by the stepper when the failure happens inside a
    time march.
    """

    def __init__(self, message, step=None):
        super().__init__(message)
        self.step = step

    def __str__(self):
        msg = super().__str__()
        if self.step is not None:
            return f"step {self.step}: {msg}"
        return msg


class NotContractiveError(SolverError):
    """Fixed-point back-end refused: contraction bound is not below one."""


class ConvergenceError(SolverError):
    """Iteration cap reached before the residual tolerance."""


class SingularOperatorError(SolverError):
    """A pivot fell below the singularity floor."""


class BlowUpError(SylvbqError):
    """The marched solution exceeded the blow-up guard or became non-finite."""

    def __init__(self, step, norm):
        super().__init__(f"solution blew up at step {step} (|U|_F = {norm:.3e})")
        self.step = step
        self.norm = norm
