"""Exception types shared across the package."""


class InvalidInputError(ValueError):
    """Input violates a shape, finiteness, or length precondition."""


class UnsupportedShapeError(ValueError):
    """Operation requires at least as many outputs as inputs (p >= m)."""


class NoLeftInverseError(RuntimeError):
    """No delayed left inverse exists at the requested horizon.

    Carries the achieved equation residual in ``residual``.
    """

    def __init__(self, message: str, residual: float):
        super().__init__(message)
        self.residual = residual


class InvalidGainError(ValueError):
    """Supplied inversion gain does not satisfy its defining equation."""


class InconsistentTrajectoryError(RuntimeError):
    """Stacked window is not a trajectory of the data-generating system."""

    def __init__(self, message: str, residual: float):
        super().__init__(message)
        self.residual = residual


class DegenerateDataError(RuntimeError):
    """Offline data admits no kernel directions to match input history."""


class PersistencyError(RuntimeError):
    """Offline input fails the persistency-of-excitation rank check."""

    def __init__(self, message: str, required_order: int, required_rank: int, achieved_rank: int):
        super().__init__(message)
        self.required_order = required_order
        self.required_rank = required_rank
        self.achieved_rank = achieved_rank


class ConfigError(ValueError):
    """Scenario configuration is inconsistent or malformed."""


class TrajectoryFormatError(ValueError):
    """Trajectory CSV could not be parsed; ``line`` is 1-based."""

    def __init__(self, message: str, line: int | None = None):
        super().__init__(message)
        self.line = line
