"""Exception hierarchy shared across the package.

The CLI maps these onto process exit codes: config problems -> 2,
numerical failures -> 3, insufficient data for selection/tangency -> 4.
"""


class FracfolioError(Exception):
    """Base class for all package errors."""


class ConfigError(FracfolioError):
    """Invalid or inconsistent run configuration."""


class DomainError(FracfolioError, ValueError):
    """An operation was called with arguments outside its domain."""


class SolverError(FracfolioError, RuntimeError):
    """A numerical solve failed to converge.

    Carries the (design_id, realization_id) pair when raised from a
    stage simulation so failed work items are traceable.
    """

    def __init__(self, message: str, design_id: str | None = None,
                 realization_id: str | None = None):
        tag = ""
        if design_id is not None or realization_id is not None:
            tag = f" [design={design_id} realization={realization_id}]"
        super().__init__(message + tag)
        self.design_id = design_id
        self.realization_id = realization_id


class SimulationFailure(FracfolioError, RuntimeError):
    """A stage run finished but violated an acceptance guard (e.g. volume balance)."""

    def __init__(self, message: str, design_id: str | None = None,
                 realization_id: str | None = None):
        tag = ""
        if design_id is not None or realization_id is not None:
            tag = f" [design={design_id} realization={realization_id}]"
        super().__init__(message + tag)
        self.design_id = design_id
        self.realization_id = realization_id


class SelectionError(FracfolioError):
    """Not enough candidate designs to perform the requested selection."""


class TangencyError(FracfolioError):
    """No valid common tangent exists for the given frontiers."""
