from __future__ import annotations


class HofbauerEntropyError(Exception):
    """Base class for every error raised by the library."""


class DomainError(HofbauerEntropyError, ValueError):
    pass


class UnsupportedOrderError(HofbauerEntropyError, ValueError):
    pass


class RepresentationError(HofbauerEntropyError, ValueError):
    pass


class ResolutionError(HofbauerEntropyError, ValueError):
    pass


class BudgetError(HofbauerEntropyError, RuntimeError):
    pass


class PartitionMismatchError(HofbauerEntropyError, ValueError):
    pass


class AdmissibilityError(HofbauerEntropyError, ValueError):
    pass


class BoundaryHitError(HofbauerEntropyError, ValueError):
    pass


class GraphError(HofbauerEntropyError, ValueError):
    pass


class NoCycleError(GraphError):
    pass


class ConnectivityError(GraphError):
    pass


class MissingTagsError(GraphError):
    pass


class NotPeriodicError(HofbauerEntropyError, ValueError):
    pass


class GeometryError(HofbauerEntropyError, ValueError):
    pass


class PrecisionError(HofbauerEntropyError, ValueError):
    def __init__(self, message: str, *, suggested_l: int | None = None) -> None:
        super().__init__(message)
        self.suggested_l = suggested_l


class HorizonError(HofbauerEntropyError, ValueError):
    def __init__(self, message: str, *, max_safe_l: int) -> None:
        super().__init__(message)
        self.max_safe_l = max_safe_l


class ConfigError(HofbauerEntropyError, ValueError):
    pass
