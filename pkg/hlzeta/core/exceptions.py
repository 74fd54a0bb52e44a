"""
Custom exceptions for the HLZeta workbench.
"""
from typing import Optional


class HLZetaException(Exception):
    """Base exception for the workbench."""
    pass


class PoleError(HLZetaException):
    """Raised when a function is evaluated at one of its poles."""
    def __init__(self, message: str, point: object = None):
        self.message = message
        self.point = point
        super().__init__(self.message)


class DomainError(HLZetaException):
    """Raised when an argument lies outside the supported domain."""
    pass


class BranchError(HLZetaException):
    """Raised when an argument lands on a branch cut."""
    pass


class CapacityError(HLZetaException):
    """Raised when a request exceeds a precomputed table."""
    def __init__(self, message: str, requested: int = None, capacity: int = None):
        self.message = message
        self.requested = requested
        self.capacity = capacity
        super().__init__(self.message)


class ConvergenceError(HLZetaException):
    """Raised when a tolerance cannot be met within the allowed work."""
    def __init__(
        self,
        message: str,
        best_estimate: Optional[complex] = None,
        achieved_bound: Optional[float] = None,
    ):
        self.message = message
        self.best_estimate = best_estimate
        self.achieved_bound = achieved_bound
        super().__init__(self.message)


class RegularizationError(HLZetaException):
    """Raised when an Abel-regularised limit does not stabilise."""
    def __init__(self, message: str, levels: Optional[list] = None):
        self.message = message
        self.levels = levels or []
        super().__init__(self.message)


class AssemblyError(HLZetaException):
    """Raised when an assembled closed form disagrees with its oracle."""
    def __init__(self, message: str, closed: float = None, oracle: float = None):
        self.message = message
        self.closed = closed
        self.oracle = oracle
        super().__init__(self.message)


class UnknownIdentityError(HLZetaException):
    """Raised when a selector matches no registered identity."""
    def __init__(self, message: str, selector: str = None):
        self.message = message
        self.selector = selector
        super().__init__(self.message)


class ConfigError(HLZetaException):
    """Raised when configuration is invalid."""
    def __init__(self, message: str, key: str = None):
        self.message = message
        self.key = key
        super().__init__(self.message)


class ReportStoreError(HLZetaException):
    """Raised when a persisted verify run cannot be written or read."""
    def __init__(self, message: str, base_path: str = None, file_path: str = None):
        self.message = message
        self.base_path = base_path
        self.file_path = file_path
        super().__init__(self.message)
