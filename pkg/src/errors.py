"""
Exception hierarchy for behaviorprint
Every error raised on purpose by the package derives from BehaviorPrintError
"""

from typing import Optional


class BehaviorPrintError(Exception):
    """Base class for all behaviorprint errors"""


class ConfigError(BehaviorPrintError):
    """Invalid configuration value"""

    def __init__(self, field: str, reason: str):
        self.field = field
        self.reason = reason
        super().__init__(f"invalid '{field}': {reason}")


class EventLogError(BehaviorPrintError):
    """Malformed row in an event log"""

    def __init__(self, row: int, reason: str):
        self.row = row
        self.reason = reason
        super().__init__(f"row {row}: {reason}")


class EventValidationError(EventLogError):
    """Row parses but violates an EventRecord invariant"""


class MissingMedianError(BehaviorPrintError):
    """No median available for an activity kind"""

    def __init__(self, kind: str):
        self.kind = kind
        super().__init__(f"no records of kind '{kind}' to compute a median from")


class InvalidDistributionError(BehaviorPrintError):
    """Vector is not usable as a probability distribution"""


class InsufficientDataError(BehaviorPrintError):
    """Not enough sequences, users or profiles for the requested operation"""


class ClusteringError(BehaviorPrintError):
    """Dendrogram construction or cutting failed"""


class StageError(BehaviorPrintError):
    """Error raised inside a pipeline stage, tagged with the stage name"""

    def __init__(self, stage: str, cause: Exception):
        self.stage = stage
        self.cause: Optional[Exception] = cause
        super().__init__(f"[{stage}] {cause}")
