"""Exception hierarchy shared across the package."""


class FlowFpError(Exception):
    """Base class for all package-specific errors."""


class DomainError(FlowFpError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class ConfigError(FlowFpError, ValueError):
    """A configuration is inconsistent or incomplete; reported before any trial runs."""


class InfeasiblePlanError(FlowFpError, ValueError):
    """The requested two-phase plan cannot be realised (e.g. rate reduction >= flow rate)."""


class CodebookFormatError(FlowFpError, ValueError):
    """A persisted codebook file is malformed, truncated or fails validation."""


class AuditError(FlowFpError, RuntimeError):
    """An internal conservation or consistency audit failed during an experiment."""
