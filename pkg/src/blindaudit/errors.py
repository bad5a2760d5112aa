"""Exception hierarchy shared across the audit toolkit."""


class AuditError(Exception):
    """Base class for all blindaudit errors."""


class ValidationError(AuditError, ValueError):
    """Bad input: out-of-range parameter, malformed record, broken invariant."""


class InsufficientPoolError(ValidationError):
    """The document pool is smaller than the required sample size."""

    def __init__(self, required: int, available: int):
        self.required = required
        self.available = available
        super().__init__(
            f"pool has {available} documents but the audit requires {required}"
        )


class DegenerateDesignError(ValidationError):
    """The configured design yields a sample size of zero."""


class NotFoundError(AuditError):
    """Unknown audit, item, or document identifier."""


class ConflictError(AuditError):
    """Operation conflicts with existing state (e.g. leasing a decided item)."""


class ForbiddenError(AuditError):
    """Caller is not entitled to perform the operation."""


class IncompleteAuditError(AuditError):
    """A final report was requested before every chunk was finished."""

    def __init__(self, missing_chunks: list[int], missing_model_docs: int = 0):
        self.missing_chunks = list(missing_chunks)
        self.missing_model_docs = missing_model_docs
        parts = []
        if missing_chunks:
            parts.append(f"chunks incomplete: {sorted(missing_chunks)}")
        if missing_model_docs:
            parts.append(f"{missing_model_docs} documents lack a model decision")
        super().__init__("; ".join(parts) or "audit incomplete")


class StorageError(AuditError, OSError):
    """Underlying log file is missing, unreadable, or corrupt."""
