class ValidationError(ValueError):
    """Input data violates a documented format or invariant."""


class AtlasError(ValidationError):
    pass


class SnapshotError(ValidationError):
    pass


class PipelineError(RuntimeError):
    """A stage could not run to completion."""
