"""Exception hierarchy shared by the engine, CLI and HTTP service."""


class WorkbenchError(Exception):
    """Base class for all errors raised by glassbench."""


class DataError(WorkbenchError):
    """Bad input data: unreadable files, schema violations, invalid targets."""


class ConfigError(WorkbenchError):
    """Invalid configuration (pipeline config, model spec, test parameters)."""

    def __init__(self, message, key_path=None):
        super().__init__(message)
        self.key_path = key_path


class CapabilityError(WorkbenchError):
    """Operation not supported by this model kind (e.g. interpret on a registered model)."""


class NotFoundError(WorkbenchError):
    """Unknown model id, job id, or experiment path."""


class ConflictError(WorkbenchError):
    """Concurrent mutation rejected by the single-writer rule."""


class PersistenceError(WorkbenchError):
    """Corrupt or incompatible experiment/model files."""
