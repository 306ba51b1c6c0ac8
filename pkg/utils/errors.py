# utils/errors.py


class QSNNError(ValueError):
    """Base class for every error raised by the laboratory."""


class DimensionError(QSNNError):
    pass


class ContractViolation(QSNNError):
    pass


class IntegratorFault(QSNNError):
    """An evolved state failed the density-matrix checks."""


class ConfigError(QSNNError):
    def __init__(self, field, message):
        self.field = field
        self.message = message
        super().__init__(f"config field '{field}': {message}")
