"""Exception types shared across the toolkit."""


class CommaugError(Exception):
    """Base class for toolkit errors."""


class ConfigError(CommaugError):
    """Invalid configuration (bad flag values, inconsistent settings)."""


class DataFormatError(CommaugError):
    """Malformed or inconsistent on-disk data.

    Carries the offending path and, when known, the 1-based line number.
    """

    def __init__(self, message, path=None, line=None):
        loc = ""
        if path is not None:
            loc = f"{path}: "
            if line is not None:
                loc = f"{path}:{line}: "
        super().__init__(loc + message)
        self.path = path
        self.line = line


class SearchStalledWarning(UserWarning):
    """Adaptive resolution search could not propose a new resolution."""


class TrainingDivergedError(CommaugError):
    """Loss became non-finite during training."""
