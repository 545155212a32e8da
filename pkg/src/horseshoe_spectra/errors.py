"""Exception hierarchy shared by all modules."""


class HorseshoeError(Exception):
    """Base class for every error raised by this package."""


class ConfigError(HorseshoeError, ValueError):
    """Invalid run configuration. ``path`` names the offending field."""

    def __init__(self, path: str, message: str):
        self.path = path
        super().__init__(f"{path}: {message}")


class EmptySystem(HorseshoeError):
    """Trimming removed every symbol of a subshift."""


class InadmissibleWord(HorseshoeError, ValueError):
    pass


class DomainError(HorseshoeError, ValueError):
    pass


class NoCycle(HorseshoeError):
    """A masked graph carries no nontrivial strongly connected component."""


class EmptyPrune(HorseshoeError):
    """Threshold pruning left no subhorseshoe (dimension zero)."""


class DegenerateSet(HorseshoeError):
    pass


class BoundExceeded(HorseshoeError, ValueError):
    pass
