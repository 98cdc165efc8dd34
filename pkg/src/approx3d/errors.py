"""Exception hierarchy shared by all modules."""


class Approx3dError(Exception):
    """Base class for all package errors."""


class ConfigError(Approx3dError, ValueError):
    """Malformed configuration, table, or domain."""


class InvalidArgument(Approx3dError, ValueError):
    pass


class NoFeasibleDie(Approx3dError):
    """No whole die of the requested size fits on the wafer."""


class UnsupportedWidth(Approx3dError, ValueError):
    pass


class DuplicateId(Approx3dError, ValueError):
    pass


class IncompleteRecord(Approx3dError, KeyError):
    """A multiplier record lacks a per-node area or an accuracy entry."""

    def __str__(self) -> str:  # KeyError quotes its message otherwise
        return str(self.args[0]) if self.args else ""


class InfeasibleArchitecture(Approx3dError):
    """No tiling of a layer fits the architecture's buffers."""


class GuardError(Approx3dError):
    """An internal size guard tripped (e.g. exhaustive search space too large)."""
