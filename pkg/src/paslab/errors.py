"""Shared exception types, mapped to CLI exit codes by paslab.cli."""


class PaslabError(Exception):
    """Base class for package-specific failures."""


class ConfigError(PaslabError):
    """Bad or inconsistent run configuration (CLI exit code 2)."""


class BudgetError(PaslabError):
    """An enumeration or search would exceed its size budget (CLI exit code 3).

    `needed` carries the budget that would have been required.
    """

    def __init__(self, message, needed=None):
        super().__init__(message)
        self.needed = needed


class ConvergenceError(PaslabError):
    """An iterative solver hit its iteration cap (CLI exit code 4).

    `last_iterate` carries the final state for post-mortem inspection.
    """

    def __init__(self, message, last_iterate=None):
        super().__init__(message)
        self.last_iterate = last_iterate
