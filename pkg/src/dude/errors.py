"""Exception types raised across the package."""


class DudeError(Exception):
    """Base class for all package errors."""


class ScenarioError(DudeError, ValueError):
    """One or more scenario invariants are violated.

    ``issues`` holds every violation as ``(code, message)`` pairs so callers
    see the whole list at once rather than the first failure.
    """

    def __init__(self, issues):
        self.issues = list(issues)
        lines = "; ".join(f"{code}: {msg}" for code, msg in self.issues)
        super().__init__(lines)

    @property
    def codes(self):
        return [code for code, _ in self.issues]


class AlphaOutOfRange(DudeError, ValueError):
    pass


class EmptyTier(DudeError):
    pass


class MoreBSsThanDevices(DudeError, ValueError):
    pass


class PowerOrdering(DudeError, ValueError):
    pass


class Case2ProbabilityZero(DudeError, ZeroDivisionError):
    """Conditioning on decoupled access is undefined when that event has no mass."""


class InfiniteCapacity(DudeError, ArithmeticError):
    """Neither interference nor noise limits the link, so E[log2(1+SINR)] diverges."""


class MaxDepthExceeded(DudeError, ArithmeticError):
    def __init__(self, value, error, message="maximum subdivision depth exceeded"):
        self.value = value
        self.error = error
        super().__init__(f"{message} (partial value={value!r}, error estimate={error!r})")


class InsufficientCase2Samples(DudeError):
    def __init__(self, collected, required):
        self.collected = collected
        self.required = required
        super().__init__(f"collected {collected} Case-2 samples, need at least {required}")


class ConfigError(DudeError, ValueError):
    """Malformed or unknown entries in a configuration file."""
