"""Exception types shared across the package."""


class InvalidArgument(ValueError):
    """A caller-supplied value violates an operation's precondition."""


class SimulationError(RuntimeError):
    """Internal inconsistency in the simulator (a bug, not a user error)."""


class AlreadyRegistered(KeyError):
    pass


class UnknownUser(KeyError):
    pass
