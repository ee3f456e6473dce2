"""Exception types raised across the package."""


class HypermatchError(Exception):
    pass


class CapacityViolation(HypermatchError):
    def __init__(self, node, load):
        self.node = node
        self.load = load
        super().__init__(f"capacity exceeded at node {node}: load {load!r} > 1")


class UnknownHyperedge(HypermatchError, KeyError):
    pass


class WrongUniformity(HypermatchError, ValueError):
    pass


class NotDisjoint(HypermatchError, ValueError):
    pass


class DegreeBound(HypermatchError, ValueError):
    pass


class PhaseOverflow(HypermatchError):
    pass


class ConfigError(HypermatchError, ValueError):
    pass


class TooLarge(HypermatchError):
    pass


class UnknownSource(HypermatchError, TypeError):
    pass
