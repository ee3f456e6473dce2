"""Online matching on 3-uniform hypergraphs under vertex arrivals."""
from .model import FRESH_LEVEL, RHO, ArrivalEvent, MatchingState, f

__all__ = ["FRESH_LEVEL", "RHO", "ArrivalEvent", "MatchingState", "f"]
