"""Adaptive adversary for fractional matching on 3-uniform hypergraphs."""
from .buckets import BucketPartition, bucketize, delta, grid_size
from .checks import LastPhaseReport, LoadBoundReport, check_last_phase, check_load_lower_bounds
from .construction import AdversaryConfig, FullAdversary, last_phase_budget
from .gadget import GadgetSource, GadgetState, gadget_value_bound, play_gadget, prefix_margins
from .phases import PhaseRecord, PhaseState, distance_steps, next_matching
from .psi import A_CONST, B_CONST, check_psi_properties, psi, psi_exact, psi_row, xi

__all__ = [
    "A_CONST", "B_CONST", "AdversaryConfig", "BucketPartition", "FullAdversary", "GadgetSource",
    "GadgetState", "LastPhaseReport", "LoadBoundReport", "PhaseRecord", "PhaseState", "bucketize",
    "check_last_phase", "check_load_lower_bounds", "check_psi_properties", "delta",
    "distance_steps", "gadget_value_bound", "grid_size", "last_phase_budget", "next_matching",
    "play_gadget", "prefix_margins", "psi", "psi_exact", "psi_row", "xi",
]
