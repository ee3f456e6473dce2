from .integral import (
    GreedyFractional,
    GreedyIntegral,
    RandomAlgConfig,
    RandomMatching,
    arrival_rng,
    greedy_integral_arrival,
    random_arrival,
)
from .rounding import RoundingState, rounding_arrival, rounding_guarantee, simulate_rounding
from .waterfill import WaterFillConfig, WaterFilling, water_level, waterfill_arrival, waterfill_duals

__all__ = [
    "GreedyFractional",
    "GreedyIntegral",
    "RandomAlgConfig",
    "RandomMatching",
    "RoundingState",
    "WaterFillConfig",
    "WaterFilling",
    "arrival_rng",
    "greedy_integral_arrival",
    "random_arrival",
    "rounding_arrival",
    "rounding_guarantee",
    "simulate_rounding",
    "water_level",
    "waterfill_arrival",
    "waterfill_duals",
]
