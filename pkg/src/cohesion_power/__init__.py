"""Cohesion-weighted power indices for weighted voting games."""

from __future__ import annotations

from .coalitions import (
    MAX_PLAYERS,
    Game,
    GameError,
    PlayerSet,
    SimpleGame,
    WeightedMajorityGame,
    build_weighted_majority,
    coalition,
    dictator_game,
    marginal_contribution,
)
from .cohesion import (
    CohesionError,
    CohesionStructure,
    IdeologyProfile,
    InadmissibleCohesionError,
    apply_cordon,
    constant_cohesion,
    explicit_cohesion,
    is_admissible,
    range_cohesion,
    scale_cohesion,
)
from .values import (
    DegenerateDenominatorError,
    PowerProfile,
    SizeWeights,
    banzhaf_probabilities,
    classical_banzhaf,
    classical_shapley_oracle,
    cohesion_index,
    cohesion_value,
    normalize_index,
    shapley_probabilities,
    shapley_size_weights,
)

__version__ = "0.1.0"

__all__ = [
    "MAX_PLAYERS",
    "CohesionError",
    "CohesionStructure",
    "DegenerateDenominatorError",
    "Game",
    "GameError",
    "IdeologyProfile",
    "InadmissibleCohesionError",
    "PlayerSet",
    "PowerProfile",
    "SimpleGame",
    "SizeWeights",
    "WeightedMajorityGame",
    "apply_cordon",
    "banzhaf_probabilities",
    "build_weighted_majority",
    "classical_banzhaf",
    "classical_shapley_oracle",
    "coalition",
    "cohesion_index",
    "cohesion_value",
    "constant_cohesion",
    "dictator_game",
    "explicit_cohesion",
    "is_admissible",
    "marginal_contribution",
    "normalize_index",
    "range_cohesion",
    "scale_cohesion",
    "shapley_probabilities",
    "shapley_size_weights",
]
