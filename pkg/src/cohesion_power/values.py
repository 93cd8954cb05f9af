"""Cohesion-weighted Banzhaf and Shapley values.

Each player ``i`` gets a probability distribution over coalitions ``S`` of the
other players,

    p_i(S) ∝ w(|S|) * kappa(S + i) ** b,

with ``w`` uniform (Banzhaf branch) or the classical Shapley size weights
(Shapley branch). The value of ``i`` is the expected marginal contribution
under that distribution. ``kappa == 0`` always gets weight 0, also at ``b = 0``,
so ``b = 0`` gives the classical index on positive cohesion and the
reduced-game index under a cordon.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Literal, Sequence

import numpy as np

from .coalitions import Game, PlayerSet, player_subsets, popcounts, subsets_without
from .cohesion import CohesionStructure, require_admissible

Branch = Literal["banzhaf", "shapley"]
BRANCHES: tuple[Branch, ...] = ("banzhaf", "shapley")

MAX_EXPONENT = 64.0
NORMALIZATION_TOL = 1e-12
ORACLE_MAX_PLAYERS = 10


class DegenerateDenominatorError(ArithmeticError):
    """A coalition distribution has no positive mass to normalize."""


@dataclass(frozen=True)
class SizeWeights:
    """Per-size coalition weights ``alpha_k``, ``k = 0..n-1``."""

    alpha: tuple[float, ...]

    def __post_init__(self) -> None:
        alpha = tuple(float(a) for a in self.alpha)
        object.__setattr__(self, "alpha", alpha)
        if len(alpha) < 2:
            raise ValueError("size weights need n >= 2 entries")
        if any(a < 0 for a in alpha):
            raise ValueError(f"size weights must be non-negative: {alpha}")
        n = len(alpha)
        total = sum(math.comb(n - 1, k) * a for k, a in enumerate(alpha))
        if abs(total - 1.0) > 1e-12:
            raise ValueError(f"sum_k C(n-1,k) alpha_k = {total!r}, expected 1")

    @property
    def n(self) -> int:
        return len(self.alpha)

    @classmethod
    def constant(cls, n: int) -> SizeWeights:
        return cls(tuple([2.0 ** -(n - 1)] * n))

    def as_array(self) -> np.ndarray:
        arr = np.asarray(self.alpha)
        arr.setflags(write=False)
        return arr


@lru_cache(maxsize=64)
def shapley_size_weights(n: int) -> SizeWeights:
    """``alpha_k = k! (n-k-1)! / n!``."""
    if n < 2:
        raise ValueError(f"n must be >= 2, got {n}")
    fn = math.factorial(n)
    return SizeWeights(
        tuple(math.factorial(k) * math.factorial(n - k - 1) / fn for k in range(n))
    )


def _check_exponent(b: float) -> float:
    b = float(b)
    if not 0.0 <= b <= MAX_EXPONENT:
        raise ValueError(f"exponent b must lie in [0, {MAX_EXPONENT:g}], got {b}")
    return b


def cohesion_weight(kappa_value: float, b: float) -> float:
    """``kappa ** b``, except that zero cohesion stays 0 for every ``b``."""
    if kappa_value == 0:
        return 0.0
    return float(kappa_value) ** float(b)


def cohesion_weights(kappa_values: np.ndarray, b: float) -> np.ndarray:
    """Vectorised :func:`cohesion_weight`."""
    kappa_values = np.asarray(kappa_values, dtype=float)
    out = np.zeros_like(kappa_values)
    pos = kappa_values > 0
    out[pos] = kappa_values[pos] ** b
    return out


@dataclass(frozen=True, eq=False)
class CoalitionDistribution:
    """``probs[k]`` is the probability that ``player`` meets coalition ``masks[k]``."""

    player: int
    n: int
    masks: np.ndarray
    probs: np.ndarray
    underflow: bool = False

    def __getitem__(self, mask: int) -> float:
        if mask & (1 << self.player):
            raise KeyError(f"coalition {mask} contains player {self.player}")
        return float(self.probs[np.searchsorted(self.masks, mask)])

    def as_dict(self) -> dict[int, float]:
        return {int(s): float(p) for s, p in zip(self.masks, self.probs)}


def _raw_weights(
    kappa: CohesionStructure, i: int, b: float, alpha: SizeWeights | None
) -> tuple[np.ndarray, np.ndarray, bool]:
    n = kappa.n
    sub = subsets_without(n, i)
    kv = kappa.kappa[sub | (1 << i)]
    w = cohesion_weights(kv, b)
    underflow = bool(np.any((kv > 0) & (w == 0)))
    if alpha is not None:
        if alpha.n != n:
            raise ValueError(f"size weights are for n={alpha.n}, game has n={n}")
        w = alpha.as_array()[popcounts(n)[sub]] * w
    return sub, w, underflow


def _distribution(
    kappa: CohesionStructure, i: int, b: float, alpha: SizeWeights | None
) -> CoalitionDistribution:
    require_admissible(kappa)
    b = _check_exponent(b)
    sub, w, underflow = _raw_weights(kappa, i, b, alpha)
    den = w.sum()
    if not den > 0:
        raise DegenerateDenominatorError(
            f"no coalition with positive weight for player {kappa.players.labels[i]!r} at b={b:g}"
        )
    return CoalitionDistribution(i, kappa.n, sub, w / den, underflow)


def banzhaf_probabilities(kappa: CohesionStructure, i: int, b: float) -> CoalitionDistribution:
    """``p_i(S) = kappa(S+i)^b / sum_T kappa(T+i)^b``."""
    return _distribution(kappa, i, b, None)


def shapley_probabilities(
    kappa: CohesionStructure, i: int, b: float, alpha: SizeWeights | None = None
) -> CoalitionDistribution:
    """``p_i(S) ∝ alpha_|S| kappa(S+i)^b``; classical Shapley weights by default."""
    if alpha is None:
        alpha = shapley_size_weights(kappa.n)
    return _distribution(kappa, i, b, alpha)


def branch_probabilities(
    kappa: CohesionStructure,
    i: int,
    branch: Branch,
    b: float,
    alpha: SizeWeights | None = None,
) -> CoalitionDistribution:
    if branch == "banzhaf":
        return banzhaf_probabilities(kappa, i, b)
    if branch == "shapley":
        return shapley_probabilities(kappa, i, b, alpha)
    raise ValueError(f"unknown branch {branch!r}")


@dataclass(frozen=True)
class PowerProfile:
    players: PlayerSet
    branch: Branch
    b: float
    values: tuple[float, ...]
    normalized: bool = False
    zero_fallback: bool = False
    warnings: tuple[str, ...] = field(default=())

    def __getitem__(self, label: str) -> float:
        return self.values[self.players.index(label)]

    def as_dict(self) -> dict[str, float]:
        return dict(zip(self.players.labels, self.values))

    def as_array(self) -> np.ndarray:
        return np.asarray(self.values)


def cohesion_value(
    v: Game,
    kappa: CohesionStructure,
    branch: Branch = "shapley",
    b: float = 1.0,
    alpha: SizeWeights | None = None,
) -> PowerProfile:
    """Expected marginal contribution of every player (unnormalized)."""
    if kappa.n != v.n:
        raise ValueError(f"cohesion is for n={kappa.n}, game has n={v.n}")
    if branch == "shapley" and alpha is None:
        alpha = shapley_size_weights(v.n)
    elif branch == "banzhaf":
        if alpha is not None:
            raise ValueError("size weights only apply to the shapley branch")
    elif branch != "shapley":
        raise ValueError(f"unknown branch {branch!r}")
    require_admissible(kappa)
    b = _check_exponent(b)
    n = v.n
    sub, with_i = player_subsets(n)
    kv = kappa.kappa[with_i]
    w = cohesion_weights(kv, b)
    if alpha is not None:
        if alpha.n != n:
            raise ValueError(f"size weights are for n={alpha.n}, game has n={n}")
        w *= alpha.as_array()[popcounts(n)[sub]]
    den = w.sum(axis=1)
    if not np.all(den > 0):
        i = int(np.flatnonzero(~(den > 0))[0])
        raise DegenerateDenominatorError(
            f"no coalition with positive weight for player {v.players.labels[i]!r} at b={b:g}"
        )
    delta = v.worth[with_i] - v.worth[sub]
    out = tuple(float(x) for x in (w * delta).sum(axis=1) / den)
    underflow = [v.players.labels[i] for i in np.flatnonzero(np.any((kv > 0) & (w == 0), axis=1))]
    warnings = ()
    if underflow:
        warnings = (f"cohesion weights underflowed to 0 at b={b:g} for {', '.join(underflow)}",)
    return PowerProfile(v.players, branch, float(b), tuple(out), warnings=warnings)


def normalize_index(profile: PowerProfile, grand_worth: float = 1.0) -> PowerProfile:
    """Rescale so values sum to ``grand_worth``; all zeros if the raw sum vanishes."""
    vals = np.asarray(profile.values)
    total = vals.sum()
    if abs(total) < NORMALIZATION_TOL:
        out = (0.0,) * len(vals)
        fallback = True
    else:
        out = tuple(float(x) for x in vals / total * grand_worth)
        fallback = False
    return PowerProfile(
        profile.players,
        profile.branch,
        profile.b,
        out,
        normalized=True,
        zero_fallback=fallback,
        warnings=profile.warnings,
    )


def cohesion_index(
    v: Game, kappa: CohesionStructure, branch: Branch = "shapley", b: float = 1.0
) -> PowerProfile:
    """Normalized index: cohesion-Shapley (``Phi``) or cohesion-Banzhaf (``B``)."""
    return normalize_index(cohesion_value(v, kappa, branch, b), v.grand_worth)


def classical_shapley_oracle(v: Game) -> np.ndarray:
    """Shapley value by averaging marginals over all ``n!`` orderings.

    Deliberately independent of the coalition-probability code.
    """
    n = v.n
    if n > ORACLE_MAX_PLAYERS:
        raise ValueError(f"permutation oracle limited to n <= {ORACLE_MAX_PLAYERS}, got {n}")
    orders = _orderings(n)
    prefix = np.bitwise_or.accumulate(np.left_shift(1, orders), axis=1)
    worth = v.worth[prefix]
    gains = np.diff(worth, axis=1, prepend=0.0)
    totals = np.bincount(orders.ravel(), weights=gains.ravel(), minlength=n)
    return totals / orders.shape[0]


@lru_cache(maxsize=ORACLE_MAX_PLAYERS)
def _orderings(n: int) -> np.ndarray:
    orders = np.array(list(itertools.permutations(range(n))), dtype=np.int64)
    orders.setflags(write=False)
    return orders


def classical_banzhaf(v: Game) -> np.ndarray:
    """Unnormalized Banzhaf value: swing total over ``2**(n-1)``."""
    n = v.n
    out = np.empty(n)
    for i in range(n):
        sub = subsets_without(n, i)
        out[i] = (v.worth[sub | (1 << i)] - v.worth[sub]).sum() / 2 ** (n - 1)
    return out


def normalized(values: Sequence[float], grand_worth: float = 1.0) -> np.ndarray:
    vals = np.asarray(values, dtype=float)
    total = vals.sum()
    if abs(total) < NORMALIZATION_TOL:
        return np.zeros_like(vals)
    return vals / total * grand_worth
