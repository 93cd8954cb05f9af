"""Cohesion structures: non-negative feasibility weights on coalitions."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Literal, Mapping, Sequence

import numpy as np

from .coalitions import (
    GameError,
    PlayerSet,
    all_masks,
    members,
    permute_table,
    popcounts,
    singleton_masks,
)


class CohesionError(ValueError):
    """Invalid cohesion structure."""


class InadmissibleCohesionError(CohesionError):
    """Some singleton has zero cohesion."""

    def __init__(self, players: PlayerSet, offenders: Sequence[int]):
        self.offenders = tuple(offenders)
        names = ", ".join(players.labels[i] for i in self.offenders)
        super().__init__(
            f"cohesion structure is not admissible: kappa({{i}}) = 0 for player(s) {names}"
        )


@dataclass(frozen=True, eq=False)
class CohesionStructure:
    players: PlayerSet
    kappa: np.ndarray

    def __post_init__(self) -> None:
        n = self.players.n
        arr = np.array(self.kappa, dtype=float)
        if arr.shape != (1 << n,):
            raise CohesionError(f"kappa table must have 2**{n} entries, got shape {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise CohesionError("kappa entries must be finite")
        if np.any(arr < 0):
            bad = [members(int(s)) for s in np.flatnonzero(arr < 0)[:3]]
            raise CohesionError(f"kappa must be non-negative; negative at {bad}")
        if arr[0] != 0.0:
            raise CohesionError(f"kappa(empty) must be 0, got {arr[0]}")
        arr.setflags(write=False)
        object.__setattr__(self, "kappa", arr)

    @property
    def n(self) -> int:
        return self.players.n

    def __call__(self, mask: int) -> float:
        return float(self.kappa[mask])

    def singleton_values(self) -> np.ndarray:
        return self.kappa[singleton_masks(self.n)]

    def permuted(self, perm: Sequence[int]) -> CohesionStructure:
        return CohesionStructure(self.players.permuted(perm), permute_table(self.kappa, perm))

    def __repr__(self) -> str:
        return f"CohesionStructure(players={list(self.players.labels)})"


def constant_cohesion(players: PlayerSet, value: float = 1.0) -> CohesionStructure:
    """The cohesionless benchmark: ``value`` on every non-empty coalition."""
    kappa = np.full(1 << players.n, float(value))
    kappa[0] = 0.0
    return CohesionStructure(players, kappa)


def is_admissible(kappa: CohesionStructure) -> bool:
    return bool(np.all(kappa.singleton_values() > 0))


def require_admissible(kappa: CohesionStructure) -> None:
    singles = kappa.singleton_values()
    if singles.min() > 0:
        return
    bad = np.flatnonzero(singles <= 0)
    if bad.size:
        raise InadmissibleCohesionError(kappa.players, [int(i) for i in bad])


@dataclass(frozen=True)
class IdeologyProfile:
    """Left-right position per player."""

    players: PlayerSet
    positions: tuple[float, ...]

    def __post_init__(self) -> None:
        pos = tuple(float(x) for x in self.positions)
        if len(pos) != self.players.n:
            raise CohesionError(f"expected {self.players.n} positions, got {len(pos)}")
        if not all(np.isfinite(pos)):
            raise CohesionError("positions must be finite")
        object.__setattr__(self, "positions", pos)

    def with_overrides(self, overrides: Mapping[str, float]) -> IdeologyProfile:
        pos = list(self.positions)
        for label, x in overrides.items():
            pos[self.players.index(label)] = float(x)
        return IdeologyProfile(self.players, tuple(pos))


def range_cohesion(profile: IdeologyProfile) -> CohesionStructure:
    """``kappa(S) = 1 / (1 + ideological range of S)``; singletons get 1."""
    n = profile.players.n
    masks = all_masks(n)
    pos = np.asarray(profile.positions)
    hi = np.full(masks.shape[0], -np.inf)
    lo = np.full(masks.shape[0], np.inf)
    for i in range(n):
        inside = ((masks >> i) & 1).astype(bool)
        hi[inside] = np.maximum(hi[inside], pos[i])
        lo[inside] = np.minimum(lo[inside], pos[i])
    kappa = np.zeros(masks.shape[0])
    kappa[1:] = 1.0 / (1.0 + (hi[1:] - lo[1:]))
    # exact 1 for singletons regardless of rounding
    kappa[popcounts(n) == 1] = 1.0
    return CohesionStructure(profile.players, kappa)


def explicit_cohesion(
    players: PlayerSet,
    entries: Mapping[int, float] | Iterable[tuple[int, float]],
    default_rule: Literal["singletons_one", "zero"] = "singletons_one",
) -> CohesionStructure:
    """Cohesion from listed coalition values (keys are bitmasks).

    Unlisted singletons get 1 under ``"singletons_one"``; every other unlisted
    coalition gets 0.
    """
    if default_rule not in ("singletons_one", "zero"):
        raise CohesionError(f"unknown default rule {default_rule!r}")
    items = entries.items() if isinstance(entries, Mapping) else entries
    n = players.n
    kappa = np.zeros(1 << n)
    if default_rule == "singletons_one":
        kappa[popcounts(n) == 1] = 1.0
    for mask, value in items:
        mask = int(mask)
        if not 0 <= mask < (1 << n):
            raise CohesionError(f"coalition mask {mask} out of range for {n} players")
        value = float(value)
        if value < 0:
            raise CohesionError(f"negative cohesion {value} for coalition {members(mask)}")
        if mask == 0 and value != 0:
            raise CohesionError("kappa(empty) must be 0")
        kappa[mask] = value
    return CohesionStructure(players, kappa)


def apply_cordon(base: CohesionStructure, pariahs: Iterable[int]) -> CohesionStructure:
    """Zero cohesion on every multi-party coalition that contains a pariah."""
    pariah_mask = 0
    for p in pariahs:
        if not 0 <= int(p) < base.n:
            raise GameError(f"pariah index {p} out of range")
        pariah_mask |= 1 << int(p)
    if not pariah_mask:
        return base
    n = base.n
    masks = all_masks(n)
    hit = ((masks & pariah_mask) != 0) & (popcounts(n) >= 2)
    kappa = base.kappa.copy()
    kappa[hit] = 0.0
    return CohesionStructure(base.players, kappa)


def scale_cohesion(base: CohesionStructure, a: float) -> CohesionStructure:
    if not a > 0:
        raise CohesionError(f"scale factor must be positive, got {a}")
    return CohesionStructure(base.players, a * base.kappa)
