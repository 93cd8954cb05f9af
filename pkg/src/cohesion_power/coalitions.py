"""Player sets, coalitions and characteristic-function games.

Coalitions are plain ``int`` bitmasks over players ``0..n-1``: bit ``i`` is set
iff player ``i`` belongs to the coalition. A game stores its worth as a dense
table of ``2**n`` floats indexed by that mask, so ``v(S)`` is ``worth[S]``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Iterator, Sequence

import numpy as np

MAX_PLAYERS = 24


class GameError(ValueError):
    """Invalid game, player set or coalition."""


# ---------------------------------------------------------------------------
# coalition primitives
# ---------------------------------------------------------------------------


def coalition(members: Iterable[int]) -> int:
    """Bitmask for an iterable of player indices."""
    mask = 0
    for i in members:
        mask |= 1 << int(i)
    return mask


def members(mask: int) -> list[int]:
    """Player indices contained in ``mask``, ascending."""
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return out


def size(mask: int) -> int:
    return int(mask).bit_count()


def subsets_without(n: int, i: int) -> np.ndarray:
    """All coalitions of ``n`` players that exclude player ``i``, ascending."""
    return _index_tables(n)[1][i]


def all_masks(n: int) -> np.ndarray:
    return _index_tables(n)[0]


def popcounts(n: int) -> np.ndarray:
    return _index_tables(n)[2]


@lru_cache(maxsize=32)
def _index_tables(n: int) -> tuple[np.ndarray, tuple[np.ndarray, ...], np.ndarray]:
    masks = np.arange(1 << n, dtype=np.int64)
    masks.setflags(write=False)
    without = []
    for i in range(n):
        sub = masks[(masks & (1 << i)) == 0]
        sub.setflags(write=False)
        without.append(sub)
    pc = np.bitwise_count(masks).astype(np.int64)
    pc.setflags(write=False)
    return masks, tuple(without), pc


@lru_cache(maxsize=32)
def singleton_masks(n: int) -> np.ndarray:
    out = np.int64(1) << np.arange(n, dtype=np.int64)
    out.setflags(write=False)
    return out


@lru_cache(maxsize=32)
def player_subsets(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Row ``i``: coalitions without ``i`` and the same coalitions with ``i`` added."""
    sub = np.stack([subsets_without(n, i) for i in range(n)])
    with_i = sub | (np.int64(1) << np.arange(n, dtype=np.int64))[:, None]
    sub.setflags(write=False)
    with_i.setflags(write=False)
    return sub, with_i


def permute_masks(n: int, perm: Sequence[int]) -> np.ndarray:
    """Image of every mask under the player relabelling ``i -> perm[i]``."""
    masks = all_masks(n)
    image = np.zeros_like(masks)
    for i, j in enumerate(perm):
        image |= ((masks >> i) & 1) << int(j)
    return image


def permute_table(table: np.ndarray, perm: Sequence[int]) -> np.ndarray:
    """Table ``t'`` with ``t'(pi S) = t(S)``."""
    n = int(table.shape[0]).bit_length() - 1
    out = np.empty_like(table)
    out[permute_masks(n, perm)] = table
    return out


def _check_perm(perm: Sequence[int], n: int) -> None:
    if sorted(int(p) for p in perm) != list(range(n)):
        raise GameError(f"not a permutation of 0..{n - 1}: {list(perm)}")


# ---------------------------------------------------------------------------
# player sets and games
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PlayerSet:
    labels: tuple[str, ...]

    def __post_init__(self) -> None:
        labels = tuple(str(x) for x in self.labels)
        object.__setattr__(self, "labels", labels)
        if not 2 <= len(labels) <= MAX_PLAYERS:
            raise GameError(f"need 2..{MAX_PLAYERS} players, got {len(labels)}")
        if any(not x for x in labels):
            raise GameError("player labels must be non-empty")
        if len(set(labels)) != len(labels):
            raise GameError(f"duplicate player labels in {list(labels)}")

    @classmethod
    def of_size(cls, n: int) -> PlayerSet:
        return _numbered_players(n)

    @property
    def n(self) -> int:
        return len(self.labels)

    def __len__(self) -> int:
        return len(self.labels)

    def __iter__(self) -> Iterator[str]:
        return iter(self.labels)

    def index(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise GameError(f"unknown player {label!r}") from None

    def mask_of(self, labels: Iterable[str]) -> int:
        return coalition(self.index(x) for x in labels)

    @property
    def grand(self) -> int:
        return (1 << self.n) - 1

    def permuted(self, perm: Sequence[int]) -> PlayerSet:
        _check_perm(perm, self.n)
        new = [""] * self.n
        for i, j in enumerate(perm):
            new[j] = self.labels[i]
        return PlayerSet(tuple(new))


@lru_cache(maxsize=MAX_PLAYERS)
def _numbered_players(n: int) -> PlayerSet:
    return PlayerSet(tuple(str(i + 1) for i in range(n)))


def _frozen(values, n: int) -> np.ndarray:
    arr = np.array(values, dtype=float)
    if arr.shape != (1 << n,):
        raise GameError(f"table must have 2**{n} = {1 << n} entries, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise GameError("table entries must be finite")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class Game:
    """TU game with a dense worth table; ``worth[0]`` (the empty coalition) is 0."""

    players: PlayerSet
    worth: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "worth", _frozen(self.worth, self.players.n))
        if self.worth[0] != 0.0:
            raise GameError(f"v(empty) must be 0, got {self.worth[0]}")

    @property
    def n(self) -> int:
        return self.players.n

    def __call__(self, mask: int) -> float:
        return float(self.worth[mask])

    @property
    def grand_worth(self) -> float:
        return float(self.worth[-1])

    def is_simple(self) -> bool:
        w = self.worth
        return bool(np.all((w == 0.0) | (w == 1.0)) and w[-1] == 1.0)

    def is_monotone(self) -> bool:
        """True iff adding any single player never lowers worth."""
        w = self.worth
        for i in range(self.n):
            sub = subsets_without(self.n, i)
            if np.any(w[sub | (1 << i)] < w[sub]):
                return False
        return True

    def permuted(self, perm: Sequence[int]) -> Game:
        """The game ``pi v`` with ``(pi v)(pi S) = v(S)``."""
        _check_perm(perm, self.n)
        return Game(self.players.permuted(perm), permute_table(self.worth, perm))

    def linear_combination(self, a: float, other: Game, c: float) -> Game:
        """``a * self + c * other`` on the same player set."""
        if other.n != self.n:
            raise GameError("games are on different player sets")
        return Game(self.players, a * self.worth + c * other.worth)

    def __repr__(self) -> str:
        return f"{type(self).__name__}(players={list(self.players.labels)})"


class SimpleGame(Game):
    """Game with worths in {0, 1} and a winning grand coalition."""

    def __post_init__(self) -> None:
        super().__post_init__()
        if not self.is_simple():
            raise GameError("simple game needs worths in {0,1} and v(N) = 1")


@dataclass(frozen=True, eq=False)
class WeightedMajorityGame(SimpleGame):
    """``S`` wins iff its total weight reaches the quota (weak inequality)."""

    weights: tuple[float, ...] = field(default=())
    quota: float = 0.0

    def coalition_weight(self, mask: int) -> float:
        return float(sum(self.weights[i] for i in members(mask)))

    def wins(self, mask: int) -> bool:
        return self.coalition_weight(mask) >= self.quota


def build_weighted_majority(
    players: PlayerSet, weights: Sequence[float], quota: float
) -> WeightedMajorityGame:
    """Weighted majority game: ``v(S) = 1`` iff ``sum(weights[S]) >= quota``."""
    w = np.asarray(weights, dtype=float)
    if w.shape != (players.n,):
        raise GameError(f"expected {players.n} weights, got {w.shape[0] if w.ndim else 0}")
    if np.any(w < 0) or not np.all(np.isfinite(w)):
        raise GameError("weights must be finite and non-negative")
    if not quota > 0:
        raise GameError(f"quota must be positive, got {quota}")
    if w.sum() < quota:
        raise GameError(
            f"quota {quota} exceeds total weight {w.sum()}: the grand coalition must win"
        )
    masks = all_masks(players.n)
    totals = np.zeros(masks.shape[0])
    for i in range(players.n):
        totals += ((masks >> i) & 1) * w[i]
    worth = (totals >= quota).astype(float)
    return WeightedMajorityGame(players, worth, tuple(float(x) for x in w), float(quota))


def dictator_game(players: PlayerSet, dictator: int) -> SimpleGame:
    worth = ((all_masks(players.n) >> dictator) & 1).astype(float)
    return SimpleGame(players, worth)


# ---------------------------------------------------------------------------
# marginal contributions
# ---------------------------------------------------------------------------


def marginal_contribution(v: Game, i: int, s: int) -> float:
    """``v(S + i) - v(S)`` for a coalition ``S`` not containing ``i``."""
    bit = 1 << i
    if s & bit:
        raise GameError(f"player {i} is already in coalition {members(s)}")
    return float(v.worth[s | bit] - v.worth[s])


def marginal_vector(v: Game, i: int) -> np.ndarray:
    """Marginal contributions of ``i`` over ``subsets_without(n, i)``."""
    sub = subsets_without(v.n, i)
    return v.worth[sub | (1 << i)] - v.worth[sub]


def is_dummy(v: Game, i: int) -> bool:
    return bool(np.all(marginal_vector(v, i) == 0.0))


def swing_count(v: Game, i: int) -> int:
    """Number of coalitions where ``i`` turns losing into winning."""
    return int(np.count_nonzero(marginal_vector(v, i) == 1.0))


@dataclass(frozen=True)
class DichotomyReport:
    player: int
    monotone: bool
    outside_range: tuple[int, ...]  # S with marginal not in {-1, 0, 1}
    negative: tuple[int, ...]  # S with marginal -1

    @property
    def ok(self) -> bool:
        if self.outside_range:
            return False
        return not (self.monotone and self.negative)


def check_marginal_dichotomy(v: Game, i: int) -> DichotomyReport:
    """Marginals of a simple game lie in {-1,0,1}, and in {0,1} if it is monotone."""
    sub = subsets_without(v.n, i)
    delta = marginal_vector(v, i)
    outside = sub[~np.isin(delta, (-1.0, 0.0, 1.0))]
    negative = sub[delta == -1.0]
    return DichotomyReport(
        player=i,
        monotone=v.is_monotone(),
        outside_range=tuple(int(s) for s in outside),
        negative=tuple(int(s) for s in negative),
    )
