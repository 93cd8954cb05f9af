"""Randomised checkers for the axioms of cohesion-sensitive values.

Every checker draws seeded trials, measures a deviation per trial and reports
the worst one. A failing report carries a :class:`Witness` holding the exact
inputs of the first violating trial; :func:`recheck` re-evaluates it.

Trial ``t`` of a checker run with seed ``s`` uses ``default_rng([s, t])`` and
``n = n_min + t % (n_max - n_min + 1)``, so results do not depend on the order
in which trials are evaluated.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Any, Callable, Iterable, Literal, Mapping, Sequence

import numpy as np

from .coalitions import (
    Game,
    PlayerSet,
    SimpleGame,
    build_weighted_majority,
    marginal_vector,
    player_subsets,
    popcounts,
    subsets_without,
)
from .cohesion import CohesionStructure, apply_cordon, constant_cohesion, scale_cohesion
from .values import (
    Branch,
    CoalitionDistribution,
    branch_probabilities,
    SizeWeights,
    classical_banzhaf,
    classical_shapley_oracle,
    cohesion_value,
    normalized,
    shapley_size_weights,
)

Verdict = Literal["pass", "fail"]

LINEARITY = "linearity"
DUMMY = "dummy"
SYMMETRY = "symmetry"
SCALE = "scale_invariance"
MONOTONICITY = "cohesion_monotonicity"
LUCE = "luce_odds"
LUCE_SIZE_CLASS = "luce_odds_size_class"
SEPARABILITY = "size_separability"
BENCHMARK = "benchmark"
DICTATORSHIP = "dictatorship"

AXIOMS = (
    LINEARITY,
    DUMMY,
    SYMMETRY,
    SCALE,
    MONOTONICITY,
    LUCE,
    LUCE_SIZE_CLASS,
    SEPARABILITY,
    BENCHMARK,
    DICTATORSHIP,
)

TOLERANCES = {
    LINEARITY: 1e-9,
    DUMMY: 1e-12,
    SYMMETRY: 1e-12,
    SCALE: 1e-10,
    MONOTONICITY: 1e-12,
    LUCE: 1e-9,
    LUCE_SIZE_CLASS: 1e-9,
    SEPARABILITY: 1e-9,
    BENCHMARK: 1e-10,
    DICTATORSHIP: 1e-12,
}

# probabilities must match their benchmark far tighter than values
_PROB_TOL = 1e-12


# ---------------------------------------------------------------------------
# value functionals
# ---------------------------------------------------------------------------

ProbabilityFn = Callable[[CohesionStructure, int], CoalitionDistribution]


@dataclass(frozen=True)
class ValueFunctional:
    """A map ``(v, kappa) -> R^n`` plus what its axiom checks should report.

    ``expected`` maps an axiom id to the verdict the functional must get;
    axioms missing from it are not asserted. ``probabilities`` exposes the
    coalition distribution behind the value, when there is one.
    """

    name: str
    evaluate: Callable[[Game, CohesionStructure], np.ndarray]
    probabilities: ProbabilityFn | None = None
    benchmark: Branch = "shapley"
    expected: Mapping[str, Verdict] = field(default_factory=dict)

    def __call__(self, v: Game, kappa: CohesionStructure) -> np.ndarray:
        return np.asarray(self.evaluate(v, kappa), dtype=float)

    def targets(self) -> tuple[str, ...]:
        return tuple(a for a in AXIOMS if self.expected.get(a) == "fail")


def _weight_rows(
    kappa: CohesionStructure,
    exponents: np.ndarray,
    size_weights: SizeWeights | None,
    transform: Callable[[np.ndarray], np.ndarray] | None = None,
) -> np.ndarray:
    """Unnormalized coalition weights, row ``i`` over ``player_subsets(n)[0][i]``."""
    n = kappa.n
    sub, with_i = player_subsets(n)
    kv = kappa.kappa[with_i]
    pos = kv > 0
    w = np.zeros_like(kv)
    if transform is None:
        w[pos] = (kv ** np.asarray(exponents, dtype=float)[:, None])[pos]
    else:
        w[pos] = transform(kv[pos])
    if size_weights is not None:
        w *= size_weights.as_array()[popcounts(n)[sub]]
    return w


def _row_distribution(kappa: CohesionStructure, i: int, w: np.ndarray) -> CoalitionDistribution:
    sub = player_subsets(kappa.n)[0]
    return CoalitionDistribution(i, kappa.n, sub[i], w[i] / w[i].sum())


def _expected_rows(v: Game, w: np.ndarray) -> np.ndarray:
    sub, with_i = player_subsets(v.n)
    delta = v.worth[with_i] - v.worth[sub]
    return (w * delta).sum(axis=1) / w.sum(axis=1)


_ALL_PASS: dict[str, Verdict] = {a: "pass" for a in AXIOMS}


def cohesion_value_functional(branch: Branch, b: float) -> ValueFunctional:
    """The represented family: cohesion-weighted Banzhaf or Shapley value."""

    def prob(kappa: CohesionStructure, i: int) -> CoalitionDistribution:
        return branch_probabilities(kappa, i, branch, b)

    def evaluate(v: Game, kappa: CohesionStructure) -> np.ndarray:
        return cohesion_value(v, kappa, branch, b).as_array()

    expected = dict(_ALL_PASS)
    if branch == "shapley":
        # size weights distort odds across sizes, never within one size class
        expected[LUCE] = "fail"
    return ValueFunctional(f"cohesion-{branch}(b={b:g})", evaluate, prob, branch, expected)


def normalized_index_functional(branch: Branch, b: float) -> ValueFunctional:
    """Normalized index; efficiency is bought by giving up additivity."""

    def evaluate(v: Game, kappa: CohesionStructure) -> np.ndarray:
        raw = cohesion_value(v, kappa, branch, b).as_array()
        return normalized(raw, v.grand_worth)

    return ValueFunctional(
        f"normalized-{branch}(b={b:g})",
        evaluate,
        None,
        branch,
        {LINEARITY: "fail", DUMMY: "pass", SYMMETRY: "pass", SCALE: "pass", DICTATORSHIP: "pass"},
    )


def zero_functional() -> ValueFunctional:
    return ValueFunctional(
        "zero",
        lambda v, kappa: np.zeros(v.n),
        None,
        "shapley",
        {LINEARITY: "pass", DUMMY: "pass", SYMMETRY: "pass", SCALE: "pass"},
    )


def concentration_penalty(kappa: CohesionStructure) -> float:
    """``sum kappa^2 / (sum kappa)^2 - 1/(2^n - 1)`` over non-empty coalitions.

    Zero on constant structures, invariant under relabelling and scaling.
    """
    k = kappa.kappa[1:]
    return float((k**2).sum() / k.sum() ** 2 - 1.0 / (2**kappa.n - 1))


def countermodel_dummy_perturbation(
    c: float = 1.0, branch: Branch = "banzhaf", b: float = 1.0
) -> ValueFunctional:
    """Base value plus ``c * h(kappa) * v(N)`` for every player."""
    base = cohesion_value_functional(branch, b)

    def evaluate(v: Game, kappa: CohesionStructure) -> np.ndarray:
        return base(v, kappa) + c * concentration_penalty(kappa) * v.grand_worth

    expected = dict(base.expected)
    expected[DUMMY] = "fail"
    # non-dictators are dummies, so dictatorship breaks with dummy; the
    # perturbation may also break cohesion monotonicity
    del expected[DICTATORSHIP]
    del expected[MONOTONICITY]
    return ValueFunctional(
        f"countermodel-dummy-perturbation(c={c:g},{branch})",
        evaluate,
        base.probabilities,
        branch,
        expected,
    )


def countermodel_player_exponents(
    exponents: Sequence[float] | None = None, branch: Branch = "banzhaf"
) -> ValueFunctional:
    """Player-specific exponents ``b_i`` (default ``b_i = i + 1``)."""

    def weights(kappa: CohesionStructure) -> np.ndarray:
        n = kappa.n
        b = np.arange(1.0, n + 1.0) if exponents is None else np.asarray(exponents[:n], float)
        alpha = shapley_size_weights(n) if branch == "shapley" else None
        return _weight_rows(kappa, b, alpha)

    def prob(kappa: CohesionStructure, i: int) -> CoalitionDistribution:
        return _row_distribution(kappa, i, weights(kappa))

    def evaluate(v: Game, kappa: CohesionStructure) -> np.ndarray:
        return _expected_rows(v, weights(kappa))

    expected = dict(_ALL_PASS)
    expected[SYMMETRY] = "fail"
    if branch == "shapley":
        expected[LUCE] = "fail"
    label = "i+1" if exponents is None else ",".join(f"{x:g}" for x in exponents)
    return ValueFunctional(
        f"countermodel-player-exponents(b_i={label},{branch})", evaluate, prob, branch, expected
    )


def countermodel_nonpower_transform(
    transform: Callable[[np.ndarray], np.ndarray] | None = None,
) -> ValueFunctional:
    """``p_i(S) ∝ g(kappa(S+i))`` with a non-power ``g`` (default ``x + x^2``)."""
    g = transform if transform is not None else (lambda x: x + x**2)

    def weights(kappa: CohesionStructure) -> np.ndarray:
        return _weight_rows(kappa, np.ones(kappa.n), None, g)

    def prob(kappa: CohesionStructure, i: int) -> CoalitionDistribution:
        return _row_distribution(kappa, i, weights(kappa))

    def evaluate(v: Game, kappa: CohesionStructure) -> np.ndarray:
        return _expected_rows(v, weights(kappa))

    expected = dict(_ALL_PASS)
    for axiom in (LUCE, LUCE_SIZE_CLASS, SEPARABILITY, SCALE):
        expected[axiom] = "fail"
    return ValueFunctional("countermodel-nonpower-transform(x+x^2)", evaluate, prob, "banzhaf", expected)


def countermodel_constant_sizeweights(b: float = 1.0) -> ValueFunctional:
    """Shapley-branch form with constant size weights ``2^-(n-1)``."""

    def weights(kappa: CohesionStructure) -> np.ndarray:
        return _weight_rows(kappa, np.full(kappa.n, b), SizeWeights.constant(kappa.n))

    def prob(kappa: CohesionStructure, i: int) -> CoalitionDistribution:
        return _row_distribution(kappa, i, weights(kappa))

    def evaluate(v: Game, kappa: CohesionStructure) -> np.ndarray:
        return _expected_rows(v, weights(kappa))

    expected = dict(_ALL_PASS)
    expected[BENCHMARK] = "fail"
    return ValueFunctional(
        f"countermodel-constant-sizeweights(b={b:g})", evaluate, prob, "shapley", expected
    )


def countermodels() -> list[ValueFunctional]:
    return [
        countermodel_dummy_perturbation(),
        countermodel_player_exponents(),
        countermodel_nonpower_transform(),
        countermodel_constant_sizeweights(),
    ]


# ---------------------------------------------------------------------------
# reports and witnesses
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Witness:
    """Inputs of a violating trial; enough to recompute the deviation."""

    axiom: str
    trial: int
    deviation: float
    game: Game
    kappa: CohesionStructure
    other_game: Game | None = None
    kappa_prime: CohesionStructure | None = None
    coefficients: tuple[float, float] | None = None
    permutation: tuple[int, ...] | None = None
    scale: float | None = None
    player: int | None = None
    detail: str = ""

    def payload(self) -> dict[str, Any]:
        out: dict[str, Any] = {
            "trial": self.trial,
            "deviation": self.deviation,
            "n": self.game.n,
            "worth": self.game.worth.tolist(),
            "kappa": self.kappa.kappa.tolist(),
        }
        if self.other_game is not None:
            out["other_worth"] = self.other_game.worth.tolist()
        if self.kappa_prime is not None:
            out["kappa_prime"] = self.kappa_prime.kappa.tolist()
        for key in ("coefficients", "permutation", "scale", "player"):
            val = getattr(self, key)
            if val is not None:
                out[key] = list(val) if isinstance(val, tuple) else val
        if self.detail:
            out["detail"] = self.detail
        return out


@dataclass(frozen=True)
class AxiomReport:
    axiom: str
    functional: str
    verdict: Verdict
    trials: int
    seed: int
    n_range: tuple[int, int]
    max_deviation: float
    tolerance: float
    witness: Witness | None = None
    expected: Verdict | None = None

    @property
    def unexpected(self) -> bool:
        return self.expected is not None and self.verdict != self.expected

    def record(self) -> dict[str, Any]:
        return {
            "axiom": self.axiom,
            "functional": self.functional,
            "verdict": self.verdict,
            "expected": self.expected,
            "trials": self.trials,
            "seed": self.seed,
            "n_range": list(self.n_range),
            "max_deviation": self.max_deviation,
            "tolerance": self.tolerance,
            "witness": None if self.witness is None else self.witness.payload(),
        }

    def summary(self) -> str:
        exp = "" if self.expected is None else f" expected={self.expected}"
        flag = "  <-- UNEXPECTED" if self.unexpected else ""
        return (
            f"{self.functional:<52} {self.axiom:<22} {self.verdict:<4}{exp}"
            f"  trials={self.trials} max_dev={self.max_deviation:.3e}{flag}"
        )


def reports_to_json(reports: Iterable[AxiomReport]) -> str:
    return json.dumps([r.record() for r in reports], indent=2, sort_keys=True) + "\n"


# ---------------------------------------------------------------------------
# random instances
# ---------------------------------------------------------------------------


def _trial_rng(seed: int, trial: int) -> np.random.Generator:
    return np.random.default_rng([seed, trial])


def _trial_n(trial: int, n_range: tuple[int, int]) -> int:
    lo, hi = n_range
    return lo + trial % (hi - lo + 1)


def random_tu_game(rng: np.random.Generator, n: int) -> Game:
    worth = rng.uniform(-1.0, 1.0, 1 << n)
    worth[0] = 0.0
    return Game(PlayerSet.of_size(n), worth)


def random_weighted_majority(rng: np.random.Generator, n: int) -> SimpleGame:
    seats = rng.integers(1, 101, n)
    return build_weighted_majority(PlayerSet.of_size(n), seats, int(seats.sum()) // 2 + 1)


def random_cohesion(rng: np.random.Generator, n: int, zeros: bool = True) -> CohesionStructure:
    """Admissible cohesion; sometimes with zeros on multi-player coalitions."""
    kappa = rng.uniform(0.05, 1.0, 1 << n)
    kappa[0] = 0.0
    if zeros and rng.random() < 0.3:
        multi = popcounts(n) >= 2
        kill = multi & (rng.random(1 << n) < 0.25)
        kappa[kill] = 0.0
    return CohesionStructure(PlayerSet.of_size(n), kappa)


def _dummy_game(rng: np.random.Generator, n: int, i: int) -> Game:
    base = random_tu_game(rng, n).worth
    masks = np.arange(1 << n)
    return Game(PlayerSet.of_size(n), base[masks & ~(1 << i)])


def _dictator_game(rng: np.random.Generator, n: int, d: int) -> SimpleGame:
    seats = rng.integers(1, 101, n).astype(float)
    seats[d] = 0.0
    seats[d] = seats.sum() + rng.integers(1, 50)
    return build_weighted_majority(PlayerSet.of_size(n), seats, float(seats[d]))


# ---------------------------------------------------------------------------
# deviation measures (one per axiom); also used by recheck
# ---------------------------------------------------------------------------


def _dev_linearity(F: ValueFunctional, w: Witness) -> float:
    a, c = w.coefficients
    combo = w.game.linear_combination(a, w.other_game, c)
    lhs = F(combo, w.kappa)
    rhs = a * F(w.game, w.kappa) + c * F(w.other_game, w.kappa)
    return float(np.max(np.abs(lhs - rhs)))


def _dev_dummy(F: ValueFunctional, w: Witness) -> float:
    return float(abs(F(w.game, w.kappa)[w.player]))


def _dev_symmetry(F: ValueFunctional, w: Witness) -> float:
    perm = list(w.permutation)
    before = F(w.game, w.kappa)
    after = F(w.game.permuted(perm), w.kappa.permuted(perm))
    return float(np.max(np.abs(after[perm] - before)))


def _dev_scale(F: ValueFunctional, w: Witness) -> float:
    before = F(w.game, w.kappa)
    after = F(w.game, scale_cohesion(w.kappa, w.scale))
    return float(np.max(np.abs(after - before) / np.maximum(1.0, np.abs(before))))


def _dev_monotonicity(F: ValueFunctional, w: Witness) -> float:
    i = w.player
    return float(max(0.0, F(w.game, w.kappa)[i] - F(w.game, w.kappa_prime)[i]))


def _support_and_sum(dist: CoalitionDistribution, kappa: CohesionStructure) -> float:
    kv = kappa.kappa[dist.masks | (1 << dist.player)]
    dev = abs(float(dist.probs.sum()) - 1.0)
    if np.any(dist.probs < 0):
        dev = max(dev, float(-dist.probs.min()))
    dead = dist.probs[kv == 0]
    if dead.size and np.any(dead != 0):
        dev = max(dev, 1.0)
    return dev


def _power_law_deviation(
    probs: np.ndarray, kv: np.ndarray, base: np.ndarray
) -> tuple[float, float | None]:
    """Worst relative deviation of ``probs / base`` from ``c * kv ** b``.

    ``b`` is fitted from the reference coalition (largest ``base``-weighted
    probability) and the coalition whose cohesion ratio to it is most extreme.
    """
    live = (kv > 0) & (base > 0)
    if not np.any(live):
        return 0.0, None
    q = probs[live] / base[live]
    k = kv[live]
    ref = int(np.argmax(q))
    logk = np.log(k / k[ref])
    far = int(np.argmax(np.abs(logk)))
    if q[ref] <= 0:
        return 1.0, None
    if abs(logk[far]) < 1e-9:
        # all cohesion levels equal: the law demands equal q
        return float(np.max(np.abs(q / q[ref] - 1.0))), None
    if q[far] <= 0:
        return 1.0, None
    b = float(np.log(q[far] / q[ref]) / logk[far])
    predicted = np.exp(b * logk)
    dev = float(np.max(np.abs((q / q[ref]) / predicted - 1.0)))
    if not b > 0:
        dev = max(dev, 1.0)
    return dev, b


def _dev_luce(F: ValueFunctional, w: Witness, size_class: bool = False) -> float:
    kappa = w.kappa
    worst = 0.0
    for i in range(kappa.n):
        dist = F.probabilities(kappa, i)
        worst = max(worst, _support_and_sum(dist, kappa))
        kv = kappa.kappa[dist.masks | (1 << i)]
        ones = np.ones_like(kv)
        if size_class:
            sizes = popcounts(kappa.n)[dist.masks]
            for s in np.unique(sizes):
                sel = sizes == s
                worst = max(worst, _power_law_deviation(dist.probs[sel], kv[sel], ones[sel])[0])
        else:
            worst = max(worst, _power_law_deviation(dist.probs, kv, ones)[0])
    return worst


def _dev_luce_size_class(F: ValueFunctional, w: Witness) -> float:
    return _dev_luce(F, w, size_class=True)


def _dev_separability(F: ValueFunctional, w: Witness) -> float:
    """``p(S) ∝ omega_|S| kappa(S+i)^b``; omega read off the benchmark ``kappa = 1``."""
    kappa = w.kappa
    n = kappa.n
    one = constant_cohesion(kappa.players)
    sizes_all = popcounts(n)
    worst = 0.0
    for i in range(n):
        ref = F.probabilities(one, i)
        sizes = sizes_all[ref.masks]
        omega = np.zeros(n)
        for s in range(n):
            cls = ref.probs[sizes == s]
            omega[s] = cls[0]
            # the benchmark must be flat within each size class
            worst = max(worst, float(np.max(np.abs(cls - cls[0]))) / max(cls[0], 1e-300))
        total = sum(math.comb(n - 1, k) * omega[k] for k in range(n))
        worst = max(worst, abs(total - 1.0))
        dist = F.probabilities(kappa, i)
        worst = max(worst, _support_and_sum(dist, kappa))
        kv = kappa.kappa[dist.masks | (1 << i)]
        worst = max(worst, _power_law_deviation(dist.probs, kv, omega[sizes_all[dist.masks]])[0])
    return worst


def _dev_benchmark(F: ValueFunctional, w: Witness) -> float:
    v = w.game
    one = constant_cohesion(v.players)
    got = F(v, one)
    if F.benchmark == "banzhaf":
        ref = classical_banzhaf(v)
    else:
        ref = classical_shapley_oracle(v)
    dev = float(np.max(np.abs(got - ref)))
    if F.probabilities is not None:
        n = v.n
        if F.benchmark == "banzhaf":
            alpha = SizeWeights.constant(n).as_array()
        else:
            alpha = shapley_size_weights(n).as_array()
        for i in range(n):
            dist = F.probabilities(one, i)
            pdev = float(np.max(np.abs(dist.probs - alpha[popcounts(n)[dist.masks]])))
            # scaled so a probability miss beyond _PROB_TOL registers as a failure
            dev = max(dev, pdev * TOLERANCES[BENCHMARK] / _PROB_TOL)
    return dev


def _dev_dictatorship(F: ValueFunctional, w: Witness) -> float:
    v = w.game
    target = np.zeros(v.n)
    target[w.player] = 1.0
    raw = F(v, w.kappa)
    dev = float(np.max(np.abs(raw - target)))
    dev = max(dev, float(np.max(np.abs(normalized(raw, v.grand_worth) - target))))
    return dev


_DEVIATIONS: dict[str, Callable[[ValueFunctional, Witness], float]] = {
    LINEARITY: _dev_linearity,
    DUMMY: _dev_dummy,
    SYMMETRY: _dev_symmetry,
    SCALE: _dev_scale,
    MONOTONICITY: _dev_monotonicity,
    LUCE: _dev_luce,
    LUCE_SIZE_CLASS: _dev_luce_size_class,
    SEPARABILITY: _dev_separability,
    BENCHMARK: _dev_benchmark,
    DICTATORSHIP: _dev_dictatorship,
}


def recheck(F: ValueFunctional, witness: Witness) -> float:
    """Recompute the deviation stored in ``witness``."""
    return _DEVIATIONS[witness.axiom](F, witness)


# ---------------------------------------------------------------------------
# trial builders
# ---------------------------------------------------------------------------


def _trial_linearity(rng, n, trial):
    return Witness(
        LINEARITY,
        trial,
        0.0,
        random_tu_game(rng, n),
        random_cohesion(rng, n),
        other_game=random_tu_game(rng, n),
        coefficients=tuple(float(x) for x in rng.uniform(-2.0, 2.0, 2)),
    )


def _trial_dummy(rng, n, trial):
    i = int(rng.integers(n))
    return Witness(DUMMY, trial, 0.0, _dummy_game(rng, n, i), random_cohesion(rng, n), player=i)


def _trial_symmetry(rng, n, trial):
    return Witness(
        SYMMETRY,
        trial,
        0.0,
        random_tu_game(rng, n),
        random_cohesion(rng, n),
        permutation=tuple(int(p) for p in rng.permutation(n)),
    )


def _trial_scale(rng, n, trial):
    return Witness(
        SCALE,
        trial,
        0.0,
        random_tu_game(rng, n),
        random_cohesion(rng, n),
        scale=float(10.0 ** rng.uniform(-3.0, 3.0)),
    )


def _trial_monotonicity(rng, n, trial):
    # draw until some player is pivotal somewhere (always true for n >= 2 here)
    v = random_weighted_majority(rng, n)
    kappa = random_cohesion(rng, n)
    order = rng.permutation(n)
    for i in order:
        i = int(i)
        sub = subsets_without(n, i)
        pivotal = sub[marginal_vector(v, i) == 1.0]
        if pivotal.size:
            break
    raised = pivotal[rng.random(pivotal.size) < 0.5]
    if raised.size == 0:
        raised = pivotal[:1]
    new = kappa.kappa.copy()
    new[raised | (1 << i)] += rng.uniform(0.01, 1.0, raised.size)
    kappa_prime = CohesionStructure(kappa.players, new)
    return Witness(MONOTONICITY, trial, 0.0, v, kappa, kappa_prime=kappa_prime, player=i)


def _trial_probabilities(axiom):
    def build(rng, n, trial):
        v = random_tu_game(rng, n)
        return Witness(axiom, trial, 0.0, v, random_cohesion(rng, n))

    return build


def _trial_dictatorship(rng, n, trial):
    d = int(rng.integers(n))
    v = _dictator_game(rng, n, d)
    kappa = random_cohesion(rng, n)
    if rng.random() < 0.3:
        kappa = apply_cordon(kappa, [d])
    return Witness(DICTATORSHIP, trial, 0.0, v, kappa, player=d)


_BUILDERS = {
    LINEARITY: _trial_linearity,
    DUMMY: _trial_dummy,
    SYMMETRY: _trial_symmetry,
    SCALE: _trial_scale,
    MONOTONICITY: _trial_monotonicity,
    LUCE: _trial_probabilities(LUCE),
    LUCE_SIZE_CLASS: _trial_probabilities(LUCE_SIZE_CLASS),
    SEPARABILITY: _trial_probabilities(SEPARABILITY),
    BENCHMARK: _trial_probabilities(BENCHMARK),
    DICTATORSHIP: _trial_dictatorship,
}


def _with_deviation(w: Witness, dev: float) -> Witness:
    return Witness(**{**w.__dict__, "deviation": dev})


def check_axiom(
    axiom: str,
    F: ValueFunctional,
    trials: int = 1000,
    seed: int = 0,
    n_range: tuple[int, int] = (2, 6),
) -> AxiomReport:
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    if axiom not in _BUILDERS:
        raise ValueError(f"unknown axiom {axiom!r}")
    if axiom in (LUCE, LUCE_SIZE_CLASS, SEPARABILITY) and F.probabilities is None:
        raise ValueError(f"{F.name} exposes no coalition probabilities; cannot check {axiom}")
    lo, hi = n_range
    if not 2 <= lo <= hi:
        raise ValueError(f"bad n range {n_range}")
    tol = TOLERANCES[axiom]
    worst = 0.0
    witness = None
    build = _BUILDERS[axiom]
    measure = _DEVIATIONS[axiom]
    for t in range(trials):
        rng = _trial_rng(seed, t)
        w = build(rng, _trial_n(t, n_range), t)
        dev = measure(F, w)
        if not math.isfinite(dev):
            dev = math.inf
        worst = max(worst, dev)
        if witness is None and dev > tol:
            witness = _with_deviation(w, dev)
    return AxiomReport(
        axiom=axiom,
        functional=F.name,
        verdict="fail" if witness is not None else "pass",
        trials=trials,
        seed=seed,
        n_range=(lo, hi),
        max_deviation=worst,
        tolerance=tol,
        witness=witness,
        expected=F.expected.get(axiom),
    )


def check_linearity(F, trials=1000, seed=0, n_range=(2, 6)):
    return check_axiom(LINEARITY, F, trials, seed, n_range)


def check_dummy(F, trials=1000, seed=0, n_range=(2, 6)):
    return check_axiom(DUMMY, F, trials, seed, n_range)


def check_symmetry(F, trials=1000, seed=0, n_range=(2, 6)):
    return check_axiom(SYMMETRY, F, trials, seed, n_range)


def check_scale_invariance(F, trials=1000, seed=0, n_range=(2, 6)):
    return check_axiom(SCALE, F, trials, seed, n_range)


def check_cohesion_monotonicity(F, trials=1000, seed=0, n_range=(2, 6)):
    return check_axiom(MONOTONICITY, F, trials, seed, n_range)


def check_luce_odds(F, trials=1000, seed=0, n_range=(2, 6), within_size_class=False):
    return check_axiom(LUCE_SIZE_CLASS if within_size_class else LUCE, F, trials, seed, n_range)


def check_size_separability(F, trials=1000, seed=0, n_range=(2, 6)):
    return check_axiom(SEPARABILITY, F, trials, seed, n_range)


def check_benchmarks(F, trials=1000, seed=0, n_range=(2, 6)):
    return check_axiom(BENCHMARK, F, trials, seed, n_range)


def check_dictatorship_invariance(F, trials=1000, seed=0, n_range=(2, 6)):
    return check_axiom(DICTATORSHIP, F, trials, seed, n_range)


def run_suite(
    functionals: Sequence[ValueFunctional],
    trials: int = 1000,
    seed: int = 0,
    n_range: tuple[int, int] = (2, 6),
) -> list[AxiomReport]:
    """Every axiom with an expectation, for every functional, in fixed order."""
    reports = []
    for F in functionals:
        for axiom in AXIOMS:
            if axiom not in F.expected:
                continue
            if axiom in (LUCE, LUCE_SIZE_CLASS, SEPARABILITY) and F.probabilities is None:
                continue
            reports.append(check_axiom(axiom, F, trials, seed, n_range))
    return reports


def default_functionals(
    branches: Sequence[Branch] = ("banzhaf", "shapley"),
    exponents: Sequence[float] = (0.5, 1.0, 2.0),
    include_countermodels: bool = False,
) -> list[ValueFunctional]:
    out = [cohesion_value_functional(br, b) for br in branches for b in exponents]
    if include_countermodels:
        out.extend(countermodels())
    return out
