from __future__ import annotations

import itertools
import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cohesion_power.coalitions import (
    Game,
    PlayerSet,
    build_weighted_majority,
    dictator_game,
)
from cohesion_power.cohesion import (
    CohesionStructure,
    IdeologyProfile,
    InadmissibleCohesionError,
    apply_cordon,
    constant_cohesion,
    explicit_cohesion,
    range_cohesion,
    scale_cohesion,
)
from cohesion_power.values import (
    DegenerateDenominatorError,
    SizeWeights,
    banzhaf_probabilities,
    classical_banzhaf,
    classical_shapley_oracle,
    cohesion_index,
    cohesion_value,
    cohesion_weight,
    normalize_index,
    normalized,
    shapley_probabilities,
    shapley_size_weights,
)

WENDE = PlayerSet(("CDU/CSU", "SPD", "FDP"))


def wende(fdp=5.5):
    v = build_weighted_majority(WENDE, [226, 218, 53], 249)
    k = range_cohesion(IdeologyProfile(WENDE, (7.0, 3.0, fdp)))
    return v, k


def majority3():
    return build_weighted_majority(PlayerSet.of_size(3), [1, 1, 1], 2)


def reference_value(worth, kappa, n, branch, b):
    """Textbook form with frozensets: sum_S p_i(S) (v(S+i) - v(S))."""

    def mask(s):
        return sum(1 << j for j in s)

    def cw(x):
        return 0.0 if x == 0 else x**b

    out = []
    for i in range(n):
        others = [j for j in range(n) if j != i]
        num = den = 0.0
        for r in range(n):
            alpha = math.factorial(r) * math.factorial(n - r - 1) / math.factorial(n) if branch == "shapley" else 1.0
            for combo in itertools.combinations(others, r):
                s = frozenset(combo)
                w = alpha * cw(kappa[mask(s | {i})])
                num += w * (worth[mask(s | {i})] - worth[mask(s)])
                den += w
        out.append(num / den)
    return np.array(out)


def random_instance(rng, n, zeros=True):
    worth = rng.uniform(-1, 1, 1 << n)
    worth[0] = 0.0
    kappa = rng.uniform(0.05, 1.0, 1 << n)
    if zeros:
        kappa[rng.random(1 << n) < 0.3] = 0.0
    kappa[0] = 0.0
    for i in range(n):
        kappa[1 << i] = rng.uniform(0.1, 1.0)
    players = PlayerSet.of_size(n)
    return Game(players, worth), CohesionStructure(players, kappa)


class TestSizeWeights:
    def test_small_cases(self):
        assert shapley_size_weights(3).alpha == pytest.approx((1 / 3, 1 / 6, 1 / 3))
        assert shapley_size_weights(2).alpha == pytest.approx((0.5, 0.5))

    @pytest.mark.parametrize("n", range(2, 13))
    def test_normalization(self, n):
        a = shapley_size_weights(n).alpha
        assert sum(math.comb(n - 1, k) * x for k, x in enumerate(a)) == pytest.approx(1.0, abs=1e-12)

    def test_invalid(self):
        with pytest.raises(ValueError):
            SizeWeights((0.5, 0.6))
        with pytest.raises(ValueError):
            SizeWeights((1.5, -0.5))
        with pytest.raises(ValueError):
            shapley_size_weights(1)


class TestCohesionWeight:
    def test_table(self):
        assert cohesion_weight(0.0, 0.0) == 0.0
        assert cohesion_weight(0.4, 1.0) == 0.4
        assert cohesion_weight(0.9, 0.0) == 1.0
        assert cohesion_weight(0.0, 2.5) == 0.0


class TestProbabilities:
    @pytest.mark.parametrize("n", [2, 3, 5])
    @pytest.mark.parametrize("b", [0.0, 0.5, 1.0, 3.0])
    def test_banzhaf_uniform_at_constant(self, n, b):
        k = constant_cohesion(PlayerSet.of_size(n))
        for i in range(n):
            d = banzhaf_probabilities(k, i, b)
            np.testing.assert_allclose(d.probs, 1 / 2 ** (n - 1), atol=1e-15)

    def test_banzhaf_two_players_by_hand(self):
        k = explicit_cohesion(PlayerSet.of_size(2), {0b11: 3.0})
        d = banzhaf_probabilities(k, 0, 1.0)
        assert d[0] == pytest.approx(0.25)
        assert d[0b10] == pytest.approx(0.75)
        with pytest.raises(KeyError):
            d[0b01]

    def test_shapley_at_constant_is_size_weights(self):
        k = constant_cohesion(PlayerSet.of_size(3))
        d = shapley_probabilities(k, 0, 1.0)
        assert d.as_dict() == pytest.approx({0: 1 / 3, 0b010: 1 / 6, 0b100: 1 / 6, 0b110: 1 / 3})

    def test_wende_cdu_denominator_and_pivotal_mass(self):
        v, k = wende()
        alpha = shapley_size_weights(3).alpha
        # raw weights: {}: 1/3, {SPD}: 0.2/6, {FDP}: 0.4/6, {SPD,FDP}: 0.2/3
        raw = [alpha[0] * 1.0, alpha[1] * 0.2, alpha[1] * 0.4, alpha[2] * 0.2]
        assert sum(raw) == pytest.approx(0.5)
        d = shapley_probabilities(k, 0, 1.0)
        pivotal = d[0b010] + d[0b100]
        assert pivotal * 0.5 == pytest.approx(0.1)

    @pytest.mark.parametrize("a", [3.0, 1e-3, 250.0])
    def test_scale_leaves_distribution(self, a):
        _, k = wende()
        for fn in (banzhaf_probabilities, shapley_probabilities):
            np.testing.assert_allclose(fn(k, 1, 1.7).probs, fn(scale_cohesion(k, a), 1, 1.7).probs, atol=1e-12)

    def test_support_clause(self):
        rng = np.random.default_rng(7)
        _, k = random_instance(rng, 5)
        for i in range(5):
            d = banzhaf_probabilities(k, i, 1.3)
            zero = k.kappa[d.masks | (1 << i)] == 0
            assert np.all(d.probs[zero] == 0.0)
            assert d.probs.sum() == pytest.approx(1.0, abs=1e-12)

    def test_inadmissible_rejected(self):
        k = explicit_cohesion(PlayerSet.of_size(3), {0b011: 1.0, 0b001: 0.0})
        with pytest.raises(InadmissibleCohesionError):
            banzhaf_probabilities(k, 2, 1.0)

    def test_exponent_bounds(self):
        _, k = wende()
        with pytest.raises(ValueError):
            banzhaf_probabilities(k, 0, -0.1)
        with pytest.raises(ValueError):
            banzhaf_probabilities(k, 0, 65.0)

    def test_degenerate_denominator(self):
        # underflow of every weight, including the singleton's: cannot normalize
        players = PlayerSet.of_size(2)
        k = CohesionStructure(players, np.array([0.0, 1e-300, 1e-300, 1e-300]))
        with pytest.raises(DegenerateDenominatorError):
            shapley_probabilities(k, 0, 64.0)


class TestCohesionValue:
    @pytest.mark.parametrize("branch", ["banzhaf", "shapley"])
    @pytest.mark.parametrize("b", [0.0, 0.5, 1.0, 2.5])
    def test_matches_reference(self, branch, b):
        rng = np.random.default_rng(11)
        for n in (2, 3, 4, 5):
            v, k = random_instance(rng, n)
            got = cohesion_value(v, k, branch, b).as_array()
            ref = reference_value(v.worth, k.kappa, n, branch, b)
            np.testing.assert_allclose(got, ref, atol=1e-12)

    def test_wende_unnormalized(self):
        v, k = wende()
        prof = cohesion_value(v, k, "shapley", 1.0)
        assert prof.values == pytest.approx((0.2, 1 / 5.94, 0.2222222), abs=1e-4)
        assert prof.as_dict()["CDU/CSU"] == pytest.approx(0.2)
        assert not prof.normalized

    @pytest.mark.parametrize("branch", ["banzhaf", "shapley"])
    def test_dictator(self, branch):
        rng = np.random.default_rng(3)
        players = PlayerSet.of_size(5)
        v = dictator_game(players, 3)
        _, k = random_instance(rng, 5)
        k = apply_cordon(k, [3])
        assert cohesion_value(v, k, branch, 1.3).values == pytest.approx((0, 0, 0, 1, 0), abs=1e-12)

    def test_majority3_classical(self):
        k = constant_cohesion(PlayerSet.of_size(3))
        assert cohesion_value(majority3(), k, "shapley", 1.0).values == pytest.approx((1 / 3,) * 3)
        assert cohesion_value(majority3(), k, "banzhaf", 1.0).values == pytest.approx((0.5,) * 3)

    def test_bounds_on_monotone_simple_games(self):
        rng = np.random.default_rng(5)
        for _ in range(20):
            n = int(rng.integers(2, 7))
            v = build_weighted_majority(PlayerSet.of_size(n), rng.integers(1, 100, n), 1)
            _, k = random_instance(rng, n)
            vals = cohesion_value(v, k, "shapley", 2.0).as_array()
            assert np.all((vals >= 0) & (vals <= 1))

    def test_banzhaf_rejects_size_weights(self):
        v, k = wende()
        with pytest.raises(ValueError):
            cohesion_value(v, k, "banzhaf", 1.0, alpha=shapley_size_weights(3))

    def test_unknown_branch(self):
        v, k = wende()
        with pytest.raises(ValueError):
            cohesion_value(v, k, "owen", 1.0)

    def test_underflow_warning(self):
        v, k = wende()
        tiny = CohesionStructure(WENDE, np.where(k.kappa == 0.2, 1e-10, k.kappa))
        prof = cohesion_value(v, tiny, "shapley", 40.0)
        assert prof.warnings and "underflowed" in prof.warnings[0]
        assert cohesion_value(v, k, "shapley", 1.0).warnings == ()


class TestNormalization:
    def test_wende(self):
        v, k = wende()
        assert cohesion_index(v, k, "shapley", 1.0).values == pytest.approx((0.339, 0.285, 0.376), abs=0.002)
        v, k = wende(6.5)
        assert cohesion_index(v, k, "shapley", 1.0).values == pytest.approx((0.387, 0.218, 0.394), abs=0.002)

    def test_zero_fallback(self):
        players = PlayerSet(("NFP", "Ensemble", "LR", "RN", "Others"))
        v = build_weighted_majority(players, [195, 162, 49, 139, 32], 289)
        base = range_cohesion(IdeologyProfile(players, (2.10, 6.26, 7.88, 9.60, 5.00)))
        k = apply_cordon(base, [0, 3])
        for b in (0.0, 0.5, 1.0, 3.0):
            prof = cohesion_index(v, k, "shapley", b)
            assert prof.values == (0.0,) * 5
            assert prof.zero_fallback and prof.normalized

    def test_dictator_normalized(self):
        v = dictator_game(PlayerSet.of_size(4), 0)
        prof = cohesion_index(v, constant_cohesion(v.players), "banzhaf", 1.0)
        assert prof.values == (1.0, 0.0, 0.0, 0.0)

    def test_grand_worth_scaling(self):
        rng = np.random.default_rng(2)
        v, k = random_instance(rng, 4)
        prof = normalize_index(cohesion_value(v, k, "shapley", 1.0), v.grand_worth)
        if not prof.zero_fallback:
            assert sum(prof.values) == pytest.approx(v.grand_worth, abs=1e-10)

    @settings(max_examples=100, deadline=None)
    @given(st.lists(st.floats(-10, 10, allow_nan=False), min_size=2, max_size=8), st.floats(0.1, 5))
    def test_normalized_helper(self, vals, g):
        out = normalized(vals, g)
        if abs(sum(vals)) < 1e-12:
            assert np.all(out == 0)
        elif abs(sum(vals)) > 1e-6:
            assert out.sum() == pytest.approx(g, rel=1e-9)


class TestClassicalOracles:
    def test_bundestag(self):
        players = PlayerSet(("CDU/CSU", "AfD", "SPD", "Grüne", "Linke"))
        v = build_weighted_majority(players, [208, 152, 120, 85, 64], 316)
        np.testing.assert_allclose(classical_shapley_oracle(v), [0.4, 7 / 30, 7 / 30, 1 / 15, 1 / 15], atol=1e-12)

    def test_dictator_and_majority(self):
        assert classical_shapley_oracle(dictator_game(PlayerSet.of_size(4), 1)).tolist() == [0, 1, 0, 0]
        np.testing.assert_allclose(classical_shapley_oracle(majority3()), [1 / 3] * 3)
        np.testing.assert_allclose(classical_banzhaf(majority3()), [0.5] * 3)

    def test_oracle_size_cap(self):
        v = dictator_game(PlayerSet.of_size(11), 0)
        with pytest.raises(ValueError):
            classical_shapley_oracle(v)

    @pytest.mark.parametrize("n", [2, 3, 4, 5, 6])
    def test_branches_reduce_to_classical(self, n):
        rng = np.random.default_rng(n)
        ones = constant_cohesion(PlayerSet.of_size(n))
        for _ in range(10):
            v, _ = random_instance(rng, n)
            np.testing.assert_allclose(cohesion_value(v, ones, "shapley", 1.0).as_array(), classical_shapley_oracle(v), atol=1e-10)
            np.testing.assert_allclose(cohesion_value(v, ones, "banzhaf", 2.0).as_array(), classical_banzhaf(v), atol=1e-12)


class TestPropertiesOnSimpleGames:
    """Scale and symmetry spot checks; the randomized suite lives in test_axioms."""

    @settings(max_examples=40, deadline=None)
    @given(st.integers(2, 6), st.integers(0, 2**32 - 1), st.floats(0.01, 100))
    def test_scale_invariance(self, n, seed, a):
        rng = np.random.default_rng(seed)
        v, k = random_instance(rng, n)
        with warnings.catch_warnings():
            warnings.simplefilter("error")
            for branch in ("banzhaf", "shapley"):
                x = cohesion_value(v, k, branch, 1.5).as_array()
                y = cohesion_value(v, scale_cohesion(k, a), branch, 1.5).as_array()
                np.testing.assert_allclose(x, y, rtol=1e-10, atol=1e-13)

    def test_premise_three_violation_can_lower_value(self):
        """Raising cohesion on a coalition where i is not pivotal can reduce F_i."""
        players = PlayerSet(("A", "B", "C"))
        v = build_weighted_majority(players, [45, 35, 20], 51)
        k = explicit_cohesion(players, {0b011: 0.2, 0b101: 0.05, 0b110: 0.9, 0b111: 0.1})
        before = cohesion_value(v, k, "shapley", 1.0)["A"]
        # A is not pivotal when joining {B, C}: raise kappa(ABC) only
        k2 = explicit_cohesion(players, {0b011: 0.2, 0b101: 0.05, 0b110: 0.9, 0b111: 1.0})
        after = cohesion_value(v, k2, "shapley", 1.0)["A"]
        assert after < before
