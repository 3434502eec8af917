import math

import numpy as np
import pytest

from searchbias import (
    AveragedDistribution,
    InformationResource,
    InvalidArgumentError,
    ProbabilityVector,
    ResourceEnsemble,
    ResourceLimitError,
    SearchAlgorithm,
    TargetFunction,
    check_bias_over_distributions,
    check_conservation,
    check_conservation_over_distributions,
    check_famine_distributions,
    check_famine_resources,
    check_famine_targets,
    check_futility,
    check_improbability,
    check_simplex_expectation,
    enumerate_khot,
    sample_uniform_simplex,
    simplex_samples,
)
from searchbias.theorem_harness import one_sided, two_sided


def pv(values):
    return ProbabilityVector(np.asarray(values, dtype=float))


def ensemble_of(count, n, label="r"):
    return ResourceEnsemble(tuple(
        InformationResource(f"{label}{i}", b"", np.zeros(n)) for i in range(count)
    ))


TWO_POINT = [pv([1, 0, 0]), pv([0, 0, 1])]
TWO_POINT_ENS = ensemble_of(2, 3)
E0 = TargetFunction.from_bits([1, 0, 0])


class TestResultContainers:
    def test_one_sided_rule(self):
        assert one_sided("x", 0.5, 0.5, 0.0, "s").satisfied
        assert not one_sided("x", 0.5001, 0.5, 0.0, "s").satisfied
        assert one_sided("x", 0.53, 0.5, 0.01, "s").satisfied  # 3-sigma slack

    def test_two_sided_rule(self):
        assert two_sided("x", 0.49, 0.5, 0.01, "s").satisfied
        assert not two_sided("x", 0.4, 0.5, 0.01, "s").satisfied
        assert not two_sided("x", 0.6, 0.5, 0.01, "s").satisfied

    def test_margin(self):
        assert one_sided("x", 0.2, 0.5, 0.0, "s").margin() == pytest.approx(0.3)


class TestSimplexSampling:
    def test_one_point_simplex(self):
        assert sample_uniform_simplex(1, 0).weights.tolist() == [1.0]

    def test_deterministic(self):
        a = sample_uniform_simplex(5, 7).weights
        b = sample_uniform_simplex(5, 7).weights
        assert np.array_equal(a, b)

    def test_coordinate_moments(self):
        # coordinates of a uniform 3-simplex point are Beta(1,2):
        # mean 1/3, variance 1/18
        samples = simplex_samples(3, 10**5, seed=11)
        se = math.sqrt((1 / 18) / 10**5)
        assert np.abs(samples.mean(axis=0) - 1 / 3).max() <= 3 * se
        assert samples.min() >= 0
        assert np.allclose(samples.sum(axis=1), 1.0, atol=1e-12)

    def test_invalid_dim(self):
        with pytest.raises(InvalidArgumentError):
            sample_uniform_simplex(0, 0)


class TestEnumerateKhot:
    def test_basis_vectors(self):
        got = [t.bits.tolist() for t in enumerate_khot(3, 1)]
        assert got == [[1, 0, 0], [0, 1, 0], [0, 0, 1]]

    def test_counts(self):
        assert sum(1 for _ in enumerate_khot(4, 2)) == 6

    def test_distinct_and_k_hot(self):
        seen = set()
        for t in enumerate_khot(10, 3):
            assert t.k == 3
            seen.add(tuple(t.bits.tolist()))
        assert len(seen) == math.comb(10, 3)

    def test_lexicographic_by_support(self):
        supports = [tuple(t.indices.tolist()) for t in enumerate_khot(5, 2)]
        assert supports == sorted(supports)

    def test_guard_fires_eagerly(self):
        with pytest.raises(ResourceLimitError):
            enumerate_khot(40, 20)


class TestConservation:
    def test_single_element_targets(self):
        res = check_conservation(pv([0.4, 0.3, 0.2, 0.1]), k=1)
        assert res.satisfied and abs(res.empirical) < 1e-12

    def test_uniform_vector_any_k(self):
        for k in (1, 2, 3):
            res = check_conservation(ProbabilityVector.uniform(6), k)
            assert res.satisfied

    def test_hand_enumeration(self):
        # k=2 over [0.7, 0.2, 0.1]: target sums {0.9, 0.8, 0.3}, each
        # minus 2/3, total exactly zero
        res = check_conservation(pv([0.7, 0.2, 0.1]), k=2)
        assert res.satisfied and abs(res.empirical) < 1e-12
        assert res.mc_stderr == 0.0

    def test_holds_for_random_vectors(self):
        rng = np.random.default_rng(5)
        for trial in range(100):
            n = int(rng.integers(3, 13))
            k = int(rng.integers(1, n + 1))
            vec = rng.dirichlet(np.ones(n))
            res = check_conservation(vec, k)
            assert res.satisfied and abs(res.empirical) < 1e-9


class TestImprobability:
    def test_hand_instance(self):
        # q values {0.9, 0.1, 0.2} over n=10, k=1: bias 0.3, cap 0.5
        base = np.full(10, 0.1 / 9)
        rows = []
        for q in (0.9, 0.1, 0.2):
            row = np.full(10, (1.0 - q) / 9)
            row[0] = q
            rows.append(pv(row))
        res = check_improbability(ensemble_of(3, 10),
                                  rows, TargetFunction.from_indices(10, [0]), 0.8)
        assert res.empirical == pytest.approx(1 / 3)
        assert res.bound == pytest.approx(0.5)
        assert res.satisfied and res.mc_stderr == 0.0

    def test_unbiased_sampler_case(self):
        rows = [ProbabilityVector.uniform(8)] * 4
        t = TargetFunction.random(8, 2, seed=0)  # p = 0.25
        res = check_improbability(ensemble_of(4, 8), rows, t, 0.5,
                                  variant="unbiased")
        assert res.empirical == 0.0
        assert res.bound == pytest.approx(0.5)
        assert res.name == "success_tail_bound_unbiased"

    def test_saturated_single_resource(self):
        rows = [pv([1.0, 0.0])]
        t = TargetFunction.from_bits([1, 0])
        res = check_improbability(ensemble_of(1, 2), rows, t, 1.0)
        assert res.empirical == 1.0
        assert res.bound == pytest.approx(1.0)
        assert res.satisfied

    def test_geometric_variant(self):
        base = np.full(10, 0.1 / 9)
        rows = []
        for q in (0.9, 0.1, 0.2):
            row = np.full(10, (1.0 - q) / 9)
            row[0] = q
            rows.append(pv(row))
        res = check_improbability(ensemble_of(3, 10), rows,
                                  TargetFunction.from_indices(10, [0]), 0.8,
                                  variant="geometric")
        assert res.name == "success_tail_bound_geometric"
        assert res.satisfied

    def test_weighted_ensemble(self):
        ens = ResourceEnsemble(
            tuple(InformationResource(f"r{i}", b"", np.zeros(2)) for i in range(2)),
            np.array([0.9, 0.1]),
        )
        rows = [pv([1.0, 0.0]), pv([0.0, 1.0])]
        t = TargetFunction.from_bits([1, 0])
        res = check_improbability(ens, rows, t, 0.9)
        assert res.empirical == pytest.approx(0.9)
        # bias = 0.9 - 0.5; bound = (0.5 + 0.4)/0.9 = 1.0
        assert res.bound == pytest.approx(1.0)

    def test_errors(self):
        with pytest.raises(InvalidArgumentError):
            check_improbability(TWO_POINT_ENS, TWO_POINT, E0, 0.0)
        with pytest.raises(InvalidArgumentError):
            check_improbability(TWO_POINT_ENS, TWO_POINT, E0, 0.5, variant="odd")

    def test_noisy_estimates_widen_slack(self):
        # same point estimate, but stderr near the threshold adds slack
        exact = AveragedDistribution(pv([0.5, 0.5]), 100, np.zeros(2))
        noisy = AveragedDistribution(pv([0.5, 0.5]), 100, np.full(2, 0.03))
        t = TargetFunction.from_bits([1, 0])
        res_exact = check_improbability(ensemble_of(1, 2), [exact], t, 0.5)
        res_noisy = check_improbability(ensemble_of(1, 2), [noisy], t, 0.5)
        assert res_exact.mc_stderr == 0.0
        assert res_noisy.mc_stderr > 0.0


class TestFamineResources:
    def test_single_resource_hand_case(self):
        res = check_famine_resources(ensemble_of(1, 2), [pv([0.7, 0.3])],
                                     TargetFunction.from_bits([1, 0]), 0.5)
        assert res.empirical == 1.0
        assert res.bound == pytest.approx(1.4)
        assert res.satisfied

    def test_unbiased_needle_battery(self):
        rows = [ProbabilityVector.uniform(16)] * 10
        t = TargetFunction.random(16, 4, seed=1)
        res = check_famine_resources(ensemble_of(10, 16), rows, t, 0.5,
                                     variant="unbiased")
        assert res.empirical == 0.0
        assert res.bound == pytest.approx(0.25 / 0.5)
        assert res.satisfied

    def test_fitness_variant_name(self):
        rows = [ProbabilityVector.uniform(4)] * 3
        res = check_famine_resources(ensemble_of(3, 4), rows,
                                     TargetFunction.from_bits([1, 0, 0, 0]),
                                     0.5, variant="fitness")
        assert res.name == "favorable_fitness_proportion"

    def test_ignores_ensemble_weights(self):
        ens = ResourceEnsemble(
            tuple(InformationResource(f"r{i}", b"", np.zeros(2)) for i in range(2)),
            np.array([0.99, 0.01]),
        )
        rows = [pv([1.0, 0.0]), pv([0.0, 1.0])]
        t = TargetFunction.from_bits([1, 0])
        res = check_famine_resources(ens, rows, t, 0.9)
        assert res.empirical == pytest.approx(0.5)  # set proportion, not weighted


class TestFutility:
    def test_uniform_sampler_hits_baseline_exactly(self):
        ens = ResourceEnsemble(tuple(
            InformationResource(f"r{i}", b"", np.sin(np.arange(16.0) + i))
            for i in range(5)
        ))
        t = TargetFunction.random(16, 4, seed=2)
        res = check_futility(SearchAlgorithm.uniform(), ens, t,
                             budget=16, replicates=20, seed=0)
        assert res.empirical == pytest.approx(0.25, abs=1e-12)
        assert res.satisfied

    def test_blind_explorer_matches_baseline(self):
        ens = ResourceEnsemble(tuple(
            InformationResource(f"r{i}", b"", np.cos(np.arange(8.0) * (i + 1)))
            for i in range(5)
        ))
        t = TargetFunction.random(8, 2, seed=3)
        res = check_futility(SearchAlgorithm.greedy(epsilon=1.0, beta=2.0), ens, t,
                             budget=12, replicates=50, seed=1)
        assert res.empirical == pytest.approx(0.25, abs=1e-12)
        assert res.satisfied

    def test_mirrored_needles_cancel(self):
        # positive bias on the needle-at-0 table cancels the negative bias
        # on its relabeled mirror under equal weights
        ens = ResourceEnsemble((
            InformationResource("needle0", b"", np.array([1.0, 0.0, 0.0, 0.0])),
            InformationResource("needle2", b"", np.array([0.0, 0.0, 1.0, 0.0])),
        ))
        t = TargetFunction.from_bits([1, 1, 0, 0])
        res = check_futility(SearchAlgorithm.greedy(epsilon=0.1, beta=3.0), ens, t,
                             budget=16, replicates=3000, seed=7)
        assert res.bound == pytest.approx(0.5)
        assert res.mc_stderr > 0.0
        assert res.satisfied


class TestFamineTargets:
    def test_no_target_clears_threshold(self):
        res = check_famine_targets(pv([0.4, 0.3, 0.2, 0.1]), 1, 0.2)
        assert res.empirical == 0.0
        assert res.bound == pytest.approx(0.25 / 0.45)
        assert res.satisfied

    def test_one_target_clears_threshold(self):
        res = check_famine_targets(pv([0.4, 0.3, 0.2, 0.1]), 1, 0.1)
        assert res.empirical == pytest.approx(0.25)
        assert res.bound == pytest.approx(0.25 / 0.35)
        assert res.satisfied

    def test_uniform_vector_has_no_biased_targets(self):
        res = check_famine_targets(ProbabilityVector.uniform(9), 3, 0.05)
        assert res.empirical == 0.0

    def test_loose_bound_also_holds_on_random_vectors(self):
        from searchbias import famine_target_bound
        rng = np.random.default_rng(9)
        for trial in range(50):
            n = int(rng.integers(4, 12))
            k = int(rng.integers(1, n))
            vec = rng.dirichlet(np.ones(n))
            q_min = float(rng.uniform(0.05, 0.9))
            res = check_famine_targets(vec, k, q_min)
            tight, loose = famine_target_bound(k / n, q_min)
            assert res.satisfied
            assert res.empirical <= loose + 1e-12


class TestFamineDistributions:
    def test_two_point_geometry(self):
        # bias(D) = D(f1) - 1/3 >= 0.5 iff D(f1) >= 5/6: measure 1/6
        res = check_famine_distributions(TWO_POINT_ENS, TWO_POINT, E0, 0.5,
                                         10**5, seed=3)
        assert res.bound == pytest.approx(1.0)
        assert abs(res.empirical - 1 / 6) <= 3 * res.mc_stderr
        assert res.satisfied

    def test_unbiased_set_never_clears_positive_threshold(self):
        rows = [ProbabilityVector.uniform(5)] * 3
        t = TargetFunction.random(5, 2, seed=0)
        res = check_famine_distributions(ensemble_of(3, 5), rows, t, 0.1,
                                         2000, seed=1)
        assert res.empirical == 0.0

    def test_threshold_above_max_bias(self):
        t = TargetFunction.from_bits([1, 0, 0])  # p = 1/3, bias <= 2/3
        res = check_famine_distributions(TWO_POINT_ENS, TWO_POINT, t, 0.7,
                                         2000, seed=2)
        assert res.empirical == 0.0

    def test_sample_floor(self):
        with pytest.raises(InvalidArgumentError):
            check_famine_distributions(TWO_POINT_ENS, TWO_POINT, E0, 0.5,
                                       999, seed=0)


class TestBiasOverDistributions:
    def test_two_point_matches_set_bias(self):
        res = check_bias_over_distributions(TWO_POINT_ENS, TWO_POINT, E0,
                                            10**5, seed=5)
        assert res.bound == pytest.approx(1 / 6, abs=1e-12)
        assert abs(res.empirical - 1 / 6) <= 3 * res.mc_stderr
        assert res.satisfied

    def test_unbiased_set_integrates_to_zero(self):
        rows = [ProbabilityVector.uniform(6)] * 4
        t = TargetFunction.random(6, 2, seed=1)
        res = check_bias_over_distributions(ensemble_of(4, 6), rows, t,
                                            5000, seed=6)
        assert res.bound == pytest.approx(0.0, abs=1e-12)
        assert res.satisfied

    def test_degenerate_single_resource(self):
        rows = [pv([0.6, 0.3, 0.1])]
        t = TargetFunction.from_bits([1, 0, 0])
        res = check_bias_over_distributions(ensemble_of(1, 3), rows, t,
                                            2000, seed=7)
        assert res.empirical == pytest.approx(res.bound, abs=1e-15)
        assert res.mc_stderr == pytest.approx(0.0, abs=1e-15)

    def test_stderr_scales_inverse_sqrt(self):
        a = check_bias_over_distributions(TWO_POINT_ENS, TWO_POINT, E0,
                                          4000, seed=8)
        b = check_bias_over_distributions(TWO_POINT_ENS, TWO_POINT, E0,
                                          16000, seed=9)
        assert b.mc_stderr == pytest.approx(a.mc_stderr / 2, rel=0.2)


class TestConservationOverDistributions:
    def test_shared_samples_cancel_exactly(self):
        rng = np.random.default_rng(11)
        rows = [pv(r) for r in rng.dirichlet(np.ones(4), size=3)]
        res = check_conservation_over_distributions(ensemble_of(3, 4), rows, 2,
                                                    2000, seed=0)
        assert abs(res.empirical) < 1e-12
        assert res.satisfied

    def test_two_point_symmetric(self):
        res = check_conservation_over_distributions(TWO_POINT_ENS, TWO_POINT, 1,
                                                    2000, seed=1)
        assert abs(res.empirical) < 1e-12

    def test_whole_space_target(self):
        rows = [pv([0.2, 0.3, 0.5])]
        res = check_conservation_over_distributions(ensemble_of(1, 3), rows, 3,
                                                    1000, seed=2)
        assert abs(res.empirical) < 1e-12


class TestSimplexExpectation:
    def test_two_point_mixture(self):
        res = check_simplex_expectation(TWO_POINT, np.array([0.5, 0.5]))
        assert res.satisfied and res.empirical < 1e-12

    def test_point_mass_weights_recover_member(self):
        res = check_simplex_expectation(TWO_POINT, np.array([0.0, 1.0]))
        assert res.satisfied

    def test_many_random_mixtures(self):
        rng = np.random.default_rng(12)
        rows = [pv(r) for r in rng.dirichlet(np.ones(7), size=100)]
        weights = rng.dirichlet(np.ones(100))
        res = check_simplex_expectation(rows, weights)
        assert res.satisfied and res.empirical < 1e-9

    def test_invalid_weights(self):
        with pytest.raises(InvalidArgumentError):
            check_simplex_expectation(TWO_POINT, np.array([0.5, 0.6]))


def test_markov_bounds_never_violated_on_exact_instances():
    # with exact averaged distributions the caps are mathematical truths;
    # a violation can only mean the formulas are wrong
    rng = np.random.default_rng(13)
    for trial in range(60):
        n = int(rng.integers(3, 12))
        size = int(rng.integers(1, 7))
        k = int(rng.integers(1, n + 1))
        rows = [pv(r) for r in rng.dirichlet(np.full(n, 0.4), size=size)]
        t = TargetFunction.random(n, k, seed=trial)
        ens = ensemble_of(size, n)
        for q_min in (0.1, 0.3, 0.5, 0.7, 0.9):
            assert check_improbability(ens, rows, t, q_min).satisfied
            assert check_famine_resources(ens, rows, t, q_min).satisfied
            assert check_improbability(ens, rows, t, q_min,
                                       variant="geometric").satisfied
