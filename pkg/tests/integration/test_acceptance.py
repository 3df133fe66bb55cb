"""Long-running property sweeps over random channels and the simulator."""

import itertools

import numpy as np
import pytest

from cifc_regions.conditions import check_set1_at, check_set2_at, check_terms
from cifc_regions.dmc import CifcDmcSpec, InputPolicy, mi_terms
from cifc_regions.regions import contains, region_bounds, same_region
from cifc_regions.simulation import SimConfig, estimate_errors

pytestmark = pytest.mark.slow


def common_view(rng):
    """Every receiver sees the primary pair through the same injective map; X3 is constant."""
    a, b = rng.integers(2, 4, size=2)
    labels = rng.permutation(a * b)
    law = np.zeros((a, b, 1, a * b, a * b, a * b))
    for x1, x2 in itertools.product(range(a), range(b)):
        k = labels[x1 * b + x2]
        law[x1, x2, 0, k, k, k] = 1.0
    return CifcDmcSpec.from_array(law)


def random_pairs(make_random_channel, make_random_policy, count=500, seed=2024):
    """Random binary/ternary channels with one random policy each, plus common-view channels."""
    rng = np.random.default_rng(seed)
    pairs = []
    for k in range(count):
        if k % 5 == 0:
            spec = common_view(rng)
            policy = make_random_policy(rng, sizes=spec.input_sizes)
        else:
            sizes = tuple(int(s) for s in rng.integers(2, 4, size=3))
            outputs = tuple(int(s) for s in rng.integers(2, 4, size=3))
            spec = make_random_channel(rng, sizes=sizes, outputs=outputs)
            policy = make_random_policy(rng, sizes=sizes)
        pairs.append((spec, policy))
    return pairs


class TestConditionImplication:
    """Test that the sequential set is the stronger one"""

    def test_sequential_pass_implies_joint_pass(self, make_random_channel, make_random_policy):
        sequential_passes = 0
        for spec, policy in random_pairs(make_random_channel, make_random_policy):
            terms = mi_terms(spec, policy)
            if check_terms(terms, "Set2").overall_pass:
                sequential_passes += 1
                assert check_terms(terms, "Set1").overall_pass
        assert sequential_passes >= 100

    def test_implication_is_one_way(self):
        # Setup
        law = np.zeros((2, 2, 1, 2, 2, 2))
        for x1, x2 in itertools.product(range(2), repeat=2):
            y = x1 ^ x2
            law[x1, x2, 0, y, y, y] = 1.0
        spec = CifcDmcSpec.from_array(law)
        policy = InputPolicy.uniform((2, 2, 1))

        # Test
        joint = check_set1_at(spec, policy)
        sequential = check_set2_at(spec, policy)

        # Assert
        assert joint.overall_pass
        assert not sequential.overall_pass


class TestRegionCollapse:
    """Test that strong interference removes the cross-receiver bounds"""

    def test_joint_and_sequential_regions_collapse(self, make_random_channel, make_random_policy):
        checked = 0
        for spec, policy in random_pairs(make_random_channel, make_random_policy, seed=7):
            terms = mi_terms(spec, policy)
            if check_terms(terms, "Set1").overall_pass:
                checked += 1
                assert same_region(region_bounds(terms, "thm1"), region_bounds(terms, "c1"))
            if check_terms(terms, "Set2").overall_pass:
                assert same_region(region_bounds(terms, "thm2"), region_bounds(terms, "c2"))
        assert checked >= 100


class TestSimulatorSeparation:
    """Test error rates inside and outside the joint-decoding region"""

    def test_inside_and_outside(self, identity_links):
        # Setup
        policy = InputPolicy.uniform((2, 2, 2))
        region = region_bounds(mi_terms(identity_links, policy), "thm1")
        inside, outside = (0.25, 0.25, 0.25), (0.25, 0.25, 10 / 12)
        assert all(
            region.bound(c.label) - float(np.dot(c.coefficients, inside)) >= 0.1 for c in region.constraints
        )
        assert float(np.sum(outside)) - region.bound("R1+R2+R3") >= 0.3
        assert not contains(region, outside)

        # Test
        good = estimate_errors(SimConfig(
            spec=identity_links, policy=policy, n=12, rates=inside, trials=2000, seed=1,
        ))
        bad = estimate_errors(SimConfig(
            spec=identity_links, policy=policy, n=12, rates=outside, trials=500, seed=1,
        ))

        # Assert
        assert good.error_rate < 0.1
        assert bad.error_rate > 0.3
        assert bad.codebook_sizes == (8, 8, 1024)

    def test_error_falls_with_block_length_inside_the_region(self, identity_links):
        # Setup
        policy = InputPolicy.uniform((2, 2, 2))

        # Test
        errors = [
            estimate_errors(SimConfig(
                spec=identity_links, policy=policy, n=n, rates=(0.25, 0.25, 0.25), trials=3000, seed=4,
            )).error_rate
            for n in (4, 8, 12)
        ]

        # Assert
        for shorter, longer in zip(errors, errors[1:]):
            assert longer <= shorter + 0.01
        assert errors[-1] < errors[0]

    def test_fixed_seed_is_reproducible(self, identity_links):
        config = SimConfig(
            spec=identity_links, policy=InputPolicy.uniform((2, 2, 2)), n=8,
            rates=(0.25, 0.25, 0.25), trials=500, seed=77,
        )
        assert estimate_errors(config, workers=1) == estimate_errors(config, workers=8)


class TestPointwiseCheckers:
    """Test the pointwise checkers agree with the term-level evaluation"""

    def test_pointwise_matches_terms(self, make_random_channel, make_random_policy):
        for spec, policy in random_pairs(make_random_channel, make_random_policy, count=50, seed=3):
            terms = mi_terms(spec, policy)
            assert check_set1_at(spec, policy) == check_terms(terms, "Set1")
            assert check_set2_at(spec, policy) == check_terms(terms, "Set2")
