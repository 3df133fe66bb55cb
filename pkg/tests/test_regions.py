import numpy as np
import pytest

from cifc_regions.dmc import InputPolicy, mi_terms
from cifc_regions.gaussian import CorrelationDomainError, diagonal_rhos, gaussian_mi_terms, rho_grid
from cifc_regions.models import (
    I3_Y3,
    I13_Y1,
    TERM_GROUPS,
    CorrelationPair,
    MissingTermError,
    RateConstraint,
    RatePolytope,
)
from cifc_regions.regions import (
    Scheme,
    boundary_samples,
    contains,
    decoding_constraints,
    dominance_filter,
    gaussian_c1g,
    intersect,
    region_bounds,
    same_region,
    union_over,
    vertices,
)


def polytope(**bounds):
    """Region from keyword bounds such as R1_R3=1.5."""
    coefficients = {"R1": (1, 0, 0), "R2": (0, 1, 0), "R3": (0, 0, 1),
                    "R1_R3": (1, 0, 1), "R2_R3": (0, 1, 1), "R1_R2_R3": (1, 1, 1)}
    return RatePolytope(constraints=[
        RateConstraint(coefficients=coefficients[name], bound=value, label=name.replace("_", "+"))
        for name, value in bounds.items()
    ])


def rounded(points):
    return sorted(tuple(round(float(x), 9) + 0.0 for x in p) for p in points)


@pytest.fixture
def hand_polytope():
    return polytope(R3=1.0, R1_R3=1.5, R2_R3=1.75)


class TestPolytopeGeometry:
    """Test vertices, membership and region equality"""

    def test_hand_polytope_vertices(self, hand_polytope):
        assert rounded(vertices(hand_polytope)) == [
            (0.0, 0.0, 0.0),
            (0.0, 0.0, 1.0),
            (0.0, 0.75, 1.0),
            (0.0, 1.75, 0.0),
            (0.5, 0.0, 1.0),
            (0.5, 0.75, 1.0),
            (1.5, 0.0, 0.0),
            (1.5, 1.75, 0.0),
        ]

    @pytest.mark.parametrize("rate,expected", [
        ((0.5, 0.75, 1.0), True),
        ((1.5, 1.75, 0.0), True),
        ((0.2, 0.2, 0.2), True),
        ((0.6, 0.75, 1.0), False),
        ((0.0, 0.0, 1.1), False),
        ((-0.1, 0.0, 0.0), False),
    ])
    def test_contains(self, hand_polytope, rate, expected):
        assert contains(hand_polytope, rate) is expected

    def test_zero_terms_collapse_to_origin(self):
        terms = {key: 0.0 for key in TERM_GROUPS}
        for scheme in ("thm1", "thm2", "c1", "c2"):
            assert rounded(vertices(region_bounds(terms, scheme))) == [(0.0, 0.0, 0.0)]

    def test_redundant_constraint_keeps_region(self, hand_polytope):
        padded = polytope(R3=1.0, R1_R3=1.5, R2_R3=1.75, R1_R2_R3=10.0)
        smaller = polytope(R3=1.0, R1_R3=1.5, R2_R3=1.7)
        assert same_region(hand_polytope, padded)
        assert not same_region(hand_polytope, smaller)

    def test_random_polytope_vertices_are_members(self):
        rng = np.random.default_rng(17)
        for _ in range(100):
            bounds = dict(zip(("R1", "R2", "R3", "R1_R3", "R2_R3", "R1_R2_R3"), rng.uniform(0, 3, size=6)))
            poly = polytope(**bounds)
            found = vertices(poly)
            assert found
            assert all(contains(poly, v) for v in found)

    def test_boundary_samples_stay_inside(self, hand_polytope):
        samples = boundary_samples(hand_polytope, 3)
        assert samples.shape[1] == 3
        assert len(samples) > len(vertices(hand_polytope))
        assert all(contains(hand_polytope, p, tol=1e-9) for p in samples)


class TestRegionBounds:
    """Test region construction from information terms"""

    def test_strong_sequential_has_three_constraints(self, identity_links):
        terms = mi_terms(identity_links, InputPolicy.uniform((2, 2, 2)))
        poly = region_bounds(terms, Scheme.STRONG_SEQUENTIAL)
        assert [c.label for c in poly.constraints] == ["R3", "R1+R3", "R2+R3"]
        assert poly.scheme == "c2"

    def test_identity_links_joint_region(self, identity_links):
        terms = mi_terms(identity_links, InputPolicy.uniform((2, 2, 2)))
        poly = region_bounds(terms, "thm1")
        assert poly.bound("R3") == pytest.approx(1.0)
        assert poly.bound("R1+R3") == pytest.approx(1.0)
        assert poly.bound("R1+R2+R3") == pytest.approx(2.0)

    def test_min_keeps_first_term_on_ties(self):
        terms = {key: 1.0 for key in TERM_GROUPS}
        poly = region_bounds(terms, "thm1")
        assert poly.constraints[1].terms == [I13_Y1]

    def test_missing_term(self):
        with pytest.raises(MissingTermError):
            region_bounds({I3_Y3: 1.0}, "c2")

    def test_gaussian_scheme_is_separate(self, identity_links):
        terms = mi_terms(identity_links, InputPolicy.uniform((2, 2, 2)))
        with pytest.raises(ValueError):
            region_bounds(terms, "c1g")
        with pytest.raises(ValueError):
            decoding_constraints(terms, "c1")

    @pytest.mark.parametrize("scheme", ["thm1", "thm2"])
    def test_receiver_constraints_intersect_to_region(self, make_random_channel, make_random_policy, scheme):
        # Setup
        rng = np.random.default_rng(23)
        terms = mi_terms(make_random_channel(rng), make_random_policy(rng))

        # Test
        per_receiver = decoding_constraints(terms, scheme)
        combined = intersect([c for group in per_receiver.values() for c in group], scheme)

        # Assert
        assert set(per_receiver) == {"rx1", "rx2", "rx3"}
        expected = region_bounds(terms, scheme)
        assert {c.label: c.bound for c in combined.constraints} == pytest.approx(
            {c.label: c.bound for c in expected.constraints}
        )
        assert same_region(combined, expected)


class TestGaussianRegion:
    """Test the Gaussian capacity region"""

    def test_uncorrelated_bounds(self, worked_example):
        poly = gaussian_c1g(worked_example, 0.0, 0.0)
        assert poly.bound("R3") == pytest.approx(1.0, abs=1e-6)
        assert poly.bound("R1+R3") == pytest.approx(1.543731, abs=1e-6)
        assert poly.bound("R2+R3") == pytest.approx(1.761828, abs=1e-6)

    def test_full_correlation_silences_cognitive_rate(self, worked_example):
        assert gaussian_c1g(worked_example, 0.6, 0.8).bound("R3") == pytest.approx(0.0, abs=1e-12)

    def test_outside_disk(self, worked_example):
        with pytest.raises(CorrelationDomainError):
            gaussian_c1g(worked_example, 0.9, 0.9)

    def test_diagonal_trades_cognitive_rate(self, worked_example):
        regions = [gaussian_c1g(worked_example, rho, rho) for rho in diagonal_rhos(0.05)]
        r3 = [poly.bound("R3") for poly in regions]
        r13 = [poly.bound("R1+R3") for poly in regions]
        r23 = [poly.bound("R2+R3") for poly in regions]
        assert all(np.diff(r3) < 0)
        assert all(np.diff(r13) > 0)
        assert all(np.diff(r23) > 0)

    @pytest.mark.parametrize("rho", [(0.0, 0.0), (0.3, 0.4), (0.5, 0.2)])
    def test_closed_form_matches_information_terms(self, worked_example, rho):
        terms = gaussian_mi_terms(worked_example, CorrelationPair(rho1=rho[0], rho2=rho[1]))
        assert same_region(region_bounds(terms, "c2"), gaussian_c1g(worked_example, *rho), tol=1e-8)


class TestDominanceFilter:
    """Test Pareto filtering of rate triples"""

    def test_removes_dominated_and_duplicates(self):
        points = np.array([[1, 1, 1], [0.5, 1, 1], [1, 1, 1], [2, 0, 0], [0, 0, 0]], dtype=float)
        assert dominance_filter(points).tolist() == [0, 3]

    def test_random_cloud(self):
        # Setup
        rng = np.random.default_rng(31)
        points = rng.random((300, 3))

        # Test
        kept = dominance_filter(points)

        # Assert
        survivors = points[kept]
        for p in survivors:
            assert not np.any(np.all(points >= p, axis=1) & np.any(points > p, axis=1))
        for i in set(range(len(points))) - set(kept.tolist()):
            assert np.any(np.all(survivors >= points[i], axis=1))
        assert dominance_filter(survivors).tolist() == list(range(len(survivors)))

    def test_empty(self):
        assert len(dominance_filter(np.zeros((0, 3)))) == 0


class TestUnionOver:
    """Test unions of sampled regions"""

    def test_single_region_keeps_pareto_vertices(self, hand_polytope):
        union = union_over([(0, hand_polytope)], samples_per_face=2)
        rates = [p.rates for p in union.points]
        assert (0.5, 0.75, 1.0) in rounded(rates)
        assert (1.5, 1.75, 0.0) in rounded(rates)
        assert all(p.tag == 0 for p in union.points)
        assert union.metadata["generators"] == 1

    def test_nested_regions_keep_the_larger(self, hand_polytope):
        half = polytope(R3=0.5, R1_R3=0.75, R2_R3=0.875)
        union = union_over([(1, half), (2, hand_polytope)], metadata={"grid": "nested"}, workers=2)
        assert {p.tag for p in union.points} == {2}
        assert union.metadata["grid"] == "nested"

    def test_gaussian_union_peaks_at_zero_correlation(self, worked_example):
        grid = rho_grid(0.25, "achieving", worked_example, interior=True)
        generators = [(rho.as_tuple(), gaussian_c1g(worked_example, rho.rho1, rho.rho2)) for rho in grid]
        union = union_over(generators)
        top = max(union.points, key=lambda p: p.rates[2])
        assert top.rates[2] == pytest.approx(1.0, abs=1e-9)
        assert top.tag == (0.0, 0.0)

    def test_bad_arguments(self, hand_polytope):
        with pytest.raises(ValueError):
            union_over([])
        with pytest.raises(ValueError):
            union_over([(0, hand_polytope)], samples_per_face=0)
