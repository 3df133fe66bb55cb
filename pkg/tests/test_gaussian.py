import math

import numpy as np
import pytest

from cifc_regions.dmc import mi_terms
from cifc_regions.gaussian import (
    CorrelationDomainError,
    ThetaDomainError,
    ab_coefficients,
    cognitive_power,
    correlation,
    diagonal_rhos,
    gaussian_mi_terms,
    quantize_gaussian,
    rho_grid,
    setg_clause_values,
    sum_power,
    swap_users,
    theta,
)
from cifc_regions.models import (
    I1_Y2,
    I1_Y3,
    I2_Y1,
    I2_Y3,
    I3_Y3,
    I13_Y1,
    I13_Y3,
    I23_Y2,
    I23_Y3,
    CorrelationPair,
    GaussianCifcSpec,
)

RHOS = [(0.0, 0.0), (0.3, 0.4), (0.82, 0.57), (-0.5, 0.6)]


def snr(bits):
    return 2 ** (2 * bits) - 1


class TestTheta:
    """Test the Gaussian rate function"""

    @pytest.mark.parametrize("x,expected", [
        (0.0, 0.0),
        (3.0, 1.0),
        (7.5, 1.543731),
        (10.5, 1.761828),
    ])
    def test_values(self, x, expected):
        assert theta(x) == pytest.approx(expected, abs=1e-6)

    def test_negative_argument(self):
        with pytest.raises(ThetaDomainError):
            theta(-0.5)

    def test_round_off_is_clamped(self):
        assert theta(-1e-14) == 0.0

    def test_increasing_and_concave(self):
        xs = np.linspace(0, 50, 501)
        values = np.array([theta(x) for x in xs])
        assert np.all(np.diff(values) > 0)
        assert np.all(np.diff(values, 2) < 0)


class TestCorrelation:
    """Test correlation pair validation"""

    def test_inside_disk(self):
        assert correlation(0.6, 0.8).as_tuple() == (0.6, 0.8)

    @pytest.mark.parametrize("rho1,rho2", [(0.9, 0.9), (1.2, 0.0), (0.0, -1.01)])
    def test_outside_disk(self, rho1, rho2):
        with pytest.raises(CorrelationDomainError):
            correlation(rho1, rho2)


class TestCoefficients:
    """Test the closed-form clause coefficients"""

    def test_ab_at_zero_correlation(self, worked_example):
        ab = ab_coefficients(worked_example, CorrelationPair())
        assert ab["A12"] == pytest.approx(147 / 11.5)
        assert ab["A12"] == pytest.approx(12.7826, abs=1e-4)
        assert ab["B12"] == pytest.approx(27 / 1354)
        assert ab["B12"] == pytest.approx(0.019941, abs=1e-6)

    def test_silent_channel(self):
        spec = GaussianCifcSpec(gains=[[0] * 3] * 3, powers=[1, 1, 1])
        assert all(v == 0 for v in ab_coefficients(spec, CorrelationPair(rho1=0.3)).values())

    def test_clause_values_at_zero_correlation(self, worked_example):
        values = setg_clause_values(worked_example, CorrelationPair())
        assert values["cognitive-gain"] == pytest.approx((1.0, 1.5))
        assert values["rx2-user1-first"] == pytest.approx((7.5, 147 / 11.5))
        assert values["rx3-sees-user1"] == pytest.approx((7.5, 30.0))

    def test_zero_power_gives_equalities(self, worked_example):
        spec = GaussianCifcSpec(gains=worked_example.gains, powers=[0, 0, 0])
        values = setg_clause_values(spec, CorrelationPair(rho1=0.2, rho2=0.3))
        for label, (left, right) in values.items():
            if label != "cognitive-gain":
                assert left == 0 and right == 0

    def test_cognitive_power_vanishes_on_the_circle(self, worked_example):
        assert cognitive_power(worked_example, CorrelationPair(rho1=0.6, rho2=0.8)) == pytest.approx(0.0, abs=1e-12)

    def test_swap_users_exchanges_coefficients(self, worked_example):
        rho = CorrelationPair(rho1=0.3, rho2=0.5)
        original = ab_coefficients(worked_example, rho)
        swapped = ab_coefficients(swap_users(worked_example), CorrelationPair(rho1=0.5, rho2=0.3))
        assert swapped["A12"] == pytest.approx(original["A21"])
        assert swapped["B21"] == pytest.approx(original["B12"])

    @pytest.mark.parametrize("rho", RHOS)
    def test_primary_receiver_ratios_ignore_cognitive_receiver_gains(self, worked_example, rho):
        # Setup
        gains = [[row[0], row[1], 2 * row[2] + 1] for row in worked_example.gains]
        altered = GaussianCifcSpec(gains=gains, powers=worked_example.powers)
        pair = CorrelationPair(rho1=rho[0], rho2=rho[1])

        # Test
        original = ab_coefficients(worked_example, pair)
        changed = ab_coefficients(altered, pair)

        # Assert
        assert changed["A12"] == pytest.approx(original["A12"], rel=1e-12)
        assert changed["A21"] == pytest.approx(original["A21"], rel=1e-12)
        assert changed["B12"] != pytest.approx(original["B12"])


class TestGaussianMiTerms:
    """Test closed-form information terms for Gaussian inputs"""

    @pytest.mark.parametrize("rho", RHOS)
    def test_terms_reproduce_clause_values(self, worked_example, rho):
        pair = CorrelationPair(rho1=rho[0], rho2=rho[1])
        terms = gaussian_mi_terms(worked_example, pair)
        ab = ab_coefficients(worked_example, pair)

        assert snr(terms[I1_Y2]) == pytest.approx(ab["A12"], rel=1e-9)
        assert snr(terms[I2_Y1]) == pytest.approx(ab["A21"], rel=1e-9)
        assert snr(terms[I1_Y3]) == pytest.approx(ab["B12"], rel=1e-9)
        assert snr(terms[I2_Y3]) == pytest.approx(ab["B21"], rel=1e-9)
        assert snr(terms[I13_Y1]) == pytest.approx(sum_power(worked_example, pair, 1, 1), rel=1e-9)
        assert snr(terms[I23_Y2]) == pytest.approx(sum_power(worked_example, pair, 2, 2), rel=1e-9)
        assert snr(terms[I13_Y3]) == pytest.approx(sum_power(worked_example, pair, 1, 3), rel=1e-9)
        assert snr(terms[I23_Y3]) == pytest.approx(sum_power(worked_example, pair, 2, 3), rel=1e-9)
        assert snr(terms[I3_Y3]) == pytest.approx(cognitive_power(worked_example, pair), abs=1e-9)

    def test_terms_are_nonnegative(self, worked_example):
        terms = gaussian_mi_terms(worked_example, CorrelationPair(rho1=-0.7, rho2=0.7))
        assert all(value >= 0 for value in terms.values.values())


class TestRhoGrid:
    """Test correlation grids"""

    def test_disk_domain(self):
        grid = rho_grid(0.5, "disk")
        assert len(grid) == 13
        assert all(math.copysign(1.0, r) > 0 for p in grid for r in p.as_tuple() if r == 0)

    def test_achieving_domain_follows_gain_signs(self, worked_example):
        grid = rho_grid(0.5, "achieving", worked_example)
        assert len(grid) == 6
        assert all(p.rho1 >= 0 and p.rho2 >= 0 for p in grid)

        gains = [list(row) for row in worked_example.gains]
        gains[2][0] = -gains[2][0]
        flipped = GaussianCifcSpec(gains=gains, powers=worked_example.powers)
        assert all(p.rho1 <= 0 and p.rho2 >= 0 for p in rho_grid(0.5, "achieving", flipped))

    def test_interior_excludes_the_circle(self, worked_example):
        grid = rho_grid(0.5, "achieving", worked_example, interior=True)
        assert [p.as_tuple() for p in grid] == [(0.0, 0.0), (0.0, 0.5), (0.5, 0.0), (0.5, 0.5)]

    def test_unit_step_interior_is_origin(self, worked_example):
        grid = rho_grid(1.0, "achieving", worked_example, interior=True)
        assert [p.as_tuple() for p in grid] == [(0.0, 0.0)]

    def test_exact_grid_values(self):
        grid = rho_grid(0.02, "disk")
        assert any(p.as_tuple() == (0.14, -0.98) for p in grid)

    @pytest.mark.parametrize("step", [0.0, -0.1, 1.5])
    def test_bad_step(self, step):
        with pytest.raises(ValueError):
            rho_grid(step, "disk")

    def test_bad_domain_and_missing_spec(self):
        with pytest.raises(ValueError):
            rho_grid(0.1, "square")
        with pytest.raises(ValueError):
            rho_grid(0.1, "achieving")

    def test_diagonal_values(self):
        values = diagonal_rhos(0.05)
        assert values[0] == 0.0
        assert values[-1] == pytest.approx(0.7)
        assert len(values) == 15


class TestQuantizeGaussian:
    """Test the discrete approximation of the Gaussian channel"""

    def test_cognitive_link_approaches_theta(self, worked_example):
        # Setup
        spec, policy = quantize_gaussian(worked_example, (1, 1, 64), (1, 1, 64))

        # Test
        terms = mi_terms(spec, policy)

        # Assert
        assert spec.input_sizes == (1, 1, 64)
        assert terms[I3_Y3] == pytest.approx(theta(3.0), abs=0.05)

    def test_shapes_and_uniform_policy(self, worked_example):
        spec, policy = quantize_gaussian(worked_example, (4, 2, 1), (3, 3, 3))
        assert spec.input_sizes == (4, 2, 1)
        assert spec.output_sizes == (3, 3, 3)
        np.testing.assert_allclose(policy.p1.values, [0.25] * 4)

    def test_levels_must_be_positive(self, worked_example):
        with pytest.raises(ValueError):
            quantize_gaussian(worked_example, (0, 1, 1), (2, 2, 2))
