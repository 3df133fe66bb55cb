"""Closed-form quantities of the Gaussian three-user cognitive channel.

Noise variance is fixed at 1 at every receiver. The primary inputs are
independent; the cognitive input X3 has correlation rho_u with X_u.
"""

import logging
import math
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.stats import norm

from .dmc import CifcDmcSpec, InputPolicy
from .models import TERM_GROUPS, CorrelationPair, GaussianCifcSpec, MiTermsReport

logger = logging.getLogger(__name__)

GRID_TOL = 1e-12

DOMAINS = ("achieving", "disk")


class ThetaDomainError(ValueError):
    """theta was called with a negative argument."""


class CorrelationDomainError(ValueError):
    """Correlation pair outside the closed unit disk."""


def theta(x: float) -> float:
    """Gaussian rate function 0.5 * log2(1 + x) in bits.

    Raises:
        ThetaDomainError: If x is negative beyond round-off.
    """
    if x < 0:
        if x < -GRID_TOL:
            raise ThetaDomainError(f"theta needs a nonnegative argument, got {x}")
        x = 0.0
    return 0.5 * math.log2(1.0 + x)


def correlation(rho1: float, rho2: float) -> CorrelationPair:
    """Validated correlation pair.

    Raises:
        CorrelationDomainError: If rho1^2 + rho2^2 > 1 or a value is outside [-1, 1].
    """
    if abs(rho1) > 1 or abs(rho2) > 1 or rho1 ** 2 + rho2 ** 2 > 1 + GRID_TOL:
        raise CorrelationDomainError(f"(rho1, rho2) = ({rho1}, {rho2}) lies outside the unit disk")
    return CorrelationPair(rho1=rho1, rho2=rho2)


def _rho(rho: CorrelationPair, user: int) -> float:
    return rho.rho1 if user == 1 else rho.rho2


def _ratio(spec: GaussianCifcSpec, rho: CorrelationPair, i: int, j: int, receiver: int) -> float:
    """Signal of user i over interference-plus-noise of user j and X3 at a receiver."""
    p_i, p_j, p3 = spec.power(i), spec.power(j), spec.power(3)
    signal = (spec.h(i, receiver) * math.sqrt(p_i) + spec.h(3, receiver) * _rho(rho, i) * math.sqrt(p3)) ** 2
    noise = (
        spec.h(j, receiver) ** 2 * p_j
        + spec.h(3, receiver) ** 2 * p3 * (1 - _rho(rho, i) ** 2)
        + 2 * spec.h(j, receiver) * spec.h(3, receiver) * _rho(rho, j) * math.sqrt(p_j * p3)
        + 1
    )
    return signal / noise


def ab_coefficients(spec: GaussianCifcSpec, rho: CorrelationPair) -> Dict[str, float]:
    """A_ij compare user i at Rx j; B_ij compare user i at Rx3 against user j."""
    return {
        "A12": _ratio(spec, rho, 1, 2, 2),
        "A21": _ratio(spec, rho, 2, 1, 1),
        "B12": _ratio(spec, rho, 1, 2, 3),
        "B21": _ratio(spec, rho, 2, 1, 3),
    }


def sum_power(spec: GaussianCifcSpec, rho: CorrelationPair, user: int, receiver: int) -> float:
    """Received power of (X_user, X3) at a receiver once the other primary input is known."""
    other = 2 if user == 1 else 1
    p_u, p3 = spec.power(user), spec.power(3)
    return (
        spec.h(user, receiver) ** 2 * p_u
        + spec.h(3, receiver) ** 2 * p3 * (1 - _rho(rho, other) ** 2)
        + 2 * spec.h(user, receiver) * spec.h(3, receiver) * _rho(rho, user) * math.sqrt(p_u * p3)
    )


def cognitive_power(spec: GaussianCifcSpec, rho: CorrelationPair, receiver: int = 3) -> float:
    """Power of the part of X3 not explained by (X1, X2) at a receiver."""
    return spec.h(3, receiver) ** 2 * spec.power(3) * max(0.0, 1 - rho.rho1 ** 2 - rho.rho2 ** 2)


def setg_clause_values(spec: GaussianCifcSpec, rho: CorrelationPair) -> Dict[str, Tuple[float, float]]:
    """Left and right values of every Gaussian strong-interference clause.

    Each min on a right-hand side is split into one clause per term. The
    user-2 bound at Rx3 uses h23^2 * P2, the mirror image of user 1's h13^2 * P1.
    """
    ab = ab_coefficients(spec, rho)
    left1 = sum_power(spec, rho, 1, 1)
    left2 = sum_power(spec, rho, 2, 2)
    return {
        "cognitive-gain": (spec.h(3, 3) ** 2, min(spec.h(3, 1) ** 2, spec.h(3, 2) ** 2)),
        "rx2-user1-first": (left1, ab["A12"]),
        "rx3-sees-user1": (left1, sum_power(spec, rho, 1, 3)),
        "rx1-user2-first": (left2, ab["A21"]),
        "rx3-sees-user2": (left2, sum_power(spec, rho, 2, 3)),
        "rx3-order-user1": (ab["A12"], ab["B12"]),
        "rx3-order-user2": (ab["A21"], ab["B21"]),
    }


def _covariance(spec: GaussianCifcSpec, rho: CorrelationPair) -> np.ndarray:
    p1, p2, p3 = spec.powers
    c1 = rho.rho1 * math.sqrt(p1 * p3)
    c2 = rho.rho2 * math.sqrt(p2 * p3)
    return np.array([[p1, 0.0, c1], [0.0, p2, c2], [c1, c2, p3]])


def _conditional_variance(cov: np.ndarray, gains: np.ndarray, known: Sequence[int]) -> float:
    if known:
        idx = list(known)
        cross = cov[:, idx]
        cov = cov - cross @ np.linalg.pinv(cov[np.ix_(idx, idx)]) @ cross.T
    return float(gains @ cov @ gains) + 1.0


def gaussian_mi_terms(spec: GaussianCifcSpec, rho: CorrelationPair) -> MiTermsReport:
    """Every information term for zero-mean jointly Gaussian inputs."""
    cov = _covariance(spec, rho)
    index = {"X1": 0, "X2": 1, "X3": 2}
    values = {}
    for key, (group_a, group_b, group_c) in TERM_GROUPS.items():
        receiver = int(group_b[0][1])
        gains = np.array([spec.h(t, receiver) for t in (1, 2, 3)])
        known = [index[label] for label in group_c]
        both = known + [index[label] for label in group_a]
        before = _conditional_variance(cov, gains, known)
        after = _conditional_variance(cov, gains, both)
        values[key] = max(0.0, 0.5 * math.log2(before / after))
    return MiTermsReport(values=values)


def swap_users(spec: GaussianCifcSpec) -> GaussianCifcSpec:
    """Exchange users 1 and 2 at both transmitters and receivers."""
    order = (1, 0, 2)
    gains = tuple(tuple(spec.gains[t][r] for r in order) for t in order)
    powers = tuple(spec.powers[t] for t in order)
    return GaussianCifcSpec(gains=gains, powers=powers)


def _grid_values(step: float) -> List[float]:
    """Nonnegative multiples of step up to 1, exact k/N when 1/step is an integer."""
    inverse = 1.0 / step
    count = round(inverse)
    if abs(inverse - count) < 1e-9:
        return [k / count for k in range(count + 1)]
    return [k * step for k in range(int(math.floor(inverse + 1e-9)) + 1)]


def _sign(x: float) -> float:
    return -1.0 if x < 0 else 1.0


def rho_grid(
    step: float,
    domain: str = "achieving",
    spec: Optional[GaussianCifcSpec] = None,
    interior: bool = False,
) -> List[CorrelationPair]:
    """Uniform correlation grid inside the unit disk.

    Args:
        step: Grid spacing in (0, 1].
        domain: "disk" covers [-1, 1]^2; "achieving" covers the quarter disk whose
            signs match sign(h11*h31) and sign(h22*h32), where every region of the
            full disk is dominated by a region of the quarter.
        spec: Needed for the "achieving" domain.
        interior: Keep only points strictly inside the disk.

    Raises:
        ValueError: For a bad step, an unknown domain or a missing spec.
    """
    if not 0 < step <= 1:
        raise ValueError(f"grid step must lie in (0, 1], got {step}")
    if domain not in DOMAINS:
        raise ValueError(f"domain must be one of {DOMAINS}, got {domain!r}")
    ticks = _grid_values(step)
    if domain == "disk":
        axis1 = axis2 = sorted({-t + 0.0 for t in ticks} | set(ticks))
    else:
        if spec is None:
            raise ValueError("the achieving domain needs the channel spec")
        s1 = _sign(spec.h(1, 1) * spec.h(3, 1))
        s2 = _sign(spec.h(2, 2) * spec.h(3, 2))
        axis1 = sorted(s1 * t + 0.0 for t in ticks)
        axis2 = sorted(s2 * t + 0.0 for t in ticks)
    grid = []
    for r1 in axis1:
        for r2 in axis2:
            radius = r1 * r1 + r2 * r2
            if radius <= 1 + GRID_TOL and not (interior and radius >= 1 - GRID_TOL):
                grid.append(CorrelationPair(rho1=r1, rho2=r2))
    logger.debug(f"Correlation grid step={step} domain={domain} interior={interior}: {len(grid)} points")
    return grid


def diagonal_rhos(step: float) -> List[float]:
    """Values rho >= 0 on the step grid with 2 rho^2 <= 1."""
    return [t for t in _grid_values(step) if 2 * t * t <= 1 + GRID_TOL]


def _input_levels(power: float, count: int) -> np.ndarray:
    # conditional means of equiprobable standard normal cells
    if count == 1:
        return np.zeros(1)
    edges = norm.ppf(np.linspace(0.0, 1.0, count + 1))
    centroids = (norm.pdf(edges[:-1]) - norm.pdf(edges[1:])) * count
    return math.sqrt(power) * centroids


def _output_law(means: np.ndarray, sigma: float, count: int) -> np.ndarray:
    if count == 1:
        return np.ones(means.shape + (1,))
    edges = np.linspace(-4 * sigma, 4 * sigma, count + 1)[1:-1]
    cdf = norm.cdf(edges - means[..., None])
    zeros = np.zeros(means.shape + (1,))
    ones = np.ones(means.shape + (1,))
    return np.diff(np.concatenate([zeros, cdf, ones], axis=-1), axis=-1)


def quantize_gaussian(
    spec: GaussianCifcSpec,
    input_levels: Sequence[int],
    output_levels: Sequence[int],
) -> Tuple[CifcDmcSpec, InputPolicy]:
    """Discrete approximation of the channel with independent inputs.

    Input t takes ``input_levels[t]`` equiprobable values (a single level is the
    constant 0). Output r is binned into ``output_levels[r]`` cells spanning
    four standard deviations of the quantized received signal on each side,
    tails folded into the end cells.
    """
    if any(int(c) < 1 for c in list(input_levels) + list(output_levels)):
        raise ValueError("quantization levels must be positive")
    levels = [_input_levels(spec.power(t), int(input_levels[t - 1])) for t in (1, 2, 3)]
    x1, x2, x3 = np.meshgrid(*levels, indexing="ij")
    laws = []
    for receiver in (1, 2, 3):
        means = spec.h(1, receiver) * x1 + spec.h(2, receiver) * x2 + spec.h(3, receiver) * x3
        variance = sum(spec.h(t, receiver) ** 2 * float(np.mean(levels[t - 1] ** 2)) for t in (1, 2, 3))
        laws.append(_output_law(means, math.sqrt(variance + 1.0), int(output_levels[receiver - 1])))
    transition = (
        laws[0][..., :, None, None]
        * laws[1][..., None, :, None]
        * laws[2][..., None, None, :]
    )
    sizes = [len(level) for level in levels]
    return CifcDmcSpec.from_array(transition), InputPolicy.uniform(sizes)
