"""Rate-region polytopes, membership, vertices and sampled unions.

Every region lives in (R1, R2, R3) >= 0 and is cut by halfspaces whose
coefficients are 0/1 triples. Unions over policies or correlations are
represented by their dominance-filtered boundary samples.
"""

import itertools
import logging
from enum import Enum
from typing import Dict, List, Mapping, Sequence, Tuple, Union

import numpy as np

from .config import parallel_map
from .gaussian import correlation, cognitive_power, sum_power, theta
from .models import (
    I1_Y2,
    I2_Y1,
    I3_Y3,
    I13_Y1,
    I13_Y3,
    I23_Y2,
    I23_Y3,
    IALL_Y1,
    IALL_Y2,
    IALL_Y3,
    GaussianCifcSpec,
    MiTermsReport,
    RateConstraint,
    RatePolytope,
    RegionUnion,
    UnionPoint,
    term_value,
)

logger = logging.getLogger(__name__)

REGION_TOL = 1e-9

COEFFICIENTS = {
    "R1": (1, 0, 0),
    "R2": (0, 1, 0),
    "R3": (0, 0, 1),
    "R1+R3": (1, 0, 1),
    "R2+R3": (0, 1, 1),
    "R1+R2+R3": (1, 1, 1),
}


class Scheme(str, Enum):
    """Region families; values are the command-line names."""
    JOINT = "thm1"
    SEQUENTIAL = "thm2"
    STRONG_JOINT = "c1"
    STRONG_SEQUENTIAL = "c2"
    GAUSSIAN = "c1g"


# Each bound is the smallest of its listed terms; ties keep the first.
SCHEME_BOUNDS: Dict[Scheme, List[Tuple[str, Tuple[str, ...]]]] = {
    Scheme.JOINT: [
        ("R3", (I3_Y3,)),
        ("R1+R3", (I13_Y1, I13_Y3)),
        ("R2+R3", (I23_Y2, I23_Y3)),
        ("R1+R2+R3", (IALL_Y1, IALL_Y2, IALL_Y3)),
    ],
    Scheme.SEQUENTIAL: [
        ("R3", (I3_Y3,)),
        ("R1+R3", (I13_Y1, I13_Y3)),
        ("R2+R3", (I23_Y2, I23_Y3)),
        ("R1", (I1_Y2,)),
        ("R2", (I2_Y1,)),
        ("R1+R2+R3", (IALL_Y3,)),
    ],
    Scheme.STRONG_JOINT: [
        ("R3", (I3_Y3,)),
        ("R1+R3", (I13_Y1,)),
        ("R2+R3", (I23_Y2,)),
        ("R1+R2+R3", (IALL_Y1, IALL_Y2)),
    ],
    Scheme.STRONG_SEQUENTIAL: [
        ("R3", (I3_Y3,)),
        ("R1+R3", (I13_Y1,)),
        ("R2+R3", (I23_Y2,)),
    ],
}

# Constraints each receiver's decoder imposes in the random-coding argument.
RECEIVER_BOUNDS: Dict[Scheme, Dict[str, List[Tuple[str, str]]]] = {
    Scheme.JOINT: {
        "rx1": [("R1+R3", I13_Y1), ("R1+R2+R3", IALL_Y1)],
        "rx2": [("R2+R3", I23_Y2), ("R1+R2+R3", IALL_Y2)],
        "rx3": [("R3", I3_Y3), ("R1+R3", I13_Y3), ("R2+R3", I23_Y3), ("R1+R2+R3", IALL_Y3)],
    },
    Scheme.SEQUENTIAL: {
        "rx1": [("R2", I2_Y1), ("R1+R3", I13_Y1)],
        "rx2": [("R1", I1_Y2), ("R2+R3", I23_Y2)],
        "rx3": [("R3", I3_Y3), ("R1+R3", I13_Y3), ("R2+R3", I23_Y3), ("R1+R2+R3", IALL_Y3)],
    },
}

Terms = Union[MiTermsReport, Mapping[str, float]]


def _constraint(label: str, bound: float, terms: Sequence[str]) -> RateConstraint:
    return RateConstraint(coefficients=COEFFICIENTS[label], bound=max(0.0, bound), label=label, terms=list(terms))


def region_bounds(terms: Terms, scheme: Union[Scheme, str]) -> RatePolytope:
    """Region of a discrete scheme at one input policy.

    Raises:
        MissingTermError: If a needed term is absent from ``terms``.
        ValueError: For the Gaussian scheme, which is built by gaussian_c1g.
    """
    scheme = Scheme(scheme)
    if scheme is Scheme.GAUSSIAN:
        raise ValueError("the Gaussian region is built with gaussian_c1g")
    constraints = []
    for label, keys in SCHEME_BOUNDS[scheme]:
        values = [term_value(terms, key) for key in keys]
        chosen = min(range(len(keys)), key=lambda k: values[k])
        constraints.append(_constraint(label, values[chosen], [keys[chosen]]))
    return RatePolytope(constraints=constraints, scheme=scheme.value)


def decoding_constraints(terms: Terms, scheme: Union[Scheme, str]) -> Dict[str, List[RateConstraint]]:
    """Per-receiver constraints of the joint or sequential decoding scheme."""
    scheme = Scheme(scheme)
    if scheme not in RECEIVER_BOUNDS:
        raise ValueError(f"per-receiver constraints exist for thm1 and thm2, not {scheme.value}")
    return {
        receiver: [_constraint(label, term_value(terms, key), [key]) for label, key in bounds]
        for receiver, bounds in RECEIVER_BOUNDS[scheme].items()
    }


def intersect(constraints: Sequence[RateConstraint], scheme: str = None) -> RatePolytope:
    """Keep the tightest bound per coefficient triple."""
    tightest: Dict[Tuple[int, int, int], RateConstraint] = {}
    for constraint in constraints:
        current = tightest.get(constraint.coefficients)
        if current is None or constraint.bound < current.bound:
            tightest[constraint.coefficients] = constraint
    return RatePolytope(constraints=list(tightest.values()), scheme=scheme)


def gaussian_c1g(spec: GaussianCifcSpec, rho1: float, rho2: float) -> RatePolytope:
    """Capacity region of the Gaussian channel at one correlation pair.

    Raises:
        CorrelationDomainError: If rho1^2 + rho2^2 > 1.
    """
    rho = correlation(rho1, rho2)
    return RatePolytope(
        constraints=[
            _constraint("R3", theta(cognitive_power(spec, rho)), ["cognitive"]),
            _constraint("R1+R3", theta(sum_power(spec, rho, 1, 1)), ["user1-at-rx1"]),
            _constraint("R2+R3", theta(sum_power(spec, rho, 2, 2)), ["user2-at-rx2"]),
        ],
        scheme=Scheme.GAUSSIAN.value,
    )


def _halfspaces(poly: RatePolytope) -> Tuple[np.ndarray, np.ndarray]:
    rows = [c.coefficients for c in poly.constraints] + [(-1, 0, 0), (0, -1, 0), (0, 0, -1)]
    bounds = [c.bound for c in poly.constraints] + [0.0, 0.0, 0.0]
    return np.array(rows, dtype=float), np.array(bounds, dtype=float)


def vertices(poly: RatePolytope, tol: float = REGION_TOL) -> List[Tuple[float, float, float]]:
    """Extreme points, found by solving every triple of active halfspaces.

    Singular triples are skipped. Points are kept when feasible within ``tol``,
    deduplicated within ``tol`` and returned in lexicographic order.
    """
    a, b = _halfspaces(poly)
    found: List[np.ndarray] = []
    for rows in itertools.combinations(range(len(b)), 3):
        sub = a[list(rows)]
        if abs(np.linalg.det(sub)) < 1e-12:
            continue
        point = np.linalg.solve(sub, b[list(rows)])
        if np.any(a @ point > b + tol):
            continue
        point = np.maximum(point, 0.0)
        if not any(np.all(np.abs(point - other) <= tol) for other in found):
            found.append(point)
    return sorted(tuple(float(x) for x in point) for point in found)


def contains(poly: RatePolytope, rate: Sequence[float], tol: float = REGION_TOL) -> bool:
    """True iff the rate is nonnegative and meets every constraint within ``tol``."""
    rate = np.asarray(rate, dtype=float)
    if np.any(rate < 0):
        return False
    return all(
        float(np.dot(constraint.coefficients, rate)) <= constraint.bound + tol
        for constraint in poly.constraints
    )


def same_region(first: RatePolytope, second: RatePolytope, tol: float = REGION_TOL) -> bool:
    """Whether two bounded regions coincide, by mutual vertex containment."""
    inside = lambda pts, poly: all(contains(poly, np.maximum(p, 0.0), tol) for p in pts)
    return inside(vertices(first), second) and inside(vertices(second), first)


def boundary_samples(poly: RatePolytope, samples_per_face: int) -> np.ndarray:
    """Vertices plus points inside every face.

    A face's samples lie on the segments from its vertex centroid to each of
    its vertices, at ``samples_per_face`` evenly spaced interior fractions,
    plus the centroid itself.
    """
    points = [np.array(v) for v in vertices(poly)]
    if not points:
        return np.zeros((0, 3))
    corners = np.array(points)
    a, b = _halfspaces(poly)
    fractions = np.linspace(0.0, 1.0, samples_per_face + 2)[1:-1]
    for row, bound in zip(a, b):
        on_face = corners[np.abs(corners @ row - bound) <= REGION_TOL]
        if len(on_face) < 2:
            continue
        centre = on_face.mean(axis=0)
        points.append(centre)
        for corner in on_face:
            points.extend(centre + t * (corner - centre) for t in fractions)
    return np.array(points)


def dominance_filter(points: np.ndarray, tol: float = REGION_TOL) -> np.ndarray:
    """Indices of points not dominated by another point, in ascending order.

    A point is dominated when another is >= in every coordinate (within tol)
    and > in at least one (beyond tol). Points equal within tol collapse to one.
    """
    points = np.asarray(points, dtype=float)
    if len(points) == 0:
        return np.zeros(0, dtype=int)
    order = np.lexsort((-points[:, 2], -points[:, 1], -points[:, 0], -points.sum(axis=1)))
    ranked = points[order]
    alive = np.ones(len(ranked), dtype=bool)
    for i in range(len(ranked)):
        if not alive[i]:
            continue
        covered = np.all(ranked <= ranked[i] + tol, axis=1)
        covered[i] = False
        alive &= ~covered

    survivors = ranked[alive]
    keep = np.ones(len(survivors), dtype=bool)
    for i, point in enumerate(survivors):
        above = np.all(survivors >= point - tol, axis=1) & np.any(survivors > point + tol, axis=1)
        keep[i] = not above.any()
    return np.sort(order[np.flatnonzero(alive)[keep]])


def union_over(
    generators: Sequence[Tuple[Union[int, Tuple[float, float]], RatePolytope]],
    samples_per_face: int = 4,
    metadata: Mapping = None,
    workers: int = None,
) -> RegionUnion:
    """Outer surface samples of a union of regions.

    Raises:
        ValueError: If there are no generators or samples_per_face < 1.
    """
    if not generators:
        raise ValueError("union_over needs at least one generator")
    if samples_per_face < 1:
        raise ValueError(f"samples_per_face must be positive, got {samples_per_face}")
    clouds = parallel_map(lambda item: boundary_samples(item[1], samples_per_face), generators, workers)
    tags = [tag for (tag, _), cloud in zip(generators, clouds) for _ in range(len(cloud))]
    pooled = np.concatenate(clouds) if clouds else np.zeros((0, 3))
    kept = dominance_filter(pooled)
    logger.info(f"Union of {len(generators)} regions: {len(pooled)} samples, {len(kept)} on the surface")
    points = [UnionPoint(tag=tags[i], rates=tuple(float(x) for x in pooled[i])) for i in kept]
    info = {"generators": len(generators), "samples_per_face": samples_per_face, "pooled": len(pooled)}
    info.update(metadata or {})
    return RegionUnion(points=points, metadata=info)
