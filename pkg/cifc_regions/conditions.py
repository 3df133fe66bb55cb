"""Strong-interference condition sets with per-clause slack.

Universal quantifiers over input policies or correlation pairs are certified
by sampling or gridding; every aggregated report states its resolution.
A disjunctive clause is reported as one record holding the better
alternative, with every alternative attached.
"""

import logging
from dataclasses import dataclass
from enum import Enum
from typing import List, Optional, Sequence, Tuple, Union

from .config import parallel_map
from .dmc import CifcDmcSpec, InputPolicy, mi_terms
from .gaussian import rho_grid, setg_clause_values
from .models import (
    I1_Y2,
    I1_Y2_G2,
    I1_Y3,
    I2_Y1,
    I2_Y1_G1,
    I2_Y3,
    I3_Y1,
    I3_Y2,
    I3_Y3,
    I13_Y1,
    I13_Y3,
    I23_Y2,
    I23_Y3,
    IALL_Y1,
    IALL_Y2,
    IALL_Y3,
    ClauseRecord,
    ConditionReport,
    GaussianCifcSpec,
    MiTermsReport,
)

logger = logging.getLogger(__name__)

CONDITION_TOL = 1e-9

MIRRORED_POWER_NOTE = (
    "rx3-sees-user2 bounds user 2 with h23^2*P2, the mirror image of h13^2*P1 "
    "in rx3-sees-user1"
)


class ConditionSet(str, Enum):
    JOINT = "Set1"
    SEQUENTIAL = "Set2"
    GAUSSIAN = "SetG"


@dataclass(frozen=True)
class _Clause:
    # left is the min over its terms, right a single term
    label: str
    left: Tuple[str, ...]
    right: str


@dataclass(frozen=True)
class _Either:
    label: str
    alternatives: Tuple[_Clause, ...]


_COGNITIVE = (
    _Clause("cognitive-rx1", (I3_Y3,), I3_Y1),
    _Clause("cognitive-rx2", (I3_Y3,), I3_Y2),
)

JOINT_CLAUSES = _COGNITIVE + (
    _Clause("rx2-user1-given-user2", (I13_Y1,), I1_Y2_G2),
    _Clause("rx3-sees-user1", (I13_Y1,), I13_Y3),
    _Clause("rx1-user2-given-user1", (I23_Y2,), I2_Y1_G1),
    _Clause("rx3-sees-user2", (I23_Y2,), I23_Y3),
    _Clause("rx3-sum-rate", (IALL_Y1, IALL_Y2), IALL_Y3),
)

SEQUENTIAL_CLAUSES = _COGNITIVE + (
    _Clause("rx2-user1-first", (I13_Y1,), I1_Y2),
    _Clause("rx3-sees-user1", (I13_Y1,), I13_Y3),
    _Clause("rx1-user2-first", (I23_Y2,), I2_Y1),
    _Clause("rx3-sees-user2", (I23_Y2,), I23_Y3),
    _Either(
        "rx3-decoding-order",
        (
            _Clause("rx3-order-user1", (I1_Y2,), I1_Y3),
            _Clause("rx3-order-user2", (I2_Y1,), I2_Y3),
        ),
    ),
)

GAUSSIAN_GRID_CLAUSES = (
    "rx2-user1-first",
    "rx3-sees-user1",
    "rx1-user2-first",
    "rx3-sees-user2",
    ("rx3-decoding-order", ("rx3-order-user1", "rx3-order-user2")),
)


def _record(label: str, left: float, right: float, tol: float = CONDITION_TOL) -> ClauseRecord:
    slack = right - left
    return ClauseRecord(label=label, left=left, right=right, slack=slack, passed=slack >= -tol)


def _either(label: str, alternatives: List[ClauseRecord]) -> ClauseRecord:
    best = max(alternatives, key=lambda record: record.slack)
    return ClauseRecord(
        label=label,
        left=best.left,
        right=best.right,
        slack=best.slack,
        passed=best.passed,
        alternatives=alternatives,
    )


def _evaluate(clauses, terms: MiTermsReport) -> List[ClauseRecord]:
    records = []
    for clause in clauses:
        if isinstance(clause, _Either):
            alternatives = [_evaluate([alt], terms)[0] for alt in clause.alternatives]
            records.append(_either(clause.label, alternatives))
        else:
            left = min(terms[key] for key in clause.left)
            records.append(_record(clause.label, left, terms[clause.right]))
    return records


def _report(set_id: ConditionSet, clauses: List[ClauseRecord], **extra) -> ConditionReport:
    return ConditionReport(
        set_id=set_id.value,
        clauses=clauses,
        overall_pass=all(record.passed for record in clauses),
        tolerance=CONDITION_TOL,
        **extra,
    )


def check_terms(terms: MiTermsReport, set_id: Union[ConditionSet, str]) -> ConditionReport:
    """Evaluate a discrete condition set on precomputed information terms."""
    set_id = ConditionSet(set_id)
    if set_id is ConditionSet.JOINT:
        return _report(set_id, _evaluate(JOINT_CLAUSES, terms))
    if set_id is ConditionSet.SEQUENTIAL:
        return _report(set_id, _evaluate(SEQUENTIAL_CLAUSES, terms))
    raise ValueError("the Gaussian set is checked with check_set_g")


def check_set1_at(spec: CifcDmcSpec, policy: InputPolicy) -> ConditionReport:
    """Check the joint-decoding strong-interference set at one policy."""
    return check_terms(mi_terms(spec, policy), ConditionSet.JOINT)


def check_set2_at(spec: CifcDmcSpec, policy: InputPolicy) -> ConditionReport:
    """Check the sequential-decoding strong-interference set at one policy."""
    return check_terms(mi_terms(spec, policy), ConditionSet.SEQUENTIAL)


def aggregate(
    reports: Sequence[ConditionReport],
    tags: Sequence[Union[int, Tuple[float, float]]],
    resolution: str,
    notes: Optional[List[str]] = None,
) -> ConditionReport:
    """Min-reduce pointwise reports of the same set into one verdict.

    Each clause keeps the record with the smallest slack (first one on ties)
    and names its tag as witness.
    """
    if not reports:
        raise ValueError("cannot aggregate an empty list of reports")
    set_id = ConditionSet(reports[0].set_id)
    clauses = []
    for k in range(len(reports[0].clauses)):
        worst = min(range(len(reports)), key=lambda i: reports[i].clauses[k].slack)
        clauses.append(reports[worst].clauses[k].model_copy(update={"witness": tags[worst]}))
    weakest = min(clauses, key=lambda record: record.slack)
    return _report(set_id, clauses, witness=weakest.witness, resolution=resolution, notes=notes or [])


def check_family(
    spec: CifcDmcSpec,
    policies: Sequence[InputPolicy],
    set_id: Union[ConditionSet, str],
    workers: Optional[int] = None,
) -> ConditionReport:
    """Check a discrete set at every policy of a list.

    Raises:
        ValueError: If the list is empty or the set is the Gaussian one.
    """
    if not policies:
        raise ValueError("check_family needs at least one policy")
    set_id = ConditionSet(set_id)
    if set_id is ConditionSet.GAUSSIAN:
        raise ValueError("the Gaussian set is checked with check_set_g")
    reports = parallel_map(lambda policy: check_terms(mi_terms(spec, policy), set_id), policies, workers)
    report = aggregate(reports, list(range(len(policies))), f"{len(policies)} sampled policies")
    logger.info(
        f"{set_id.value} over {len(policies)} policies: "
        f"{'pass' if report.overall_pass else 'fail'} (min slack {report.min_slack:.6g})"
    )
    return report


def _gaussian_point(spec: GaussianCifcSpec, rho) -> ConditionReport:
    values = setg_clause_values(spec, rho)
    records = []
    for clause in GAUSSIAN_GRID_CLAUSES:
        if isinstance(clause, tuple):
            label, names = clause
            records.append(_either(label, [_record(name, *values[name]) for name in names]))
        else:
            records.append(_record(clause, *values[clause]))
    return _report(ConditionSet.GAUSSIAN, records)


def check_set_g(
    spec: GaussianCifcSpec,
    grid_step: float,
    domain: str = "achieving",
    workers: Optional[int] = None,
) -> ConditionReport:
    """Check the Gaussian strong-interference set over a correlation grid.

    The gain clause does not depend on the correlations and is evaluated once;
    the others are min-reduced over the grid.

    Args:
        spec: Gaussian channel.
        grid_step: Grid spacing in (0, 1).
        domain: "achieving" (the quarter disk carrying the capacity region) or
            "disk" (every pair with rho1^2 + rho2^2 <= 1).
        workers: Thread count override.

    Raises:
        ValueError: If the step is outside (0, 1) or the domain is unknown.
    """
    if not 0 < grid_step < 1:
        raise ValueError(f"grid step must lie in (0, 1), got {grid_step}")
    grid = rho_grid(grid_step, domain, spec)
    reports = parallel_map(lambda rho: _gaussian_point(spec, rho), grid, workers)
    swept = aggregate(
        reports,
        [rho.as_tuple() for rho in grid],
        f"grid_step={grid_step} domain={domain} points={len(grid)}",
    )
    gain_left, gain_right = setg_clause_values(spec, grid[0])["cognitive-gain"]
    clauses = [_record("cognitive-gain", gain_left, gain_right)] + swept.clauses
    logger.info(f"Gaussian set: {MIRRORED_POWER_NOTE}")
    report = _report(
        ConditionSet.GAUSSIAN,
        clauses,
        witness=swept.witness if min(c.slack for c in swept.clauses) <= clauses[0].slack else None,
        resolution=swept.resolution,
        notes=[MIRRORED_POWER_NOTE],
    )
    logger.info(
        f"Gaussian set over {len(grid)} grid points: "
        f"{'pass' if report.overall_pass else 'fail'} (min slack {report.min_slack:.6g})"
    )
    return report
