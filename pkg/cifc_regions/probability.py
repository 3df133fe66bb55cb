"""Finite-alphabet probability tensors and information measures.

All information quantities are in bits. Tensors are dense; axes carry symbolic
labels such as "X1" or "Y3" and every query refers to axes by label.
"""

import logging
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence, Tuple

import numpy as np

from .models import InvariantCheck, ValidationReport

logger = logging.getLogger(__name__)

STRUCTURAL_TOL = 1e-12


class TensorShapeError(ValueError):
    """Labels, dimensions and values of a tensor disagree."""


class UnknownAxisError(ValueError):
    """An axis label is not present in the tensor."""


class OverlappingAxesError(ValueError):
    """Axis groups of an information query share a label."""


class InvalidDistributionError(ValueError):
    """A tensor fails a probabilistic invariant.

    Attributes:
        report (Optional[ValidationReport]): The failing validation report.
    """

    def __init__(self, message: str, report: Optional[ValidationReport] = None):
        super().__init__(message)
        self.report = report


@dataclass(frozen=True, eq=False)
class ProbTensor:
    """Dense nonnegative tensor with labeled axes.

    Attributes:
        axis_labels (Tuple[str, ...]): Unique axis names in storage order.
        values (np.ndarray): Read-only array with one dimension per label.
    """
    axis_labels: Tuple[str, ...]
    values: np.ndarray

    def __post_init__(self):
        labels = tuple(self.axis_labels)
        values = np.array(self.values, dtype=float)
        if len(set(labels)) != len(labels):
            raise TensorShapeError(f"axis labels must be unique, got {labels}")
        if values.ndim != len(labels):
            raise TensorShapeError(
                f"{len(labels)} labels for an array with {values.ndim} dimensions"
            )
        values.setflags(write=False)
        object.__setattr__(self, "axis_labels", labels)
        object.__setattr__(self, "values", values)

    @classmethod
    def from_flat(cls, axis_labels: Sequence[str], dims: Sequence[int], values: Sequence[float]) -> "ProbTensor":
        """Build a tensor from row-major flat values.

        Raises:
            TensorShapeError: If dims and labels or values disagree in length.
        """
        dims = tuple(int(d) for d in dims)
        flat = np.asarray(values, dtype=float).ravel()
        if len(dims) != len(axis_labels):
            raise TensorShapeError(f"{len(axis_labels)} labels but {len(dims)} dims")
        if any(d < 1 for d in dims):
            raise TensorShapeError(f"dims must be positive, got {dims}")
        if flat.size != int(np.prod(dims)):
            raise TensorShapeError(f"dims {dims} need {int(np.prod(dims))} values, got {flat.size}")
        return cls(tuple(axis_labels), flat.reshape(dims))

    @property
    def dims(self) -> Tuple[int, ...]:
        return tuple(self.values.shape)

    def axis(self, label: str) -> int:
        try:
            return self.axis_labels.index(label)
        except ValueError:
            raise UnknownAxisError(f"unknown axis {label!r}; axes are {self.axis_labels}") from None


def validate(tensor: ProbTensor, given: Optional[Iterable[str]] = None) -> ValidationReport:
    """Check nonnegativity and normalization.

    Args:
        tensor: Tensor to check.
        given: Conditioning axes. None checks a joint law summing to 1; otherwise
            every slice indexed by the conditioning axes must sum to 1.

    Returns:
        ValidationReport: Pass/fail per invariant with the worst violation.
    """
    values = tensor.values
    negative = float(max(0.0, -values.min())) if values.size else 0.0
    if given is None:
        kind = "joint"
        mass_error = abs(float(values.sum()) - 1.0)
    else:
        given = tuple(given)
        given_axes = {tensor.axis(label) for label in given}
        summed = tuple(i for i in range(values.ndim) if i not in given_axes)
        kind = f"conditional on ({','.join(given)})"
        sums = values.sum(axis=summed) if summed else values
        mass_error = float(np.max(np.abs(sums - 1.0))) if sums.size else 0.0
    checks = [
        InvariantCheck(invariant="nonnegative", passed=negative <= STRUCTURAL_TOL, worst_violation=negative),
        InvariantCheck(invariant="normalized", passed=mass_error <= STRUCTURAL_TOL, worst_violation=mass_error),
    ]
    return ValidationReport(kind=kind, checks=checks, passed=all(c.passed for c in checks))


def marginalize(joint: ProbTensor, keep: Iterable[str]) -> ProbTensor:
    """Sum out every axis not in ``keep``; kept axes retain their order."""
    keep = set(keep)
    for label in keep:
        joint.axis(label)
    dropped = tuple(i for i, label in enumerate(joint.axis_labels) if label not in keep)
    labels = tuple(label for label in joint.axis_labels if label in keep)
    if not dropped:
        return joint
    return ProbTensor(labels, joint.values.sum(axis=dropped))


def _grouped(joint: ProbTensor, groups: Sequence[Sequence[str]]) -> np.ndarray:
    """Marginal over the union of groups, reshaped to one axis per group."""
    order = [joint.axis(label) for group in groups for label in group]
    others = tuple(i for i in range(joint.values.ndim) if i not in order)
    values = joint.values.sum(axis=others) if others else joint.values
    # after the sum, remaining axes keep their relative order in the tensor
    remaining = sorted(order)
    values = np.transpose(values, [remaining.index(i) for i in order])
    shape = [int(np.prod([joint.values.shape[joint.axis(l)] for l in group])) for group in groups]
    return values.reshape(shape)


def cond_mutual_info(
    joint: ProbTensor,
    group_a: Sequence[str],
    group_b: Sequence[str],
    group_c: Sequence[str] = (),
) -> float:
    """Conditional mutual information I(A;B|C) in bits.

    Uses 0*log(0/q) = 0 and skips cells whose conditioning mass is zero.
    Results within -1e-12 of zero are clamped to 0.

    Raises:
        UnknownAxisError: If a label is not in the tensor.
        OverlappingAxesError: If the groups share a label.
        InvalidDistributionError: If the result is negative beyond tolerance.
    """
    group_a, group_b, group_c = tuple(group_a), tuple(group_b), tuple(group_c)
    labels = group_a + group_b + group_c
    if len(set(labels)) != len(labels):
        raise OverlappingAxesError(f"groups {group_a}, {group_b}, {group_c} overlap")
    for label in labels:
        joint.axis(label)
    if not group_a or not group_b:
        return 0.0

    p_abc = _grouped(joint, (group_a, group_b, group_c))
    p_ac = p_abc.sum(axis=1, keepdims=True)
    p_bc = p_abc.sum(axis=0, keepdims=True)
    p_c = p_abc.sum(axis=(0, 1), keepdims=True)
    mask = p_abc > 0
    numerator = (p_abc * p_c)[mask]
    denominator = (p_ac * p_bc)[mask]
    value = float(np.sum(p_abc[mask] * np.log2(numerator / denominator)))

    if value < 0:
        if value < -STRUCTURAL_TOL:
            logger.error(f"Negative information {value} for {labels}")
            raise InvalidDistributionError(f"I({group_a};{group_b}|{group_c}) = {value} is negative")
        logger.debug(f"Clamped round-off information {value:.3g} for {labels}")
        value = 0.0
    return value
