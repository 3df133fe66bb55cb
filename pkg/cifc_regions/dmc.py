"""Discrete memoryless three-user cognitive interference channel.

Users 1 and 2 are the primary pairs; transmitter 3 is cognitive and knows both
primary messages, so its input law is conditioned on (X1, X2). Serialized
channel tensors always use the axis order (X1, X2, X3, Y1, Y2, Y3).
"""

import logging
from dataclasses import dataclass
from typing import List, Sequence, Tuple

import numpy as np

from .config import parallel_map
from .models import TERM_GROUPS, MiTermsReport, term_id
from .probability import (
    InvalidDistributionError,
    ProbTensor,
    TensorShapeError,
    cond_mutual_info,
    validate,
)

logger = logging.getLogger(__name__)

INPUT_AXES = ("X1", "X2", "X3")
OUTPUT_AXES = ("Y1", "Y2", "Y3")
CHANNEL_AXES = INPUT_AXES + OUTPUT_AXES


def _require_valid(tensor: ProbTensor, given, what: str) -> None:
    report = validate(tensor, given)
    if not report.passed:
        raise InvalidDistributionError(f"{what} violates {', '.join(report.failures())}", report)


@dataclass(frozen=True, eq=False)
class CifcDmcSpec:
    """Channel law p(y1,y2,y3|x1,x2,x3).

    Attributes:
        transition (ProbTensor): Tensor over (X1,X2,X3,Y1,Y2,Y3) summing to 1
            over the outputs for every input triple.
    """
    transition: ProbTensor

    def __post_init__(self):
        if self.transition.axis_labels != CHANNEL_AXES:
            raise TensorShapeError(
                f"transition axes must be {CHANNEL_AXES}, got {self.transition.axis_labels}"
            )
        _require_valid(self.transition, INPUT_AXES, "transition")

    @classmethod
    def from_array(cls, values) -> "CifcDmcSpec":
        return cls(ProbTensor(CHANNEL_AXES, np.asarray(values, dtype=float)))

    @property
    def input_sizes(self) -> Tuple[int, int, int]:
        return self.transition.dims[:3]

    @property
    def output_sizes(self) -> Tuple[int, int, int]:
        return self.transition.dims[3:]

    def receiver_law(self, receiver: int) -> np.ndarray:
        """Marginal law p(y_r|x1,x2,x3) of one receiver, shape (|X1|,|X2|,|X3|,|Yr|)."""
        others = tuple(3 + r for r in range(3) if r != receiver - 1)
        return self.transition.values.sum(axis=others)


@dataclass(frozen=True, eq=False)
class InputPolicy:
    """Factored input law p(x1) p(x2) p(x3|x1,x2).

    Attributes:
        p1 (ProbTensor): Law of X1.
        p2 (ProbTensor): Law of X2.
        p3given12 (ProbTensor): Tensor over (X1,X2,X3), conditional on (X1,X2).
    """
    p1: ProbTensor
    p2: ProbTensor
    p3given12: ProbTensor

    def __post_init__(self):
        if self.p1.axis_labels != ("X1",) or self.p2.axis_labels != ("X2",):
            raise TensorShapeError("p1 and p2 must be laws over X1 and X2")
        if self.p3given12.axis_labels != INPUT_AXES:
            raise TensorShapeError(f"p3given12 axes must be {INPUT_AXES}")
        if self.p3given12.dims[:2] != (self.p1.dims[0], self.p2.dims[0]):
            raise TensorShapeError(
                f"p3given12 dims {self.p3given12.dims} disagree with |X1|={self.p1.dims[0]}, "
                f"|X2|={self.p2.dims[0]}"
            )
        _require_valid(self.p1, None, "p1")
        _require_valid(self.p2, None, "p2")
        _require_valid(self.p3given12, ("X1", "X2"), "p3given12")

    @classmethod
    def from_arrays(cls, p1, p2, p3given12) -> "InputPolicy":
        return cls(
            ProbTensor(("X1",), np.asarray(p1, dtype=float)),
            ProbTensor(("X2",), np.asarray(p2, dtype=float)),
            ProbTensor(INPUT_AXES, np.asarray(p3given12, dtype=float)),
        )

    @classmethod
    def uniform(cls, sizes: Sequence[int]) -> "InputPolicy":
        """Independent uniform inputs over alphabets of the given sizes."""
        a, b, c = sizes
        return cls.from_arrays(np.full(a, 1.0 / a), np.full(b, 1.0 / b), np.full((a, b, c), 1.0 / c))

    @property
    def sizes(self) -> Tuple[int, int, int]:
        return self.p3given12.dims

    def input_joint(self) -> np.ndarray:
        """Joint law p(x1,x2,x3) as an array."""
        return (
            self.p1.values[:, None, None]
            * self.p2.values[None, :, None]
            * self.p3given12.values
        )

    def check_fits(self, spec: CifcDmcSpec) -> None:
        if self.sizes != spec.input_sizes:
            raise TensorShapeError(
                f"policy alphabets {self.sizes} do not match channel inputs {spec.input_sizes}"
            )


def assemble_joint(spec: CifcDmcSpec, policy: InputPolicy) -> ProbTensor:
    """Joint law of (X1,X2,X3,Y1,Y2,Y3) induced by a policy on a channel.

    Raises:
        TensorShapeError: If the policy alphabets do not match the channel.
    """
    policy.check_fits(spec)
    joint = policy.input_joint()[:, :, :, None, None, None] * spec.transition.values
    return ProbTensor(CHANNEL_AXES, joint)


def mi_terms(spec: CifcDmcSpec, policy: InputPolicy) -> MiTermsReport:
    """Evaluate every information term of the region and condition sets."""
    joint = assemble_joint(spec, policy)
    values = {key: cond_mutual_info(joint, *groups) for key, groups in TERM_GROUPS.items()}
    return MiTermsReport(values=values)


def mi_terms_many(spec: CifcDmcSpec, policies: Sequence[InputPolicy], workers=None) -> List[MiTermsReport]:
    return parallel_map(lambda policy: mi_terms(spec, policy), policies, workers)


def sample_policies(spec: CifcDmcSpec, count: int, seed: int) -> List[InputPolicy]:
    """Draw policies with every factor from a flat Dirichlet law.

    Each policy has its own Philox stream spawned from ``seed``, so policy k is
    the same whatever the count or evaluation order.

    Raises:
        ValueError: If count < 1 or the seed is negative.
    """
    if count < 1:
        raise ValueError(f"count must be positive, got {count}")
    a, b, c = spec.input_sizes
    policies = []
    for child in np.random.SeedSequence(seed).spawn(count):
        rng = np.random.Generator(np.random.Philox(child))
        p1 = rng.dirichlet(np.ones(a))
        p2 = rng.dirichlet(np.ones(b))
        p3 = rng.dirichlet(np.ones(c), size=(a, b))
        policies.append(InputPolicy.from_arrays(p1, p2, p3))
    logger.info(f"Sampled {count} input policies with seed {seed}")
    return policies


_SWAP = {"X1": "X2", "X2": "X1", "Y1": "Y2", "Y2": "Y1"}


def swap_primary_users(spec: CifcDmcSpec, policy: InputPolicy) -> Tuple[CifcDmcSpec, InputPolicy]:
    """Exchange the roles of users 1 and 2 in a channel and its policy."""
    transition = np.transpose(spec.transition.values, (1, 0, 2, 4, 3, 5))
    p3 = np.transpose(policy.p3given12.values, (1, 0, 2))
    return (
        CifcDmcSpec.from_array(transition),
        InputPolicy.from_arrays(policy.p2.values, policy.p1.values, p3),
    )


def swap_term(key: str) -> str:
    """Identifier of a term after users 1 and 2 exchange roles."""
    groups = TERM_GROUPS[key]
    swapped = [tuple(sorted(_SWAP.get(label, label) for label in group)) for group in groups]
    return term_id(*swapped)
