"""Validated data models shared across the cifc_regions package."""

import math
from typing import Any, Dict, List, Mapping, Optional, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

# Information terms are keyed by their textual form. Each entry maps the
# identifier to its (A, B, C) axis groups for I(A;B|C).
TERM_GROUPS: Dict[str, Tuple[Tuple[str, ...], Tuple[str, ...], Tuple[str, ...]]] = {}


def term_id(group_a, group_b, group_c=()) -> str:
    """Build the canonical identifier of I(A;B|C), e.g. ``I(X1,X3;Y1|X2)``."""
    text = f"I({','.join(group_a)};{','.join(group_b)}"
    if group_c:
        text += f"|{','.join(group_c)}"
    return text + ")"


def _register(group_a, group_b, group_c=()) -> str:
    key = term_id(group_a, group_b, group_c)
    TERM_GROUPS[key] = (tuple(group_a), tuple(group_b), tuple(group_c))
    return key


I3_Y3 = _register(("X3",), ("Y3",), ("X1", "X2"))
I13_Y1 = _register(("X1", "X3"), ("Y1",), ("X2",))
I13_Y3 = _register(("X1", "X3"), ("Y3",), ("X2",))
I23_Y2 = _register(("X2", "X3"), ("Y2",), ("X1",))
I23_Y3 = _register(("X2", "X3"), ("Y3",), ("X1",))
IALL_Y1 = _register(("X1", "X2", "X3"), ("Y1",))
IALL_Y2 = _register(("X1", "X2", "X3"), ("Y2",))
IALL_Y3 = _register(("X1", "X2", "X3"), ("Y3",))
I1_Y2 = _register(("X1",), ("Y2",))
I2_Y1 = _register(("X2",), ("Y1",))
I1_Y3 = _register(("X1",), ("Y3",))
I2_Y3 = _register(("X2",), ("Y3",))
I1_Y2_G2 = _register(("X1",), ("Y2",), ("X2",))
I2_Y1_G1 = _register(("X2",), ("Y1",), ("X1",))
I3_Y1 = _register(("X3",), ("Y1",), ("X1", "X2"))
I3_Y2 = _register(("X3",), ("Y2",), ("X1", "X2"))


class MissingTermError(KeyError):
    """Raised when an information term needed by a region is not available."""


class InvariantCheck(BaseModel):
    """Outcome of one probabilistic invariant check.

    Attributes:
        invariant (str): Name of the invariant, e.g. "nonnegative".
        passed (bool): Whether the worst violation is inside the tolerance.
        worst_violation (float): Largest violation magnitude found (0 when none).
    """
    invariant: str
    passed: bool
    worst_violation: float


class ValidationReport(BaseModel):
    """Per-invariant verdict for a probability tensor.

    Attributes:
        kind (str): "joint" or "conditional on (...)".
        checks (List[InvariantCheck]): One entry per invariant.
        passed (bool): True iff every check passed.
    """
    kind: str
    checks: List[InvariantCheck]
    passed: bool

    def failures(self) -> List[str]:
        return [check.invariant for check in self.checks if not check.passed]


class MiTermsReport(BaseModel):
    """Every mutual-information term the region and condition code consumes.

    Values are in bits. The model refuses reports with missing, unknown or
    negative entries, so downstream code can index it without guards.

    Attributes:
        values (Dict[str, float]): Term identifier (see ``TERM_GROUPS``) to bits.

    Example:
        >>> report = MiTermsReport(values={key: 0.0 for key in TERM_GROUPS})
        >>> report[I3_Y3]
        0.0
    """
    model_config = ConfigDict(frozen=True)

    values: Dict[str, float]

    @field_validator("values")
    @classmethod
    def _complete_and_nonnegative(cls, values: Dict[str, float]) -> Dict[str, float]:
        missing = sorted(set(TERM_GROUPS) - set(values))
        unknown = sorted(set(values) - set(TERM_GROUPS))
        if missing or unknown:
            raise ValueError(f"term set mismatch: missing={missing} unknown={unknown}")
        for key, value in values.items():
            if not math.isfinite(value) or value < 0:
                raise ValueError(f"{key} must be finite and nonnegative, got {value}")
        return values

    def __getitem__(self, key: str) -> float:
        try:
            return self.values[key]
        except KeyError:
            raise MissingTermError(key) from None


class ClauseRecord(BaseModel):
    """One inequality ``left <= right`` of a condition set.

    For a disjunctive clause the record carries the best alternative's values
    and lists every alternative in ``alternatives``.

    Attributes:
        label (str): Clause name.
        left (float): Left-hand value.
        right (float): Right-hand value.
        slack (float): right - left, in bits or power units.
        passed (bool): slack >= -tolerance.
        witness: Policy index or (rho1, rho2) where the aggregated minimum was
            attained; None for pointwise checks and parameter-free clauses.
        alternatives (List[ClauseRecord]): Disjuncts, empty for plain clauses.
    """
    label: str
    left: float
    right: float
    slack: float
    passed: bool
    witness: Union[int, Tuple[float, float], None] = None
    alternatives: List["ClauseRecord"] = Field(default_factory=list)

    @field_validator("left", "right", "slack")
    @classmethod
    def _finite(cls, value: float) -> float:
        if not math.isfinite(value):
            raise ValueError("clause values must be finite")
        return value


class ConditionReport(BaseModel):
    """Verdict of a strong-interference condition set.

    Attributes:
        set_id (str): "Set1", "Set2" or "SetG".
        clauses (List[ClauseRecord]): Clause records in declaration order.
        overall_pass (bool): True iff every clause (disjunctions included) passed.
        witness: Policy index or (rho1, rho2) attaining the smallest slack in an
            aggregated report; None for a pointwise report.
        resolution (str): How the universal quantifier was sampled.
        tolerance (float): Slack tolerance used for pass flags.
        notes (List[str]): Remarks attached to the verdict.
    """
    set_id: str
    clauses: List[ClauseRecord]
    overall_pass: bool
    witness: Union[int, Tuple[float, float], None] = None
    resolution: str = "pointwise"
    tolerance: float = 1e-9
    notes: List[str] = Field(default_factory=list)

    def clause(self, label: str) -> ClauseRecord:
        for record in self.clauses:
            if record.label == label:
                return record
        raise KeyError(label)

    @property
    def min_slack(self) -> float:
        return min(record.slack for record in self.clauses)


class RateConstraint(BaseModel):
    """Halfspace ``a . (R1, R2, R3) <= bound`` with a in {0,1}^3.

    Attributes:
        coefficients (Tuple[int, int, int]): Coefficients on (R1, R2, R3).
        bound (float): Right-hand side in bits.
        label (str): Human-readable form such as "R1+R3".
        terms (List[str]): Information terms the bound was resolved from.
    """
    model_config = ConfigDict(frozen=True)

    coefficients: Tuple[int, int, int]
    bound: float
    label: str = ""
    terms: List[str] = Field(default_factory=list)

    @field_validator("coefficients")
    @classmethod
    def _binary_nonzero(cls, value: Tuple[int, int, int]) -> Tuple[int, int, int]:
        if any(c not in (0, 1) for c in value) or not any(value):
            raise ValueError(f"coefficients must be a nonzero 0/1 triple, got {value}")
        return value

    @field_validator("bound")
    @classmethod
    def _nonnegative(cls, value: float) -> float:
        if not math.isfinite(value) or value < 0:
            raise ValueError(f"bound must be finite and nonnegative, got {value}")
        return value


class RatePolytope(BaseModel):
    """Rate region given by halfspaces plus implicit nonnegativity.

    Attributes:
        constraints (List[RateConstraint]): Halfspaces in scheme order.
        scheme (Optional[str]): Scheme that produced the region, if any.
    """
    model_config = ConfigDict(frozen=True)

    constraints: List[RateConstraint]
    scheme: Optional[str] = None

    def bound(self, label: str) -> float:
        for constraint in self.constraints:
            if constraint.label == label:
                return constraint.bound
        raise KeyError(label)


class UnionPoint(BaseModel):
    tag: Union[int, Tuple[float, float]]
    rates: Tuple[float, float, float]


class RegionUnion(BaseModel):
    """Dominance-filtered boundary samples of a union of rate regions.

    Attributes:
        points (List[UnionPoint]): Surviving samples with their generator tag.
        metadata (Dict[str, Any]): Description of the generating grid and sampling.
    """
    points: List[UnionPoint]
    metadata: Dict[str, Any] = Field(default_factory=dict)


class GaussianCifcSpec(BaseModel):
    """Gaussian three-user cognitive interference channel.

    Receiver r observes ``Y_r = h_1r X1 + h_2r X2 + h_3r X3 + Z_r`` with unit
    noise variance.

    Attributes:
        gains: 3x3 matrix, ``gains[t][r]`` is the gain from transmitter t+1 to
            receiver r+1.
        powers: Average power constraints (P1, P2, P3).

    Example:
        >>> spec = GaussianCifcSpec(
        ...     gains=[[1, 7, 3], [5, 1, 15], [1.2247, 1.2247, 1]],
        ...     powers=[3, 6, 3],
        ... )
        >>> spec.h(1, 2)
        7.0
    """
    model_config = ConfigDict(frozen=True, extra="forbid")

    gains: Tuple[Tuple[float, float, float], Tuple[float, float, float], Tuple[float, float, float]]
    powers: Tuple[float, float, float]

    @field_validator("gains")
    @classmethod
    def _finite_gains(cls, value):
        if not all(math.isfinite(g) for row in value for g in row):
            raise ValueError("gains must be finite")
        return value

    @field_validator("powers")
    @classmethod
    def _nonnegative_powers(cls, value):
        if not all(math.isfinite(p) and p >= 0 for p in value):
            raise ValueError(f"powers must be finite and nonnegative, got {value}")
        return value

    def h(self, transmitter: int, receiver: int) -> float:
        """Gain from transmitter to receiver, both numbered from 1."""
        return self.gains[transmitter - 1][receiver - 1]

    def power(self, transmitter: int) -> float:
        return self.powers[transmitter - 1]


class CorrelationPair(BaseModel):
    """Correlation of the cognitive input with each primary input.

    Attributes:
        rho1 (float): Correlation coefficient between X1 and X3.
        rho2 (float): Correlation coefficient between X2 and X3.
    """
    model_config = ConfigDict(frozen=True)

    rho1: float = 0.0
    rho2: float = 0.0

    @model_validator(mode="after")
    def _inside_unit_disk(self) -> "CorrelationPair":
        if not (-1.0 <= self.rho1 <= 1.0 and -1.0 <= self.rho2 <= 1.0):
            raise ValueError(f"correlations must lie in [-1, 1], got ({self.rho1}, {self.rho2})")
        if self.rho1 ** 2 + self.rho2 ** 2 > 1.0 + 1e-12:
            raise ValueError(f"rho1^2 + rho2^2 must not exceed 1, got ({self.rho1}, {self.rho2})")
        return self

    def as_tuple(self) -> Tuple[float, float]:
        return (self.rho1, self.rho2)


class SimResult(BaseModel):
    """Monte-Carlo error estimate for one block length.

    Attributes:
        n (int): Block length.
        scheme (int): Decoding scheme (1 joint, 2 sequential).
        rates (Tuple[float, float, float]): Achieved rates log2(size)/n.
        codebook_sizes (Tuple[int, int, int]): Codebook sizes per user.
        error_rates (Tuple[float, float, float]): Empirical error rate per receiver.
        error_rate (float): Maximum of ``error_rates``.
        trials (int): Number of trials.
        confidence_radius (float): Wilson 95% half-width of ``error_rate``.
        first_stage_error_rates: Error of Rx1's user-2 stage and Rx2's user-1
            stage under scheme 2, None under scheme 1.
        seed (int): Master seed.
    """
    n: int
    scheme: int
    rates: Tuple[float, float, float]
    codebook_sizes: Tuple[int, int, int]
    error_rates: Tuple[float, float, float]
    error_rate: float
    trials: int
    confidence_radius: float
    first_stage_error_rates: Optional[Tuple[float, float]] = None
    seed: int

    @model_validator(mode="after")
    def _max_aggregation(self) -> "SimResult":
        if any(not 0.0 <= p <= 1.0 for p in self.error_rates):
            raise ValueError("error rates must lie in [0, 1]")
        if self.error_rate != max(self.error_rates):
            raise ValueError("overall error rate must equal the largest receiver error rate")
        return self


class RunManifest(BaseModel):
    """Provenance record written next to every CLI output file.

    Attributes:
        command (str): Subcommand name.
        input_digests (Dict[str, str]): Input path to SHA-256 hex digest.
        seed (Optional[int]): Master seed, when the command is randomized.
        grid (Dict[str, Any]): Grid, sampling and block-length parameters.
        tool_version (str): Package version.
        duration_seconds (float): Wall-clock duration of the run.
    """
    command: str
    input_digests: Dict[str, str]
    seed: Optional[int] = None
    grid: Dict[str, Any] = Field(default_factory=dict)
    tool_version: str
    duration_seconds: float = 0.0


def term_value(terms: Union[MiTermsReport, Mapping[str, float]], key: str) -> float:
    """Look up a term in a report or a plain mapping."""
    try:
        return terms[key]
    except KeyError:
        raise MissingTermError(key) from None
