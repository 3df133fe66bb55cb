"""Monte-Carlo random-coding simulation on small discrete channels.

Codebooks follow the superposition construction: users 1 and 2 draw i.i.d.
codewords from p(x1) and p(x2); for every message pair the cognitive
transmitter draws its codewords letter by letter from p(x3|x1,x2) on the
realized primary codewords. Receivers decode by maximum likelihood, with
ties going to the lowest message index. Message indices are 0-based.
"""

import logging
import math
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, InstanceOf, field_validator, model_validator
from scipy.stats import norm

from .config import load_settings, parallel_map
from .dmc import CifcDmcSpec, InputPolicy
from .models import SimResult

logger = logging.getLogger(__name__)

SIZE_TOL = 1e-9

Messages = Tuple[int, int, int]


class SearchSpaceError(ValueError):
    """The decoder search space exceeds the configured cap."""


class SimConfig(BaseModel):
    """One simulation run at a fixed block length.

    Attributes:
        spec (CifcDmcSpec): Channel.
        policy (InputPolicy): Codebook generation law.
        n (int): Block length.
        rates (Tuple[float, float, float]): Target rates in bits per use.
        trials (int): Independent trials, each with fresh codebooks.
        seed (int): Master seed.
        scheme (int): 1 for joint decoding everywhere, 2 for sequential
            decoding at the primary receivers.
        decoder (str): Decoding rule; only maximum likelihood is provided.
        search_cap (Optional[int]): Cap on the product of codebook sizes,
            defaulting to ``CIFC_SEARCH_CAP``.

    Example:
        >>> config = SimConfig(spec=spec, policy=policy, n=8, rates=(0.25, 0.25, 0.25), trials=500, seed=7)
        >>> config.codebook_sizes
        (4, 4, 4)
    """
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    spec: InstanceOf[CifcDmcSpec]
    policy: InstanceOf[InputPolicy]
    n: int = Field(ge=1)
    rates: Tuple[float, float, float]
    trials: int = Field(ge=1)
    seed: int = Field(ge=0)
    scheme: int = 1
    decoder: str = "ml"
    search_cap: Optional[int] = Field(None, ge=1)

    @field_validator("rates")
    @classmethod
    def _nonnegative_rates(cls, value):
        if any(not math.isfinite(r) or r < 0 for r in value):
            raise ValueError(f"rates must be finite and nonnegative, got {value}")
        return value

    @field_validator("scheme")
    @classmethod
    def _known_scheme(cls, value: int) -> int:
        if value not in (1, 2):
            raise ValueError(f"scheme must be 1 or 2, got {value}")
        return value

    @field_validator("decoder")
    @classmethod
    def _known_decoder(cls, value: str) -> str:
        if value != "ml":
            raise ValueError(f"unsupported decoder {value!r}; only 'ml' is available")
        return value

    @model_validator(mode="after")
    def _policy_fits(self) -> "SimConfig":
        self.policy.check_fits(self.spec)
        return self

    @property
    def codebook_sizes(self) -> Tuple[int, int, int]:
        """Sizes ceil(2^(nR) - 1e-9) as Python ints.

        Raises:
            SearchSpaceError: If a size is too large for a float.
        """
        sizes = []
        for r in self.rates:
            try:
                sizes.append(max(1, math.ceil(2.0 ** (self.n * r) - SIZE_TOL)))
            except OverflowError:
                raise SearchSpaceError(f"codebook of 2^{self.n * r:g} words cannot be represented") from None
        return tuple(sizes)

    @property
    def achieved_rates(self) -> Tuple[float, float, float]:
        return tuple(math.log2(size) / self.n for size in self.codebook_sizes)

    def check_search_space(self) -> None:
        """Raise SearchSpaceError when the decoder would search too many triples."""
        cap = self.search_cap or load_settings().search_cap
        # the product is at least 2^bits, so huge exponents are rejected before sizing
        bits = sum(self.n * r for r in self.rates)
        if bits > max(math.log2(cap), 64.0) + SIZE_TOL:
            raise SearchSpaceError(f"decoder search space 2^{bits:.6g} exceeds the cap {cap}")
        product = math.prod(self.codebook_sizes)
        if product > cap:
            raise SearchSpaceError(
                f"decoder search space {'x'.join(map(str, self.codebook_sizes))} = {product} "
                f"exceeds the cap {cap}"
            )


@dataclass(frozen=True)
class CodebookSet:
    """Codewords of one trial.

    Attributes:
        x1: Shape (M1, n).
        x2: Shape (M2, n).
        x3: Shape (M1, M2, M3, n), x3[m1, m2, m3] superposed on x1[m1] and x2[m2].
    """
    x1: np.ndarray
    x2: np.ndarray
    x3: np.ndarray


@dataclass(frozen=True)
class TrialOutcome:
    """Decoded message triples of one trial, one per receiver."""
    messages: Messages
    decoded: Tuple[Messages, Messages, Messages]
    first_stage: Optional[Tuple[int, int]] = None

    @property
    def errors(self) -> Tuple[bool, bool, bool]:
        return tuple(self.decoded[u][u] != self.messages[u] for u in range(3))

    @property
    def first_stage_errors(self) -> Optional[Tuple[bool, bool]]:
        if self.first_stage is None:
            return None
        return (self.first_stage[0] != self.messages[1], self.first_stage[1] != self.messages[0])


def _draw_symbols(rng: np.random.Generator, cdf: np.ndarray, size) -> np.ndarray:
    """Sample indices from the last-axis CDFs broadcast against ``size``."""
    u = rng.random(size)
    return np.minimum((u[..., None] >= cdf).sum(axis=-1), cdf.shape[-1] - 1)


def generate_codebooks(config: SimConfig, rng: Optional[np.random.Generator] = None) -> CodebookSet:
    """Draw the three codebooks of one trial.

    Raises:
        SearchSpaceError: If the product of codebook sizes exceeds the cap.
    """
    config.check_search_space()
    if rng is None:
        rng = np.random.Generator(np.random.Philox(config.seed))
    m1, m2, m3 = config.codebook_sizes
    n = config.n
    policy = config.policy
    x1 = _draw_symbols(rng, np.cumsum(policy.p1.values), (m1, n))
    x2 = _draw_symbols(rng, np.cumsum(policy.p2.values), (m2, n))
    cdf3 = np.cumsum(policy.p3given12.values, axis=-1)
    # (M1, M2, n, |X3|) conditional CDFs on the realized primary letters
    cond = cdf3[x1[:, None, :], x2[None, :, :]]
    u = rng.random((m1, m2, m3, n))
    x3 = np.minimum((u[..., None] >= cond[:, :, None, :, :]).sum(axis=-1), cdf3.shape[-1] - 1)
    return CodebookSet(x1=x1, x2=x2, x3=x3)


def _channel_output(spec: CifcDmcSpec, a: np.ndarray, b: np.ndarray, c: np.ndarray, rng) -> np.ndarray:
    """Per-letter outputs, shape (3, n)."""
    laws = spec.transition.values[a, b, c].reshape(len(a), -1)
    cdf = np.cumsum(laws, axis=-1)
    cdf /= cdf[:, -1:]
    flat = np.minimum((rng.random(len(a))[:, None] >= cdf).sum(axis=-1), cdf.shape[-1] - 1)
    return np.array(np.unravel_index(flat, spec.output_sizes))


def _log(values: np.ndarray) -> np.ndarray:
    with np.errstate(divide="ignore"):
        return np.log(values)


def _joint_loglik(law: np.ndarray, codebooks: CodebookSet, y: np.ndarray) -> np.ndarray:
    """Log-likelihood of every message triple, shape (M1, M2, M3)."""
    n = len(y)
    letters = _log(law[..., y])  # (|X1|, |X2|, |X3|, n)
    x1, x2, x3 = codebooks.x1, codebooks.x2, codebooks.x3
    return letters[x1[:, None, None, :], x2[None, :, None, :], x3, np.arange(n)].sum(axis=-1)


def _argmax(values: np.ndarray) -> Tuple[int, ...]:
    return tuple(int(i) for i in np.unravel_index(int(np.argmax(values)), values.shape))


def _first_stage(averaged: np.ndarray, codewords: np.ndarray, y: np.ndarray) -> int:
    # averaged[s, y] is the letter law of y given the other primary symbol s
    return int(np.argmax(_log(averaged[codewords, y]).sum(axis=-1)))


def run_trial(config: SimConfig, codebooks: CodebookSet, messages: Messages, rng: np.random.Generator) -> TrialOutcome:
    """Send one message triple and decode it at every receiver."""
    spec, policy = config.spec, config.policy
    m1, m2, m3 = messages
    a = codebooks.x1[m1]
    b = codebooks.x2[m2]
    c = codebooks.x3[m1, m2, m3]
    outputs = _channel_output(spec, a, b, c, rng)
    laws = [spec.receiver_law(r) for r in (1, 2, 3)]

    decoded = [_argmax(_joint_loglik(laws[r], codebooks, outputs[r])) for r in range(3)]
    first_stage = None
    if config.scheme == 2:
        p1, p2, p3 = policy.p1.values, policy.p2.values, policy.p3given12.values
        v1 = np.einsum("a,abc,abcy->by", p1, p3, laws[0])
        v2 = np.einsum("b,abc,abcy->ay", p2, p3, laws[1])
        hat2 = _first_stage(v1, codebooks.x2, outputs[0])
        hat1 = _first_stage(v2, codebooks.x1, outputs[1])
        r1, r3 = _argmax(_joint_loglik(laws[0], codebooks, outputs[0])[:, hat2, :])
        decoded[0] = (r1, hat2, r3)
        s2, s3 = _argmax(_joint_loglik(laws[1], codebooks, outputs[1])[hat1, :, :])
        decoded[1] = (hat1, s2, s3)
        first_stage = (hat2, hat1)
    return TrialOutcome(messages=messages, decoded=tuple(decoded), first_stage=first_stage)


def wilson_radius(errors: int, trials: int, confidence: float = 0.95) -> float:
    """Half-width of the Wilson score interval for a binomial proportion."""
    z = float(norm.ppf(0.5 + confidence / 2))
    p = errors / trials
    return z / (1 + z * z / trials) * math.sqrt(p * (1 - p) / trials + z * z / (4 * trials * trials))


def _one_trial(config: SimConfig, stream: np.random.SeedSequence) -> TrialOutcome:
    rng = np.random.Generator(np.random.Philox(stream))
    codebooks = generate_codebooks(config, rng)
    messages = tuple(int(rng.integers(size)) for size in config.codebook_sizes)
    return run_trial(config, codebooks, messages, rng)


def estimate_errors(config: SimConfig, workers: Optional[int] = None) -> SimResult:
    """Estimate per-receiver error rates over independent trials.

    Every trial draws fresh codebooks and uniform messages from its own
    stream spawned from the master seed, so the result does not depend on
    the worker count.

    Raises:
        SearchSpaceError: If the product of codebook sizes exceeds the cap.
    """
    config.check_search_space()
    streams = np.random.SeedSequence(config.seed).spawn(config.trials)
    logger.info(
        f"Simulating scheme {config.scheme} at n={config.n}, sizes {config.codebook_sizes}, "
        f"{config.trials} trials"
    )
    outcomes: List[TrialOutcome] = parallel_map(lambda s: _one_trial(config, s), streams, workers)

    counts = np.sum([outcome.errors for outcome in outcomes], axis=0)
    error_rates = tuple(float(k) / config.trials for k in counts)
    worst = int(max(counts))
    first_stage = None
    if config.scheme == 2:
        stage_counts = np.sum([outcome.first_stage_errors for outcome in outcomes], axis=0)
        first_stage = tuple(float(k) / config.trials for k in stage_counts)
    result = SimResult(
        n=config.n,
        scheme=config.scheme,
        rates=config.achieved_rates,
        codebook_sizes=config.codebook_sizes,
        error_rates=error_rates,
        error_rate=max(error_rates),
        trials=config.trials,
        confidence_radius=wilson_radius(worst, config.trials),
        first_stage_error_rates=first_stage,
        seed=config.seed,
    )
    logger.debug(f"n={config.n} error rates {error_rates}")
    return result
