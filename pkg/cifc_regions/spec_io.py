"""Channel spec files.

A spec file is one JSON document holding exactly one of::

    {"dmc": {"alphabets": {"x1": 2, "x2": 2, "x3": 2, "y1": 2, "y2": 2, "y3": 2},
             "transition": [[[[[[...]]]]]]},
     "policy": {"p1": [...], "p2": [...], "p3given12": [[[...]]]}}

    {"gaussian": {"gains": [[h11, h12, h13], [h21, h22, h23], [h31, h32, h33]],
                  "powers": [P1, P2, P3]}}

The transition is nested in the fixed order [x1][x2][x3][y1][y2][y3] and
``gains[t][r]`` is the gain from transmitter t+1 to receiver r+1. The optional
``policy`` is only allowed next to a ``dmc`` channel.
"""

import hashlib
import json
import logging
from dataclasses import dataclass
from typing import Any, List, Optional, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from .dmc import CifcDmcSpec, InputPolicy
from .models import GaussianCifcSpec

logger = logging.getLogger(__name__)


class SpecFormatError(ValueError):
    """A spec file cannot be read or does not follow the format."""


class Alphabets(BaseModel):
    model_config = ConfigDict(extra="forbid")

    x1: int = Field(ge=1)
    x2: int = Field(ge=1)
    x3: int = Field(ge=1)
    y1: int = Field(ge=1)
    y2: int = Field(ge=1)
    y3: int = Field(ge=1)

    def shape(self):
        return (self.x1, self.x2, self.x3, self.y1, self.y2, self.y3)


class DmcDocument(BaseModel):
    model_config = ConfigDict(extra="forbid")

    alphabets: Alphabets
    transition: List[Any]


class PolicyDocument(BaseModel):
    model_config = ConfigDict(extra="forbid")

    p1: List[float]
    p2: List[float]
    p3given12: List[Any]


class SpecDocument(BaseModel):
    """Top-level schema of a spec file.

    Attributes:
        dmc (Optional[DmcDocument]): Discrete channel.
        gaussian (Optional[GaussianCifcSpec]): Gaussian channel.
        policy (Optional[PolicyDocument]): Input policy for a discrete channel.
    """
    model_config = ConfigDict(extra="forbid")

    dmc: Optional[DmcDocument] = None
    gaussian: Optional[GaussianCifcSpec] = None
    policy: Optional[PolicyDocument] = None

    @model_validator(mode="after")
    def _exactly_one_channel(self) -> "SpecDocument":
        if (self.dmc is None) == (self.gaussian is None):
            raise ValueError('exactly one of "dmc" and "gaussian" must be present')
        if self.policy is not None and self.dmc is None:
            raise ValueError('"policy" is only allowed with a "dmc" channel')
        return self


@dataclass(frozen=True)
class LoadedSpec:
    """A parsed spec file.

    Attributes:
        channel: The discrete or Gaussian channel.
        policy: Input policy given in the file, if any.
        digest: SHA-256 hex digest of the file bytes.
        source: Path or label the spec was read from.
    """
    channel: Union[CifcDmcSpec, GaussianCifcSpec]
    policy: Optional[InputPolicy]
    digest: str
    source: str

    @property
    def kind(self) -> str:
        return "gaussian" if isinstance(self.channel, GaussianCifcSpec) else "dmc"


def _field_path(error: dict) -> str:
    return ".".join(str(part) for part in error["loc"]) or "<root>"


def _array(values, field: str, source: str, shape=None) -> np.ndarray:
    try:
        array = np.asarray(values, dtype=float)
    except (TypeError, ValueError):
        raise SpecFormatError(f"{source}: {field} is not a rectangular numeric array") from None
    if shape is not None and array.shape != tuple(shape):
        raise SpecFormatError(f"{source}: {field} has shape {array.shape}, expected {tuple(shape)}")
    return array


def parse_spec(text: Union[str, bytes], source: str = "<spec>") -> LoadedSpec:
    """Parse a spec document.

    Raises:
        SpecFormatError: On JSON syntax errors (with line and column), schema
            violations (with the field path) or array shape mismatches.
        InvalidDistributionError: If the transition or policy is not a law.
    """
    raw = text.encode("utf-8") if isinstance(text, str) else text
    digest = hashlib.sha256(raw).hexdigest()
    try:
        data = json.loads(raw)
    except json.JSONDecodeError as e:
        raise SpecFormatError(f"{source}: line {e.lineno} column {e.colno}: {e.msg}") from None
    except UnicodeDecodeError as e:
        raise SpecFormatError(f"{source}: not UTF-8 text ({e.reason})") from None
    try:
        document = SpecDocument.model_validate(data)
    except ValidationError as e:
        first = e.errors()[0]
        raise SpecFormatError(f"{source}: {_field_path(first)}: {first['msg']}") from None

    if document.gaussian is not None:
        logger.info(f"Loaded Gaussian spec from {source}")
        return LoadedSpec(channel=document.gaussian, policy=None, digest=digest, source=source)

    shape = document.dmc.alphabets.shape()
    channel = CifcDmcSpec.from_array(_array(document.dmc.transition, "dmc.transition", source, shape))
    policy = None
    if document.policy is not None:
        x1, x2, x3 = shape[:3]
        policy = InputPolicy.from_arrays(
            _array(document.policy.p1, "policy.p1", source, (x1,)),
            _array(document.policy.p2, "policy.p2", source, (x2,)),
            _array(document.policy.p3given12, "policy.p3given12", source, (x1, x2, x3)),
        )
    logger.info(f"Loaded DMC spec with alphabets {shape} from {source}")
    return LoadedSpec(channel=channel, policy=policy, digest=digest, source=source)


def load_spec(path: str) -> LoadedSpec:
    """Read and parse a spec file.

    Raises:
        SpecFormatError: If the file cannot be read or parsed.
    """
    try:
        with open(path, "rb") as f:
            raw = f.read()
    except OSError as e:
        raise SpecFormatError(f"cannot read {path}: {e.strerror}") from None
    return parse_spec(raw, source=path)


def dump_spec(
    channel: Union[CifcDmcSpec, GaussianCifcSpec],
    policy: Optional[InputPolicy] = None,
) -> str:
    """Serialize a channel (and optional policy) to spec-file JSON."""
    if isinstance(channel, GaussianCifcSpec):
        if policy is not None:
            raise ValueError("a policy can only be stored with a discrete channel")
        document = {"gaussian": {"gains": [list(row) for row in channel.gains], "powers": list(channel.powers)}}
    else:
        names = ("x1", "x2", "x3", "y1", "y2", "y3")
        document = {
            "dmc": {
                "alphabets": dict(zip(names, channel.transition.dims)),
                "transition": channel.transition.values.tolist(),
            }
        }
        if policy is not None:
            document["policy"] = {
                "p1": policy.p1.values.tolist(),
                "p2": policy.p2.values.tolist(),
                "p3given12": policy.p3given12.values.tolist(),
            }
    return json.dumps(document, indent=2)
