from __future__ import annotations

from dataclasses import dataclass, fields
from typing import Any


@dataclass
class BoundsRecord:
    map: str
    r: float
    h_estimate: float | None
    h_method: str | None
    R_estimate: float | None
    yomdin_bound: float | None
    max_bound: float | None
    beta_estimate: float | None
    lambda_p: str  # ';'-joined λ(p) values
    flags: str  # ';'-joined
    error: str | None = None


@dataclass
class SequenceRecord:
    method: str
    n: int
    value: float | None


@dataclass
class JumpRecord:
    l: int
    delta: float
    a: float | None
    N: int | None
    cr_distance: float | None
    certified_entropy: float | None
    theoretical_chain: float | None
    lambda_over_r: float | None
    status: str  # ok|skipped|error
    error: str | None = None


@dataclass
class NoJumpRecord:
    sample: int
    center: float
    half_width: float
    amplitude: float
    cr_distance: float | None
    entropy_lap: float | None
    h_reference: float
    status: str
    error: str | None = None


def record_columns(cls: type) -> list[str]:
    return [f.name for f in fields(cls)]


def record_to_row(rec: Any) -> list[Any]:
    return [getattr(rec, name) for name in record_columns(type(rec))]


def record_to_json(rec: Any) -> dict[str, Any]:
    return dict(rec.__dict__)
