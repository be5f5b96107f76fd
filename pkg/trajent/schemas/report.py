from typing import Any, Literal

from pydantic import Field

from .base import Schema

Command = Literal["entropy", "cond", "alpha", "inspect", "simulate"]


class ChainSummary(Schema):
    path: str
    n_states: int = Field(..., ge=1)
    labels: tuple[str, ...]


class OutputReport(Schema):
    """
    JSON envelope printed by every command with ``--format json``.

    Numbers in ``results`` and ``diagnostics`` are full precision;
    ``precision`` only records the rounding used for text output.
    """

    command: Command
    chain: ChainSummary
    query: dict[str, Any] = Field(default_factory=dict)
    results: dict[str, Any] = Field(default_factory=dict)
    diagnostics: dict[str, Any] = Field(default_factory=dict)
    precision: int = Field(4, ge=0, le=17)


class ErrorDetail(Schema):
    reason: str
    detail: str
    exit_code: int


class ErrorReport(Schema):
    error: ErrorDetail
