from typing import Any, Union

import numpy as np
from pydantic import Field, model_validator

from trajent.utils.errors import (
    DuplicateLabel,
    InputError,
    NegativeEntry,
    NonSquare,
    RowSumViolation,
    UnknownState,
)

from .base import FloatArray, Schema

ROW_SUM_TOLERANCE = 1e-9


class StateId(Schema):
    index: int = Field(..., ge=0, description="Row/column of the state")
    label: str = Field(..., description="Display name of the state")

    def __str__(self) -> str:
        return self.label


StateRef = Union[StateId, int, str]
"""A state given as a StateId, an integer index or a string label."""


class MarkovChain(Schema):
    """
    A finite Markov chain: state labels plus a row-stochastic matrix.

    Rows whose sum is within 1e-9 of one are renormalized on construction;
    anything further off is rejected. Instances are immutable.
    """

    labels: tuple[str, ...]
    matrix: FloatArray

    @model_validator(mode="before")
    @classmethod
    def _validate_matrix(cls, data: Any) -> Any:
        if not isinstance(data, dict):
            return data
        try:
            matrix = np.array(data.get("matrix"), dtype=np.float64)
        except (TypeError, ValueError) as exc:
            raise NonSquare(shape=("ragged",)) from exc
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1] or matrix.size == 0:
            raise NonSquare(shape=matrix.shape)
        n = matrix.shape[0]

        labels = data.get("labels")
        if labels is None:
            labels = tuple(str(i + 1) for i in range(n))
        labels = tuple(labels)
        if len(labels) != n:
            raise InputError(f"{len(labels)} labels given for {n} states")
        seen = set()
        for label in labels:
            if label in seen:
                raise DuplicateLabel(label)
            seen.add(label)

        bad = ~np.isfinite(matrix) | (matrix < 0)
        if bad.any():
            row, col = (int(x) for x in np.argwhere(bad)[0])
            raise NegativeEntry(row, col, float(matrix[row, col]))

        totals = matrix.sum(axis=1)
        off = np.abs(totals - 1.0) > ROW_SUM_TOLERANCE
        if off.any():
            row = int(np.flatnonzero(off)[0])
            raise RowSumViolation(row, float(totals[row]))
        matrix /= totals[:, np.newaxis]
        matrix.setflags(write=False)

        return {"labels": labels, "matrix": matrix}

    @property
    def n_states(self) -> int:
        return len(self.labels)

    @property
    def states(self) -> list[StateId]:
        return [StateId(index=i, label=label) for i, label in enumerate(self.labels)]

    def index_of(self, state: StateRef) -> int:
        """Resolve a state reference; integers are indices, strings are labels."""
        if isinstance(state, StateId):
            if state.index < self.n_states and self.labels[state.index] == state.label:
                return state.index
        elif isinstance(state, str):
            try:
                return self.labels.index(state)
            except ValueError:
                pass
        elif isinstance(state, (int, np.integer)) and not isinstance(state, bool):
            if 0 <= state < self.n_states:
                return int(state)
        raise UnknownState(state)

    def state(self, state: StateRef) -> StateId:
        index = self.index_of(state)
        return StateId(index=index, label=self.labels[index])

    def row(self, state: StateRef) -> np.ndarray:
        return self.matrix[self.index_of(state)]


class Distribution(Schema):
    """A probability vector over the states of a chain."""

    labels: tuple[str, ...]
    probs: FloatArray

    @model_validator(mode="after")
    def _check_probabilities(self) -> "Distribution":
        if self.probs.shape != (len(self.labels),):
            raise InputError("distribution length does not match its labels")
        if (self.probs < 0).any() or abs(self.probs.sum() - 1.0) > ROW_SUM_TOLERANCE:
            raise InputError("distribution entries must be non-negative and sum to 1")
        return self

    def __getitem__(self, label: str) -> float:
        return float(self.probs[self.labels.index(label)])
