from typing import List

import numpy as np
from pydantic import Field, model_validator

from trajent.utils.errors import DestinationInVia

from .base import EntropyBits, FloatArray, Probability, Schema
from .chain import StateId


class EntropyMatrix(Schema):
    """Trajectory entropies: entry (s, d) is the entropy of T_sd in bits."""

    labels: tuple[str, ...]
    values: FloatArray

    @property
    def n_states(self) -> int:
        return len(self.labels)

    def entry(self, source: str, destination: str) -> float:
        return float(
            self.values[self.labels.index(source), self.labels.index(destination)]
        )

    def row(self, source: str) -> np.ndarray:
        return self.values[self.labels.index(source)]


class CondQuery(Schema):
    """Trajectories from ``source`` to ``destination`` through ``via`` in order."""

    source: StateId
    destination: StateId
    via: tuple[StateId, ...] = ()

    @model_validator(mode="after")
    def _destination_not_intermediate(self) -> "CondQuery":
        if any(u.index == self.destination.index for u in self.via):
            raise DestinationInVia(
                f"destination {self.destination.label} cannot be an intermediate "
                "state: trajectories stop on reaching it"
            )
        return self


class CondResult(Schema):
    """
    Conditional trajectory entropy split into its legs: one avoid-destination
    leg per intermediate state, then the final leg to the destination.
    """

    query: CondQuery
    entropy: EntropyBits
    per_leg: List[EntropyBits]
    alphas: List[Probability] = Field(
        default_factory=list,
        description="Per leg, probability of hitting the destination first",
    )
    probability: Probability = Field(
        1.0, description="Probability that the unconditioned trajectory shows via"
    )
    warnings: tuple[str, ...] = ()
