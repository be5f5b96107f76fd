import numpy as np

from .base import FloatArray, Schema
from .chain import StateId


class AbsorptionResult(Schema):
    """
    Probabilities of being absorbed by ``target_u`` (``a_u``) or by
    ``target_d`` (``a_d``) when both are made absorbing, indexed by state.
    """

    target_u: StateId
    target_d: StateId
    a_u: FloatArray
    a_d: FloatArray
    warnings: tuple[str, ...] = ()

    def alpha(self, index: int) -> float:
        """Probability that a walk from ``index`` visits u before d."""
        return float(self.a_u[index])


class VisitCounts(Schema):
    """
    Rows of the fundamental matrix for one destination: entry (s, k) is the
    expected number of visits to k before hitting the destination, from s.
    Rows and columns follow ``states`` (every state except the destination).
    """

    destination: StateId
    states: tuple[StateId, ...]
    rows: FloatArray

    def position(self, index: int) -> int:
        for position, state in enumerate(self.states):
            if state.index == index:
                return position
        raise KeyError(index)

    def row(self, index: int) -> np.ndarray:
        return self.rows[self.position(index)]
