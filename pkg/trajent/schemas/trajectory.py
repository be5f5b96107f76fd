from typing import Optional

from pydantic import Field, model_validator

from trajent.utils.errors import InputError

from .base import FloatArray, Probability, Schema


class Trajectory(Schema):
    """A path by state index that stops on its first arrival at the destination."""

    states: tuple[int, ...]
    probability: float = Field(..., gt=0, le=1)

    @model_validator(mode="after")
    def _check_path(self) -> "Trajectory":
        if len(self.states) < 2:
            raise InputError("a trajectory has at least two states")
        if self.destination in self.states[1:-1]:
            raise InputError("a trajectory cannot visit its destination twice")
        return self

    @property
    def source(self) -> int:
        return self.states[0]

    @property
    def destination(self) -> int:
        return self.states[-1]

    @property
    def interior(self) -> tuple[int, ...]:
        return self.states[1:-1]


class OracleConfig(Schema):
    residual_mass_bound: float = Field(1e-12, gt=0, lt=1)
    max_path_length: Optional[int] = Field(
        None, ge=1, description="Defaults to 10 * N**2 for an N-state chain"
    )
    max_paths: int = Field(10_000_000, ge=1)


class EnumerationResult(Schema):
    """
    Trajectories found by enumeration, in discovery order.

    ``lost_mass`` went to states that cannot reach the destination;
    ``uncovered_mass`` is still sitting in unexpanded or abandoned prefixes.
    """

    source: int
    destination: int
    trajectories: list[Trajectory]
    covered_mass: float
    lost_mass: float = 0.0
    uncovered_mass: float = 0.0
    residual_mass_bound: float = 1e-12
    truncated: bool = False


class WalkStatistics(Schema):
    """Monte-Carlo estimates from walks absorbed at ``destination``."""

    source: int
    destination: int
    n_walks: int
    seed: int
    mean_visits: FloatArray
    visits_stderr: FloatArray
    hit_fraction: FloatArray
    hit_stderr: FloatArray
    truncated_fraction: Probability = 0.0
