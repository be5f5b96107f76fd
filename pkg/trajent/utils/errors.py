"""Exception hierarchy shared by the handlers and the command line.

Every failure carries a ``detail`` message for humans, a stable ``reason``
tag for machines and the process ``exit_code`` the CLI terminates with.
"""

from typing import Sequence


class TrajentError(Exception):
    exit_code: int = 1
    reason: str = "error"

    def __init__(self, detail: str):
        super().__init__(detail)
        self.detail = detail

    def to_dict(self) -> dict:
        return {
            "reason": self.reason,
            "detail": self.detail,
            "exit_code": self.exit_code,
        }


class InputError(TrajentError):
    exit_code = 2
    reason = "input_error"


class InfeasibleQuery(TrajentError):
    exit_code = 3
    reason = "infeasible_query"


class NumericalFailure(TrajentError):
    exit_code = 4
    reason = "numerical_failure"


# --- input errors -----------------------------------------------------------


class ChainFileError(InputError):
    reason = "chain_file"


class NonSquare(InputError):
    reason = "non_square"

    def __init__(self, shape: tuple):
        super().__init__(f"transition matrix must be square, got shape {shape}")
        self.shape = shape


class NegativeEntry(InputError):
    reason = "negative_entry"

    def __init__(self, row: int, col: int, value: float):
        super().__init__(f"entry ({row}, {col}) is negative or not finite: {value!r}")
        self.row, self.col, self.value = row, col, value


class RowSumViolation(InputError):
    reason = "row_sum"

    def __init__(self, row: int, total: float):
        super().__init__(f"row {row} sums to {total!r}, expected 1")
        self.row, self.total = row, total


class DuplicateLabel(InputError):
    reason = "duplicate_label"

    def __init__(self, label: str):
        super().__init__(f"state label {label!r} is used more than once")
        self.label = label


class UnknownState(InputError):
    reason = "unknown_state"

    def __init__(self, state):
        super().__init__(f"unknown state {state!r}")
        self.state = state


class DestinationRevisited(InputError):
    reason = "destination_revisited"


class TargetsEqual(InputError):
    reason = "targets_equal"


class StatesNotDistinct(InputError):
    reason = "states_not_distinct"


class DestinationInVia(InputError):
    reason = "destination_in_via"


class OutOfRange(InputError):
    reason = "out_of_range"

    def __init__(self, name: str, value):
        super().__init__(f"{name} is out of range: {value!r}")
        self.name, self.value = name, value


# --- infeasible queries -----------------------------------------------------


class NotIrreducible(InfeasibleQuery):
    reason = "not_irreducible"


class SourceCannotReachDestination(InfeasibleQuery):
    reason = "source_cannot_reach_destination"


class DestinationUnreachable(InfeasibleQuery):
    reason = "destination_unreachable"

    def __init__(self, states: Sequence[str]):
        super().__init__(
            "destination cannot be reached from state(s) " + ", ".join(states)
        )
        self.states = list(states)


class AbsorptionNotCertain(InfeasibleQuery):
    reason = "absorption_not_certain"

    def __init__(self, states: Sequence[str]):
        super().__init__(
            "absorption is not certain from state(s) " + ", ".join(states)
        )
        self.states = list(states)


class AlwaysPassesThroughU(InfeasibleQuery):
    reason = "always_passes_through"


class NeverPassesThroughU(InfeasibleQuery):
    reason = "never_passes_through"


class ImpossibleConditioning(InfeasibleQuery):
    reason = "impossible_conditioning"

    def __init__(self, detail: str, leg: int | None = None):
        super().__init__(detail)
        self.leg = leg


class InsufficientCoverage(InfeasibleQuery):
    reason = "insufficient_coverage"

    def __init__(self, covered_mass: float, required: float):
        super().__init__(
            f"enumeration covers {covered_mass!r} of the probability mass, "
            f"at least {required!r} is required"
        )
        self.covered_mass = covered_mass


class LimitsExceeded(InfeasibleQuery):
    reason = "limits_exceeded"

    def __init__(self, detail: str, partial=None):
        super().__init__(detail)
        self.partial = partial


class StepLimitExceeded(InfeasibleQuery):
    reason = "step_limit_exceeded"

    def __init__(self, fraction: float):
        super().__init__(f"{fraction:.1%} of the walks hit the step limit")
        self.fraction = fraction


# --- numerical failures -----------------------------------------------------


class SingularSystem(NumericalFailure):
    reason = "singular_system"
