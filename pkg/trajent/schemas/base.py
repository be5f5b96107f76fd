from typing import Annotated

import numpy as np
from pydantic import BaseModel, BeforeValidator, ConfigDict, Field, PlainSerializer


def _as_readonly_array(value) -> np.ndarray:
    if (
        isinstance(value, np.ndarray)
        and value.dtype == np.float64
        and not value.flags.writeable
    ):
        return value
    array = np.array(value, dtype=np.float64)
    array.setflags(write=False)
    return array


FloatArray = Annotated[
    np.ndarray,
    BeforeValidator(_as_readonly_array),
    PlainSerializer(lambda a: a.tolist(), return_type=list, when_used="json"),
]
"""A read-only float64 array that serializes to nested lists in JSON."""

EntropyBits = Annotated[float, Field(ge=0, description="Shannon entropy in bits")]
Probability = Annotated[float, Field(ge=0, le=1)]


class Schema(BaseModel):
    """Base for the immutable value objects passed between handlers."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)
