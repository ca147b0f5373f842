from abc import ABC, abstractmethod
from typing import Any, ClassVar

import numpy as np
from pydantic import BaseModel, ConfigDict, model_validator

from subspaces.matrix import as_float, as_matrix, is_exact


class BaseSystem(BaseModel, ABC):
    """Abstract base class for all state-space system descriptions"""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    # matrix name -> (rows, cols) used to shape omitted or empty matrices;
    # "n" stands for the state dimension read from A
    empty_shapes: ClassVar[dict[str, tuple[Any, Any]]] = {}

    @model_validator(mode="before")
    @classmethod
    def _coerce_matrices(cls, data: Any) -> Any:
        if not isinstance(data, dict):
            return data
        data = dict(data)
        if "A" not in data:
            raise ValueError("A is required")
        try:
            A = as_matrix(data["A"])
        except ValueError as e:
            raise ValueError(f"A: {e}") from e
        data["A"] = A
        n = A.shape[0]
        for name, hint in cls.empty_shapes.items():
            shape = tuple(n if d == "n" else d for d in hint)
            value = data.get(name)
            if value is None:
                data[name] = as_matrix([], shape=shape)
            else:
                try:
                    data[name] = as_matrix(value, shape=shape)
                except ValueError as e:
                    raise ValueError(f"{name}: {e}") from e
        return data

    @property
    def n(self) -> int:
        """State dimension."""
        return self.A.shape[0]

    @property
    def s(self) -> int:
        """Driving-variable dimension."""
        return self.G.shape[1]

    @abstractmethod
    def expected_shapes(self) -> dict[str, tuple[int, int]]:
        """Shape every matrix must have given the dimensions read off the system"""
        pass

    def matrices(self) -> dict[str, np.ndarray]:
        return {name: getattr(self, name) for name in self.expected_shapes()}

    def numeric(self, name: str) -> np.ndarray:
        return as_float(getattr(self, name))

    @property
    def exact(self) -> bool:
        return any(is_exact(M) for M in self.matrices().values())
