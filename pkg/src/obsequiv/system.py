from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import ShapeError
from .linalg import as_matrix


def _frozen(M):
    M = np.array(M, dtype=float)
    M.flags.writeable = False
    return M


@dataclass(frozen=True, eq=False)
class ObservedSystem:
    """The pair ``(A, C)`` of ``x' = A x``, ``w = C x``.

    Arrays are copied and made read-only on construction.
    """

    A: np.ndarray
    C: np.ndarray
    label: Optional[str] = field(default=None, compare=False)

    def __post_init__(self):
        try:
            A = as_matrix(self.A)
            C = np.array(self.C, dtype=float)
            if C.ndim == 1:
                C = C.reshape(1, -1)
            C = as_matrix(C)
        except ValueError as exc:
            raise ShapeError(str(exc)) from exc
        if A.shape[0] != A.shape[1]:
            raise ShapeError(f"A must be square, got {A.shape}")
        if C.shape[1] != A.shape[0]:
            raise ShapeError(f"C must have {A.shape[0]} columns, got {C.shape}")
        if C.shape[0] < 1:
            raise ShapeError("C must have at least one row")
        object.__setattr__(self, "A", _frozen(A))
        object.__setattr__(self, "C", _frozen(C))

    @property
    def n(self) -> int:
        return self.A.shape[0]

    @property
    def p(self) -> int:
        return self.C.shape[0]

    def transformed(self, P, label=None) -> "ObservedSystem":
        """The system in coordinates ``x = P y``: ``(P^-1 A P, C P)``."""
        P = np.asarray(P, dtype=float)
        return ObservedSystem(np.linalg.solve(P, self.A @ P), self.C @ P, label=label)

    def __eq__(self, other):
        if not isinstance(other, ObservedSystem):
            return NotImplemented
        return (self.A.shape == other.A.shape and self.C.shape == other.C.shape
                and np.array_equal(self.A, other.A) and np.array_equal(self.C, other.C))

    def __hash__(self):
        return hash((self.A.tobytes(), self.C.tobytes(), self.A.shape, self.C.shape))

    def __repr__(self):
        name = f" {self.label!r}" if self.label else ""
        return f"ObservedSystem{name}(n={self.n}, p={self.p})"
