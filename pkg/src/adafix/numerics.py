"""Dense float64 vector arithmetic, seeded randomness, and finite-difference
gradient oracles.

Everything downstream (objectives, optimizers, analysis) is built on the two
types here. All arithmetic is 64-bit: the experiments in this package watch
second momenta shrink over thousands of steps, and 32-bit drift would
confound them.
"""

from __future__ import annotations

from typing import Callable, Iterator, Sequence, Union

import numpy as np

from .errors import (
    DimensionMismatch,
    DivisionByZero,
    InvalidParameter,
    NonFiniteError,
    NonFiniteEvaluation,
)

Array = np.ndarray
VectorLike = Union["ParamVector", Sequence[float], Array]


class ParamVector:
    """Immutable 1-d float64 vector carrying parameters, gradients or momenta.

    Invariants: dim >= 1 and every entry finite. Elementwise operations
    require equal dims and always return a fresh vector, so instances are
    safe to share across threads.
    """

    __slots__ = ("_data",)

    def __init__(self, values: VectorLike):
        if isinstance(values, ParamVector):
            self._data = values._data
            return
        arr = np.array(values, dtype=np.float64, copy=True)
        if arr.ndim == 0:
            arr = arr.reshape(1)
        if arr.ndim != 1 or arr.size < 1:
            raise InvalidParameter(
                f"ParamVector requires a 1-d sequence with dim >= 1, got shape {arr.shape}"
            )
        if not np.all(np.isfinite(arr)):
            raise NonFiniteError(f"ParamVector entries must be finite, got {arr!r}")
        arr.flags.writeable = False
        self._data = arr

    @classmethod
    def zeros(cls, dim: int) -> "ParamVector":
        if dim < 1:
            raise InvalidParameter(f"dim must be >= 1, got {dim}")
        return cls(np.zeros(dim))

    @property
    def data(self) -> Array:
        """Read-only float64 view of the entries."""
        return self._data

    @property
    def dim(self) -> int:
        return self._data.size

    def __len__(self) -> int:
        return self._data.size

    def __iter__(self) -> Iterator[float]:
        return iter(self._data.tolist())

    def __getitem__(self, i: int) -> float:
        return float(self._data[i])

    def __repr__(self) -> str:
        return f"ParamVector({self._data.tolist()!r})"

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ParamVector):
            return NotImplemented
        return self.dim == other.dim and bool(np.array_equal(self._data, other._data))

    def __hash__(self) -> int:
        return hash((self.dim, self._data.tobytes()))

    # -- arithmetic ---------------------------------------------------------

    def _peer(self, other: "ParamVector") -> Array:
        if not isinstance(other, ParamVector):
            raise TypeError(f"expected ParamVector, got {type(other).__name__}")
        if other.dim != self.dim:
            raise DimensionMismatch(f"dims differ: {self.dim} vs {other.dim}")
        return other._data

    def __add__(self, other: "ParamVector") -> "ParamVector":
        return ParamVector(self._data + self._peer(other))

    def __sub__(self, other: "ParamVector") -> "ParamVector":
        return ParamVector(self._data - self._peer(other))

    def __mul__(self, other: Union["ParamVector", float]) -> "ParamVector":
        if isinstance(other, ParamVector):
            return ParamVector(self._data * self._peer(other))
        return ParamVector(self._data * float(other))

    __rmul__ = __mul__

    def __truediv__(self, other: Union["ParamVector", float]) -> "ParamVector":
        if isinstance(other, ParamVector):
            denom = self._peer(other)
            if np.any(denom == 0.0):
                raise DivisionByZero("elementwise division by zero denominator")
            return ParamVector(self._data / denom)
        if float(other) == 0.0:
            raise DivisionByZero("division by zero scalar")
        return ParamVector(self._data / float(other))

    def __neg__(self) -> "ParamVector":
        return ParamVector(-self._data)


_ELEMENTWISE_OPS: dict[str, Callable[[Array, Array], Array]] = {
    "add": np.add,
    "sub": np.subtract,
    "mul": np.multiply,
    "max": np.maximum,
}


def elementwise(op: str, a: ParamVector, b: ParamVector) -> ParamVector:
    """Apply a named componentwise operation: add, sub, mul, div or max."""
    if op == "div":
        return a / b
    try:
        fn = _ELEMENTWISE_OPS[op]
    except KeyError:
        raise InvalidParameter(f"unknown elementwise op {op!r}") from None
    if a.dim != b.dim:
        raise DimensionMismatch(f"dims differ: {a.dim} vs {b.dim}")
    return ParamVector(fn(a.data, b.data))


def norm2(a: ParamVector) -> float:
    """Euclidean norm sqrt(sum a_i^2)."""
    return float(np.linalg.norm(a.data))


def dot(a: ParamVector, b: ParamVector) -> float:
    if a.dim != b.dim:
        raise DimensionMismatch(f"dims differ: {a.dim} vs {b.dim}")
    return float(a.data @ b.data)


def fd_gradient(f, x: ParamVector, h: float | None = None) -> ParamVector:
    """Central-difference gradient of ``f`` at ``x``.

    ``f`` may be a plain callable or any object with a ``value(x)`` method.
    The default per-coordinate step is 1e-6 * max(1, |x_i|), which balances
    truncation against rounding at double precision; pass ``h`` to force a
    uniform step.

    Raises NonFiniteEvaluation if ``f`` returns NaN/Inf at any probe point.
    """
    fn = getattr(f, "value", f)
    if h is not None and h <= 0:
        raise InvalidParameter(f"h must be positive, got {h}")
    base = x.data
    grad = np.empty(x.dim)
    for i in range(x.dim):
        hi = h if h is not None else 1e-6 * max(1.0, abs(base[i]))
        probe = base.copy()
        probe[i] = base[i] + hi
        f_plus = float(fn(ParamVector(probe)))
        probe[i] = base[i] - hi
        f_minus = float(fn(ParamVector(probe)))
        if not (np.isfinite(f_plus) and np.isfinite(f_minus)):
            raise NonFiniteEvaluation(
                f"objective returned non-finite value near coordinate {i} of {x!r}"
            )
        grad[i] = (f_plus - f_minus) / (2.0 * hi)
    return ParamVector(grad)


class Rng:
    """Deterministic pseudo-random stream; identical seed, identical samples."""

    __slots__ = ("seed", "_gen")

    def __init__(self, seed: int):
        if seed < 0 or seed >= 2**64:
            raise InvalidParameter(f"seed must fit in 64 unsigned bits, got {seed}")
        self.seed = int(seed)
        self._gen = np.random.default_rng(self.seed)

    def standard_normal(self, size: int | None = None):
        return self._gen.standard_normal(size)

    def uniform(self, low: float = 0.0, high: float = 1.0, size: int | None = None):
        return self._gen.uniform(low, high, size)

    def integers(self, low: int, high: int | None = None, size: int | None = None):
        return self._gen.integers(low, high, size)

    def spawn(self) -> "Rng":
        """Child stream with a derived seed (for parallel cases)."""
        return Rng(int(self._gen.integers(0, 2**63)))
