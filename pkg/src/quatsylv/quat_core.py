"""Quaternion scalars and nonstandard involutions.

A quaternion ``w + x i + y j + z k`` is stored as four float64 components.
Everything here is immutable and side-effect free.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidAxis

__all__ = [
    "Quaternion",
    "Involution",
    "qmul",
    "qconj",
    "phi_apply",
    "involution_from_axis",
    "hamilton",
]


def hamilton(a, b):
    """Hamilton product of component arrays with a trailing axis of length 4.

    Broadcasts over leading axes, so it doubles as the entrywise product of
    two quaternion arrays.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    a0, a1, a2, a3 = np.moveaxis(a, -1, 0)
    b0, b1, b2, b3 = np.moveaxis(b, -1, 0)
    return np.stack(
        [
            a0 * b0 - a1 * b1 - a2 * b2 - a3 * b3,
            a0 * b1 + a1 * b0 + a2 * b3 - a3 * b2,
            a0 * b2 - a1 * b3 + a2 * b0 + a3 * b1,
            a0 * b3 + a1 * b2 - a2 * b1 + a3 * b0,
        ],
        axis=-1,
    )


@dataclass(frozen=True)
class Quaternion:
    w: float = 0.0
    x: float = 0.0
    y: float = 0.0
    z: float = 0.0

    @classmethod
    def from_array(cls, arr) -> Quaternion:
        w, x, y, z = (float(v) for v in arr)
        return cls(w, x, y, z)

    def to_array(self) -> np.ndarray:
        return np.array([self.w, self.x, self.y, self.z], dtype=float)

    def to_list(self) -> list[float]:
        return [self.w, self.x, self.y, self.z]

    @property
    def vector(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z], dtype=float)

    def norm2(self) -> float:
        return self.w**2 + self.x**2 + self.y**2 + self.z**2

    def __abs__(self) -> float:
        return math.sqrt(self.norm2())

    def __add__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        return Quaternion(self.w + other.w, self.x + other.x,
                          self.y + other.y, self.z + other.z)

    __radd__ = __add__

    def __neg__(self):
        return Quaternion(-self.w, -self.x, -self.y, -self.z)

    def __sub__(self, other):
        other = _coerce(other)
        return other if other is NotImplemented else self + (-other)

    def __rsub__(self, other):
        other = _coerce(other)
        return other if other is NotImplemented else other + (-self)

    def __mul__(self, other):
        other = _coerce(other)
        return other if other is NotImplemented else qmul(self, other)

    def __rmul__(self, other):
        other = _coerce(other)
        return other if other is NotImplemented else qmul(other, self)

    def conj(self) -> Quaternion:
        return qconj(self)

    def isclose(self, other, atol=1e-12) -> bool:
        other = _coerce(other)
        return bool(np.allclose(self.to_array(), other.to_array(), rtol=0, atol=atol))


def _coerce(value) -> Quaternion:
    if isinstance(value, Quaternion):
        return value
    if isinstance(value, (int, float, np.floating, np.integer)):
        return Quaternion(float(value))
    return NotImplemented


ONE = Quaternion(1.0)
I = Quaternion(0.0, 1.0)
J = Quaternion(0.0, 0.0, 1.0)
K = Quaternion(0.0, 0.0, 0.0, 1.0)


def qmul(a: Quaternion, b: Quaternion) -> Quaternion:
    """Hamilton product ``a * b`` (order matters)."""
    return Quaternion.from_array(hamilton(a.to_array(), b.to_array()))


def qconj(a: Quaternion) -> Quaternion:
    return Quaternion(a.w, -a.x, -a.y, -a.z)


@dataclass(frozen=True)
class Involution:
    """Nonstandard involution determined by the unit axis it negates.

    The map fixes the real part and reflects the vector part through the
    plane orthogonal to ``axis``; its real matrix is ``diag(1, I - 2 n n^T)``.
    Build instances through :func:`involution_from_axis`.
    """

    axis: tuple[float, float, float]

    def __post_init__(self):
        n = np.asarray(self.axis, dtype=float)
        if n.shape != (3,) or abs(np.linalg.norm(n) - 1.0) > 1e-12:
            raise InvalidAxis(f"involution axis must be a unit 3-vector, got {self.axis!r}")

    @property
    def reflection(self) -> np.ndarray:
        n = np.asarray(self.axis, dtype=float)
        return np.eye(3) - 2.0 * np.outer(n, n)

    @property
    def matrix(self) -> np.ndarray:
        """4x4 real matrix acting on ``[w, x, y, z]``."""
        out = np.eye(4)
        out[1:, 1:] = self.reflection
        return out

    def apply_components(self, arr) -> np.ndarray:
        """Apply the involution to component arrays of shape ``(..., 4)``."""
        arr = np.asarray(arr, dtype=float)
        n = np.asarray(self.axis, dtype=float)
        out = arr.copy()
        v = arr[..., 1:]
        out[..., 1:] = v - 2.0 * (v @ n)[..., None] * n
        return out

    def __call__(self, q: Quaternion) -> Quaternion:
        return phi_apply(self, q)

    def to_list(self) -> list[float]:
        return [float(v) for v in self.axis]


def phi_apply(inv: Involution, a: Quaternion) -> Quaternion:
    return Quaternion.from_array(inv.apply_components(a.to_array()))


def involution_from_axis(n) -> Involution:
    """Normalise ``n`` and return the involution that negates it.

    >>> involution_from_axis((0, 0, 2)).axis
    (0.0, 0.0, 1.0)
    """
    n = np.asarray(n, dtype=float).reshape(-1)
    if n.shape != (3,):
        raise InvalidAxis(f"axis must have three components, got {n.size}")
    length = float(np.linalg.norm(n))
    if not np.isfinite(length) or length == 0.0:
        raise InvalidAxis("axis must be a nonzero finite 3-vector")
    n = n / length
    return Involution(tuple(float(v) for v in n))
