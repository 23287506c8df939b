"""Quaternion value algebra.

Quaternions are scalar-first, ``[q0, q1, q2, q3]``, with the Hamilton
product (``i*j = k``).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

UNIT_TOL = 1e-9
NORMALIZE_TOL = 1e-6


class QuaternionError(ValueError):
    """Raised for invalid quaternion values or undefined operations."""


@dataclass(frozen=True, slots=True, eq=False)
class Quaternion:
    q0: float
    q1: float
    q2: float
    q3: float

    def __post_init__(self):
        for name in ("q0", "q1", "q2", "q3"):
            v = float(getattr(self, name))
            if not math.isfinite(v):
                raise QuaternionError(f"non-finite quaternion component {name}={v}")
            object.__setattr__(self, name, v)

    @classmethod
    def from_seq(cls, values: Iterable[float]) -> "Quaternion":
        vals = [float(v) for v in values]
        if len(vals) != 4:
            raise QuaternionError(f"expected 4 components, got {len(vals)}")
        return cls(*vals)

    @classmethod
    def vector(cls, v: Iterable[float]) -> "Quaternion":
        """Vector (pure imaginary) quaternion ``[0, v]``."""
        v1, v2, v3 = (float(x) for x in v)
        return cls(0.0, v1, v2, v3)

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.q0, self.q1, self.q2, self.q3)

    @property
    def real(self) -> float:
        return self.q0

    @property
    def imag(self) -> tuple[float, float, float]:
        return (self.q1, self.q2, self.q3)

    def __iter__(self):
        return iter(self.as_tuple())

    # unit and plain quaternions with equal components compare equal
    def __eq__(self, other):
        if not isinstance(other, Quaternion):
            return NotImplemented
        return self.as_tuple() == other.as_tuple()

    def __hash__(self):
        return hash(self.as_tuple())

    def __add__(self, other: "Quaternion") -> "Quaternion":
        return quat_add(self, other)

    def __sub__(self, other: "Quaternion") -> "Quaternion":
        return quat_add(self, quat_scale(-1.0, other))

    def __neg__(self) -> "Quaternion":
        return quat_scale(-1.0, self)

    def __mul__(self, other):
        if isinstance(other, Quaternion):
            return quat_mul(self, other)
        return quat_scale(other, self)

    def __rmul__(self, other):
        return quat_scale(other, self)

    def conjugate(self) -> "Quaternion":
        return conjugate(self)

    def __abs__(self) -> float:
        return magnitude(self)


@dataclass(frozen=True, slots=True, eq=False)
class UnitQuaternion(Quaternion):
    """A quaternion of magnitude one (checked to ``UNIT_TOL`` on construction)."""

    def __post_init__(self):
        Quaternion.__post_init__(self)
        dev = abs(magnitude(self) - 1.0)
        if dev > UNIT_TOL:
            raise QuaternionError(f"not a unit quaternion: | |q| - 1 | = {dev:.3e}")

    @classmethod
    def of(cls, q: Quaternion) -> "UnitQuaternion":
        if isinstance(q, UnitQuaternion):
            return q
        return cls(q.q0, q.q1, q.q2, q.q3)

    @classmethod
    def normalize(cls, q: Quaternion | Iterable[float], tol: float = NORMALIZE_TOL) -> "UnitQuaternion":
        """Rescale ``q`` onto the unit sphere if it is within ``tol`` of it."""
        if not isinstance(q, Quaternion):
            q = Quaternion.from_seq(q)
        n = magnitude(q)
        if abs(n - 1.0) > tol:
            raise QuaternionError(f"quaternion magnitude {n!r} deviates from 1 by more than {tol}")
        return cls(q.q0 / n, q.q1 / n, q.q2 / n, q.q3 / n)


def quat_add(p: Quaternion, q: Quaternion) -> Quaternion:
    return Quaternion(p.q0 + q.q0, p.q1 + q.q1, p.q2 + q.q2, p.q3 + q.q3)


def quat_scale(a: float, q: Quaternion) -> Quaternion:
    return Quaternion(a * q.q0, a * q.q1, a * q.q2, a * q.q3)


def quat_mul(p: Quaternion, q: Quaternion) -> Quaternion:
    """Hamilton product ``p q``."""
    p0, p1, p2, p3 = p.q0, p.q1, p.q2, p.q3
    q0, q1, q2, q3 = q.q0, q.q1, q.q2, q.q3
    return Quaternion(
        p0 * q0 - p1 * q1 - p2 * q2 - p3 * q3,
        p0 * q1 + p1 * q0 + p2 * q3 - p3 * q2,
        p0 * q2 + p2 * q0 - p1 * q3 + p3 * q1,
        p0 * q3 + p3 * q0 + p1 * q2 - p2 * q1,
    )


def conjugate(q: Quaternion) -> Quaternion:
    cls = UnitQuaternion if isinstance(q, UnitQuaternion) else Quaternion
    return cls(q.q0, -q.q1, -q.q2, -q.q3)


def magnitude(q: Quaternion) -> float:
    return math.sqrt(q.q0 * q.q0 + q.q1 * q.q1 + q.q2 * q.q2 + q.q3 * q.q3)


def inverse(q: Quaternion) -> Quaternion:
    n2 = q.q0 * q.q0 + q.q1 * q.q1 + q.q2 * q.q2 + q.q3 * q.q3
    if n2 == 0.0:
        raise QuaternionError("zero quaternion is not invertible")
    return Quaternion(q.q0 / n2, -q.q1 / n2, -q.q2 / n2, -q.q3 / n2)


def inner(p: Quaternion, q: Quaternion) -> float:
    """``Re(p q* + q p*)``, i.e. twice the Euclidean dot product."""
    return 2.0 * (p.q0 * q.q0 + p.q1 * q.q1 + p.q2 * q.q2 + p.q3 * q.q3)


def unit_square(q: UnitQuaternion) -> Quaternion:
    """Square of a unit quaternion via ``[2 q0^2 - 1, 2 q0 q1, 2 q0 q2, 2 q0 q3]``."""
    if not isinstance(q, UnitQuaternion):
        q = UnitQuaternion.of(q)
    q0 = q.q0
    return Quaternion(2.0 * q0 * q0 - 1.0, 2.0 * q0 * q.q1, 2.0 * q0 * q.q2, 2.0 * q0 * q.q3)


ZERO = Quaternion(0.0, 0.0, 0.0, 0.0)
ONE = UnitQuaternion(1.0, 0.0, 0.0, 0.0)
