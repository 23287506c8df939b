"""Dual numbers and dual quaternions."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

from .quat import (
    ONE,
    UNIT_TOL,
    ZERO,
    Quaternion,
    QuaternionError,
    UnitQuaternion,
    conjugate,
    inner,
    magnitude,
    quat_add,
    quat_mul,
    quat_scale,
)

# |std| below this counts as the zero quaternion in dq_magnitude
ZERO_STD_THRESHOLD = 1e-300


@dataclass(frozen=True, slots=True)
class DualNumber:
    std: float
    dual: float

    def __post_init__(self):
        if not (math.isfinite(self.std) and math.isfinite(self.dual)):
            raise ValueError(f"non-finite dual number ({self.std}, {self.dual})")


@dataclass(frozen=True, slots=True, eq=False)
class DualQuaternion:
    std: Quaternion
    dual: Quaternion

    @classmethod
    def from_seq(cls, values: Iterable[float]) -> "DualQuaternion":
        vals = [float(v) for v in values]
        if len(vals) != 8:
            raise QuaternionError(f"expected 8 components, got {len(vals)}")
        return cls(Quaternion(*vals[:4]), Quaternion(*vals[4:]))

    def as_tuple(self) -> tuple[float, ...]:
        return self.std.as_tuple() + self.dual.as_tuple()

    def __eq__(self, other):
        if not isinstance(other, DualQuaternion):
            return NotImplemented
        return self.as_tuple() == other.as_tuple()

    def __hash__(self):
        return hash(self.as_tuple())

    def __add__(self, other: "DualQuaternion") -> "DualQuaternion":
        return dq_add(self, other)

    def __mul__(self, other: "DualQuaternion") -> "DualQuaternion":
        return dq_mul(self, other)

    def __neg__(self) -> "DualQuaternion":
        return DualQuaternion(quat_scale(-1.0, self.std), quat_scale(-1.0, self.dual))

    def conjugate(self) -> "DualQuaternion":
        return dq_conjugate(self)


@dataclass(frozen=True, slots=True, eq=False)
class UnitDualQuaternion(DualQuaternion):
    """Dual quaternion with unit standard part orthogonal to its dual part.

    Checked on construction at ``UNIT_TOL``; the standard part is stored as a
    :class:`UnitQuaternion`.
    """

    def __post_init__(self):
        std = self.std
        dev = abs(magnitude(std) - 1.0)
        if dev > UNIT_TOL:
            raise QuaternionError(f"standard part is not unit: | |q| - 1 | = {dev:.3e}")
        ortho = abs(inner(std, self.dual))
        if ortho > UNIT_TOL:
            raise QuaternionError(f"standard and dual parts not orthogonal: <q, q_d> = {ortho:.3e}")
        if not isinstance(std, UnitQuaternion):
            object.__setattr__(self, "std", UnitQuaternion(std.q0, std.q1, std.q2, std.q3))

    @classmethod
    def of(cls, q: DualQuaternion) -> "UnitDualQuaternion":
        if isinstance(q, UnitDualQuaternion):
            return q
        return cls(q.std, q.dual)

    def __neg__(self) -> "UnitDualQuaternion":
        return UnitDualQuaternion(quat_scale(-1.0, self.std), quat_scale(-1.0, self.dual))


DQ_ZERO = DualQuaternion(ZERO, ZERO)
DQ_ONE = UnitDualQuaternion(ONE, ZERO)


def dq_add(p: DualQuaternion, q: DualQuaternion) -> DualQuaternion:
    return DualQuaternion(quat_add(p.std, q.std), quat_add(p.dual, q.dual))


def dq_mul(p: DualQuaternion, q: DualQuaternion) -> DualQuaternion:
    return DualQuaternion(
        quat_mul(p.std, q.std),
        quat_add(quat_mul(p.std, q.dual), quat_mul(p.dual, q.std)),
    )


def udq_mul(p: UnitDualQuaternion, q: UnitDualQuaternion) -> UnitDualQuaternion:
    """Product of two unit dual quaternions, re-validated as unit."""
    return UnitDualQuaternion.of(dq_mul(p, q))


def dq_conjugate(q: DualQuaternion) -> DualQuaternion:
    cls = UnitDualQuaternion if isinstance(q, UnitDualQuaternion) else DualQuaternion
    return cls(conjugate(q.std), conjugate(q.dual))


def dq_magnitude(q: DualQuaternion) -> DualNumber:
    n = magnitude(q.std)
    if n < ZERO_STD_THRESHOLD:
        return DualNumber(0.0, magnitude(q.dual))
    return DualNumber(n, inner(q.std, q.dual) / (2.0 * n))


def is_unit(q: DualQuaternion, tol: float = UNIT_TOL) -> bool:
    return abs(magnitude(q.std) - 1.0) <= tol and abs(inner(q.std, q.dual)) <= tol


def udq_from_parts(rot: UnitQuaternion, t: Iterable[float]) -> UnitDualQuaternion:
    """``rot + (1/2) rot [0, t] eps``: the rigid transform rotating by ``rot``
    with translation ``t``."""
    rot = UnitQuaternion.of(rot)
    dual = quat_scale(0.5, quat_mul(rot, Quaternion.vector(t)))
    return UnitDualQuaternion(rot, dual)


def udq_inverse(q: UnitDualQuaternion) -> UnitDualQuaternion:
    return dq_conjugate(UnitDualQuaternion.of(q))


def translation_quat(q: UnitDualQuaternion) -> Quaternion:
    """``2 q~^{-1} q~_d`` with its (rounding-level) real part forced to zero."""
    tq = quat_mul(conjugate(q.std), q.dual)
    return Quaternion(0.0, 2.0 * tq.q1, 2.0 * tq.q2, 2.0 * tq.q3)
