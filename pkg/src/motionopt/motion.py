"""Motions ``x = [r, t]`` and the operators linking them to unit (dual) quaternions.

``uq_from_rotation`` / ``rotation_from_uq`` map rotation vectors to unit
quaternions and back; ``udq_from_motion`` / ``motion_from_udq`` do the same
for motions and unit dual quaternions. ``motion_from_udq`` always lands on
the canonical sheet of the double cover, so its rotation part has norm at
most pi.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .dualquat import UnitDualQuaternion, translation_quat, udq_from_parts
from .quat import ONE, Quaternion, UnitQuaternion, conjugate, quat_mul

SMALL_ANGLE = 1e-8


def _vec3(v: Iterable[float], what: str) -> tuple[float, float, float]:
    vals = tuple(float(x) for x in v)
    if len(vals) != 3:
        raise ValueError(f"{what} must have 3 components, got {len(vals)}")
    if not all(math.isfinite(x) for x in vals):
        raise ValueError(f"non-finite {what}: {vals}")
    return vals  # type: ignore[return-value]


@dataclass(frozen=True, slots=True)
class Motion:
    """Rotation vector ``r`` (radians times unit axis) and translation ``t``."""

    r: tuple[float, float, float] = (0.0, 0.0, 0.0)
    t: tuple[float, float, float] = (0.0, 0.0, 0.0)

    def __post_init__(self):
        object.__setattr__(self, "r", _vec3(self.r, "rotation vector"))
        object.__setattr__(self, "t", _vec3(self.t, "translation"))

    @classmethod
    def from_array(cls, x: Sequence[float]) -> "Motion":
        x = [float(v) for v in x]
        if len(x) != 6:
            raise ValueError(f"a motion has 6 components, got {len(x)}")
        return cls(tuple(x[:3]), tuple(x[3:]))

    def as_array(self) -> np.ndarray:
        return np.array(self.r + self.t)

    def __add__(self, other: "Motion") -> "Motion":
        return Motion.from_array(self.as_array() + other.as_array())

    def __sub__(self, other: "Motion") -> "Motion":
        return Motion.from_array(self.as_array() - other.as_array())

    def __neg__(self) -> "Motion":
        return Motion.from_array(-self.as_array())

    def __mul__(self, a: float) -> "Motion":
        return Motion.from_array(a * self.as_array())

    __rmul__ = __mul__


ZERO_MOTION = Motion()


@dataclass(frozen=True)
class MotionVector:
    components: tuple[Motion, ...]

    def __post_init__(self):
        comps = tuple(self.components)
        if len(comps) < 1:
            raise ValueError("a motion vector needs at least one component")
        object.__setattr__(self, "components", comps)

    def __len__(self) -> int:
        return len(self.components)

    def __getitem__(self, i: int) -> Motion:
        return self.components[i]

    def __iter__(self):
        return iter(self.components)

    @classmethod
    def zeros(cls, n: int) -> "MotionVector":
        return cls((ZERO_MOTION,) * n)


@dataclass(frozen=True)
class MetricWeights:
    """Translation weight ``sigma`` in the motion magnitude."""

    sigma: float = 1.0

    def __post_init__(self):
        if not (self.sigma > 0 and math.isfinite(self.sigma)):
            raise ValueError(f"sigma must be positive and finite, got {self.sigma}")


DEFAULT_WEIGHTS = MetricWeights()


def flatten(v: MotionVector) -> np.ndarray:
    """Layout ``[r1, t1, r2, t2, ...]``, length ``6n``."""
    return np.concatenate([np.array(m.r + m.t) for m in v.components])


def unflatten(x: Sequence[float], n: int | None = None) -> MotionVector:
    x = np.asarray(x, dtype=float).ravel()
    if n is None:
        n = x.size // 6
    if x.size != 6 * n:
        raise ValueError(f"expected {6 * n} values for {n} motions, got {x.size}")
    return MotionVector(tuple(Motion.from_array(x[6 * i : 6 * i + 6]) for i in range(n)))


def uq_from_rotation(r: Iterable[float]) -> UnitQuaternion:
    r1, r2, r3 = _vec3(r, "rotation vector")
    theta = math.sqrt(r1 * r1 + r2 * r2 + r3 * r3)
    if theta == 0.0:
        return ONE
    if theta < SMALL_ANGLE:
        k = 0.5 - theta * theta / 48.0
    else:
        k = math.sin(0.5 * theta) / theta
    return UnitQuaternion(math.cos(0.5 * theta), k * r1, k * r2, k * r3)


def rotation_from_uq(q: Quaternion) -> tuple[float, float, float]:
    """Rotation vector of a unit quaternion, angle in ``[0, 2 pi]``.

    No sheet selection happens here: ``q`` and ``-q`` give different vectors
    for the same rotation. ``-1`` maps to the zero vector.
    """
    q = UnitQuaternion.of(q)
    s = math.sqrt(q.q1 * q.q1 + q.q2 * q.q2 + q.q3 * q.q3)
    if s == 0.0:
        return (0.0, 0.0, 0.0)
    # 2*atan2(s, q0) == 2*acos(q0) on the unit sphere, without acos's loss near |q0| = 1
    k = 2.0 * math.atan2(s, q.q0) / s
    return (k * q.q1, k * q.q2, k * q.q3)


def canonicalize_udq(q: UnitDualQuaternion) -> UnitDualQuaternion:
    """Pick the sign of ``q`` with nonnegative scalar part (ties broken on the
    first nonzero imaginary component)."""
    std = q.std
    flip = std.q0 < 0.0
    if std.q0 == 0.0:
        for c in (std.q1, std.q2, std.q3):
            if c != 0.0:
                flip = c < 0.0
                break
    return -q if flip else UnitDualQuaternion.of(q)


def udq_from_motion(x: Motion) -> UnitDualQuaternion:
    return udq_from_parts(uq_from_rotation(x.r), x.t)


def dual_part_from_motion(x: Motion) -> Quaternion:
    """The dual part ``(1/2) U(r) [0, t]`` of ``udq_from_motion(x)``."""
    return udq_from_motion(x).dual


def translation_from_udq(q: UnitDualQuaternion) -> tuple[float, float, float]:
    return translation_quat(q).imag


def motion_from_udq(q: UnitDualQuaternion) -> Motion:
    q = canonicalize_udq(q)
    return Motion(rotation_from_uq(q.std), translation_quat(q).imag)


def motion_magnitude(x: Motion, w: MetricWeights = DEFAULT_WEIGHTS) -> float:
    r, t = x.r, x.t
    rr = r[0] * r[0] + r[1] * r[1] + r[2] * r[2]
    tt = t[0] * t[0] + t[1] * t[1] + t[2] * t[2]
    return math.sqrt(rr + w.sigma * tt)


def motion_vector_norm(v: MotionVector, w: MetricWeights = DEFAULT_WEIGHTS) -> float:
    return math.sqrt(sum(motion_magnitude(x, w) ** 2 for x in v.components))


def doubled_rotation(q: Quaternion) -> tuple[float, float, float]:
    """Rotation vector of the doubled rotation from ``R(q) = theta l``.

    ``2 theta l`` for ``theta < pi``, else ``2 (theta - pi) l``. Both are basic
    rotation vectors of the rotation encoded by ``q * q``; on the second
    branch the value is ``R(-q*q)``, not ``R(q*q)``.
    """
    r = np.array(rotation_from_uq(q))
    theta = float(np.linalg.norm(r))
    if theta < math.pi:
        return tuple(2.0 * r)  # type: ignore[return-value]
    axis = r / theta
    return tuple(2.0 * (theta - math.pi) * axis)  # type: ignore[return-value]


def motion_vector_add(a: MotionVector, b: MotionVector) -> MotionVector:
    return unflatten(flatten(a) + flatten(b), len(a))


def motion_vector_scale(c: float, a: MotionVector) -> MotionVector:
    return unflatten(c * flatten(a), len(a))



def inverse_motion(x: Motion) -> Motion:
    """Motion of ``U^(x)^{-1}`` in closed form: ``[-r, -(U(r) t U(r)^*)]``.

    Equals ``-x`` only when ``t`` is parallel to ``r`` (or ``r = 0``).
    """
    q = uq_from_rotation(x.r)
    rt = quat_mul(quat_mul(q, Quaternion.vector(x.t)), conjugate(q))
    return Motion(tuple(-c for c in x.r), tuple(-c for c in rt.imag))
