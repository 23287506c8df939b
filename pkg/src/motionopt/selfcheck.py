"""Seeded invariant suite for the operator calculus, run by ``motionopt check``."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dualquat import DQ_ONE, UnitDualQuaternion, udq_from_parts, udq_inverse
from .motion import (
    Motion,
    canonicalize_udq,
    doubled_rotation,
    inverse_motion,
    motion_from_udq,
    rotation_from_uq,
    udq_from_motion,
    uq_from_rotation,
)
from .quat import ONE, Quaternion, UnitQuaternion, conjugate, inverse, magnitude, quat_add, quat_mul, unit_square

THETA_GRID = (0.1, 1.0, math.pi - 0.01, math.pi + 0.01, 5.0, 2 * math.pi - 0.1)


@dataclass(frozen=True)
class CheckResult:
    name: str
    max_error: float
    tol: float

    @property
    def ok(self) -> bool:
        return self.max_error <= self.tol


def random_axis(rng: np.random.Generator) -> np.ndarray:
    v = rng.normal(size=3)
    return v / np.linalg.norm(v)


def random_unit_quaternion(rng: np.random.Generator) -> UnitQuaternion:
    v = rng.normal(size=4)
    v /= np.linalg.norm(v)
    return UnitQuaternion(*v)


def random_quaternion(rng: np.random.Generator) -> Quaternion:
    return Quaternion(*rng.normal(size=4))


def random_udq(rng: np.random.Generator, trans_scale: float = 1.0) -> UnitDualQuaternion:
    return udq_from_parts(random_unit_quaternion(rng), rng.uniform(-trans_scale, trans_scale, 3))


def _diff(a, b) -> float:
    return float(np.max(np.abs(np.asarray(tuple(a), dtype=float) - np.asarray(tuple(b), dtype=float))))


def _dq_diff(a, b) -> float:
    return _diff(a.as_tuple(), b.as_tuple())


def run_checks(samples: int = 1000, seed: int = 0) -> list[CheckResult]:
    if samples < 1:
        raise ValueError("samples must be at least 1")
    rng = np.random.default_rng(seed)
    res = []

    err = 0.0
    for _ in range(samples):
        r = random_axis(rng) * rng.uniform(1e-6, 2 * math.pi - 1e-6)
        err = max(err, _diff(rotation_from_uq(uq_from_rotation(r)), r))
    res.append(CheckResult("R(U(r)) = r", err, 1e-10))

    err = 0.0
    for _ in range(samples):
        q = random_unit_quaternion(rng)
        if q.q0 <= -1 + 1e-12:
            continue
        err = max(err, _diff(uq_from_rotation(rotation_from_uq(q)), q))
    res.append(CheckResult("U(R(q)) = q", err, 1e-10))

    err = 0.0
    for _ in range(samples):
        r = random_axis(rng) * rng.uniform(0.0, math.pi - 1e-6)
        x = Motion(tuple(r), tuple(rng.uniform(-5, 5, 3)))
        err = max(err, _diff(motion_from_udq(udq_from_motion(x)).as_array(), x.as_array()))
    res.append(CheckResult("M(U^(x)) = x", err, 1e-10))

    err = 0.0
    for _ in range(samples):
        q = random_udq(rng, 5.0)
        err = max(err, _dq_diff(udq_from_motion(motion_from_udq(q)), canonicalize_udq(q)))
    res.append(CheckResult("U^(M(q)) = canonical(q)", err, 1e-10))

    exact = max(
        _diff(rotation_from_uq(ONE), (0, 0, 0)),
        _diff(uq_from_rotation((0, 0, 0)), ONE),
        _diff(motion_from_udq(DQ_ONE).as_array(), np.zeros(6)),
        _dq_diff(udq_from_motion(Motion()), DQ_ONE),
    )
    res.append(CheckResult("identities R(1)=0, U(0)=1, M(1^)=0, U^(0)=1^", exact, 0.0))

    err_b = err_c = err_par = 0.0
    for _ in range(samples):
        axis = random_axis(rng)
        r = axis * rng.uniform(0, 2 * math.pi)
        err_b = max(err_b, _diff(uq_from_rotation(-r), inverse(uq_from_rotation(r))))
        x = Motion(tuple(r), tuple(rng.uniform(-5, 5, 3)))
        err_c = max(err_c, _dq_diff(udq_from_motion(inverse_motion(x)), udq_inverse(udq_from_motion(x))))
        # U^(-x) is the inverse only for translations along the rotation axis
        xp = Motion(tuple(r), tuple(rng.uniform(-5, 5) * axis))
        err_par = max(err_par, _dq_diff(udq_from_motion(-xp), udq_inverse(udq_from_motion(xp))))
    res.append(CheckResult("U(-r) = U(r)^-1", err_b, 1e-12))
    res.append(CheckResult("U^([-r, -rot(r) t]) = U^(x)^-1", err_c, 1e-12))
    res.append(CheckResult("U^(-x) = U^(x)^-1 for t parallel to r", err_par, 1e-12))

    # Doubled rotation: first branch equals R(q^2); second branch equals the
    # other sheet R(-q^2). Both encode the rotation of q^2.
    err = 0.0
    for theta in THETA_GRID:
        for _ in range(max(1, samples // 100)):
            q = uq_from_rotation(theta * random_axis(rng))
            sq = quat_mul(q, q)
            target = sq if theta < math.pi else -sq
            err = max(err, _diff(doubled_rotation(q), rotation_from_uq(target)))
            err = max(err, _diff(uq_from_rotation(doubled_rotation(q)), target))
    res.append(CheckResult("doubled rotation (both branches, up to sheet)", err, 1e-9))

    err_sq = err_mag = err_conj = err_im = 0.0
    for _ in range(samples):
        u = random_unit_quaternion(rng)
        err_sq = max(err_sq, _diff(unit_square(u), quat_mul(u, u)))
        p, q = random_quaternion(rng), random_quaternion(rng)
        pq = quat_mul(p, q)
        err_mag = max(err_mag, abs(magnitude(pq) - magnitude(p) * magnitude(q)))
        err_conj = max(err_conj, _diff(conjugate(pq), quat_mul(conjugate(q), conjugate(p))))
        s = quat_add(quat_mul(p, conjugate(q)), quat_mul(q, conjugate(p)))
        err_im = max(err_im, max(abs(c) for c in s.imag))
    res.append(CheckResult("closed-form unit square", err_sq, 1e-12))
    res.append(CheckResult("|pq| = |p||q|", err_mag, 1e-12))
    res.append(CheckResult("(pq)* = q*p*", err_conj, 1e-12))
    res.append(CheckResult("Im(pq* + qp*) = 0", err_im, 1e-12))
    return res
