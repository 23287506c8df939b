import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from motionopt.quat import (
    ONE,
    ZERO,
    Quaternion,
    QuaternionError,
    UnitQuaternion,
    conjugate,
    inner,
    inverse,
    magnitude,
    quat_add,
    quat_mul,
    quat_scale,
    unit_square,
)
from motionopt.selfcheck import random_quaternion, random_unit_quaternion

finite = st.floats(-1e3, 1e3, allow_nan=False)
quats = st.builds(Quaternion, finite, finite, finite, finite)


def close(a, b, tol=1e-12):
    return np.allclose(tuple(a), tuple(b), rtol=0, atol=tol)


def test_add():
    assert quat_add(ONE, ZERO) == Quaternion(1, 0, 0, 0)
    assert quat_add(Quaternion(1, 2, 3, 4), Quaternion(4, 3, 2, 1)) == Quaternion(5, 5, 5, 5)


def test_add_commutes(rng):
    for _ in range(100):
        p, q = random_quaternion(rng), random_quaternion(rng)
        assert quat_add(p, q) == quat_add(q, p)


def test_scale():
    q = Quaternion(1, 0, -1, 3)
    assert quat_scale(2, q) == Quaternion(2, 0, -2, 6)
    assert quat_scale(0, q) == ZERO
    assert quat_scale(-1, quat_scale(-1, q)) == q


def test_rejects_non_finite():
    with pytest.raises(QuaternionError):
        Quaternion(math.nan, 0, 0, 0)
    with pytest.raises(QuaternionError):
        Quaternion(0, math.inf, 0, 0)


def test_mul_identity_and_ijk(rng):
    q = random_quaternion(rng)
    assert quat_mul(ONE, q) == q
    assert quat_mul(q, ONE) == q
    i, j, k = Quaternion(0, 1, 0, 0), Quaternion(0, 0, 1, 0), Quaternion(0, 0, 0, 1)
    assert quat_mul(i, j) == k
    assert quat_mul(j, k) == i
    assert quat_mul(k, i) == j
    assert quat_mul(j, i) == -k


def test_mul_magnitude_and_associativity(rng):
    for _ in range(1000):
        p, q, s = (random_quaternion(rng) for _ in range(3))
        assert abs(magnitude(quat_mul(p, q)) - magnitude(p) * magnitude(q)) <= 1e-12
        assert close(quat_mul(quat_mul(p, q), s), quat_mul(p, quat_mul(q, s)))


def test_conjugate():
    assert conjugate(Quaternion(1, 2, 3, 4)) == Quaternion(1, -2, -3, -4)


@given(quats)
def test_conjugate_involution(q):
    assert conjugate(conjugate(q)) == q


def test_conjugate_antihomomorphism(rng):
    for _ in range(200):
        p, q = random_quaternion(rng), random_quaternion(rng)
        assert close(conjugate(quat_mul(p, q)), quat_mul(conjugate(q), conjugate(p)))


def test_magnitude(rng):
    assert magnitude(ONE) == 1
    assert magnitude(Quaternion(1, 1, 1, 1)) == 2
    for _ in range(100):
        q = random_quaternion(rng)
        assert close(quat_mul(q, conjugate(q)), (magnitude(q) ** 2, 0, 0, 0))
        assert close(quat_mul(conjugate(q), q), (magnitude(q) ** 2, 0, 0, 0))


def test_inverse(rng):
    assert inverse(Quaternion(2, 0, 0, 0)) == Quaternion(0.5, 0, 0, 0)
    for _ in range(100):
        u = random_unit_quaternion(rng)
        assert close(inverse(u), conjugate(u), 1e-15)
        q = random_quaternion(rng)
        assert close(quat_mul(q, inverse(q)), ONE)
    with pytest.raises(QuaternionError, match="not invertible"):
        inverse(ZERO)


def test_inner(rng):
    assert inner(ONE, ONE) == 2
    for _ in range(200):
        p, q = random_quaternion(rng), random_quaternion(rng)
        s = quat_add(quat_mul(p, conjugate(q)), quat_mul(q, conjugate(p)))
        assert inner(p, q) == inner(q, p)
        assert abs(inner(p, q) - s.q0) <= 1e-12
        assert max(abs(c) for c in s.imag) <= 1e-12


def test_unit_square():
    assert close(unit_square(UnitQuaternion(0, 1, 0, 0)), (-1, 0, 0, 0))
    assert unit_square(ONE) == ONE


def test_unit_square_matches_product(rng):
    for _ in range(1000):
        u = random_unit_quaternion(rng)
        assert close(unit_square(u), quat_mul(u, u))


def test_unit_quaternion_construction():
    with pytest.raises(QuaternionError):
        UnitQuaternion(1.0 + 1e-8, 0, 0, 0)
    u = UnitQuaternion.normalize((1.0 + 5e-7, 0, 0, 0))
    assert u.q0 == 1.0
    with pytest.raises(QuaternionError):
        UnitQuaternion.normalize((1.1, 0, 0, 0))
    u = UnitQuaternion(0.6, 0.8, 0, 0)
    assert close(quat_mul(u, conjugate(u)), ONE)
    assert isinstance(conjugate(u), UnitQuaternion)
