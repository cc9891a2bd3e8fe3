import math

import numpy as np
import pytest
from hypothesis import given, settings

from quatsylv.errors import InvalidAxis
from quatsylv.quat_core import I, J, K, ONE, Involution, Quaternion, involution_from_axis, phi_apply, qconj, qmul

from conftest import axes, quaternions


def close(a, b, tol=1e-12):
    return np.allclose(a.to_array(), b.to_array(), atol=tol * (1 + abs(a) + abs(b)))


def test_basis_relations():
    assert qmul(I, J) == K
    assert qmul(J, K) == I
    assert qmul(K, I) == J
    assert qmul(J, I) == -K
    for u in (I, J, K):
        assert qmul(u, u) == -ONE
    assert qmul(qmul(I, J), K) == -ONE


def test_identity_and_expansion():
    q = Quaternion(1.5, -2.0, 0.25, 3.0)
    assert qmul(q, ONE) == q
    assert qmul(ONE, q) == q
    assert qmul(ONE + I, ONE + J) == Quaternion(1, 1, 1, 1)


def test_conjugate_examples():
    assert qconj(ONE) == ONE
    assert qconj(I) == -I
    q = Quaternion(1, 2, 3, 4)
    assert qmul(qconj(q), q) == Quaternion(30, 0, 0, 0)
    assert abs(q) == pytest.approx(math.sqrt(30))


def test_real_coercion():
    q = Quaternion(1, 2, 3, 4)
    assert 2 * q == Quaternion(2, 4, 6, 8)
    assert q - 1 == Quaternion(0, 2, 3, 4)


@given(quaternions, quaternions, quaternions)
def test_ring_axioms(a, b, c):
    assert close(qmul(qmul(a, b), c), qmul(a, qmul(b, c)), 1e-13)
    assert close(qmul(a, b + c), qmul(a, b) + qmul(a, c), 1e-13)
    assert close(qconj(qmul(a, b)), qmul(qconj(b), qconj(a)), 1e-13)


def test_phi_on_basis_axis_k():
    phi = involution_from_axis((0, 0, 1))
    assert phi(K) == -K
    assert phi(I) == I
    assert phi(J) == J
    assert phi(qmul(I, J)) == qmul(phi(J), phi(I)) == -K
    assert phi(ONE) == ONE
    assert phi(Quaternion()) == Quaternion()


def test_involution_from_axis():
    assert involution_from_axis((0, 0, 2)).axis == (0.0, 0.0, 1.0)
    assert involution_from_axis((1, 0, 0)).axis == (1.0, 0.0, 0.0)
    n = involution_from_axis((1, 1, 1)).axis
    assert np.allclose(n, np.ones(3) / math.sqrt(3), atol=1e-15)


@pytest.mark.parametrize("bad", [(0, 0, 0), (np.nan, 0, 1), (1, 2), (1, 2, 3, 4)])
def test_invalid_axis(bad):
    with pytest.raises(InvalidAxis):
        involution_from_axis(bad)


def test_involution_requires_unit_axis():
    with pytest.raises(InvalidAxis):
        Involution((0.0, 0.0, 2.0))


def test_reflection_spectrum():
    inv = involution_from_axis((1, 1, 1))
    assert np.allclose(np.linalg.eigvalsh(inv.reflection), [-1, 1, 1])
    assert np.allclose(inv.matrix @ inv.matrix, np.eye(4))


def test_involutive_on_random(rng):
    inv = involution_from_axis((1, 1, 1))
    for _ in range(100):
        q = Quaternion.from_array(rng.normal(size=4))
        assert close(inv(inv(q)), q)


@settings(max_examples=200)
@given(axes, quaternions, quaternions)
def test_anti_automorphism(axis, a, b):
    inv = involution_from_axis(axis)
    assert close(phi_apply(inv, a + b), inv(a) + inv(b))
    assert close(inv(qmul(a, b)), qmul(inv(b), inv(a)), 1e-12)
    assert close(inv(inv(a)), a)
