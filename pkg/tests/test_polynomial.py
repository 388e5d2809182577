import numpy as np
import pytest

from torickahler import Polynomial


@pytest.fixture
def poly():
    # 2 y1^3 - y1 y2^2 + 0.5 y2 + 3
    return Polynomial([((3, 0), 2.0), ((1, 2), -1.0), ((0, 1), 0.5), ((0, 0), 3.0)])


def test_value(poly):
    y = np.array([0.3, 0.7])
    assert poly(y) == pytest.approx(2 * 0.027 - 0.3 * 0.49 + 0.35 + 3)


def test_grad_and_hess(poly):
    y1, y2 = 0.3, 0.7
    assert poly.grad([y1, y2]) == pytest.approx([6 * y1 ** 2 - y2 ** 2, -2 * y1 * y2 + 0.5])
    assert poly.hess([y1, y2]) == pytest.approx(np.array([[12 * y1, -2 * y2], [-2 * y2, -2 * y1]]))


@pytest.mark.parametrize("order", [3, 4])
def test_tensor_symmetric(poly, order):
    t = poly.deriv_tensor(np.array([0.2, 0.1]), order)
    for perm in [(1, 0) + tuple(range(2, order)), tuple(range(order))[::-1]]:
        assert np.allclose(t, np.transpose(t, perm))


def test_third_derivative(poly):
    t = poly.deriv_tensor(np.array([0.2, 0.1]), 3)
    assert t[0, 0, 0] == pytest.approx(12)
    assert t[0, 1, 1] == pytest.approx(-2)
    assert t[1, 1, 1] == 0


def test_broadcast(poly):
    ys = np.random.default_rng(0).random((5, 4, 2))
    assert poly(ys).shape == (5, 4)
    assert poly.deriv_tensor(ys, 2).shape == (5, 4, 2, 2)


def test_round_trip(poly):
    again = Polynomial.from_list(poly.to_list(), 2)
    y = np.array([0.4, -0.2])
    assert again(y) == pytest.approx(poly(y))


def test_zero_is_falsy():
    assert not Polynomial([((1,), 0.0)])
    assert Polynomial([((1,), 1.0)])


@pytest.mark.parametrize("data", [[{"exponents": [1, 0], "coeff": 1}], [{"coeff": 1}],
                                  [{"exponents": [-1], "coeff": 1}]])
def test_from_list_rejects(data):
    with pytest.raises((ValueError, KeyError, TypeError)):
        Polynomial.from_list(data, 1)
