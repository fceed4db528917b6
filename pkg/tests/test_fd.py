import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from diracmorph.analysis.fields import Box, FDConfig, Field, derivative, gradient, jacobian
from diracmorph.errors import StencilError


def test_square_order2():
    f = Field.scalar("x1^2", 1)
    assert derivative(f, [3.0], 0, FDConfig(1e-3, 2)) == pytest.approx(6.0, abs=1e-9)


def test_sine_at_zero():
    f = Field.scalar("sin(x1)", 1)
    assert derivative(f, [0.0], 0, FDConfig(1e-3, 4)) == pytest.approx(1.0, abs=1e-12)


def test_exponential_order4():
    f = Field.scalar("exp(2*x1)", 1)
    assert derivative(f, [0.0], 0, FDConfig(1e-2, 4)) == pytest.approx(2.0, abs=1e-7)


@pytest.mark.parametrize("order,expected", [(2, 4.0), (4, 16.0)])
def test_convergence_ratio(order, expected):
    f = Field.scalar("exp(sin(x1))", 1)
    x = 0.4
    exact = np.cos(x) * np.exp(np.sin(x))
    errs = [abs(derivative(f, [x], 0, FDConfig(h, order)) - exact) for h in (4e-2, 2e-2)]
    assert errs[0] / errs[1] == pytest.approx(expected, rel=0.2)


def test_richardson_improves_order2():
    f = Field.scalar("exp(sin(x1))", 1)
    x = 0.4
    exact = np.cos(x) * np.exp(np.sin(x))
    plain = abs(derivative(f, [x], 0, FDConfig(1e-2, 2)) - exact)
    rich = abs(derivative(f, [x], 0, FDConfig(1e-2, 2, richardson=True)) - exact)
    assert rich < plain / 100


def test_jacobian_examples():
    cfg = FDConfig(1e-3, 4)
    J = jacobian(Field.vector(["x1^2", "x2^2"], 2), [1.5, -0.5], cfg)
    assert np.allclose(J, np.diag([3.0, -1.0]), atol=1e-10)
    J = jacobian(Field.vector(["x1", "x2 - x1*x3"], 3), [1.0, 1.0, 1.0], cfg)
    assert np.allclose(J, [[1, 0, 0], [-1, 1, -1]], atol=1e-10)


def test_gradient_batch_shape():
    f = Field.matrix([["x1", "x2"], ["x2", "x1*x2"]], 2)
    P = np.array([[0.1, 0.2], [0.3, -0.4], [1.0, 2.0]])
    g = gradient(f, P, FDConfig(1e-3, 4))
    assert g.shape == (3, 2, 2, 2)
    assert np.allclose(g[2, 1], [[0, 1], [1, 1]], atol=1e-9)


def test_stencil_leaving_domain():
    f = Field.scalar("x1", 1, domain=Box.from_pairs([[0, 1]]))
    with pytest.raises(StencilError):
        derivative(f, [0.0], 0, FDConfig(1e-3, 4))
    with pytest.raises(StencilError):
        derivative(f, [0.999], 0, FDConfig(1e-3, 4))
    assert derivative(f, [0.5], 0, FDConfig(1e-3, 4)) == pytest.approx(1.0)


def test_config_validation():
    with pytest.raises(ValueError):
        FDConfig(0.0)
    with pytest.raises(ValueError):
        FDConfig(1e-3, 3)


@settings(max_examples=50, deadline=None)
@given(st.lists(st.floats(-3, 3), min_size=4, max_size=4), st.floats(-1, 1))
def test_cubics_differentiated_exactly_by_order4(coef, x):
    a, b, c, d = coef
    f = Field.scalar(f"{a!r} + {b!r}*x1 + {c!r}*x1^2 + {d!r}*x1^3".replace("+ -", "- "), 1)
    exact = b + 2 * c * x + 3 * d * x * x
    assert derivative(f, [x], 0, FDConfig(1e-2, 4)) == pytest.approx(exact, abs=1e-9)
