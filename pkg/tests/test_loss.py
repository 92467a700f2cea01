import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from depframe.decoders import cle, enumerate_trees, loss_augmented
from depframe.loss import LOSSES, arc_hinge, get_loss, head_cross_entropy, structured_hinge
from depframe.trees import DependencyTree


def central_diff(f, s, eps=1e-6):
    g = np.zeros_like(s)
    for idx in np.ndindex(s.shape):
        up, down = s.copy(), s.copy()
        up[idx] += eps
        down[idx] -= eps
        g[idx] = (f(up) - f(down)) / (2 * eps)
    return g


def random_tree(rng, n):
    trees = enumerate_trees(n, False) if n <= 5 else None
    if trees:
        return DependencyTree(trees[rng.integers(len(trees))])
    return cle(rng.normal(size=(n + 1, n + 1)))


def test_arc_hinge_single_token():
    out = arc_hinge(np.array([[0.0, 3.0], [0.0, 0.0]]), DependencyTree([0]))
    assert out.value == 0.0 and not out.grad.any()


def test_arc_hinge_example():
    s = np.zeros((3, 3))
    s[0, 1], s[2, 1], s[1, 2], s[0, 2] = 2.0, 0.0, 0.5, 0.0
    out = arc_hinge(s, DependencyTree([0, 1]))
    assert out.value == pytest.approx(0.5)
    expected = np.zeros((3, 3))
    expected[0, 2], expected[1, 2] = 1.0, -1.0
    assert np.array_equal(out.grad, expected)
    fd = central_diff(lambda x: arc_hinge(x, DependencyTree([0, 1])).value, s)
    np.testing.assert_allclose(out.grad, fd, rtol=1e-5, atol=1e-8)


def test_arc_hinge_satisfied_margin(rng):
    s = rng.random((6, 6))
    gold = DependencyTree([0, 1, 2, 3, 4])
    s[[0, 1, 2, 3, 4], [1, 2, 3, 4, 5]] += 2.0
    assert arc_hinge(s, gold).value == 0.0


def test_structured_hinge_equal_trees(rng):
    t = DependencyTree([2, 0, 2])
    out = structured_hinge(rng.random((4, 4)), t, t)
    assert out.value == 0.0 and not out.grad.any()


def test_structured_hinge_example():
    s = np.zeros((3, 3))
    s[0, 1], s[1, 2], s[0, 2] = 1.0, 1.0, 1.5
    out = structured_hinge(s, DependencyTree([0, 0]), DependencyTree([0, 1]))
    assert out.value == pytest.approx(1.5)
    expected = np.zeros((3, 3))
    expected[0, 2], expected[1, 2] = 1.0, -1.0
    assert np.array_equal(out.grad, expected)


def test_structured_hinge_pattern_scale_free(rng):
    s = rng.random((5, 5))
    yp, yg = DependencyTree([0, 1, 1, 3]), DependencyTree([0, 1, 2, 2])
    a = structured_hinge(s, yp, yg).grad
    b = structured_hinge(3.7 * s, yp, yg).grad
    assert np.array_equal(a != 0, b != 0)


def test_cross_entropy_degenerate():
    out = head_cross_entropy(np.array([[0.0, 5.0], [0.0, 0.0]]), DependencyTree([0]))
    assert out.value == pytest.approx(0.0)


def test_cross_entropy_uniform():
    out = head_cross_entropy(np.ones((3, 3)), DependencyTree([0, 1]))
    assert out.value == pytest.approx(2 * math.log(2))
    np.testing.assert_allclose(out.grad[:, 1:].sum(axis=0), 0.0, atol=1e-12)


def test_cross_entropy_non_finite():
    s = np.zeros((3, 3))
    s[2, 1] = np.inf
    with pytest.raises(ValueError):
        head_cross_entropy(s, DependencyTree([0, 1]))


def test_length_mismatch():
    for name in LOSSES:
        with pytest.raises(ValueError):
            get_loss(name)(np.zeros((4, 4)), DependencyTree([0, 1]), DependencyTree([0, 1]))


def test_registry():
    assert set(LOSSES) == {"hinge", "structured-hinge", "crossentropy"}
    with pytest.raises(KeyError):
        get_loss("nll")


def _check_grad(name, s, yp, yg):
    fn = get_loss(name)
    out = fn(s, yp, yg)
    fd = central_diff(lambda x: fn(x, yp, yg).value, s)
    np.testing.assert_allclose(out.grad, fd, rtol=1e-5, atol=1e-7)
    assert not out.grad[:, 0].any() and not np.diag(out.grad).any()


@pytest.mark.parametrize("name", sorted(LOSSES))
def test_gradients_finite_differences(name, rng):
    for _ in range(25):
        n = int(rng.integers(1, 8))
        s = rng.normal(size=(n + 1, n + 1))
        yg = random_tree(rng, n)
        yp = cle(s)
        _check_grad(name, s, yp, yg)


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 6), st.integers(0, 2**32 - 1))
def test_hinge_zero_iff_margin(n, seed):
    rng = np.random.default_rng(seed)
    s = rng.normal(size=(n + 1, n + 1)) * 2
    yg = random_tree(rng, n)
    m = s.copy()
    np.fill_diagonal(m, -np.inf)
    deps = np.arange(1, n + 1)
    gold = np.array(yg.heads)
    comp = m.copy()
    comp[gold, deps] = -np.inf
    ok = all(s[gold[d - 1], d] - comp[:, d].max() >= 1 for d in deps) if n > 1 else True
    assert (arc_hinge(s, yg).value == 0) == ok


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 6), st.integers(0, 2**32 - 1))
def test_structured_hinge_nonnegative(n, seed):
    rng = np.random.default_rng(seed)
    s = rng.normal(size=(n + 1, n + 1))
    yg = random_tree(rng, n)
    assert structured_hinge(s, cle(s), yg).value >= 0
    assert structured_hinge(s, loss_augmented(cle, yg.heads)(s), yg).value >= 0
    assert structured_hinge(s, yg, yg).value == 0
