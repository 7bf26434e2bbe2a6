import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ris_emf.linalg import RankDeficient, Singular, col_row_outer, gram_inverse, pseudo_inverse

from conftest import cn


def test_pinv_identity():
    np.testing.assert_allclose(pseudo_inverse(np.eye(3)), np.eye(3), atol=1e-15)


def test_pinv_diagonal():
    np.testing.assert_allclose(pseudo_inverse(np.diag([2.0, 4.0])), np.diag([0.5, 0.25]), atol=1e-15)


def test_pinv_left_inverse(rng):
    a = cn(rng, 6, 3)
    assert np.linalg.norm(pseudo_inverse(a) @ a - np.eye(3)) < 1e-10


def test_pinv_rank_deficient(rng):
    a = cn(rng, 6, 2)
    a = np.column_stack([a, a[:, 0] + a[:, 1]])
    with pytest.raises(RankDeficient):
        pseudo_inverse(a)
    with pytest.raises(RankDeficient):
        pseudo_inverse(cn(rng, 2, 3))


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 6), st.integers(0, 4), st.integers(0, 2**32 - 1))
def test_moore_penrose_identities(k, extra, seed):
    r = np.random.default_rng(seed)
    a = cn(r, k + extra, k)
    x = pseudo_inverse(a)
    rel = lambda u, v: np.linalg.norm(u - v) / np.linalg.norm(v)
    assert rel(a @ x @ a, a) < 1e-9
    assert rel(x @ a @ x, x) < 1e-9
    assert rel((a @ x).conj().T, a @ x) < 1e-9
    assert rel((x @ a).conj().T, x @ a) < 1e-9


def test_gram_inverse_trivial():
    np.testing.assert_allclose(gram_inverse(np.eye(2)), np.eye(2))
    np.testing.assert_allclose(gram_inverse(np.diag([2.0, 1.0])), np.diag([0.25, 1.0]))


def test_gram_inverse_random(rng):
    q = cn(rng, 5, 3)
    t = gram_inverse(q)
    assert np.linalg.norm(t @ (q.conj().T @ q) - np.eye(3)) < 1e-10
    assert np.max(np.abs(t - t.conj().T)) < 1e-12
    for _ in range(10):
        x = cn(rng, 3)
        assert np.real(x.conj() @ t @ x) > 0


def test_gram_inverse_singular():
    q = np.array([[1.0, 1.0], [1.0, 1.0 + 1e-9]])
    with pytest.raises(Singular):
        gram_inverse(q)


def test_col_row_outer():
    out = col_row_outer([1, 1j], [1, -1])
    np.testing.assert_array_equal(out, [[1, -1], [1j, -1j]])
    assert not np.any(col_row_outer(np.zeros(3), [1, 2]))


def test_col_row_outer_rank_one(rng):
    s = np.linalg.svd(col_row_outer(cn(rng, 5), cn(rng, 4)), compute_uv=False)
    assert s[1] < 1e-12 * s[0]


def test_trace_cyclic(rng):
    a, b, c = cn(rng, 3, 4), cn(rng, 4, 5), cn(rng, 5, 3)
    t1 = np.trace(a @ b @ c)
    assert abs(t1 - np.trace(b @ c @ a)) < 1e-12 * abs(t1) + 1e-12
    assert abs(t1 - np.trace(c @ a @ b)) < 1e-12 * abs(t1) + 1e-12
