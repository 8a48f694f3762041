import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from orient.errors import IllConditioned, InputError
from orient.linalg import centroid, cross_covariance, frobenius_sq, orthogonality_error, svd


def brute_cross_covariance(a, b, w=None):
    n, d = len(a), len(a[0])
    w = [1.0] * n if w is None else w
    return np.array([[sum(w[i] * b[i][p] * a[i][q] for i in range(n)) for q in range(d)]
                     for p in range(d)])


def test_centroid_examples():
    np.testing.assert_array_equal(centroid([[0, 0], [2, 2]]), [1, 1])
    np.testing.assert_array_equal(centroid([[1, 0], [3, 0]], weights=[3, 1]), [1.5, 0])
    np.testing.assert_array_equal(centroid([[4.0, -1.0]]), [4, -1])


def test_centroid_zero_weights():
    with pytest.raises(InputError):
        centroid([[1, 2], [3, 4]], weights=[0, 0])


def test_centroid_uniform_weights(rng):
    x = rng.standard_normal((17, 4))
    np.testing.assert_allclose(centroid(x, np.full(17, 2.5)), centroid(x), rtol=1e-14)


def test_cross_covariance_examples():
    eye = np.eye(2)
    np.testing.assert_array_equal(cross_covariance(eye, eye), eye)
    h = cross_covariance([[1.0, 0.0]], [[0.0, 1.0]])
    np.testing.assert_array_equal(h, [[0, 0], [1, 0]])
    np.testing.assert_array_equal(h, brute_cross_covariance([[1, 0]], [[0, 1]]))
    np.testing.assert_array_equal(cross_covariance([[1.0, 0.0]], [[1.0, 0.0]], [2.0]),
                                  [[2, 0], [0, 0]])


def test_cross_covariance_matches_index_expansion(rng):
    a, b = rng.standard_normal((9, 3)), rng.standard_normal((9, 3))
    w = rng.uniform(0, 2, 9)
    np.testing.assert_allclose(cross_covariance(a, b), brute_cross_covariance(a, b), atol=1e-12)
    np.testing.assert_allclose(cross_covariance(a, b, w), brute_cross_covariance(a, b, w), atol=1e-12)


def test_cross_covariance_blocks_are_thread_independent(rng, monkeypatch):
    import orient.linalg as linalg
    from orient import _parallel

    a, b = rng.standard_normal((1000, 6)), rng.standard_normal((1000, 6))
    monkeypatch.setattr(linalg, "ROW_BLOCK", 37)
    _parallel.set_num_threads(1)
    h1 = cross_covariance(a, b)
    _parallel.set_num_threads(5)
    h5 = cross_covariance(a, b)
    _parallel.set_num_threads(None)
    assert np.array_equal(h1, h5)


@settings(max_examples=50, deadline=None)
@given(
    a=arrays(np.float64, (6, 3), elements=st.floats(-10, 10)),
    b=arrays(np.float64, (6, 3), elements=st.floats(-10, 10)),
    s=st.floats(0.1, 10),
)
def test_cross_covariance_bilinear(a, b, s):
    h = cross_covariance(a, b)
    np.testing.assert_allclose(cross_covariance(a, s * b), s * h, rtol=1e-12, atol=1e-12 * (1 + np.abs(h).max()) * s)


def test_frobenius_sq():
    assert frobenius_sq([[3, 4]]) == 25
    assert frobenius_sq(np.zeros((3, 3))) == 0
    assert frobenius_sq(np.eye(3)) == 3


def check_svd(m, res, tol=1e-8):
    assert orthogonality_error(res.u) <= tol
    assert orthogonality_error(res.v) <= tol
    s = res.singular_values
    assert np.all(s >= 0) and np.all(np.diff(s) <= 0)
    recon = res.u @ np.diag(s) @ res.v.T
    assert np.linalg.norm(recon - m) <= tol * max(1.0, np.linalg.norm(m))


def test_svd_identity_and_diagonal():
    res = svd(np.eye(4))
    np.testing.assert_allclose(res.singular_values, 1)
    np.testing.assert_allclose(res.u @ res.v.T, np.eye(4), atol=1e-14)
    res = svd(np.diag([1.0, 3.0, 2.0]))
    np.testing.assert_allclose(res.singular_values, [3, 2, 1])


def test_svd_random_5x5_contract():
    rng = np.random.default_rng(7)
    for _ in range(1000):
        m = rng.standard_normal((5, 5))
        check_svd(m, svd(m))


@pytest.mark.parametrize("d", [1, 2, 3, 7, 20, 64])
def test_svd_against_lapack_values(rng, d):
    m = rng.standard_normal((d, d))
    res = svd(m)
    check_svd(m, res)
    np.testing.assert_allclose(res.singular_values, np.linalg.svd(m, compute_uv=False),
                               atol=1e-12 * d)


@pytest.mark.parametrize("rank", [0, 1, 3])
def test_svd_rank_deficient(rng, rank):
    m = rng.standard_normal((6, rank)) @ rng.standard_normal((rank, 6)) if rank else np.zeros((6, 6))
    res = svd(m)
    check_svd(m, res)
    assert np.all(res.singular_values[rank:] <= 1e-12)


def test_svd_scaling_keeps_uvt(rng):
    h = rng.standard_normal((5, 5))
    for s in (0.3, 7.0):
        a, b = svd(h), svd(s * h)
        np.testing.assert_allclose(b.singular_values, s * a.singular_values, rtol=1e-12)
        np.testing.assert_allclose(b.u @ b.v.T, a.u @ a.v.T, atol=1e-10)


def test_svd_lapack_backend(rng):
    m = rng.standard_normal((8, 8))
    check_svd(m, svd(m, method="lapack"))


def test_svd_sweep_cap():
    m = np.random.default_rng(0).standard_normal((6, 6))
    with pytest.raises(IllConditioned):
        svd(m, max_sweeps=1)


def test_svd_rejects_non_finite():
    with pytest.raises(InputError):
        svd(np.array([[1.0, np.inf], [0.0, 1.0]]))
