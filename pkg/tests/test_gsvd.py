import numpy as np
import pytest

from gcurkit import matkit
from gcurkit.errors import DimensionError, FullRankError
from gcurkit.gsvd import gsvd, truncate, truncated_pair


def check_invariants(a, b, f, recon_tol=1e-9, ortho_tol=1e-10):
    n = a.shape[1]
    assert np.max(np.abs(f.gamma**2 + f.sigma**2 - 1.0)) <= 1e-12
    ratios = f.ratios
    finite = ratios[np.isfinite(ratios)]
    assert np.all(np.diff(finite) <= 1e-12)
    if not np.isfinite(ratios).all():
        # infinite ratios (sigma == 0) must all sort before the finite ones
        assert np.all(np.isinf(ratios[: np.sum(np.isinf(ratios))]))
    assert matkit.spectral_norm(a - f.U @ (f.gamma[:, None] * f.Y.T)) <= recon_tol * max(
        1.0, matkit.spectral_norm(a)
    )
    assert matkit.spectral_norm(b - f.V @ (f.sigma[:, None] * f.Y.T)) <= recon_tol * max(
        1.0, matkit.spectral_norm(b)
    )
    assert np.max(np.abs(f.U.T @ f.U - np.eye(n))) <= ortho_tol
    assert np.max(np.abs(f.V.T @ f.V - np.eye(n))) <= ortho_tol
    sv = np.linalg.svd(f.Y, compute_uv=False)
    assert sv[-1] > 1e-12 * sv[0]


@pytest.mark.parametrize("seed", range(20))
def test_identity_b_reduces_to_svd(seed):
    rng = np.random.default_rng(seed)
    m = int(rng.integers(5, 30))
    n = int(rng.integers(2, min(m, 10) + 1))
    a = rng.standard_normal((m, n))
    f = gsvd(a, np.eye(n))
    check_invariants(a, np.eye(n), f)
    psi = matkit.svd(a).psi
    assert np.allclose(f.gamma, psi / np.sqrt(1.0 + psi**2), atol=1e-10)
    assert np.allclose(f.ratios, psi, atol=1e-9 * max(1.0, psi[0]))
    # left vectors match the singular vectors up to column sign
    w = matkit.svd(a).W
    signs = np.sign(np.sum(w * f.U, axis=0))
    assert np.allclose(f.U, w * signs, atol=1e-8)


def test_diagonal_pair_example():
    a = np.diag([1.0, 2.0, 3.0])
    b = np.diag([1.0, 20.0, 300.0])
    f = gsvd(a, b)
    check_invariants(a, b, f)
    assert np.allclose(f.ratios, [1.0, 0.1, 0.01], atol=1e-10)
    assert f.gamma[0] == pytest.approx(1.0 / np.sqrt(2.0), abs=1e-12)


def test_zero_a_gives_zero_gammas():
    rng = np.random.default_rng(0)
    b = rng.standard_normal((6, 4))
    a = np.zeros((5, 4))
    f = gsvd(a, b)
    assert np.allclose(f.gamma, 0.0, atol=1e-12)
    assert np.allclose(f.sigma, 1.0, atol=1e-12)
    check_invariants(a, b, f)


def test_rank_deficient_b_with_full_stack():
    # B misses one direction that A covers: sigma = 0 there, ratio +inf first
    a = np.eye(2)
    b = np.array([[1.0, 0.0], [0.0, 0.0]])
    f = gsvd(a, b)
    assert np.isinf(f.ratios[0])
    assert f.sigma[0] <= 1e-12
    assert np.max(np.abs(f.V.T @ f.V - np.eye(2))) <= 1e-10
    assert matkit.spectral_norm(a - f.U @ (f.gamma[:, None] * f.Y.T)) <= 1e-9
    assert matkit.spectral_norm(b - f.V @ (f.sigma[:, None] * f.Y.T)) <= 1e-9


def test_rank_deficient_stack_errors():
    a = np.array([[1.0, 0.0], [0.0, 0.0]])
    b = np.array([[1.0, 0.0], [0.0, 0.0]])
    with pytest.raises(FullRankError):
        gsvd(a, b)


def test_dimension_errors():
    with pytest.raises(DimensionError):
        gsvd(np.ones((2, 3)), np.ones((3, 3)))  # m < n
    with pytest.raises(DimensionError):
        gsvd(np.ones((3, 3)), np.ones((2, 3)))  # d < n
    with pytest.raises(DimensionError):
        gsvd(np.ones((3, 3)), np.ones((3, 2)))  # column mismatch


def test_truncate_partition_identity():
    rng = np.random.default_rng(1)
    a = rng.standard_normal((8, 5))
    b = rng.standard_normal((7, 5))
    f = gsvd(a, b)
    k = 4
    t = truncate(f, k)
    a_k, _ = truncated_pair(f, k)
    tail = t.U_tail @ (t.gamma_tail[:, None] * t.Y_tail.T)
    # A - A_k equals the trailing factor product exactly (same arithmetic path)
    assert matkit.spectral_norm((a - a_k) - tail) <= 1e-9 * matkit.spectral_norm(a)


def test_truncate_diag_example_k1():
    a = np.diag([1.0, 2.0, 3.0])
    b = np.diag([1.0, 20.0, 300.0])
    a_1, _ = truncated_pair(gsvd(a, b), 1)
    assert np.allclose(a_1, np.diag([1.0, 0.0, 0.0]), atol=1e-12)


def test_truncate_bounds_errors():
    f = gsvd(np.eye(3), np.eye(3))
    with pytest.raises(DimensionError):
        truncate(f, 0)
    with pytest.raises(DimensionError):
        truncate(f, 3)


@pytest.mark.parametrize("seed", range(10))
def test_prop1_sandwich(seed):
    rng = np.random.default_rng(50 + seed)
    a = rng.standard_normal((10, 4))
    b = rng.standard_normal((10, 4))
    f = gsvd(a, b)
    for k in range(1, 4):
        t = truncate(f, k)
        a_k, _ = truncated_pair(f, k)
        err = matkit.spectral_norm(a - a_k)
        gamma_next = f.gamma[k]
        lo = gamma_next * matkit.smallest_singular_value(t.Y_tail)
        hi = gamma_next * matkit.spectral_norm(t.Y_tail)
        tol = 1e-9 * max(1.0, matkit.spectral_norm(a))
        assert lo <= err + tol
        assert err <= hi + tol


@pytest.mark.parametrize("seed", range(8))
def test_similarity_identity(seed):
    rng = np.random.default_rng(200 + seed)
    a = rng.standard_normal((8, 4))
    b = rng.standard_normal((8, 4))
    f = gsvd(a, b)
    product = (a.T @ a) @ np.linalg.inv(b.T @ b)
    eigs = np.sort(np.linalg.eigvals(product).real)[::-1]
    ratios_sq = np.sort(f.ratios**2)[::-1]
    assert np.allclose(eigs, ratios_sq, rtol=1e-6)


def test_scale_equivariance_of_ratios():
    rng = np.random.default_rng(9)
    a = rng.standard_normal((9, 5))
    b = rng.standard_normal((8, 5))
    base = gsvd(a, b).ratios
    for c in (0.1, 3.0, 250.0):
        scaled = gsvd(c * a, b).ratios
        assert np.allclose(scaled, c * base, rtol=1e-9)


@pytest.mark.parametrize(
    "m,d,n", [(12, 9, 6), (40, 25, 12), (200, 60, 30), (80, 200, 30)]
)
def test_invariants_rectangular(m, d, n):
    rng = np.random.default_rng(m * 1000 + d * 10 + n)
    a = rng.standard_normal((m, n))
    b = rng.standard_normal((d, n))
    check_invariants(a, b, gsvd(a, b))
