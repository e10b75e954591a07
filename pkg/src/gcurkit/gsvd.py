"""Generalized singular value decomposition of a matrix pair.

For A (m x n, m >= n) and B (d x n, d >= n) the reduced factorization is

    A = U @ diag(gamma) @ Y.T,    B = V @ diag(sigma) @ Y.T,

with orthonormal-column U (m x n) and V (d x n), nonsingular Y (n x n), and
gamma_i^2 + sigma_i^2 = 1. Pairs are ordered so the ratios gamma_i/sigma_i
are nonincreasing; directions with sigma_i = 0 (ratio +inf) come first.

The computation stacks [A; B], takes a thin QR, and reads both factor sets
off an SVD of the top block, so the cross products A.T @ A and B.T @ B are
never formed.
"""

from typing import NamedTuple

import numpy as np

from . import matkit
from .errors import DimensionError, FullRankError
from .matkit import RANK_TOL, as_matrix

# Below this, a sigma value is treated as exactly zero and the matching
# V column is filled by orthonormal completion instead of normalization.
_SIGMA_TOL = 1e-12


class GsvdFactors(NamedTuple):
    """Reduced GSVD of a pair, ordered by nonincreasing gamma/sigma."""

    U: np.ndarray
    V: np.ndarray
    Y: np.ndarray
    gamma: np.ndarray
    sigma: np.ndarray

    @property
    def ratios(self):
        """gamma_i / sigma_i with +inf where sigma_i is numerically zero."""
        out = np.full_like(self.gamma, np.inf)
        ok = self.sigma > _SIGMA_TOL
        out[ok] = self.gamma[ok] / self.sigma[ok]
        return out


class TruncatedGsvd(NamedTuple):
    """Leading-k slices of a GsvdFactors plus the trailing complements."""

    U_k: np.ndarray
    V_k: np.ndarray
    Y_k: np.ndarray
    gamma_k: np.ndarray
    sigma_k: np.ndarray
    U_tail: np.ndarray
    V_tail: np.ndarray
    Y_tail: np.ndarray
    gamma_tail: np.ndarray
    sigma_tail: np.ndarray


def _orthonormal_completion(v_good, d, count):
    """Deterministic orthonormal columns spanning part of range(v_good)'s complement."""
    if v_good.shape[1] == 0:
        return np.eye(d, count)
    u_full, _, _ = np.linalg.svd(v_good, full_matrices=True)
    return u_full[:, v_good.shape[1] : v_good.shape[1] + count]


def gsvd(a, b):
    """Reduced GSVD of the pair (A, B); see the module docstring for the form.

    Raises DimensionError unless A and B share a column count n with at least
    n rows each, and FullRankError when the stacked pair [A; B] is column-rank
    deficient (then no nonsingular Y exists). A rank-deficient B with a
    full-rank stack is handled: those directions get sigma = 0, sort first,
    and their V columns are completed by orthogonalization.
    """
    a = as_matrix(a, "A")
    b = as_matrix(b, "B")
    m, n = a.shape
    d, nb = b.shape
    if nb != n:
        raise DimensionError(f"A and B must share column counts, got {n} and {nb}")
    if m < n:
        raise DimensionError(f"A needs rows >= cols, got {m}x{n}")
    if d < n:
        raise DimensionError(f"B needs rows >= cols, got {d}x{n}")

    q0, t0 = matkit.thin_qr(np.vstack((a, b)))
    t0_sv = np.linalg.svd(t0, compute_uv=False)
    if t0_sv[-1] <= RANK_TOL * t0_sv[0]:
        raise FullRankError(
            "stacked pair [A; B] is column-rank deficient; "
            "B must have full column rank"
        )

    q1 = q0[:m]
    q2 = q0[m:]
    u, gamma, wt = np.linalg.svd(q1, full_matrices=False)
    w = wt.T
    gamma = np.clip(gamma, 0.0, 1.0)

    # Columns of q2 @ w are sigma_i * v_i; for sigma_i ~ 0 the direction is
    # meaningless and V is completed orthonormally instead.
    vs = q2 @ w
    sigma = np.linalg.norm(vs, axis=0)
    v = np.empty((d, n))
    good = sigma > _SIGMA_TOL
    v[:, good] = vs[:, good] / sigma[good]
    if not good.all():
        fill = _orthonormal_completion(v[:, good], d, int((~good).sum()))
        v[:, ~good] = fill

    y = t0.T @ w
    return GsvdFactors(u, v, y, gamma, sigma)


def truncate(factors, k):
    """Split GSVD factors into the leading-k part and the trailing complement.

    The leading part reconstructs the rank-k approximation
    A_k = U_k @ diag(gamma_k) @ Y_k.T, and A - A_k equals the product of the
    trailing factors exactly.
    """
    n = factors.Y.shape[0]
    if not 1 <= k < n:
        raise DimensionError(f"truncation rank must satisfy 1 <= k < {n}, got {k}")
    return TruncatedGsvd(
        U_k=factors.U[:, :k],
        V_k=factors.V[:, :k],
        Y_k=factors.Y[:, :k],
        gamma_k=factors.gamma[:k],
        sigma_k=factors.sigma[:k],
        U_tail=factors.U[:, k:],
        V_tail=factors.V[:, k:],
        Y_tail=factors.Y[:, k:],
        gamma_tail=factors.gamma[k:],
        sigma_tail=factors.sigma[k:],
    )


def truncated_pair(factors, k):
    """Rank-k reconstructions (A_k, B_k) from GSVD factors."""
    t = truncate(factors, k)
    a_k = t.U_k @ (t.gamma_k[:, None] * t.Y_k.T)
    b_k = t.V_k @ (t.sigma_k[:, None] * t.Y_k.T)
    return a_k, b_k
