"""CUR decomposition of a single matrix with greedy interpolation indices.

A ~= C @ M @ R where C = A[:, p] and R = A[s, :] are actual columns and rows
of A. The middle matrix M = C^+ A R^+ minimizes ||A - C M R|| over M for the
given index choice; it is computed by two least-squares passes, never by
inverting C.T @ C.
"""

import warnings
from typing import NamedTuple

import numpy as np

from . import deim, matkit
from .errors import DimensionError, FullRankError
from .matkit import RANK_TOL, as_matrix


class CurFactors(NamedTuple):
    """Column indices p, row indices s, and the middle matrix M.

    C and R are referenced by index only; materialize them as A[:, p] and
    A[s, :] when needed.
    """

    p: np.ndarray
    s: np.ndarray
    M: np.ndarray


class InterpolativeFactors(NamedTuple):
    """One-sided (interpolative) decomposition: indices, factor, relative error."""

    indices: np.ndarray
    factor: np.ndarray
    rel_error: float


def _check_full_rank(block, name):
    sv = np.linalg.svd(block, compute_uv=False)
    if sv[-1] <= RANK_TOL * max(1.0, sv[0]):
        raise FullRankError(f"{name} is rank deficient")


def middle_matrix(a, p, s, name="A"):
    """Middle matrix C^+ A R^+ for C = A[:, p], R = A[s, :] (Frobenius-optimal)."""
    a = as_matrix(a, name)
    p = deim.as_indices(p, a.shape[1], "p")
    s = deim.as_indices(s, a.shape[0], "s")
    c = a[:, p]
    r = a[s, :]
    _check_full_rank(c, f"column factor {name}[:, p]")
    _check_full_rank(r, f"row factor {name}[s, :]")
    a_rpinv = matkit.lstsq(r.T, a.T).T  # A R^+
    return matkit.lstsq(c, a_rpinv)  # C^+ (A R^+)


def _warn_if_degenerate(psi, k):
    if k < psi.size and psi[k - 1] - psi[k] <= RANK_TOL * max(1.0, psi[0]):
        warnings.warn(
            f"singular values {k} and {k + 1} coincide to working precision; "
            "index selection is still deterministic but not unique",
            stacklevel=3,
        )


def deim_cur(a, k, *, k_rows=None, k_cols=None):
    """Rank-k CUR of A with rows from the left and columns from the right
    singular vectors.

    ``k_rows``/``k_cols`` override the shared default k, in which case M is
    rectangular (k_cols x k_rows). A degenerate spectrum at either cut emits a
    warning; selection proceeds deterministically.
    """
    a = as_matrix(a, "A")
    k_rows = k if k_rows is None else k_rows
    k_cols = k if k_cols is None else k_cols
    kmax = max(k_rows, k_cols)
    if not 1 <= kmax < min(a.shape):
        raise DimensionError(
            f"rank must satisfy 1 <= k < min(m, n) = {min(a.shape)}, got {kmax}"
        )
    f = matkit.svd(a)
    _warn_if_degenerate(f.psi, kmax)
    p = deim.deim_select(f.Z[:, :k_cols], k_cols)
    s = deim.deim_select(f.W[:, :k_rows], k_rows)
    return CurFactors(p, s, middle_matrix(a, p, s))


def reconstruct(a, factors):
    """Materialize C @ M @ R for CUR factors of A."""
    a = as_matrix(a, "A")
    return a[:, factors.p] @ factors.M @ a[factors.s, :]


def interpolative(a, k, mode="column"):
    """One-sided decomposition: A ~= C @ (C^+ A) or A ~= (A R^+) @ R.

    mode="column" keeps k actual columns, mode="row" keeps k actual rows; the
    reported relative error is ||A - reconstruction|| / ||A|| in the 2-norm.
    """
    if mode not in ("column", "row"):
        raise ValueError(f"mode must be 'column' or 'row', got {mode!r}")
    a = as_matrix(a, "A")
    if not 1 <= k < min(a.shape):
        raise DimensionError(
            f"rank must satisfy 1 <= k < min(m, n) = {min(a.shape)}, got {k}"
        )
    f = matkit.svd(a)
    _warn_if_degenerate(f.psi, k)
    scale = max(f.psi[0], np.finfo(float).tiny)
    if mode == "column":
        p = deim.deim_select(f.Z[:, :k], k)
        c = a[:, p]
        _check_full_rank(c, "column factor A[:, p]")
        factor = matkit.lstsq(c, a)
        err = matkit.spectral_norm(a - c @ factor) / scale
        return InterpolativeFactors(p, factor, float(err))
    s = deim.deim_select(f.W[:, :k], k)
    r = a[s, :]
    _check_full_rank(r, "row factor A[s, :]")
    factor = matkit.lstsq(r.T, a.T).T
    err = matkit.spectral_norm(a - factor @ r) / scale
    return InterpolativeFactors(s, factor, float(err))
