"""Seeded generators for the synthetic test objects used by the experiments.

Every generator is a pure function of its parameters and seed: the same seed
gives a bit-identical result. Seeds are anything ``numpy.random.default_rng``
accepts, including ``SeedSequence`` children, which is how the experiment
harness splits streams across trials.
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import matkit
from .errors import ContractViolationError, DimensionError, SingularMatrixError
from .matkit import as_matrix, require_finite

#: Group names of the four-subgroup target data set, in row-block order.
SUBGROUP_NAMES = ("blue", "yellow", "orange", "purple")


@dataclass(frozen=True)
class NoiseModel:
    """Additive colored-noise description: covariance plus relative level.

    The covariance of the noise rows is either Toeplitz with entries
    rho^|i-j| or an explicit SPD matrix. ``epsilon`` is the relative noise
    level: the generated perturbation satisfies ||E|| = epsilon * ||A|| in
    the 2-norm.
    """

    epsilon: float
    seed: object = 0
    rho: float = 0.99
    covariance: Optional[np.ndarray] = None

    def __post_init__(self):
        if self.epsilon < 0:
            raise ContractViolationError(f"epsilon must be >= 0, got {self.epsilon}")
        if self.covariance is None and not 0.0 < self.rho < 1.0:
            raise ContractViolationError(f"rho must be in (0, 1), got {self.rho}")

    def cholesky_factor(self, n):
        """Upper-triangular factor R with R.T @ R equal to the covariance."""
        if self.covariance is None:
            return toeplitz_chol(n, self.rho)
        cov = as_matrix(self.covariance, "covariance")
        if cov.shape != (n, n):
            raise DimensionError(
                f"covariance must be {n}x{n} to match the data, got {cov.shape}"
            )
        if not np.allclose(cov, cov.T):
            raise ContractViolationError("covariance must be symmetric")
        try:
            lower = np.linalg.cholesky(cov)
        except np.linalg.LinAlgError as exc:
            raise SingularMatrixError("covariance is not positive definite") from exc
        return lower.T.copy()


@dataclass(frozen=True)
class SubgroupSpec:
    """Parameters of the four-subgroup target/background data sets.

    Defaults give 400 target points in 30 features: the first feature block
    is high-variance for everyone, the second separates groups (yellow,
    purple) by a mean offset, the third separates (orange, purple). The
    background carries the same variance profile but no group structure.
    Per-block means index groups in ``SUBGROUP_NAMES`` order.
    """

    points_per_group: int = 100
    seed: object = 0
    block_stds: tuple = (10.0, 1.0, 1.0)
    block2_means: tuple = (0.0, 6.0, 0.0, 6.0)
    block3_means: tuple = (0.0, 0.0, 3.0, 3.0)
    background_stds: tuple = (10.0, 3.0, 1.0)

    def __post_init__(self):
        if self.points_per_group < 1:
            raise ContractViolationError("points_per_group must be positive")


def _sparse_uniform(rng, n, density=0.025):
    # sprand-style vector: uniform(0, 1) values at independently chosen
    # positions, at least one nonzero enforced so no factor collapses.
    mask = rng.random(n) < density
    if not mask.any():
        mask[rng.integers(n)] = True
    out = np.zeros(n)
    out[mask] = rng.random(int(mask.sum()))
    return out


def lowrank_sparse(m, n, seed):
    """Sparse nonnegative rank-<=50 matrix built from 50 scaled outer products.

    Leading ten components carry weights 2/j, the remaining forty 1/j; the
    factor vectors have expected density 0.025 with uniform nonnegative
    nonzeros.
    """
    if min(m, n) < 50:
        raise DimensionError(f"need min(m, n) >= 50 for a rank-50 build, got {m}x{n}")
    rng = np.random.default_rng(seed)
    a = np.zeros((m, n))
    for j in range(1, 51):
        coeff = 2.0 / j if j <= 10 else 1.0 / j
        x = _sparse_uniform(rng, m)
        y = _sparse_uniform(rng, n)
        a += coeff * np.outer(x, y)
    return require_finite(a, "generated matrix")


def lowrank_gapped(m, n, seed):
    """Dense rank-<=50 matrix with a deliberate spectral gap.

    Built from 50 outer products of standard normal vectors; the leading ten
    carry weights 1000/j against 1/j for the rest, producing a drop of at
    least 10x between the 10th and 11th singular values (checked after
    construction).
    """
    if min(m, n) < 50:
        raise DimensionError(f"need min(m, n) >= 50 for a rank-50 build, got {m}x{n}")
    rng = np.random.default_rng(seed)
    a = np.zeros((m, n))
    for j in range(1, 51):
        coeff = 1000.0 / j if j <= 10 else 1.0 / j
        a += coeff * np.outer(rng.standard_normal(m), rng.standard_normal(n))
    psi = np.linalg.svd(a, compute_uv=False)
    if psi[9] < 10.0 * psi[10]:
        raise ContractViolationError(
            f"spectral gap psi_10/psi_11 = {psi[9] / psi[10]:.2f} < 10"
        )
    return require_finite(a, "generated matrix")


def toeplitz_chol(n, rho):
    """Upper-triangular Cholesky factor of the Toeplitz covariance rho^|i-j|."""
    if n < 1:
        raise DimensionError(f"n must be positive, got {n}")
    if not 0.0 < rho < 1.0:
        raise ContractViolationError(f"rho must be in (0, 1), got {rho}")
    idx = np.arange(n)
    cov = rho ** np.abs(idx[:, None] - idx[None, :])
    try:
        lower = np.linalg.cholesky(cov)
    except np.linalg.LinAlgError as exc:  # cannot occur for rho in (0, 1)
        raise SingularMatrixError("Toeplitz covariance is not positive definite") from exc
    return lower.T.copy()


def colored_noise(a, model):
    """Perturb A with correlated Gaussian noise of relative 2-norm ``epsilon``.

    Draws G with standard normal entries, correlates the rows as F = G @ R
    with R the covariance's Cholesky factor, and scales so that
    ||E|| = epsilon * ||A||. Returns (A + E, E, R).
    """
    a = as_matrix(a, "A")
    m, n = a.shape
    rchol = model.cholesky_factor(n)
    rng = np.random.default_rng(model.seed)
    f = rng.standard_normal((m, n)) @ rchol
    if model.epsilon == 0.0:
        e = np.zeros_like(a)
    else:
        e = (model.epsilon * matkit.spectral_norm(a) / matkit.spectral_norm(f)) * f
    return a + e, e, rchol


def perturb_chol(rchol, seed):
    """Scale the off-diagonal entries of a Cholesky factor by uniform [0.9, 1.1].

    The diagonal is untouched, so the result stays upper triangular with a
    positive diagonal and hence full rank.
    """
    rchol = as_matrix(rchol, "Rchol")
    n = rchol.shape[0]
    if rchol.shape[1] != n:
        raise DimensionError(f"Cholesky factor must be square, got {rchol.shape}")
    if np.any(np.tril(rchol, -1) != 0.0):
        raise ContractViolationError("Cholesky factor must be upper triangular")
    rng = np.random.default_rng(seed)
    factors = rng.uniform(0.9, 1.1, size=rchol.shape)
    out = rchol.copy()
    off = ~np.eye(n, dtype=bool)
    out[off] *= factors[off]
    return out


def subgroup_data(spec, center=False):
    """Four-subgroup target matrix A, background matrix B, and row labels.

    A has ``4 * points_per_group`` rows and 30 features in three blocks of
    ten; group membership shifts the block-2 and block-3 means per
    ``spec``. B has the same shape with zero-mean blocks at the background
    variances. ``center=True`` subtracts each column's mean from both
    matrices. Labels are integers 0..3 indexing ``SUBGROUP_NAMES``.
    """
    g = spec.points_per_group
    rows = 4 * g
    rng = np.random.default_rng(spec.seed)

    a = rng.standard_normal((rows, 30))
    a[:, 0:10] *= spec.block_stds[0]
    a[:, 10:20] *= spec.block_stds[1]
    a[:, 20:30] *= spec.block_stds[2]
    labels = np.repeat(np.arange(4), g)
    for grp in range(4):
        sel = labels == grp
        a[sel, 10:20] += spec.block2_means[grp]
        a[sel, 20:30] += spec.block3_means[grp]

    b = rng.standard_normal((rows, 30))
    b[:, 0:10] *= spec.background_stds[0]
    b[:, 10:20] *= spec.background_stds[1]
    b[:, 20:30] *= spec.background_stds[2]

    if center:
        a = a - a.mean(axis=0)
        b = b - b.mean(axis=0)
    require_finite(a, "target matrix")
    require_finite(b, "background matrix")
    return a, b, labels
