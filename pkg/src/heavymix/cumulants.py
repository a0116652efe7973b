"""Cumulant tensors, Khatri-Rao powers, and Poisson-reduction weight recovery.

The order-l cross-cumulant tensor of X = AS + eta (independent sources S_j,
Gaussian noise eta) flattens to A^(kr l) (kappa_l(S_1), ..., kappa_l(S_m))^T,
where A^(kr l) is the columnwise l-fold tensor power; Gaussian noise drops
out for l > 2 and Poisson(w_j lambda) sources have kappa_l = w_j lambda for
every order.  Mixing weights are therefore read off as
(1/lambda) pinv(A^(kr l)) vec(kappa_X).

Estimators use plug-in central moments (bias O(1/N), far below the test
tolerances at the sample sizes used) and are restricted to orders 2-4, which
covers every use here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import permutations

import numpy as np

_RANK_TOL = 1e-10  # relative sigma_min cutoff for the pseudo-inverse
_BLOCK = 65536


@dataclass(frozen=True)
class CumulantTensor:
    """Fully symmetric order-l tensor of cross-cumulants."""

    order: int
    dimension: int
    values: np.ndarray

    def __post_init__(self):
        if self.order not in (2, 3, 4):
            raise ValueError(f"order must be 2, 3 or 4, got {self.order}")
        vals = np.asarray(self.values, dtype=float)
        if vals.shape != (self.dimension,) * self.order:
            raise ValueError(f"values shape {vals.shape} does not match "
                             f"order {self.order}, dimension {self.dimension}")
        # canonical storage: symmetrize over all index permutations
        sym = np.zeros_like(vals)
        perms = list(permutations(range(self.order)))
        for p in perms:
            sym += vals.transpose(p)
        sym /= len(perms)
        object.__setattr__(self, "values", sym)


def vectorize_tensor(tensor: CumulantTensor) -> np.ndarray:
    """Lexicographic flattening, consistent with khatri_rao_power columns."""
    return tensor.values.reshape(-1).copy()


def tensor_from_vector(vec, order: int, dimension: int) -> CumulantTensor:
    v = np.asarray(vec, dtype=float)
    if v.size != dimension ** order:
        raise ValueError(f"vector length {v.size} != {dimension}^{order}")
    return CumulantTensor(order, dimension, v.reshape((dimension,) * order))


def estimate_cumulant(samples, order: int) -> CumulantTensor:
    """Sample cross-cumulant tensor of orders 2-4 from (N, n) observations.

    Order 2 is the covariance; order 3 the third central moment; order 4 the
    fourth central moment minus its three covariance pairings.  Accumulation
    is blocked over samples so million-row inputs never materialize an
    (N, n, n) intermediate.
    """
    x = np.atleast_2d(np.asarray(samples, dtype=float))
    count, dim = x.shape
    if order not in (2, 3, 4):
        raise ValueError(f"order must be 2, 3 or 4, got {order}")
    if count < 10 * order:
        raise ValueError(f"need at least {10 * order} samples for order {order}")
    mean = x.mean(axis=0)

    m2 = np.zeros((dim, dim))
    m3 = np.zeros((dim, dim, dim)) if order >= 3 else None
    m4 = np.zeros((dim,) * 4) if order == 4 else None
    for start in range(0, count, _BLOCK):
        y = x[start:start + _BLOCK] - mean
        m2 += np.einsum("ni,nj->ij", y, y)
        if order >= 3:
            m3 += np.einsum("ni,nj,nk->ijk", y, y, y)
        if order == 4:
            m4 += np.einsum("ni,nj,nk,nl->ijkl", y, y, y, y)
    m2 /= count
    if order == 2:
        return CumulantTensor(2, dim, m2)
    if order == 3:
        return CumulantTensor(3, dim, m3 / count)
    m4 /= count
    k4 = (m4
          - np.einsum("ij,kl->ijkl", m2, m2)
          - np.einsum("ik,jl->ijkl", m2, m2)
          - np.einsum("il,jk->ijkl", m2, m2))
    return CumulantTensor(4, dim, k4)


# ---------------------------------------------------------------------------
# Khatri-Rao powers


def khatri_rao_power(a, order: int) -> np.ndarray:
    """Columnwise order-fold tensor power, flattened: (n^order, m)."""
    a = np.atleast_2d(np.asarray(a, dtype=float))
    if order < 2:
        raise ValueError("order must be at least 2")
    cols = []
    for k in range(a.shape[1]):
        col = a[:, k]
        out = col
        for _ in range(order - 1):
            out = np.kron(out, col)
        cols.append(out)
    return np.stack(cols, axis=1)


def multilinear_kr2(a) -> np.ndarray:
    """Strictly-upper half of the columnwise square: rows (i,j), i<j, lex order."""
    a = np.atleast_2d(np.asarray(a, dtype=float))
    n = a.shape[0]
    if n < 2:
        raise ValueError("need at least two rows")
    iu, ju = np.triu_indices(n, k=1)
    return a[iu, :] * a[ju, :]


# ---------------------------------------------------------------------------
# Poisson reduction


@dataclass(frozen=True)
class PoissonReduction:
    """X = AS + eta with S_j ~ Poisson(w_j * lam) and eta ~ N(0, tau^2 I).

    Columns of the mixing matrix are the Gaussian means of the underlying
    mixture; the weights live on the simplex.
    """

    mixing_matrix: np.ndarray
    weights: np.ndarray
    lam: float
    noise_tau: float = 0.0

    def __post_init__(self):
        a = np.atleast_2d(np.asarray(self.mixing_matrix, dtype=float))
        w = np.asarray(self.weights, dtype=float).ravel()
        if a.shape[1] != w.shape[0]:
            raise ValueError("one weight per mixing column required")
        if np.any(w <= 0) or abs(w.sum() - 1.0) > 1e-9:
            raise ValueError("weights must be positive and sum to 1")
        if self.lam <= 0:
            raise ValueError("lam must be positive")
        if self.noise_tau < 0:
            raise ValueError("noise_tau must be nonnegative")
        object.__setattr__(self, "mixing_matrix", a)
        object.__setattr__(self, "weights", w)

    @property
    def n_observed(self) -> int:
        return self.mixing_matrix.shape[0]

    @property
    def n_components(self) -> int:
        return self.mixing_matrix.shape[1]


def sample_reduction(model: PoissonReduction, count: int,
                     rng: np.random.Generator) -> np.ndarray:
    """(count, n) observations of X = AS + eta."""
    s = np.empty((count, model.n_components))
    for j in range(model.n_components):
        s[:, j] = rng.poisson(model.weights[j] * model.lam, size=count)
    x = s @ model.mixing_matrix.T
    if model.noise_tau > 0:
        x = x + model.noise_tau * rng.standard_normal((count, model.n_observed))
    return x


def poisson_cumulant_tensor(model: PoissonReduction, order: int) -> CumulantTensor:
    """Analytic cumulant tensor: every Poisson cumulant equals its mean."""
    kr = khatri_rao_power(model.mixing_matrix, order)
    vec = kr @ (model.lam * model.weights)
    if order > 2 or model.noise_tau == 0.0:
        return tensor_from_vector(vec, order, model.n_observed)
    cov = vec.reshape(model.n_observed, model.n_observed) \
        + model.noise_tau ** 2 * np.eye(model.n_observed)
    return CumulantTensor(2, model.n_observed, cov)


# ---------------------------------------------------------------------------
# weight recovery


@dataclass(frozen=True)
class WeightEstimate:
    raw: np.ndarray        # the pseudo-inverse formula verbatim, unclipped
    projected: np.ndarray  # Euclidean projection of raw onto the simplex


def simplex_project(v) -> np.ndarray:
    """Euclidean projection onto {w : w >= 0, sum w = 1} (sort-based)."""
    v = np.asarray(v, dtype=float).ravel()
    u = np.sort(v)[::-1]
    cssv = np.cumsum(u) - 1.0
    rho = np.flatnonzero(u * np.arange(1, v.size + 1) > cssv)[-1]
    theta = cssv[rho] / (rho + 1.0)
    return np.maximum(v - theta, 0.0)


def recover_weights_from_tensor(tensor: CumulantTensor, mixing_matrix,
                                lam: float) -> WeightEstimate:
    """(1/lam) pinv(A^(kr l)) vec(kappa); rank deficiency is an error."""
    a = np.atleast_2d(np.asarray(mixing_matrix, dtype=float))
    if a.shape[0] != tensor.dimension:
        raise ValueError("mixing matrix rows must match tensor dimension")
    kr = khatri_rao_power(a, tensor.order)
    sigma = np.linalg.svd(kr, compute_uv=False)
    if sigma[-1] <= _RANK_TOL * sigma[0]:
        raise ValueError(
            f"A^(kr {tensor.order}) is rank deficient: sigma_min/sigma_max = "
            f"{sigma[-1] / sigma[0]:.2e} (need > {_RANK_TOL:.0e})")
    raw = np.linalg.pinv(kr) @ vectorize_tensor(tensor) / lam
    return WeightEstimate(raw=raw, projected=simplex_project(raw))


def recover_weights(samples, mixing_matrix, lam: float, order: int) -> WeightEstimate:
    """Estimate the cumulant tensor from samples, then apply the formula."""
    tensor = estimate_cumulant(samples, order)
    return recover_weights_from_tensor(tensor, mixing_matrix, lam)
