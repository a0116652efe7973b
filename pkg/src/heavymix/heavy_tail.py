"""Symmetric heavy-tailed sources and empirical-abs-mean concentration.

The concentration statement under test: for a symmetric real random variable
with E|X|^(1+gamma) <= M (M > 1, 0 < gamma < 1) and
N >= (8M/eps)^(1/2 + 1/gamma) samples,

    Pr[ |mean_N(|X|) - E|X|| > eps ] <= 8M / (eps^2 N^(gamma/3)).

The module provides the formula side (bounds, sample sizes, the truncation
constants used in the derivation) and a Monte Carlo side (a symmetrized
Pareto family realizing the hypotheses, plus a failure-rate harness).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .rng import as_master_seed, derive_rng

_CHUNK = 1 << 22  # samples per block in the streaming mean (32 MB of f64)


# ---------------------------------------------------------------------------
# compensated summation


def _compensated_sum(values: np.ndarray) -> float:
    """Blockwise pairwise sums combined exactly with math.fsum.

    Heavy tails put values of wildly different magnitude in one stream;
    plain accumulation loses the small ones.  Exact fsum over pairwise
    block sums keeps the error at a few ulps of the final result.
    """
    v = np.asarray(values, dtype=float).ravel()
    if v.size <= 4096:
        return math.fsum(v.tolist())
    n_blocks = (v.size + 65535) // 65536
    return math.fsum(float(np.sum(b)) for b in np.array_split(v, n_blocks))


def empirical_abs_mean(samples) -> float:
    """(|X1| + ... + |XN|) / N with compensated summation."""
    v = np.asarray(samples, dtype=float).ravel()
    if v.size == 0:
        raise ValueError("empirical_abs_mean needs at least one sample")
    return _compensated_sum(np.abs(v)) / v.size


# ---------------------------------------------------------------------------
# source distributions


@dataclass(frozen=True)
class HeavyTailSpec:
    """Symmetrized Pareto source normalized to E|X| = 1.

    |X| = scale * Pareto(x_m=1, alpha=tail_shape) with a uniform random sign.
    ``scale`` defaults to (alpha-1)/alpha, which pins E|X| = 1; the moment
    bound E|X|^(1+gamma) then has the closed form
    scale^(1+gamma) * alpha / (alpha - 1 - gamma), always > 1 by Jensen.
    """

    gamma: float
    tail_shape: float | None = None
    scale: float | None = None
    moment_bound_M: float | None = None

    def __post_init__(self):
        if not 0.0 < self.gamma < 1.0:
            raise ValueError(f"gamma must lie in (0,1), got {self.gamma}")
        alpha = 1.0 + 2.0 * self.gamma if self.tail_shape is None else float(self.tail_shape)
        if alpha <= 1.0 + self.gamma:
            raise ValueError(
                f"tail_shape must exceed 1+gamma={1 + self.gamma} for a finite "
                f"(1+gamma)-moment, got {alpha}")
        scale = (alpha - 1.0) / alpha if self.scale is None else float(self.scale)
        if scale <= 0:
            raise ValueError("scale must be positive")
        closed_form = scale ** (1.0 + self.gamma) * alpha / (alpha - 1.0 - self.gamma)
        m = closed_form if self.moment_bound_M is None else float(self.moment_bound_M)
        if m < closed_form * (1 - 1e-12):
            raise ValueError(
                f"moment_bound_M={m} is below the actual moment {closed_form}")
        if m <= 1.0:
            raise ValueError(f"moment_bound_M must exceed 1, got {m}")
        object.__setattr__(self, "tail_shape", alpha)
        object.__setattr__(self, "scale", scale)
        object.__setattr__(self, "moment_bound_M", m)

    def abs_moment(self, p: float) -> float:
        """E|X|^p, finite for p < tail_shape."""
        if p >= self.tail_shape:
            return np.inf
        return self.scale ** p * self.tail_shape / (self.tail_shape - p)

    def sample(self, count: int, rng: np.random.Generator) -> np.ndarray:
        return sample_heavy(self, count, rng)


@dataclass(frozen=True)
class UniformSource:
    """Uniform on [-half_width, half_width]; default width gives E|S| = 1.

    Light-tailed stand-in with every absolute moment in closed form, used
    where ground truth support functions are wanted.
    """

    half_width: float = 2.0

    def __post_init__(self):
        if self.half_width <= 0:
            raise ValueError("half_width must be positive")

    def abs_moment(self, p: float) -> float:
        return self.half_width ** p / (p + 1.0)

    def sample(self, count: int, rng: np.random.Generator) -> np.ndarray:
        return rng.uniform(-self.half_width, self.half_width, size=count)


def sample_heavy(spec: HeavyTailSpec, count: int, rng: np.random.Generator) -> np.ndarray:
    """iid draws of the symmetrized Pareto: sign * scale * U^(-1/alpha)."""
    mags = _sample_magnitudes(spec, count, rng)
    signs = np.where(rng.random(count) < 0.5, -1.0, 1.0)
    return signs * mags


def _sample_magnitudes(spec, count, rng, out=None):
    # inverse CDF on 1-U keeps the base in (0, 1], so no overflow at u=0
    u = rng.random(count) if out is None else rng.random(out=out)
    np.subtract(1.0, u, out=u)
    np.power(u, -1.0 / spec.tail_shape, out=u)
    if spec.scale != 1.0:
        u *= spec.scale
    return u


# ---------------------------------------------------------------------------
# formulas


def _validate_formula_args(epsilon, M, gamma):
    if not 0.0 < epsilon < 1.0:
        raise ValueError(f"epsilon must lie in (0,1), got {epsilon}")
    if M <= 1.0:
        raise ValueError(f"M must exceed 1, got {M}")
    if not 0.0 < gamma < 1.0:
        raise ValueError(f"gamma must lie in (0,1), got {gamma}")


def chebyshev_failure_bound(epsilon: float, n_samples: int, M: float, gamma: float) -> float:
    """min(1, 8M / (eps^2 N^(gamma/3))); the clamp keeps it a probability."""
    _validate_formula_args(epsilon, M, gamma)
    if n_samples < 1:
        raise ValueError("n_samples must be at least 1")
    return min(1.0, 8.0 * M / (epsilon ** 2 * float(n_samples) ** (gamma / 3.0)))


def sample_bound(epsilon: float, M: float, gamma: float) -> float:
    """(8M/eps)^(1/2 + 1/gamma), the raw sample-size threshold."""
    _validate_formula_args(epsilon, M, gamma)
    return (8.0 * M / epsilon) ** (0.5 + 1.0 / gamma)


def min_samples(epsilon: float, M: float, gamma: float) -> int:
    """Smallest integer N satisfying the lemma hypothesis (ceil, not floor)."""
    return int(math.ceil(sample_bound(epsilon, M, gamma)))


def analysis_constants(epsilon_prime: float, M: float, gamma: float):
    """Internal constants of the concentration proof, exposed for testing.

    Returns (T0, N_of_T): T0 = (M/eps')^(1/gamma) is the truncation threshold
    that makes the tail bias M/T0^gamma equal eps' exactly, and N_of_T(T) is
    the sample count balancing the union and Chebyshev terms at threshold T.
    """
    if not 0.0 < epsilon_prime < 0.5:
        raise ValueError(f"epsilon_prime must lie in (0, 1/2), got {epsilon_prime}")
    if M <= 1.0:
        raise ValueError(f"M must exceed 1, got {M}")
    if not 0.0 < gamma < 1.0:
        raise ValueError(f"gamma must lie in (0,1), got {gamma}")
    t0 = (M / epsilon_prime) ** (1.0 / gamma)

    def n_of_t(t: float) -> float:
        return t ** (1.0 + gamma / 2.0) / (epsilon_prime * M ** (gamma / (2.0 * (1.0 + gamma))))

    return t0, n_of_t


# ---------------------------------------------------------------------------
# Monte Carlo harness


@dataclass(frozen=True)
class ConcentrationReport:
    epsilon: float
    n_samples: int
    bound: float
    empirical_rate: float
    trials: int
    gamma: float
    moment_bound_M: float

    def ci_half_width(self) -> float:
        """Normal-approximation binomial half-width for the empirical rate."""
        p = self.empirical_rate
        return math.sqrt(max(p * (1.0 - p), 1.0 / self.trials) / self.trials)


def trial_abs_mean(spec: HeavyTailSpec, n_samples: int, rng: np.random.Generator,
                   _buf: np.ndarray | None = None) -> float:
    """Empirical E|X| from one fresh batch of n_samples draws (streamed)."""
    remaining = n_samples
    partials = []
    while remaining > 0:
        k = min(remaining, _CHUNK)
        buf = _buf[:k] if _buf is not None and k == _CHUNK else None
        mags = _sample_magnitudes(spec, k, rng, out=buf)
        partials.append(float(np.sum(mags)))
        remaining -= k
    return math.fsum(partials) / n_samples


def estimate_failure_rate(spec: HeavyTailSpec, epsilon: float, n_samples: int,
                          trials: int, seed, strict: bool = False) -> ConcentrationReport:
    """Fraction of trials whose empirical |X|-mean misses E|X| = 1 by > eps.

    ``seed`` may be an integer or a Generator; each trial re-derives its own
    stream from the master seed and its index, so results do not depend on
    execution order and trials can be sharded externally.  ``strict`` enforces
    the lemma's sample-size hypothesis.
    """
    if trials <= 0:
        raise ValueError("trials must be positive")
    if n_samples <= 0:
        raise ValueError("n_samples must be positive")
    if strict and n_samples < min_samples(epsilon, spec.moment_bound_M, spec.gamma):
        raise ValueError(
            f"strict mode: n_samples={n_samples} is below "
            f"min_samples={min_samples(epsilon, spec.moment_bound_M, spec.gamma)}")
    master = as_master_seed(seed)
    buf = np.empty(min(n_samples, _CHUNK)) if n_samples >= (1 << 16) else None
    failures = 0
    for t in range(trials):
        mean = trial_abs_mean(spec, n_samples, derive_rng(master, t), _buf=buf)
        if abs(mean - 1.0) > epsilon:
            failures += 1
    return ConcentrationReport(
        epsilon=epsilon,
        n_samples=n_samples,
        bound=chebyshev_failure_bound(epsilon, n_samples, spec.moment_bound_M, spec.gamma),
        empirical_rate=failures / trials,
        trials=trials,
        gamma=spec.gamma,
        moment_bound_M=spec.moment_bound_M,
    )
