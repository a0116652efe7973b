"""Sampled centroid bodies: zonotope geometry and LP membership oracles.

For a sample x(1), ..., x(N) in R^n, the sampled centroid body is the
zonotope (1/N) sum_i [-x(i), x(i)].  Membership of a query q is exactly the
feasibility of

    (1/N) sum_i lambda_i x(i) = q,   lambda in [-1, 1]^N,

and the Minkowski functional is 1/lambda* for the always-feasible program
maximizing t under (1/N) sum_i lambda_i x(i) = t q.  The weak membership
oracle draws a fresh sample of an ICA model X = AS and answers by LP
feasibility; its formula sample sizes are implemented verbatim and are
deliberately overridable downward, because their exponents (3/gamma) are far
too conservative to ever run at face value.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import lp

_ANGLE_TOL = 1e-12


@dataclass(frozen=True)
class SampledCentroidBody:
    """Zonotope (1/N) sum [-x(i), x(i)] represented by its sample points."""

    points: np.ndarray  # (N, n)

    def __post_init__(self):
        pts = np.atleast_2d(np.asarray(self.points, dtype=float))
        if pts.ndim != 2 or pts.shape[0] < 1:
            raise ValueError("need at least one sample point")
        if not np.all(np.isfinite(pts)):
            raise ValueError("sample points must be finite")
        object.__setattr__(self, "points", pts)

    @property
    def count(self) -> int:
        return self.points.shape[0]

    @property
    def dimension(self) -> int:
        return self.points.shape[1]

    def _check_query(self, q) -> np.ndarray:
        q = np.asarray(q, dtype=float).ravel()
        if q.shape[0] != self.dimension:
            raise ValueError(f"query has dimension {q.shape[0]}, body has {self.dimension}")
        return q


def support_function(body: SampledCentroidBody, direction) -> float:
    """h(u) = (1/N) sum |u . x(i)| for the normalized direction u."""
    d = np.asarray(direction, dtype=float).ravel()
    if d.shape[0] != body.dimension:
        raise ValueError("direction dimension mismatch")
    norm = np.linalg.norm(d)
    if norm == 0.0:
        raise ValueError("direction must be nonzero")
    return float(np.abs(body.points @ (d / norm)).mean())


def _membership_lp(body: SampledCentroidBody, q: np.ndarray) -> lp.BoundedLP:
    n_samples = body.count
    return lp.BoundedLP(
        eq_matrix=body.points.T / n_samples,
        eq_rhs=q,
        lower=-np.ones(n_samples),
        upper=np.ones(n_samples),
        objective=np.zeros(n_samples),
    )


def membership(body: SampledCentroidBody, q) -> bool:
    """Exact LP feasibility of q in the zonotope (no epsilon slack)."""
    q = body._check_query(q)
    problem = _membership_lp(body, q)
    # support-maximizing vertex along q: a phase-1 start that is already
    # optimal for far-outside queries and close for interior ones
    start = np.sign(body.points @ q, dtype=float) if np.any(q) else None
    return lp.solve(problem, start=start).status is lp.LPStatus.OPTIMAL


def membership_solution(body: SampledCentroidBody, q) -> lp.LPSolution:
    """Membership LP solved for its full solution (iteration counts, point)."""
    q = body._check_query(q)
    start = np.sign(body.points @ q, dtype=float) if np.any(q) else None
    return lp.solve(_membership_lp(body, q), start=start)


def dual_witness(body: SampledCentroidBody, q):
    """Feasible lambda in [-1,1]^N reconstructing q, or None when outside."""
    sol = membership_solution(body, q)
    if sol.status is not lp.LPStatus.OPTIMAL:
        return None
    return sol.point


def minkowski_functional(body: SampledCentroidBody, q) -> float:
    """inf{t > 0 : q in t * body}; 0 at the origin, +inf outside the span.

    Solved as max t subject to (1/N) sum lambda_i x(i) = t q over the box,
    then inverted: the program is always feasible (lambda = 0, t = 0), is
    unbounded exactly when q = 0, and has optimum 0 exactly when q leaves
    the zonotope's linear span.
    """
    q = body._check_query(q)
    n_samples, dim = body.count, body.dimension
    eq = np.hstack([body.points.T / n_samples, -q[:, None]])
    problem = lp.BoundedLP(
        eq_matrix=eq,
        eq_rhs=np.zeros(dim),
        lower=np.concatenate([-np.ones(n_samples), [-np.inf]]),
        upper=np.concatenate([np.ones(n_samples), [np.inf]]),
        objective=np.concatenate([np.zeros(n_samples), [1.0]]),
    )
    start = np.concatenate([np.sign(body.points @ q), [0.0]]) if np.any(q) else None
    sol = lp.solve(problem, start=start)
    if sol.status is lp.LPStatus.UNBOUNDED:
        return 0.0
    lam_star = sol.objective_value
    if lam_star <= 0.0:
        return np.inf
    return 1.0 / lam_star


# ---------------------------------------------------------------------------
# 2-D brute-force oracle


def zonotope_polygon_2d(body: SampledCentroidBody) -> np.ndarray:
    """Exact vertex cycle (CCW) of a 2-D sampled centroid body.

    Standard zonogon construction: normalize the generators x(i)/N into the
    upper half-plane, merge collinear ones, sort by angle and walk edges of
    length 2g from the lowest vertex -sum(g).  Intended as a test oracle,
    so the sample count is capped.
    """
    if body.dimension != 2:
        raise ValueError("polygon construction requires dimension 2")
    if body.count > 20:
        raise ValueError("polygon oracle capped at 20 generators")
    gens = body.points / body.count
    gens = gens[np.linalg.norm(gens, axis=1) > 1e-15]
    if gens.shape[0] == 0:
        return np.zeros((1, 2))
    flip = (gens[:, 1] < 0) | ((gens[:, 1] == 0) & (gens[:, 0] < 0))
    gens = np.where(flip[:, None], -gens, gens)
    angles = np.arctan2(gens[:, 1], gens[:, 0])
    order = np.argsort(angles, kind="stable")
    gens, angles = gens[order], angles[order]
    merged = [gens[0].copy()]
    last_angle = angles[0]
    for g, a in zip(gens[1:], angles[1:]):
        if a - last_angle < _ANGLE_TOL:
            merged[-1] += g
        else:
            merged.append(g.copy())
            last_angle = a
    merged = np.asarray(merged)

    bottom = -merged.sum(axis=0)
    chain = [bottom]
    v = bottom.copy()
    for g in merged:
        v = v + 2 * g
        chain.append(v.copy())
    if merged.shape[0] == 1:
        return np.asarray(chain)  # segment: two endpoints
    # the opposite chain is the central reflection, minus duplicated endpoints
    lower = [-p for p in chain[1:-1]]
    return np.asarray(chain + lower)


def polygon_contains(vertices: np.ndarray, point, tol: float = 1e-9) -> bool:
    """Point-in-convex-polygon for the CCW cycles built above."""
    p = np.asarray(point, dtype=float)
    v = np.atleast_2d(vertices)
    if v.shape[0] == 1:
        return bool(np.linalg.norm(p - v[0]) <= tol)
    if v.shape[0] == 2:
        d = v[1] - v[0]
        t = np.clip(np.dot(p - v[0], d) / np.dot(d, d), 0.0, 1.0)
        return bool(np.linalg.norm(v[0] + t * d - p) <= tol)
    nxt = np.roll(v, -1, axis=0)
    edges = nxt - v
    cross = edges[:, 0] * (p[1] - v[:, 1]) - edges[:, 1] * (p[0] - v[:, 0])
    return bool(np.all(cross >= -tol * np.linalg.norm(edges, axis=1)))


# ---------------------------------------------------------------------------
# sampling oracle


@dataclass(frozen=True)
class OracleParams:
    """Accuracy/confidence inputs of the weak membership oracle.

    ``s_max``/``s_min`` bound the extreme singular values of the mixing
    matrix; ``gamma``/``moment_bound`` describe the source moment hypothesis.
    """

    epsilon: float
    delta: float
    s_max: float
    s_min: float
    gamma: float
    moment_bound: float

    def __post_init__(self):
        if self.epsilon <= 0:
            raise ValueError("epsilon must be positive")
        if not 0.0 < self.delta < 1.0:
            raise ValueError("delta must lie in (0,1)")
        if not (self.s_max >= self.s_min > 0):
            raise ValueError("need s_max >= s_min > 0")
        if not 0.0 < self.gamma < 1.0:
            raise ValueError("gamma must lie in (0,1)")
        if self.moment_bound <= 1.0:
            raise ValueError("moment_bound must exceed 1")


@dataclass(frozen=True)
class ICAModelSpec:
    """X = A S with independent symmetric sources normalized to E|S_i| = 1."""

    mixing_matrix: np.ndarray
    sources: tuple

    def __post_init__(self):
        a = np.atleast_2d(np.asarray(self.mixing_matrix, dtype=float))
        if a.shape[0] != a.shape[1]:
            raise ValueError("mixing matrix must be square")
        if len(self.sources) != a.shape[0]:
            raise ValueError("need one source per coordinate")
        if np.linalg.cond(a) > 1e12:
            raise ValueError("mixing matrix is numerically singular")
        object.__setattr__(self, "mixing_matrix", a)
        object.__setattr__(self, "sources", tuple(self.sources))

    @property
    def dimension(self) -> int:
        return self.mixing_matrix.shape[0]

    def sample(self, count: int, rng: np.random.Generator) -> np.ndarray:
        """(count, n) observations; source columns drawn in coordinate order."""
        s = np.empty((count, self.dimension))
        for i, src in enumerate(self.sources):
            s[:, i] = src.sample(count, rng)
        return s @ self.mixing_matrix.T


def oracle_conservative_radius(params: OracleParams, dimension: int) -> float:
    """r = eps * s_min / (2 n s_max), the YES-case inner radius."""
    return params.epsilon * params.s_min / (2.0 * dimension * params.s_max)


def oracle_sample_size(params: OracleParams, dimension: int) -> int:
    """Formula sample count for the oracle contract, at the conservative radius.

    max of (8 M n s_max^(1+g) / (r^2 delta))^(3/g) and
    (8 M n s_max^(1+g) / r)^(1/2 + 1/g) with eps replaced by r.  Grows
    astronomically for small gamma; callers may override downward and report
    both the formula value and the count actually used.
    """
    r = oracle_conservative_radius(params, dimension)
    base = 8.0 * params.moment_bound * dimension * params.s_max ** (1.0 + params.gamma)
    branch1 = (base / (r ** 2 * params.delta)) ** (3.0 / params.gamma)
    branch2 = (base / r) ** (0.5 + 1.0 / params.gamma)
    value = max(branch1, branch2)
    if not np.isfinite(value):
        raise OverflowError("formula sample size exceeds float range")
    return int(math.ceil(value))


def approximation_sample_size(epsilon: float, delta: float, dimension: int,
                              moment_bound: float, gamma: float) -> int:
    """(8 M n^2 / (eps^2 delta))^(1/2 + 3/gamma): approximation-lemma count."""
    value = (8.0 * moment_bound * dimension ** 2 / (epsilon ** 2 * delta)) ** (0.5 + 3.0 / gamma)
    if not np.isfinite(value):
        raise OverflowError("formula sample size exceeds float range")
    return int(math.ceil(value))


def innerball_sample_size(epsilon_prime: float, delta_prime: float, dimension: int,
                          moment_bound: float, gamma: float) -> int:
    """(16 M n^4 / ((eps')^2 delta'))^(1/2 + 3/gamma).

    The source statement is typeset ambiguously (delta' could multiply or
    divide); dividing matches the companion approximation bound, so delta'
    is treated as a divisor here.
    """
    value = (16.0 * moment_bound * dimension ** 4
             / (epsilon_prime ** 2 * delta_prime)) ** (0.5 + 3.0 / gamma)
    if not np.isfinite(value):
        raise OverflowError("formula sample size exceeds float range")
    return int(math.ceil(value))


def weak_membership_oracle(q, model: ICAModelSpec, params: OracleParams,
                           rng: np.random.Generator,
                           n_samples: int | None = None) -> bool:
    """Draw a fresh sample of X = AS and answer membership of q by LP.

    Contract (probabilistic, at the formula sample size): YES with
    probability >= 1-delta when q lies eps deep inside the centroid body,
    NO with probability >= 1-delta when q is eps outside.
    """
    n = n_samples if n_samples is not None else oracle_sample_size(params, model.dimension)
    body = SampledCentroidBody(model.sample(n, rng))
    return membership(body, q)


def approximation_check(model: ICAModelSpec, p, epsilon: float, delta: float,
                        rng: np.random.Generator,
                        n_samples: int | None = None,
                        gamma: float | None = None,
                        moment_bound: float | None = None) -> bool:
    """Is p within epsilon of a fresh sampled body, along the ray from 0?

    With the Minkowski functional phi of the sampled body at p: inside means
    phi <= 1; otherwise the boundary point p/phi lies at distance
    ||p||(1 - 1/phi), an upper bound for dist(p, body).  When ``n_samples``
    is not given, the approximation-lemma formula count is used (it needs
    ``gamma`` and ``moment_bound`` and is usually impractically large).
    """
    if n_samples is None:
        if gamma is None or moment_bound is None:
            raise ValueError("need gamma and moment_bound to apply the formula count")
        n_samples = approximation_sample_size(epsilon, delta, model.dimension,
                                              moment_bound, gamma)
    p = np.asarray(p, dtype=float).ravel()
    body = SampledCentroidBody(model.sample(n_samples, rng))
    phi = minkowski_functional(body, p)
    if phi <= 1.0:
        return True
    if not np.isfinite(phi):
        return bool(np.linalg.norm(p) <= epsilon)
    return bool(np.linalg.norm(p) * (1.0 - 1.0 / phi) <= epsilon)
