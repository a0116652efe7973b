"""Dense bounded-variable simplex for equality-constrained linear programs.

Problems have the form

    maximize    c . x
    subject to  A x = b,   l <= x <= u   (entries of l, u may be +-inf)

which covers the membership feasibility system and the Minkowski-functional
program of the centroid-body oracle (few equality rows, up to ~1e5 box-bounded
variables).  The solver is a two-phase primal simplex on the bounded-variable
form: nonbasic variables rest at a finite bound (or at zero when free), the
basis is refactorized every iteration (row counts are tiny, so dense solves
are cheaper than maintaining an inverse), and entering variables are priced
with Dantzig's rule, falling back to Bland's rule after a run of degenerate
pivots so cycling cannot occur.  All tie-breaks are lowest-index, which makes
the solve deterministic for a fixed problem.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

FEAS_TOL = 1e-9
OPT_TOL = 1e-9
_PIVOT_TOL = 1e-11
_DEGEN_STREAK = 100  # degenerate pivots before switching to Bland's rule


class LPError(Exception):
    """Construction or solver failure (dimension mismatch, lost basis, ...)."""


class LPStatus(enum.Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"


@dataclass(frozen=True)
class BoundedLP:
    """Equality-constrained LP with box bounds; objective is maximized.

    ``eq_matrix`` is (n_constraints, n_vars); ``lower``/``upper``/``objective``
    have length n_vars.  Bounds may be +-inf.  Invalid shapes or crossed
    bounds raise ``LPError`` at construction.
    """

    eq_matrix: np.ndarray
    eq_rhs: np.ndarray
    lower: np.ndarray
    upper: np.ndarray
    objective: np.ndarray

    def __post_init__(self):
        a = np.atleast_2d(np.asarray(self.eq_matrix, dtype=float))
        b = np.asarray(self.eq_rhs, dtype=float).ravel()
        lo = np.asarray(self.lower, dtype=float).ravel()
        hi = np.asarray(self.upper, dtype=float).ravel()
        c = np.asarray(self.objective, dtype=float).ravel()
        if a.size == 0:
            a = a.reshape(len(b), len(c) if len(c) else len(lo))
        if a.shape[0] != b.shape[0]:
            raise LPError(f"eq_matrix has {a.shape[0]} rows but rhs has {b.shape[0]} entries")
        n = a.shape[1]
        for name, v in (("lower", lo), ("upper", hi), ("objective", c)):
            if v.shape[0] != n:
                raise LPError(f"{name} has length {v.shape[0]}, expected {n}")
        if np.any(lo > hi):
            bad = int(np.argmax(lo > hi))
            raise LPError(f"lower[{bad}]={lo[bad]} exceeds upper[{bad}]={hi[bad]}")
        if not (np.all(np.isfinite(a)) and np.all(np.isfinite(b)) and np.all(np.isfinite(c))):
            raise LPError("matrix, rhs and objective must be finite")
        object.__setattr__(self, "eq_matrix", a)
        object.__setattr__(self, "eq_rhs", b)
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)
        object.__setattr__(self, "objective", c)

    @property
    def n_vars(self) -> int:
        return self.eq_matrix.shape[1]

    @property
    def n_constraints(self) -> int:
        return self.eq_matrix.shape[0]


@dataclass
class LPSolution:
    status: LPStatus
    point: np.ndarray | None
    objective_value: float
    iterations: int = 0
    # populated when the clean solve lost its basis and a perturbed restart ran
    restarts: int = 0


# nonbasic variable states
_AT_LOWER, _AT_UPPER, _FREE, _BASIC = 0, 1, 2, 3


@dataclass
class _Tableau:
    """Working state shared by both simplex phases."""

    W: np.ndarray          # (m, n_total) columns incl. artificials
    lo: np.ndarray
    hi: np.ndarray
    x: np.ndarray
    state: np.ndarray      # per-column _AT_LOWER/_AT_UPPER/_FREE/_BASIC
    basis: np.ndarray      # m column indices
    sealed: np.ndarray     # bool mask, columns barred from entering
    iterations: int = 0
    bland: bool = False
    degen_streak: int = 0
    max_iterations: int = field(default=0)


def _initial_value(lo, hi):
    """Nonbasic starting value: finite bound nearest zero, or 0 when free."""
    if np.isfinite(lo) and np.isfinite(hi):
        return lo if abs(lo) <= abs(hi) else hi
    if np.isfinite(lo):
        return lo
    if np.isfinite(hi):
        return hi
    return 0.0


def _initial_state(lo, hi, value):
    if not (np.isfinite(lo) or np.isfinite(hi)):
        return _FREE
    return _AT_LOWER if value == lo else _AT_UPPER


def _price(t: _Tableau, obj: np.ndarray):
    """Reduced costs d = obj - y^T W with y solving B^T y = obj_B."""
    B = t.W[:, t.basis]
    try:
        y = np.linalg.solve(B.T, obj[t.basis])
    except np.linalg.LinAlgError as exc:
        raise _BasisLost(str(exc)) from exc
    return obj - y @ t.W, y


class _BasisLost(Exception):
    """Numerically singular basis; triggers the perturbed restart."""


def _entering_order(t: _Tableau, d: np.ndarray):
    """Eligible entering columns in selection order (Dantzig or Bland)."""
    eligible = ~t.sealed & (
        ((t.state == _AT_LOWER) & (d > OPT_TOL))
        | ((t.state == _AT_UPPER) & (d < -OPT_TOL))
        | ((t.state == _FREE) & (np.abs(d) > OPT_TOL))
    )
    idx = np.flatnonzero(eligible)
    if idx.size == 0 or t.bland:
        return idx  # Bland: ascending index
    # Dantzig with lowest-index tie-break; stable sort on ascending idx.
    # Only the 256 best can be consumed before repricing, so preselect them.
    gains = np.abs(d[idx])
    if idx.size > 256:
        keep = np.argpartition(-gains, 255)[:256]
        keep = keep[np.argsort(keep)]  # restore ascending-index order
        idx, gains = idx[keep], gains[keep]
    return idx[np.argsort(-gains, kind="stable")]


def _ratio_test(t: _Tableau, xb: np.ndarray, move: np.ndarray):
    """Smallest step before a basic variable hits a bound; ties by var index."""
    step = np.inf
    leave_row = -1
    for i in range(move.shape[0]):
        mi = move[i]
        if mi > _PIVOT_TOL:
            lim = t.lo[t.basis[i]]
        elif mi < -_PIVOT_TOL:
            lim = t.hi[t.basis[i]]
        else:
            continue
        if not np.isfinite(lim):
            continue
        r = (xb[i] - lim) / mi
        if r < step - 1e-15 or (r < step + 1e-15 and
                                (leave_row < 0 or t.basis[i] < t.basis[leave_row])):
            step, leave_row = max(r, 0.0), i
    return step, leave_row


def _simplex_phase(t: _Tableau, obj: np.ndarray) -> LPStatus:
    """Run pivots until ``obj`` is maximal; returns OPTIMAL or UNBOUNDED.

    Reduced costs depend only on the basis, so a bound flip (entering column
    reaching its own opposite bound) leaves the pricing vector valid.  Each
    pricing round therefore processes a whole batch of flips with a single
    factorization and stops at the first true basis change, which is what
    keeps phase 1 cheap when many box variables must cross to the far bound.
    """
    while True:
        d, _ = _price(t, obj)
        order = _entering_order(t, d)
        if order.size == 0:
            return LPStatus.OPTIMAL

        B = t.W[:, t.basis]
        batch = order[:256]
        try:
            w_batch = np.linalg.solve(B, t.W[:, batch])
        except np.linalg.LinAlgError as exc:
            raise _BasisLost(str(exc)) from exc

        xb = t.x[t.basis].copy()
        pivoted = False
        for pos in range(batch.shape[0]):
            j = int(batch[pos])
            sigma = 1.0 if (t.state[j] == _AT_LOWER or d[j] > 0) else -1.0
            move = sigma * w_batch[:, pos]
            step, leave_row = _ratio_test(t, xb, move)
            own_range = t.hi[j] - t.lo[j]  # inf for free or half-bounded cols
            flip = np.isfinite(own_range) and own_range < step - 1e-15
            if not flip and leave_row < 0:
                if not np.isfinite(own_range):
                    t.x[t.basis] = xb
                    return LPStatus.UNBOUNDED
                flip = True

            t.iterations += 1
            if t.iterations > t.max_iterations:
                raise _BasisLost("iteration limit exceeded")

            if flip:
                xb -= own_range * move
                if t.state[j] == _AT_LOWER:
                    t.x[j] = t.hi[j]
                    t.state[j] = _AT_UPPER
                else:
                    t.x[j] = t.lo[j]
                    t.state[j] = _AT_LOWER
                t.degen_streak = 0
                continue

            # basis change: apply, then go back to pricing
            xb -= step * move
            t.x[t.basis] = xb
            t.x[j] = t.x[j] + sigma * step
            lv = t.basis[leave_row]
            # snap the leaving variable onto the bound it reached
            if move[leave_row] > 0:
                t.x[lv] = t.lo[lv]
                t.state[lv] = _AT_LOWER
            else:
                t.x[lv] = t.hi[lv]
                t.state[lv] = _AT_UPPER
            t.basis[leave_row] = j
            t.state[j] = _BASIC
            if step <= 1e-12:
                t.degen_streak += 1
                if t.degen_streak > _DEGEN_STREAK:
                    t.bland = True
            else:
                t.degen_streak = 0
            pivoted = True
            break

        if not pivoted:
            t.x[t.basis] = xb


def _solve_once(problem: BoundedLP, rhs: np.ndarray,
                start: np.ndarray | None = None) -> LPSolution:
    A, lo, hi, c = problem.eq_matrix, problem.lower, problem.upper, problem.objective
    m, n = A.shape

    if start is None:
        x = np.array([_initial_value(lo[j], hi[j]) for j in range(n)], dtype=float)
    else:
        # snap the hint onto the nearest bound (phase 1 accepts any such start)
        s = np.asarray(start, dtype=float)
        if s.shape != (n,):
            raise LPError(f"start hint has shape {s.shape}, expected ({n},)")
        x = np.array([
            _initial_value(lo[j], hi[j]) if not np.isfinite(s[j])
            else (s[j] if not (np.isfinite(lo[j]) or np.isfinite(hi[j]))
                  else (lo[j] if (not np.isfinite(hi[j])
                                  or (np.isfinite(lo[j])
                                      and abs(s[j] - lo[j]) <= abs(s[j] - hi[j])))
                        else hi[j]))
            for j in range(n)
        ], dtype=float)
    state = np.array([_initial_state(lo[j], hi[j], x[j]) for j in range(n)], dtype=np.int8)

    # phase 1: artificial columns diag(+-1) so artificial values are |residual|
    resid = rhs - A @ x
    signs = np.where(resid >= 0, 1.0, -1.0)
    W = np.hstack([A, np.diag(signs)]) if m else A.copy()
    t = _Tableau(
        W=W,
        lo=np.concatenate([lo, np.zeros(m)]),
        hi=np.concatenate([hi, np.full(m, np.inf)]),
        x=np.concatenate([x, np.abs(resid)]),
        state=np.concatenate([state, np.full(m, _BASIC, dtype=np.int8)]),
        basis=np.arange(n, n + m),
        sealed=np.zeros(n + m, dtype=bool),
        max_iterations=50 * (n + m) + 2000,
    )
    t.sealed[n:] = True            # artificials never re-enter
    t.sealed[:n][lo == hi] = True  # pinned variables cannot pivot or flip

    if m:
        phase1 = np.concatenate([np.zeros(n), -np.ones(m)])
        status = _simplex_phase(t, phase1)
        if status is not LPStatus.OPTIMAL:  # bounded above by 0, so numerics
            raise _BasisLost("phase 1 terminated unbounded")
        infeas = float(t.x[n:].sum())
        if infeas > FEAS_TOL * (1.0 + np.abs(rhs).max(initial=0.0)):
            return LPSolution(LPStatus.INFEASIBLE, None, -np.inf, t.iterations)
        _expel_artificials(t, n)

    obj = np.concatenate([c, np.zeros(m)])
    status = _simplex_phase(t, obj)
    point = t.x[:n].copy()
    if status is LPStatus.UNBOUNDED:
        return LPSolution(LPStatus.UNBOUNDED, point, np.inf, t.iterations)
    return LPSolution(LPStatus.OPTIMAL, point, float(c @ point), t.iterations)


def _expel_artificials(t: _Tableau, n: int):
    """Pin artificials to zero; pivot basic ones out where a row allows it."""
    t.lo[n:] = 0.0
    t.hi[n:] = 0.0
    for row in range(t.basis.shape[0]):
        col = t.basis[row]
        if col < n:
            continue
        B = t.W[:, t.basis]
        try:
            alpha = np.linalg.solve(B, t.W[:, :n])[row]
        except np.linalg.LinAlgError as exc:
            raise _BasisLost(str(exc)) from exc
        candidates = np.flatnonzero((np.abs(alpha) > 1e-7) & (t.state[:n] != _BASIC))
        if candidates.size == 0:
            continue  # redundant row: artificial stays basic, pinned at 0
        enter = int(candidates[0])
        t.basis[row] = enter
        t.state[enter] = _BASIC
        t.state[col] = _AT_LOWER
        t.x[col] = 0.0


def _verify(problem: BoundedLP, sol: LPSolution) -> bool:
    if sol.point is None:
        return True
    x = sol.point
    scale = 1.0 + np.abs(problem.eq_rhs).max(initial=0.0)
    if problem.n_constraints:
        resid = np.abs(problem.eq_matrix @ x - problem.eq_rhs).max()
        if resid > FEAS_TOL * scale:
            return False
    lo_viol = np.max(problem.lower - x, initial=0.0)
    hi_viol = np.max(x - problem.upper, initial=0.0)
    return max(lo_viol, hi_viol) <= FEAS_TOL


def solve(problem: BoundedLP, start: np.ndarray | None = None) -> LPSolution:
    """Solve the LP; deterministic, with a verified feasible/optimal result.

    ``start`` optionally hints per-variable initial values (snapped to the
    nearest bound) for phase 1; it affects only the pivot path, never the
    answer.  A numerically lost basis triggers one deterministic perturbed
    restart (tiny rhs shift, re-verified against the original tolerances); a
    result that fails verification is never returned silently.
    """
    try:
        sol = _solve_once(problem, problem.eq_rhs, start)
        if _verify(problem, sol):
            return sol
    except _BasisLost:
        pass

    # deterministic perturbation, independent of any RNG state
    m = problem.n_constraints
    shift = 1e-11 * (1.0 + np.abs(problem.eq_rhs)) * np.sin(np.arange(1, m + 1))
    try:
        sol = _solve_once(problem, problem.eq_rhs + shift, start)
    except _BasisLost as exc:
        raise LPError(f"simplex lost its basis twice: {exc}") from exc
    sol.restarts = 1
    if not _verify(problem, sol):
        raise LPError("perturbed restart produced an unverifiable solution")
    return sol


def feasible(problem: BoundedLP, start: np.ndarray | None = None) -> bool:
    """True iff the equality system admits a point inside the box."""
    zero_obj = BoundedLP(problem.eq_matrix, problem.eq_rhs, problem.lower,
                         problem.upper, np.zeros(problem.n_vars))
    return solve(zero_obj, start).status is LPStatus.OPTIMAL
