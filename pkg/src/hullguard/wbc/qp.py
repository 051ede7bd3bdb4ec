"""Dense convex QP solver (Goldfarb-Idnani dual active set).

minimize   0.5 x'Hx + g'x
subject to a_i'x <= b_i   (user rows)
           lo <= x <= hi  (variable bounds)

The dual method starts from the unconstrained optimum and adds violated
constraints one at a time, so it needs no feasible starting point and detects
infeasibility as an unbounded dual step. Problems here are small (tens of
variables, tens of rows), so factorizations are recomputed per iteration
instead of updated incrementally.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import cho_factor, cho_solve

from ..errors import InfeasibleError, ParameterError, SolverError

REGULARIZATION = 1e-8


@dataclass
class QpProblem:
    """Strictly convex QP. ``rows`` are upper-bound inequalities (a, b);
    ``lo``/``hi`` are per-variable bounds, +-inf entries allowed."""

    hessian: np.ndarray
    gradient: np.ndarray
    rows: list = field(default_factory=list)
    lo: np.ndarray | None = None
    hi: np.ndarray | None = None

    def __post_init__(self):
        self.hessian = np.asarray(self.hessian, dtype=float)
        self.gradient = np.asarray(self.gradient, dtype=float).reshape(-1)
        n = self.gradient.shape[0]
        if self.hessian.shape != (n, n):
            raise ParameterError("hessian/gradient dimension mismatch")
        if not np.all(np.isfinite(self.hessian)) or not np.all(np.isfinite(self.gradient)):
            raise ParameterError("hessian and gradient must be finite")
        if not np.allclose(self.hessian, self.hessian.T, atol=1e-9):
            raise ParameterError("hessian must be symmetric")
        self.hessian = 0.5 * (self.hessian + self.hessian.T)
        self.rows = [(np.asarray(a, dtype=float).reshape(n), float(b)) for a, b in self.rows]
        for a, b in self.rows:
            if not (np.all(np.isfinite(a)) and np.isfinite(b)):
                raise ParameterError("constraint rows must be finite")
        for name in ("lo", "hi"):
            v = getattr(self, name)
            if v is not None:
                v = np.asarray(v, dtype=float).reshape(n)
                if np.any(np.isnan(v)):
                    raise ParameterError(f"{name} bound contains NaN")
                setattr(self, name, v)

    @property
    def n(self) -> int:
        return self.gradient.shape[0]

    def gi_constraints(self):
        """All constraints in >= form: C x >= d. User rows come first (their
        indices match ``rows``), then finite lo bounds, then finite hi bounds."""
        n = self.n
        C_rows, d_vals = [], []
        for a, b in self.rows:
            C_rows.append(-a)
            d_vals.append(-b)
        if self.lo is not None:
            for j in range(n):
                if np.isfinite(self.lo[j]):
                    e = np.zeros(n)
                    e[j] = 1.0
                    C_rows.append(e)
                    d_vals.append(self.lo[j])
        if self.hi is not None:
            for j in range(n):
                if np.isfinite(self.hi[j]):
                    e = np.zeros(n)
                    e[j] = -1.0
                    C_rows.append(e)
                    d_vals.append(-self.hi[j])
        if C_rows:
            return np.array(C_rows), np.array(d_vals)
        return np.zeros((0, n)), np.zeros(0)


class _Infeasible(Exception):
    def __init__(self, active: list[int]):
        self.active = active


def _gi_core(H, g, C, d, max_iter):
    """Goldfarb-Idnani for min 0.5x'Hx + g'x s.t. Cx >= d.

    Returns (x, u, active). Raises _Infeasible carrying the active set plus
    the constraint that could not be added.
    """
    fac = cho_factor(H)
    x = -cho_solve(fac, g)
    m = C.shape[0]
    active: list[int] = []
    u = np.zeros(0)
    feas_tol = 1e-10
    # Rows whose violation is below solver tolerance but which admit no step
    # direction (degenerate: normal dependent on the active set). They are
    # treated as satisfied; any primal step invalidates that and re-opens them.
    skipped: set[int] = set()
    iters = 0
    while True:
        iters += 1
        if iters > max_iter:
            raise SolverError("QP iteration limit exceeded")
        s = C @ x - d if m else np.zeros(0)
        worst = None
        for i in range(m):
            if i in active or i in skipped:
                continue
            if s[i] < -feas_tol * (1.0 + abs(d[i])):
                if worst is None or s[i] < s[worst]:
                    worst = i
        if worst is None:
            return x, u, active
        p = worst
        n_p = C[p]
        u_plus = np.append(u, 0.0)
        active_before = list(active)
        u_before = u.copy()
        z_raw = cho_solve(fac, n_p)
        # curvature of n_p in the H^-1 metric; the reduced curvature zTn below
        # is compared against it to decide linear dependence on the active set
        curvature_raw = float(n_p @ z_raw)
        while True:
            iters += 1
            if iters > max_iter:
                raise SolverError("QP iteration limit exceeded")
            if active:
                N = C[active].T
                HinvN = cho_solve(fac, N)
                M_mat = N.T @ HinvN
                rhs = N.T @ z_raw
                try:
                    r = np.linalg.solve(M_mat, rhs)
                except np.linalg.LinAlgError:
                    raise SolverError("active-set subproblem became singular") from None
                z = z_raw - HinvN @ r
            else:
                r = np.zeros(0)
                z = z_raw
            t1 = np.inf
            k_drop = -1
            for j in range(len(active)):
                if r[j] > 1e-12:
                    step = u_plus[j] / r[j]
                    if step < t1 - 1e-15:
                        t1 = step
                        k_drop = j
            zTn = float(z @ n_p)
            s_p = float(n_p @ x - d[p])
            # n_p is treated as dependent on the active set unless its reduced
            # curvature keeps a healthy fraction of the unreduced one
            t2 = -s_p / zTn if zTn > 1e-10 * curvature_raw and zTn > 0.0 else np.inf
            t = min(t1, t2)
            if not np.isfinite(t):
                if s_p >= -1e-9 * (1.0 + abs(d[p])):
                    # No direction can reduce this violation, but it is already
                    # below working precision: park the row instead of calling
                    # the whole problem infeasible. Roll back the dual point.
                    active[:] = active_before
                    u = u_before
                    skipped.add(p)
                    break
                raise _Infeasible(active + [p])
            if not np.isfinite(t2):
                # dual-only step: constraint p stays violated, drop blocker
                u_plus[: len(active)] -= t * r
                u_plus[-1] += t
                active.pop(k_drop)
                u_plus = np.delete(u_plus, k_drop)
                continue
            x = x + t * z
            skipped.clear()
            u_plus[: len(active)] -= t * r
            u_plus[-1] += t
            if t2 <= t1:
                active.append(p)
                u = u_plus
                break
            active.pop(k_drop)
            u_plus = np.delete(u_plus, k_drop)


def _is_feasible_subset(H, g, C, d, idxs, max_iter) -> bool:
    try:
        _gi_core(H, g, C[idxs], d[idxs], max_iter)
        return True
    except _Infeasible:
        return False
    except SolverError:
        return True  # numerical trouble is not proof of infeasibility


def kkt_residual(problem: QpProblem, x: np.ndarray, u_full: np.ndarray,
                 C: np.ndarray, d: np.ndarray) -> float:
    grad = problem.hessian @ x + problem.gradient
    if C.shape[0]:
        grad = grad - C.T @ u_full
        primal = float(np.max(np.maximum(d - C @ x, 0.0)))
        comp = float(np.max(np.abs(u_full * (C @ x - d))))
    else:
        primal = comp = 0.0
    return max(float(np.max(np.abs(grad))), primal, comp)


def solve_qp(problem: QpProblem):
    """Solve the QP. Returns (x, kkt_residual, active_set).

    active_set indices follow ``gi_constraints`` ordering: user rows first,
    then finite lo bounds, then finite hi bounds. Deterministic for fixed
    input. Raises InfeasibleError with an irreducible infeasible row subset.
    """
    C, d = problem.gi_constraints()
    max_iter = 50 * (C.shape[0] + problem.n) + 100
    try:
        x, u, active = _gi_core(problem.hessian, problem.gradient, C, d, max_iter)
    except _Infeasible as bad:
        subset = list(bad.active)
        for i in list(subset):
            trial = [j for j in subset if j != i]
            if not _is_feasible_subset(problem.hessian, problem.gradient, C, d, trial, max_iter):
                subset = trial
        raise InfeasibleError(tuple(sorted(subset))) from None
    u_full = np.zeros(C.shape[0])
    u_full[active] = u
    res = kkt_residual(problem, x, u_full, C, d)
    return x, res, tuple(sorted(active))
