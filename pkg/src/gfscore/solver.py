"""Generalized Fisher Score: joint feature-subset selection.

The subset problem is a regularised regression onto a class-encoding
target ``H``::

    min_{p, W}  1/2 ||X^T diag(p) W - H||_F^2 + gamma/2 ||W||_F^2
    s.t.        p in {0,1}^d, sum(p) = m

Its dual in the multiplier ``V`` (n x c) is::

    f(V, p) = tr(V^T H) - 1/2 tr(V^T (X^T diag(p) X / gamma + I) V)

and the relaxed saddle problem ``max_V min_p f(V, p)`` is solved by a
cutting-plane method. Each round solves a multiple kernel learning
problem over the working constraint set by alternating a closed-form
``V`` update with a projected-gradient step on the kernel weights, then
adds the most violated indicator.

No per-feature ``n x n`` kernel is ever formed; every kernel sum is
applied through the rows of ``X``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace

import numpy as np
from scipy import linalg
from scipy.sparse.linalg import LinearOperator, cg

from .data import Dataset, center_columns, one_hot, scatter_matrices

log = logging.getLogger(__name__)

DENSE_MAX_N = 512
ENERGY_FLOOR = 1e-20  # relative to the Cauchy-Schwarz bound on s_j


class SolverError(RuntimeError):
    """Numerical failure inside the solver."""


class LinearSolverError(SolverError):
    def __init__(self, message: str, residual: float):
        super().__init__(f"{message} (relative residual {residual:.3e})")
        self.residual = residual


@dataclass(frozen=True)
class GfsConfig:
    gamma: float
    m: int
    inner_tol: float = 1e-6
    inner_max_iter: int = 100
    outer_tol: float = 1e-4
    outer_max_iter: int = 50
    linear_solver_tol: float = 1e-8
    # Armijo backtracking for the kernel-weight step
    step_init: float = 1.0
    step_shrink: float = 0.5
    armijo_c: float = 1e-4
    max_backtracks: int = 30

    def __post_init__(self):
        if not self.gamma > 0:
            raise ValueError(f"gamma must be positive, got {self.gamma}")
        if self.m < 1:
            raise ValueError(f"m must be >= 1, got {self.m}")
        for name in ("inner_tol", "outer_tol", "linear_solver_tol", "step_init"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if self.inner_max_iter < 1 or self.outer_max_iter < 1:
            raise ValueError("iteration limits must be >= 1")
        if not 0 < self.step_shrink < 1:
            raise ValueError("step_shrink must lie in (0, 1)")


@dataclass
class ConstraintSet:
    """Working set of selection indicators with simplex weights."""

    constraints: np.ndarray  # (t, d) bool
    weights: np.ndarray  # (t,)

    def __post_init__(self):
        self.constraints = np.atleast_2d(np.asarray(self.constraints, dtype=bool))
        self.weights = np.asarray(self.weights, dtype=float)
        if self.weights.shape != (self.constraints.shape[0],):
            raise ValueError("one weight per constraint required")

    @classmethod
    def uniform(cls, constraints) -> ConstraintSet:
        constraints = np.atleast_2d(np.asarray(constraints, dtype=bool))
        t = constraints.shape[0]
        return cls(constraints, np.full(t, 1.0 / t))

    def __len__(self):
        return self.constraints.shape[0]

    def __contains__(self, p) -> bool:
        return bool(np.any(np.all(self.constraints == np.asarray(p, dtype=bool), axis=1)))

    def combined(self) -> np.ndarray:
        """Weighted indicator ``sum_t lambda_t p^t``."""
        return self.weights @ self.constraints


@dataclass
class TraceEntry:
    iteration: int
    constraint: list[int]  # set bits of p^t
    theta: float
    lower: float
    upper: float
    inner_iterations: int
    inner_objective: float


@dataclass
class SolverTrace:
    entries: list[TraceEntry] = field(default_factory=list)
    termination: str = ""

    def __len__(self):
        return len(self.entries)

    @property
    def lower(self) -> np.ndarray:
        return np.array([e.lower for e in self.entries])

    @property
    def upper(self) -> np.ndarray:
        return np.array([e.upper for e in self.entries])

    @property
    def theta(self) -> np.ndarray:
        return np.array([e.theta for e in self.entries])

    def is_monotone(self, atol: float = 1e-8) -> bool:
        lo, up = self.lower, self.upper
        return bool(
            np.all(np.diff(lo) >= 0) and np.all(np.diff(up) <= 0) and np.all(lo <= up + atol)
        )


@dataclass
class MKLResult:
    V: np.ndarray
    weights: np.ndarray
    objective: float
    n_iter: int


@dataclass
class CuttingPlaneResult:
    constraint_set: ConstraintSet
    V: np.ndarray
    trace: SolverTrace
    objective: float
    duals: list[np.ndarray] = field(default_factory=list)  # V after each round

    @property
    def selected(self) -> np.ndarray:
        return selected_features(self.constraint_set)


# ---------------------------------------------------------------------------
# building blocks


def build_target_matrix(labels, n_classes: int | None = None) -> np.ndarray:
    """Class-encoding regression target ``H`` (n x c).

    ``h_ik = sqrt(n/n_k) - sqrt(n_k/n)`` when sample ``i`` is in class
    ``k``, otherwise ``-sqrt(n_k/n)``.
    """
    labels = np.asarray(labels)
    n = labels.size
    c = int(labels.max()) if n_classes is None else n_classes
    Y = one_hot(labels, c)
    n_k = Y.sum(axis=0)
    if np.any(n_k == 0):
        raise ValueError("every class must be present")
    return Y * np.sqrt(n / n_k) - np.sqrt(n_k / n)


def indicator(indices, d: int) -> np.ndarray:
    p = np.zeros(d, dtype=bool)
    p[np.asarray(indices, dtype=np.int64)] = True
    return p


def _projected(X, q, gamma):
    """Rows of ``X`` scaled so that ``Xs^T Xs = X^T diag(q) X / gamma``."""
    q = np.asarray(q, dtype=float)
    keep = q > 0
    return X[keep] * np.sqrt(q[keep] / gamma)[:, None]


def feature_energy(V, X) -> np.ndarray:
    """``s_j = ||V^T (x^j)^T||^2`` for every feature row ``x^j``."""
    XV = X @ V
    return np.einsum("ij,ij->i", XV, XV)


def dual_objective(V, p, X, H, gamma) -> float:
    """``f(V, p)`` evaluated through the selected rows of ``X``.

    ``p`` may be a 0/1 indicator or any nonnegative weighting.
    """
    XsV = _projected(X, p, 1.0) @ V
    quad = np.sum(XsV**2) / gamma + np.sum(V**2)
    return float(np.sum(V * H) - 0.5 * quad)


def solve_dual_V(constraint_set: ConstraintSet, X, H, gamma, tol: float = 1e-8) -> np.ndarray:
    """Maximiser of the weighted dual for fixed kernel weights.

    Solves ``(X^T D X / gamma + I) V = H`` with
    ``D = diag(sum_t lambda_t p^t)``. Dense Cholesky for ``n <= 512``
    (through the smaller of the two Gram matrices), conjugate gradients
    per column beyond that.
    """
    return _solve_system(_projected(X, constraint_set.combined(), gamma), H, tol)


def _solve_system(Xs, H, tol):
    n = Xs.shape[1]

    def matvec(v):
        return Xs.T @ (Xs @ v) + v

    if n <= DENSE_MAX_N:
        try:
            V = _dense_solve(Xs, H)
        except np.linalg.LinAlgError as exc:
            raise LinearSolverError(f"dense factorisation failed: {exc}", np.inf) from None
        R = H - matvec(V)
        res = _rel_residual(R, H)
        if res > tol:
            V = V + _solve_system_dense_refine(Xs, R)
            res = _rel_residual(H - matvec(V), H)
        if res > tol:
            raise LinearSolverError("dense solve missed tolerance", res)
        return V
    op = LinearOperator((n, n), matvec=matvec, dtype=float)
    V = np.empty_like(H)
    for k in range(H.shape[1]):
        v, info = cg(op, H[:, k], x0=H[:, k].copy(), rtol=tol, atol=0.0, maxiter=10 * n)
        if info != 0:
            raise LinearSolverError(
                f"conjugate gradients did not converge on column {k}",
                _rel_residual(H[:, k] - matvec(v), H[:, k]),
            )
        V[:, k] = v
    return V


def _dense_solve(Xs, H):
    s, n = Xs.shape
    if s < n:
        # Woodbury: (I + Xs^T Xs)^-1 = I - Xs^T (I + Xs Xs^T)^-1 Xs
        fac = linalg.cho_factor(np.eye(s) + Xs @ Xs.T)
        return H - Xs.T @ linalg.cho_solve(fac, Xs @ H)
    return linalg.cho_solve(linalg.cho_factor(np.eye(n) + Xs.T @ Xs), H)


def _solve_system_dense_refine(Xs, R):
    # one step of iterative refinement, always through the n x n system
    n = Xs.shape[1]
    return linalg.solve(np.eye(n) + Xs.T @ Xs, R, assume_a="pos")


def _rel_residual(R, B) -> float:
    nb = np.linalg.norm(B)
    return float(np.linalg.norm(R) / nb) if nb > 0 else float(np.linalg.norm(R))


def dual_value(p, X, H, gamma) -> float:
    """``max_V f(V, p) = 1/2 tr(H^T M_p^{-1} H)``."""
    V = _solve_system(_projected(X, p, gamma), H, 1e-8)
    return float(0.5 * np.sum(V * H))


def recover_primal_W(V, p, X, gamma) -> np.ndarray:
    """Regression weights ``W = diag(p) X V / gamma`` (d x c)."""
    p = np.asarray(p, dtype=float)
    return (p[:, None] * (X @ V)) / gamma


def lambda_gradient(constraint_set: ConstraintSet, V, X, gamma) -> np.ndarray:
    """Gradient of the weighted dual with respect to the kernel weights."""
    s = feature_energy(V, X)
    return -(constraint_set.constraints @ s) / (2.0 * gamma)


def dual_gradient_V(constraint_set: ConstraintSet, V, X, H, gamma) -> np.ndarray:
    """Gradient of the weighted dual in ``V``: ``H - (X^T D X / gamma + I) V``."""
    Xs = _projected(X, constraint_set.combined(), gamma)
    return H - Xs.T @ (Xs @ V) - V


def project_simplex(v) -> np.ndarray:
    """Euclidean projection onto ``{x >= 0, sum(x) = 1}`` (sort and threshold)."""
    v = np.asarray(v, dtype=float)
    u = np.sort(v)[::-1]
    css = np.cumsum(u) - 1.0
    ks = np.arange(1, v.size + 1)
    rho = np.flatnonzero(u - css / ks > 0)[-1]
    tau = css[rho] / (rho + 1)
    return np.maximum(v - tau, 0.0)


def most_violated(V, X, m: int) -> np.ndarray:
    """Indicator of the ``m`` largest feature energies (ties: lower index)."""
    s = feature_energy(V, X)
    if not 1 <= m <= s.size:
        raise ValueError(f"m must lie in [1, {s.size}], got {m}")
    # energies at rounding level (e.g. a constant V on centered data) are
    # exact zeros in theory; snap them so the index tie rule applies
    bound = np.einsum("ij,ij->i", X, X) * np.sum(V**2)
    s = np.where(s <= ENERGY_FLOOR * bound, 0.0, s)
    order = np.argsort(-s, kind="stable")
    return indicator(order[:m], s.size)


def compute_bounds(constraints, Vs, X, H, gamma, m: int) -> tuple[float, float]:
    """Bracket ``l <= theta* <= u`` from the indicators and duals seen so far.

    ``l = max_j min_V -f(V, p^j)`` and ``u = min_j max_p -f(V^j, p)``.
    The cutting-plane driver maintains the same quantities incrementally.
    """
    lower = max(-dual_value(p, X, H, gamma) for p in constraints)
    upper = min(-dual_objective(V, most_violated(V, X, m), X, H, gamma) for V in Vs)
    return lower, upper


def selected_features(cs: ConstraintSet) -> np.ndarray:
    """Union of the features switched on by any constraint."""
    return np.flatnonzero(np.any(cs.constraints, axis=0))


# ---------------------------------------------------------------------------
# solvers


def inner_mkl(constraint_set: ConstraintSet, X, H, cfg: GfsConfig) -> MKLResult:
    """Saddle point of the weighted dual over a fixed constraint set.

    Alternates the closed-form ``V`` with a projected-gradient step on
    the weights. The step starts at ``cfg.step_init`` on the first pass
    and at the Barzilai-Borwein length afterwards, then backtracks
    (Armijo) along the projection arc. Iteration stops once the duality
    gap ``sum_t lambda_t f(V, p^t) - min_t f(V, p^t)`` falls below
    ``cfg.inner_tol`` relative to the objective.
    """
    gamma = cfg.gamma
    P = constraint_set.constraints

    def evaluate(weights):
        trial = ConstraintSet(P, weights)
        V = solve_dual_V(trial, X, H, gamma, cfg.linear_solver_tol)
        return trial, V, dual_objective(V, trial.combined(), X, H, gamma)

    cs, V, obj = evaluate(project_simplex(constraint_set.weights))
    prev_w = prev_grad = None
    n_iter = 0
    for n_iter in range(1, cfg.inner_max_iter + 1):
        grad = lambda_gradient(cs, V, X, gamma)
        # f(V, p^t) differs from the gradient entry by a constant
        f_t = np.sum(V * H) - 0.5 * np.sum(V**2) + grad
        if obj - f_t.min() <= cfg.inner_tol * max(abs(obj), np.finfo(float).tiny):
            break
        step = cfg.step_init
        if prev_w is not None:
            dw, dg = cs.weights - prev_w, grad - prev_grad
            curv = dw @ dg
            if curv > 0:
                step = (dw @ dw) / curv
        for _ in range(cfg.max_backtracks + 1):
            new_cs, new_V, new_obj = evaluate(project_simplex(cs.weights - step * grad))
            if new_obj <= obj + cfg.armijo_c * grad @ (new_cs.weights - cs.weights):
                break
            step *= cfg.step_shrink
        else:
            log.debug("inner loop: line search failed at iteration %d", n_iter)
            break
        prev_w, prev_grad = cs.weights, grad
        cs, V, obj = new_cs, new_V, new_obj
    if not np.isfinite(obj):
        raise SolverError("non-finite inner objective")
    return MKLResult(V, cs.weights, obj, n_iter)


def cutting_plane(ds: Dataset, cfg: GfsConfig) -> CuttingPlaneResult:
    """Grow a working set of indicators until no constraint is violated.

    The data are centered first. Each round resets the kernel weights to
    uniform, solves the inner problem, records the lower and upper
    bounds on the optimal ``theta`` and looks for the most violated
    indicator. Stops on a repeated indicator, a relative violation gap
    below ``cfg.outer_tol``, or ``cfg.outer_max_iter`` rounds.
    """
    X = center_columns(ds).features
    d, n = X.shape
    if cfg.m > d:
        raise ValueError(f"m={cfg.m} exceeds the number of features {d}")
    H = build_target_matrix(ds.labels, ds.n_classes)
    gamma = cfg.gamma

    V = np.full((n, H.shape[1]), 1.0 / n)
    omega = [most_violated(V, X, cfg.m)]
    trace = SolverTrace()
    lower, upper = -np.inf, np.inf
    duals = []

    for t in range(1, cfg.outer_max_iter + 1):
        res = inner_mkl(ConstraintSet.uniform(omega), X, H, cfg)
        V = res.V
        duals.append(V)
        lower = max(lower, -dual_value(omega[-1], X, H, gamma))
        p_new = most_violated(V, X, cfg.m)
        f_new = dual_objective(V, p_new, X, H, gamma)
        if not np.isfinite(f_new):
            raise SolverError("non-finite dual objective; check the data for pathologies")
        upper = min(upper, -f_new)
        theta = max(-dual_objective(V, p, X, H, gamma) for p in omega)
        trace.entries.append(
            TraceEntry(t, np.flatnonzero(omega[-1]).tolist(), theta, lower, upper, res.n_iter, res.objective)
        )
        cs = ConstraintSet(np.array(omega), res.weights)
        if p_new in cs:
            trace.termination = "duplicate"
            break
        # violation of the new cut relative to the current theta = -objective
        gap = res.objective - f_new
        if gap <= cfg.outer_tol * max(1.0, abs(res.objective)):
            trace.termination = "gap"
            break
        if t == cfg.outer_max_iter:
            trace.termination = "max_iter"
            break
        omega.append(p_new)
    log.debug("cutting plane stopped after %d rounds (%s)", len(trace), trace.termination)
    return CuttingPlaneResult(cs, V, trace, res.objective, duals)


@dataclass
class GfsSelection:
    indices: np.ndarray
    m: int
    runs: list[CuttingPlaneResult]


def gfs_selection_path(ds: Dataset, gamma: float, ks, cfg: GfsConfig | None = None) -> dict[int, GfsSelection]:
    """Selections of every size in ``ks`` from one increasing-``m`` sweep.

    For each ``k`` the first ``m`` whose feature union reaches ``k`` is
    used; a union larger than ``k`` is truncated to the members carrying
    the most kernel weight ``sum_t lambda_t p^t`` in that run (ties by
    energy under the final ``V``, then by index).
    """
    ks = sorted({int(k) for k in ks})
    d = ds.n_features
    if not ks or ks[0] < 1 or ks[-1] > d:
        raise ValueError(f"feature counts must lie in [1, {d}]")
    base = cfg if cfg is not None else GfsConfig(gamma=gamma, m=1)
    X = center_columns(ds).features
    out: dict[int, GfsSelection] = {}
    runs: list[CuttingPlaneResult] = []
    pending = list(ks)
    for m in range(1, d + 1):
        run = cutting_plane(ds, replace(base, gamma=gamma, m=m))
        runs.append(run)
        union = run.selected
        while pending and union.size >= pending[0]:
            k = pending.pop(0)
            out[k] = GfsSelection(_truncate(union, run, X, k), m, list(runs))
        if not pending:
            break
    return out


def _truncate(union, run, X, k):
    if union.size == k:
        return union
    # energies equalise across active features at the saddle point, so the
    # aggregate kernel weight leads and energy only breaks ties
    weight = run.constraint_set.combined()[union]
    energy = feature_energy(run.V, X)[union]
    order = np.lexsort((union, -energy, -weight))
    return np.sort(union[order[:k]])


def select_k_features(ds: Dataset, gamma: float, k: int, cfg: GfsConfig | None = None) -> np.ndarray:
    """Exactly ``k`` feature indices chosen by the GFS ``m`` schedule."""
    return gfs_selection_path(ds, gamma, [k], cfg)[k].indices


# ---------------------------------------------------------------------------
# criteria for fixed indicators (reference values)


def ratio_trace_criterion(ds: Dataset, p, gamma) -> float:
    """``tr(Sb (St + gamma I)^{-1})`` on the selected feature rows."""
    sub = ds.subset_features(np.flatnonzero(np.asarray(p, dtype=bool)))
    sc = scatter_matrices(sub)
    A = sc.total + gamma * np.eye(sc.total.shape[0])
    return float(np.trace(linalg.solve(A, sc.between, assume_a="pos")))


def ridge_objective(ds: Dataset, p, gamma) -> float:
    """Minimum over ``W`` of the regularised regression objective.

    Solved in the primal (``m x m`` normal equations), independently of
    the dual machinery.
    """
    sel = np.flatnonzero(np.asarray(p, dtype=bool))
    Z = ds.features[sel]
    H = build_target_matrix(ds.labels, ds.n_classes)
    Wz = linalg.solve(Z @ Z.T + gamma * np.eye(sel.size), Z @ H, assume_a="pos")
    R = Z.T @ Wz - H
    return float(0.5 * np.sum(R**2) + 0.5 * gamma * np.sum(Wz**2))
