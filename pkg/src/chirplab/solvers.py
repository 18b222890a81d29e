"""Sparse recovery: LASSO, BPDN, OMP, support least squares and the l0 oracle.

Everything works on complex data. Matrices may be passed as
:class:`~chirplab.matrix_core.SensingMatrix` or plain arrays.
"""
from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

import numpy as np
import scipy.linalg

from .diagnostics import BudgetExceeded, operator_norm
from .matrix_core import as_array

log = logging.getLogger(__name__)

FIXED_LIPSCHITZ = "fixed_lipschitz"
LIPSCHITZ_INFLATION = 1.001
MAX_LAMBDA_DROP = 1e-2
BACKTRACKING = "backtracking"


@dataclass(frozen=True)
class SolverOptions:
    max_iterations: int = 20_000
    convergence_tol: float = 1e-10
    step_rule: str = FIXED_LIPSCHITZ
    lam: Optional[float] = None
    eta: Optional[float] = None
    support_threshold: Optional[float] = None
    # active-set refinement cadence in iterations; 0 disables it
    refine_every: int = 25
    max_outer: int = 30
    record_history: bool = False

    def __post_init__(self):
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        if not self.convergence_tol > 0:
            raise ValueError("convergence_tol must be positive")
        if self.step_rule not in (FIXED_LIPSCHITZ, BACKTRACKING):
            raise ValueError(f"unknown step rule {self.step_rule!r}")
        if self.support_threshold is not None and self.support_threshold < 0:
            raise ValueError("support_threshold must be >= 0")


@dataclass
class RecoveryResult:
    estimate: np.ndarray
    support_estimate: np.ndarray
    iterations: int
    final_objective: float
    residual_norm: float
    kkt_gap: Optional[float] = None
    converged: bool = True
    lam: Optional[float] = None
    flags: dict = field(default_factory=dict)
    history: list = field(default_factory=list, repr=False)


@dataclass(frozen=True)
class SupportFit:
    amplitudes: np.ndarray
    residual: np.ndarray
    rank_deficient: bool = False

    @property
    def residual_norm(self) -> float:
        return float(np.linalg.norm(self.residual))


@dataclass(frozen=True)
class RecoveryFlags:
    support_exact: bool
    relative_mse: float
    success_1pct: bool


def complex_soft_threshold(z, tau: float):
    """Proximal map of ``tau |.|`` on complex scalars or arrays: ``z max(1 - tau/|z|, 0)``."""
    if tau < 0:
        raise ValueError("tau must be >= 0")
    z = np.asarray(z)
    mag = np.abs(z)
    keep = mag > tau
    # dividing only where |z| > tau keeps tau/|z| <= 1
    shrink = np.where(keep, 1.0 - tau / np.where(keep, mag, 1.0), 0.0)
    out = z * shrink
    return out if out.ndim else out[()]


def default_support_threshold(x: np.ndarray) -> float:
    peak = float(np.max(np.abs(x))) if x.size else 0.0
    return max(1e-8, 1e-3 * peak)


def support_of(x: np.ndarray, threshold: Optional[float] = None) -> np.ndarray:
    thr = default_support_threshold(x) if threshold is None else threshold
    return np.flatnonzero(np.abs(x) > thr)


def _prepare(A, y):
    arr = as_array(A)
    y = np.asarray(y, dtype=np.complex128)
    if y.shape != (arr.shape[0],):
        raise ValueError(f"y must have length {arr.shape[0]}, got shape {y.shape}")
    if not (np.all(np.isfinite(arr)) and np.all(np.isfinite(y))):
        raise ValueError("non-finite input")
    return arr, y


def _objective(lam, x, r):
    return lam * float(np.sum(np.abs(x))) + 0.5 * float(np.vdot(r, r).real)


def _refine_on_support(arr, AH, y, lam, x, S):
    """Solve the LASSO optimality conditions on support ``S`` with free phases.

    Iterates ``x_S = G^{-1}(A_S^* y - lam u)``, ``u = x_S/|x_S|`` to a fixed
    point and returns the full vector only if it is certified optimal
    (off-support correlations at most ``lam``).
    """
    As = arr[:, S]
    G = As.conj().T @ As
    try:
        cho = scipy.linalg.cho_factor(G, check_finite=False)
    except np.linalg.LinAlgError:
        return None
    b = As.conj().T @ y
    u = x[S] / np.abs(x[S])
    prev = math.inf
    for _ in range(200):
        xs = scipy.linalg.cho_solve(cho, b - lam * u, check_finite=False)
        mag = np.abs(xs)
        if np.any(mag == 0) or not np.all(np.isfinite(xs)):
            return None
        u_new = xs / mag
        change = float(np.max(np.abs(u_new - u)))
        u = u_new
        if change <= 1e-14:
            break
        # give up on a slowly contracting or expanding map; FISTA carries on
        if change > 0.5 * prev:
            return None
        prev = change
    else:
        return None
    xs = scipy.linalg.cho_solve(cho, b - lam * u, check_finite=False)
    if np.max(np.abs(xs / np.abs(xs) - u)) > 1e-12:
        return None
    xc = np.zeros_like(x)
    xc[S] = xs
    r = y - As @ xs
    g = AH @ r
    off = np.abs(g)
    off[S] = 0.0
    if off.max(initial=0.0) > lam * (1.0 + 1e-9):
        return None
    return xc


def lasso(A, y, opts: SolverOptions, x0: Optional[np.ndarray] = None,
          lipschitz: Optional[float] = None) -> RecoveryResult:
    """Minimise ``lam ‖x‖₁ + ½‖Ax − y‖₂²`` by accelerated proximal gradient.

    Momentum is reset whenever a step would raise the objective, so the
    accepted iterates are monotone. Under the fixed step rule the step is
    ``1/L`` with ``L = ‖A‖op²``; if even a plain proximal step fails to
    descend, ``L`` is doubled. Every ``refine_every`` iterations with an
    unchanged support the optimality conditions are solved on that support
    directly; the candidate is kept only when it passes the KKT check.
    """
    lam = opts.lam
    if lam is None or not lam > 0:
        raise ValueError("lasso needs lam > 0; use least_squares_on_support for lam = 0")
    arr, y = _prepare(A, y)
    M, N = arr.shape
    AH = np.ascontiguousarray(arr.conj().T)
    Aty = AH @ y
    history = []

    def finish(x, Ax, iters, converged, flags=None):
        r = y - Ax
        g = AH @ r
        obj = _objective(lam, x, r)
        thr = opts.support_threshold
        return RecoveryResult(estimate=x, support_estimate=support_of(x, thr),
                              iterations=iters, final_objective=obj,
                              residual_norm=float(np.linalg.norm(r)),
                              kkt_gap=float(np.max(np.abs(g), initial=0.0)) - lam,
                              converged=converged, lam=lam, flags=flags or {},
                              history=history)

    x = np.zeros(N, dtype=np.complex128) if x0 is None else np.array(x0, dtype=np.complex128)
    if not np.any(x) and np.max(np.abs(Aty), initial=0.0) <= lam:
        if opts.record_history:
            history.append(_objective(lam, x, y))
        return finish(x, np.zeros(M, dtype=np.complex128), 0, True)

    if opts.step_rule == FIXED_LIPSCHITZ:
        L = lipschitz if lipschitz is not None else lipschitz_constant(arr)
    else:
        L = lipschitz if lipschitz is not None else max(
            float(np.max(np.sum(np.abs(arr) ** 2, axis=0))), 1e-300)
    if L <= 0:
        return finish(np.zeros(N, dtype=np.complex128), np.zeros(M, dtype=np.complex128), 0, True)

    Ax = arr @ x
    Fx = _objective(lam, x, y - Ax)
    if opts.record_history:
        history.append(Fx)
    yk, Ayk, t = x, Ax, 1.0
    at_restart = True
    last_support = None
    failed_support = np.empty(0, dtype=np.intp)
    flags = {"lipschitz_doublings": 0, "restarts": 0}
    converged = False
    it = 0
    tol = opts.convergence_tol
    while it < opts.max_iterations:
        it += 1
        ryk = Ayk - y
        grad = AH @ ryk
        while True:
            z = complex_soft_threshold(yk - grad / L, lam / L)
            Az = arr @ z
            if opts.step_rule != BACKTRACKING:
                break
            dz = z - yk
            fz = 0.5 * float(np.vdot(Az - y, Az - y).real)
            model = (0.5 * float(np.vdot(ryk, ryk).real) + float(np.vdot(grad, dz).real)
                     + 0.5 * L * float(np.vdot(dz, dz).real))
            if fz <= model * (1 + 1e-12) + 1e-300:
                break
            L *= 2.0
        Fz = _objective(lam, z, y - Az)
        if Fz > Fx:
            if at_restart and Fz <= Fx + 1e-14 * max(abs(Fx), 1e-300):
                # rounding-level stagnation: no descent step is left to take
                converged = True
                break
            if at_restart:
                L *= 2.0
                flags["lipschitz_doublings"] += 1
            else:
                flags["restarts"] += 1
            yk, Ayk, t, at_restart = x, Ax, 1.0, True
            continue
        step = float(np.linalg.norm(z - yk))
        t_new = 0.5 * (1.0 + math.sqrt(1.0 + 4.0 * t * t))
        beta = (t - 1.0) / t_new
        x_old, Ax_old = x, Ax
        x, Ax, Fx, t = z, Az, Fz, t_new
        yk = x + beta * (x - x_old)
        Ayk = Ax + beta * (Ax - Ax_old)
        at_restart = False
        if opts.record_history:
            history.append(Fx)
        if step <= tol * max(float(np.linalg.norm(x)), 1e-300):
            converged = True
            break
        if opts.refine_every and it % opts.refine_every == 0:
            S = np.flatnonzero(x)
            stable = last_support is not None and np.array_equal(S, last_support)
            if stable and 0 < S.size <= M and not np.array_equal(S, failed_support):
                xc = _refine_on_support(arr, AH, y, lam, x, S)
                if xc is None:
                    failed_support = S
                else:
                    Axc = arr @ xc
                    Fc = _objective(lam, xc, y - Axc)
                    if Fc <= Fx + 1e-12 * max(abs(Fx), 1.0):
                        x, Ax, Fx = xc, Axc, min(Fc, Fx)
                        if opts.record_history:
                            history.append(Fx)
                        flags["refined"] = True
                        converged = True
                        break
            last_support = S
    if not converged:
        log.debug("lasso hit the iteration cap (%d)", opts.max_iterations)
    return finish(x, Ax, it, converged, flags)


def lipschitz_constant(A) -> float:
    """``‖A‖op²`` from a single power-iteration run, inflated slightly.

    The inflation absorbs the residual error of the estimate; any remaining
    underestimate is caught by the doubling fallback in :func:`lasso`.
    """
    return operator_norm(A, tol=1e-8, restarts=1).value ** 2 * LIPSCHITZ_INFLATION


def kkt_violation(A, y, x: np.ndarray, lam: float) -> tuple[float, float]:
    """Return ``(‖A^*r‖∞/lam − 1, max_j |A_j^*r − lam x_j/|x_j|| / lam)``."""
    arr, y = _prepare(A, y)
    g = arr.conj().T @ (y - arr @ x)
    sup = np.flatnonzero(x)
    align = 0.0
    if sup.size:
        align = float(np.max(np.abs(g[sup] - lam * x[sup] / np.abs(x[sup])))) / lam
    return float(np.max(np.abs(g))) / lam - 1.0, align


def _pareto_model_lambda(arr, y, x, target):
    """Predict lam with ``‖r(lam)‖ = target`` assuming the support and phases of ``x`` hold.

    On a fixed support with fixed phases the residual is ``r_LS + lam v`` with
    ``v = A_S G^{-1} u`` orthogonal to ``r_LS``.
    """
    S = np.flatnonzero(x)
    if S.size == 0 or S.size > arr.shape[0]:
        return None
    As = arr[:, S]
    G = As.conj().T @ As
    try:
        cho = scipy.linalg.cho_factor(G)
    except np.linalg.LinAlgError:
        return None
    u = x[S] / np.abs(x[S])
    v = As @ scipy.linalg.cho_solve(cho, u)
    r_ls = y - As @ scipy.linalg.cho_solve(cho, As.conj().T @ y)
    a = float(np.vdot(v, v).real)
    c0 = float(np.vdot(r_ls, r_ls).real)
    if a <= 0 or target * target <= c0:
        return None
    return math.sqrt((target * target - c0) / a)


def bpdn(A, y, eta: float, opts: SolverOptions = SolverOptions()) -> RecoveryResult:
    """Approximately solve ``min ‖x‖₁ s.t. ‖Ax − y‖₂ <= eta``.

    Root-finding on the Pareto curve: ``phi(lam) = ‖A x(lam) − y‖ − eta``
    with ``x(lam)`` the LASSO solution. ``lam`` stays bracketed in
    ``(0, ‖A^*y‖∞]``; each step takes the fixed-support residual model
    prediction if it falls inside the bracket, else a secant (Illinois)
    step, else a geometric bisection. A downward step never shrinks ``lam``
    by more than ``MAX_LAMBDA_DROP`` so warm starts stay near the path. Stops when
    ``|phi| <= max(1e-6, 1e-3 eta)`` or after ``opts.max_outer`` solves.
    """
    if eta < 0:
        raise ValueError("eta must be >= 0")
    arr, y = _prepare(A, y)
    M, N = arr.shape
    ynorm = float(np.linalg.norm(y))
    ftol = max(1e-6, 1e-3 * eta)
    zero = np.zeros(N, dtype=np.complex128)
    if eta >= ynorm:
        return RecoveryResult(zero, np.array([], dtype=np.int64), 0, 0.0, ynorm,
                              converged=True, lam=float(np.max(np.abs(arr.conj().T @ y))),
                              flags={"outer_iterations": 0, "zero_feasible": True})

    L = lipschitz_constant(arr)
    lam_hi = float(np.max(np.abs(arr.conj().T @ y)))
    phi_hi = ynorm - eta
    lam_lo, phi_lo = 0.0, None
    target = eta if eta > 0 else 0.5 * ftol
    lam = 0.5 * lam_hi
    x = zero
    best = None
    side_count = 0           # Illinois bookkeeping: repeated retention of one end
    last_side = 0
    for outer in range(1, opts.max_outer + 1):
        res = lasso(arr, y, replace(opts, lam=lam), x0=x, lipschitz=L)
        x = res.estimate
        phi = res.residual_norm - eta
        if best is None or abs(phi) < abs(best[1]):
            best = (res, phi)
        if abs(phi) <= ftol:
            res.flags.update(outer_iterations=outer, least_squares_limit=False)
            res.converged = bool(res.converged)
            return res
        if phi > 0:
            lam_hi, phi_hi = lam, phi
            side = 1
        else:
            lam_lo, phi_lo = lam, phi
            side = -1
        side_count = side_count + 1 if side == last_side else 1
        last_side = side
        if lam_hi - lam_lo <= 1e-15 * lam_hi:
            break
        cand = _pareto_model_lambda(arr, y, x, target)
        if cand is None or not lam_lo < cand < lam_hi:
            if phi_lo is not None:
                f_hi, f_lo = phi_hi, phi_lo
                # Illinois: halve the stale end's value after two retentions
                if side_count >= 2:
                    if side == 1:
                        f_lo = 0.5 * f_lo
                    else:
                        f_hi = 0.5 * f_hi
                cand = lam_lo + (lam_hi - lam_lo) * (-f_lo) / (f_hi - f_lo)
                if not lam_lo < cand < lam_hi:
                    cand = math.sqrt(lam_lo * lam_hi) if lam_lo > 0 else 0.5 * lam_hi
            else:
                cand = 0.1 * lam
        # continuation: large downward jumps leave FISTA far from the path at tiny lam
        lam = max(cand, MAX_LAMBDA_DROP * lam)
    res, phi = best
    res.converged = False
    # distinguish an unreachable budget from a slow outer loop
    ls_coef, *_ = np.linalg.lstsq(arr, y, rcond=None)
    r_min = float(np.linalg.norm(y - arr @ ls_coef))
    if eta < r_min - ftol:
        return RecoveryResult(ls_coef, support_of(ls_coef, opts.support_threshold), 0,
                              float(np.sum(np.abs(ls_coef))), r_min, converged=False,
                              lam=0.0, flags={"least_squares_limit": True,
                                              "outer_iterations": outer})
    res.flags.update(outer_iterations=outer, least_squares_limit=False)
    return res


def least_squares_on_support(A, y, support: Sequence[int]) -> SupportFit:
    """Least squares restricted to ``support``; min-norm solution if rank deficient."""
    arr, y = _prepare(A, y)
    S = np.asarray(support, dtype=np.int64)
    if S.size == 0:
        return SupportFit(np.zeros(0, dtype=np.complex128), y.copy(), False)
    As = arr[:, S]
    coef, _, rank, _ = np.linalg.lstsq(As, y, rcond=None)
    return SupportFit(coef, y - As @ coef, bool(rank < S.size))


def debias(A, y, result: RecoveryResult) -> RecoveryResult:
    """Refit amplitudes on the estimated support by least squares."""
    arr, y = _prepare(A, y)
    fit = least_squares_on_support(arr, y, result.support_estimate)
    x = np.zeros(arr.shape[1], dtype=np.complex128)
    x[result.support_estimate] = fit.amplitudes
    flags = dict(result.flags, debiased=True, rank_deficient=fit.rank_deficient)
    return replace(result, estimate=x, residual_norm=fit.residual_norm, flags=flags)


def omp(A, y, K: Optional[int] = None, residual_tol: Optional[float] = None) -> RecoveryResult:
    """Orthogonal matching pursuit with normalised correlation selection."""
    if K is None and residual_tol is None:
        raise ValueError("omp needs a stopping rule: K or residual_tol")
    if K is not None and K < 0:
        raise ValueError("K must be >= 0")
    arr, y = _prepare(A, y)
    M, N = arr.shape
    norms = np.linalg.norm(arr, axis=0)
    safe = np.where(norms > 0, norms, np.inf)
    AH = arr.conj().T
    limit = min(M, N) if K is None else min(K, M, N)
    S: list[int] = []
    coef = np.zeros(0, dtype=np.complex128)
    r = y.copy()
    flags = {"singular": False}
    while len(S) < limit:
        if residual_tol is not None and np.linalg.norm(r) <= residual_tol:
            break
        corr = np.abs(AH @ r) / safe
        corr[S] = -1.0
        j = int(np.argmax(corr))
        trial = S + [j]
        As = arr[:, trial]
        c, _, rank, sv = np.linalg.lstsq(As, y, rcond=None)
        if rank < len(trial) or sv[-1] <= 1e-12 * sv[0]:
            flags["singular"] = True
            break
        S, coef = trial, c
        r = y - As @ coef
    x = np.zeros(N, dtype=np.complex128)
    x[S] = coef
    return RecoveryResult(estimate=x, support_estimate=np.array(sorted(S), dtype=np.int64),
                          iterations=len(S), final_objective=float(np.linalg.norm(r)),
                          residual_norm=float(np.linalg.norm(r)), converged=True,
                          flags=flags)


def l0_oracle(A, y, K: int, budget: int = 2_000_000) -> RecoveryResult:
    """Exhaustive search for the size-K support with the smallest LS residual."""
    arr, y = _prepare(A, y)
    M, N = arr.shape
    if K < 0:
        raise ValueError("K must be >= 0")
    if K == 0:
        return RecoveryResult(np.zeros(N, dtype=np.complex128), np.array([], dtype=np.int64),
                              0, float(np.linalg.norm(y)), float(np.linalg.norm(y)))
    count = math.comb(N, K)
    if count > budget:
        raise BudgetExceeded(f"C({N},{K}) = {count} supports exceeds budget {budget}")
    best_res, best_S = math.inf, None
    combos = itertools.combinations(range(N), K)
    while True:
        block = np.array(list(itertools.islice(combos, 20_000)), dtype=np.intp)
        if block.size == 0:
            break
        As = np.moveaxis(arr[:, block], 0, 1)            # (B, M, K)
        coef, res = _batched_lstsq(As, y)
        j = int(np.argmin(res))
        if res[j] < best_res:
            best_res, best_S = float(res[j]), block[j]
    fit = least_squares_on_support(arr, y, best_S)
    x = np.zeros(N, dtype=np.complex128)
    x[best_S] = fit.amplitudes
    return RecoveryResult(x, np.array(best_S, dtype=np.int64), count, fit.residual_norm,
                          fit.residual_norm, flags={"supports_examined": count})


def _batched_lstsq(As: np.ndarray, y: np.ndarray):
    """Residual norms of ``min ‖A_s z − y‖`` for a stack of tall matrices."""
    AsH = np.conj(np.swapaxes(As, 1, 2))
    G = AsH @ As
    b = AsH @ y
    try:
        coef = np.linalg.solve(G, b[..., None])[..., 0]
        r = y[None, :] - np.einsum("bmk,bk->bm", As, coef)
        res = np.linalg.norm(r, axis=1)
        bad = ~np.isfinite(res)
    except np.linalg.LinAlgError:
        coef = np.zeros(b.shape, dtype=np.complex128)
        res = np.empty(As.shape[0])
        bad = np.ones(As.shape[0], dtype=bool)
    for i in np.flatnonzero(bad):
        c, *_ = np.linalg.lstsq(As[i], y, rcond=None)
        coef[i] = c
        res[i] = np.linalg.norm(y - As[i] @ c)
    return coef, res


def evaluate_recovery(x_hat, x_true, support_threshold: Optional[float] = None,
                      mse_threshold: float = 0.01) -> RecoveryFlags:
    """Relative MSE, 1% success flag and exact-support flag."""
    x_hat = np.asarray(x_hat, dtype=np.complex128)
    x_true = np.asarray(x_true, dtype=np.complex128)
    if x_hat.shape != x_true.shape:
        raise ValueError("x_hat and x_true must have equal length")
    denom = float(np.vdot(x_true, x_true).real)
    if denom == 0:
        raise ValueError("x_true is zero; relative error undefined")
    rel = float(np.vdot(x_hat - x_true, x_hat - x_true).real) / denom
    exact = np.array_equal(support_of(x_hat, support_threshold), np.flatnonzero(x_true))
    return RecoveryFlags(support_exact=bool(exact), relative_mse=rel,
                         success_1pct=rel <= mse_threshold)
