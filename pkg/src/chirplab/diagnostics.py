"""Matrix quality measures: coherence, operator norm, RIP constants."""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.linalg import blas

from .matrix_core import as_array

GRAM_COHERENCE_MAX_N = 4096
DEFAULT_RIP_BUDGET = 2_000_000


@dataclass(frozen=True)
class CoherenceReport:
    mu: float
    argmax_pair: tuple[int, int]
    min_col_norm: float
    max_col_norm: float
    max_offdiag_inner: float


@dataclass(frozen=True)
class RipReport:
    K: int
    delta_K: float
    method: str
    supports_examined: int
    worst_support: tuple[int, ...] = ()
    eig_min: float = float("nan")
    eig_max: float = float("nan")

    @property
    def scaled_delta(self) -> float:
        """``delta_K`` of ``c A`` for the best scalar ``c``: ``(max - min) / (max + min)``.

        Support recovery by the solvers here is invariant to a global gain on
        ``A``, so this is the constant that governs their agreement.
        """
        return (self.eig_max - self.eig_min) / (self.eig_max + self.eig_min)


@dataclass(frozen=True)
class NormEstimate:
    value: float
    converged: bool
    iterations: int
    crosscheck_error: Optional[float] = None

    def __float__(self) -> float:
        return self.value


class BudgetExceeded(ValueError):
    """Exhaustive enumeration would exceed the support budget."""


def gram(A) -> np.ndarray:
    """Full Hermitian Gram matrix ``A^* A``."""
    arr = np.ascontiguousarray(as_array(A))
    upper = blas.zherk(1.0, arr, trans=2)
    return np.triu(upper) + np.triu(upper, 1).conj().T


def _coherence_from_gram(G: np.ndarray, norms: np.ndarray):
    N = G.shape[0]
    iu = np.triu_indices(N, 1)
    raw = np.abs(G[iu])
    normed = raw / (norms[iu[0]] * norms[iu[1]])
    j = int(np.argmax(normed))
    return float(normed[j]), (int(iu[0][j]), int(iu[1][j])), float(raw.max())


def _coherence_streaming(arr: np.ndarray, norms: np.ndarray, block: int = 1024):
    N = arr.shape[1]
    best, pair, max_raw = -1.0, (0, 1), 0.0
    for s in range(0, N, block):
        left = arr[:, s:s + block]
        for t in range(s, N, block):
            blk = np.abs(left.conj().T @ arr[:, t:t + block])
            if t == s:
                blk = np.triu(blk, 1)
            max_raw = max(max_raw, float(blk.max()))
            normed = blk / np.outer(norms[s:s + block], norms[t:t + block])
            if t == s:
                normed = np.triu(normed, 1)
            i, j = np.unravel_index(int(np.argmax(normed)), normed.shape)
            if normed[i, j] > best:
                best, pair = float(normed[i, j]), (s + int(i), t + int(j))
    return best, pair, max_raw


def mutual_coherence(A) -> CoherenceReport:
    """Exact mutual coherence over all column pairs."""
    arr = as_array(A)
    if arr.shape[1] < 2:
        raise ValueError("coherence needs at least two columns")
    norms = np.linalg.norm(arr, axis=0)
    if np.any(norms == 0):
        raise ValueError("zero column: coherence undefined")
    if arr.shape[1] <= GRAM_COHERENCE_MAX_N:
        mu, pair, max_raw = _coherence_from_gram(gram(arr), norms)
    else:
        mu, pair, max_raw = _coherence_streaming(arr, norms)
    return CoherenceReport(mu=mu, argmax_pair=pair, min_col_norm=float(norms.min()),
                           max_col_norm=float(norms.max()), max_offdiag_inner=max_raw)


def operator_norm(A, tol: float = 1e-10, max_iter: int = 10_000, restarts: int = 3,
                  seed: int = 0) -> NormEstimate:
    """Largest singular value by power iteration on the smaller Gram side.

    Each restart starts from a seeded random vector and stops when the
    Rayleigh quotient changes by less than ``tol`` relatively. For
    ``min(M, N) <= 64`` the result is checked against a dense eigensolve;
    a disagreement beyond ``1e-8 * sigma_max`` returns the dense value and
    marks the estimate unconverged.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    arr = as_array(A)
    M, N = arr.shape
    op = arr if M <= N else arr.conj().T     # iterate on op @ op^*, the small side
    opH = op.conj().T.copy()
    rng = np.random.default_rng(seed)
    best, converged, total_iters = 0.0, False, 0
    for _ in range(restarts):
        v = rng.standard_normal(op.shape[0]) + 1j * rng.standard_normal(op.shape[0])
        v /= np.linalg.norm(v)
        rho_prev = -1.0
        ok = False
        for it in range(1, max_iter + 1):
            u = opH @ v
            rho = float(np.vdot(u, u).real)
            w = op @ u
            nw = np.linalg.norm(w)
            total_iters += 1
            if nw == 0.0:
                ok = True
                break
            v = w / nw
            if abs(rho - rho_prev) <= tol * max(rho, np.finfo(float).tiny):
                ok = True
                break
            rho_prev = rho
        best = max(best, rho)
        converged = converged or ok
    sigma = math.sqrt(best)
    check = None
    if min(M, N) <= 64:
        small = op @ opH
        exact = math.sqrt(max(float(np.linalg.eigvalsh(small)[-1]), 0.0))
        check = abs(exact - sigma)
        if check > 1e-8 * max(exact, np.finfo(float).tiny):
            return NormEstimate(exact, False, total_iters, check)
    return NormEstimate(sigma, converged, total_iters, check)


def _support_count(N: int, K: int) -> int:
    return math.comb(N, K)


def _supports(N: int, K: int, chunk: int = 20_000):
    it = itertools.combinations(range(N), K)
    while True:
        block = list(itertools.islice(it, chunk))
        if not block:
            return
        yield np.array(block, dtype=np.intp)


def rip_constant_bruteforce(A, K: int, budget: int = DEFAULT_RIP_BUDGET) -> RipReport:
    """Exact ``delta_K`` by eigendecomposition of every K-column Gram block.

    Supports of size exactly ``min(K, N)`` suffice: by eigenvalue interlacing
    the deviation of a principal sub-block never exceeds that of its parent.
    """
    arr = as_array(A)
    N = arr.shape[1]
    if K < 1:
        raise ValueError("K must be >= 1")
    K_eff = min(K, N)
    count = _support_count(N, K_eff)
    if count > budget:
        raise BudgetExceeded(f"C({N},{K_eff}) = {count} supports exceeds budget {budget}; "
                             "use gershgorin_rip_bound instead")
    G = gram(arr)
    eye = np.eye(K_eff)
    worst, worst_support = -1.0, ()
    lo, hi = np.inf, -np.inf
    for idx in _supports(N, K_eff):
        blocks = G[idx[:, :, None], idx[:, None, :]] - eye
        eig = np.linalg.eigvalsh(blocks)
        lo, hi = min(lo, float(eig[:, 0].min())), max(hi, float(eig[:, -1].max()))
        dev = np.max(np.abs(eig), axis=1)
        j = int(np.argmax(dev))
        if dev[j] > worst:
            worst, worst_support = float(dev[j]), tuple(int(i) for i in idx[j])
    return RipReport(K=K, delta_K=worst, method="bruteforce",
                     supports_examined=count, worst_support=worst_support,
                     eig_min=1.0 + lo, eig_max=1.0 + hi)


def gershgorin_rip_bound(A, K: int) -> RipReport:
    """Disc bound ``max|‖A(m)‖² − 1| + (K − 1) max_{i≠j} |<A(i), A(j)>|``."""
    if K < 1:
        raise ValueError("K must be >= 1")
    arr = as_array(A)
    G = gram(arr)
    centre = float(np.max(np.abs(np.real(np.diag(G)) - 1.0)))
    off = 0.0
    if G.shape[0] > 1:
        off = float(np.max(np.abs(G[np.triu_indices(G.shape[0], 1)])))
    return RipReport(K=K, delta_K=centre + (K - 1) * off, method="gershgorin",
                     supports_examined=0)


@dataclass
class EnsembleStats:
    kind: str
    trials: int
    mean_mu: float
    std_mu: float
    mean_min_col_norm: float
    std_min_col_norm: float
    mean_max_col_norm: float
    std_max_col_norm: float
    degenerate_std: bool = False
    samples: dict = field(default_factory=dict, repr=False)


def _mean_std(values) -> tuple[float, float]:
    arr = np.asarray(values, dtype=float)
    if arr.size < 2:
        return float(arr.mean()), 0.0
    return float(arr.mean()), float(arr.std(ddof=1))


def coherence_ensemble_stats(kind: str, params: dict, trials: int, master_seed: int,
                             experiment_id: str = "coherence-stats") -> EnsembleStats:
    """Mean and sample std of ``mu`` and column-norm extremes over seeded draws.

    ``params`` holds ``M`` and ``N``; multichirp also needs ``n_chirps`` and
    optionally ``p`` (default ``M + 1``) and ``model``.
    """
    from .experiments import EnsembleSpec, build_matrix
    if trials < 1:
        raise ValueError("trials must be >= 1")
    spec = EnsembleSpec(kind=kind, n_chirps=params.get("n_chirps"),
                        model=params.get("model", "bernoulli_phase"))
    mus, mins, maxs = [], [], []
    for t in range(trials):
        A = build_matrix(spec, params["M"], params["N"], master_seed, experiment_id, t,
                         p=params.get("p"))
        rep = mutual_coherence(A)
        mus.append(rep.mu)
        mins.append(rep.min_col_norm)
        maxs.append(rep.max_col_norm)
    m_mu, s_mu = _mean_std(mus)
    m_lo, s_lo = _mean_std(mins)
    m_hi, s_hi = _mean_std(maxs)
    return EnsembleStats(kind=spec.label, trials=trials, mean_mu=m_mu, std_mu=s_mu,
                         mean_min_col_norm=m_lo, std_min_col_norm=s_lo,
                         mean_max_col_norm=m_hi, std_max_col_norm=s_hi,
                         degenerate_std=trials == 1,
                         samples={"mu": mus, "min_col_norm": mins, "max_col_norm": maxs})
