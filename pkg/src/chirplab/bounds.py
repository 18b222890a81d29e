"""Closed-form tail bounds and recovery conditions for the multichirp matrix.

All logarithms are natural. Probabilities are returned as
:class:`Probability` pairs holding the raw formula value and its clamp to
``[0, 1]``. The universal constants are not known numerically; they are
exposed through :class:`UniversalConstants` (default 1.0) and echoed in
every report.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field


@dataclass(frozen=True)
class UniversalConstants:
    d: float = 1.0        # Hanson-Wright constant
    alpha1: float = 1.0   # sparsity constant
    alpha3: float = 1.0   # coherence constant
    a: float = 1.0        # RIP measurement constant
    kappa: float = 1.0    # SNR threshold constant
    epsilon: float = 0.5
    epsilon1: float = 0.1

    def __post_init__(self):
        for name in ("d", "alpha1", "alpha3", "a", "kappa"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        for name in ("epsilon", "epsilon1"):
            if not 0 < getattr(self, name) < 1:
                raise ValueError(f"{name} must lie in (0, 1)")


@dataclass(frozen=True)
class Probability:
    raw: float

    @property
    def clamped(self) -> float:
        if math.isnan(self.raw):
            return math.nan
        return min(max(self.raw, 0.0), 1.0)

    def __float__(self) -> float:
        return self.clamped


def _check_chirps(N, N_c):
    if not 1 <= N_c <= N:
        raise ValueError(f"need 1 <= N_c <= N, got N_c={N_c}, N={N}")


def q_star(N: float, N_c: float) -> float:
    """Maximiser ``max(1, 2 ln(N/N_c))`` of ``(N_c/N)^(1/q) / sqrt(q)``."""
    _check_chirps(N, N_c)
    return max(1.0, 2.0 * math.log(N / N_c))


def subgaussian_norm(N: float, N_c: float) -> float:
    """Sub-Gaussian norm of the Bernoulli-scaled selection variables."""
    q = q_star(N, N_c)
    return (N_c / N) ** (1.0 / q) / math.sqrt(q)


def selection_factor(N: float, N_c: float) -> float:
    """``q* / (N_c/N)^(2/q* - 1)``, the factor shared by the Hanson-Wright exponents."""
    q = q_star(N, N_c)
    return q / (N_c / N) ** (2.0 / q - 1.0)


def epsilon_bar(N: float, N_c: float, epsilon: float) -> float:
    return epsilon * selection_factor(N, N_c)


def _safe_exp(x: float) -> float:
    try:
        return math.exp(x)
    except OverflowError:
        return math.inf


def _safe_pow(base: float, exponent: float) -> float:
    try:
        return base ** exponent
    except OverflowError:
        return math.inf


@dataclass(frozen=True)
class OpNormBounds:
    threshold: float
    tail: Probability
    alpha2: float
    expectation_bound: float
    precondition_ok: bool


def opnorm_bounds(N: int, M: int, N_c: float) -> OpNormBounds:
    """Operator-norm threshold, tail bound and expectation bound."""
    lg = math.log(N + M)
    threshold = 2.0 * math.sqrt(N * lg / M)
    alpha2 = 2.0 / (1.0 + (2.0 / 3.0) * math.sqrt(lg / N_c))
    tail = _safe_pow(N + M, -(alpha2 - 1.0))
    expectation = math.sqrt(2.0 * N * lg / M) + (lg / 3.0) * math.sqrt(N / (M * N_c))
    return OpNormBounds(threshold=threshold, tail=Probability(tail), alpha2=alpha2,
                        expectation_bound=expectation,
                        precondition_ok=N_c >= (4.0 / 9.0) * lg)


@dataclass(frozen=True)
class BernsteinBound:
    tail: Probability
    expectation_bound: float


def matrix_bernstein_tail(L: float, nu: float, d1: int, d2: int, t: float) -> BernsteinBound:
    """Matrix Bernstein tail ``(d1+d2) exp(-(t²/2)/(L t/3 + nu))`` and mean bound."""
    if not (L > 0 and nu > 0 and t > 0):
        raise ValueError("L, nu and t must be positive")
    dim = d1 + d2
    tail = dim * _safe_exp(-(t * t / 2.0) / (L * t / 3.0 + nu))
    expectation = math.sqrt(2.0 * nu * math.log(dim)) + L * math.log(dim) / 3.0
    return BernsteinBound(Probability(tail), expectation)


def column_norm_tail(N: int, M: int, N_c: float, epsilon: float, d: float) -> Probability:
    """Bound on ``P(min_m ‖A(m)‖² <= 1 - eps)``: ``4N exp(-M d epsbar²)``."""
    if not 0 < epsilon < 1:
        raise ValueError("epsilon must lie in (0, 1)")
    if not d > 0:
        raise ValueError("d must be positive")
    eb = epsilon_bar(N, N_c, epsilon)
    return Probability(4.0 * N * _safe_exp(-M * d * eb * eb))


@dataclass(frozen=True)
class CoherenceTail:
    threshold: float
    tail: Probability
    branch: str
    u1: float
    u2: float
    precondition_ok: bool


def coherence_tail(N: int, M: int, N_c: float, alpha3: float, epsilon: float,
                   d: float) -> CoherenceTail:
    """Coherence threshold and two-branch tail bound.

    ``branch`` is ``"u1"`` when ``ln N > q* alpha3 / (N_c/N)^(2/q*-1)``, else
    ``"u2"``. Both exponents are always reported.
    """
    if not (alpha3 > 0 and d > 0):
        raise ValueError("alpha3 and d must be positive")
    if not 0 < epsilon < 1:
        raise ValueError("epsilon must lie in (0, 1)")
    lnN = math.log(N)
    s = selection_factor(N, N_c) * alpha3
    u1 = d * s * s
    u2 = s * d * lnN
    branch = "u1" if lnN > s else "u2"
    u = u1 if branch == "u1" else u2
    norm_part = column_norm_tail(N, M, N_c, epsilon, d).raw
    tail = 2.0 * _safe_pow(N, -(u - 2.0)) + norm_part
    threshold = alpha3 / (1.0 - epsilon) * math.sqrt(lnN / M)
    return CoherenceTail(threshold=threshold, tail=Probability(tail), branch=branch,
                         u1=u1, u2=u2, precondition_ok=M >= lnN ** 3)


def k_max(N: int, M: int, alpha1: float, epsilon1: float) -> float:
    return (1.0 - epsilon1) * alpha1 * M / (math.log(N) * math.log(N + M))


def snr_threshold(N: int, kappa: float = 1.0) -> float:
    """Per-target SNR threshold ``128 kappa ln N`` (linear)."""
    return 128.0 * kappa * math.log(N)


def min_signal(sigma: float, N: int, epsilon: float) -> float:
    """Minimum target magnitude ``8 sigma sqrt(2 ln N) / sqrt(1 - eps)``."""
    if not 0 <= epsilon < 1:
        raise ValueError("epsilon must lie in [0, 1)")
    return 8.0 / math.sqrt(1.0 - epsilon) * sigma * math.sqrt(2.0 * math.log(N))


@dataclass
class BoundReport:
    N: int
    M: int
    N_c: float
    K: int
    sigma: float
    x_min: float
    constants: dict
    q_star: float
    subgaussian_norm: float
    epsilon_bar: float
    opnorm_threshold: float
    opnorm_tail_prob: Probability
    opnorm_expectation_bound: float
    alpha2: float
    coherence_threshold: float
    coherence_tail_prob: Probability
    coherence_branch: str
    u1: float
    u2: float
    k_max: float
    min_signal_threshold: float
    snr_r_threshold: float
    p_bar: dict
    success_probability: Probability
    condition_flags: dict
    notes: list = field(default_factory=list)

    def rows(self) -> list[tuple[str, object]]:
        """Flat ``(quantity, value)`` pairs for tabular output."""
        out = [("N", self.N), ("M", self.M), ("N_c", self.N_c), ("K", self.K),
               ("sigma", self.sigma), ("x_min", self.x_min)]
        out += [(f"const_{k}", v) for k, v in self.constants.items()]
        out += [("q_star", self.q_star), ("subgaussian_norm", self.subgaussian_norm),
                ("epsilon_bar", self.epsilon_bar),
                ("opnorm_threshold", self.opnorm_threshold),
                ("opnorm_tail_prob_raw", self.opnorm_tail_prob.raw),
                ("opnorm_tail_prob", self.opnorm_tail_prob.clamped),
                ("opnorm_expectation_bound", self.opnorm_expectation_bound),
                ("alpha2", self.alpha2),
                ("coherence_threshold", self.coherence_threshold),
                ("coherence_tail_prob_raw", self.coherence_tail_prob.raw),
                ("coherence_tail_prob", self.coherence_tail_prob.clamped),
                ("coherence_branch", self.coherence_branch),
                ("u1", self.u1), ("u2", self.u2), ("k_max", self.k_max),
                ("min_signal_threshold", self.min_signal_threshold),
                ("snr_r_threshold", self.snr_r_threshold),
                ("snr_r_threshold_db", 10.0 * math.log10(self.snr_r_threshold))]
        for k, p in self.p_bar.items():
            out += [(f"{k}_raw", p.raw), (k, p.clamped)]
        out += [("success_probability_raw", self.success_probability.raw),
                ("success_probability", self.success_probability.clamped)]
        out += [(f"condition_{k}", v) for k, v in self.condition_flags.items()]
        return out


def theorem1_report(N: int, M: int, N_c: float, K: int, sigma: float, x_min: float,
                    constants: UniversalConstants = UniversalConstants(),
                    nu: float = 0.0) -> BoundReport:
    """Evaluate every support-recovery condition and probability term.

    ``nu`` is the minimum chirp fraction in the chirp-count condition
    ``N_c >= max(4/9 ln(N+M), nu N)``.

    The ``O(N^{-2 ln 2})`` remainder in ``p_bar4`` has no stated constant and
    is omitted; this is recorded in ``notes``.
    """
    c = constants
    lnN = math.log(N)
    lg = math.log(N + M)
    qs = q_star(N, N_c)
    eb = epsilon_bar(N, N_c, c.epsilon)
    op = opnorm_bounds(N, M, N_c)
    coh = coherence_tail(N, M, N_c, c.alpha3, c.epsilon, c.d)
    norm_term = 4.0 * N * _safe_exp(-c.d * M * eb * eb)
    p1 = 2.0 * _safe_pow(N, -(coh.u1 - 2.0)) + norm_term
    p2 = op.tail.raw + norm_term
    p3 = norm_term
    p4 = 1.0 - 2.0 / N * (2.0 * math.pi * lnN + K / N)
    success = p4 * (1.0 - p1 - p2 - p3)
    kmax = k_max(N, M, c.alpha1, c.epsilon1)
    smin = min_signal(sigma, N, c.epsilon)
    flags = {
        "sparsity": K <= kmax,
        "num_measurements": M >= lnN ** 3 and lnN >= selection_factor(N, N_c) * c.alpha3,
        "num_chirps": N_c >= max((4.0 / 9.0) * lg, nu * N),
        "min_signal": x_min > smin,
    }
    notes = ["p_bar4 omits the O(N^(-2 ln 2)) remainder",
             "p_bar1 uses the u1 branch as in the composite success probability"]
    if N % M:
        notes.append("ceil(N/M) != N/M; bound exponents use the N/M approximation")
    return BoundReport(
        N=N, M=M, N_c=N_c, K=K, sigma=sigma, x_min=x_min, constants=asdict(c),
        q_star=qs, subgaussian_norm=subgaussian_norm(N, N_c), epsilon_bar=eb,
        opnorm_threshold=op.threshold, opnorm_tail_prob=op.tail,
        opnorm_expectation_bound=op.expectation_bound, alpha2=op.alpha2,
        coherence_threshold=coh.threshold, coherence_tail_prob=coh.tail,
        coherence_branch=coh.branch, u1=coh.u1, u2=coh.u2, k_max=kmax,
        min_signal_threshold=smin, snr_r_threshold=snr_threshold(N, c.kappa),
        p_bar={"p_bar1": Probability(p1), "p_bar2": Probability(p2),
               "p_bar3": Probability(p3), "p_bar4": Probability(p4)},
        success_probability=Probability(success), condition_flags=flags, notes=notes)


@dataclass(frozen=True)
class RipRequirement:
    M_required: int
    M_required_exact: float
    u3: float
    p5: Probability
    p6: Probability


def theorem2_requirement(N: int, K: int, delta: float, a: float = 1.0, N_c: float = None,
                         M: int = None, epsilon: float = 0.5, d: float = 1.0) -> RipRequirement:
    """Measurements ``ceil(a K² ln N / delta²)`` for ``delta_K <= delta + eps``.

    ``p5`` and ``p6`` need ``N_c``; ``p6`` also needs ``M`` (defaults to the
    required M). Without ``N_c`` both are NaN.
    """
    if not 0 < delta < 1:
        raise ValueError("delta must lie in (0, 1)")
    if not a > 0:
        raise ValueError("a must be positive")
    exact = a * K * K * math.log(N) / (delta * delta)
    m_req = math.ceil(exact)
    if N_c is None:
        nan = Probability(math.nan)
        return RipRequirement(m_req, exact, math.nan, nan, nan)
    s = selection_factor(N, N_c)
    u3 = a * s * s
    p5 = _safe_pow(N, -(u3 - 2.0))
    M_eval = m_req if M is None else M
    p6 = 4.0 * N * _safe_exp(-d * (epsilon * s) ** 2 * M_eval)
    return RipRequirement(m_req, exact, u3, Probability(p5), Probability(p6))
