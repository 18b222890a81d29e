"""Multifrequency-chirp sensing matrices and the baseline ensembles.

The multichirp matrix is built two ways: as a sum of per-chirp terms
``c_i * H_i @ Abar @ D_i`` and column by column as ``E_m @ F @ G_m @ c``.
Both use 0-based indices ``k = 0..M-1`` (receiver samples) and
``m, i, r = 0..N-1`` (delay bins / chirp centre frequencies).

All phases are evaluated from integer products reduced modulo ``N`` or ``M``
before the exponential, which keeps entries accurate for large ``N``.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

SPEED_OF_LIGHT = 299_792_458.0


class Ensemble(str, enum.Enum):
    MULTICHIRP = "multichirp"
    GAUSSIAN = "gaussian"
    TOEPLITZ = "toeplitz"


@dataclass(frozen=True)
class PhysicalParams:
    """Radar parameters from which the grid sizes are derived."""

    B: float
    g: float
    R_min: float
    R_max: float
    c_light: float = SPEED_OF_LIGHT

    @property
    def t_u(self) -> float:
        return 2.0 * (self.R_max - self.R_min) / self.c_light

    @property
    def beta(self) -> float:
        return self.B / self.g


@dataclass(frozen=True)
class SystemConfig:
    """Dimensions of the chirp system.

    ``N`` delay bins, ``M`` receiver samples per pulse, ``n_chirps`` expected
    number of active chirps and ``p = tau / t_u`` (must be co-prime with M).
    """

    N: int
    M: int
    n_chirps: float
    p: int
    physical: Optional[PhysicalParams] = None

    def __post_init__(self):
        if not 1 <= self.M <= self.N:
            raise ValueError(f"need 1 <= M <= N, got M={self.M}, N={self.N}")
        if not 1 <= self.n_chirps <= self.N:
            raise ValueError(f"need 1 <= n_chirps <= N, got {self.n_chirps}")
        if self.p < 1:
            raise ValueError(f"p must be >= 1, got {self.p}")
        if math.gcd(self.p, self.M) != 1:
            raise ValueError(f"p={self.p} is not co-prime with M={self.M}")
        if self.physical is not None:
            ph = self.physical
            if ph.g < 1:
                raise ValueError("bandwidth ratio g must be >= 1")
            N_phys = ph.B * ph.t_u
            M_phys = ph.beta * ph.t_u
            if abs(N_phys - self.N) > 0.5 or abs(M_phys - self.M) > 0.5:
                raise ValueError("N, M inconsistent with the physical block")

    @classmethod
    def from_physical(cls, B: float, g: float, R_min: float, R_max: float,
                      n_chirps: float, p: Optional[int] = None,
                      c_light: float = SPEED_OF_LIGHT) -> "SystemConfig":
        """Derive ``N = B t_u`` and ``M = beta t_u`` from the radar geometry.

        ``p`` defaults to ``M + 1``; a requested ``p`` sharing a factor with
        ``M`` is bumped to the next co-prime value.
        """
        ph = PhysicalParams(B=B, g=g, R_min=R_min, R_max=R_max, c_light=c_light)
        N = int(round(B * ph.t_u))
        M = int(round(ph.beta * ph.t_u))
        if N < 1 or M < 1:
            raise ValueError(f"derived sizes must be positive, got N={N}, M={M}")
        p = validate_or_fix_p(M, M + 1 if p is None else p)
        return cls(N=N, M=M, n_chirps=n_chirps, p=p, physical=ph)

    @property
    def nu(self) -> float:
        return self.n_chirps / self.N

    @property
    def scale(self) -> float:
        """Per-entry normalisation ``1/sqrt(M N_c)``, using the design N_c."""
        return 1.0 / math.sqrt(self.M * self.n_chirps)


@dataclass(frozen=True)
class SensingMatrix:
    entries: np.ndarray
    kind: Optional[Ensemble] = None
    seed_record: dict = field(default_factory=dict)
    column_norms: Optional[np.ndarray] = None
    normalized: bool = False

    def __post_init__(self):
        a = np.asarray(self.entries, dtype=np.complex128)
        if a.ndim != 2:
            raise ValueError("entries must be a 2-D array")
        if not np.all(np.isfinite(a)):
            raise ValueError("sensing matrix has non-finite entries")
        a = a.copy() if a is self.entries and a.flags.writeable else a
        a.flags.writeable = False
        object.__setattr__(self, "entries", a)
        if self.column_norms is not None:
            cn = np.array(self.column_norms, dtype=float)
            cn.flags.writeable = False
            object.__setattr__(self, "column_norms", cn)

    @property
    def shape(self) -> tuple[int, int]:
        return self.entries.shape

    @property
    def M(self) -> int:
        return self.entries.shape[0]

    @property
    def N(self) -> int:
        return self.entries.shape[1]

    def __array__(self, dtype=None, copy=None):
        if dtype is None:
            return self.entries
        return self.entries.astype(dtype)


def as_array(A) -> np.ndarray:
    """Dense complex view of a SensingMatrix or array-like."""
    if isinstance(A, SensingMatrix):
        return A.entries
    return np.asarray(A, dtype=np.complex128)


def validate_or_fix_p(M: int, p_requested: int) -> int:
    """Return ``p_requested`` if co-prime with ``M``, else the next co-prime p."""
    if M < 1:
        raise ValueError("M must be >= 1")
    p = max(int(p_requested), 1)
    if math.gcd(p, M) == 1:
        return p
    p += 1
    while math.gcd(p, M) != 1:
        p += 1
    return p


def _phase(num: np.ndarray, den: int, sign: int) -> np.ndarray:
    return np.exp(sign * 2j * np.pi * (num % den) / den)


def tone_matrix(config: SystemConfig) -> np.ndarray:
    """Single-chirp tone matrix ``Abar``: ``Abar[k, r] = exp(-2j pi r k / N) / sqrt(M N_c)``."""
    k = np.arange(config.M)[:, None]
    r = np.arange(config.N)[None, :]
    return config.scale * _phase(k * r, config.N, -1)


def frequency_matrix(config: SystemConfig) -> np.ndarray:
    """Aliased centre-frequency matrix ``F[k, r] = exp(2j pi r p k / M) / sqrt(M N_c)``."""
    k = np.arange(config.M)[:, None]
    r = np.arange(config.N)[None, :]
    return config.scale * _phase(r * config.p * k, config.M, +1)


def chirp_term(config: SystemConfig, i: int) -> np.ndarray:
    """Deterministic response ``H_i @ Abar @ D_i`` of chirp ``i``."""
    k = np.arange(config.M)
    n = np.arange(config.N)
    h = _phase(i * config.p * k, config.M, +1)
    d = _phase(i * n, config.N, -1)
    return h[:, None] * tone_matrix(config) * d[None, :]


def _selection_values(config: SystemConfig, c) -> np.ndarray:
    values = np.asarray(getattr(c, "values", c), dtype=np.complex128)
    if values.shape != (config.N,):
        raise ValueError(f"selection vector must have length N={config.N}, "
                         f"got shape {values.shape}")
    return values


def _seed_record(c, values: np.ndarray) -> dict:
    rec = {"selection": values.copy()}
    seed = getattr(c, "seed", None)
    if seed is not None:
        rec["seed"] = seed
    return rec


def build_multichirp_sum(config: SystemConfig, c) -> SensingMatrix:
    """Sensing matrix as the chirp sum ``sum_i c_i H_i Abar D_i``.

    Every term shares ``Abar`` elementwise, so the sum collapses to
    ``Abar * (H[:, act] diag(c_act) D[act, :])`` over the active chirps only.
    """
    values = _selection_values(config, c)
    if math.gcd(config.p, config.M) != 1:
        raise ValueError("p must be co-prime with M")
    act = np.flatnonzero(values)
    if act.size == 0:
        A = np.zeros((config.M, config.N), dtype=np.complex128)
    else:
        k = np.arange(config.M)[:, None]
        n = np.arange(config.N)[None, :]
        H = _phase(act[None, :] * config.p * k, config.M, +1)   # M x n_act
        D = _phase(act[:, None] * n, config.N, -1)              # n_act x N
        A = tone_matrix(config) * ((H * values[act][None, :]) @ D)
    return SensingMatrix(A, Ensemble.MULTICHIRP, _seed_record(c, values))


def build_multichirp_columns(config: SystemConfig, c) -> SensingMatrix:
    """Sensing matrix column by column, ``A(m) = E_m F G_m c``."""
    values = _selection_values(config, c)
    if math.gcd(config.p, config.M) != 1:
        raise ValueError("p must be co-prime with M")
    act = np.flatnonzero(values)
    m = np.arange(config.N)
    k = np.arange(config.M)
    F = frequency_matrix(config)[:, act]
    # column m of W is G_m c restricted to the active chirps
    W = _phase(act[:, None] * m[None, :], config.N, -1) * values[act][:, None]
    E = _phase(k[:, None] * m[None, :], config.N, -1)
    A = E * (F @ W)
    return SensingMatrix(A, Ensemble.MULTICHIRP, _seed_record(c, values))


def build_gaussian(M: int, N: int, rng: np.random.Generator) -> SensingMatrix:
    """i.i.d. circular complex Gaussian entries with variance ``1/M``."""
    if M < 1 or N < 1:
        raise ValueError("M and N must be >= 1")
    G = (rng.standard_normal((M, N)) + 1j * rng.standard_normal((M, N)))
    G *= 1.0 / math.sqrt(2.0 * M)
    return SensingMatrix(G, Ensemble.GAUSSIAN)


def toeplitz_rows(M: int, N: int) -> np.ndarray:
    """Rows kept by the uniform sub-sampler: ``floor(r N / M)``."""
    return (np.arange(M) * N) // M


def build_partial_toeplitz(M: int, N: int, rng: np.random.Generator) -> SensingMatrix:
    """Partial Toeplitz matrix ``P_Omega T1 / sqrt(M)``.

    ``T1[r, c] = t[N - 1 + r - c]`` from ``2N - 1`` standard complex
    Gaussian generators (0-based ``t``); rows are kept by uniform decimation.
    """
    if not 1 <= M <= N:
        raise ValueError(f"need 1 <= M <= N, got M={M}, N={N}")
    t = (rng.standard_normal(2 * N - 1) + 1j * rng.standard_normal(2 * N - 1)) / math.sqrt(2.0)
    rows = toeplitz_rows(M, N)
    idx = N - 1 + rows[:, None] - np.arange(N)[None, :]
    T = t[idx] / math.sqrt(M)
    return SensingMatrix(T, Ensemble.TOEPLITZ, {"generators": t, "rows": rows})


def column_normalize(A: SensingMatrix) -> tuple[SensingMatrix, np.ndarray]:
    """Return ``A D^{-1}`` with unit-norm columns and the norms ``D_ii``."""
    arr = as_array(A)
    norms = np.linalg.norm(arr, axis=0)
    if np.any(norms == 0):
        bad = np.flatnonzero(norms == 0)
        raise ValueError(f"cannot normalise zero column(s) {bad[:5].tolist()}")
    A_hat = arr / norms[None, :]
    kind = A.kind if isinstance(A, SensingMatrix) else None
    record = dict(A.seed_record) if isinstance(A, SensingMatrix) else {}
    out = SensingMatrix(A_hat, kind, record,
                        column_norms=np.linalg.norm(A_hat, axis=0), normalized=True)
    return out, norms
