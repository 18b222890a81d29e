"""Randomness: chirp selections, sparse scenes, noise and seed derivation.

Every random draw takes an explicit ``numpy.random.Generator``. Experiments
build one generator per task from :func:`derive_seed`, so trials can run in
any order or in parallel and still give identical numbers.
"""
from __future__ import annotations

import enum
import hashlib
import math
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from .matrix_core import as_array

MAX_SELECTION_ATTEMPTS = 100


class SelectionModel(str, enum.Enum):
    BERNOULLI_PHASE = "bernoulli_phase"
    BERNOULLI_RADEMACHER = "bernoulli_rademacher"


class AmplitudeModel(str, enum.Enum):
    UNIT_PHASE = "unit_phase"
    COMPLEX_GAUSSIAN = "complex_gaussian"


class SelectionError(RuntimeError):
    """Raised when every resampling attempt produced an empty selection."""


@dataclass(frozen=True)
class SelectionVector:
    values: np.ndarray
    model: SelectionModel
    realized_count: int
    resample_attempts: int = 0
    seed: Optional[int] = None

    @property
    def N(self) -> int:
        return self.values.shape[0]

    @property
    def active(self) -> np.ndarray:
        return np.flatnonzero(self.values)


@dataclass(frozen=True)
class SparseScene:
    N: int
    support: np.ndarray
    amplitudes: np.ndarray
    sigma: float = 0.0

    def __post_init__(self):
        support = np.asarray(self.support, dtype=np.int64)
        amps = np.asarray(self.amplitudes, dtype=np.complex128)
        if support.shape != amps.shape:
            raise ValueError("support and amplitudes must have the same length")
        if support.size and (support.min() < 0 or support.max() >= self.N):
            raise ValueError("support index out of range")
        if np.unique(support).size != support.size:
            raise ValueError("support indices must be distinct")
        if np.any(amps == 0):
            raise ValueError("scene amplitudes must be nonzero")
        if self.sigma < 0:
            raise ValueError("sigma must be non-negative")
        order = np.argsort(support)
        object.__setattr__(self, "support", support[order])
        object.__setattr__(self, "amplitudes", amps[order])

    @property
    def K(self) -> int:
        return int(self.support.size)

    def to_dense(self) -> np.ndarray:
        x = np.zeros(self.N, dtype=np.complex128)
        x[self.support] = self.amplitudes
        return x


def derive_seed(master_seed: int, experiment_id: str, trial_index: int) -> int:
    """64-bit seed from BLAKE2b over ``(master_seed, experiment_id, trial_index)``.

    The triple is serialised as ``"<master>\\x1f<id>\\x1f<trial>"`` and the
    8-byte digest read little-endian. Stable across runs and platforms.
    """
    key = f"{int(master_seed) & 0xFFFFFFFFFFFFFFFF}\x1f{experiment_id}\x1f{int(trial_index)}"
    digest = hashlib.blake2b(key.encode("utf-8"), digest_size=8).digest()
    return int.from_bytes(digest, "little")


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


def draw_selection(N: int, n_chirps: float, model=SelectionModel.BERNOULLI_PHASE,
                   rng: Optional[np.random.Generator] = None) -> SelectionVector:
    """Bernoulli(N_c/N) chirp selection, scaled by random phases or signs.

    An all-zero draw is redrawn (up to 100 attempts) so the matrix is never
    identically zero; ``resample_attempts`` counts the redraws.
    """
    model = SelectionModel(model)
    if not 1 <= n_chirps <= N:
        raise ValueError(f"need 1 <= n_chirps <= N, got n_chirps={n_chirps}, N={N}")
    rng = rng if rng is not None else np.random.default_rng()
    prob = n_chirps / N
    for attempt in range(MAX_SELECTION_ATTEMPTS):
        gamma = rng.random(N) < prob
        if model is SelectionModel.BERNOULLI_PHASE:
            scale = np.exp(1j * rng.uniform(0.0, 2.0 * np.pi, N))
        else:
            scale = np.where(rng.random(N) < 0.5, -1.0, 1.0).astype(np.complex128)
        count = int(gamma.sum())
        if count:
            values = np.where(gamma, scale, 0.0).astype(np.complex128)
            return SelectionVector(values, model, count, attempt)
    raise SelectionError(f"{MAX_SELECTION_ATTEMPTS} consecutive empty selections "
                         f"(N={N}, n_chirps={n_chirps})")


def draw_scene(N: int, K: int, amplitude_model=AmplitudeModel.COMPLEX_GAUSSIAN,
               rng: Optional[np.random.Generator] = None, sigma: float = 0.0) -> SparseScene:
    """K-sparse scene on a uniformly random support."""
    amplitude_model = AmplitudeModel(amplitude_model)
    if K < 1:
        raise ValueError("K must be >= 1")
    if K > N:
        raise ValueError(f"K={K} exceeds N={N}")
    rng = rng if rng is not None else np.random.default_rng()
    support = np.sort(rng.choice(N, size=K, replace=False))
    if amplitude_model is AmplitudeModel.UNIT_PHASE:
        amps = np.exp(1j * rng.uniform(0.0, 2.0 * np.pi, K))
    else:
        amps = (rng.standard_normal(K) + 1j * rng.standard_normal(K)) / math.sqrt(2.0)
        # a zero amplitude has probability zero but would break the scene invariant
        amps[amps == 0] = 1.0
    return SparseScene(N, support, amps, sigma)


def measurement_snr(A, scene: SparseScene) -> float:
    """Per-measurement SNR ``||A x||^2 / (M sigma^2)`` (linear)."""
    arr = as_array(A)
    signal = np.linalg.norm(arr[:, scene.support] @ scene.amplitudes) ** 2
    return signal / (arr.shape[0] * scene.sigma ** 2)


def scale_to_snr(scene: SparseScene, A, snr_db: float) -> SparseScene:
    """Rescale amplitudes by one positive factor to hit ``snr_db``."""
    if not scene.sigma > 0:
        raise ValueError("scene.sigma must be positive to define an SNR")
    if not math.isfinite(snr_db):
        raise ValueError("snr_db must be finite")
    arr = as_array(A)
    if arr.shape[1] != scene.N:
        raise ValueError("matrix and scene dimensions disagree")
    signal = np.linalg.norm(arr[:, scene.support] @ scene.amplitudes) ** 2
    if signal == 0:
        raise ValueError("A x = 0; no amplitude scale reaches a positive SNR")
    target = 10.0 ** (snr_db / 10.0) * arr.shape[0] * scene.sigma ** 2
    factor = math.sqrt(target / signal)
    return replace(scene, amplitudes=scene.amplitudes * factor)


def complex_noise(M: int, sigma: float, rng: np.random.Generator) -> np.ndarray:
    """Circular complex Gaussian noise with total variance ``sigma**2``."""
    return sigma * (rng.standard_normal(M) + 1j * rng.standard_normal(M)) / math.sqrt(2.0)


def measure(A, scene: SparseScene, rng: np.random.Generator) -> np.ndarray:
    """Noisy measurement ``y = A x + w``."""
    arr = as_array(A)
    if arr.shape[1] != scene.N:
        raise ValueError("matrix and scene dimensions disagree")
    y = arr[:, scene.support] @ scene.amplitudes
    w = complex_noise(arr.shape[0], scene.sigma, rng)
    return y + w
