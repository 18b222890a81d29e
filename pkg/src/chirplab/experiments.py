"""Seeded Monte-Carlo campaigns: coherence sweeps, recovery grids and audits.

Seeds come from :func:`~chirplab.stochastic.derive_seed` keyed by the
quantities a draw depends on, never by loop position:

* matrix:  ``{id}/matrix/{ensemble}/M{M}`` and the matrix index
* scene:   ``{id}/scene/K{K}`` and the trial index
* noise:   ``{id}/noise/M{M}/K{K}/snr{snr}`` and the trial index

so dropping or reordering cells leaves every other cell unchanged, and
ensembles compared in one run see the same scenes and noise.
"""
from __future__ import annotations

import dataclasses
import hashlib
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Optional, Sequence

import numpy as np
from threadpoolctl import threadpool_limits

from . import bounds as bnd
from .diagnostics import (gershgorin_rip_bound, mutual_coherence, operator_norm,
                          rip_constant_bruteforce)
from .matrix_core import (Ensemble, SensingMatrix, SystemConfig, build_gaussian,
                          build_multichirp_sum, build_partial_toeplitz, column_normalize,
                          validate_or_fix_p)
from .solvers import SolverOptions, bpdn, debias, evaluate_recovery, lasso, omp
from .stochastic import (AmplitudeModel, SelectionModel, derive_seed, draw_scene,
                         draw_selection, make_rng, measure, scale_to_snr)

log = logging.getLogger(__name__)

SOLVERS = ("bpdn", "lasso", "omp")
SUCCESS_RULES = ("mse_1pct", "support_exact")


@dataclass(frozen=True)
class EnsembleSpec:
    """One sensing-matrix family in a plan.

    Multichirp needs exactly one of ``n_chirps`` (fixed N_c) or ``nu``
    (N_c = nu N).
    """

    kind: Ensemble
    n_chirps: Optional[float] = None
    nu: Optional[float] = None
    model: SelectionModel = SelectionModel.BERNOULLI_PHASE
    normalize_columns: bool = False

    def __post_init__(self):
        object.__setattr__(self, "kind", Ensemble(self.kind))
        object.__setattr__(self, "model", SelectionModel(self.model))
        if self.kind is Ensemble.MULTICHIRP:
            if (self.n_chirps is None) == (self.nu is None):
                raise ValueError("multichirp needs exactly one of n_chirps or nu")
            if self.nu is not None and not 0 < self.nu <= 1:
                raise ValueError("nu must lie in (0, 1]")
            if self.n_chirps is not None and not self.n_chirps >= 1:
                raise ValueError("n_chirps must be >= 1")

    @property
    def label(self) -> str:
        if self.kind is not Ensemble.MULTICHIRP:
            name = self.kind.value
        elif self.nu is not None:
            name = f"multichirp_nu{self.nu:g}"
        else:
            name = f"multichirp_nc{self.n_chirps:g}"
        if self.kind is Ensemble.MULTICHIRP and self.model is SelectionModel.BERNOULLI_RADEMACHER:
            name += "_rademacher"
        if self.normalize_columns:
            name += "_colnorm"
        return name

    def chirps(self, N: int) -> Optional[float]:
        if self.kind is not Ensemble.MULTICHIRP:
            return None
        return float(self.n_chirps) if self.nu is None else self.nu * N

    def to_dict(self) -> dict:
        out = {"kind": self.kind.value}
        if self.n_chirps is not None:
            out["n_chirps"] = self.n_chirps
        if self.nu is not None:
            out["nu"] = self.nu
        if self.kind is Ensemble.MULTICHIRP:
            out["model"] = self.model.value
        if self.normalize_columns:
            out["normalize_columns"] = True
        return out

    @classmethod
    def from_dict(cls, d) -> "EnsembleSpec":
        if isinstance(d, str):
            return cls(kind=d)
        unknown = set(d) - {f.name for f in dataclasses.fields(cls)}
        if unknown:
            raise ValueError(f"unknown ensemble keys: {sorted(unknown)}")
        return cls(**d)


def build_matrix(spec: EnsembleSpec, M: int, N: int, master_seed: int, experiment_id: str,
                 trial: int, p: Optional[int] = None) -> SensingMatrix:
    """Seeded draw of one ensemble member at size ``M x N``."""
    seed = derive_seed(master_seed, f"{experiment_id}/matrix/{spec.label}/M{M}", trial)
    rng = make_rng(seed)
    if spec.kind is Ensemble.MULTICHIRP:
        cfg = SystemConfig(N=N, M=M, n_chirps=spec.chirps(N),
                           p=validate_or_fix_p(M, M + 1 if p is None else p))
        sel = dataclasses.replace(draw_selection(N, cfg.n_chirps, spec.model, rng), seed=seed)
        A = build_multichirp_sum(cfg, sel)
    elif spec.kind is Ensemble.GAUSSIAN:
        A = build_gaussian(M, N, rng)
    else:
        A = build_partial_toeplitz(M, N, rng)
    A = dataclasses.replace(A, seed_record={**A.seed_record, "seed": seed})
    if spec.normalize_columns:
        A, _ = column_normalize(A)
    return A


def design_eta(sigma: float, M: int) -> float:
    """BPDN budget ``sigma sqrt(M) sqrt(1 + 2/sqrt(M))``: mean plus about one sd of ‖w‖²."""
    return sigma * math.sqrt(M) * math.sqrt(1.0 + 2.0 / math.sqrt(M))


def theorem_lambda(sigma: float, N: int) -> float:
    return 2.0 * sigma * math.sqrt(math.log(N))


@dataclass(frozen=True)
class ExperimentPlan:
    experiment_id: str
    ensembles: tuple
    ratios: tuple = (0.4,)
    K_values: tuple = (1,)
    snr_db: tuple = (25.0,)
    trials_per_cell: int = 100
    master_seed: int = 0
    N: int = 256
    solver: str = "bpdn"
    solver_options: SolverOptions = SolverOptions(max_iterations=5000)
    success_rule: str = "mse_1pct"
    sigma: float = 1.0
    amplitude_model: AmplitudeModel = AmplitudeModel.COMPLEX_GAUSSIAN
    # eta = eta_factor * design_eta; lam = lam_factor * sigma sqrt(ln N)
    eta_factor: float = 1.0
    lam_factor: float = 2.0
    debias: bool = False
    scenes_per_matrix: int = 1
    p: Optional[int] = None
    epsilon: float = 0.5
    alpha3: float = 1.0
    d: float = 1.0

    def __post_init__(self):
        ens = tuple(e if isinstance(e, EnsembleSpec) else EnsembleSpec.from_dict(e)
                    for e in self.ensembles)
        object.__setattr__(self, "ensembles", ens)
        for name in ("ratios", "K_values", "snr_db"):
            object.__setattr__(self, name, tuple(getattr(self, name)))
        object.__setattr__(self, "amplitude_model", AmplitudeModel(self.amplitude_model))
        if isinstance(self.solver_options, dict):
            object.__setattr__(self, "solver_options", SolverOptions(**self.solver_options))
        if not self.experiment_id:
            raise ValueError("experiment_id must be non-empty")
        if not ens:
            raise ValueError("plan needs at least one ensemble")
        if len({e.label for e in ens}) != len(ens):
            raise ValueError("ensemble labels must be distinct")
        if not (self.ratios and self.K_values and self.snr_db):
            raise ValueError("plan axes must be non-empty")
        if any(not 0 < r <= 1 for r in self.ratios):
            raise ValueError("fractional bandwidths must lie in (0, 1]")
        if any(int(k) != k or k < 1 for k in self.K_values):
            raise ValueError("K values must be integers >= 1")
        if any(not math.isfinite(s) for s in self.snr_db):
            raise ValueError("snr_db values must be finite")
        if self.trials_per_cell < 1:
            raise ValueError("trials_per_cell must be >= 1")
        if self.N < 2:
            raise ValueError("N must be >= 2")
        if self.solver not in SOLVERS:
            raise ValueError(f"solver must be one of {SOLVERS}")
        if self.success_rule not in SUCCESS_RULES:
            raise ValueError(f"success_rule must be one of {SUCCESS_RULES}")
        if not self.sigma > 0:
            raise ValueError("sigma must be positive")
        if self.scenes_per_matrix < 1:
            raise ValueError("scenes_per_matrix must be >= 1")
        for e in ens:
            nc = e.chirps(self.N)
            if nc is not None and not 1 <= nc <= self.N:
                raise ValueError(f"{e.label}: N_c = {nc} outside [1, N]")

    def M_for(self, ratio: float) -> int:
        return max(1, int(round(ratio * self.N)))

    def to_dict(self) -> dict:
        out = {}
        for f in dataclasses.fields(self):
            v = getattr(self, f.name)
            if f.name == "ensembles":
                v = [e.to_dict() for e in v]
            elif f.name == "solver_options":
                v = dataclasses.asdict(v)
            elif isinstance(v, tuple):
                v = list(v)
            elif isinstance(v, AmplitudeModel):
                v = v.value
            out[f.name] = v
        return out

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentPlan":
        unknown = set(d) - {f.name for f in dataclasses.fields(cls)}
        if unknown:
            raise ValueError(f"unknown plan keys: {sorted(unknown)}")
        return cls(**d)


@dataclass
class GridResult:
    kind: str
    columns: tuple
    cells: list
    records: list = field(default_factory=list, repr=False)
    provenance: dict = field(default_factory=dict)
    summary: list = field(default_factory=list)

    def rows(self) -> list[tuple]:
        return [tuple(c[k] for k in self.columns) for c in self.cells]


COLUMNS = {
    "coherence-sweep": ("ensemble", "ratio", "mean_mu", "std_mu", "trials"),
    "phase-transition": ("ensemble", "n_chirps", "ratio", "K", "success_rate",
                         "mean_rel_mse", "trials"),
    "snr-grid": ("ensemble", "n_chirps", "snr_db", "K", "mean_mse_db", "trials"),
    "bounds-vs-empirical": ("quantity", "value"),
    "rip-audit": ("ensemble", "trial", "K", "delta_bruteforce", "delta_gershgorin",
                  "m_required"),
}


def build_id() -> str:
    """Digest of the package sources; identifies the code that produced a result."""
    h = hashlib.sha256()
    for path in sorted(Path(__file__).parent.glob("*.py")):
        h.update(path.name.encode())
        h.update(path.read_bytes())
    return h.hexdigest()[:16]


def _init_worker():
    threadpool_limits(1)


def run_tasks(func: Callable, tasks: Sequence, threads: int = 1) -> list:
    """Map ``func`` over ``tasks``; results come back in task order.

    BLAS is held to one thread everywhere so results do not depend on the
    worker count.
    """
    threads = max(1, int(threads))
    if threads == 1 or len(tasks) <= 1:
        with threadpool_limits(1):
            return [func(t) for t in tasks]
    chunk = max(1, len(tasks) // (4 * threads))
    with ProcessPoolExecutor(max_workers=threads, initializer=_init_worker) as ex:
        return list(ex.map(func, tasks, chunksize=chunk))


def _provenance(plan: ExperimentPlan) -> dict:
    return {"plan": plan.to_dict(), "master_seed": plan.master_seed, "build_id": build_id()}


def _mean_std(values) -> tuple[float, float]:
    arr = np.asarray(values, dtype=float)
    return float(arr.mean()), float(arr.std(ddof=1)) if arr.size > 1 else 0.0


# -- coherence sweep ---------------------------------------------------------

def _coherence_task(task) -> dict:
    plan, spec, ratio, trial = task
    M = plan.M_for(ratio)
    rep = mutual_coherence(build_matrix(spec, M, plan.N, plan.master_seed,
                                        plan.experiment_id, trial, plan.p))
    return {"ensemble": spec.label, "ratio": ratio, "M": M, "trial": trial, "mu": rep.mu,
            "min_col_norm": rep.min_col_norm, "max_col_norm": rep.max_col_norm}


def run_coherence_sweep(plan: ExperimentPlan, threads: int = 1) -> GridResult:
    """Mean and sample std of the mutual coherence per ensemble and ratio."""
    if plan.trials_per_cell < 2:
        raise ValueError("coherence sweep needs trials_per_cell >= 2")
    tasks = [(plan, e, r, t) for e in plan.ensembles for r in plan.ratios
             for t in range(plan.trials_per_cell)]
    records = run_tasks(_coherence_task, tasks, threads)
    cells = []
    for e in plan.ensembles:
        for r in plan.ratios:
            mus = [x["mu"] for x in records if x["ensemble"] == e.label and x["ratio"] == r]
            mean, std = _mean_std(mus)
            cells.append({"ensemble": e.label, "ratio": r, "mean_mu": mean, "std_mu": std,
                          "trials": len(mus)})
    return GridResult("coherence-sweep", COLUMNS["coherence-sweep"], cells, records,
                      _provenance(plan))


# -- recovery grids ----------------------------------------------------------

def _solve(plan: ExperimentPlan, A, y, K: int):
    M, N = A.shape
    if plan.solver == "bpdn":
        res = bpdn(A, y, plan.eta_factor * design_eta(plan.sigma, M), plan.solver_options)
    elif plan.solver == "lasso":
        lam = plan.lam_factor * plan.sigma * math.sqrt(math.log(N))
        res = lasso(A, y, dataclasses.replace(plan.solver_options, lam=lam))
    else:
        res = omp(A, y, K=K)
    if plan.debias:
        res = debias(A, y, res)
    return res


def _recovery_task(task) -> list:
    plan, spec, ratio, snrs, matrix_index = task
    M = plan.M_for(ratio)
    N = plan.N
    A = build_matrix(spec, M, N, plan.master_seed, plan.experiment_id, matrix_index, plan.p)
    first = matrix_index * plan.scenes_per_matrix
    trials = range(first, min(first + plan.scenes_per_matrix, plan.trials_per_cell))
    out = []
    for K in plan.K_values:
        for snr in snrs:
            for t in trials:
                scene_rng = make_rng(derive_seed(plan.master_seed,
                                                 f"{plan.experiment_id}/scene/K{K}", t))
                scene = draw_scene(N, K, plan.amplitude_model, scene_rng, sigma=plan.sigma)
                scene = scale_to_snr(scene, A, snr)
                noise_rng = make_rng(derive_seed(
                    plan.master_seed, f"{plan.experiment_id}/noise/M{M}/K{K}/snr{float(snr)!r}", t))
                y = measure(A, scene, noise_rng)
                x = scene.to_dense()
                failed = False
                try:
                    res = _solve(plan, A, y, K)
                    ev = evaluate_recovery(res.estimate, x, plan.solver_options.support_threshold)
                    converged = bool(res.converged)
                    rel, exact = ev.relative_mse, ev.support_exact
                except (ValueError, np.linalg.LinAlgError) as err:
                    log.warning("solver failure %s M=%d K=%d trial=%d: %s",
                                spec.label, M, K, t, err)
                    failed, converged, rel, exact = True, False, 1.0, False
                success = rel <= 0.01 if plan.success_rule == "mse_1pct" else exact
                out.append({"ensemble": spec.label, "n_chirps": spec.chirps(N), "ratio": ratio,
                            "M": M, "K": int(K), "snr_db": float(snr), "trial": t,
                            "rel_mse": rel, "success": bool(success),
                            "support_exact": bool(exact), "converged": converged,
                            "failed": failed})
    return out


def _recovery_records(plan: ExperimentPlan, ratios, snrs, threads: int) -> list:
    n_mat = math.ceil(plan.trials_per_cell / plan.scenes_per_matrix)
    tasks = [(plan, e, r, tuple(snrs), j) for e in plan.ensembles for r in ratios
             for j in range(n_mat)]
    records = [rec for chunk in run_tasks(_recovery_task, tasks, threads) for rec in chunk]
    records.sort(key=lambda x: (x["ensemble"], x["ratio"], x["K"], x["snr_db"], x["trial"]))
    return records


def _aggregate(records, keys) -> dict:
    groups: dict = {}
    for rec in records:
        groups.setdefault(tuple(rec[k] for k in keys), []).append(rec)
    return groups


def _cell_stats(recs) -> dict:
    n = len(recs)
    mean_rel = float(np.mean([r["rel_mse"] for r in recs]))
    succ = sum(r["success"] for r in recs)
    return {"success_count": succ, "success_rate": succ / n, "mean_rel_mse": mean_rel,
            "mean_mse_db": 10.0 * math.log10(mean_rel) if mean_rel > 0 else -math.inf,
            "trials": n, "failures": sum(r["failed"] for r in recs),
            "unconverged": sum(not r["converged"] for r in recs)}


def run_phase_transition(plan: ExperimentPlan, threads: int = 1) -> GridResult:
    """Success rate over (fractional bandwidth, K) at the plan's first SNR."""
    snr = plan.snr_db[0]
    records = _recovery_records(plan, plan.ratios, [snr], threads)
    groups = _aggregate(records, ("ensemble", "ratio", "K"))
    cells = []
    for e in plan.ensembles:
        for r in plan.ratios:
            for K in plan.K_values:
                stats = _cell_stats(groups[(e.label, r, int(K))])
                cells.append({"ensemble": e.label, "n_chirps": e.chirps(plan.N), "ratio": r,
                              "K": int(K), "snr_db": snr, **stats})
    return GridResult("phase-transition", COLUMNS["phase-transition"], cells, records,
                      _provenance(plan))


def run_snr_grid(plan: ExperimentPlan, threads: int = 1) -> GridResult:
    """Mean MSE in dB over (SNR, K) at the plan's first fractional bandwidth."""
    ratio = plan.ratios[0]
    records = _recovery_records(plan, [ratio], plan.snr_db, threads)
    groups = _aggregate(records, ("ensemble", "snr_db", "K"))
    cells = []
    for e in plan.ensembles:
        for s in plan.snr_db:
            for K in plan.K_values:
                stats = _cell_stats(groups[(e.label, float(s), int(K))])
                cells.append({"ensemble": e.label, "n_chirps": e.chirps(plan.N),
                              "snr_db": float(s), "K": int(K), "ratio": ratio, **stats})
    return GridResult("snr-grid", COLUMNS["snr-grid"], cells, records, _provenance(plan))


# -- audits ------------------------------------------------------------------

def _bounds_task(task) -> dict:
    plan, spec, M, trial = task
    A = build_matrix(spec, M, plan.N, plan.master_seed, plan.experiment_id, trial, plan.p)
    coh = mutual_coherence(A)
    return {"trial": trial, "opnorm": operator_norm(A, restarts=1).value, "mu": coh.mu,
            "min_col_norm_sq": coh.min_col_norm ** 2}


def run_bounds_vs_empirical(plan: ExperimentPlan, threads: int = 1) -> GridResult:
    """Empirical tail frequencies next to the closed-form tail bounds.

    Uses the first multichirp ensemble and the first ratio of the plan.
    """
    if plan.trials_per_cell < 50:
        raise ValueError("bounds-vs-empirical needs trials_per_cell >= 50")
    spec = next((e for e in plan.ensembles if e.kind is Ensemble.MULTICHIRP), None)
    if spec is None:
        raise ValueError("bounds-vs-empirical needs a multichirp ensemble")
    N, M, Nc = plan.N, plan.M_for(plan.ratios[0]), spec.chirps(plan.N)
    records = run_tasks(_bounds_task, [(plan, spec, M, t) for t in range(plan.trials_per_cell)],
                        threads)
    T = len(records)
    op = bnd.opnorm_bounds(N, M, Nc)
    col = bnd.column_norm_tail(N, M, Nc, plan.epsilon, plan.d)
    coh = bnd.coherence_tail(N, M, Nc, plan.alpha3, plan.epsilon, plan.d)
    norms = np.array([r["opnorm"] for r in records])
    mus = np.array([r["mu"] for r in records])
    mins = np.array([r["min_col_norm_sq"] for r in records])
    scale = math.sqrt(math.log(N) / M)
    rows = [
        ("N", N), ("M", M), ("N_c", Nc), ("trials", T),
        ("epsilon", plan.epsilon), ("alpha3", plan.alpha3), ("d", plan.d),
        ("opnorm_threshold", op.threshold),
        ("opnorm_empirical_exceedance", float(np.mean(norms >= op.threshold))),
        ("opnorm_tail_bound", op.tail.clamped),
        ("opnorm_empirical_mean", float(norms.mean())),
        ("opnorm_empirical_max", float(norms.max())),
        ("opnorm_expectation_bound", op.expectation_bound),
        ("column_norm_level", 1.0 - plan.epsilon),
        ("column_norm_empirical_frequency", float(np.mean(mins <= 1.0 - plan.epsilon))),
        ("column_norm_tail_bound", col.clamped),
        ("column_norm_empirical_min", float(mins.min())),
        ("coherence_threshold", coh.threshold),
        ("coherence_empirical_exceedance", float(np.mean(mus >= coh.threshold))),
        ("coherence_tail_bound", coh.tail.clamped),
        ("coherence_branch", coh.branch),
        ("coherence_empirical_mean", float(mus.mean())),
        ("alpha3_fit", float(np.max(mus * (1.0 - plan.epsilon) / scale))),
    ]
    cells = [{"quantity": q, "value": v} for q, v in rows]
    return GridResult("bounds-vs-empirical", COLUMNS["bounds-vs-empirical"], cells, records,
                      _provenance(plan))


def _rip_task(task) -> list:
    plan, spec, M, trial = task
    A = build_matrix(spec, M, plan.N, plan.master_seed, plan.experiment_id, trial, plan.p)
    out = []
    for K in plan.K_values:
        brute = rip_constant_bruteforce(A, int(K)).delta_K
        gers = gershgorin_rip_bound(A, int(K)).delta_K
        m_req = (bnd.theorem2_requirement(plan.N, int(K), brute).M_required_exact
                 if 0 < brute < 1 else math.nan)
        out.append({"ensemble": spec.label, "trial": trial, "K": int(K),
                    "delta_bruteforce": brute, "delta_gershgorin": gers,
                    "m_required": m_req})
    return out


def run_rip_audit(plan: ExperimentPlan, threads: int = 1) -> GridResult:
    """Brute-force RIP constants against the Gershgorin bound per instance.

    ``m_required`` is the measurement count (with ``a = 1``) under which
    the achieved ``delta_K`` would be guaranteed.
    """
    if plan.N > 64 or max(plan.K_values) > 3:
        log.info("rip audit beyond N <= 64, K <= 3; the support budget still applies")
    M = plan.M_for(plan.ratios[0])
    tasks = [(plan, e, M, t) for e in plan.ensembles for t in range(plan.trials_per_cell)]
    cells = [row for chunk in run_tasks(_rip_task, tasks, threads) for row in chunk]
    summary = []
    for e in plan.ensembles:
        for K in plan.K_values:
            vals = np.array([c["delta_bruteforce"] for c in cells
                             if c["ensemble"] == e.label and c["K"] == K])
            q = np.quantile(vals, [0.0, 0.25, 0.5, 0.75, 1.0])
            summary.append({"ensemble": e.label, "K": int(K),
                            **{f"q{int(p * 100)}": float(v)
                               for p, v in zip((0.0, 0.25, 0.5, 0.75, 1.0), q)}})
    return GridResult("rip-audit", COLUMNS["rip-audit"], cells, [], _provenance(plan), summary)


RUNNERS = {
    "coherence-sweep": run_coherence_sweep,
    "phase-transition": run_phase_transition,
    "snr-grid": run_snr_grid,
    "bounds-vs-empirical": run_bounds_vs_empirical,
    "rip-audit": run_rip_audit,
}


_TENTHS = [round(0.1 * i, 1) for i in range(1, 11)]

DEFAULT_PLANS = {
    "coherence-sweep": dict(
        experiment_id="coherence-sweep", N=1000, trials_per_cell=100, ratios=_TENTHS,
        ensembles=[{"kind": "multichirp", "nu": 0.03}, "gaussian", "toeplitz"]),
    "phase-transition": dict(
        experiment_id="recovery", N=256, trials_per_cell=100, ratios=_TENTHS,
        K_values=list(range(1, 41)), snr_db=[25.0],
        ensembles=[{"kind": "multichirp", "n_chirps": 5}, {"kind": "multichirp", "n_chirps": 25},
                   "gaussian", "toeplitz"]),
    "snr-grid": dict(
        experiment_id="recovery", N=256, trials_per_cell=100, ratios=[0.4],
        K_values=[1, 2, 3, 4, 5, 10, 15, 20], snr_db=[0.0, 5.0, 10.0, 15.0, 20.0, 25.0, 30.0],
        ensembles=[{"kind": "multichirp", "n_chirps": 5}, {"kind": "multichirp", "n_chirps": 25},
                   "gaussian", "toeplitz"]),
    "bounds-vs-empirical": dict(
        experiment_id="bounds-vs-empirical", N=1000, trials_per_cell=200, ratios=[0.4],
        ensembles=[{"kind": "multichirp", "n_chirps": 30}]),
    "rip-audit": dict(
        experiment_id="rip-audit", N=32, trials_per_cell=20, ratios=[0.5], K_values=[1, 2, 3],
        ensembles=[{"kind": "multichirp", "n_chirps": 8}]),
}


def default_plan_dict(kind: str) -> dict:
    """Plan defaults for a subcommand as a plain, editable dict."""
    if kind not in DEFAULT_PLANS:
        raise ValueError(f"no default plan for {kind!r}")
    return ExperimentPlan.from_dict(DEFAULT_PLANS[kind]).to_dict()
