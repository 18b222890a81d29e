"""Command-line front end.

Usage::

    chirplab <subcommand> [--config plan.json] [--set key=value ...] [--out DIR]
                          [--seed U64] [--threads N] [-v | -vv]

Exit status is 0 on success, 1 for configuration errors and 2 for
failures while running or writing results.
"""
from __future__ import annotations

import argparse
import copy
import dataclasses
import json
import logging
import os
import sys
import time
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import __version__
from . import bounds as bnd
from .csvio import emit_csv, write_manifest, write_rows
from .experiments import (RUNNERS, EnsembleSpec, ExperimentPlan, build_id, build_matrix,
                          default_plan_dict)

log = logging.getLogger("chirplab")

EXIT_OK, EXIT_CONFIG, EXIT_RUNTIME = 0, 1, 2
THREADS_ENV = "CHIRP_LAB_THREADS"
SUBCOMMANDS = ("coherence-sweep", "phase-transition", "snr-grid", "rip-audit", "bounds",
               "bounds-vs-empirical", "matrix-dump")


class ConfigError(Exception):
    pass


@dataclasses.dataclass(frozen=True)
class BoundsConfig:
    N: int = 1000
    M: int = 400
    N_c: float = 30.0
    K: int = 1
    sigma: float = 1.0
    x_min: float = 1.0
    nu: float = 0.0
    # optional RIP requirement for this delta
    delta: Optional[float] = None
    constants: dict = dataclasses.field(default_factory=dict)

    def __post_init__(self):
        if not 1 <= self.M <= self.N:
            raise ValueError("need 1 <= M <= N")
        if not 1 <= self.N_c <= self.N:
            raise ValueError("need 1 <= N_c <= N")
        if self.K < 0:
            raise ValueError("K must be >= 0")
        bnd.UniversalConstants(**self.constants)


@dataclasses.dataclass(frozen=True)
class MatrixDumpConfig:
    N: int = 64
    M: int = 26
    ensemble: object = dataclasses.field(default_factory=lambda: {"kind": "multichirp",
                                                                  "n_chirps": 5})
    master_seed: int = 0
    experiment_id: str = "matrix-dump"
    trial: int = 0
    p: Optional[int] = None

    def __post_init__(self):
        if not 1 <= self.M <= self.N:
            raise ValueError("need 1 <= M <= N")
        EnsembleSpec.from_dict(self.ensemble)


def _default_config(sub: str) -> dict:
    if sub == "bounds":
        return dataclasses.asdict(BoundsConfig())
    if sub == "matrix-dump":
        return dataclasses.asdict(MatrixDumpConfig())
    return default_plan_dict(sub)


def _parse_value(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def apply_override(cfg: dict, assignment: str) -> None:
    """Apply ``a.b.0.c=value`` in place; the value is parsed as JSON when possible."""
    if "=" not in assignment:
        raise ConfigError(f"override {assignment!r} is not key=value")
    key, text = assignment.split("=", 1)
    parts = key.strip().split(".")
    node = cfg
    for i, part in enumerate(parts):
        last = i == len(parts) - 1
        if isinstance(node, list):
            try:
                idx = int(part)
                node[idx]
            except (ValueError, IndexError):
                raise ConfigError(f"override {key!r}: bad list index {part!r}") from None
            if last:
                node[idx] = _parse_value(text)
            else:
                node = node[idx]
        elif isinstance(node, dict):
            if part not in node:
                raise ConfigError(f"override {key!r}: unknown key {part!r}")
            if last:
                node[part] = _parse_value(text)
            else:
                node = node[part]
        else:
            raise ConfigError(f"override {key!r}: {part!r} is not a container")


def load_config(sub: str, config_path: Optional[str], overrides: Sequence[str],
                seed: Optional[int]) -> dict:
    cfg = _default_config(sub)
    if config_path is not None:
        path = Path(config_path)
        if not path.is_file():
            raise ConfigError(f"config file not found: {path}")
        try:
            loaded = json.loads(path.read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as err:
            raise ConfigError(f"cannot parse {path}: {err}") from None
        if not isinstance(loaded, dict):
            raise ConfigError(f"{path}: top level must be a JSON object")
        unknown = set(loaded) - set(cfg)
        if unknown:
            raise ConfigError(f"{path}: unknown keys {sorted(unknown)}")
        cfg.update(loaded)
    cfg = copy.deepcopy(cfg)
    for ov in overrides:
        apply_override(cfg, ov)
    if seed is not None:
        if sub == "bounds":
            raise ConfigError("--seed has no meaning for the bounds subcommand")
        cfg["master_seed"] = seed
    return cfg


def _build(sub: str, cfg: dict):
    try:
        if sub == "bounds":
            return BoundsConfig(**cfg)
        if sub == "matrix-dump":
            return MatrixDumpConfig(**cfg)
        return ExperimentPlan.from_dict(cfg)
    except (TypeError, ValueError) as err:
        raise ConfigError(str(err)) from None


def _threads(arg: Optional[int]) -> int:
    if arg is not None:
        value = arg
    else:
        raw = os.environ.get(THREADS_ENV)
        if raw is None:
            return 1
        try:
            value = int(raw)
        except ValueError:
            raise ConfigError(f"{THREADS_ENV}={raw!r} is not an integer") from None
    if value < 1:
        raise ConfigError("thread count must be >= 1")
    return value


def _u64(text: str) -> int:
    value = int(text, 0)
    if not 0 <= value < 2 ** 64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="chirplab", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="subcommand", required=True, metavar="SUBCOMMAND")
    for name in SUBCOMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", help="JSON plan file; omitted keys take defaults")
        p.add_argument("--set", dest="overrides", action="append", default=[],
                       metavar="KEY=VALUE", help="override a config key (dotted path)")
        p.add_argument("--out", default="results", help="output directory")
        p.add_argument("--seed", type=_u64, help="master seed, overrides the config")
        p.add_argument("--threads", type=int, help=f"worker processes (env {THREADS_ENV})")
        p.add_argument("-v", "--verbose", action="count", default=0)
    return parser


def _bounds_rows(cfg: BoundsConfig) -> tuple[list, list]:
    consts = bnd.UniversalConstants(**cfg.constants)
    rep = bnd.theorem1_report(cfg.N, cfg.M, cfg.N_c, cfg.K, cfg.sigma, cfg.x_min, consts,
                              nu=cfg.nu)
    rows = list(rep.rows())
    if cfg.delta is not None:
        req = bnd.theorem2_requirement(cfg.N, max(cfg.K, 1), cfg.delta, consts.a, cfg.N_c,
                                       cfg.M, consts.epsilon, consts.d)
        rows += [("rip_delta", cfg.delta), ("rip_M_required", req.M_required),
                 ("rip_M_required_exact", req.M_required_exact), ("rip_u3", req.u3),
                 ("rip_p5", req.p5.clamped), ("rip_p6", req.p6.clamped)]
    return rows, rep.notes


def _run(sub: str, obj, out: Path, threads: int) -> dict:
    """Run one subcommand and write its CSV; returns manifest extras."""
    if sub == "bounds":
        rows, notes = _bounds_rows(obj)
        path = write_rows(out / "bounds.csv", ("quantity", "value"), rows)
        return {"outputs": [path.name], "notes": notes}
    if sub == "matrix-dump":
        spec = EnsembleSpec.from_dict(obj.ensemble)
        A = np.asarray(build_matrix(spec, obj.M, obj.N, obj.master_seed, obj.experiment_id,
                                    obj.trial, obj.p))
        rr, cc = np.indices(A.shape)
        rows = zip(rr.ravel().tolist(), cc.ravel().tolist(), A.real.ravel().tolist(),
                   A.imag.ravel().tolist())
        path = write_rows(out / "matrix.csv", ("row", "col", "re", "im"), rows)
        return {"outputs": [path.name], "ensemble": spec.label}
    result = RUNNERS[sub](obj, threads=threads)
    path = emit_csv(result, out / f"{sub}.csv")
    extra = {"outputs": [path.name]}
    if result.summary:
        extra["summary"] = result.summary
    return extra


def parse_and_dispatch(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors; those are configuration errors here
        return EXIT_OK if exc.code == 0 else EXIT_CONFIG
    level = {0: logging.WARNING, 1: logging.INFO}.get(args.verbose, logging.DEBUG)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s",
                        stream=sys.stderr)
    sub = args.subcommand
    try:
        cfg = load_config(sub, args.config, args.overrides, args.seed)
        obj = _build(sub, cfg)
        threads = _threads(args.threads)
    except ConfigError as err:
        print(f"chirplab: config error: {err}", file=sys.stderr)
        return EXIT_CONFIG
    out = Path(args.out)
    start = time.perf_counter()
    try:
        out.mkdir(parents=True, exist_ok=True)
        extra = _run(sub, obj, out, threads)
        echo = obj.to_dict() if isinstance(obj, ExperimentPlan) else dataclasses.asdict(obj)
        manifest = {"subcommand": sub, "config": echo,
                    "master_seed": cfg.get("master_seed"), "build_id": build_id(),
                    "version": __version__, "threads": threads,
                    "wall_time_s": time.perf_counter() - start, **extra}
        write_manifest(out / "run_manifest.json", manifest)
    except Exception as err:   # noqa: BLE001 - any runtime failure maps to exit 2
        log.debug("run failed", exc_info=True)
        print(f"chirplab: {sub} failed: {type(err).__name__}: {err}", file=sys.stderr)
        return EXIT_RUNTIME
    log.info("%s finished in %.2fs; results in %s", sub, manifest["wall_time_s"], out)
    return EXIT_OK


def main() -> None:
    sys.exit(parse_and_dispatch())


if __name__ == "__main__":
    main()
