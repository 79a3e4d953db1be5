"""Monte Carlo sweeps over physical error rates, with reproducible output files.

Trial ``i`` at the ``k``-th smallest p draws from
``SeedSequence(seed, spawn_key=(k, i))``. Workers return integer counters
only, so the result does not depend on how trials are split across
processes.
"""

from __future__ import annotations

import csv
import io
import json
import os
import tempfile
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from .codes import CssCode, distance_bruteforce
from .decoder import EXACT, MODES, Pipeline, bell_pipeline
from .ghz import ghz_layers, ghz_pipeline
from .graph import build_atg
from .noise import make_rng

COLUMNS = ("code", "n", "k", "d", "ell", "T", "pattern", "p", "trials", "fail_x", "fail_z", "cc_x_viol",
           "cc_z_viol", "mean_resid_w", "max_resid_w", "mean_cluster", "max_cluster", "seed", "mode", "secs")

CHUNK = 250


class ClusterWeightViolation(AssertionError):
    """An exact-mode trial broke the cluster-weight inequality."""


def parse_pattern(text: str) -> tuple[str, int]:
    """``"bell"`` or ``"ghz(m)"`` / ``"ghz:m"`` into ``(name, m)``."""
    t = text.strip().lower()
    if t == "bell":
        return "bell", 2
    for sep in ("(", ":"):
        if t.startswith("ghz" + sep):
            body = t[4:].rstrip(")")
            try:
                m = int(body)
            except ValueError:
                break
            return "ghz", m
    raise ValueError(f"pattern must be 'bell' or 'ghz(m)', got {text!r}")


def pattern_label(name: str, m: int) -> str:
    return "bell" if name == "bell" else f"ghz({m})"


@dataclass(frozen=True)
class SweepConfig:
    code: CssCode
    T: int
    p_list: tuple[float, ...]
    trials: int
    seed: int = 0
    pattern: str = "bell"
    m: int = 2
    mode: str = EXACT
    out: Path | None = None
    fmt: str = "csv"
    timing: bool = False
    threads: int | None = None

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be at least 1")
        if not self.p_list:
            raise ValueError("at least one p value is required")
        for p in self.p_list:
            if not 0.0 <= p <= 1.0:
                raise ValueError(f"p = {p} is outside [0, 1]")
        if self.mode not in MODES:
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.fmt not in ("csv", "json"):
            raise ValueError(f"unknown format {self.fmt!r}")
        if self.pattern not in ("bell", "ghz"):
            raise ValueError(f"unknown pattern {self.pattern!r}")
        if self.T < 1:
            raise ValueError("T must be at least 1")


@dataclass
class Counters:
    trials: int = 0
    fail_x: int = 0
    fail_z: int = 0
    cc_x_viol: int = 0
    cc_z_viol: int = 0
    resid_sum: int = 0
    resid_max: int = 0
    cluster_sum: int = 0
    cluster_max: int = 0
    cluster_weight_viol: int = 0
    first_violation: tuple = field(default=())

    def merge(self, other: Counters) -> None:
        for name in ("trials", "fail_x", "fail_z", "cc_x_viol", "cc_z_viol", "resid_sum", "cluster_sum",
                     "cluster_weight_viol"):
            setattr(self, name, getattr(self, name) + getattr(other, name))
        self.resid_max = max(self.resid_max, other.resid_max)
        self.cluster_max = max(self.cluster_max, other.cluster_max)
        if other.first_violation and (not self.first_violation or other.first_violation < self.first_violation):
            self.first_violation = other.first_violation


@dataclass(frozen=True)
class SweepRow:
    p: float
    counters: Counters
    secs: float

    def as_dict(self, cfg: SweepConfig, d) -> dict:
        c = self.counters
        return {
            "code": cfg.code.name or "code",
            "n": cfg.code.n,
            "k": cfg.code.k,
            "d": "" if d is None else d,
            "ell": cfg.code.ell,
            "T": cfg.T,
            "pattern": pattern_label(cfg.pattern, cfg.m),
            "p": repr(float(self.p)),
            "trials": c.trials,
            "fail_x": c.fail_x,
            "fail_z": c.fail_z,
            "cc_x_viol": c.cc_x_viol,
            "cc_z_viol": c.cc_z_viol,
            "mean_resid_w": f"{c.resid_sum / c.trials:.6f}",
            "max_resid_w": c.resid_max,
            "mean_cluster": f"{c.cluster_sum / c.trials:.6f}",
            "max_cluster": c.cluster_max,
            "seed": cfg.seed,
            "mode": cfg.mode,
            "secs": f"{self.secs:.3f}",
        }


@dataclass(frozen=True)
class SweepResult:
    config: SweepConfig
    rows: tuple[SweepRow, ...]
    distance: int | None

    def records(self) -> list[dict]:
        return [r.as_dict(self.config, self.distance) for r in self.rows]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=COLUMNS, lineterminator="\n")
        w.writeheader()
        for rec in self.records():
            w.writerow(rec)
        return buf.getvalue()

    def to_json(self) -> str:
        return json.dumps({"columns": list(COLUMNS), "rows": self.records()}, indent=2, sort_keys=False) + "\n"


def build_pipeline(code: CssCode, T: int, pattern: str, m: int, mode: str) -> Pipeline:
    g = build_atg(code, T)
    if pattern == "bell":
        return bell_pipeline(g, mode)
    return ghz_pipeline(g, ghz_layers(T, m), mode)


_CACHE: dict = {}


def _pipeline_cached(key, code, T, pattern, m, mode) -> Pipeline:
    pl = _CACHE.get(key)
    if pl is None:
        _CACHE.clear()
        pl = _CACHE[key] = build_pipeline(code, T, pattern, m, mode)
    return pl


def run_chunk(pl: Pipeline, seed: int, p_index: int, p: float, start: int, stop: int) -> Counters:
    c = Counters()
    for i in range(start, stop):
        out = pl.run(p, make_rng(seed, (p_index, i)))
        c.trials += 1
        c.fail_x += any(out.rep.logical_x_flags)
        c.fail_z += any(out.rep.logical_z_flags)
        c.cc_x_viol += not out.cc_x_ok
        c.cc_z_viol += not out.cc_z_ok
        c.resid_sum += out.residual_weight
        c.resid_max = max(c.resid_max, out.residual_weight)
        c.cluster_sum += out.max_cluster
        c.cluster_max = max(c.cluster_max, out.max_cluster)
        if out.cluster_weight_ok is False:
            c.cluster_weight_viol += 1
            if not c.first_violation:
                c.first_violation = (p_index, i)
    return c


def _worker(args) -> tuple[int, Counters, float]:
    key, code, T, pattern, m, mode, seed, p_index, p, start, stop = args
    pl = _pipeline_cached(key, code, T, pattern, m, mode)
    t0 = time.perf_counter()
    c = run_chunk(pl, seed, p_index, p, start, stop)
    return p_index, c, time.perf_counter() - t0


def thread_count(requested: int | None = None) -> int:
    if requested is not None:
        return max(1, requested)
    env = os.environ.get("ATG_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise ValueError(f"ATG_THREADS must be an integer, got {env!r}") from None
    return os.cpu_count() or 1


def run_sweep(cfg: SweepConfig) -> SweepResult:
    if cfg.pattern == "ghz":
        ghz_layers(cfg.T, cfg.m)  # rejects infeasible patterns before any work
    pl = build_pipeline(cfg.code, cfg.T, cfg.pattern, cfg.m, cfg.mode)
    p_sorted = sorted(set(float(p) for p in cfg.p_list))
    jobs = []
    key = (json.dumps(cfg.code.to_json(), sort_keys=True), cfg.T, cfg.pattern, cfg.m, cfg.mode)
    for k, p in enumerate(p_sorted):
        for start in range(0, cfg.trials, CHUNK):
            jobs.append((key, cfg.code, cfg.T, cfg.pattern, cfg.m, cfg.mode, cfg.seed, k, p,
                         start, min(cfg.trials, start + CHUNK)))
    totals = [Counters() for _ in p_sorted]
    secs = [0.0] * len(p_sorted)
    threads = min(thread_count(cfg.threads), len(jobs))
    if threads <= 1:
        _CACHE.clear()
        _CACHE[key] = pl
        results = map(_worker, jobs)
        for k, c, dt in results:
            totals[k].merge(c)
            secs[k] += dt
    else:
        with ProcessPoolExecutor(max_workers=threads) as ex:
            for k, c, dt in ex.map(_worker, jobs):
                totals[k].merge(c)
                secs[k] += dt
    for k, c in enumerate(totals):
        if c.cluster_weight_viol and cfg.mode == EXACT:
            raise ClusterWeightViolation(f"cluster-weight inequality failed at p={p_sorted[k]}, "
                                   f"trial key {c.first_violation}")
    d = cfg.code.d
    if d is None and cfg.code.n <= 20:
        d = distance_bruteforce(cfg.code)
    rows = tuple(SweepRow(p, c, s if cfg.timing else 0.0) for p, c, s in zip(p_sorted, totals, secs))
    result = SweepResult(cfg, rows, d)
    if cfg.out is not None:
        write_atomic(Path(cfg.out), result.to_csv() if cfg.fmt == "csv" else result.to_json())
    return result


def write_atomic(path: Path, text: str) -> None:
    path = Path(path)
    directory = path.parent if str(path.parent) else Path(".")
    if not directory.is_dir():
        raise FileNotFoundError(f"output directory {directory} does not exist")
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", suffix=".tmp", dir=directory)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


__all__ = ["COLUMNS", "ClusterWeightViolation", "parse_pattern", "pattern_label", "SweepConfig", "Counters",
           "SweepRow", "SweepResult", "build_pipeline", "run_chunk", "thread_count", "run_sweep", "write_atomic"]
