"""Effective noise: independent Z flips on measured qubits.

Randomness comes from numpy's PCG64 seeded through ``SeedSequence``. A trial
stream is ``SeedSequence(master_seed, spawn_key=key)`` where ``key`` is a
tuple of non-negative integers (for sweeps: ``(p_index, trial_index)``), so
every trial is reproducible on its own, whatever the worker schedule.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .gf2 import BitVector, bits_of
from .graph import AtgGraph, Kind, MeasurementPattern


@dataclass(frozen=True)
class NoiseConfig:
    p: float
    seed: int = 0
    model: str = "iid_z"

    def __post_init__(self):
        if not 0.0 <= self.p <= 1.0:
            raise ValueError(f"p must lie in [0, 1], got {self.p}")
        if self.model != "iid_z":
            raise ValueError(f"unknown noise model {self.model!r}")


def make_rng(seed: int, key: tuple[int, ...] = ()) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=tuple(key))))


@dataclass(frozen=True)
class ErrorPattern:
    """Z-error support as a mask over ATG vertex indices."""

    mask: int

    @property
    def weight(self) -> int:
        return self.mask.bit_count()

    def layer_vector(self, g: AtgGraph, kind: Kind, t: int) -> BitVector:
        if kind == Kind.CODE:
            base, size = g.code_layer_base(t), g.code.n
        else:
            base, size = g.check_layer_base(t), (g.code.m_z if t % 2 else g.code.m_x)
        return BitVector(size, (self.mask >> base) & ((1 << size) - 1))

    def layers(self, g: AtgGraph) -> dict:
        """``{"P": {t: vec}, "B": {t: vec}}`` with P over bulk code layers 2..2T, B over all check layers."""
        return {
            "P": {t: self.layer_vector(g, Kind.CODE, t) for t in range(2, 2 * g.T + 1)},
            "B": {t: self.layer_vector(g, Kind.ZCHECK if t % 2 else Kind.XCHECK, t)
                  for t in range(1, 2 * g.T + 2)},
        }


def sample_mask(measured: np.ndarray, p: float, rng: np.random.Generator) -> int:
    if p <= 0.0 or measured.size == 0:
        # draw anyway so p does not change how much of the stream is consumed
        rng.random(measured.size)
        return 0
    hits = measured[rng.random(measured.size) < p]
    m = 0
    for i in hits.tolist():
        m |= 1 << i
    return m


def measured_indices(pat: MeasurementPattern) -> np.ndarray:
    return np.array(bits_of(pat.measured_mask), dtype=np.int64)


def sample_error(g: AtgGraph, pat: MeasurementPattern, cfg: NoiseConfig,
                 rng: np.random.Generator | None = None) -> ErrorPattern:
    if rng is None:
        rng = make_rng(cfg.seed)
    return ErrorPattern(sample_mask(measured_indices(pat), cfg.p, rng))


@dataclass(frozen=True)
class SubsetFrequency:
    subset: tuple[int, ...]
    frequency: float
    bound: float
    band: float
    flagged: bool


def verify_ls_bound(g: AtgGraph, pat: MeasurementPattern, cfg: NoiseConfig, subsets, samples: int) -> list[SubsetFrequency]:
    """Empirical ``P[S within supp(E)]`` against ``p**|S|`` with a 4-sigma binomial band."""
    subsets = [tuple(sorted(s)) for s in subsets]
    if not subsets:
        raise ValueError("at least one subset is required")
    rng = make_rng(cfg.seed)
    idx = measured_indices(pat)
    masks = [sum(1 << i for i in s) for s in subsets]
    counts = [0] * len(subsets)
    for _ in range(samples):
        e = sample_mask(idx, cfg.p, rng)
        for j, m in enumerate(masks):
            if e & m == m:
                counts[j] += 1
    out = []
    for s, c in zip(subsets, counts):
        bound = cfg.p ** len(s)
        band = 4.0 * math.sqrt(max(bound * (1.0 - bound), 0.0) / samples) + 1e-12
        freq = c / samples
        out.append(SubsetFrequency(s, freq, bound, band, freq > bound + band))
    return out
