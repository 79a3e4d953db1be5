"""Repeated syndrome measurement versus its foliated cluster-state version.

Protocol: the data starts in |+>^n, then T rounds, each measuring all Z
checks and then all X checks. The foliated graph has code layers 1..2T: Z
round j lives on layer 2j-1, X round j on layer 2j, and layer 2T holds the
output. Its measured code layers are 1..2T-1.

Error layers share one index set with the foliated outcomes:
``f_code[t-1]`` for code layer t (even t: an X-type data error before Z round
t/2+1; odd t: a Z-type data error before X round (t+1)/2), ``f_z[j-1]`` and
``f_x[j-1]`` flip the round-j check outcomes. All records are parities
relative to the noiseless reference, so noiseless records vanish.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .codes import CssCode
from .gf2 import bits_of
from .graph import Kind, VertexId, layered_edges, vertex_order
from .noise import NoiseConfig, make_rng


@dataclass(frozen=True)
class ErrorLayers:
    f_code: tuple[int, ...]  # 2T-1 masks of length n
    f_x: tuple[int, ...]  # T masks of length m_x
    f_z: tuple[int, ...]  # T masks of length m_z

    @property
    def T(self) -> int:
        return len(self.f_x)

    def __xor__(self, other: ErrorLayers) -> ErrorLayers:
        return ErrorLayers(*(tuple(a ^ b for a, b in zip(u, v)) for u, v in
                             ((self.f_code, other.f_code), (self.f_x, other.f_x), (self.f_z, other.f_z))))


@dataclass(frozen=True)
class RepeatedMeasRecord:
    s_z: tuple[int, ...]
    s_x: tuple[int, ...]
    f: ErrorLayers


@dataclass(frozen=True)
class FoliatedRecord:
    z_code: tuple[int, ...]
    z_x: tuple[int, ...]
    z_z: tuple[int, ...]

    @property
    def T(self) -> int:
        return len(self.z_x)

    def __xor__(self, other: FoliatedRecord) -> FoliatedRecord:
        return FoliatedRecord(tuple(a ^ b for a, b in zip(self.z_code, other.z_code)),
                              tuple(a ^ b for a, b in zip(self.z_x, other.z_x)),
                              tuple(a ^ b for a, b in zip(self.z_z, other.z_z)))


def _check_shapes(T: int, code_layers, xs, zs) -> None:
    if T < 1:
        raise ValueError("T must be at least 1")
    if len(code_layers) != 2 * T - 1 or len(xs) != T or len(zs) != T:
        raise ValueError(f"expected {2 * T - 1} code layers and {T} check rounds per side, got "
                         f"{len(code_layers)}, {len(xs)}, {len(zs)}")


def sample_error_layers(code: CssCode, T: int, p: float, rng: np.random.Generator) -> ErrorLayers:
    def draw(width, count):
        bits = rng.random((count, width)) < p
        return tuple(int(sum(1 << i for i in np.flatnonzero(row))) for row in bits)

    return ErrorLayers(draw(code.n, 2 * T - 1), draw(code.m_x, T), draw(code.m_z, T))


def repeated_from_errors(code: CssCode, T: int, f: ErrorLayers) -> RepeatedMeasRecord:
    """Run the rounds forward, accumulating the data error in the frame."""
    _check_shapes(T, f.f_code, f.f_x, f.f_z)
    ex = ez = 0
    s_z, s_x = [], []
    for j in range(1, T + 1):
        if j >= 2:
            ex ^= f.f_code[2 * j - 3]  # layer 2j-2
        s_z.append(code.h_z.mul_int(ex) ^ f.f_z[j - 1])
        ez ^= f.f_code[2 * j - 2]  # layer 2j-1
        s_x.append(code.h_x.mul_int(ez) ^ f.f_x[j - 1])
    return RepeatedMeasRecord(tuple(s_z), tuple(s_x), f)


def simulate_repeated(code: CssCode, T: int, cfg: NoiseConfig, key: tuple[int, ...] = ()) -> RepeatedMeasRecord:
    rng = make_rng(cfg.seed, key)
    return repeated_from_errors(code, T, sample_error_layers(code, T, cfg.p, rng))


def foliated_from_errors(f: ErrorLayers) -> FoliatedRecord:
    """Frame outcomes of the foliated graph when Z errors sit at the matching vertices."""
    return FoliatedRecord(tuple(f.f_code), tuple(f.f_x), tuple(f.f_z))


def foliate_outcomes(rec: FoliatedRecord, code: CssCode) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """``(s_x, s_z)``: check outcomes with the teleportation byproducts removed.

    s_Z^j = z_Z^j + Syn_Z(sum of z_code on layers 2, 4, .., 2j-2)
    s_X^j = z_X^j + Syn_X(sum of z_code on layers 1, 3, .., 2j-1)
    """
    T = rec.T
    _check_shapes(T, rec.z_code, rec.z_x, rec.z_z)
    s_x, s_z = [], []
    acc_even = acc_odd = 0
    for j in range(1, T + 1):
        if j >= 2:
            acc_even ^= rec.z_code[2 * j - 3]
        s_z.append(rec.z_z[j - 1] ^ code.h_z.mul_int(acc_even))
        acc_odd ^= rec.z_code[2 * j - 2]
        s_x.append(rec.z_x[j - 1] ^ code.h_x.mul_int(acc_odd))
    return tuple(s_x), tuple(s_z)


def foliate_naive(rec: FoliatedRecord, code: CssCode):
    """Same map with the sums written out per round, for cross-checking."""
    T = rec.T
    s_x, s_z = [], []
    for j in range(1, T + 1):
        ev = od = 0
        for i in range(1, j):
            ev ^= rec.z_code[2 * i - 1]
        for i in range(1, j + 1):
            od ^= rec.z_code[2 * i - 2]
        s_z.append(rec.z_z[j - 1] ^ code.h_z.mul_int(ev))
        s_x.append(rec.z_x[j - 1] ^ code.h_x.mul_int(od))
    return tuple(s_x), tuple(s_z)


def recurrence_failures(rec: FoliatedRecord, f: ErrorLayers, code: CssCode) -> list[tuple[str, int]]:
    """Rounds j where ``s^j + f^j = s^{j-1} + f^{j-1} + Syn(f_code)`` fails."""
    s_x, s_z = foliate_outcomes(rec, code)
    T = rec.T
    bad = []
    for j in range(1, T + 1):
        prev_z = s_z[j - 2] ^ f.f_z[j - 2] if j >= 2 else 0
        drive_z = code.h_z.mul_int(f.f_code[2 * j - 3]) if j >= 2 else 0
        if s_z[j - 1] ^ f.f_z[j - 1] != prev_z ^ drive_z:
            bad.append(("Z", j))
        prev_x = s_x[j - 2] ^ f.f_x[j - 2] if j >= 2 else 0
        if s_x[j - 1] ^ f.f_x[j - 1] != prev_x ^ code.h_x.mul_int(f.f_code[2 * j - 2]):
            bad.append(("X", j))
    return bad


def verify_recurrence(rec: FoliatedRecord, f: ErrorLayers, code: CssCode) -> bool:
    return not recurrence_failures(rec, f, code)


# ---------------------------------------------------------------- foliated graph


@dataclass(frozen=True, eq=False)
class FoliationGraph:
    code: CssCode
    T: int
    vertices: tuple[VertexId, ...]
    edges: tuple[tuple[int, int], ...]

    def __post_init__(self):
        object.__setattr__(self, "_index", {v: i for i, v in enumerate(self.vertices)})

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    def index(self, kind: Kind, i: int, t: int) -> int:
        return self._index[VertexId(kind, i, t)]

    @property
    def output_mask(self) -> int:
        t = 2 * self.T
        return sum(1 << self.index(Kind.CODE, i, t) for i in range(self.code.n))

    @property
    def measured_mask(self) -> int:
        return ((1 << self.n_vertices) - 1) & ~self.output_mask

    def record_from_mask(self, outcomes: int) -> FoliatedRecord:
        code, T = self.code, self.T

        def layer(kind, count, t):
            return sum(((outcomes >> self.index(kind, i, t)) & 1) << i for i in range(count))

        return FoliatedRecord(
            tuple(layer(Kind.CODE, code.n, t) for t in range(1, 2 * T)),
            tuple(layer(Kind.XCHECK, code.m_x, 2 * j) for j in range(1, T + 1)),
            tuple(layer(Kind.ZCHECK, code.m_z, 2 * j - 1) for j in range(1, T + 1)),
        )

    def mask_from_errors(self, f: ErrorLayers) -> int:
        T = self.T
        m = 0
        for t in range(1, 2 * T):
            for i in bits_of(f.f_code[t - 1]):
                m |= 1 << self.index(Kind.CODE, i, t)
        for j in range(1, T + 1):
            for c in bits_of(f.f_x[j - 1]):
                m |= 1 << self.index(Kind.XCHECK, c, 2 * j)
            for c in bits_of(f.f_z[j - 1]):
                m |= 1 << self.index(Kind.ZCHECK, c, 2 * j - 1)
        return m


def foliation_graph(code: CssCode, T: int) -> FoliationGraph:
    if T < 1:
        raise ValueError("T must be at least 1")
    layers = range(1, 2 * T + 1)
    vertices = vertex_order(code, T, layers)
    index = {v: i for i, v in enumerate(vertices)}
    return FoliationGraph(code, T, tuple(vertices), tuple(layered_edges(code, index, layers)))


def single_error_locations(code: CssCode, T: int):
    """Every ErrorLayers with exactly one bit set."""
    zero = ErrorLayers((0,) * (2 * T - 1), (0,) * T, (0,) * T)
    for t in range(2 * T - 1):
        for i in range(code.n):
            fc = list(zero.f_code)
            fc[t] = 1 << i
            yield ErrorLayers(tuple(fc), zero.f_x, zero.f_z)
    for j in range(T):
        for c in range(code.m_x):
            fx = list(zero.f_x)
            fx[j] = 1 << c
            yield ErrorLayers(zero.f_code, tuple(fx), zero.f_z)
        for c in range(code.m_z):
            fz = list(zero.f_z)
            fz[j] = 1 << c
            yield ErrorLayers(zero.f_code, zero.f_x, tuple(fz))


@dataclass(frozen=True)
class MbqcReport:
    trials: int
    recurrence_failures: int
    translation_mismatches: int
    linearity_failures: int

    @property
    def ok(self) -> bool:
        return not (self.recurrence_failures or self.translation_mismatches or self.linearity_failures)

    def to_json(self) -> dict:
        return {"trials": self.trials, "recurrence_failures": self.recurrence_failures,
                "translation_mismatches": self.translation_mismatches,
                "linearity_failures": self.linearity_failures, "ok": self.ok}


def mbqc_check(code: CssCode, T: int, trials: int, seed: int, p: float = 0.1) -> MbqcReport:
    """Random foliated runs: recurrence, agreement with the repeated protocol, linearity."""
    rec_bad = trans_bad = lin_bad = 0
    for k in range(trials):
        rng = make_rng(seed, (k,))
        f = sample_error_layers(code, T, p, rng)
        g = sample_error_layers(code, T, p, rng)
        rec = foliated_from_errors(f)
        rec_bad += not verify_recurrence(rec, f, code)
        rep = repeated_from_errors(code, T, f)
        trans_bad += foliate_outcomes(rec, code) != (rep.s_x, rep.s_z)
        a, b = foliate_outcomes(rec, code), foliate_outcomes(foliated_from_errors(g), code)
        ab = foliate_outcomes(rec ^ foliated_from_errors(g), code)
        lin_bad += ab != (tuple(x ^ y for x, y in zip(a[0], b[0])), tuple(x ^ y for x, y in zip(a[1], b[1])))
    return MbqcReport(trials, rec_bad, trans_bad, lin_bad)


def tableau_round_trip(code: CssCode, T: int, seed: int = 0):
    """For each single error location, run the foliated graph through the tableau oracle.

    Returns a list of ``(location, ok)``. A location is ok when the real
    foliated X syndromes equal the repeated protocol's and consecutive Z
    syndrome differences agree; the first Z round carries a random gauge.
    """
    from .tableau import graph_state_tableau

    fg = foliation_graph(code, T)
    base = graph_state_tableau(fg.n_vertices, fg.edges)
    measured = bits_of(fg.measured_mask)
    results = []
    zero = ErrorLayers((0,) * (2 * T - 1), (0,) * T, (0,) * T)
    for k, f in enumerate([zero] + list(single_error_locations(code, T))):
        tab = base.copy()
        tab.apply_pauli(0, fg.mask_from_errors(f))
        rng = make_rng(seed, (k,))
        out = 0
        for v in measured:
            bit, _ = tab.measure_x(v, rng)
            out |= bit << v
        s_x, s_z = foliate_outcomes(fg.record_from_mask(out), code)
        rep = repeated_from_errors(code, T, f)
        ok = s_x == rep.s_x and all(
            s_z[j] ^ s_z[j - 1] == rep.s_z[j] ^ rep.s_z[j - 1] for j in range(1, T))
        results.append((f, ok))
    return results


__all__ = ["ErrorLayers", "RepeatedMeasRecord", "FoliatedRecord", "sample_error_layers", "repeated_from_errors",
           "simulate_repeated", "foliated_from_errors", "foliate_outcomes", "foliate_naive", "recurrence_failures",
           "verify_recurrence", "FoliationGraph", "foliation_graph", "single_error_locations", "MbqcReport",
           "mbqc_check", "tableau_round_trip"]
