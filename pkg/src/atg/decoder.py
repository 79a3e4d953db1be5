"""Frame-level decoding pipeline.

In the frame picture every measured X outcome is recorded relative to its
noiseless value, so the parity of an outcome string over a pure-X
stabilizer support alpha is just ``|supp(eta) & alpha| mod 2``.

Exact decoding exploits the layered structure of the meta-checks. The Z
meta-checks couple Z-check layers t-1 and t+1 through code layer t (t even),
and the X meta-checks couple X-check layers t-1 and t+1 through code layer t
(t odd). The problem therefore splits into two chains, and a Viterbi pass
over the check layers (2**m states each) with coset-leader tables for the
code layers yields the global minimum. Costs are compared as integers
``weight * 2**N + sum(2**v for v in beta)``, so ties go to the inferred error
with the smallest integer value, i.e. the one avoiding high vertex indices.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .clusters import ClusterReport, SyndromeAdjGraph, build_sag, check_cluster_weight, components, mark_mismatch
from .codes import LogicalBasis, logical_basis
from .gf2 import BitMatrix, BitVector, bits_of, coset_leaders, nullspace_basis, parity, solve
from .graph import AtgGraph, MeasurementPattern, bell_pattern
from .noise import NoiseConfig, make_rng, measured_indices, sample_mask
from .stabilizers import BND_X, BND_Z, LOGICAL_X, LOGICAL_ZZ, META_X, META_Z, bell_stabilizers, meta_check

EXACT = "exact"
HEURISTIC = "heuristic"
MODES = (EXACT, HEURISTIC)

# check layers above this many checks make the Viterbi table too large
MAX_CHAIN_CHECKS = 10


class DecodeError(RuntimeError):
    """Syndrome inconsistent with every error pattern, or an infeasible exact decode."""


class ConsistencyError(AssertionError):
    """An internal invariant of the pipeline failed."""


@dataclass(frozen=True)
class SyndromeSet:
    meta: tuple[int, ...]
    corrected: tuple[int, ...] = ()


@dataclass(frozen=True)
class DecodeResult:
    beta: int
    weight: int
    optimal: bool


@dataclass(frozen=True)
class RepResult:
    rep_x: int  # Z-type support on the unmeasured layers
    rep_z: int  # X-type support on the unmeasured layers
    logical_x_flags: tuple[int, ...]
    logical_z_flags: tuple[int, ...]

    @property
    def failed(self) -> bool:
        return any(self.logical_x_flags) or any(self.logical_z_flags)


@dataclass(frozen=True)
class TrialOutcome:
    success: bool
    cc_x_ok: bool
    cc_z_ok: bool
    residual_weight: int
    eta_weight: int
    beta_weight: int
    optimal: bool
    cluster_weight_ok: bool | None
    rep: RepResult
    clusters_x: ClusterReport
    clusters_z: ClusterReport
    eta: int = field(default=0, repr=False)
    beta: int = field(default=0, repr=False)

    @property
    def max_cluster(self) -> int:
        return max(self.clusters_x.max_size, self.clusters_z.max_size)

    @property
    def n_clusters(self) -> int:
        return len(self.clusters_x.components) + len(self.clusters_z.components)

    def to_json(self, g: AtgGraph | None = None) -> dict:
        def verts(mask):
            if g is None:
                return bits_of(mask)
            return [g.vertices[v].to_json() for v in bits_of(mask)]

        return {
            "success": self.success,
            "cc_x_ok": self.cc_x_ok,
            "cc_z_ok": self.cc_z_ok,
            "residual_weight": self.residual_weight,
            "eta_weight": self.eta_weight,
            "beta_weight": self.beta_weight,
            "optimal": self.optimal,
            "cluster_weight_ok": self.cluster_weight_ok,
            "logical_x_flags": list(self.rep.logical_x_flags),
            "logical_z_flags": list(self.rep.logical_z_flags),
            "eta": verts(self.eta),
            "beta": verts(self.beta),
            "rep_x": verts(self.rep.rep_x),
            "rep_z": verts(self.rep.rep_z),
            "clusters_x": self.clusters_x.to_json(),
            "clusters_z": self.clusters_z.to_json(),
        }


def extract_meta_syndromes(s0, eta: int) -> tuple[int, ...]:
    return tuple(parity(e.bulk_x & eta) for e in s0)


def corrected_syndromes(s1, s_or_eta: int, beta: int) -> tuple[int, ...]:
    return tuple(parity(e.bulk_x & s_or_eta) ^ parity(e.bulk_x & beta) for e in s1)


def residual_syndrome(s1, eta: int, beta: int) -> tuple[int, ...]:
    d = eta ^ beta
    return tuple(parity(e.bulk_x & d) for e in s1)


# ---------------------------------------------------------------- exact decoding


@dataclass(frozen=True)
class _Gap:
    layer: int
    base: int  # vertex index of code qubit 0 on this layer
    constrained: bool
    meta_pos: tuple[int, ...]  # S0 positions of the meta-checks c = 0..m-1


@dataclass(frozen=True)
class _Chain:
    check_layers: tuple[int, ...]
    check_bases: tuple[int, ...]
    gaps: tuple[_Gap, ...]
    m: int
    side: str  # parity-check matrix used on the gaps


def _chains(g: AtgGraph, s0, measured_mask: int) -> list[_Chain]:
    """Match S0 against the layered meta-check structure; raise if it does not fit."""
    code = g.code
    top = g.n_layers
    pos: dict[tuple[int, int], int] = {}
    for k, e in enumerate(s0):
        if e.kind not in (META_Z, META_X):
            raise DecodeError(f"S0 element {e.label()} is not a meta-check")
        want = meta_check(g, e.index, e.layer)
        if want.bulk_x != e.bulk_x:
            raise DecodeError(f"S0 element {e.label()} is not a standard meta-check")
        pos[e.layer, e.index] = k
    covered = set(pos.values())
    chains = []
    for first, side, m in ((1, "Z", code.m_z), (2, "X", code.m_x)):
        layers = tuple(range(first, top + 1, 2))
        gaps = []
        for a, b in zip(layers, layers[1:]):
            t = a + 1
            present = [(t, c) in pos for c in range(m)]
            if any(present) and not all(present):
                raise DecodeError(f"layer {t} carries only some of its meta-checks")
            base = g.code_layer_base(t)
            gaps.append(_Gap(t, base, all(present) and m > 0,
                             tuple(pos[t, c] for c in range(m)) if all(present) else ()))
        chains.append(_Chain(layers, tuple(g.check_layer_base(t) for t in layers), tuple(gaps), m, side))
    if len(covered) != len(s0):
        raise DecodeError("duplicate meta-checks in S0")
    # every vertex the chains may flip has to be measured
    for ch in chains:
        for t in ch.check_layers:
            if g.layer_check_mask(t) & ~measured_mask:
                raise DecodeError(f"check layer {t} is not fully measured")
        for gap in ch.gaps:
            if gap.constrained and g.layer_code_mask(gap.layer) & ~measured_mask:
                raise DecodeError(f"code layer {gap.layer} is not fully measured")
    return chains


class BulkDecoder:
    """Minimum-weight inference of the bulk Z error from meta syndromes."""

    def __init__(self, g: AtgGraph, s0, measured_mask: int | None = None, exact_cap: int = MAX_CHAIN_CHECKS):
        self.g = g
        self.s0 = list(s0)
        self.measured_mask = g.bulk_mask if measured_mask is None else measured_mask
        self._big = 1 << g.n_vertices
        self._tables = {}
        self._chains = None
        self._chain_error = None
        try:
            chains = _chains(g, self.s0, self.measured_mask)
            if any(ch.m > exact_cap for ch in chains):
                raise DecodeError(f"a check layer has more than {exact_cap} checks")
            for side, h in (("X", g.code.h_x), ("Z", g.code.h_z)):
                leader, weight = coset_leaders(h)
                if (weight < 0).any():
                    raise DecodeError(f"H_{side} does not reach every syndrome")
                self._tables[side] = (leader.tolist(), weight.tolist())
            self._chains = chains
        except (DecodeError, ValueError) as exc:
            self._chain_error = str(exc)
        self._heur = None

    @property
    def exact_available(self) -> bool:
        return self._chains is not None

    def decode(self, meta, mode: str = EXACT) -> DecodeResult:
        meta = tuple(meta)
        if len(meta) != len(self.s0):
            raise ValueError(f"expected {len(self.s0)} meta bits, got {len(meta)}")
        if mode == EXACT:
            if self._chains is None:
                raise DecodeError(f"exact decoding unavailable: {self._chain_error}")
            beta = 0
            if any(meta):  # a trivial syndrome is explained by beta = 0, the unique optimum
                for ch in self._chains:
                    beta |= self._viterbi(ch, meta)
            res = DecodeResult(beta, beta.bit_count(), True)
        elif mode == HEURISTIC:
            res = self._heuristic(meta)
        else:
            raise ValueError(f"unknown mode {mode!r}")
        if extract_meta_syndromes(self.s0, res.beta) != meta:
            raise ConsistencyError("inferred error does not reproduce the meta syndromes")
        return res

    def _viterbi(self, ch: _Chain, meta) -> int:
        m, big = ch.m, self._big
        states = range(1 << m)
        if m == 0:
            return 0
        leader, weight = self._tables[ch.side]

        def check_cost(k):
            base = ch.check_bases[k]
            return [c.bit_count() * big + (c << base) for c in states]

        f = check_cost(0)
        back = []
        for k, gap in enumerate(ch.gaps):
            nxt = check_cost(k + 1)
            if gap.constrained:
                sigma = 0
                for c, p in enumerate(gap.meta_pos):
                    sigma |= meta[p] << c
                code_cost = [weight[s] * big + (leader[s] << gap.base) for s in states]
                newf, arg = [], []
                for c2 in states:
                    best, bc = None, 0
                    for c1 in states:
                        v = f[c1] + code_cost[sigma ^ c1 ^ c2]
                        if best is None or v < best:
                            best, bc = v, c1
                    newf.append(best + nxt[c2])
                    arg.append(bc)
            else:
                c1 = min(states, key=f.__getitem__)
                newf = [f[c1] + nxt[c2] for c2 in states]
                arg = [c1] * len(newf)
            back.append((arg, gap, sigma if gap.constrained else 0))
            f = newf
        c = min(states, key=f.__getitem__)
        beta = c << ch.check_bases[-1]
        for k in range(len(ch.gaps) - 1, -1, -1):
            arg, gap, sigma = back[k]
            prev = arg[c]
            if gap.constrained:
                beta |= leader[sigma ^ prev ^ c] << gap.base
            beta |= prev << ch.check_bases[k]
            c = prev
        return beta

    # heuristic mode

    def _setup_heuristic(self):
        cols = bits_of(self.measured_mask)
        rows = []
        for e in self.s0:
            r = 0
            for j, v in enumerate(cols):
                if (e.bulk_x >> v) & 1:
                    r |= 1 << j
            rows.append(r)
        a = BitMatrix.from_ints(rows, len(cols))
        kernel = [v.data for v in nullspace_basis(a)]
        self._heur = (cols, a, kernel)

    def _heuristic(self, meta) -> DecodeResult:
        if self._heur is None:
            self._setup_heuristic()
        cols, a, kernel = self._heur
        x = solve(a, BitVector.from_list(list(meta)))
        if x is None:
            raise DecodeError("meta syndrome is inconsistent")
        x = x.data
        improved = True
        while improved:
            improved = False
            for b in kernel:
                y = x ^ b
                if y.bit_count() < x.bit_count():
                    x, improved = y, True
        beta = 0
        for j in bits_of(x):
            beta |= 1 << cols[j]
        return DecodeResult(beta, beta.bit_count(), False)


def min_weight_bulk_decode(g: AtgGraph, s0, meta, mode: str = EXACT,
                           measured_mask: int | None = None) -> DecodeResult:
    return BulkDecoder(g, s0, measured_mask).decode(meta, mode)


def brute_force_decode(g: AtgGraph, s0, meta, measured_mask: int | None = None, cap: int = 22) -> DecodeResult:
    """Exhaustive minimum over all measured patterns; a test oracle for tiny graphs."""
    if measured_mask is None:
        measured_mask = g.bulk_mask
    cols = bits_of(measured_mask)
    if len(cols) > cap:
        raise ValueError(f"{len(cols)} measured qubits exceed the brute-force cap {cap}")
    es = np.arange(1 << len(cols), dtype=np.int64)
    syn = np.zeros_like(es)
    for j, v in enumerate(cols):
        col = 0
        for k, e in enumerate(s0):
            if (e.bulk_x >> v) & 1:
                col |= 1 << k
        syn ^= ((es >> j) & 1) * col
    target = sum(b << k for k, b in enumerate(meta))
    best = None
    for x in es[syn == target].tolist():
        beta = 0
        for j in bits_of(int(x)):
            beta |= 1 << cols[j]
        key = (beta.bit_count(), beta)
        if best is None or key < best:
            best = key
    if best is None:
        raise DecodeError("meta syndrome is inconsistent")
    return DecodeResult(best[1], best[0], True)


# ---------------------------------------------------------------- Rec and Rep


def _compress(mask: int, cols: list[int]) -> int:
    out = 0
    for j, v in enumerate(cols):
        if (mask >> v) & 1:
            out |= 1 << j
    return out


def _expand(bits: int, cols: list[int]) -> int:
    out = 0
    for j in bits_of(bits):
        out |= 1 << cols[j]
    return out


def rec(s1, corrected, boundary_mask: int, column_order=None) -> tuple[int, int]:
    """A boundary Pauli ``(x_mask, z_mask)`` whose S1 syndromes equal ``corrected``.

    An element with X part ``a`` on the boundary flips sign under a Z wherever
    ``a`` acts, and its Z part flips under an X. The unknowns are the Z part
    followed by the X part, solved jointly. ``column_order`` permutes the
    pivot preference (used to show the residuals do not depend on the choice).
    """
    corrected = list(corrected)
    if len(corrected) != len(s1):
        raise ValueError(f"expected {len(s1)} syndrome bits, got {len(corrected)}")
    cols = bits_of(boundary_mask)
    if column_order is not None:
        cols = [cols[j] for j in column_order]
    w = len(cols)
    rows = [_compress(e.boundary_x, cols) | (_compress(e.boundary_z, cols) << w) for e in s1]
    sol = solve(BitMatrix.from_ints(rows, 2 * w), BitVector.from_list(corrected))
    if sol is None:
        raise DecodeError("boundary syndrome system is infeasible")
    z_part = _expand(sol.data & ((1 << w) - 1), cols)
    x_part = _expand(sol.data >> w, cols)
    return x_part, z_part


def rec_syndromes(s1, x_mask: int, z_mask: int) -> tuple[int, ...]:
    return tuple(parity(e.boundary_x & z_mask) ^ parity(e.boundary_z & x_mask) for e in s1)


@dataclass(frozen=True)
class _SurfaceGroup:
    layer: int
    base: int
    positions: tuple[int, ...]  # S1 positions ordered by check index


class RepCalculator:
    """Minimum-weight residual decomposition and logical flags for a given S1."""

    def __init__(self, g: AtgGraph, s1):
        self.g = g
        self.s1 = list(s1)
        code = g.code
        self._lx = coset_leaders(code.h_x)[0].tolist()
        self._lz = coset_leaders(code.h_z)[0].tolist()
        self.x_groups = self._groups(BND_X, code.m_x)
        self.z_groups = self._groups(BND_Z, code.m_z)
        self.logical_x_pos = [k for k, e in enumerate(self.s1) if e.kind == LOGICAL_X]
        self.logical_z_pos = [k for k, e in enumerate(self.s1) if e.kind == LOGICAL_ZZ]

    def _groups(self, kind: str, m: int) -> list[_SurfaceGroup]:
        by_layer: dict[int, dict[int, int]] = {}
        for k, e in enumerate(self.s1):
            if e.kind == kind:
                by_layer.setdefault(e.layer, {})[e.index] = k
        out = []
        for u in sorted(by_layer):
            d = by_layer[u]
            if sorted(d) != list(range(m)):
                raise ValueError(f"surface {u} lacks some {kind} elements")
            out.append(_SurfaceGroup(u, self.g.code_layer_base(u), tuple(d[c] for c in range(m))))
        return out

    def rep(self, residual) -> RepResult:
        residual = list(residual)
        rep_x = rep_z = 0
        for grp in self.x_groups:
            syn = sum(residual[p] << c for c, p in enumerate(grp.positions))
            rep_x |= self._lx[syn] << grp.base
        for grp in self.z_groups:
            syn = sum(residual[p] << c for c, p in enumerate(grp.positions))
            rep_z |= self._lz[syn] << grp.base
        fx = tuple(residual[k] ^ parity(self.s1[k].boundary_x & rep_x) for k in self.logical_x_pos)
        fz = tuple(residual[k] ^ parity(self.s1[k].boundary_z & rep_z) for k in self.logical_z_pos)
        return RepResult(rep_x, rep_z, fx, fz)


def rep(g: AtgGraph, s1, eta: int, beta: int, lb: LogicalBasis | None = None) -> RepResult:
    return RepCalculator(g, s1).rep(residual_syndrome(s1, eta, beta))


# ---------------------------------------------------------------- trials


class Pipeline:
    """Everything a trial needs, built once per (graph, pattern, stabilizer sets)."""

    def __init__(self, g: AtgGraph, pat: MeasurementPattern, s0, s1, mode: str = EXACT):
        if mode not in MODES:
            raise ValueError(f"unknown mode {mode!r}")
        self.g = g
        self.pat = pat
        self.s0 = list(s0)
        self.s1 = list(s1)
        self.mode = mode
        self.decoder = BulkDecoder(g, self.s0, pat.measured_mask)
        if mode == EXACT and not self.decoder.exact_available:
            raise DecodeError(f"exact decoding unavailable: {self.decoder._chain_error}")
        self.rep_calc = RepCalculator(g, self.s1)
        self.measured = measured_indices(pat)
        surfaces = pat.unmeasured_layers
        self.sag_x: SyndromeAdjGraph = build_sag(g, side="X", surfaces=surfaces)
        self.sag_z: SyndromeAdjGraph = build_sag(g, side="Z", surfaces=surfaces)

    def run_eta(self, eta: int) -> TrialOutcome:
        if eta & ~self.pat.measured_mask:
            raise ValueError("error must be supported on measured qubits")
        meta = extract_meta_syndromes(self.s0, eta)
        dec = self.decoder.decode(meta, self.mode)
        beta = dec.beta
        residual = residual_syndrome(self.s1, eta, beta)
        rp = self.rep_calc.rep(residual)
        cx = components(self.sag_x, mark_mismatch(self.sag_x, eta, beta, rp.rep_x), eta, beta)
        cz = components(self.sag_z, mark_mismatch(self.sag_z, eta, beta, rp.rep_z), eta, beta)
        cw_ok = None
        if dec.optimal:
            cw_ok = dec.weight <= eta.bit_count() and check_cluster_weight(cx) and check_cluster_weight(cz)
        return TrialOutcome(
            success=not rp.failed,
            cc_x_ok=cx.cc_ok,
            cc_z_ok=cz.cc_ok,
            residual_weight=(eta ^ beta).bit_count(),
            eta_weight=eta.bit_count(),
            beta_weight=dec.weight,
            optimal=dec.optimal,
            cluster_weight_ok=cw_ok,
            rep=rp,
            clusters_x=cx,
            clusters_z=cz,
            eta=eta,
            beta=beta,
        )

    def run(self, p: float, rng: np.random.Generator) -> TrialOutcome:
        return self.run_eta(sample_mask(self.measured, p, rng))


def bell_pipeline(g: AtgGraph, mode: str = EXACT, lb: LogicalBasis | None = None) -> Pipeline:
    if lb is None:
        lb = logical_basis(g.code)
    s0, s1 = bell_stabilizers(g, lb)
    return Pipeline(g, bell_pattern(g), s0, s1, mode)


def run_trial(g: AtgGraph, pat: MeasurementPattern, s0, s1, cfg: NoiseConfig, mode: str = EXACT,
              key: tuple[int, ...] = ()) -> TrialOutcome:
    return Pipeline(g, pat, s0, s1, mode).run(cfg.p, make_rng(cfg.seed, key))


__all__ = [
    "EXACT", "HEURISTIC", "MODES", "DecodeError", "ConsistencyError", "SyndromeSet", "DecodeResult",
    "RepResult", "TrialOutcome", "extract_meta_syndromes", "corrected_syndromes", "residual_syndrome",
    "BulkDecoder", "min_weight_bulk_decode", "brute_force_decode", "rec", "rec_syndromes",
    "RepCalculator", "rep", "Pipeline", "bell_pipeline", "run_trial",
]
