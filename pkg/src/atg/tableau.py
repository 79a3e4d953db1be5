"""Stabilizer-tableau oracle that runs the preparation circuit gate by gate.

Rows are Paulis ``i**k X^x Z^z`` with ``x`` and ``z`` stored as integer
bitmasks over qubits and ``k`` mod 4. Rows 0..n-1 are destabilizers, rows
n..2n-1 stabilizers. Destabilizer phases are not meaningful and are not
kept consistent.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .codes import LogicalBasis, logical_basis
from .decoder import (EXACT, BulkDecoder, Pipeline, corrected_syndromes, extract_meta_syndromes, rec,
                      residual_syndrome)
from .gf2 import bits_of, mask_of
from .graph import AtgGraph, MeasurementPattern, bell_pattern, edge_colouring
from .noise import NoiseConfig, make_rng, measured_indices, sample_mask
from .stabilizers import bell_stabilizers

ORACLE_CAP = 64


class OracleCapExceeded(ValueError):
    pass


def _mul(a: tuple[int, int, int], b: tuple[int, int, int]) -> tuple[int, int, int]:
    """``a * b`` with both in ``i**k X^x Z^z`` form."""
    return a[0] ^ b[0], a[1] ^ b[1], (a[2] + b[2] + 2 * (a[1] & b[0]).bit_count()) % 4


def _anticommute(a, b) -> int:
    return ((a[0] & b[1]).bit_count() + (a[1] & b[0]).bit_count()) & 1


def hermitian(x: int, z: int, sign: int = 1) -> tuple[int, int, int]:
    """The Hermitian Pauli ``sign * X^x Z^z`` (with Y = iXZ on the overlap) in row form."""
    k = (x & z).bit_count() + (0 if sign == 1 else 2)
    return x, z, k % 4


@dataclass
class Tableau:
    n_qubits: int
    rows: list = field(default_factory=list)

    @classmethod
    def plus_state(cls, n: int) -> Tableau:
        rows = [(0, 1 << q, 0) for q in range(n)] + [(1 << q, 0, 0) for q in range(n)]
        return cls(n, rows)

    @classmethod
    def zero_state(cls, n: int) -> Tableau:
        rows = [(1 << q, 0, 0) for q in range(n)] + [(0, 1 << q, 0) for q in range(n)]
        return cls(n, rows)

    def copy(self) -> Tableau:
        return Tableau(self.n_qubits, list(self.rows))

    @property
    def stabilizers(self) -> list:
        return self.rows[self.n_qubits:]

    # gates

    def h(self, q: int) -> None:
        b = 1 << q
        out = []
        for x, z, k in self.rows:
            xa, za = x & b, z & b
            if xa and za:
                k += 2
            x = (x & ~b) | (b if za else 0)
            z = (z & ~b) | (b if xa else 0)
            out.append((x, z, k % 4))
        self.rows = out

    def cz(self, a: int, b: int) -> None:
        ba, bb = 1 << a, 1 << b
        out = []
        for x, z, k in self.rows:
            xa, xb = bool(x & ba), bool(x & bb)
            if xa and xb:
                k += 2
            if xb:
                z ^= ba
            if xa:
                z ^= bb
            out.append((x, z, k % 4))
        self.rows = out

    def apply_pauli(self, x_mask: int, z_mask: int) -> None:
        """Conjugate by X^x_mask Z^z_mask: flips the phase of anticommuting rows."""
        self.rows = [(x, z, (k + 2 * ((x & z_mask).bit_count() + (z & x_mask).bit_count())) % 4)
                     for x, z, k in self.rows]

    # measurement

    def measure_z(self, q: int, rng: np.random.Generator) -> tuple[int, bool]:
        """Measure Z_q; returns ``(bit, random)`` where the eigenvalue is ``(-1)**bit``."""
        n = self.n_qubits
        b = 1 << q
        p = next((i for i in range(n, 2 * n) if self.rows[i][0] & b), None)
        if p is not None:
            rp = self.rows[p]
            for i in range(2 * n):
                if i != p and self.rows[i][0] & b:
                    self.rows[i] = _mul(rp, self.rows[i])
            bit = int(rng.integers(2))
            self.rows[p - n] = rp
            self.rows[p] = (0, b, 2 * bit)
            return bit, True
        acc = (0, 0, 0)
        for i in range(n):
            if self.rows[i][0] & b:
                acc = _mul(acc, self.rows[i + n])
        x, z, k = acc
        if x or z != b:
            raise AssertionError("deterministic measurement did not reduce to Z_q")
        return (k // 2) & 1, False

    def measure_x(self, q: int, rng: np.random.Generator) -> tuple[int, bool]:
        self.h(q)
        out = self.measure_z(q, rng)
        self.h(q)
        return out

    def expectation(self, x: int, z: int, sign: int = 1) -> int:
        """Expectation of the Hermitian Pauli ``sign * X^x Z^z``: +1, -1 or 0."""
        n = self.n_qubits
        target = hermitian(x, z, sign)
        for i in range(n, 2 * n):
            if _anticommute(self.rows[i], target):
                return 0
        acc = (0, 0, 0)
        for i in range(n):
            if _anticommute(self.rows[i], target):
                acc = _mul(acc, self.rows[i + n])
        if acc[0] != x or acc[1] != z:
            raise AssertionError("commuting Pauli is not in the stabilizer group")
        return 1 if (acc[2] - target[2]) % 4 == 0 else -1

    def check_commuting(self) -> bool:
        stabs = self.stabilizers
        return all(not _anticommute(a, b) for i, a in enumerate(stabs) for b in stabs[i + 1:])


def graph_state_tableau(n_vertices: int, edges, cap: int = ORACLE_CAP) -> Tableau:
    """All qubits in |+>, then one CZ per edge, layer by layer of the colouring."""
    if n_vertices > cap:
        raise OracleCapExceeded(f"{n_vertices} qubits exceed the oracle cap {cap}")
    tab = Tableau.plus_state(n_vertices)
    for layer in edge_colouring(n_vertices, edges):
        for a, b in layer:
            tab.cz(a, b)
    return tab


def prepare_atg_state(g: AtgGraph, cap: int = ORACLE_CAP) -> Tableau:
    return graph_state_tableau(g.n_vertices, g.edges, cap)


def graph_state_ok(g: AtgGraph, tab: Tableau) -> bool:
    return all(tab.expectation(1 << u, mask_of(g.adjacency[u])) == 1 for u in range(g.n_vertices))


@dataclass(frozen=True)
class OracleRecord:
    outcomes: int
    meta: tuple[int, ...]
    beta: int
    rec_x: int
    rec_z: int
    signs: tuple[int, ...]  # expectation of each S1 boundary part after Rec
    signs_after_rep: tuple[int, ...]  # after additionally undoing Rep
    tableau: Tableau = field(repr=False, compare=False)


def measure_and_recover(tab: Tableau, g: AtgGraph, pat: MeasurementPattern, s0, s1, error: int,
                        rng: np.random.Generator, mode: str = EXACT, decoder: BulkDecoder | None = None,
                        rep_calc=None) -> OracleRecord:
    """Apply Z(error), measure the bulk in X, decode from the real outcomes and apply Rec."""
    if error & ~pat.measured_mask:
        raise ValueError("error must be supported on measured qubits")
    tab = tab.copy()
    tab.apply_pauli(0, error)
    outcomes = 0
    for v in bits_of(pat.measured_mask):
        bit, _ = tab.measure_x(v, rng)
        outcomes |= bit << v
    if decoder is None:
        decoder = BulkDecoder(g, s0, pat.measured_mask)
    meta = extract_meta_syndromes(s0, outcomes)
    dec = decoder.decode(meta, mode)
    corrected = corrected_syndromes(s1, outcomes, dec.beta)
    unmeasured = g.all_mask & ~pat.measured_mask
    rx, rz = rec(s1, corrected, unmeasured)
    tab.apply_pauli(rx, rz)
    signs = tuple(tab.expectation(e.boundary_x, e.boundary_z) for e in s1)
    after = signs
    if rep_calc is not None:
        rp = rep_calc.rep(tuple(0 if s == 1 else 1 for s in signs))
        t2 = tab.copy()
        t2.apply_pauli(rp.rep_z, rp.rep_x)
        after = tuple(t2.expectation(e.boundary_x, e.boundary_z) for e in s1)
    return OracleRecord(outcomes, meta, dec.beta, rx, rz, signs, after, tab)


@dataclass(frozen=True)
class Mismatch:
    trial: int
    eta: int
    kind: str
    detail: str


@dataclass(frozen=True)
class OracleReport:
    trials: int
    mismatches: tuple[Mismatch, ...]
    failures: int

    @property
    def ok(self) -> bool:
        return not self.mismatches

    def to_json(self) -> dict:
        return {
            "trials": self.trials,
            "mismatches": [{"trial": m.trial, "eta": bits_of(m.eta), "kind": m.kind, "detail": m.detail}
                           for m in self.mismatches],
            "frame_failures": self.failures,
            "ok": self.ok,
        }


def oracle_cross_check(g: AtgGraph, pattern: MeasurementPattern | None, cfg: NoiseConfig, trials: int,
                       s0=None, s1=None, lb: LogicalBasis | None = None, mode: str = EXACT) -> OracleReport:
    """Frame residuals and logical flags against tableau signs, trial by trial."""
    if pattern is None:
        pattern = bell_pattern(g)
    if s0 is None or s1 is None:
        s0, s1 = bell_stabilizers(g, lb if lb is not None else logical_basis(g.code))
    pl = Pipeline(g, pattern, s0, s1, mode)
    base = prepare_atg_state(g)
    if not graph_state_ok(g, base):
        raise AssertionError("prepared tableau is not the ATG graph state")
    idx = measured_indices(pattern)
    mismatches = []
    failures = 0
    for t in range(trials):
        rng = make_rng(cfg.seed, (t,))
        eta = sample_mask(idx, cfg.p, rng)
        frame = pl.run_eta(eta)
        failures += not frame.success
        orc = measure_and_recover(base, g, pattern, s0, s1, eta, rng, mode, pl.decoder, pl.rep_calc)
        want_meta = extract_meta_syndromes(s0, eta)
        if orc.meta != want_meta:
            mismatches.append(Mismatch(t, eta, "meta", f"outcome parities {orc.meta} vs frame {want_meta}"))
            continue
        resid = residual_syndrome(s1, eta, frame.beta)
        got = tuple(0 if s == 1 else (1 if s == -1 else None) for s in orc.signs)
        if got != resid:
            mismatches.append(Mismatch(t, eta, "residual", f"tableau {got} vs frame {resid}"))
            continue
        rp = frame.rep
        flags = {k: f for k, f in zip(pl.rep_calc.logical_x_pos, rp.logical_x_flags)}
        flags.update(zip(pl.rep_calc.logical_z_pos, rp.logical_z_flags))
        for k, s in enumerate(orc.signs_after_rep):
            want = -1 if flags.get(k, 0) else 1
            if s != want:
                mismatches.append(Mismatch(t, eta, "logical", f"element {s1[k].label()} sign {s}, frame expects {want}"))
                break
    return OracleReport(trials, tuple(mismatches), failures)


__all__ = ["ORACLE_CAP", "OracleCapExceeded", "Tableau", "hermitian", "graph_state_tableau", "prepare_atg_state",
           "graph_state_ok", "OracleRecord", "measure_and_recover", "Mismatch", "OracleReport", "oracle_cross_check"]
