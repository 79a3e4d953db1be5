"""The ten acceptance criteria, each at its stated tolerance and time limit."""

from __future__ import annotations

import math
import time
from fractions import Fraction

import numpy as np

from atg.clusters import count_connected_sets, failure_bound, set_count_bound, threshold_bounds
from atg.codes import fixture, logical_basis
from atg.decoder import bell_pipeline
from atg.ghz import ghz_layers, ghz_pipeline, ghz_stabilizers
from atg.graph import bell_pattern
from atg.harness import SweepConfig, run_sweep
from atg.mbqc import foliate_outcomes, foliated_from_errors, sample_error_layers, verify_recurrence
from atg.noise import NoiseConfig, make_rng
from atg.stabilizers import verify_factorization
from atg.tableau import oracle_cross_check
from conftest import ACCEPTANCE, bell_sets, graph


class Criterion:
    def __init__(self, num: int, limit: float):
        self.num, self.limit = num, limit

    def __enter__(self):
        self.t0 = time.perf_counter()
        self.detail = ""
        self.ok = False
        return self

    def __exit__(self, exc_type, exc, tb):
        secs = time.perf_counter() - self.t0
        in_time = secs < self.limit
        ok = self.ok and exc_type is None and in_time
        note = self.detail if exc_type is None else f"raised {exc_type.__name__}: {exc}"
        ACCEPTANCE.append((self.num, ok, f"{note} [{secs:.1f}s / {self.limit:.0f}s]"))
        print(f"criterion {self.num}: {'PASS' if ok else 'FAIL'} {note} ({secs:.1f}s)")
        if exc_type is None:
            assert self.ok, note
            assert in_time, f"took {secs:.1f}s, limit {self.limit}s"
        return False


def test_01_factorization():
    with Criterion(1, 5) as c:
        total = bad = 0
        for name, Ts in (("422", (1, 2, 3)), ("steane", (1, 2)), ("hgp13", (1, 2))):
            for T in Ts:
                g = graph(name, T)
                s0, s1 = bell_sets(name, T)
                sets = [(bell_pattern(g).measured_mask, s0 + s1)]
                for m in range(2, T + 2):
                    pat = ghz_layers(T, m)
                    g0, g1 = ghz_stabilizers(g, pat, logical_basis(g.code))
                    sets.append((pat.measurement(g).measured_mask, g0 + g1))
                for meas, elems in sets:
                    for e in elems:
                        total += 1
                        bad += not verify_factorization(g, e, meas)
        c.ok = bad == 0 and total > 0
        c.detail = f"{total - bad}/{total} stabilizer elements factorize"


def test_02_oracle_equivalence():
    with Criterion(2, 60) as c:
        a = oracle_cross_check(graph("422", 1), None, NoiseConfig(0.1, 0), 200)
        b = oracle_cross_check(graph("steane", 2), None, NoiseConfig(0.05, 0), 50)
        mism = len(a.mismatches) + len(b.mismatches)
        c.ok = mism == 0 and a.trials == 200 and b.trials == 50
        c.detail = f"{mism} mismatches over 200 + 50 oracle trials"


def test_03_cluster_weight():
    with Criterion(3, 120) as c:
        pl = bell_pipeline(graph("422", 3))
        viol = nonexact = 0
        for i in range(1000):
            out = pl.run(0.05, make_rng(3, (i,)))
            nonexact += not out.optimal
            viol += out.cluster_weight_ok is not True
        c.ok = viol == 0 and nonexact == 0
        c.detail = f"{viol} cluster-weight violations in 1000 exact trials"


def test_04_zero_noise():
    with Criterion(4, 10) as c:
        bad = runs = 0
        for name in ("422", "steane", "hgp13"):
            g = graph(name, 2)
            for pl in (bell_pipeline(g), ghz_pipeline(g, ghz_layers(2, 3))):
                for i in range(1000):
                    out = pl.run(0.0, make_rng(4, (i,)))
                    runs += 1
                    bad += not (out.success and out.residual_weight == 0 and out.cc_x_ok and out.cc_z_ok)
        c.ok = bad == 0
        c.detail = f"{runs - bad}/{runs} zero-noise trials clean"


def test_05_threshold_formulas():
    with Criterion(5, 1) as c:
        b = threshold_bounds(4)
        exact = (b.z, b.p0, b.p1, b.p2) == (20, Fraction(1, 25600), Fraction(1, 655360000), Fraction(1, 655360000))
        code = fixture("steane")
        sb = threshold_bounds(code.ell)
        ps = np.sort(np.random.default_rng(5).uniform(0, float(sb.p_star), 100))
        totals = [failure_bound(code, 3, float(p), sb).total for p in ps]
        mono = all(x <= y for x, y in zip(totals, totals[1:]))
        c.ok = exact and mono
        c.detail = f"exact rationals {'match' if exact else 'differ'}, bound monotone on 100 points: {mono}"


def test_06_noise_monotonicity():
    with Criterion(6, 600) as c:
        pl = bell_pipeline(graph("steane", 3))
        n = 10_000
        rates = []
        for k, p in enumerate((0.001, 0.05)):
            fails = sum(not pl.run(p, make_rng(6, (k, i))).success for i in range(n))
            rates.append(fails / n)
        lo, hi = rates
        sigma = math.sqrt(lo * (1 - lo) / n + hi * (1 - hi) / n)
        z = (hi - lo) / sigma if sigma else math.inf
        c.ok = hi > lo and z >= 5
        c.detail = f"failure rate {lo:.4f} at p=0.001 vs {hi:.4f} at p=0.05, separation {z:.1f} sigma"


def test_07_ghz_bell_coherence():
    with Criterion(7, 60) as c:
        g = graph("422", 2)
        bell, ghz = bell_pipeline(g), ghz_pipeline(g, ghz_layers(2, 2))
        diff = sum(bell.run(0.1, make_rng(7, (i,))).success != ghz.run(0.1, make_rng(7, (i,))).success
                   for i in range(500))
        c.ok = diff == 0
        c.detail = f"{500 - diff}/500 shared-seed success flags identical"


def test_08_mbqc_recurrence():
    with Criterion(8, 30) as c:
        code = fixture("422")
        rec_ok = sum(verify_recurrence(foliated_from_errors(f), f, code)
                     for f in (sample_error_layers(code, 3, 0.2, make_rng(8, (i,))) for i in range(500)))
        lin_ok = 0
        for i in range(1000):
            rng = make_rng(8, (1, i))
            a = foliated_from_errors(sample_error_layers(code, 3, 0.5, rng))
            b = foliated_from_errors(sample_error_layers(code, 3, 0.5, rng))
            fa, fb, fab = foliate_outcomes(a, code), foliate_outcomes(b, code), foliate_outcomes(a ^ b, code)
            lin_ok += fab == tuple(tuple(x ^ y for x, y in zip(u, v)) for u, v in zip(fa, fb))
        c.ok = rec_ok == 500 and lin_ok == 1000
        c.detail = f"recurrence {rec_ok}/500, linearity {lin_ok}/1000"


def _random_graph(rng, n):
    p = rng.uniform(0.15, 0.5)
    adj = [set() for _ in range(n)]
    for a in range(n):
        for b in range(a + 1, n):
            if rng.random() < p:
                adj[a].add(b)
                adj[b].add(a)
    return tuple(tuple(sorted(s)) for s in adj)


def test_09_connected_set_bound():
    with Criterion(9, 60) as c:
        rng = np.random.default_rng(9)
        worst = 0.0
        checks = over = 0
        for _ in range(30):
            n = int(rng.integers(5, 13))
            adj = _random_graph(rng, n)
            z = max(len(a) for a in adj)
            for _ in range(50):
                t = int(rng.integers(1, 4))
                anchor = set(int(v) for v in rng.choice(n, size=t, replace=False))
                for s in range(t, n + 1):
                    cnt = count_connected_sets(adj, anchor, s)
                    bound = set_count_bound(z, s, t)
                    checks += 1
                    over += cnt > bound
                    if bound:
                        worst = max(worst, cnt / bound)
        c.ok = over == 0
        c.detail = f"{over} of {checks} counts exceed the bound (largest ratio {worst:.3g})"


def test_10_reproducibility(tmp_path):
    with Criterion(10, 60) as c:
        outs = []
        for threads in (1, 2, 4):
            out = tmp_path / f"t{threads}.csv"
            run_sweep(SweepConfig(fixture("steane"), 2, (0.01, 0.05), 1200, seed=10, out=out, threads=threads))
            outs.append(out.read_bytes())
        c.ok = outs[0] == outs[1] == outs[2]
        c.detail = f"sweep files byte-identical across 1, 2 and 4 workers: {c.ok}"
