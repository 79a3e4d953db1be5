"""GHZ patterns: m unmeasured odd layers carrying an m-party logical GHZ state.

The Bell pattern is the case m = 2 with surfaces (1, 2T+1); everything here
reduces to it element by element.
"""

from __future__ import annotations

from dataclasses import dataclass

from .clusters import SyndromeAdjGraph, build_sag
from .codes import CssCode, LogicalBasis, logical_basis
from .decoder import EXACT, Pipeline, TrialOutcome
from .gf2 import mask_of
from .graph import AtgGraph, MeasurementPattern, pattern_for_layers
from .noise import NoiseConfig, make_rng
from .stabilizers import (BND_X, LOGICAL_X, LOGICAL_ZZ, StabilizerElement, _checked, _z_check_element,
                          meta_checks)


class InfeasiblePattern(ValueError):
    pass


@dataclass(frozen=True)
class GhzPattern:
    m: int
    layers: tuple[int, ...]
    delta: int

    def measurement(self, g: AtgGraph) -> MeasurementPattern:
        return pattern_for_layers(g, self.layers)


def ghz_layers(T: int, m: int) -> GhzPattern:
    """Evenly spaced odd layers from 1 to 2T+1; the smallest gap is as large as possible."""
    if m < 2:
        raise InfeasiblePattern(f"m must be at least 2, got {m}")
    if T < m - 1:
        raise InfeasiblePattern(f"T = {T} leaves only {T + 1} odd layers for m = {m} surfaces")
    pos = [(j * T) // (m - 1) for j in range(m)]
    layers = tuple(2 * p + 1 for p in pos)
    delta = min(b - a for a, b in zip(layers, layers[1:]))
    return GhzPattern(m, layers, delta)


def ghz_pattern_from_layers(T: int, layers) -> GhzPattern:
    layers = tuple(sorted(layers))
    top = 2 * T + 1
    if len(layers) < 2 or layers[0] != 1 or layers[-1] != top:
        raise InfeasiblePattern(f"layers must start at 1 and end at {top}")
    if any(t % 2 == 0 for t in layers) or len(set(layers)) != len(layers):
        raise InfeasiblePattern("layers must be distinct odd integers")
    return GhzPattern(len(layers), layers, min(b - a for a, b in zip(layers, layers[1:])))


def _x_check_element(g: AtgGraph, c: int, u: int) -> StabilizerElement:
    sup = g.code.check_supports("X")[c]
    top = g.n_layers
    code_part = tuple(g.code_vertex(i, u) for i in sup)
    if u == 1 or u == top:
        checks = (g.check_vertex(c, 2 if u == 1 else top - 1),)
    else:
        checks = (g.check_vertex(c, u - 1), g.check_vertex(c, u + 1))
    gens = checks + code_part
    return StabilizerElement(BND_X, gens, mask_of(checks), boundary_x=mask_of(code_part),
                             layer=u, index=c, surfaces=(u,))


def ghz_stabilizers(g: AtgGraph, pattern: GhzPattern, lb: LogicalBasis | None = None):
    if lb is None:
        lb = logical_basis(g.code)
    code = g.code
    layers = pattern.layers
    if layers[-1] != g.n_layers:
        raise InfeasiblePattern(f"pattern does not match T = {g.T}")
    meas = pattern.measurement(g)
    s0 = meta_checks(g, skip_layers=set(layers[1:-1]))
    s1 = [_z_check_element(g, c, u) for u in layers for c in range(code.m_z)]
    s1 += [_x_check_element(g, c, u) for u in layers for c in range(code.m_x)]
    pattern_mask = g.all_mask & ~meas.measured_mask
    for j, ax in enumerate(lb.x_logicals):
        gens = tuple(g.code_vertex(i, t) for t in range(1, g.n_layers + 1, 2) for i in ax.support())
        full = mask_of(gens)
        s1.append(StabilizerElement(LOGICAL_X, gens, full & ~pattern_mask, boundary_x=full & pattern_mask,
                                    index=j, surfaces=layers))
    for a, b in zip(layers, layers[1:]):
        for j, az in enumerate(lb.z_logicals):
            gens = tuple(g.code_vertex(i, t) for t in range(a + 1, b, 2) for i in az.support())
            bnd = mask_of(g.code_vertex(i, t) for t in (a, b) for i in az.support())
            s1.append(StabilizerElement(LOGICAL_ZZ, gens, mask_of(gens), boundary_z=bnd,
                                        index=j, surfaces=(a, b)))
    return s0, _checked(g, s1, meas.measured_mask)


def modified_z_sag(code: CssCode | AtgGraph, T: int | None, pattern: GhzPattern) -> SyndromeAdjGraph:
    return build_sag(code, T, "Z", surfaces=pattern.layers)


def ghz_pipeline(g: AtgGraph, pattern: GhzPattern, mode: str = EXACT, lb: LogicalBasis | None = None) -> Pipeline:
    s0, s1 = ghz_stabilizers(g, pattern, lb)
    return Pipeline(g, pattern.measurement(g), s0, s1, mode)


def run_ghz_trial(g: AtgGraph, pattern: GhzPattern, cfg: NoiseConfig, mode: str = EXACT,
                  key: tuple[int, ...] = ()) -> TrialOutcome:
    return ghz_pipeline(g, pattern, mode).run(cfg.p, make_rng(cfg.seed, key))


def cc_span_bound(m_side: int, delta: int, p: float, p0: float) -> float:
    """Span bound with the exponent taken from the smallest surface gap."""
    r = p / float(p0)
    if r >= 1.0:
        raise ValueError("p must be below p0")
    return m_side * r ** (delta / 2) / (1.0 - r ** 0.5)


__all__ = ["InfeasiblePattern", "GhzPattern", "ghz_layers", "ghz_pattern_from_layers", "ghz_stabilizers",
           "modified_z_sag", "ghz_pipeline", "run_ghz_trial", "cc_span_bound"]
