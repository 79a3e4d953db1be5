"""Syndrome adjacency graphs, mismatch clusters, and the percolation bounds.

Node-to-ATG mapping used here (u ranges over the unmeasured odd layers):

X side  code node on odd layer t     -> ATG code qubit (i, t); boundary if t is unmeasured
        check node on even layer t   -> ATG X check (c, t)
Z side  code node on even layer t    -> ATG code qubit (i, t)
        check node on odd layer t    -> ATG Z check (c, t)
        boundary group per u          -> ATG code qubits (i, u), wired to the Z checks of layer u

Bulk nodes are marked where the true and inferred bulk errors differ;
boundary nodes are marked where the minimum-weight residual (rep_x on the X
side, rep_z on the Z side) acts.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

from .codes import CssCode
from .graph import AtgGraph, build_atg


@dataclass(frozen=True)
class SagNode:
    kind: str  # "code", "check" or "boundary"
    index: int
    layer: int  # ATG layer
    vertex: int  # ATG vertex index
    group: int = -1  # boundary group, -1 for bulk nodes


@dataclass(frozen=True, eq=False)
class SyndromeAdjGraph:
    side: str
    nodes: tuple[SagNode, ...]
    adjacency: tuple[tuple[int, ...], ...]
    surfaces: tuple[int, ...]

    @property
    def z_degree(self) -> int:
        return max((len(a) for a in self.adjacency), default=0)

    @property
    def boundary_nodes(self) -> list[list[int]]:
        groups: list[list[int]] = [[] for _ in self.surfaces]
        for k, nd in enumerate(self.nodes):
            if nd.group >= 0:
                groups[nd.group].append(k)
        return groups

    @property
    def n_edges(self) -> int:
        return sum(len(a) for a in self.adjacency) // 2


def _shared_check_pairs(supports):
    pairs = set()
    for sup in supports:
        for a, b in itertools.combinations(sorted(sup), 2):
            pairs.add((a, b))
    return pairs


def _finish(side, nodes, edges, surfaces) -> SyndromeAdjGraph:
    adj: list[set[int]] = [set() for _ in nodes]
    for a, b in edges:
        if a != b:
            adj[a].add(b)
            adj[b].add(a)
    return SyndromeAdjGraph(side, tuple(nodes), tuple(tuple(sorted(s)) for s in adj), tuple(surfaces))


def _graph_for(code_or_graph, T):
    if isinstance(code_or_graph, AtgGraph):
        return code_or_graph
    return build_atg(code_or_graph, T)


def build_sag(code: CssCode | AtgGraph, T: int | None = None, side: str = "X",
              surfaces=None, z_boundary: bool = True) -> SyndromeAdjGraph:
    g = _graph_for(code, T)
    T = g.T
    code = g.code
    top = 2 * T + 1
    surfaces = tuple(sorted(surfaces)) if surfaces is not None else (1, top)
    if side == "X":
        return _build_x(g, surfaces)
    if side == "Z":
        return _build_z(g, surfaces if z_boundary else ())
    raise ValueError(f"side must be 'X' or 'Z', got {side!r}")


def _build_x(g: AtgGraph, surfaces) -> SyndromeAdjGraph:
    code, top = g.code, g.n_layers
    nodes: list[SagNode] = []
    where: dict[tuple, int] = {}
    for t in range(1, top + 1):
        if t % 2 == 1:
            for i in range(code.n):
                grp = surfaces.index(t) if t in surfaces else -1
                where["q", i, t] = len(nodes)
                nodes.append(SagNode("boundary" if grp >= 0 else "code", i, t, g.code_vertex(i, t), grp))
        else:
            for c in range(code.m_x):
                where["c", c, t] = len(nodes)
                nodes.append(SagNode("check", c, t, g.check_vertex(c, t)))
    sup = code.check_supports("X")
    pairs = _shared_check_pairs(sup)
    edges = []
    for t in range(1, top + 1, 2):
        edges += [(where["q", a, t], where["q", b, t]) for a, b in pairs]
    for t in range(2, top, 2):
        for c, qs in enumerate(sup):
            for i in qs:
                edges.append((where["c", c, t], where["q", i, t - 1]))
                edges.append((where["c", c, t], where["q", i, t + 1]))
            if t + 2 < top:
                edges.append((where["c", c, t], where["c", c, t + 2]))
    return _finish("X", nodes, edges, surfaces)


def _build_z(g: AtgGraph, surfaces) -> SyndromeAdjGraph:
    code, top = g.code, g.n_layers
    nodes: list[SagNode] = []
    where: dict[tuple, int] = {}
    for t in range(1, top + 1):
        if t % 2 == 0:
            for i in range(code.n):
                where["q", i, t] = len(nodes)
                nodes.append(SagNode("code", i, t, g.code_vertex(i, t)))
        else:
            for c in range(code.m_z):
                where["c", c, t] = len(nodes)
                nodes.append(SagNode("check", c, t, g.check_vertex(c, t)))
    for grp, u in enumerate(surfaces):
        for i in range(code.n):
            where["b", i, u] = len(nodes)
            nodes.append(SagNode("boundary", i, u, g.code_vertex(i, u), grp))
    sup = code.check_supports("Z")
    pairs = _shared_check_pairs(sup)
    edges = []
    for t in range(2, top, 2):
        edges += [(where["q", a, t], where["q", b, t]) for a, b in pairs]
    for t in range(1, top + 1, 2):
        for c, qs in enumerate(sup):
            for i in qs:
                for s in (t - 1, t + 1):
                    if 2 <= s < top:
                        edges.append((where["c", c, t], where["q", i, s]))
            if t + 2 <= top:
                edges.append((where["c", c, t], where["c", c, t + 2]))
    for u in surfaces:
        edges += [(where["b", a, u], where["b", b, u]) for a, b in pairs]
        for c, qs in enumerate(sup):
            for i in qs:
                edges.append((where["c", c, u], where["b", i, u]))
    return _finish("Z", nodes, edges, surfaces)


def mark_mismatch(sag: SyndromeAdjGraph, eta: int, beta: int, rep: int) -> list[int]:
    """Marked node ids; ``eta``, ``beta`` and ``rep`` are ATG vertex masks."""
    diff = eta ^ beta
    out = []
    for k, nd in enumerate(sag.nodes):
        src = rep if nd.group >= 0 else diff
        if (src >> nd.vertex) & 1:
            out.append(k)
    return out


class UnionFind:
    def __init__(self, items=()):
        self.parent = {x: x for x in items}
        self.size = {x: 1 for x in self.parent}

    def find(self, x):
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return ra
        if self.size[ra] < self.size[rb]:
            ra, rb = rb, ra
        self.parent[rb] = ra
        self.size[ra] += self.size[rb]
        return ra

    def groups(self) -> list[list]:
        out: dict = {}
        for x in self.parent:
            out.setdefault(self.find(x), []).append(x)
        return sorted((sorted(v) for v in out.values()), key=lambda v: v[0])


@dataclass(frozen=True)
class Component:
    nodes: tuple[int, ...]
    inferred_weight: int
    true_weight: int
    touches: tuple[int, ...]

    @property
    def size(self) -> int:
        return len(self.nodes)

    def to_json(self) -> dict:
        return {"size": self.size, "true_weight": self.true_weight,
                "inferred_weight": self.inferred_weight, "touches": list(self.touches)}


@dataclass(frozen=True)
class ClusterReport:
    components: tuple[Component, ...]
    cc_ok: bool

    @property
    def max_size(self) -> int:
        return max((c.size for c in self.components), default=0)

    def to_json(self) -> dict:
        return {"components": [c.to_json() for c in self.components], "cc_ok": self.cc_ok}


def components(sag: SyndromeAdjGraph, marked, eta: int = 0, beta: int = 0) -> ClusterReport:
    marked = list(marked)
    mset = set(marked)
    uf = UnionFind(marked)
    for a in marked:
        for b in sag.adjacency[a]:
            if b in mset:
                uf.union(a, b)
    comps = []
    for grp in uf.groups():
        bulk = [sag.nodes[k] for k in grp if sag.nodes[k].group < 0]
        inferred = sum((beta >> nd.vertex) & 1 for nd in bulk)
        true = sum((eta >> nd.vertex) & 1 for nd in bulk)
        touches = tuple(sorted({sag.nodes[k].group for k in grp if sag.nodes[k].group >= 0}))
        comps.append(Component(tuple(grp), inferred, true, touches))
    return ClusterReport(tuple(comps), all(len(c.touches) <= 1 for c in comps))


def check_cluster_weight(report: ClusterReport) -> bool:
    """Inferred weight never exceeds true weight inside any mismatch cluster."""
    return all(c.inferred_weight <= c.true_weight for c in report.components)


def count_connected_sets(adjacency, anchor, s: int, cap: int = 20) -> int:
    """Number of size-s node sets containing ``anchor`` whose every connected
    component (in the induced subgraph) meets ``anchor``."""
    n = len(adjacency)
    if n > cap:
        raise ValueError(f"graph has {n} nodes, enumeration cap is {cap}")
    anchor = frozenset(anchor)
    if s < len(anchor):
        return 0
    rest = [v for v in range(n) if v not in anchor]
    count = 0
    for extra in itertools.combinations(rest, s - len(anchor)):
        chosen = anchor | set(extra)
        # flood from anchor inside chosen
        seen = set(anchor)
        stack = list(anchor)
        while stack:
            v = stack.pop()
            for w in adjacency[v]:
                if w in chosen and w not in seen:
                    seen.add(w)
                    stack.append(w)
        if len(seen) == len(chosen):
            count += 1
    return count


def set_count_bound(z: int, s: int, t: int) -> int:
    return z ** (s - t) * 4 ** s


@dataclass(frozen=True)
class ThresholdBounds:
    z: int
    p0: Fraction
    p1: Fraction
    p2: Fraction

    @property
    def p_star(self) -> Fraction:
        return min(self.p0, self.p1, self.p2)


def threshold_bounds(ell: int) -> ThresholdBounds:
    if ell < 1:
        raise ValueError("ell must be at least 1")
    z = ell * (ell + 1)
    base = Fraction(1, 8 * z)
    return ThresholdBounds(z, base ** 2, base ** 4, base ** 4)


def boundary_span_term(m: int, T: int, p: float, p0: float) -> float:
    """Bound on a mismatch cluster spanning the two boundaries on one side."""
    r = p / float(p0)
    if r >= 1.0:
        raise ValueError("p must be below p0")
    return m * r ** (T / 2) / (1.0 - math.sqrt(r))


def logical_term(n: int, T: int, d: int, p: float, p2: float) -> float:
    """Bound on a logical-class residual together with the clustering condition, one side."""
    r = p / float(p2)
    if r >= 1.0:
        raise ValueError("p must be below p2")
    return 2 * n * T * r ** (d / 4) / (1.0 - r ** 0.25)


@dataclass(frozen=True)
class FailureBound:
    span_x: float
    span_z: float
    logical_x: float
    logical_z: float

    @property
    def total(self) -> float:
        return self.span_x + self.span_z + self.logical_x + self.logical_z


def failure_bound(code: CssCode, T: int, p: float, bounds: ThresholdBounds | None = None,
                  d: int | None = None) -> FailureBound:
    """Union-bound upper bound on preparation failure; an upper bound only."""
    if bounds is None:
        bounds = threshold_bounds(code.ell)
    if p >= bounds.p_star:
        raise ValueError(f"p = {p} is not below p* = {float(bounds.p_star):.3e}; the series diverges")
    if d is None:
        d = code.d
    if d is None:
        raise ValueError("code distance is required")
    return FailureBound(
        boundary_span_term(code.m_x, T, p, bounds.p0),
        boundary_span_term(code.m_z, T, p, bounds.p0),
        logical_term(code.n, T, d, p, bounds.p2),
        logical_term(code.n, T, d, p, bounds.p2),
    )


def sag_to_json(sag: SyndromeAdjGraph) -> dict:
    return {
        "side": sag.side,
        "nodes": [[nd.kind, nd.index, nd.layer] for nd in sag.nodes],
        "edges": [[a, b] for a in range(len(sag.nodes)) for b in sag.adjacency[a] if a < b],
        "boundary_groups": sag.boundary_nodes,
        "degree": sag.z_degree,
    }


def marked_vertices(sag: SyndromeAdjGraph, marked) -> list[int]:
    return sorted(sag.nodes[k].vertex for k in marked)


__all__ = ["SagNode", "SyndromeAdjGraph", "build_sag", "mark_mismatch", "UnionFind", "Component", "ClusterReport",
           "components", "check_cluster_weight", "count_connected_sets", "set_count_bound", "ThresholdBounds",
           "threshold_bounds", "boundary_span_term", "logical_term", "FailureBound", "failure_bound", "sag_to_json",
           "marked_vertices"]
