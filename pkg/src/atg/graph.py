"""The alternating Tanner graph: layered cluster-state graph of a CSS code.

Layers run 1..2T+1. Every layer holds a copy of the n code qubits, linked
vertically to their copies on adjacent layers. Odd layers carry the Z checks
wired as the Z Tanner graph, even layers the X checks wired as the X Tanner
graph. Vertices are numbered layer-major, code qubits before checks, then by
index.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import IntEnum
from typing import NamedTuple

from .codes import CssCode
from .gf2 import bits_of, mask_of


class Kind(IntEnum):
    CODE = 0
    XCHECK = 1
    ZCHECK = 2

    @property
    def label(self) -> str:
        return {Kind.CODE: "code", Kind.XCHECK: "xcheck", Kind.ZCHECK: "zcheck"}[self]

    @classmethod
    def from_label(cls, s: str) -> Kind:
        return {"code": cls.CODE, "xcheck": cls.XCHECK, "zcheck": cls.ZCHECK}[s]


class VertexId(NamedTuple):
    kind: Kind
    index: int
    layer: int

    def to_json(self) -> list:
        return [self.kind.label, self.index, self.layer]


@dataclass(frozen=True, eq=False)
class AtgGraph:
    code: CssCode
    T: int
    vertices: tuple[VertexId, ...]
    adjacency: tuple[tuple[int, ...], ...]
    edges: tuple[tuple[int, int], ...]
    boundary_mask: int

    def __post_init__(self):
        object.__setattr__(self, "_index", {v: i for i, v in enumerate(self.vertices)})

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    @property
    def all_mask(self) -> int:
        return (1 << len(self.vertices)) - 1

    @property
    def bulk_mask(self) -> int:
        return self.all_mask & ~self.boundary_mask

    @property
    def bulk(self) -> frozenset[int]:
        return frozenset(bits_of(self.bulk_mask))

    @property
    def boundary(self) -> frozenset[int]:
        return frozenset(bits_of(self.boundary_mask))

    @property
    def n_layers(self) -> int:
        return 2 * self.T + 1

    def index(self, v: VertexId | tuple) -> int:
        if not isinstance(v, VertexId):
            v = VertexId(Kind(v[0]), v[1], v[2])
        try:
            return self._index[v]
        except KeyError:
            raise KeyError(f"vertex {v} is not in the graph") from None

    def vid(self, kind: Kind, index: int, layer: int) -> int:
        return self._index[VertexId(kind, index, layer)]

    def code_vertex(self, i: int, t: int) -> int:
        return self._index[VertexId(Kind.CODE, i, t)]

    def check_vertex(self, c: int, t: int) -> int:
        kind = Kind.ZCHECK if t % 2 == 1 else Kind.XCHECK
        return self._index[VertexId(kind, c, t)]

    def layer_code_mask(self, t: int) -> int:
        return mask_of(self.code_vertex(i, t) for i in range(self.code.n))

    def layer_check_mask(self, t: int) -> int:
        m = self.code.m_z if t % 2 == 1 else self.code.m_x
        return mask_of(self.check_vertex(c, t) for c in range(m))

    def code_layer_base(self, t: int) -> int:
        """Vertex index of code qubit 0 on layer t; layer t occupies base..base+n-1."""
        return self.code_vertex(0, t)

    def check_layer_base(self, t: int) -> int:
        return self.check_vertex(0, t)

    def max_degree(self) -> int:
        return max((len(a) for a in self.adjacency), default=0)

    def to_json(self) -> dict:
        return {
            "code": self.code.name,
            "T": self.T,
            "vertices": [v.to_json() for v in self.vertices],
            "edges": [[self.vertices[a].to_json(), self.vertices[b].to_json()] for a, b in self.edges],
            "bulk": [self.vertices[i].to_json() for i in sorted(self.bulk)],
            "boundary": [self.vertices[i].to_json() for i in sorted(self.boundary)],
        }


def vertex_order(code: CssCode, T: int, layers=None) -> list[VertexId]:
    out = []
    for t in layers if layers is not None else range(1, 2 * T + 2):
        out.extend(VertexId(Kind.CODE, i, t) for i in range(code.n))
        if t % 2 == 1:
            out.extend(VertexId(Kind.ZCHECK, c, t) for c in range(code.m_z))
        else:
            out.extend(VertexId(Kind.XCHECK, c, t) for c in range(code.m_x))
    return out


def layered_edges(code: CssCode, index: dict, layers) -> list[tuple[int, int]]:
    layers = list(layers)
    edges = []
    z_sup = code.check_supports("Z")
    x_sup = code.check_supports("X")
    for t in layers:
        for i in range(code.n):
            if t + 1 in layers:
                edges.append((index[VertexId(Kind.CODE, i, t)], index[VertexId(Kind.CODE, i, t + 1)]))
        kind, sup = (Kind.ZCHECK, z_sup) if t % 2 == 1 else (Kind.XCHECK, x_sup)
        for c, qubits in enumerate(sup):
            for i in qubits:
                edges.append((index[VertexId(Kind.CODE, i, t)], index[VertexId(kind, c, t)]))
    return sorted((min(a, b), max(a, b)) for a, b in edges)


def build_atg(code: CssCode, T: int) -> AtgGraph:
    if T < 1:
        raise ValueError(f"T must be at least 1, got {T}")
    vertices = vertex_order(code, T)
    index = {v: i for i, v in enumerate(vertices)}
    edges = layered_edges(code, index, range(1, 2 * T + 2))
    adj: list[list[int]] = [[] for _ in vertices]
    for a, b in edges:
        adj[a].append(b)
        adj[b].append(a)
    boundary = mask_of(index[VertexId(Kind.CODE, i, t)] for t in (1, 2 * T + 1) for i in range(code.n))
    return AtgGraph(code, T, tuple(vertices), tuple(tuple(sorted(a)) for a in adj), tuple(edges), boundary)


@dataclass(frozen=True)
class MeasurementPattern:
    measured_mask: int
    unmeasured_layers: tuple[int, ...]

    @property
    def measured(self) -> frozenset[int]:
        return frozenset(bits_of(self.measured_mask))


def pattern_for_layers(g: AtgGraph, layers) -> MeasurementPattern:
    layers = tuple(sorted(layers))
    for t in layers:
        if t % 2 == 0 or not 1 <= t <= g.n_layers:
            raise ValueError(f"unmeasured layer {t} must be odd and within 1..{g.n_layers}")
    kept = 0
    for t in layers:
        kept |= g.layer_code_mask(t)
    return MeasurementPattern(g.all_mask & ~kept, layers)


def bell_pattern(g: AtgGraph) -> MeasurementPattern:
    return pattern_for_layers(g, (1, g.n_layers))


def edge_colouring(n_vertices: int, edges) -> list[list[tuple[int, int]]]:
    """Greedy proper edge colouring; each colour class is one layer of CZ gates."""
    used: list[set[int]] = [set() for _ in range(n_vertices)]
    layers: list[list[tuple[int, int]]] = []
    for a, b in edges:
        colour = 0
        while colour in used[a] or colour in used[b]:
            colour += 1
        used[a].add(colour)
        used[b].add(colour)
        while len(layers) <= colour:
            layers.append([])
        layers[colour].append((a, b))
    return layers


def prep_schedule(g: AtgGraph) -> list[list[tuple[int, int]]]:
    return edge_colouring(g.n_vertices, g.edges)
