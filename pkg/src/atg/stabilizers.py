"""Products of graph-state stabilizers that act as pure X on the measured bulk.

Every element records the multiset of graph stabilizers ``G_u`` it is built
from together with the Pauli it is claimed to equal. ``verify_factorization``
multiplies the generators out in the symplectic representation and compares.
Supports are integer masks over the ATG vertex indices.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .codes import LogicalBasis
from .gf2 import bits_of, mask_of
from .graph import AtgGraph, Kind

META_Z = "meta_z"
META_X = "meta_x"
BND_Z = "bnd_z"
BND_X = "bnd_x"
LOGICAL_X = "logical_x"
LOGICAL_ZZ = "logical_zz"

META_KINDS = (META_Z, META_X)


class FactorizationError(RuntimeError):
    """A generated element does not multiply out to its claimed Pauli."""


@dataclass(frozen=True)
class GraphStabilizer:
    center: int
    x_support: int
    z_support: int


def graph_stabilizer(g: AtgGraph, u) -> GraphStabilizer:
    if not isinstance(u, int):
        u = g.index(u)
    if not 0 <= u < g.n_vertices:
        raise KeyError(f"vertex {u} is not in the graph")
    return GraphStabilizer(u, 1 << u, mask_of(g.adjacency[u]))


@dataclass(frozen=True)
class StabilizerElement:
    kind: str
    generators: tuple[int, ...]
    bulk_x: int
    boundary_x: int = 0
    boundary_z: int = 0
    layer: int = 0
    index: int = 0
    surfaces: tuple[int, ...] = field(default=())

    def label(self) -> str:
        return f"{self.kind}[{self.index}]@{self.layer}"


@dataclass(frozen=True)
class FactorizationReport:
    ok: bool
    sign: int
    stray_x: tuple[int, ...] = ()
    stray_z: tuple[int, ...] = ()
    misplaced: tuple[int, ...] = ()

    def __bool__(self) -> bool:
        return self.ok


def multiply_generators(g: AtgGraph, generators) -> tuple[int, int, int]:
    """Product of the G_u as ``i**k X^x Z^z``; returns ``(x, z, k mod 4)``."""
    x = z = k = 0
    for u in generators:
        gx, gz = 1 << u, mask_of(g.adjacency[u])
        # moving gx left past the accumulated Z part
        k += 2 * (z & gx).bit_count()
        x ^= gx
        z ^= gz
    return x, z, k % 4


def pauli_sign(x: int, z: int, k: int) -> int:
    """Sign of ``i**k X^x Z^z`` relative to the Hermitian Pauli with the same support."""
    e = (k - (x & z).bit_count()) % 4
    if e == 0:
        return 1
    if e == 2:
        return -1
    return 0


def verify_factorization(g: AtgGraph, e: StabilizerElement, measured_mask: int | None = None) -> FactorizationReport:
    if measured_mask is None:
        measured_mask = g.bulk_mask
    x, z, k = multiply_generators(g, e.generators)
    want_x = e.bulk_x | e.boundary_x
    stray_x = x ^ want_x
    stray_z = z ^ e.boundary_z
    misplaced = (e.bulk_x & ~measured_mask) | ((e.boundary_x | e.boundary_z) & measured_mask)
    sign = pauli_sign(x, z, k)
    ok = not stray_x and not stray_z and not misplaced and sign == 1
    if e.kind in META_KINDS and (e.boundary_x or e.boundary_z):
        ok = False
    return FactorizationReport(ok, sign, tuple(bits_of(stray_x)), tuple(bits_of(stray_z)), tuple(bits_of(misplaced)))


def _checked(g: AtgGraph, elements: list[StabilizerElement], measured_mask: int | None = None) -> list[StabilizerElement]:
    for e in elements:
        rep = verify_factorization(g, e, measured_mask)
        if not rep:
            raise FactorizationError(f"{e.label()} does not factorize: {rep}")
    return elements


def meta_check(g: AtgGraph, c: int, t: int) -> StabilizerElement:
    """Meta-check centred on check ``c`` of the layer-t type, one layer either side."""
    code = g.code
    sup = code.check_supports("Z" if t % 2 == 0 else "X")[c]
    gens = [g.check_vertex(c, t - 1), g.check_vertex(c, t + 1)] + [g.code_vertex(i, t) for i in sup]
    return StabilizerElement(META_Z if t % 2 == 0 else META_X, tuple(gens), mask_of(gens), layer=t, index=c)


def meta_checks(g: AtgGraph, skip_layers=()) -> list[StabilizerElement]:
    """Z meta-checks on every even layer, X meta-checks on interior odd layers."""
    out = []
    for t in range(2, 2 * g.T + 1):
        if t in skip_layers:
            continue
        m = g.code.m_z if t % 2 == 0 else g.code.m_x
        out.extend(meta_check(g, c, t) for c in range(m))
    return _checked(g, out)


def _z_check_element(g: AtgGraph, c: int, u: int) -> StabilizerElement:
    sup = g.code.check_supports("Z")[c]
    cv = g.check_vertex(c, u)
    return StabilizerElement(BND_Z, (cv,), 1 << cv, boundary_z=mask_of(g.code_vertex(i, u) for i in sup),
                             layer=u, index=c, surfaces=(u,))


def boundary_code_stabilizers(g: AtgGraph) -> list[StabilizerElement]:
    code = g.code
    top = g.n_layers
    out = []
    for u in (1, top):
        out.extend(_z_check_element(g, c, u) for c in range(code.m_z))
    for u, inner in ((1, 2), (top, top - 1)):
        for c, sup in enumerate(code.check_supports("X")):
            cv = g.check_vertex(c, inner)
            gens = (cv,) + tuple(g.code_vertex(i, u) for i in sup)
            out.append(StabilizerElement(BND_X, gens, 1 << cv, boundary_x=mask_of(gens[1:]),
                                         layer=u, index=c, surfaces=(u,)))
    return _checked(g, out)


def encoded_logical_stabilizers(g: AtgGraph, lb: LogicalBasis) -> list[StabilizerElement]:
    top = g.n_layers
    xx, zz = [], []
    for j, (ax, az) in enumerate(zip(lb.x_logicals, lb.z_logicals)):
        gens = tuple(g.code_vertex(i, t) for t in range(1, top + 1, 2) for i in ax.support())
        bnd = mask_of(g.code_vertex(i, t) for t in (1, top) for i in ax.support())
        xx.append(StabilizerElement(LOGICAL_X, gens, mask_of(gens) & ~bnd, boundary_x=bnd,
                                    index=j, surfaces=(1, top)))
        gens = tuple(g.code_vertex(i, t) for t in range(2, top, 2) for i in az.support())
        bnd = mask_of(g.code_vertex(i, t) for t in (1, top) for i in az.support())
        zz.append(StabilizerElement(LOGICAL_ZZ, gens, mask_of(gens), boundary_z=bnd,
                                    index=j, surfaces=(1, top)))
    return _checked(g, xx + zz)


def bell_stabilizers(g: AtgGraph, lb: LogicalBasis) -> tuple[list[StabilizerElement], list[StabilizerElement]]:
    return meta_checks(g), boundary_code_stabilizers(g) + encoded_logical_stabilizers(g, lb)


def symplectic_product(a: tuple[int, int], b: tuple[int, int]) -> int:
    return ((a[0] & b[1]).bit_count() + (a[1] & b[0]).bit_count()) & 1


def element_to_json(g: AtgGraph, e: StabilizerElement, measured_mask: int | None = None) -> dict:
    rep = verify_factorization(g, e, measured_mask)
    vj = lambda m: [g.vertices[i].to_json() for i in bits_of(m)]  # noqa: E731
    return {
        "kind": e.kind,
        "index": e.index,
        "layer": e.layer,
        "generators": [g.vertices[u].to_json() for u in e.generators],
        "bulk_x": vj(e.bulk_x),
        "boundary_x": vj(e.boundary_x),
        "boundary_z": vj(e.boundary_z),
        "verified": rep.ok,
        "sign": rep.sign,
    }


def check_kind(e: StabilizerElement) -> Kind | None:
    return {BND_Z: Kind.ZCHECK, BND_X: Kind.XCHECK}.get(e.kind)
