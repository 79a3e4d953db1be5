from __future__ import annotations

import json

import pytest

from atg.codes import enumerate_small_css, fixture
from atg.graph import Kind, bell_pattern, build_atg, pattern_for_layers, prep_schedule
from conftest import graph


def closed_form(code, T):
    v = (2 * T + 1) * code.n + (T + 1) * code.m_z + T * code.m_x
    e = 2 * T * code.n + (T + 1) * code.h_z.weight + T * code.h_x.weight
    return v, e


def test_counts_examples():
    g = graph("422", 1)
    assert (g.n_vertices, len(g.edges)) == (15, 20)
    g = graph("steane", 2)
    assert (g.n_vertices, len(g.edges)) == (50, 88)


def test_counts_random_codes():
    for c in enumerate_small_css(max_n=7, seed=11, count=20):
        for T in (1, 2, 3):
            g = build_atg(c, T)
            assert (g.n_vertices, len(g.edges)) == closed_form(c, T)
            assert g.max_degree() <= c.ell + 2


def test_t_zero_rejected():
    with pytest.raises(ValueError):
        build_atg(fixture("422"), 0)


def test_layer_kinds_and_vertical_edges():
    g = graph("steane", 2)
    for v in g.vertices:
        if v.kind == Kind.ZCHECK:
            assert v.layer % 2 == 1
        if v.kind == Kind.XCHECK:
            assert v.layer % 2 == 0
    for a, b in g.edges:
        va, vb = g.vertices[a], g.vertices[b]
        if va.layer != vb.layer:
            assert va.kind == vb.kind == Kind.CODE and va.index == vb.index and abs(va.layer - vb.layer) == 1


def test_vertex_order_layer_major():
    g = graph("steane", 2)
    keys = [(v.layer, v.kind != Kind.CODE, v.index) for v in g.vertices]
    assert keys == sorted(keys)


def test_boundary_partition():
    g = graph("steane", 2)
    assert len(g.boundary) == 14
    assert {g.vertices[v].layer for v in g.boundary} == {1, 5}
    assert g.bulk | g.boundary == frozenset(range(g.n_vertices))


def test_layer_tanner_isomorphism():
    # on each layer the code/check edges reproduce H_Z (odd) or H_X (even) exactly
    g = graph("steane", 2)
    code = g.code
    for t in range(1, 6):
        h = code.h_z if t % 2 else code.h_x
        got = set()
        for a, b in g.edges:
            va, vb = g.vertices[a], g.vertices[b]
            if va.layer == vb.layer == t:
                q, c = (va, vb) if va.kind == Kind.CODE else (vb, va)
                got.add((c.index, q.index))
        want = {(c, i) for c, row in enumerate(h.to_lists()) for i, b in enumerate(row) if b}
        assert got == want


def test_bell_pattern_sizes():
    assert len(bell_pattern(graph("steane", 2)).measured) == 36
    g = graph("422", 1)
    pat = bell_pattern(g)
    assert len(pat.measured) == 7
    assert not pat.measured & g.boundary
    assert pat.unmeasured_layers == (1, 3)


def test_pattern_rejects_even_layer():
    with pytest.raises(ValueError):
        pattern_for_layers(graph("422", 2), (1, 2, 5))


def test_schedule_is_proper_colouring():
    for name, T in (("422", 1), ("steane", 2), ("hgp13", 2)):
        g = graph(name, T)
        layers = prep_schedule(g)
        assert len(layers) <= 2 * g.max_degree() - 1 <= 2 * g.code.ell + 3
        seen = []
        for layer in layers:
            ends = [v for e in layer for v in e]
            assert len(ends) == len(set(ends))
            seen.extend(layer)
        assert sorted(seen) == sorted(g.edges)


def test_schedule_on_path():
    from atg.graph import edge_colouring

    assert len(edge_colouring(3, [(0, 1), (1, 2)])) == 2


def test_serialization_stable():
    a = json.dumps(build_atg(fixture("steane"), 2).to_json())
    b = json.dumps(build_atg(fixture("steane"), 2).to_json())
    assert a == b
