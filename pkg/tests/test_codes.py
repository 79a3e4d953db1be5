from __future__ import annotations

import json

import pytest
from hypothesis import given
from hypothesis import strategies as st

from atg.codes import (CodeValidationError, DistanceRefused, bundled_code_path, code_from_json, distance_bruteforce,
                       enumerate_small_css, fixture, hamming_check, hypergraph_product, is_logical_x, is_logical_z,
                       logical_basis, parse_code_file, repetition_check, syndrome_x, syndrome_z, validate_css)
from atg.gf2 import BitMatrix, BitVector, in_row_space, rank


def test_validate_422():
    row = BitMatrix.from_rows([[1, 1, 1, 1]])
    c = validate_css(row, row)
    assert (c.n, c.m_x, c.m_z, c.k, c.ell) == (4, 1, 1, 2, 4)


def test_validate_steane():
    c = validate_css(hamming_check(), hamming_check())
    assert (c.n, c.k, c.ell) == (7, 1, 6)


def test_non_orthogonal_rows_named():
    with pytest.raises(CodeValidationError, match="hx row 0 and hz row 0"):
        validate_css(BitMatrix.from_rows([[1, 1]]), BitMatrix.from_rows([[1, 0]]))


def test_rank_deficient_rejected():
    h = BitMatrix.from_rows([[1, 1, 0, 0], [1, 1, 0, 0]])
    with pytest.raises(CodeValidationError, match="rank deficient"):
        validate_css(h, BitMatrix.from_rows([[1, 1, 1, 1]]))


def test_logical_basis_422_pairing_identity(code422):
    lb = logical_basis(code422)
    assert len(lb.x_logicals) == len(lb.z_logicals) == 2
    assert lb.pairing().tolist() == [[1, 0], [0, 1]]


def test_steane_weight3_logical_in_basis_coset(steane):
    lb = logical_basis(steane)
    v = BitVector.from_str("1110000").data
    # the weight-3 vector is itself a logical X in the same class as the basis element
    assert is_logical_x(steane, v)
    assert in_row_space(steane.h_x.data, 7, v ^ lb.x_logicals[0].data)


def test_k_zero_code_has_empty_basis():
    c = validate_css(BitMatrix.from_rows([[1, 1]]), BitMatrix.from_rows([[1, 1]]))
    assert c.k == 0
    lb = logical_basis(c)
    assert lb.x_logicals == () and lb.z_logicals == ()
    assert distance_bruteforce(c) is None


def test_distances():
    assert distance_bruteforce(fixture("422")) == 2
    assert distance_bruteforce(fixture("steane")) == 3


def test_distance_refused_above_cap():
    c = hypergraph_product(repetition_check(5), repetition_check(5))
    assert c.n == 41
    with pytest.raises(DistanceRefused):
        distance_bruteforce(c, cap=25)


def test_surface_13():
    c = hypergraph_product(repetition_check(3), repetition_check(3))
    assert (c.n, c.k) == (13, 1)
    assert distance_bruteforce(c) == 3


def test_hgp_5_1_2():
    h = BitMatrix.from_rows([[1, 1]])
    c = hypergraph_product(h, h)
    assert (c.n, c.k) == (5, 1)
    assert distance_bruteforce(c) == 2


def small_checks():
    return st.integers(1, 3).flatmap(
        lambda m: st.integers(2, 4).flatmap(
            lambda n: st.lists(st.integers(1, (1 << n) - 1), min_size=m, max_size=m).map(
                lambda rows: BitMatrix.from_ints(rows, n))))


@given(small_checks(), small_checks())
def test_hgp_orthogonal_and_k_formula(h1, h2):
    c = hypergraph_product(h1, h2)
    assert (c.h_x @ c.h_z.transpose()).is_zero()
    r1, r2 = rank(h1), rank(h2)
    k1, k2 = h1.cols - r1, h2.cols - r2
    k1t, k2t = h1.rows - r1, h2.rows - r2
    assert c.k == k1 * k2 + k1t * k2t


def test_syndromes(code422, steane):
    assert syndrome_x(code422, BitVector.zeros(4)).data == 0
    assert syndrome_x(code422, BitVector.from_str("1000")).to_list() == [1]
    for r in steane.h_z.data:
        assert syndrome_x(steane, BitVector(7, r)).data == 0
    with pytest.raises(ValueError):
        syndrome_z(steane, BitVector.zeros(5))


def test_random_codes_invariants():
    for c in enumerate_small_css(max_n=7, seed=3, count=20):
        assert c.k == c.n - c.m_x - c.m_z
        for r in c.h_z.data:
            assert c.h_x.mul_int(r) == 0
        lb = logical_basis(c)
        assert lb.pairing().tolist() == [[int(i == j) for j in range(c.k)] for i in range(c.k)]
        for x in lb.x_logicals:
            assert is_logical_x(c, x.data)
        for z in lb.z_logicals:
            assert is_logical_z(c, z.data)
        assert max(c.h_x.row_weights() + c.h_z.row_weights()) <= c.ell


def test_bundled_files_parse():
    for name in ("422", "steane", "hgp13"):
        c = parse_code_file(bundled_code_path(name))
        f = fixture(name)
        assert c.h_x == f.h_x and c.h_z == f.h_z and c.d == f.d


def test_parse_malformed_json(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text('{"hx": [[1, 1]],\n "hz": [[1, 1]')
    with pytest.raises(CodeValidationError, match="line 2"):
        parse_code_file(p)


def test_parse_unequal_widths():
    with pytest.raises(CodeValidationError, match="unequal column counts"):
        code_from_json({"hx": [[1, 1, 1, 1]], "hz": [[1, 1]]})


def test_parse_schema_errors():
    with pytest.raises(CodeValidationError, match="missing field 'hz'"):
        code_from_json({"hx": [[1, 1]]})
    with pytest.raises(CodeValidationError, match=r"hx\[0\]\[1\]"):
        code_from_json({"hx": [[1, 2]], "hz": [[1, 1]]})
    with pytest.raises(CodeValidationError, match="non-orthogonal|odd number"):
        code_from_json(json.loads('{"hx": [[1, 1, 0]], "hz": [[1, 0, 0]]}'))
