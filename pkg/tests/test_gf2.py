from __future__ import annotations

import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from atg.codes import hamming_check
from atg.gf2 import (BitMatrix, BitVector, coset_leaders, inverse, nullspace_basis, rank, row_reduce, solve)


def matrices(max_rows=6, max_cols=8):
    return st.integers(1, max_rows).flatmap(
        lambda r: st.integers(1, max_cols).flatmap(
            lambda c: st.lists(st.integers(0, (1 << c) - 1), min_size=r, max_size=r).map(
                lambda rows: BitMatrix.from_ints(rows, c))))


def test_rank_examples():
    assert rank(BitMatrix.identity(3)) == 3
    assert rank(BitMatrix.zeros(2, 5)) == 0
    assert rank(hamming_check()) == 3


def test_solve_examples():
    assert str(solve(BitMatrix.identity(3), BitVector.from_str("101"))) == "101"
    assert str(solve(BitMatrix.from_rows([[1, 1, 1, 1]]), BitVector.from_str("1"))) == "1000"
    assert solve(BitMatrix.zeros(1, 3), BitVector.from_str("1")) is None


def test_solve_pivot_rule_against_enumeration():
    m = BitMatrix.from_rows([[1, 1, 1, 1]])
    sols = [x for x in itertools.product((0, 1), repeat=4) if sum(x) % 2 == 1]
    assert len(sols) == 8
    # free variables 1..3 set to zero leaves exactly one solution
    assert [x for x in sols if x[1:] == (0, 0, 0)] == [(1, 0, 0, 0)]
    assert solve(m, BitVector.from_str("1")).to_list() == [1, 0, 0, 0]


def test_solve_rejects_length_mismatch():
    with pytest.raises(ValueError):
        solve(BitMatrix.identity(3), BitVector.from_str("10"))


def test_nullspace_examples():
    assert nullspace_basis(BitMatrix.identity(2)) == []
    basis = nullspace_basis(BitMatrix.from_rows([[1, 1, 1, 1]]))
    assert len(basis) == 3 and all(v.weight % 2 == 0 for v in basis)
    h = hamming_check()
    basis = nullspace_basis(h)
    assert len(basis) == 4
    assert all(h.mul_int(v.data) == 0 for v in basis)


@given(matrices(), st.data())
def test_solve_returns_a_solution(m, data):
    x = data.draw(st.integers(0, (1 << m.cols) - 1))
    y = BitVector(m.rows, m.mul_int(x))
    sol = solve(m, y)
    assert sol is not None
    assert m.mul_int(sol.data) == y.data


@given(matrices())
def test_rank_nullity(m):
    basis = nullspace_basis(m)
    assert rank(m) + len(basis) == m.cols
    assert all(m.mul_int(v.data) == 0 for v in basis)
    assert rank(BitMatrix.from_ints([v.data for v in basis], m.cols)) == len(basis) if basis else True


@given(matrices())
def test_row_reduction_preserves_rank(m):
    reduced, pivots = row_reduce(m.data, m.cols)
    assert rank(BitMatrix.from_ints(reduced, m.cols)) == rank(m) == len(pivots)
    assert rank(m) <= min(m.rows, m.cols)


@given(matrices())
def test_rank_agrees_with_numpy_over_reals_bound(m):
    # GF(2) rank can only drop relative to rational rank
    assert rank(m) <= np.linalg.matrix_rank(m.to_array().astype(float))


def test_inverse_roundtrip():
    m = BitMatrix.from_rows([[1, 1, 0], [0, 1, 1], [0, 0, 1]])
    assert (m @ inverse(m)).data == BitMatrix.identity(3).data


def test_bits_beyond_width_rejected():
    with pytest.raises(ValueError):
        BitVector(2, 0b100)
    with pytest.raises(ValueError):
        BitMatrix.from_ints([0b100], 2)


def test_coset_leaders_match_enumeration():
    h = hamming_check()
    leader, weight = coset_leaders(h)
    for s in range(8):
        best = min((bin(e).count("1"), e) for e in range(128) if h.mul_int(e) == s)
        assert (weight[s], leader[s]) == best
