"""Bit-packed linear algebra over GF(2).

Rows and vectors are stored as Python integers: bit ``j`` of a row is the
entry in column ``j``. Python integers have arbitrary width, so a row of any
length is one packed word as far as the caller is concerned, and XOR/AND/
popcount run at C speed.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np


def parity(x: int) -> int:
    return x.bit_count() & 1


def bits_of(x: int) -> list[int]:
    """Indices of the set bits of ``x`` in ascending order."""
    out = []
    while x:
        low = x & -x
        out.append(low.bit_length() - 1)
        x ^= low
    return out


def mask_of(indices: Iterable[int]) -> int:
    m = 0
    for i in indices:
        m |= 1 << i
    return m


@dataclass(frozen=True)
class BitVector:
    len: int
    data: int = 0

    def __post_init__(self):
        if self.len < 0:
            raise ValueError("negative length")
        if self.data >> self.len:
            raise ValueError("bits set beyond vector length")

    @classmethod
    def from_list(cls, bits: Sequence[int]) -> BitVector:
        return cls(len(bits), mask_of(i for i, b in enumerate(bits) if int(b) & 1))

    @classmethod
    def from_str(cls, s: str) -> BitVector:
        return cls.from_list([int(c) for c in s])

    @classmethod
    def zeros(cls, n: int) -> BitVector:
        return cls(n, 0)

    def to_list(self) -> list[int]:
        return [(self.data >> i) & 1 for i in range(self.len)]

    def __str__(self) -> str:
        return "".join(str(b) for b in self.to_list())

    def __getitem__(self, i: int) -> int:
        if not 0 <= i < self.len:
            raise IndexError(i)
        return (self.data >> i) & 1

    def __xor__(self, other: BitVector) -> BitVector:
        _check_len(self.len, other.len)
        return BitVector(self.len, self.data ^ other.data)

    def __and__(self, other: BitVector) -> BitVector:
        _check_len(self.len, other.len)
        return BitVector(self.len, self.data & other.data)

    def dot(self, other: BitVector) -> int:
        _check_len(self.len, other.len)
        return parity(self.data & other.data)

    @property
    def weight(self) -> int:
        return self.data.bit_count()

    def support(self) -> list[int]:
        return bits_of(self.data)


def _check_len(a: int, b: int) -> None:
    if a != b:
        raise ValueError(f"length mismatch: {a} vs {b}")


@dataclass(frozen=True)
class BitMatrix:
    rows: int
    cols: int
    data: tuple[int, ...]

    def __post_init__(self):
        if len(self.data) != self.rows:
            raise ValueError("row count does not match data")
        for r in self.data:
            if r < 0 or r >> self.cols:
                raise ValueError("row has bits beyond column count")

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]], cols: int | None = None) -> BitMatrix:
        rows = [list(r) for r in rows]
        if cols is None:
            if not rows:
                raise ValueError("column count required for an empty matrix")
            cols = len(rows[0])
        for r in rows:
            if len(r) != cols:
                raise ValueError("ragged rows")
        return cls(len(rows), cols, tuple(mask_of(j for j, b in enumerate(r) if int(b) & 1) for r in rows))

    @classmethod
    def from_ints(cls, rows: Iterable[int], cols: int) -> BitMatrix:
        data = tuple(rows)
        return cls(len(data), cols, data)

    @classmethod
    def from_array(cls, a) -> BitMatrix:
        a = np.asarray(a)
        if a.ndim != 2:
            raise ValueError("expected a 2-D array")
        return cls.from_rows((a % 2).astype(int).tolist(), cols=a.shape[1])

    @classmethod
    def identity(cls, n: int) -> BitMatrix:
        return cls(n, n, tuple(1 << i for i in range(n)))

    @classmethod
    def zeros(cls, rows: int, cols: int) -> BitMatrix:
        return cls(rows, cols, (0,) * rows)

    def to_array(self) -> np.ndarray:
        out = np.zeros((self.rows, self.cols), dtype=np.uint8)
        for i, r in enumerate(self.data):
            for j in bits_of(r):
                out[i, j] = 1
        return out

    def to_lists(self) -> list[list[int]]:
        return self.to_array().astype(int).tolist()

    def row(self, i: int) -> BitVector:
        return BitVector(self.cols, self.data[i])

    def column(self, j: int) -> int:
        """Column ``j`` packed as an integer over row indices."""
        return mask_of(i for i, r in enumerate(self.data) if (r >> j) & 1)

    def row_weights(self) -> list[int]:
        return [r.bit_count() for r in self.data]

    def column_weights(self) -> list[int]:
        return [sum((r >> j) & 1 for r in self.data) for j in range(self.cols)]

    @property
    def weight(self) -> int:
        return sum(r.bit_count() for r in self.data)

    def transpose(self) -> BitMatrix:
        return BitMatrix(self.cols, self.rows, tuple(self.column(j) for j in range(self.cols)))

    def mul_vec(self, v: BitVector) -> BitVector:
        _check_len(self.cols, v.len)
        return BitVector(self.rows, self.mul_int(v.data))

    def mul_int(self, x: int) -> int:
        out = 0
        for i, r in enumerate(self.data):
            if (r & x).bit_count() & 1:
                out |= 1 << i
        return out

    def __matmul__(self, other: BitMatrix) -> BitMatrix:
        _check_len(self.cols, other.rows)
        cols_of_other = other.transpose().data
        out = []
        for r in self.data:
            out.append(mask_of(j for j, c in enumerate(cols_of_other) if (r & c).bit_count() & 1))
        return BitMatrix(self.rows, other.cols, tuple(out))

    def is_zero(self) -> bool:
        return not any(self.data)

    def vstack(self, other: BitMatrix) -> BitMatrix:
        _check_len(self.cols, other.cols)
        return BitMatrix(self.rows + other.rows, self.cols, self.data + other.data)

    def hstack(self, other: BitMatrix) -> BitMatrix:
        _check_len(self.rows, other.rows)
        return BitMatrix(self.rows, self.cols + other.cols,
                         tuple(a | (b << self.cols) for a, b in zip(self.data, other.data)))

    def kron(self, other: BitMatrix) -> BitMatrix:
        out = []
        for ra in self.data:
            for rb in other.data:
                row = 0
                for j in bits_of(ra):
                    row |= rb << (j * other.cols)
                out.append(row)
        return BitMatrix(self.rows * other.rows, self.cols * other.cols, tuple(out))

    def permute_columns(self, perm: Sequence[int]) -> BitMatrix:
        """Column ``j`` of the result is column ``perm[j]`` of ``self``."""
        out = []
        for r in self.data:
            out.append(mask_of(j for j, src in enumerate(perm) if (r >> src) & 1))
        return BitMatrix(self.rows, self.cols, tuple(out))


def row_reduce(rows: Sequence[int], cols: int) -> tuple[list[int], list[int]]:
    """Reduced row echelon form.

    Returns ``(reduced_rows, pivots)`` where ``pivots[i]`` is the column of the
    leading one of ``reduced_rows[i]``; pivots are the lowest available column.
    Zero rows are dropped.
    """
    work = [r for r in rows if r]
    reduced: list[int] = []
    pivots: list[int] = []
    for col in range(cols):
        bit = 1 << col
        idx = next((i for i, r in enumerate(work) if r & bit), None)
        if idx is None:
            continue
        pr = work.pop(idx)
        work = [r ^ pr if r & bit else r for r in work]
        work = [r for r in work if r]
        reduced = [r ^ pr if r & bit else r for r in reduced]
        reduced.append(pr)
        pivots.append(col)
        if not work:
            break
    return reduced, pivots


def rank(m: BitMatrix) -> int:
    return len(row_reduce(m.data, m.cols)[1])


def rank_of_rows(rows: Iterable[int], cols: int) -> int:
    return len(row_reduce(list(rows), cols)[1])


def solve(m: BitMatrix, y: BitVector) -> BitVector | None:
    """Some ``x`` with ``m @ x == y``, or None if the system is inconsistent.

    Free variables are set to zero; pivot variables come from the reduced
    echelon form with lowest-column pivots.
    """
    if y.len != m.rows:
        raise ValueError(f"rhs length {y.len} does not match {m.rows} rows")
    aug = [r | (((y.data >> i) & 1) << m.cols) for i, r in enumerate(m.data)]
    reduced, pivots = row_reduce(aug, m.cols + 1)
    x = 0
    for r, p in zip(reduced, pivots):
        if p == m.cols:
            return None
        if (r >> m.cols) & 1:
            x |= 1 << p
    return BitVector(m.cols, x)


def nullspace_basis(m: BitMatrix) -> list[BitVector]:
    reduced, pivots = row_reduce(m.data, m.cols)
    pivot_set = set(pivots)
    basis = []
    for f in range(m.cols):
        if f in pivot_set:
            continue
        v = 1 << f
        for r, p in zip(reduced, pivots):
            if (r >> f) & 1:
                v |= 1 << p
        basis.append(BitVector(m.cols, v))
    return basis


def inverse(m: BitMatrix) -> BitMatrix:
    if m.rows != m.cols:
        raise ValueError("matrix is not square")
    n = m.rows
    aug = [r | (1 << (n + i)) for i, r in enumerate(m.data)]
    reduced, pivots = row_reduce(aug, 2 * n)
    if pivots[:n] != list(range(n)) or len(pivots) < n:
        raise ValueError("matrix is singular")
    return BitMatrix(n, n, tuple(r >> n for r in reduced[:n]))


def in_row_space(rows: Sequence[int], cols: int, v: int) -> bool:
    return rank_of_rows(list(rows) + [v], cols) == rank_of_rows(rows, cols)


def coset_leaders(h: BitMatrix) -> tuple[np.ndarray, np.ndarray]:
    """Minimum-weight solution of ``h @ e = s`` for every syndrome ``s``.

    Ties go to the smallest integer value of ``e`` (bit ``i`` weighted
    ``2**i``). Returns ``(leader, weight)`` arrays indexed by syndrome;
    unreachable syndromes have weight -1. Enumerates all ``2**cols`` vectors.
    """
    n, m = h.cols, h.rows
    if n > 24:
        raise ValueError(f"coset table over {n} columns is too large")
    es = np.arange(1 << n, dtype=np.int64)
    syn = np.zeros(1 << n, dtype=np.int64)
    wt = np.zeros(1 << n, dtype=np.int64)
    for i in range(n):
        bit = (es >> i) & 1
        syn ^= bit * h.column(i)
        wt += bit
    order = np.lexsort((es, wt))
    syn_sorted = syn[order]
    _, first = np.unique(syn_sorted, return_index=True)
    leader = np.full(1 << m, -1, dtype=np.int64)
    weight = np.full(1 << m, -1, dtype=np.int64)
    chosen = order[first]
    leader[syn[chosen]] = es[chosen]
    weight[syn[chosen]] = wt[chosen]
    return leader, weight
