"""CSS code model, logical operators, and small fixture codes."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from .gf2 import BitMatrix, BitVector, bits_of, in_row_space, inverse, nullspace_basis, parity, rank, row_reduce


class CodeValidationError(ValueError):
    pass


class DistanceRefused(ValueError):
    pass


@dataclass(frozen=True)
class CssCode:
    h_x: BitMatrix
    h_z: BitMatrix
    name: str = ""
    d: int | None = field(default=None, compare=False)

    @property
    def n(self) -> int:
        return self.h_x.cols

    @property
    def m_x(self) -> int:
        return self.h_x.rows

    @property
    def m_z(self) -> int:
        return self.h_z.rows

    @property
    def k(self) -> int:
        return self.n - self.m_x - self.m_z

    @property
    def ell(self) -> int:
        # max of any check weight and any qubit's combined check degree
        row_w = self.h_x.row_weights() + self.h_z.row_weights()
        col_w = [a + b for a, b in zip(self.h_x.column_weights(), self.h_z.column_weights())]
        return max(row_w + col_w + [0])

    def check_supports(self, side: str) -> list[list[int]]:
        h = self.h_x if side == "X" else self.h_z
        return [bits_of(r) for r in h.data]

    def with_distance(self, d: int | None) -> CssCode:
        return CssCode(self.h_x, self.h_z, self.name, d)

    def to_json(self) -> dict:
        out = {"name": self.name, "hx": self.h_x.to_lists(), "hz": self.h_z.to_lists()}
        if self.d is not None:
            out["d"] = self.d
        return out


def validate_css(h_x: BitMatrix, h_z: BitMatrix, name: str = "") -> CssCode:
    if h_x.cols != h_z.cols:
        raise CodeValidationError(f"hx has {h_x.cols} columns but hz has {h_z.cols}")
    for a, ra in enumerate(h_x.data):
        for b, rb in enumerate(h_z.data):
            if parity(ra & rb):
                raise CodeValidationError(f"hx row {a} and hz row {b} overlap on an odd number of qubits")
    if rank(h_x) < h_x.rows:
        raise CodeValidationError(f"hx is rank deficient (rank {rank(h_x)} < {h_x.rows} rows)")
    if rank(h_z) < h_z.rows:
        raise CodeValidationError(f"hz is rank deficient (rank {rank(h_z)} < {h_z.rows} rows)")
    return CssCode(h_x, h_z, name)


@dataclass(frozen=True)
class LogicalBasis:
    x_logicals: tuple[BitVector, ...]
    z_logicals: tuple[BitVector, ...]

    def pairing(self) -> np.ndarray:
        k = len(self.x_logicals)
        return np.array([[self.x_logicals[i].dot(self.z_logicals[j]) for j in range(k)] for i in range(k)],
                        dtype=np.uint8).reshape(k, k)


def _quotient_reps(kernel: BitMatrix, stab_rows: tuple[int, ...], n: int) -> list[int]:
    """Kernel vectors independent modulo the stabilizer row space, greedily in order."""
    reps: list[int] = []
    span = list(stab_rows)
    base = len(row_reduce(span, n)[1])
    for v in nullspace_basis(kernel):
        trial = span + [v.data]
        r = len(row_reduce(trial, n)[1])
        if r > base:
            span, base = trial, r
            reps.append(v.data)
    return reps


def logical_basis(code: CssCode) -> LogicalBasis:
    n = code.n
    xs = _quotient_reps(code.h_z, code.h_x.data, n)
    zs = _quotient_reps(code.h_x, code.h_z.data, n)
    if len(xs) != code.k or len(zs) != code.k:
        raise CodeValidationError("logical operator count does not match k")
    k = code.k
    if k == 0:
        return LogicalBasis((), ())
    pair = BitMatrix.from_rows([[parity(x & z) for z in zs] for x in xs], cols=k)
    # z' = (M^-1)^T z makes the pairing the identity
    inv_t = inverse(pair).transpose()
    new_zs = []
    for r in inv_t.data:
        v = 0
        for j in bits_of(r):
            v ^= zs[j]
        new_zs.append(v)
    return LogicalBasis(tuple(BitVector(n, x) for x in xs), tuple(BitVector(n, z) for z in new_zs))


def is_logical_x(code: CssCode, v: int) -> bool:
    return code.h_z.mul_int(v) == 0 and not in_row_space(code.h_x.data, code.n, v)


def is_logical_z(code: CssCode, v: int) -> bool:
    return code.h_x.mul_int(v) == 0 and not in_row_space(code.h_z.data, code.n, v)


def distance_bruteforce(code: CssCode, cap: int = 25) -> int | None:
    """Exact distance by enumerating all 2**n vectors; None when k = 0."""
    n = code.n
    if n > cap:
        raise DistanceRefused(f"n = {n} exceeds the enumeration cap {cap}")
    if code.k == 0:
        return None
    es = np.arange(1 << n, dtype=np.int64)
    wt = np.zeros_like(es)
    syn_x = np.zeros_like(es)
    syn_z = np.zeros_like(es)
    for i in range(n):
        bit = (es >> i) & 1
        wt += bit
        syn_x ^= bit * code.h_x.column(i)
        syn_z ^= bit * code.h_z.column(i)
    best = None
    for syn, stab_rows in ((syn_z, code.h_x.data), (syn_x, code.h_z.data)):
        cand = es[(syn == 0) & (es != 0)]
        cand = cand[np.argsort(wt[(syn == 0) & (es != 0)], kind="stable")]
        for v in cand.tolist():
            w = int(v).bit_count()
            if best is not None and w >= best:
                break
            if not in_row_space(stab_rows, n, int(v)):
                best = w
                break
    return best


def hypergraph_product(h1: BitMatrix, h2: BitMatrix, name: str = "") -> CssCode:
    """Hypergraph product of two classical check matrices.

    Qubits are ordered as the n1*n2 block followed by the m1*m2 block.
    """
    m1, n1 = h1.rows, h1.cols
    m2, n2 = h2.rows, h2.cols
    h_x = h1.kron(BitMatrix.identity(n2)).hstack(BitMatrix.identity(m1).kron(h2.transpose()))
    h_z = BitMatrix.identity(n1).kron(h2).hstack(h1.transpose().kron(BitMatrix.identity(m2)))
    return validate_css(_independent_rows(h_x), _independent_rows(h_z), name)


def _independent_rows(h: BitMatrix) -> BitMatrix:
    """Drop rows that are sums of earlier rows, keeping the first spanning subset."""
    kept: list[int] = []
    r = 0
    for row in h.data:
        if len(row_reduce(kept + [row], h.cols)[1]) > r:
            kept.append(row)
            r += 1
    return BitMatrix.from_ints(kept, h.cols)


def syndrome_x(code: CssCode, e: BitVector) -> BitVector:
    return code.h_x.mul_vec(e)


def syndrome_z(code: CssCode, e: BitVector) -> BitVector:
    return code.h_z.mul_vec(e)


def repetition_check(n: int) -> BitMatrix:
    return BitMatrix.from_rows([[1 if j in (i, i + 1) else 0 for j in range(n)] for i in range(n - 1)], cols=n)


def hamming_check() -> BitMatrix:
    return BitMatrix.from_rows([
        [1, 0, 1, 0, 1, 0, 1],
        [0, 1, 1, 0, 0, 1, 1],
        [0, 0, 0, 1, 1, 1, 1],
    ])


def code_422() -> CssCode:
    row = BitMatrix.from_rows([[1, 1, 1, 1]])
    return validate_css(row, row, "422").with_distance(2)


def steane() -> CssCode:
    h = hamming_check()
    return validate_css(h, h, "steane").with_distance(3)


def surface_13() -> CssCode:
    return hypergraph_product(repetition_check(3), repetition_check(3), "hgp13").with_distance(3)


def fixture(name: str) -> CssCode:
    builders = {"422": code_422, "steane": steane, "hgp13": surface_13}
    try:
        return builders[name]()
    except KeyError:
        raise KeyError(f"unknown fixture {name!r}; known: {sorted(builders)}") from None


def bundled_code_path(name: str) -> Path:
    return Path(str(resources.files("atg") / "data" / f"{name}.json"))


def code_from_json(obj, source: str = "<json>") -> CssCode:
    if not isinstance(obj, dict):
        raise CodeValidationError(f"{source}: top level must be an object")
    for key in ("hx", "hz"):
        if key not in obj:
            raise CodeValidationError(f"{source}: missing field {key!r}")
        mat = obj[key]
        if not isinstance(mat, list) or not all(isinstance(r, list) for r in mat):
            raise CodeValidationError(f"{source}: field {key!r} must be a list of rows")
        for i, r in enumerate(mat):
            for j, b in enumerate(r):
                if b not in (0, 1) or isinstance(b, bool):
                    raise CodeValidationError(f"{source}: {key}[{i}][{j}] = {b!r} is not 0 or 1")
    hx, hz = obj["hx"], obj["hz"]
    widths = {len(r) for r in hx} | {len(r) for r in hz}
    if len(widths) != 1:
        raise CodeValidationError(f"{source}: hx/hz rows have unequal column counts {sorted(widths)}")
    n = widths.pop()
    name = obj.get("name", "")
    if not isinstance(name, str):
        raise CodeValidationError(f"{source}: field 'name' must be a string")
    d = obj.get("d")
    if d is not None and (not isinstance(d, int) or isinstance(d, bool) or d < 1):
        raise CodeValidationError(f"{source}: field 'd' must be a positive integer")
    return validate_css(BitMatrix.from_rows(hx, cols=n), BitMatrix.from_rows(hz, cols=n), name).with_distance(d)


def parse_code_file(path) -> CssCode:
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise CodeValidationError(f"{path}: malformed JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    return code_from_json(obj, str(path))


def enumerate_small_css(max_n: int = 6, seed: int = 0, count: int = 20):
    """Random small valid CSS codes for property tests.

    Draws a random h_x, then a random full-rank h_z inside its dual.
    """
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < count:
        n = int(rng.integers(3, max_n + 1))
        mx = int(rng.integers(1, n - 1))
        hx = rng.integers(0, 2, size=(mx, n))
        bx = _independent_rows(BitMatrix.from_array(hx))
        if bx.rows == 0:
            continue
        dual = nullspace_basis(bx)
        # exclude the row space of h_x itself to keep k > 0 more often
        cand = [v.data for v in dual if v.data]
        if not cand:
            continue
        mz = int(rng.integers(1, len(cand) + 1))
        pick = rng.permutation(len(cand))[:mz]
        rows = []
        for i in pick:
            combo = cand[i]
            for j in range(len(cand)):
                if rng.random() < 0.3:
                    combo ^= cand[j]
            if combo:
                rows.append(combo)
        bz = _independent_rows(BitMatrix.from_ints(rows, n))
        if bz.rows == 0 or bx.rows + bz.rows > n:
            continue
        try:
            code = validate_css(bx, bz, f"rand{len(out)}")
        except CodeValidationError:
            continue
        out.append(code)
    return out
