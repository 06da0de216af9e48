"""Exact sparse linear algebra over prime fields GF(p).

Columns are reduced against a growing pivot basis keyed by their largest
nonzero row ("low"). GF(2) columns are plain sets of row indices; odd-prime
columns are dicts row -> nonzero coefficient with pivots normalized to 1.
All arithmetic is exact; rank is basis independent.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ValidationError


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    if p < 4:
        return True
    if p % 2 == 0:
        return False
    f = 3
    while f * f <= p:
        if p % f == 0:
            return False
        f += 2
    return True


def check_prime(p: int) -> int:
    if not isinstance(p, int) or not is_prime(p):
        raise ValidationError(f"field characteristic must be a prime, got {p!r}")
    return p


class GF2Pivots:
    """Pivot basis over GF(2). Columns are sets of row indices."""

    __slots__ = ("pivots",)

    def __init__(self):
        self.pivots: dict[int, set[int]] = {}

    @property
    def rank(self) -> int:
        return len(self.pivots)

    def reduce(self, col: set[int]) -> set[int]:
        """Reduce col in place against the basis; returns the residue."""
        pivots = self.pivots
        while col:
            r = max(col)
            q = pivots.get(r)
            if q is None:
                return col
            col ^= q
        return col

    def insert(self, col: set[int]) -> int:
        """Register a reduced nonzero column; returns its pivot row."""
        r = max(col)
        self.pivots[r] = col
        return r

    def add_column(self, col: set[int]) -> int | None:
        col = self.reduce(col)
        if col:
            return self.insert(col)
        return None


class GFpPivots:
    """Pivot basis over GF(p), p an odd prime. Columns are dicts row -> coeff."""

    __slots__ = ("p", "pivots")

    def __init__(self, p: int):
        self.p = p
        self.pivots: dict[int, dict[int, int]] = {}

    @property
    def rank(self) -> int:
        return len(self.pivots)

    def reduce(self, col: dict[int, int]) -> dict[int, int]:
        p = self.p
        pivots = self.pivots
        while col:
            r = max(col)
            q = pivots.get(r)
            if q is None:
                return col
            c = col.pop(r)
            for k, v in q.items():
                if k == r:
                    continue
                nv = (col.get(k, 0) - c * v) % p
                if nv:
                    col[k] = nv
                else:
                    col.pop(k, None)
        return col

    def insert(self, col: dict[int, int]) -> int:
        p = self.p
        r = max(col)
        inv = pow(col[r], p - 2, p)
        if inv != 1:
            col = {k: (v * inv) % p for k, v in col.items()}
        self.pivots[r] = col
        return r

    def add_column(self, col: dict[int, int]) -> int | None:
        col = self.reduce(col)
        if col:
            return self.insert(col)
        return None


def pivot_space(p: int):
    return GF2Pivots() if p == 2 else GFpPivots(p)


def column_from_rows(rows, vals, p: int):
    """Build a reducer column from parallel row/value sequences."""
    if p == 2:
        col = set()
        for r, v in zip(rows, vals):
            if v % 2:
                col.symmetric_difference_update((r,))
        return col
    col = {}
    for r, v in zip(rows, vals):
        nv = (col.get(r, 0) + v) % p
        if nv:
            col[r] = nv
        else:
            col.pop(r, None)
    return col


def reduce_columns(columns, p: int):
    """Eliminate an iterable of columns; returns the resulting pivot space."""
    space = pivot_space(p)
    for col in columns:
        space.add_column(col)
    return space


def kernel_cycles(indexed_columns, p: int):
    """Left-to-right elimination with combination tracking.

    indexed_columns yields (index, column) pairs in increasing index order;
    columns are reducer columns (sets over GF(2), dicts otherwise). Returns
    (rank, cycles) where each cycle is a combination of column indices (as a
    dict index -> coefficient) spanning the kernel restricted to the supplied
    columns. Callers clear columns known to reduce to zero (pivot rows of the
    next boundary matrix) by simply not yielding them; the pivot evolution of
    the remaining columns is unchanged because cleared columns contribute no
    pivots.
    """
    rank = 0
    cycles: list[dict[int, int]] = []
    if p == 2:
        pivots: dict[int, tuple[set[int], set[int]]] = {}
        for j, col in indexed_columns:
            combo = {j}
            while col:
                r = max(col)
                hit = pivots.get(r)
                if hit is None:
                    pivots[r] = (col, combo)
                    rank += 1
                    break
                col ^= hit[0]
                combo ^= hit[1]
            else:
                cycles.append({c: 1 for c in sorted(combo)})
        return rank, cycles

    pivots_p: dict[int, tuple[dict[int, int], dict[int, int]]] = {}
    for j, col in indexed_columns:
        combo = {j: 1}
        while col:
            r = max(col)
            hit = pivots_p.get(r)
            if hit is None:
                inv = pow(col[r], p - 2, p)
                if inv != 1:
                    col = {k: (v * inv) % p for k, v in col.items()}
                    combo = {k: (v * inv) % p for k, v in combo.items()}
                pivots_p[r] = (col, combo)
                rank += 1
                break
            c = col.pop(r)
            pcol, pcombo = hit
            for k, v in pcol.items():
                if k == r:
                    continue
                nv = (col.get(k, 0) - c * v) % p
                if nv:
                    col[k] = nv
                else:
                    col.pop(k, None)
            for k, v in pcombo.items():
                nv = (combo.get(k, 0) - c * v) % p
                if nv:
                    combo[k] = nv
                else:
                    combo.pop(k, None)
        else:
            cycles.append(combo)
    return rank, cycles


@dataclass(frozen=True)
class FieldMatrix:
    """Sparse column-major matrix over GF(p).

    indptr has length ncols+1; rows/vals hold the entries of column j in
    positions indptr[j]:indptr[j+1], with vals already reduced mod p.
    """

    nrows: int
    ncols: int
    p: int
    indptr: np.ndarray
    rows: np.ndarray
    vals: np.ndarray

    @classmethod
    def from_columns(cls, nrows: int, columns, p: int) -> "FieldMatrix":
        check_prime(p)
        indptr = [0]
        rows: list[int] = []
        vals: list[int] = []
        for col in columns:
            for r, v in col:
                v %= p
                if v:
                    rows.append(r)
                    vals.append(v)
            indptr.append(len(rows))
        return cls(
            nrows=nrows,
            ncols=len(indptr) - 1,
            p=p,
            indptr=np.asarray(indptr, dtype=np.int64),
            rows=np.asarray(rows, dtype=np.int64),
            vals=np.asarray(vals, dtype=np.int64),
        )

    @classmethod
    def from_dense(cls, arr, p: int) -> "FieldMatrix":
        a = np.asarray(arr)
        cols = [
            [(i, int(a[i, j]) % p) for i in range(a.shape[0]) if a[i, j] % p]
            for j in range(a.shape[1])
        ]
        return cls.from_columns(a.shape[0], cols, p)

    def column(self, j: int):
        lo, hi = self.indptr[j], self.indptr[j + 1]
        return column_from_rows(self.rows[lo:hi].tolist(), self.vals[lo:hi].tolist(), self.p)

    def iter_columns(self):
        for j in range(self.ncols):
            yield self.column(j)

    def rank(self) -> int:
        return reduce_columns(self.iter_columns(), self.p).rank

    def to_dense(self) -> np.ndarray:
        out = np.zeros((self.nrows, self.ncols), dtype=np.int64)
        for j in range(self.ncols):
            lo, hi = self.indptr[j], self.indptr[j + 1]
            out[self.rows[lo:hi], j] = self.vals[lo:hi]
        return out

    def matmul(self, other: "FieldMatrix") -> "FieldMatrix":
        if self.p != other.p:
            raise ValidationError("field mismatch in matrix product")
        if self.ncols != other.nrows:
            raise ValidationError(
                f"shape mismatch: ({self.nrows},{self.ncols}) @ ({other.nrows},{other.ncols})"
            )
        cols = []
        for j in range(other.ncols):
            acc: dict[int, int] = {}
            lo, hi = other.indptr[j], other.indptr[j + 1]
            for mid, v in zip(other.rows[lo:hi], other.vals[lo:hi]):
                l2, h2 = self.indptr[mid], self.indptr[mid + 1]
                for r, w in zip(self.rows[l2:h2], self.vals[l2:h2]):
                    nv = (acc.get(int(r), 0) + int(v) * int(w)) % self.p
                    if nv:
                        acc[int(r)] = nv
                    else:
                        acc.pop(int(r), None)
            cols.append(sorted(acc.items()))
        return FieldMatrix.from_columns(self.nrows, cols, self.p)

    def is_zero(self) -> bool:
        return self.rows.size == 0


def rank(matrix: FieldMatrix) -> int:
    """Exact rank of a FieldMatrix over its prime field."""
    return matrix.rank()
