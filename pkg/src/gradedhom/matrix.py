"""Polynomial matrices stored column-major (columns are relations / images)."""

from __future__ import annotations

from typing import Iterable, Sequence

from .poly import Polynomial, Ring


class Matrix:
    __slots__ = ("ring", "nrows", "cols")

    def __init__(self, ring: Ring, nrows: int, cols: Iterable[Sequence[Polynomial]] = ()):
        self.ring = ring
        self.nrows = nrows
        self.cols = tuple(tuple(c) for c in cols)
        for c in self.cols:
            if len(c) != nrows:
                raise ValueError(f"column of length {len(c)} in a matrix with {nrows} rows")

    @classmethod
    def from_rows(cls, ring: Ring, rows: Sequence[Sequence], ncols: int | None = None) -> "Matrix":
        rows = [[ring.poly(e) if not isinstance(e, Polynomial) else e for e in r] for r in rows]
        if ncols is None:
            ncols = len(rows[0]) if rows else 0
        for r in rows:
            if len(r) != ncols:
                raise ValueError("ragged matrix rows")
        return cls(ring, len(rows), [[rows[i][j] for i in range(len(rows))] for j in range(ncols)])

    @classmethod
    def zero(cls, ring: Ring, nrows: int, ncols: int) -> "Matrix":
        z = ring.zero()
        return cls(ring, nrows, [[z] * nrows for _ in range(ncols)])

    @classmethod
    def identity(cls, ring: Ring, n: int) -> "Matrix":
        z, o = ring.zero(), ring.one()
        return cls(ring, n, [[o if i == j else z for i in range(n)] for j in range(n)])

    @property
    def ncols(self) -> int:
        return len(self.cols)

    @property
    def shape(self):
        return (self.nrows, self.ncols)

    def __getitem__(self, ij):
        i, j = ij
        return self.cols[j][i]

    def rows(self) -> list[list[Polynomial]]:
        return [[c[i] for c in self.cols] for i in range(self.nrows)]

    @property
    def T(self) -> "Matrix":
        return Matrix(self.ring, self.ncols, self.rows())

    def is_zero(self) -> bool:
        return all(e.is_zero() for c in self.cols for e in c)

    def __matmul__(self, other: "Matrix") -> "Matrix":
        if self.ncols != other.nrows:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        zero = self.ring.zero()
        out = []
        for oc in other.cols:
            col = [zero] * self.nrows
            for k, b in enumerate(oc):
                if b.is_zero():
                    continue
                for i, a in enumerate(self.cols[k]):
                    if not a.is_zero():
                        col[i] = col[i] + a * b
            out.append(col)
        return Matrix(self.ring, self.nrows, out)

    def __add__(self, other: "Matrix") -> "Matrix":
        return Matrix(self.ring, self.nrows, [[a + b for a, b in zip(c1, c2)] for c1, c2 in zip(self.cols, other.cols)])

    def __sub__(self, other: "Matrix") -> "Matrix":
        return Matrix(self.ring, self.nrows, [[a - b for a, b in zip(c1, c2)] for c1, c2 in zip(self.cols, other.cols)])

    def __neg__(self):
        return Matrix(self.ring, self.nrows, [[-a for a in c] for c in self.cols])

    def scale(self, f) -> "Matrix":
        return Matrix(self.ring, self.nrows, [[a * f for a in c] for c in self.cols])

    def __eq__(self, other):
        return isinstance(other, Matrix) and self.nrows == other.nrows and self.cols == other.cols

    def __hash__(self):
        return hash((self.nrows, self.cols))

    def select_cols(self, idx: Iterable[int]) -> "Matrix":
        return Matrix(self.ring, self.nrows, [self.cols[j] for j in idx])

    def select_rows(self, idx: Sequence[int]) -> "Matrix":
        return Matrix(self.ring, len(idx), [[c[i] for i in idx] for c in self.cols])

    def __repr__(self):
        return "[" + ", ".join("[" + ", ".join(str(e) for e in r) + "]" for r in self.rows()) + "]"


def hstack(ring: Ring, nrows: int, mats: Sequence[Matrix]) -> Matrix:
    cols = []
    for m in mats:
        if m.nrows != nrows:
            raise ValueError("hstack row mismatch")
        cols.extend(m.cols)
    return Matrix(ring, nrows, cols)


def vstack(ring: Ring, ncols: int, mats: Sequence[Matrix]) -> Matrix:
    for m in mats:
        if m.ncols != ncols:
            raise ValueError("vstack column mismatch")
    n = sum(m.nrows for m in mats)
    return Matrix(ring, n, [[e for m in mats for e in m.cols[j]] for j in range(ncols)])


def block_diag(ring: Ring, mats: Sequence[Matrix]) -> Matrix:
    n = sum(m.nrows for m in mats)
    z = ring.zero()
    cols = []
    off = 0
    for m in mats:
        for c in m.cols:
            cols.append([z] * off + list(c) + [z] * (n - off - m.nrows))
        off += m.nrows
    return Matrix(ring, n, cols)


def kron_identity(m: Matrix, g: int) -> Matrix:
    """``m ⊗ I_g`` with index (i, a) -> i*g + a."""
    ring = m.ring
    z = ring.zero()
    cols = []
    for c in m.cols:
        for b in range(g):
            col = [z] * (m.nrows * g)
            for i, e in enumerate(c):
                col[i * g + b] = e
            cols.append(col)
    return Matrix(ring, m.nrows * g, cols)


def col_to_vec(col: Sequence[Polynomial], offset: int = 0) -> dict:
    v = {}
    for i, f in enumerate(col):
        for m, c in f.terms.items():
            v[(i + offset, m)] = c
    return v


def vec_to_col(ring: Ring, v: dict, n: int, offset: int = 0) -> list[Polynomial]:
    comps: list[dict] = [dict() for _ in range(n)]
    for (i, m), c in v.items():
        if offset <= i < offset + n:
            comps[i - offset][m] = c
    return [ring.poly(t) for t in comps]
