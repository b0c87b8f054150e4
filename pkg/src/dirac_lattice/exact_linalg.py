"""Exact sparse linear algebra over the rationals.

Everything here works on :class:`fractions.Fraction` coefficients (exposed as
``Rational``) and never touches floating point.  Elimination runs on
integer rows: each row is scaled to a primitive integer vector (denominators
cleared, content divided out) before it is combined with a pivot, which keeps
intermediate numbers small without ever forming a fraction.

Pivoting is deterministic: rows are consumed in index order and each row is
reduced on its lowest nonzero column.  Two calls on equal inputs therefore
return identical bases, whatever the worker-thread count.
"""
from __future__ import annotations

import heapq
from fractions import Fraction
from math import gcd, lcm
from typing import Iterable, Iterator, Mapping, Sequence

from ._parallel import parallel_map

Rational = Fraction

DENSE_CUTOFF = 64


class SingularMatrix(ArithmeticError):
    pass


class DimensionMismatch(ValueError):
    pass


def as_rational(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        raise TypeError("floating-point values are not accepted; pass int, Fraction or 'p/q' strings")
    return Fraction(x)


class SparseMatrix:
    """Row-major sparse matrix with rational entries and no stored zeros."""

    __slots__ = ("nrows", "ncols", "_rows")

    def __init__(self, nrows: int, ncols: int, entries: Mapping[tuple[int, int], object] | None = None):
        if nrows < 0 or ncols < 0:
            raise ValueError("matrix dimensions must be non-negative")
        self.nrows = nrows
        self.ncols = ncols
        self._rows: list[dict[int, Fraction]] = [{} for _ in range(nrows)]
        for (i, j), v in (entries or {}).items():
            self[i, j] = v

    @classmethod
    def from_rows(cls, rows: Sequence[Mapping[int, object]], ncols: int) -> "SparseMatrix":
        m = cls(len(rows), ncols)
        for i, row in enumerate(rows):
            for j, v in row.items():
                m[i, j] = v
        return m

    @classmethod
    def from_dense(cls, data: Sequence[Sequence[object]], ncols: int | None = None) -> "SparseMatrix":
        data = [list(r) for r in data]
        if ncols is None:
            ncols = len(data[0]) if data else 0
        if any(len(r) != ncols for r in data):
            raise DimensionMismatch("ragged dense input")
        return cls.from_rows([{j: v for j, v in enumerate(r) if v != 0} for r in data], ncols)

    @classmethod
    def identity(cls, n: int) -> "SparseMatrix":
        m = cls(n, n)
        for i in range(n):
            m._rows[i][i] = Fraction(1)
        return m

    @classmethod
    def diag(cls, values: Sequence[object]) -> "SparseMatrix":
        m = cls(len(values), len(values))
        for i, v in enumerate(values):
            m[i, i] = v
        return m

    @property
    def shape(self) -> tuple[int, int]:
        return (self.nrows, self.ncols)

    @property
    def nnz(self) -> int:
        return sum(len(r) for r in self._rows)

    def row(self, i: int) -> dict[int, Fraction]:
        """The stored row ``i`` (do not mutate)."""
        return self._rows[i]

    def rows(self) -> list[dict[int, Fraction]]:
        return self._rows

    def _check(self, i: int, j: int) -> None:
        if not (0 <= i < self.nrows and 0 <= j < self.ncols):
            raise IndexError(f"index ({i}, {j}) out of range for shape {self.shape}")

    def __getitem__(self, key: tuple[int, int]) -> Fraction:
        i, j = key
        self._check(i, j)
        return self._rows[i].get(j, Fraction(0))

    def __setitem__(self, key: tuple[int, int], value) -> None:
        i, j = key
        self._check(i, j)
        v = as_rational(value)
        if v:
            self._rows[i][j] = v
        else:
            self._rows[i].pop(j, None)

    def add_to(self, i: int, j: int, value) -> None:
        self._check(i, j)
        row = self._rows[i]
        v = row.get(j, 0) + as_rational(value)
        if v:
            row[j] = v
        else:
            row.pop(j, None)

    def entries(self) -> Iterator[tuple[int, int, Fraction]]:
        for i, row in enumerate(self._rows):
            for j in sorted(row):
                yield i, j, row[j]

    def to_dense(self) -> list[list[Fraction]]:
        out = [[Fraction(0)] * self.ncols for _ in range(self.nrows)]
        for i, j, v in self.entries():
            out[i][j] = v
        return out

    def copy(self) -> "SparseMatrix":
        m = SparseMatrix(self.nrows, self.ncols)
        m._rows = [dict(r) for r in self._rows]
        return m

    def transpose(self) -> "SparseMatrix":
        t = SparseMatrix(self.ncols, self.nrows)
        for i, row in enumerate(self._rows):
            for j, v in row.items():
                t._rows[j][i] = v
        return t

    @property
    def T(self) -> "SparseMatrix":
        return self.transpose()

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> "SparseMatrix":
        colmap = {c: k for k, c in enumerate(cols)}
        out = SparseMatrix(len(rows), len(cols))
        for k, i in enumerate(rows):
            src = self._rows[i]
            out._rows[k] = {colmap[j]: v for j, v in src.items() if j in colmap}
        return out

    def matvec(self, v: Sequence[object]) -> list[Fraction]:
        if len(v) != self.ncols:
            raise DimensionMismatch(f"vector of length {len(v)} for {self.ncols} columns")
        return [sum((x * v[j] for j, x in row.items()), Fraction(0)) for row in self._rows]

    def __matmul__(self, other):
        if isinstance(other, SparseMatrix):
            if self.ncols != other.nrows:
                raise DimensionMismatch(f"cannot multiply {self.shape} by {other.shape}")
            out = SparseMatrix(self.nrows, other.ncols)
            for i, row in enumerate(self._rows):
                acc: dict[int, Fraction] = {}
                for k, a in row.items():
                    for j, b in other._rows[k].items():
                        acc[j] = acc.get(j, 0) + a * b
                out._rows[i] = {j: v for j, v in acc.items() if v}
            return out
        return self.matvec(other)

    def __add__(self, other: "SparseMatrix") -> "SparseMatrix":
        if self.shape != other.shape:
            raise DimensionMismatch(f"cannot add {self.shape} and {other.shape}")
        out = self.copy()
        for i, j, v in other.entries():
            out.add_to(i, j, v)
        return out

    def __neg__(self) -> "SparseMatrix":
        out = SparseMatrix(self.nrows, self.ncols)
        out._rows = [{j: -v for j, v in r.items()} for r in self._rows]
        return out

    def __sub__(self, other: "SparseMatrix") -> "SparseMatrix":
        return self + (-other)

    def scale(self, c) -> "SparseMatrix":
        c = as_rational(c)
        out = SparseMatrix(self.nrows, self.ncols)
        if c:
            out._rows = [{j: c * v for j, v in r.items()} for r in self._rows]
        return out

    def __eq__(self, other) -> bool:
        if not isinstance(other, SparseMatrix):
            return NotImplemented
        return self.shape == other.shape and self._rows == other._rows

    __hash__ = None  # mutable

    def is_zero(self) -> bool:
        return not any(self._rows)

    def is_antisymmetric(self) -> bool:
        return self.nrows == self.ncols and self == -self.transpose()

    def is_symmetric(self) -> bool:
        return self.nrows == self.ncols and self == self.transpose()

    def __repr__(self) -> str:
        return f"SparseMatrix({self.nrows}x{self.ncols}, nnz={self.nnz})"


# --------------------------------------------------------------------------
# integer row kernels

def _primitive(row: Mapping[int, object]) -> dict[int, int]:
    """Scale a rational row to a primitive integer row with positive lead."""
    if not row:
        return {}
    den = 1
    for v in row.values():
        d = v.denominator if isinstance(v, Fraction) else 1
        if d != 1:
            den = lcm(den, d)
    ints = {k: int(v * den) for k, v in row.items() if v}
    if not ints:
        return {}
    g = 0
    for v in ints.values():
        g = gcd(g, v)
        if g == 1:
            break
    lead = ints[min(ints)]
    if lead < 0:
        g = -g
    if g != 1:
        ints = {k: v // g for k, v in ints.items()}
    return ints


def _combine(a: int, row: dict[int, int], b: int, piv: dict[int, int]) -> dict[int, int]:
    """Return primitive(a*row - b*piv)."""
    out = {k: a * v for k, v in row.items()} if a != 1 else dict(row)
    for k, v in piv.items():
        x = out.get(k, 0) - b * v
        if x:
            out[k] = x
        else:
            out.pop(k, None)
    if not out:
        return out
    g = 0
    for v in out.values():
        g = gcd(g, v)
        if g == 1:
            break
    if out[min(out)] < 0:
        g = -g
    if g != 1:
        out = {k: v // g for k, v in out.items()}
    return out


def _reduce_leading(row: dict[int, int], pivots: dict[int, dict[int, int]]) -> dict[int, int]:
    """Eliminate the leading entry of ``row`` until it lands on a free column."""
    while row:
        c = min(row)
        piv = pivots.get(c)
        if piv is None:
            return row
        a, b = piv[c], row[c]
        g = gcd(a, b)
        row = _combine(a // g, row, b // g, piv)
    return row


def _echelon(rows: Iterable[Mapping[int, object]]) -> tuple[dict[int, dict[int, int]], list[int]]:
    """Row echelon form of ``rows`` (processed in order).

    Returns ``(pivots, order)``: pivots maps a pivot column to its primitive
    integer row and ``order`` lists the indices of the input rows that became
    pivots, i.e. a maximal independent prefix-greedy subset of the rows.
    """
    pivots: dict[int, dict[int, int]] = {}
    order: list[int] = []
    for i, r in enumerate(rows):
        row = _reduce_leading(_primitive(r), pivots)
        if row:
            pivots[min(row)] = row
            order.append(i)
    return pivots, order


def _rref(pivots: dict[int, dict[int, int]]) -> dict[int, dict[int, int]]:
    """Fully reduce an echelon basis: no pivot row has entries in other pivot columns."""
    cols = sorted(pivots, reverse=True)
    done: dict[int, dict[int, int]] = {}
    pivset = set(pivots)
    for c in cols:
        row = pivots[c]
        others = sorted(k for k in row if k != c and k in pivset)
        for k in others:
            piv = done[k]
            a, b = piv[k], row.get(k, 0)
            if not b:
                continue
            g = gcd(a, b)
            row = _combine(a // g, row, b // g, piv)
        done[c] = row
    return done


def _bareiss_rank(dense: list[list[Fraction]]) -> int:
    """Rank by fraction-free Bareiss elimination on a small dense matrix."""
    if not dense or not dense[0]:
        return 0
    m = [list(_primitive({j: v for j, v in enumerate(r) if v}).items()) for r in dense]
    ncols = len(dense[0])
    a = []
    for r in m:
        full = [0] * ncols
        for j, v in r:
            full[j] = v
        a.append(full)
    nrows = len(a)
    rank = 0
    prev = 1
    for col in range(ncols):
        if rank == nrows:
            break
        p = next((i for i in range(rank, nrows) if a[i][col]), None)
        if p is None:
            continue
        a[rank], a[p] = a[p], a[rank]
        piv = a[rank]
        for i in range(rank + 1, nrows):
            ri = a[i]
            f = ri[col]
            for j in range(col + 1, ncols):
                ri[j] = (piv[col] * ri[j] - f * piv[j]) // prev
            ri[col] = 0
        prev = piv[col]
        rank += 1
    return rank


# --------------------------------------------------------------------------
# public operations

def _as_matrix(m) -> SparseMatrix:
    if isinstance(m, SparseMatrix):
        return m
    return SparseMatrix.from_dense(m)


def rank(m) -> int:
    """Exact rank over the rationals."""
    m = _as_matrix(m)
    if m.nrows == 0 or m.ncols == 0:
        return 0
    if m.nrows < DENSE_CUTOFF and m.ncols < DENSE_CUTOFF:
        return _bareiss_rank(m.to_dense())
    pivots, _ = _echelon(m.rows())
    return len(pivots)


def independent_rows(m) -> list[int]:
    """Indices of the rows kept by a greedy in-order independence scan."""
    m = _as_matrix(m)
    return _echelon(m.rows())[1]


def rref_pivots(m) -> dict[int, dict[int, Fraction]]:
    """Reduced row echelon form as ``{pivot column: row with unit pivot}``."""
    m = _as_matrix(m)
    red = _rref(_echelon(m.rows())[0])
    out = {}
    for c in sorted(red):
        row = red[c]
        lead = row[c]
        out[c] = {k: Fraction(v, lead) for k, v in sorted(row.items())}
    return out


def nullspace_sparse(m) -> list[dict[int, Fraction]]:
    """Right null space basis as sparse dicts, one vector per free column."""
    m = _as_matrix(m)
    red = _rref(_echelon(m.rows())[0])
    # column -> list of (pivot column) rows that touch it
    touching: dict[int, list[int]] = {}
    for c, row in red.items():
        for k in row:
            if k != c:
                touching.setdefault(k, []).append(c)
    basis = []
    for f in range(m.ncols):
        if f in red:
            continue
        v = {f: Fraction(1)}
        for c in touching.get(f, ()):
            row = red[c]
            v[c] = Fraction(-row[f], row[c])
        basis.append(dict(sorted(v.items())))
    return basis


def nullspace(m) -> list[list[Fraction]]:
    """Basis of the right null space, in reduced echelon form.

    Each basis vector has a 1 in one free column, 0 in every other free
    column, and the pivot coordinates forced by that choice.

    >>> nullspace([[1, 2], [2, 4]])
    [[Fraction(-2, 1), Fraction(1, 1)]]
    """
    m = _as_matrix(m)
    out = []
    for v in nullspace_sparse(m):
        dense = [Fraction(0)] * m.ncols
        for k, x in v.items():
            dense[k] = x
        out.append(dense)
    return out


def left_nullspace_sparse(m) -> list[dict[int, Fraction]]:
    return nullspace_sparse(_as_matrix(m).transpose())


def block_components(m: SparseMatrix) -> list[tuple[list[int], list[int]]]:
    """Split a matrix into independent blocks.

    Returns ``(rows, cols)`` index lists for each connected component of the
    row/column incidence graph, ordered by smallest row index.  Empty rows
    and columns form singleton components.
    """
    parent = list(range(m.nrows + m.ncols))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for i, row in enumerate(m.rows()):
        ri = find(i)
        for j in row:
            rj = find(m.nrows + j)
            if ri != rj:
                parent[max(ri, rj)] = min(ri, rj)
                ri = min(ri, rj)
    groups: dict[int, tuple[list[int], list[int]]] = {}
    for i in range(m.nrows):
        groups.setdefault(find(i), ([], []))[0].append(i)
    for j in range(m.ncols):
        groups.setdefault(find(m.nrows + j), ([], []))[1].append(j)
    return [groups[k] for k in sorted(groups)]


def _invert_block(m: SparseMatrix) -> SparseMatrix:
    n = m.nrows
    # Gauss-Jordan on [m | I] with the same in-order pivot rule
    aug = []
    for i, row in enumerate(m.rows()):
        r = dict(row)
        r[n + i] = Fraction(1)
        aug.append(r)
    pivots, _ = _echelon(aug)
    if any(c >= n for c in pivots) or len(pivots) < n:
        raise SingularMatrix(f"matrix of size {n} is singular")
    red = _rref(pivots)
    inv = SparseMatrix(n, n)
    for c in range(n):
        row = red[c]
        lead = row[c]
        inv._rows[c] = {k - n: Fraction(v, lead) for k, v in row.items() if k >= n}
    return inv


def invert(m) -> SparseMatrix:
    """Exact inverse; raises :class:`SingularMatrix` when rank < dimension.

    Independent diagonal blocks are inverted separately (and in parallel when
    worker threads are configured); the assembled result does not depend on
    the schedule.
    """
    m = _as_matrix(m)
    if m.nrows != m.ncols:
        raise DimensionMismatch(f"cannot invert a non-square {m.shape} matrix")
    comps = block_components(m)
    for rows, cols in comps:
        if len(rows) != len(cols):
            raise SingularMatrix("block structure is not square; matrix is singular")
    blocks = parallel_map(lambda rc: _invert_block(m.submatrix(rc[0], rc[1])), comps)
    out = SparseMatrix(m.nrows, m.ncols)
    for (rows, cols), b in zip(comps, blocks):
        # m[rows, cols] @ b = I  =>  inverse maps rows-space back to cols
        for k, c in enumerate(cols):
            out._rows[c] = {rows[j]: v for j, v in b.row(k).items()}
    return out


def span_contains(rows: Sequence[Sequence[object]], v: Sequence[object]) -> bool:
    """True iff ``v`` is a rational combination of ``rows`` (rank comparison)."""
    n = len(v)
    if any(len(r) != n for r in rows):
        raise DimensionMismatch("all vectors must have the same length")
    dense_rows = [{j: x for j, x in enumerate(r) if x} for r in rows]
    base = SparseMatrix.from_rows(dense_rows, n)
    ext = SparseMatrix.from_rows(dense_rows + [{j: x for j, x in enumerate(v) if x}], n)
    return rank(base) == rank(ext)


class EchelonBasis:
    """Incrementally grown row space with canonical normal forms.

    ``reduce`` returns the unique representative of ``v`` modulo the span
    that has no entry in any pivot column; it is a linear map, so it is safe
    to apply before solving linear systems whose right-hand sides are only
    known modulo the span.
    """

    def __init__(self, rows: Iterable[Mapping[int, object]] = ()):
        self._pivots: dict[int, dict[int, int]] = {}
        for r in rows:
            self.add(r)

    @property
    def rank(self) -> int:
        return len(self._pivots)

    @property
    def pivot_columns(self) -> list[int]:
        return sorted(self._pivots)

    def add(self, row: Mapping[int, object]) -> bool:
        """Add ``row``; return True if it enlarged the span."""
        r = _reduce_leading(_primitive(row), self._pivots)
        if not r:
            return False
        self._pivots[min(r)] = r
        return True

    def reduce(self, v: Mapping[int, object]) -> dict[int, Fraction]:
        out = {k: as_rational(x) for k, x in v.items() if x}
        heap = [k for k in out if k in self._pivots]
        heapq.heapify(heap)
        seen = set()
        while heap:
            c = heapq.heappop(heap)
            if c in seen:
                continue
            seen.add(c)
            x = out.get(c)
            if not x:
                continue
            piv = self._pivots[c]
            f = x / piv[c]
            for k, p in piv.items():
                y = out.get(k, 0) - f * p
                if y:
                    out[k] = y
                    if k in self._pivots and k not in seen:
                        heapq.heappush(heap, k)
                else:
                    out.pop(k, None)
        return dict(sorted(out.items()))

    def contains(self, v: Mapping[int, object]) -> bool:
        return not self.reduce(v)


def rank_mod_prime(m, p: int = 2_147_483_647) -> int:
    """Rank of an integer-scaled copy of ``m`` over GF(p).

    Each row is first scaled to a primitive integer row, so the result is a
    lower bound for the rational rank; it is used only as an independent
    cross-check.
    """
    m = _as_matrix(m)
    pivots: dict[int, dict[int, int]] = {}
    for r in m.rows():
        row = {k: v % p for k, v in _primitive(r).items() if v % p}
        while row:
            c = min(row)
            piv = pivots.get(c)
            if piv is None:
                inv = pow(row[c], -1, p)
                pivots[c] = {k: v * inv % p for k, v in row.items()}
                break
            f = row[c]
            for k, v in piv.items():
                x = (row.get(k, 0) - f * v) % p
                if x:
                    row[k] = x
                else:
                    row.pop(k, None)
    return len(pivots)
