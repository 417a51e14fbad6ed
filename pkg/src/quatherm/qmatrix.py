"""Dense quaternion matrices with division-ring rank and solve.

Rank is the dimension of the left span of the rows, computed with left row
operations (``row_i <- c * row_i``, ``row_i <- row_i - c * row_p``).  Systems
``A X = B`` are solved by the same elimination on ``[A | B]``; unknowns
multiply the matrix from the right, as in ``sum_j a_ij x_j``.
"""

from __future__ import annotations

import math
from numbers import Real

from .scalar import DEFAULT_TOLERANCE, Quaternion, Tolerance


class SingularMatrixError(ArithmeticError):
    pass


def _q(x) -> Quaternion:
    return x if isinstance(x, Quaternion) else Quaternion.coerce(x)


_ZERO = Quaternion(0, 0, 0, 0)
_ONE = Quaternion(1, 0, 0, 0)


class QMatrix:
    """Row-major quaternion matrix; immutable."""

    __slots__ = ("rows", "nrows", "ncols")

    def __init__(self, rows, ncols: int | None = None):
        rows = tuple(tuple(_q(x) for x in row) for row in rows)
        if ncols is None:
            ncols = len(rows[0]) if rows else 0
        if any(len(r) != ncols for r in rows):
            raise ValueError("ragged matrix")
        self.rows = rows
        self.nrows = len(rows)
        self.ncols = ncols

    # constructors -----------------------------------------------------
    @classmethod
    def zeros(cls, nrows: int, ncols: int, zero: Quaternion = _ZERO) -> "QMatrix":
        return cls([[zero] * ncols for _ in range(nrows)], ncols)

    @classmethod
    def identity(cls, n: int) -> "QMatrix":
        return cls([[_ONE if i == j else _ZERO for j in range(n)] for i in range(n)], n)

    @classmethod
    def column(cls, entries) -> "QMatrix":
        return cls([[x] for x in entries], 1)

    @classmethod
    def row(cls, entries) -> "QMatrix":
        entries = list(entries)
        return cls([entries], len(entries))

    @classmethod
    def hstack(cls, blocks) -> "QMatrix":
        blocks = list(blocks)
        nrows = blocks[0].nrows
        if any(b.nrows != nrows for b in blocks):
            raise ValueError("hstack needs equal row counts")
        rows = [sum((b.rows[i] for b in blocks), ()) for i in range(nrows)]
        return cls(rows, sum(b.ncols for b in blocks))

    @classmethod
    def vstack(cls, blocks) -> "QMatrix":
        blocks = list(blocks)
        ncols = blocks[0].ncols
        if any(b.ncols != ncols for b in blocks):
            raise ValueError("vstack needs equal column counts")
        return cls(sum((b.rows for b in blocks), ()), ncols)

    # access -----------------------------------------------------------
    @property
    def shape(self):
        return (self.nrows, self.ncols)

    def __getitem__(self, idx):
        i, j = idx
        return self.rows[i][j]

    def col(self, j: int) -> list:
        return [r[j] for r in self.rows]

    def submatrix(self, row_idx, col_idx) -> "QMatrix":
        col_idx = list(col_idx)
        return QMatrix([[self.rows[i][j] for j in col_idx] for i in row_idx], len(col_idx))

    def __eq__(self, other):
        if isinstance(other, QMatrix):
            return self.shape == other.shape and self.rows == other.rows
        return NotImplemented

    def __hash__(self):
        return hash(self.rows)

    def __repr__(self):
        body = "; ".join(", ".join(str(x) for x in r) for r in self.rows)
        return f"QMatrix([{body}])"

    def to_lists(self) -> list:
        return [list(r) for r in self.rows]

    # arithmetic -------------------------------------------------------
    def __add__(self, other: "QMatrix") -> "QMatrix":
        if self.shape != other.shape:
            raise ValueError("shape mismatch")
        return QMatrix([[a + b for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)],
                       self.ncols)

    def __sub__(self, other: "QMatrix") -> "QMatrix":
        if self.shape != other.shape:
            raise ValueError("shape mismatch")
        return QMatrix([[a - b for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)],
                       self.ncols)

    def __neg__(self):
        return QMatrix([[-a for a in r] for r in self.rows], self.ncols)

    def __matmul__(self, other: "QMatrix") -> "QMatrix":
        if self.ncols != other.nrows:
            raise ValueError(f"cannot multiply {self.shape} by {other.shape}")
        cols = [other.col(j) for j in range(other.ncols)]
        out = []
        for r in self.rows:
            out_row = []
            for c in cols:
                acc = _ZERO
                for a, b in zip(r, c):
                    if a and b:
                        acc = acc + a * b
                out_row.append(acc)
            out.append(out_row)
        return QMatrix(out, other.ncols)

    def __mul__(self, c):
        """Entrywise right scalar multiplication ``A c``."""
        if isinstance(c, (Quaternion, Real)):
            return QMatrix([[a * c for a in r] for r in self.rows], self.ncols)
        return NotImplemented

    def __rmul__(self, c):
        if isinstance(c, (Quaternion, Real)):
            return QMatrix([[c * a for a in r] for r in self.rows], self.ncols)
        return NotImplemented

    def __pow__(self, n: int) -> "QMatrix":
        if self.nrows != self.ncols or n < 0:
            raise ValueError("matrix power needs a square matrix and n >= 0")
        out = QMatrix.identity(self.nrows)
        for _ in range(n):
            out = out @ self
        return out

    def transpose(self) -> "QMatrix":
        return QMatrix([list(c) for c in zip(*self.rows)] if self.nrows else [], self.nrows)

    @property
    def T(self) -> "QMatrix":
        return self.transpose()

    def conj(self) -> "QMatrix":
        return QMatrix([[a.conj() for a in r] for r in self.rows], self.ncols)

    def conj_transpose(self) -> "QMatrix":
        return QMatrix([[a.conj() for a in c] for c in zip(*self.rows)] if self.nrows else [],
                       self.nrows)

    @property
    def H(self) -> "QMatrix":
        return self.conj_transpose()

    def is_zero(self) -> bool:
        return all(a.is_zero() for r in self.rows for a in r)

    def is_exact(self) -> bool:
        return all(a.is_exact() for r in self.rows for a in r)

    def max_norm2(self):
        """``max |a_ij|^2`` (0 for an empty matrix)."""
        return max((a.norm2() for r in self.rows for a in r), default=0)

    def max_abs(self) -> float:
        return math.sqrt(self.max_norm2())

    def is_lower_triangular(self) -> bool:
        return all(self.rows[i][j].is_zero()
                   for i in range(self.nrows) for j in range(i + 1, self.ncols))

    def is_upper_triangular(self) -> bool:
        return all(self.rows[i][j].is_zero()
                   for i in range(self.nrows) for j in range(min(i, self.ncols)))

    def to_backend(self, backend: str) -> "QMatrix":
        return QMatrix([[a.to_backend(backend) for a in r] for r in self.rows], self.ncols)

    # elimination ------------------------------------------------------
    def rank(self, tol: Tolerance = DEFAULT_TOLERANCE) -> int:
        """Dimension of the left span of the rows."""
        _, pivots = _row_reduce(self.rows, self.ncols, tol)
        return len(pivots)

    def column_rank(self, tol: Tolerance = DEFAULT_TOLERANCE) -> int:
        """Dimension of the right span of the columns, by right column operations."""
        return _column_reduce_rank(self.rows, self.ncols, tol)

    def null_space(self, tol: Tolerance = DEFAULT_TOLERANCE) -> list:
        """Basis of ``{x : A x = 0}`` (columns, right scalar multiples)."""
        reduced, pivots = _row_reduce(self.rows, self.ncols, tol, full=True)
        free = [j for j in range(self.ncols) if j not in pivots]
        zero = _zero_like(self.rows)
        one = _ONE if zero.is_exact() else Quaternion(1.0, 0.0, 0.0, 0.0)
        basis = []
        for f in free:
            x = [zero] * self.ncols
            x[f] = one
            for r, p in enumerate(pivots):
                x[p] = -reduced[r][f]
            basis.append(x)
        return basis


def _zero_like(rows) -> Quaternion:
    for r in rows:
        for a in r:
            return a * 0
    return _ZERO


def _threshold2(rows, tol: Tolerance):
    """Squared pivot threshold for float data: ``(1e-9 * max row norm)^2`` by default."""
    row_norm2 = max((sum(a.norm2() for a in r) for r in rows), default=0.0)
    eps = tol.rel * math.sqrt(row_norm2) + tol.abs
    return eps * eps


def _row_reduce(rows, npivot_cols: int, tol: Tolerance, full: bool = True):
    """Reduced row echelon form under left row operations.

    Only the first ``npivot_cols`` columns are used for pivots (the rest is an
    augmented block).  Exact data pivots on the first nonzero entry; float data
    pivots on the largest ``|.|^2`` and treats entries under the rank threshold
    as zero.
    """
    work = [list(r) for r in rows]
    exact = all(a.is_exact() for r in work for a in r)
    thr2 = 0 if exact else _threshold2([r[:npivot_cols] for r in work], tol)
    pivots = []
    prow = 0
    nrows = len(work)
    for col in range(npivot_cols):
        if prow >= nrows:
            break
        if exact:
            best = next((i for i in range(prow, nrows) if not work[i][col].is_zero()), None)
        else:
            best, best_n2 = None, thr2
            for i in range(prow, nrows):
                n2 = work[i][col].norm2()
                if n2 > best_n2:
                    best, best_n2 = i, n2
        if best is None:
            continue
        work[prow], work[best] = work[best], work[prow]
        inv = work[prow][col].inverse()
        pivot_row = [inv * a for a in work[prow]]
        pivot_row[col] = _ONE if exact else Quaternion(1.0, 0.0, 0.0, 0.0)
        work[prow] = pivot_row
        targets = range(nrows) if full else range(prow + 1, nrows)
        for i in targets:
            if i == prow:
                continue
            c = work[i][col]
            if c.is_zero():
                continue
            row = work[i]
            for j in range(col, len(row)):
                pj = pivot_row[j]
                if pj:
                    row[j] = row[j] - c * pj
            row[col] = c * 0
        pivots.append(col)
        prow += 1
    return work, pivots


def _column_reduce_rank(rows, ncols: int, tol: Tolerance) -> int:
    work = [list(r) for r in rows]
    exact = all(a.is_exact() for r in work for a in r)
    thr2 = 0 if exact else _threshold2([list(c) for c in zip(*work)] if work else [], tol)
    used = set()
    rank = 0
    for i, row in enumerate(work):
        cand = [j for j in range(ncols) if j not in used]
        if exact:
            best = next((j for j in cand if not row[j].is_zero()), None)
        else:
            best, best_n2 = None, thr2
            for j in cand:
                n2 = row[j].norm2()
                if n2 > best_n2:
                    best, best_n2 = j, n2
        if best is None:
            continue
        inv = work[i][best].inverse()
        for r in work:
            r[best] = r[best] * inv
        for j in cand:
            if j == best:
                continue
            c = work[i][j]
            if c.is_zero():
                continue
            for r in work:
                r[j] = r[j] - r[best] * c
        used.add(best)
        rank += 1
    return rank


def rank(a: QMatrix, tol: Tolerance = DEFAULT_TOLERANCE) -> int:
    return a.rank(tol)


def conj_transpose(a: QMatrix) -> QMatrix:
    return a.conj_transpose()


def solve(a: QMatrix, b: QMatrix, tol: Tolerance = DEFAULT_TOLERANCE) -> QMatrix:
    """``X`` with ``A X = B`` for square invertible ``A``."""
    if a.nrows != a.ncols:
        raise ValueError("solve needs a square matrix")
    if b.nrows != a.nrows:
        raise ValueError("right-hand side has the wrong number of rows")
    n = a.ncols
    aug = [ra + rb for ra, rb in zip(a.rows, b.rows)]
    reduced, pivots = _row_reduce(aug, n, tol)
    if len(pivots) < n:
        raise SingularMatrixError(f"matrix is singular (rank {len(pivots)} < {n})")
    return QMatrix([r[n:] for r in reduced], b.ncols)


def solve_right(a: QMatrix, b: QMatrix, tol: Tolerance = DEFAULT_TOLERANCE) -> QMatrix:
    """``X`` with ``X A = B`` for square invertible ``A`` (via ``A* X* = B*``)."""
    return solve(a.conj_transpose(), b.conj_transpose(), tol).conj_transpose()


def inverse(a: QMatrix, tol: Tolerance = DEFAULT_TOLERANCE) -> QMatrix:
    return solve(a, QMatrix.identity(a.nrows), tol)


def solve_consistent(a: QMatrix, b: QMatrix, tol: Tolerance = DEFAULT_TOLERANCE):
    """Particular solution of a possibly rectangular system ``A X = B``.

    Returns ``(X, rank A, rank [A | B])``; ``X`` is ``None`` when the ranks
    differ.  Free unknowns are set to zero.
    """
    n = a.ncols
    aug = [ra + rb for ra, rb in zip(a.rows, b.rows)]
    reduced, pivots = _row_reduce(aug, n, tol)
    rank_a = len(pivots)
    rank_ab = QMatrix(aug, n + b.ncols).rank(tol)
    if rank_ab != rank_a:
        return None, rank_a, rank_ab
    zero = _zero_like(aug)
    x = [[zero] * b.ncols for _ in range(n)]
    for r, p in enumerate(pivots):
        x[p] = list(reduced[r][n:])
    return QMatrix(x, b.ncols), rank_a, rank_ab


def unit_column(k: int) -> QMatrix:
    """``E_k = [1, 0, ..., 0]^T``."""
    if k < 1:
        raise ValueError("k must be >= 1")
    return QMatrix([[_ONE]] + [[_ZERO] for _ in range(k - 1)], 1)


def nilpotent_shift(m: int) -> QMatrix:
    """``F_m = [delta_{i-1, j}]``: ones on the subdiagonal."""
    if m < 1:
        raise ValueError("m must be >= 1")
    return QMatrix([[_ONE if i - 1 == j else _ZERO for j in range(m)] for i in range(m)], m)


def jordan_generator(nodes) -> QMatrix:
    """Lower bidiagonal matrix with the nodes on the diagonal and ones below it."""
    nodes = list(getattr(nodes, "nodes", nodes))
    k = len(nodes)
    if k < 1:
        raise ValueError("need at least one node")
    zero = nodes[0] * 0
    one = zero + 1
    return QMatrix([[nodes[i] if i == j else (one if i - 1 == j else zero) for j in range(k)]
                    for i in range(k)], k)
