"""Confluent Vandermonde matrices over chain families.

The left matrix stacks one ``k_i x m`` block per chain; entry ``(r, c)`` of a
block is the left divided difference of ``z^(c-1)`` over the first ``r`` nodes.
Equivalently column ``c`` is ``J^(c-1) E_k`` for the bidiagonal generator ``J``
of the chain.  The right matrix places ``m x k_i`` blocks side by side, with
rows ``E_k^T (J^T)^(r-1)`` (products taken on the right).
"""

from __future__ import annotations

from dataclasses import dataclass

from . import divdiff
from .chains import ChainFamily, SphericalChain, kappa, prefix_len
from .qmatrix import QMatrix, jordan_generator, nilpotent_shift, unit_column
from .qpoly import QPolynomial
from .scalar import DEFAULT_TOLERANCE, Tolerance, equivalent

LEFT = "left"
RIGHT = "right"


@dataclass(frozen=True)
class ConfluentVandermonde:
    family: ChainFamily
    m: int
    side: str
    matrix: QMatrix

    @property
    def shape(self):
        return self.matrix.shape


def _family(fam) -> ChainFamily:
    if isinstance(fam, ChainFamily):
        return fam
    if isinstance(fam, SphericalChain):
        return ChainFamily([fam])
    return ChainFamily(fam)


def _left_block_jordan(chain: SphericalChain, m: int) -> list:
    nodes = chain.nodes
    zero = nodes[0] * 0
    col = [zero + 1] + [zero] * (len(nodes) - 1)
    cols = [col]
    for _ in range(1, m):
        # (J v)_r = a_r v_r + v_{r-1}
        col = [nodes[r] * col[r] + (col[r - 1] if r else zero) for r in range(len(nodes))]
        cols.append(col)
    return [[cols[c][r] for c in range(m)] for r in range(len(nodes))]


def _right_block_jordan(chain: SphericalChain, m: int) -> list:
    nodes = chain.nodes
    zero = nodes[0] * 0
    row = [zero + 1] + [zero] * (len(nodes) - 1)
    rows = [row]
    for _ in range(1, m):
        # (w J^T)_c = w_c a_c + w_{c-1}
        row = [row[c] * nodes[c] + (row[c - 1] if c else zero) for c in range(len(nodes))]
        rows.append(row)
    return rows


def _left_block_divided(chain: SphericalChain, m: int) -> list:
    cols = [divdiff.divided_difference_left(chain, _monomial(c, chain)).values for c in range(m)]
    return [[cols[c][r] for c in range(m)] for r in range(len(chain))]


def _right_block_divided(chain: SphericalChain, m: int) -> list:
    return [list(divdiff.divided_difference_right(chain, _monomial(r, chain)).values)
            for r in range(m)]


def _monomial(j: int, chain: SphericalChain) -> QPolynomial:
    one = chain.nodes[0] * 0 + 1
    return QPolynomial.monomial(j, one)


def build_left(fam, m: int, mode: str = "jordan") -> ConfluentVandermonde:
    """Left confluent Vandermonde matrix with ``m`` columns (``mode``: jordan | divided)."""
    if m < 1:
        raise ValueError("m must be >= 1")
    fam = _family(fam)
    block = {"jordan": _left_block_jordan, "divided": _left_block_divided}[mode]
    rows = []
    for chain in fam.chains:
        rows.extend(block(chain, m))
    return ConfluentVandermonde(fam, m, LEFT, QMatrix(rows, m))


def build_right(fam, m: int, mode: str = "jordan") -> ConfluentVandermonde:
    """Right confluent Vandermonde matrix with ``m`` rows."""
    if m < 1:
        raise ValueError("m must be >= 1")
    fam = _family(fam)
    block = {"jordan": _right_block_jordan, "divided": _right_block_divided}[mode]
    blocks = [QMatrix(block(chain, m), len(chain)) for chain in fam.chains]
    return ConfluentVandermonde(fam, m, RIGHT, QMatrix.hstack(blocks))


def family_generator(fam) -> QMatrix:
    """Block diagonal matrix of the chain generators."""
    fam = _family(fam)
    n = fam.total_length
    zero = fam.chains[0].nodes[0] * 0
    rows = [[zero] * n for _ in range(n)]
    off = 0
    for chain in fam.chains:
        j = jordan_generator(chain)
        for r in range(len(chain)):
            for c in range(len(chain)):
                rows[off + r][off + c] = j[r, c]
        off += len(chain)
    return QMatrix(rows, n)


def family_unit_column(fam) -> QMatrix:
    """``E`` stacked per chain: a one at the start of each block."""
    fam = _family(fam)
    return QMatrix.vstack([unit_column(len(c)) for c in fam.chains])


def stein_residual(v: ConfluentVandermonde | QMatrix, fam=None, side: str | None = None) -> QMatrix:
    """``V - J V F^T - E E_m^T`` (left) or ``V - F V J^T - E_m E^T`` (right).

    With a family of several chains ``J`` is block diagonal and ``E`` has one
    unit per block; the single chain case is the usual one.
    """
    if isinstance(v, ConfluentVandermonde):
        fam, side, mat = v.family, v.side, v.matrix
    else:
        mat = v
        fam = _family(fam)
        side = side or LEFT
    j = family_generator(fam)
    e = family_unit_column(fam)
    if side == LEFT:
        m = mat.ncols
        f = nilpotent_shift(m)
        return mat - j @ mat @ f.transpose() - e @ unit_column(m).transpose()
    m = mat.nrows
    f = nilpotent_shift(m)
    return mat - f @ mat @ j.transpose() - unit_column(m) @ e.transpose()


def adjoint_duality_check(fam, m: int) -> bool:
    """Left matrix of ``fam`` equals the conjugate transpose of the right matrix of the conjugate family."""
    fam = _family(fam)
    left = build_left(fam, m).matrix
    right = build_right(fam.conj(), m).matrix
    return left == right.conj_transpose()


def rank_via_formula(fam, m: int, tol: Tolerance = DEFAULT_TOLERANCE) -> int:
    return min(m, kappa(_family(fam), tol))


def rank_report(fam, m: int, tol: Tolerance = DEFAULT_TOLERANCE) -> dict:
    """Formula rank next to the elimination ranks of both matrices."""
    fam = _family(fam)
    k = kappa(fam, tol)
    left = build_left(fam, m).matrix
    right = build_right(fam, m).matrix
    formula = min(m, k)
    rl, rr = left.rank(tol), right.rank(tol)
    return {"kappa": k, "m": m, "formula": formula, "rank_left": rl, "rank_right": rr,
            "agree": rl == formula == rr}


def invertibility_check(fam, tol: Tolerance = DEFAULT_TOLERANCE) -> bool:
    """Square matrix is invertible iff leading nodes are distinct and no three share a class."""
    fam = _family(fam)
    heads = [c.nodes[0] for c in fam.chains]
    for a in range(len(heads)):
        for b in range(a + 1, len(heads)):
            if prefix_len([heads[a]], [heads[b]], tol):
                return False
    for a in range(len(heads)):
        if sum(1 for b in heads if equivalent(heads[a], b, tol)) >= 3:
            return False
    return True
