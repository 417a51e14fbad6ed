"""Left and right divided differences, Newton reconstruction and representation matrices.

``[a_1, ..., a_j; f]_l`` is the left value at ``a_j`` of ``L_{a_{j-1}} ... L_{a_1} f``.
The right version uses right shifts and right evaluation.  Node tuples need
not form a spherical chain here; chain structure matters only where the
representation matrices need it.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import vandermonde
from .chains import SphericalChain, prefix_len
from .qmatrix import QMatrix, SingularMatrixError, jordan_generator, solve_right
from .qpoly import QPolynomial, product, rho
from .scalar import DEFAULT_TOLERANCE, Tolerance, equivalent


def _nodes(c) -> tuple:
    return tuple(c.nodes) if isinstance(c, SphericalChain) else tuple(c)


@dataclass(frozen=True)
class DeltaColumn:
    chain: tuple
    values: tuple
    side: str = "left"

    def __len__(self):
        return len(self.values)

    def as_matrix(self) -> QMatrix:
        return QMatrix.column(self.values)


@dataclass(frozen=True)
class RepMatrices:
    A: QMatrix
    B: QMatrix
    sources: tuple
    target: object


class RepPreconditionError(ValueError):
    pass


def divided_difference_left(c, f: QPolynomial) -> DeltaColumn:
    nodes = _nodes(c)
    out = []
    g = f
    for idx, a in enumerate(nodes):
        if idx:
            g = g.lshift(nodes[idx - 1])
        out.append(g.eval_left(a))
    return DeltaColumn(nodes, tuple(out), "left")


def divided_difference_right(c, f: QPolynomial) -> DeltaColumn:
    nodes = _nodes(c)
    out = []
    g = f
    for idx, a in enumerate(nodes):
        if idx:
            g = g.rshift(nodes[idx - 1])
        out.append(g.eval_right(a))
    return DeltaColumn(nodes, tuple(out), "right")


def newton_reconstruct(c, delta) -> QPolynomial:
    """``sum_j (z - a_1)...(z - a_{j-1}) * delta_j``: the Newton form of degree below k."""
    nodes = _nodes(c)
    values = delta.values if isinstance(delta, DeltaColumn) else tuple(delta)
    if len(values) != len(nodes):
        raise ValueError("delta length does not match the chain")
    out = QPolynomial()
    basis = QPolynomial([nodes[0] * 0 + 1])
    for a, v in zip(nodes, values):
        out = out + basis * v
        basis = basis * rho(a)
    return out


def closed_form_nonequivalent(a1, a2, f: QPolynomial, tol: Tolerance = DEFAULT_TOLERANCE):
    """Two-node difference for non-equivalent nodes via the rotated node ``(a2 - ~a1)^-1 a2 (a2 - ~a1)``."""
    if equivalent(a1, a2, tol):
        raise ValueError("nodes are equivalent; use closed_form_equivalent")
    t = a2 - a1.conj()
    a2t = t.inverse() * a2 * t
    return (a2t - a1).inverse() * (f.eval_left(a2t) - f.eval_left(a1))


def closed_form_equivalent(a1, a2, f: QPolynomial, tol: Tolerance = DEFAULT_TOLERANCE):
    """Two-node difference for equivalent nodes; uses the derivative at ``a1``."""
    if not equivalent(a1, a2, tol):
        raise ValueError("nodes are not equivalent; use closed_form_nonequivalent")
    if a2.is_real():
        raise ValueError("real node: a2 - conj(a2) is not invertible")
    if a2 == a1.conj():
        raise ValueError("a2 is the conjugate of a1")
    fp = f.derivative()
    return (a2 - a2.conj()).inverse() * (
        f.eval_left(a2) - f.eval_left(a1) + (a2 - a1.conj()) * fp.eval_left(a1))


def real_shift_check(c, x, h: QPolynomial) -> bool:
    """Checks the real-shift recursion of the last divided difference.

    ``[a_1..a_k; h] = (a_k - x)[a_1..a_k; L_x h] + [a_1..a_{k-1}; L_x h]``,
    the final term being ``h(x)`` when ``k = 1``.
    """
    nodes = _nodes(c)
    if not x.is_real():
        raise ValueError("x must be real")
    g = h.lshift(x)
    lhs = divided_difference_left(nodes, h).values[-1]
    tail = (divided_difference_left(nodes[:-1], g).values[-1] if len(nodes) > 1
            else h.eval_left(x))
    rhs = (nodes[-1] - x) * divided_difference_left(nodes, g).values[-1] + tail
    if lhs.is_exact() and rhs.is_exact():
        return lhs == rhs
    from .scalar import close
    return close(lhs, rhs)


def _as_chain(c) -> SphericalChain:
    return c if isinstance(c, SphericalChain) else SphericalChain(c)


def _same_class(chains, tol):
    cls = chains[0].conjugacy_class
    return all(cls.same_as(c.conjugacy_class, tol) for c in chains[1:])


def rep_matrices(a1, a2, a3, tol: Tolerance = DEFAULT_TOLERANCE) -> RepMatrices:
    """``A``, ``B`` with ``Delta(a3; f) = A Delta(a1; f) + B Delta(a2; f)`` for every ``f``.

    Built from the square system that interpolates on all of ``a1`` and the
    part of ``a2`` past its common prefix with ``a1``.
    """
    a1, a2, a3 = _as_chain(a1), _as_chain(a2), _as_chain(a3)
    k1, k2, k3 = len(a1), len(a2), len(a3)
    if not _same_class([a1, a2, a3], tol):
        raise RepPreconditionError("chains must lie in one conjugacy class")
    if k2 > k1:
        raise RepPreconditionError(f"second chain longer than first ({k2} > {k1})")
    nu2 = prefix_len(a1, a2, tol)
    nu3 = prefix_len(a1, a3, tol)
    if k3 > k1:
        raise RepPreconditionError(f"target chain longer than first ({k3} > {k1})")
    if k3 - nu3 > k2 - nu2:
        raise RepPreconditionError(
            f"target tail {k3 - nu3} exceeds second chain tail {k2 - nu2}")
    size = k1 + k2 - nu2
    v12 = vandermonde.build_left([a1, a2], size).matrix
    keep = list(range(k1)) + list(range(k1 + nu2, k1 + k2))
    k_mat = v12.submatrix(keep, range(size))
    v3 = vandermonde.build_left([a3], size).matrix
    try:
        x = solve_right(k_mat, v3, tol)
    except SingularMatrixError as exc:
        raise ArithmeticError(f"interpolation matrix unexpectedly singular: {exc}") from None
    a_mat = x.submatrix(range(k3), range(k1))
    zero = a3.nodes[0] * 0
    b_rows = [[zero] * nu2 + [x[r, c] for c in range(k1, size)] for r in range(k3)]
    return RepMatrices(a_mat, QMatrix(b_rows, k2), (a1, a2), a3)


def transition_pair(c, tol: Tolerance = DEFAULT_TOLERANCE):
    """``(V, T)`` with ``V`` the square left Vandermonde matrix and ``T = V^-1 J^k V``."""
    c = _as_chain(c)
    k = len(c)
    v = vandermonde.build_left([c], k).matrix
    jk = jordan_generator(c) ** k
    from .qmatrix import solve
    t = solve(v, jk @ v, tol)
    return v, t


def rep_matrices_equal_length(a1, a2, a3, tol: Tolerance = DEFAULT_TOLERANCE) -> RepMatrices:
    """Closed-form ``A``, ``B`` for three chains of one length built from ``T`` differences."""
    a1, a2, a3 = _as_chain(a1), _as_chain(a2), _as_chain(a3)
    if not (len(a1) == len(a2) == len(a3)):
        raise RepPreconditionError("chains must have equal length")
    if not _same_class([a1, a2, a3], tol):
        raise RepPreconditionError("chains must lie in one conjugacy class")
    if prefix_len(a1, a2, tol):
        raise RepPreconditionError("first two chains must start with different nodes")
    v1, t1 = transition_pair(a1, tol)
    v2, t2 = transition_pair(a2, tol)
    v3, t3 = transition_pair(a3, tol)
    try:
        a_mat = v3 @ solve_right(v1, solve_right(t1 - t2, t3 - t2, tol), tol)
        b_mat = v3 @ solve_right(v2, solve_right(t2 - t1, t3 - t1, tol), tol)
    except SingularMatrixError as exc:
        raise RepPreconditionError(f"singular T difference: {exc}") from None
    return RepMatrices(a_mat, b_mat, (a1, a2), a3)


def check_representation(rep: RepMatrices, f: QPolynomial) -> QMatrix:
    """Residual ``Delta(a3; f) - A Delta(a1; f) - B Delta(a2; f)``."""
    a1, a2 = rep.sources
    d1 = divided_difference_left(a1, f).as_matrix()
    d2 = divided_difference_left(a2, f).as_matrix()
    d3 = divided_difference_left(rep.target, f).as_matrix()
    return d3 - rep.A @ d1 - rep.B @ d2


def chain_prefix_poly(c, j: int) -> QPolynomial:
    """``(z - a_1)...(z - a_j)``."""
    nodes = _nodes(c)
    return product(rho(a) for a in nodes[:j])
