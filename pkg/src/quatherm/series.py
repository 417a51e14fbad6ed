"""Truncated quaternion power series, H^2 inner products and Gram (Cauchy) matrices.

A :class:`TruncatedSeries` keeps the coefficients below its order ``N`` together
with an upper bound on ``sum_{j >= N} |f_j|^2``.  With exact scalars the bound
is an exact rational whenever the inputs allow it, so comparisons such as
"residual within bound" are decided without rounding.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb

from .chains import ChainFamily, SphericalChain, chain_to_poly, kappa, lrcm_family
from .qmatrix import QMatrix, SingularMatrixError, solve
from .qpoly import QPolynomial
from .scalar import DEFAULT_TOLERANCE, Quaternion, Tolerance
from .vandermonde import build_left

INF = math.inf


class OutsideUnitBall(ValueError):
    pass


def _zero_like(q: Quaternion) -> Quaternion:
    return q * 0


@dataclass(frozen=True)
class TruncatedSeries:
    """``sum_{j < N} z^j coeffs[j]`` plus a bound on the squared norm of the rest."""

    coeffs: tuple
    order: int
    tail_bound: object = 0

    def __init__(self, coeffs, order: int | None = None, tail_bound=0):
        coeffs = [c if isinstance(c, Quaternion) else Quaternion.coerce(c) for c in coeffs]
        if order is None:
            order = len(coeffs)
        if len(coeffs) > order:
            raise ValueError("more coefficients than the truncation order")
        if coeffs:
            coeffs += [_zero_like(coeffs[0])] * (order - len(coeffs))
        else:
            coeffs = [Quaternion(0, 0, 0, 0)] * order
        if tail_bound < 0:
            raise ValueError("tail bound must be nonnegative")
        object.__setattr__(self, "coeffs", tuple(coeffs))
        object.__setattr__(self, "order", order)
        object.__setattr__(self, "tail_bound", tail_bound)

    @classmethod
    def from_polynomial(cls, f: QPolynomial, order: int | None = None) -> "TruncatedSeries":
        """Exact when ``order > deg f``; otherwise the dropped coefficients form the tail."""
        cs = list(f.coeffs)
        if order is None:
            order = max(len(cs), 1)
        head, rest = cs[:order], cs[order:]
        tail = sum((c.norm2() for c in rest), 0)
        return cls(head or [Quaternion(0, 0, 0, 0)], order, tail)

    def __len__(self):
        return self.order

    def coeff(self, j: int) -> Quaternion:
        return self.coeffs[j] if j < self.order else None

    @property
    def truncation_order(self) -> int:
        return self.order

    def is_exact(self) -> bool:
        return all(c.is_exact() for c in self.coeffs) and not isinstance(self.tail_bound, float)

    def norm2_truncated(self):
        total = 0
        for c in self.coeffs:
            total = total + c.norm2()
        return total

    def tail_from(self, start: int):
        """Bound on ``sum_{j >= start} |f_j|^2`` (stored coefficients plus the tail)."""
        total = self.tail_bound
        for c in self.coeffs[max(start, 0):]:
            total = total + c.norm2()
        return total

    def truncate(self, order: int) -> "TruncatedSeries":
        if order >= self.order:
            return self
        return TruncatedSeries(self.coeffs[:order], order, self.tail_from(order))

    def conj_sharp(self) -> "TruncatedSeries":
        return TruncatedSeries([c.conj() for c in self.coeffs], self.order, self.tail_bound)

    def to_polynomial(self) -> QPolynomial:
        return QPolynomial(self.coeffs)

    def __add__(self, other: "TruncatedSeries") -> "TruncatedSeries":
        n = min(self.order, other.order)
        a, b = self.truncate(n), other.truncate(n)
        return TruncatedSeries([x + y for x, y in zip(a.coeffs, b.coeffs)], n,
                               2 * (a.tail_bound + b.tail_bound))

    def __sub__(self, other: "TruncatedSeries") -> "TruncatedSeries":
        return self + other * (-1)

    def __mul__(self, other):
        """Right scalar multiple, or a product with another series."""
        if isinstance(other, (Quaternion, int, Fraction, float)):
            c = other if isinstance(other, Quaternion) else Quaternion.coerce(other)
            return TruncatedSeries([x * c for x in self.coeffs], self.order,
                                   self.tail_bound * c.norm2())
        if isinstance(other, QPolynomial):
            return self * TruncatedSeries.from_polynomial(other, other.degree + 1 if other else 1)
        if isinstance(other, TruncatedSeries):
            return _series_product(self, other)
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, (Quaternion, int, Fraction, float)):
            c = other if isinstance(other, Quaternion) else Quaternion.coerce(other)
            return TruncatedSeries([c * x for x in self.coeffs], self.order,
                                   self.tail_bound * c.norm2())
        if isinstance(other, QPolynomial):
            return TruncatedSeries.from_polynomial(other, other.degree + 1 if other else 1) * self
        return NotImplemented


def _poly_degree(s: TruncatedSeries):
    """Degree if the series is known to be a polynomial (zero tail), else None."""
    if s.tail_bound != 0:
        return None
    d = -1
    for j, c in enumerate(s.coeffs):
        if not c.is_zero():
            d = j
    return d


def _series_product(a: TruncatedSeries, b: TruncatedSeries,
                    order: int | None = None) -> TruncatedSeries:
    da, db = _poly_degree(a), _poly_degree(b)
    if order is None:
        if da is not None and db is not None:
            order = max(da + db + 1, 1)
        elif da is not None:
            order = b.order
        elif db is not None:
            order = a.order
        else:
            order = min(a.order, b.order)
    zero = _zero_like(a.coeffs[0]) if a.coeffs else Quaternion(0, 0, 0, 0)
    out = [zero] * order
    for i in range(min(a.order, order)):
        ai = a.coeffs[i]
        if ai.is_zero():
            continue
        for j in range(min(b.order, order - i)):
            bj = b.coeffs[j]
            if not bj.is_zero():
                out[i + j] = out[i + j] + ai * bj
    if da is not None and db is not None:
        tail = 0 if da + db < order else INF
    elif da is not None:
        tail = _poly_tail(a.coeffs[:da + 1], b, order, left=True)
    elif db is not None:
        tail = _poly_tail(b.coeffs[:db + 1], a, order, left=False)
    else:
        tail = INF
    return TruncatedSeries(out, order, tail)


def _poly_tail(p, f: TruncatedSeries, order: int, left: bool):
    """``|(p f)_{>= N}|^2 <= (d+1) sum |p_j|^2 |f_{>= N-d}|^2`` by Cauchy-Schwarz."""
    d = len(p) - 1
    if d < 0:
        return 0
    if order - d > f.order:
        return INF
    weight = 0
    for c in p:
        weight = weight + c.norm2()
    return (d + 1) * weight * f.tail_from(order - d)


# kernels and chain series -------------------------------------------------

def _check_ball(a: Quaternion):
    if not a.norm2() < 1:
        raise OutsideUnitBall(f"node {a} is not strictly inside the unit ball")


def kernel_series(a, order: int) -> TruncatedSeries:
    """``k_a(z) = sum a^k z^k`` truncated at ``order``."""
    if order < 1:
        raise ValueError("order must be >= 1")
    a = a if isinstance(a, Quaternion) else Quaternion.coerce(a)
    coeffs = [a ** 0]
    for _ in range(1, order):
        coeffs.append(coeffs[-1] * a)
    r2 = a.norm2()
    tail = r2 ** order / (1 - r2) if r2 < 1 else INF
    if isinstance(tail, int):
        tail = Fraction(tail)
    return TruncatedSeries(coeffs, order, tail)


def chain_tail_bound(rho2, j: int, order: int):
    """Bound on ``sum_{s >= order} |[a_1..a_j; z^s]_l|^2`` when every ``|a_i|^2 <= rho2 < 1``.

    Uses ``|[a_1..a_j; z^s]| <= C(s, j-1) rho^(s-j+1)`` and a geometric majorant
    once the ratio of consecutive bounds drops below one.
    """
    if rho2 >= 1:
        return INF
    s = max(order, j - 1)
    total = 0
    while True:
        term = comb(s, j - 1) ** 2 * rho2 ** (s - j + 1)
        ratio = Fraction(s + 1, s - j + 2) ** 2 * rho2 if not isinstance(rho2, float) \
            else ((s + 1) / (s - j + 2)) ** 2 * rho2
        if ratio < 1:
            return total + term / (1 - ratio)
        total = total + term
        s += 1


def _chain(c) -> SphericalChain:
    return c if isinstance(c, SphericalChain) else SphericalChain(c)


def _rho2(nodes):
    return max(a.norm2() for a in nodes)


def chain_series(c, j: int, order: int, route: str = "product") -> TruncatedSeries:
    """``z^(j-1) k_{a_j} ... k_{a_1}``; coefficient ``s`` is ``[a_1..a_j; z^s]_l``.

    ``route="product"`` multiplies kernels, ``route="divided"`` reads the
    coefficients off the left confluent Vandermonde recursion.
    """
    c = _chain(c)
    if not 1 <= j <= len(c):
        raise ValueError(f"prefix length {j} out of range for a chain of length {len(c)}")
    nodes = c.nodes[:j]
    tail = chain_tail_bound(_rho2(nodes), j, order)
    if route == "divided":
        row = build_left([SphericalChain(nodes)], order).matrix.rows[j - 1]
        return TruncatedSeries(row, order, tail)
    if route != "product":
        raise ValueError(f"unknown route {route!r}")
    one = nodes[0] ** 0
    acc = TruncatedSeries([one], order, 0)
    for a in reversed(nodes):
        acc = _series_product(acc, kernel_series(a, order), order)
    shifted = [_zero_like(one)] * (j - 1) + list(acc.coeffs[:order - j + 1])
    return TruncatedSeries(shifted, order, tail)


# inner products ------------------------------------------------------------

@dataclass(frozen=True)
class InnerProduct:
    value: Quaternion
    error_bound: float
    error_bound_sq: object = 0

    def __iter__(self):
        return iter((self.value, self.error_bound))


def _sqrt_up(x) -> float:
    if x == INF:
        return INF
    v = math.sqrt(float(x))
    return math.nextafter(v, INF) if v else 0.0


def _inner(h: TruncatedSeries, g: TruncatedSeries, left: bool) -> InnerProduct:
    n = min(h.order, g.order)
    zero = _zero_like(h.coeffs[0]) if h.coeffs else Quaternion(0, 0, 0, 0)
    acc = zero
    for hj, gj in zip(h.coeffs[:n], g.coeffs[:n]):
        acc = acc + (gj.conj() * hj if left else hj * gj.conj())
    bound_sq = h.tail_from(n) * g.tail_from(n)
    return InnerProduct(acc, _sqrt_up(bound_sq), bound_sq)


def inner_left(h: TruncatedSeries, g: TruncatedSeries) -> InnerProduct:
    """``<h, g>_l = sum conj(g_j) h_j``, with a Cauchy-Schwarz bound on the neglected part."""
    return _inner(h, g, True)


def inner_right(h: TruncatedSeries, g: TruncatedSeries) -> InnerProduct:
    """``<h, g>_r = sum h_j conj(g_j)``."""
    return _inner(h, g, False)


# Gram matrices --------------------------------------------------------------

@dataclass(frozen=True)
class GramMatrix:
    family: ChainFamily
    matrix: QMatrix
    mode: str = "stein"
    order: int | None = None
    bound_sq: tuple | None = None
    extra: dict = field(default_factory=dict)


def _family(fam) -> ChainFamily:
    return fam if isinstance(fam, ChainFamily) else ChainFamily(fam)


def _check_family_ball(fam: ChainFamily):
    for c in fam.chains:
        for a in c.nodes:
            _check_ball(a)


def _solve_twisted(alpha: Quaternion, beta_bar: Quaternion, rhs: Quaternion) -> Quaternion:
    """``X`` with ``X - alpha X beta_bar = rhs``: a 4x4 real linear system."""
    basis = [Quaternion(1, 0, 0, 0), Quaternion(0, 1, 0, 0),
             Quaternion(0, 0, 1, 0), Quaternion(0, 0, 0, 1)]
    if not rhs.is_exact():
        basis = [b.to_backend("float") for b in basis]
    images = [b - alpha * b * beta_bar for b in basis]
    mat = QMatrix([[Quaternion(images[c][r], 0, 0, 0) for c in range(4)] for r in range(4)], 4)
    rhs_col = QMatrix([[Quaternion(rhs[r], 0, 0, 0)] for r in range(4)], 1)
    x = solve(mat, rhs_col)
    return Quaternion(*(x[r, 0][0] for r in range(4)))


def stein_block(ci: SphericalChain, cj: SphericalChain) -> QMatrix:
    """Unique solution ``P`` of ``P - J_i P J_j^* = E E^*`` for two chains inside the ball."""
    a, b = ci.nodes, cj.nodes
    zero = _zero_like(a[0])
    p = [[zero] * len(b) for _ in range(len(a))]
    for r in range(len(a)):
        for s in range(len(b)):
            bb = b[s].conj()
            rhs = zero + (1 if r == 0 and s == 0 else 0)
            if s:
                rhs = rhs + a[r] * p[r][s - 1]
            if r:
                rhs = rhs + p[r - 1][s] * bb
            if r and s:
                rhs = rhs + p[r - 1][s - 1]
            p[r][s] = _solve_twisted(a[r], bb, rhs)
    return QMatrix(p, len(b))


def _assemble(fam: ChainFamily, block) -> QMatrix:
    rows = []
    for ci in fam.chains:
        blocks = [block(ci, cj) for cj in fam.chains]
        for r in range(len(ci)):
            rows.append(sum((bl.rows[r] for bl in blocks), ()))
    return QMatrix(rows, fam.total_length)


def _row_tails(fam: ChainFamily, order: int) -> list:
    out = []
    for c in fam.chains:
        for j in range(1, len(c) + 1):
            out.append(chain_tail_bound(_rho2(c.nodes[:j]), j, order))
    return out


def gram_matrix(fam, mode: str = "stein", order: int | None = None) -> GramMatrix:
    """Left Gram matrix of the conjugate chain series.

    ``mode="stein"`` solves the Stein equation block by block (exact on the
    rational backend).  ``mode="truncated"`` sums ``V_N V_N^*`` and records
    per-entry squared bounds on what was left out.
    """
    fam = _family(fam)
    _check_family_ball(fam)
    if mode == "stein":
        return GramMatrix(fam, _assemble(fam, stein_block), "stein")
    if mode != "truncated":
        raise ValueError(f"unknown mode {mode!r}")
    if order is None:
        order = default_order(fam)
    v = build_left(fam, order).matrix
    tails = _row_tails(fam, order)
    bounds = tuple(tuple(ta * tb for tb in tails) for ta in tails)
    return GramMatrix(fam, v @ v.conj_transpose(), "truncated", order, bounds)


def gram_comparison(fam, order: int | None = None) -> dict:
    """Stein Gram against the truncated sum, entry by entry against the tail bounds."""
    fam = _family(fam)
    exact = gram_matrix(fam, "stein")
    trunc = gram_matrix(fam, "truncated", order)
    return _residual_report(exact.matrix, trunc.matrix, trunc.bound_sq, trunc.order)


def _residual_report(p: QMatrix, approx: QMatrix, bound_sq, order) -> dict:
    worst, worst_bound, ok = 0, 0, True
    for r in range(p.nrows):
        for c in range(p.ncols):
            res2 = (p[r, c] - approx[r, c]).norm2()
            if res2 > bound_sq[r][c]:
                ok = False
            worst = max(worst, res2)
            worst_bound = max(worst_bound, bound_sq[r][c])
    return {"order": order, "within_bound": ok, "max_residual": math.sqrt(float(worst)),
            "max_bound": _sqrt_up(worst_bound), "max_residual_sq": worst,
            "max_bound_sq": worst_bound}


def gram_factorization_check(fam, m: int) -> dict:
    """Residual of ``P = V_m V_m^*`` against the geometric bound on columns ``>= m``."""
    fam = _family(fam)
    _check_family_ball(fam)
    p = gram_matrix(fam, "stein").matrix
    v = build_left(fam, m).matrix
    tails = _row_tails(fam, m)
    bounds = [[ta * tb for tb in tails] for ta in tails]
    return _residual_report(p, v @ v.conj_transpose(), bounds, m)


def gram_stein_residual(g: GramMatrix) -> QMatrix:
    """``P - J P J^* - E E^*`` with block diagonal ``J``; zero for the Stein Gram matrix."""
    from .vandermonde import family_generator, family_unit_column

    j = family_generator(g.family)
    e = family_unit_column(g.family)
    return g.matrix - j @ g.matrix @ j.conj_transpose() - e @ e.conj_transpose()


def default_order(fam, target: float = 1e-12, cap: int = 4096) -> int:
    """Smallest order with every chain-series tail bound below ``target``."""
    fam = _family(fam)
    specs = [(float(_rho2(c.nodes[:j])), j) for c in fam.chains for j in range(1, len(c) + 1)]
    n = max(len(c) for c in fam.chains)
    while n < cap:
        if all(chain_tail_bound(r2, j, n) < target for r2, j in specs):
            return n
        n += 1
    return cap


# minimal norm interpolation ---------------------------------------------------

@dataclass(frozen=True)
class MinimalNormSolution:
    f_min: TruncatedSeries
    norm_sq: object
    weights: QMatrix
    gram: QMatrix
    modulus: QPolynomial
    extra: dict = field(default_factory=dict)


def _binary_exact(q: Quaternion) -> Quaternion:
    """The rational number a float actually stores (not its decimal reading)."""
    return Quaternion(*(Fraction(x) for x in q))


def _to_float(q: Quaternion) -> Quaternion:
    return Quaternion(*(float(x) for x in q))


def minimal_norm_solve(prob, order: int | None = None, refine: bool = True
                       ) -> MinimalNormSolution:
    """Minimal ``H^2`` norm interpolant ``sum f#_{ij} d_ij`` with ``P d = C``.

    Float data is by default solved exactly on the binary values of the
    inputs and rounded at the end (``refine=True``): Gram matrices of nearby
    nodes are badly conditioned, and rounding in ``P`` alone would cost
    ``eps * |d|^2`` in the norm.  ``refine=False`` runs in floats throughout.
    """
    fam = prob.family
    _check_family_ball(fam)
    exact_in = fam.is_exact() and all(t.is_exact() for ts in prob.targets for t in ts)
    if exact_in or not refine:
        return _minimal_norm(fam, prob.target_column(), order)
    # the binary values of equivalent float nodes are only equivalent up to rounding
    efam = ChainFamily([SphericalChain.unchecked([_binary_exact(a) for a in c.nodes])
                        for c in fam.chains], fam.labels)
    ec = QMatrix.column([_binary_exact(t) for ts in prob.targets for t in ts])
    sol = _minimal_norm(efam, ec, order, modulus=False)
    f = sol.f_min
    f_min = TruncatedSeries([_to_float(x) for x in f.coeffs], f.order, float(f.tail_bound))
    extra = {key: _to_float(val) for key, val in sol.extra.items()}
    extra["refined"] = True
    g = lrcm_family([chain_to_poly(ch) for ch in fam.chains])
    return MinimalNormSolution(f_min, float(sol.norm_sq), sol.weights.to_backend("float"),
                               sol.gram.to_backend("float"), g, extra)


def _minimal_norm(fam: ChainFamily, c: QMatrix, order, modulus: bool = True
                  ) -> MinimalNormSolution:
    p = gram_matrix(fam, "stein").matrix
    try:
        d = solve(p, c)
    except SingularMatrixError as exc:
        raise SingularMatrixError(f"Gram matrix is singular: {exc}") from None
    weight = 0
    for x in d.col(0):
        weight = weight + x.norm2()
    if order is None:
        order = _weighted_order(fam, weight)
    v = build_left(fam, order).matrix
    coeffs = (v.conj_transpose() @ d).col(0)
    tail = weight * sum(_row_tails(fam, order))
    f_min = TruncatedSeries(coeffs, order, tail)
    norm_q = (c.conj_transpose() @ d)[0, 0]
    quad = (d.conj_transpose() @ p @ d)[0, 0]
    g = lrcm_family([chain_to_poly(ch) for ch in fam.chains]) if modulus else None
    extra = {"cstar_d": norm_q, "dstar_p_d": quad}
    return MinimalNormSolution(f_min, norm_q[0], d, p, g, extra)


def _weighted_order(fam: ChainFamily, weight, target: float = 1e-12, cap: int = 4096) -> int:
    """Smallest order at which the tail bound of ``f_min`` drops below ``target``.

    The bound scales with ``sum |d|^2``, so an ill-conditioned Gram matrix
    needs a longer truncation than the chain series alone would.
    """
    n = max(default_order(fam), fam.total_length)
    w = float(weight)
    while n < cap and w * float(sum(_row_tails(fam, n))) >= target:
        n += 1
    return n


def verify_minimal_norm(prob, sol: MinimalNormSolution,
                        tol: Tolerance = DEFAULT_TOLERANCE) -> dict:
    """Interpolation conditions through the reproducing property, with tail bounds.

    Float data also gets the rounding allowance of ``tol``.
    """
    fam = prob.family
    n = sol.f_min.order
    worst, ok = 0, True
    details = []
    for ci, (chain, targets) in enumerate(zip(fam.chains, prob.targets)):
        for j, want in enumerate(targets, start=1):
            fs = chain_series(chain, j, n, route="divided").conj_sharp()
            ip = inner_left(sol.f_min, fs)
            dev2 = (ip.value - want).norm2()
            if ip.value.is_exact() and want.is_exact():
                good = dev2 <= ip.error_bound_sq
            else:
                slack = tol.abs + tol.rel * max(1.0, want.abs())
                good = math.sqrt(dev2) <= ip.error_bound + slack
            ok = ok and good
            worst = max(worst, dev2)
            details.append({"chain": ci, "index": j - 1, "deviation_sq": dev2,
                            "bound_sq": ip.error_bound_sq, "within_bound": good})
    return {"all_within_bound": ok, "max_deviation": math.sqrt(float(worst)), "conditions": details}


def orthogonality_check(sol: MinimalNormSolution, q: QPolynomial) -> InnerProduct:
    """``<f_min, G q>_l``; zero up to the reported bound."""
    gq = sol.modulus * q
    n = sol.f_min.order
    return inner_left(sol.f_min, TruncatedSeries.from_polynomial(gq, max(n, gq.degree + 1)))


# isometries -----------------------------------------------------------------

def blaschke_factor(beta, order: int) -> TruncatedSeries:
    """``(z - beta) k_beta`` for real ``beta`` with ``|beta| < 1``."""
    beta = beta if isinstance(beta, Quaternion) else Quaternion.coerce(beta)
    if not beta.is_real():
        raise ValueError("the classical factor needs a real beta")
    p = QPolynomial([-beta, beta ** 0])
    return _series_product(TruncatedSeries.from_polynomial(p, 2), kernel_series(beta, order), order)


def _random_poly(rng: random.Random, degree: int, exact: bool) -> QPolynomial:
    def comp():
        v = rng.randint(-5, 5)
        return Fraction(v, rng.randint(1, 4)) if exact else float(v) / rng.randint(1, 4)
    return QPolynomial([Quaternion(comp(), comp(), comp(), comp()) for _ in range(degree + 1)])


def isometry_check(theta: TruncatedSeries, trials: int = 20, degree: int = 4,
                   seed: int = 0, tol: Tolerance = DEFAULT_TOLERANCE) -> dict:
    """Compare ``|theta h|^2`` with ``|h|^2`` for random polynomials ``h``."""
    rng = random.Random(seed)
    exact = theta.is_exact()
    worst_dev, worst_bound, ok = 0, 0, True
    for _ in range(trials):
        h = _random_poly(rng, rng.randint(0, degree), exact)
        th = _series_product(theta, TruncatedSeries.from_polynomial(h, h.degree + 1 if h else 1),
                             theta.order)
        lhs = th.norm2_truncated()
        rhs = h.norm2()
        dev = rhs - lhs
        bound = th.tail_bound
        if exact:
            good = 0 <= dev <= bound
        else:
            slack = tol.abs + tol.rel * float(rhs)
            good = -slack <= dev <= bound + slack
        ok = ok and good
        worst_dev = max(worst_dev, abs(dev))
        worst_bound = max(worst_bound, bound)
    return {"trials": trials, "within_bound": ok, "max_deviation": float(worst_dev),
            "max_tail_bound": float(worst_bound)}


def gram_rank(fam) -> dict:
    g = gram_matrix(fam, "stein")
    return {"rank": g.matrix.rank(), "kappa": kappa(g.family)}
