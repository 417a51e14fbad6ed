"""Lagrange-Hermite interpolation over spherical chains.

Conditions prescribe the left divided differences of ``f`` along every prefix of
every chain.  A problem is solvable iff the targets lie in the column span of
the confluent Vandermonde matrix; all solutions then differ by right multiples
``G h`` of the lrcm ``G`` of the chain polynomials.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .chains import ChainFamily, chain_to_poly, kappa, lrcm_family
from .divdiff import divided_difference_left
from .qmatrix import QMatrix, solve as matrix_solve, solve_consistent
from .qpoly import QPolynomial
from .scalar import DEFAULT_TOLERANCE, Quaternion, Tolerance, close
from .vandermonde import build_left, invertibility_check


@dataclass(frozen=True)
class InterpolationProblem:
    family: ChainFamily
    targets: tuple

    def __init__(self, family, targets):
        family = family if isinstance(family, ChainFamily) else ChainFamily(family)
        targets = tuple(tuple(t if isinstance(t, Quaternion) else Quaternion.coerce(t) for t in ts)
                        for ts in targets)
        if len(targets) != len(family):
            raise ValueError(f"{len(family)} chains but {len(targets)} target lists")
        for idx, (c, ts) in enumerate(zip(family.chains, targets)):
            if len(ts) != len(c):
                raise ValueError(f"chain {idx} has {len(c)} nodes but {len(ts)} targets")
        object.__setattr__(self, "family", family)
        object.__setattr__(self, "targets", targets)

    @classmethod
    def from_polynomial(cls, family, f: QPolynomial) -> "InterpolationProblem":
        """Targets read off from ``f``: always a consistent problem."""
        family = family if isinstance(family, ChainFamily) else ChainFamily(family)
        return cls(family, [divided_difference_left(c, f).values for c in family.chains])

    @property
    def size(self) -> int:
        return self.family.total_length

    def target_column(self) -> QMatrix:
        return QMatrix.column([t for ts in self.targets for t in ts])

    def conj(self) -> "InterpolationProblem":
        return InterpolationProblem(self.family.conj(),
                                    [[t.conj() for t in ts] for ts in self.targets])


@dataclass(frozen=True)
class InterpolationSolution:
    particular: QPolynomial | None
    modulus: QPolynomial
    solvable: bool
    rank_report: tuple
    kappa: int = 0
    method: str = ""
    side: str = "left"
    extra: dict = field(default_factory=dict)

    def general(self, h: QPolynomial) -> QPolynomial:
        """Another solution: ``particular + G h`` (left side) or ``particular + h G`` (right side)."""
        if not self.solvable:
            raise ValueError("problem has no solution")
        if self.side == "right":
            return self.particular + h * self.modulus
        return self.particular + self.modulus * h


def reduce_congruence(chain, h: QPolynomial) -> tuple:
    """Targets expressing ``f = h (mod_r P)`` as divided-difference conditions."""
    if h.degree >= len(chain):
        raise ValueError(f"degree {h.degree} not below chain length {len(chain)}")
    return divided_difference_left(chain, h).values


def _poly_from_column(x: QMatrix) -> QPolynomial:
    return QPolynomial(x.col(0))


def solve_problem(prob: InterpolationProblem, tol: Tolerance = DEFAULT_TOLERANCE
                  ) -> InterpolationSolution:
    fam = prob.family
    n = prob.size
    g = lrcm_family([chain_to_poly(c) for c in fam.chains], tol)
    k = kappa(fam, tol)
    c = prob.target_column()
    if invertibility_check(fam, tol):
        v = build_left(fam, n).matrix
        x = matrix_solve(v, c, tol)
        return InterpolationSolution(_poly_from_column(x), g, True, (n, n), k, "square")
    v = build_left(fam, k).matrix
    x, rank_v, rank_vc = solve_consistent(v, c, tol)
    if x is None:
        return InterpolationSolution(None, g, False, (rank_v, rank_vc), k, "rank")
    return InterpolationSolution(_poly_from_column(x), g, True, (rank_v, rank_vc), k, "rank")


def solve(prob: InterpolationProblem, tol: Tolerance = DEFAULT_TOLERANCE) -> InterpolationSolution:
    return solve_problem(prob, tol)


def solve_right(prob: InterpolationProblem, tol: Tolerance = DEFAULT_TOLERANCE
                ) -> InterpolationSolution:
    """Same problem with right divided differences, solved on the conjugate data."""
    sol = solve_problem(prob.conj(), tol)
    part = sol.particular.conj_sharp() if sol.particular is not None else None
    return InterpolationSolution(part, sol.modulus.conj_sharp(), sol.solvable, sol.rank_report,
                                 sol.kappa, sol.method, "right")


def verify(prob: InterpolationProblem, f: QPolynomial, side: str = "left",
           tol: Tolerance = DEFAULT_TOLERANCE) -> dict:
    """Recompute every divided difference of ``f`` and compare with the targets."""
    from .divdiff import divided_difference_right

    dd = divided_difference_left if side == "left" else divided_difference_right
    mismatches = []
    max_dev = 0.0
    exact = f.is_exact() and all(t.is_exact() for ts in prob.targets for t in ts)
    for i, (chain, ts) in enumerate(zip(prob.family.chains, prob.targets)):
        got = dd(chain, f).values
        for j, (want, have) in enumerate(zip(ts, got)):
            if not exact:
                max_dev = max(max_dev, (want - have).abs())
            if not close(want, have, tol):
                mismatches.append({"chain": i, "index": j, "expected": want, "actual": have})
    report = {"all_match": not mismatches, "mismatches": mismatches, "exact": exact}
    if not exact:
        report["max_deviation"] = max_dev
    return report


def kernel_basis(fam, m: int, tol: Tolerance = DEFAULT_TOLERANCE) -> dict:
    """Null space of the ``m``-column matrix described through the lrcm ``G``."""
    if m < 1:
        raise ValueError("m must be >= 1")
    fam = fam if isinstance(fam, ChainFamily) else ChainFamily(fam)
    g = lrcm_family([chain_to_poly(c) for c in fam.chains], tol)
    k = kappa(fam, tol)
    dim = max(0, m - k)
    basis = [g * QPolynomial.monomial(q, g.leading * 0 + 1) for q in range(dim)]
    v = build_left(fam, m).matrix
    nullity = m - v.rank(tol)
    in_kernel = all((v @ QMatrix.column([p.coeff(j) for j in range(m)])).is_zero()
                    for p in basis) if g.is_exact() else None
    return {"modulus": g, "kappa": k, "dimension": dim, "elimination_nullity": nullity,
            "basis": basis, "basis_in_kernel": in_kernel, "consistent": nullity == dim}
