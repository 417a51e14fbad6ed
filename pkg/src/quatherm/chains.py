"""Spherical chains, their indecomposable polynomials, glcd/lrcm and the integers mu, kappa.

A spherical chain is a tuple of pairwise-equivalent quaternions in which no node
is followed by its own conjugate.  Repeating a real node is allowed (the real
class is a single point, and ``(a, a)`` for real ``a`` stands for the double
root of ``(z - a)^2``).
"""

from __future__ import annotations

from dataclasses import dataclass

from . import qmatrix
from .qpoly import QPolynomial, characteristic_polynomial, divide_left, product, rho
from .scalar import (DEFAULT_TOLERANCE, ConjugacyClass, Quaternion, Tolerance,
                     class_of, close, equivalent)


class SphericalChainError(ValueError):
    """Base class for invalid chain input."""


class EmptyChain(SphericalChainError):
    def __init__(self):
        super().__init__("Empty")

    def __str__(self):
        return "Empty"


class EquivalenceBroken(SphericalChainError):
    """Node ``index`` (0-based) is not equivalent to its predecessor."""

    def __init__(self, index: int):
        self.index = index
        super().__init__(index)

    def __str__(self):
        return f"EquivalenceBroken({self.index})"


class ConjugateAdjacency(SphericalChainError):
    """Node ``index`` (0-based) is the conjugate of its (nonreal) predecessor."""

    def __init__(self, index: int):
        self.index = index
        super().__init__(index)

    def __str__(self):
        return f"ConjugateAdjacency({self.index})"


class MixedClassError(ValueError):
    pass


def _same_node(a: Quaternion, b: Quaternion, tol: Tolerance) -> bool:
    return a == b if (a.is_exact() and b.is_exact()) else close(a, b, tol)


class SphericalChain:
    """Validated, immutable chain of quaternion nodes."""

    __slots__ = ("nodes",)

    def __init__(self, nodes, tol: Tolerance = DEFAULT_TOLERANCE):
        nodes = tuple(n if isinstance(n, Quaternion) else Quaternion.coerce(n) for n in nodes)
        if not nodes:
            raise EmptyChain()
        for idx in range(1, len(nodes)):
            prev, cur = nodes[idx - 1], nodes[idx]
            if not equivalent(prev, cur, tol):
                raise EquivalenceBroken(idx)
            if not prev.is_real() and _same_node(cur, prev.conj(), tol):
                raise ConjugateAdjacency(idx)
        self.nodes = nodes

    @classmethod
    def unchecked(cls, nodes) -> "SphericalChain":
        """Skip validation, for nodes already validated under a tolerance and then converted."""
        chain = cls.__new__(cls)
        chain.nodes = tuple(nodes)
        return chain

    def __len__(self):
        return len(self.nodes)

    def __iter__(self):
        return iter(self.nodes)

    def __getitem__(self, idx):
        return self.nodes[idx]

    def __eq__(self, other):
        if isinstance(other, SphericalChain):
            return self.nodes == other.nodes
        return NotImplemented

    def __hash__(self):
        return hash(self.nodes)

    def __repr__(self):
        return "SphericalChain(" + ", ".join(str(n) for n in self.nodes) + ")"

    @property
    def length(self) -> int:
        return len(self.nodes)

    @property
    def conjugacy_class(self) -> ConjugacyClass:
        return class_of(self.nodes[0])

    def conj(self) -> "SphericalChain":
        return SphericalChain([n.conj() for n in self.nodes])

    def prefix(self, j: int) -> "SphericalChain":
        return SphericalChain(self.nodes[:j])

    def to_backend(self, backend: str) -> "SphericalChain":
        return SphericalChain([n.to_backend(backend) for n in self.nodes])

    def is_exact(self) -> bool:
        return all(n.is_exact() for n in self.nodes)


def validate(nodes, tol: Tolerance = DEFAULT_TOLERANCE) -> SphericalChain:
    return SphericalChain(nodes, tol)


def _as_chain(c) -> SphericalChain:
    return c if isinstance(c, SphericalChain) else SphericalChain(c)


@dataclass(frozen=True)
class ChainFamily:
    """Ordered family of chains, optionally labelled."""

    chains: tuple
    labels: tuple | None = None

    def __init__(self, chains, labels=None):
        chains = tuple(_as_chain(c) for c in chains)
        if labels is not None:
            labels = tuple(labels)
            if len(labels) != len(chains):
                raise ValueError("one label per chain")
        object.__setattr__(self, "chains", chains)
        object.__setattr__(self, "labels", labels)

    def __len__(self):
        return len(self.chains)

    def __iter__(self):
        return iter(self.chains)

    def __getitem__(self, idx):
        return self.chains[idx]

    @property
    def lengths(self) -> list:
        return [len(c) for c in self.chains]

    @property
    def total_length(self) -> int:
        return sum(self.lengths)

    def nodes(self) -> list:
        return [a for c in self.chains for a in c.nodes]

    def conj(self) -> "ChainFamily":
        return ChainFamily([c.conj() for c in self.chains], self.labels)

    def to_backend(self, backend: str) -> "ChainFamily":
        return ChainFamily([c.to_backend(backend) for c in self.chains], self.labels)

    def is_exact(self) -> bool:
        return all(c.is_exact() for c in self.chains)

    def classes(self, tol: Tolerance = DEFAULT_TOLERANCE) -> list:
        """``[(ConjugacyClass, [chain indices])]`` in order of first appearance."""
        groups = []
        for idx, c in enumerate(self.chains):
            cls = c.conjugacy_class
            for g in groups:
                if g[0].same_as(cls, tol):
                    g[1].append(idx)
                    break
            else:
                groups.append((cls, [idx]))
        return groups


def chain_to_poly(c) -> QPolynomial:
    """``P = (z - a_1)(z - a_2)...(z - a_k)``."""
    c = _as_chain(c)
    return product(rho(a) for a in c.nodes)


def prefix_len(a, b, tol: Tolerance = DEFAULT_TOLERANCE) -> int:
    """Number of leading nodes shared (node equality, not equivalence)."""
    n = 0
    for x, y in zip(_as_chain(a).nodes, _as_chain(b).nodes):
        if not _same_node(x, y, tol):
            break
        n += 1
    return n


# glcd / lrcm ------------------------------------------------------------

def glcd(f: QPolynomial, g: QPolynomial, tol: Tolerance = DEFAULT_TOLERANCE) -> QPolynomial:
    """Monic generator of the right ideal ``f H[z] + g H[z]``.

    Euclid with ``f = g q + r``; each new divisor is normalised to be monic on
    the right, which keeps the ideal it generates unchanged.
    """
    if f.is_zero() and g.is_zero():
        raise ValueError("glcd of two zero polynomials")
    if f.is_zero():
        return g.monic()
    if g.is_zero():
        return f.monic()
    a, b = f.monic(), g.monic()
    if a.degree < b.degree:
        a, b = b, a
    while not b.is_zero():
        _, r = divide_left(a, b, tol)
        a, b = b, (r.monic() if not r.is_zero() else r)
    return a


def lrcm(f: QPolynomial, g: QPolynomial, tol: Tolerance = DEFAULT_TOLERANCE) -> QPolynomial:
    """Monic generator of ``f H[z] ∩ g H[z]``.

    Writes the answer as ``f a`` with ``deg a = deg g - deg glcd(f, g)`` and
    fixes the coefficients of ``a`` by requiring the remainder of ``f a`` on
    left division by ``g`` to vanish.  That remainder is right linear in the
    coefficients of ``a``.
    """
    if f.is_zero() or g.is_zero():
        raise ValueError("lrcm of a zero polynomial")
    d = glcd(f, g, tol)
    k = g.degree - d.degree
    lead_inv = f.leading.inverse()
    if k == 0:
        return f * lead_inv
    n = g.degree
    zero = lead_inv * 0
    cols = []
    for j in range(k + 1):
        _, r = divide_left(f * QPolynomial.monomial(j, lead_inv * 0 + 1), g, tol)
        cols.append([r.coeff(t) if t <= r.degree else zero for t in range(n)])
    a_mat = qmatrix.QMatrix([[cols[j][t] for j in range(k)] for t in range(n)], k)
    rhs = qmatrix.QMatrix([[-(cols[k][t] * lead_inv)] for t in range(n)], 1)
    x, rank_a, rank_ab = qmatrix.solve_consistent(a_mat, rhs, tol)
    if x is None:
        raise ArithmeticError(
            f"lrcm cofactor system inconsistent (rank {rank_a} vs {rank_ab}); glcd degree mismatch")
    a = QPolynomial([x[j, 0] for j in range(k)] + [lead_inv])
    h = f * a
    if not h.is_exact():
        h = QPolynomial(list(h.coeffs[:-1]) + [lead_inv * 0 + 1])
    return h


def lrcm_family(ps, tol: Tolerance = DEFAULT_TOLERANCE) -> QPolynomial:
    ps = list(ps)
    if not ps:
        raise ValueError("lrcm of an empty family")
    out = ps[0].monic()
    for p in ps[1:]:
        out = lrcm(out, p, tol)
    return out


def _longest_first(chains):
    """Indices sorted by decreasing length; ties keep input order."""
    return sorted(range(len(chains)), key=lambda i: -len(chains[i]))


def _check_one_class(chains, tol):
    cls = chains[0].conjugacy_class
    for c in chains[1:]:
        if not cls.same_as(c.conjugacy_class, tol):
            raise MixedClassError("chains belong to different conjugacy classes")
    return cls


def lrcm_closed_form(chains, tol: Tolerance = DEFAULT_TOLERANCE) -> QPolynomial:
    """lrcm of the chain polynomials of chains in one class, from chain data alone.

    With the longest chain ``b`` first and ``m = max (k_j - nu_j)`` over the
    others, the answer is ``X^m`` when ``m = len(b)`` and otherwise
    ``X^m (z - b_1)...(z - b_{len(b) - m})``, where ``X`` is the real
    quadratic of the class.
    """
    chains = [_as_chain(c) for c in chains]
    if not chains:
        raise ValueError("empty chain list")
    cls = _check_one_class(chains, tol)
    order = _longest_first(chains)
    lead = chains[order[0]]
    if len(chains) == 1:
        return chain_to_poly(lead)
    m = max(len(chains[j]) - prefix_len(chains[j], lead, tol) for j in order[1:])
    x = characteristic_polynomial(cls.trace, cls.norm)
    out = x ** m
    if m < len(lead):
        out = out * chain_to_poly(SphericalChain(lead.nodes[:len(lead) - m]))
    return out


def mu_of_class(chains, tol: Tolerance = DEFAULT_TOLERANCE) -> int:
    """``k_i + max_{j != i} (k_j - nu_j)`` with ``i`` the first longest chain."""
    chains = [_as_chain(c) for c in chains]
    if not chains:
        raise ValueError("empty chain list")
    _check_one_class(chains, tol)
    i = _longest_first(chains)[0]
    if len(chains) == 1:
        return len(chains[0])
    return len(chains[i]) + max(len(chains[j]) - prefix_len(chains[j], chains[i], tol)
                                for j in range(len(chains)) if j != i)


def kappa(fam: ChainFamily, tol: Tolerance = DEFAULT_TOLERANCE) -> int:
    return sum(mu_of_class([fam.chains[i] for i in idx], tol) for _, idx in fam.classes(tol))


def kappa_report(fam: ChainFamily, tol: Tolerance = DEFAULT_TOLERANCE,
                 check_lrcm: bool = True) -> dict:
    """Per-class breakdown of kappa, with the lrcm degree computed independently."""
    classes = []
    total = 0
    for cls, idx in fam.classes(tol):
        mu = mu_of_class([fam.chains[i] for i in idx], tol)
        total += mu
        classes.append({"trace": cls.trace, "norm": cls.norm, "chains": idx, "mu": mu})
    report = {"kappa": total, "classes": classes}
    if check_lrcm:
        g = lrcm_family([chain_to_poly(c) for c in fam.chains], tol)
        report["lrcm"] = g
        report["lrcm_degree"] = g.degree
        report["consistent"] = g.degree == total
    return report
