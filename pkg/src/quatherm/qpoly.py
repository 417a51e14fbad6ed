"""The ring H[z] of quaternion polynomials ``f(z) = sum_j z^j f_j``.

The variable commutes with coefficients, coefficients are stored by power and
conventionally written on the right.  Left and right evaluation differ:
``eval_left(f, a) = sum a^j f_j`` while ``eval_right(f, a) = sum f_j a^j``.
"""

from __future__ import annotations

import math
from numbers import Real

from .scalar import DEFAULT_TOLERANCE, Quaternion, Tolerance, is_negligible

#: degree of the zero polynomial; ``NEG_INF + n == NEG_INF`` keeps degree sums honest
NEG_INF = -math.inf


def _as_quaternion(c) -> Quaternion:
    if isinstance(c, Quaternion):
        return c
    return Quaternion.coerce(c)


class QPolynomial:
    """Dense polynomial with quaternion coefficients, ``coeffs[j]`` multiplying ``z^j``."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs=()):
        cs = [_as_quaternion(c) for c in coeffs]
        while cs and cs[-1].is_zero():
            cs.pop()
        self.coeffs = tuple(cs)

    # constructors -----------------------------------------------------
    @classmethod
    def constant(cls, c) -> "QPolynomial":
        return cls([c])

    @classmethod
    def monomial(cls, j: int, c=1) -> "QPolynomial":
        c = _as_quaternion(c)
        return cls([c * 0] * j + [c])

    @classmethod
    def z(cls) -> "QPolynomial":
        return cls.monomial(1)

    @classmethod
    def real(cls, coeffs) -> "QPolynomial":
        return cls([Quaternion.coerce(c) for c in coeffs])

    # basic structure --------------------------------------------------
    @property
    def degree(self):
        return len(self.coeffs) - 1 if self.coeffs else NEG_INF

    def is_zero(self) -> bool:
        return not self.coeffs

    def __bool__(self):
        return bool(self.coeffs)

    @property
    def leading(self) -> Quaternion:
        if not self.coeffs:
            raise ValueError("zero polynomial has no leading coefficient")
        return self.coeffs[-1]

    def coeff(self, j: int) -> Quaternion:
        if 0 <= j < len(self.coeffs):
            return self.coeffs[j]
        return Quaternion(0, 0, 0, 0)

    def is_monic(self) -> bool:
        return bool(self.coeffs) and self.coeffs[-1] == Quaternion(1, 0, 0, 0)

    def __eq__(self, other):
        if isinstance(other, QPolynomial):
            return self.coeffs == other.coeffs
        return NotImplemented

    def __hash__(self):
        return hash(self.coeffs)

    def __repr__(self):
        if not self.coeffs:
            return "QPolynomial(0)"
        return f"QPolynomial({self})"

    def __str__(self):
        if not self.coeffs:
            return "0"
        terms = []
        for j in range(len(self.coeffs) - 1, -1, -1):
            c = self.coeffs[j]
            if c.is_zero():
                continue
            power = "" if j == 0 else ("z" if j == 1 else f"z^{j}")
            if not power:
                terms.append(f"({c})")
            elif c == Quaternion(1, 0, 0, 0):
                terms.append(power)
            else:
                terms.append(f"{power}({c})")
        return " + ".join(terms)

    # ring operations --------------------------------------------------
    def __add__(self, other):
        other = _promote(other)
        if other is None:
            return NotImplemented
        n = max(len(self.coeffs), len(other.coeffs))
        return QPolynomial([self.coeff(j) + other.coeff(j) for j in range(n)])

    __radd__ = __add__

    def __neg__(self):
        return QPolynomial([-c for c in self.coeffs])

    def __sub__(self, other):
        other = _promote(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = _promote(other)
        if other is None:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        if isinstance(other, (Quaternion, Real)):
            return QPolynomial([c * other for c in self.coeffs])
        if not isinstance(other, QPolynomial):
            return NotImplemented
        if not self.coeffs or not other.coeffs:
            return QPolynomial()
        a, b = self.coeffs, other.coeffs
        out = [None] * (len(a) + len(b) - 1)
        for p, fp in enumerate(a):
            for q, gq in enumerate(b):
                term = fp * gq
                out[p + q] = term if out[p + q] is None else out[p + q] + term
        return QPolynomial(out)

    def __rmul__(self, other):
        # constant on the left: c * f has coefficients c * f_j
        if isinstance(other, (Quaternion, Real)):
            return QPolynomial([other * c for c in self.coeffs])
        return NotImplemented

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            return NotImplemented
        result = QPolynomial([1])
        for _ in range(n):
            result = result * self
        return result

    # evaluation and shifts ---------------------------------------------
    def eval_left(self, a: Quaternion) -> Quaternion:
        """``sum a^j f_j``."""
        acc = Quaternion(0, 0, 0, 0)
        for c in reversed(self.coeffs):
            acc = c + a * acc
        return acc

    def eval_right(self, a: Quaternion) -> Quaternion:
        """``sum f_j a^j``."""
        acc = Quaternion(0, 0, 0, 0)
        for c in reversed(self.coeffs):
            acc = c + acc * a
        return acc

    def lshift(self, a: Quaternion) -> "QPolynomial":
        """Left backward shift: ``f = f(a)_left + (z - a) * lshift(a)``."""
        n = len(self.coeffs)
        if n <= 1:
            return QPolynomial()
        out = [None] * (n - 1)
        acc = self.coeffs[-1]
        out[-1] = acc
        for k in range(n - 3, -1, -1):
            acc = self.coeffs[k + 1] + a * acc
            out[k] = acc
        return QPolynomial(out)

    def rshift(self, a: Quaternion) -> "QPolynomial":
        """Right backward shift: ``f = f(a)_right + rshift(a) * (z - a)``."""
        n = len(self.coeffs)
        if n <= 1:
            return QPolynomial()
        out = [None] * (n - 1)
        acc = self.coeffs[-1]
        out[-1] = acc
        for k in range(n - 3, -1, -1):
            acc = self.coeffs[k + 1] + acc * a
            out[k] = acc
        return QPolynomial(out)

    def derivative(self, k: int = 1) -> "QPolynomial":
        if k < 0:
            raise ValueError("derivative order must be nonnegative")
        out = []
        for j in range(k, len(self.coeffs)):
            factor = 1
            for t in range(j - k + 1, j + 1):
                factor *= t
            out.append(self.coeffs[j] * factor)
        return QPolynomial(out)

    def taylor_left(self, a: Quaternion) -> list:
        """Values ``(f^(k))_left(a) / k!`` for ``k = 0..deg f``; ``f = sum rho_a^k * value_k``."""
        if not self.coeffs:
            return []
        return [self.derivative(k).eval_left(a) / math.factorial(k)
                for k in range(len(self.coeffs))]

    def taylor_right(self, a: Quaternion) -> list:
        if not self.coeffs:
            return []
        return [self.derivative(k).eval_right(a) / math.factorial(k)
                for k in range(len(self.coeffs))]

    def conj_sharp(self) -> "QPolynomial":
        """Coefficientwise conjugate ``f^#``."""
        return QPolynomial([c.conj() for c in self.coeffs])

    def monic(self) -> "QPolynomial":
        """``f * lead(f)^{-1}``: same right ideal, leading coefficient one."""
        if not self.coeffs:
            raise ValueError("zero polynomial cannot be made monic")
        return self * self.leading.inverse()

    def monic_left(self) -> "QPolynomial":
        """``lead(f)^{-1} * f``: same left ideal, leading coefficient one."""
        if not self.coeffs:
            raise ValueError("zero polynomial cannot be made monic")
        return self.leading.inverse() * self

    def trim(self, tol: Tolerance = DEFAULT_TOLERANCE, scale=None) -> "QPolynomial":
        """Drop leading coefficients negligible relative to ``scale`` (default: the largest one)."""
        if not self.coeffs:
            return self
        if scale is None:
            scale = max(c.abs() for c in self.coeffs)
        cs = list(self.coeffs)
        while cs and is_negligible(cs[-1], scale, tol):
            cs.pop()
        return QPolynomial(cs)

    def is_exact(self) -> bool:
        return all(c.is_exact() for c in self.coeffs)

    def norm2(self):
        """Squared H^2 norm ``sum |f_j|^2``."""
        total = 0
        for c in self.coeffs:
            total = total + c.norm2()
        return total

    def to_backend(self, backend: str) -> "QPolynomial":
        return QPolynomial([c.to_backend(backend) for c in self.coeffs])


def _promote(x):
    if isinstance(x, QPolynomial):
        return x
    if isinstance(x, (Quaternion, Real)):
        return QPolynomial([_as_quaternion(x)])
    return None


def rho(a) -> QPolynomial:
    """The linear polynomial ``z - a``."""
    a = _as_quaternion(a)
    return QPolynomial([-a, Quaternion(1 + 0 * a[0], 0 * a[0], 0 * a[0], 0 * a[0])])


def product(factors, start: QPolynomial | None = None) -> QPolynomial:
    out = QPolynomial([1]) if start is None else start
    for f in factors:
        out = out * f
    return out


def _divide(f: QPolynomial, g: QPolynomial, side: str, tol: Tolerance):
    if g.is_zero():
        raise ZeroDivisionError("division by the zero polynomial")
    m = len(g.coeffs) - 1
    lead_inv = g.leading.inverse()
    exact = all(c.is_exact() for c in f.coeffs + g.coeffs)
    rem = list(f.coeffs)
    quot = [Quaternion(0, 0, 0, 0)] * max(len(rem) - m, 0)
    for top in range(len(rem) - 1, m - 1, -1):
        c = rem[top]
        shift = top - m
        if c.is_zero():
            continue
        t = c * lead_inv if side == "right" else lead_inv * c
        quot[shift] = t
        for j, gj in enumerate(g.coeffs[:-1]):
            rem[shift + j] = rem[shift + j] - (t * gj if side == "right" else gj * t)
        # the leading term cancels by construction; drop it instead of trusting rounding
        rem[top] = Quaternion(0 * c[0], 0 * c[0], 0 * c[0], 0 * c[0])
    r = QPolynomial(rem[:m])
    if not exact:
        scale = max(c.abs() for c in f.coeffs) if f.coeffs else 0.0
        r = r.trim(tol, scale)
    return QPolynomial(quot), r


def divide_right(f: QPolynomial, g: QPolynomial, tol: Tolerance = DEFAULT_TOLERANCE):
    """``f = q * g + r`` with ``deg r < deg g`` (``g`` a right divisor)."""
    return _divide(f, g, "right", tol)


def divide_left(f: QPolynomial, g: QPolynomial, tol: Tolerance = DEFAULT_TOLERANCE):
    """``f = g * q + r`` with ``deg r < deg g`` (``g`` a left divisor)."""
    return _divide(f, g, "left", tol)


def eval_left(f: QPolynomial, a: Quaternion) -> Quaternion:
    return f.eval_left(a)


def eval_right(f: QPolynomial, a: Quaternion) -> Quaternion:
    return f.eval_right(a)


def lshift(a: Quaternion, f: QPolynomial) -> QPolynomial:
    return f.lshift(a)


def rshift(a: Quaternion, f: QPolynomial) -> QPolynomial:
    return f.rshift(a)


def derivative(f: QPolynomial, k: int = 1) -> QPolynomial:
    return f.derivative(k)


def conj_sharp(f: QPolynomial) -> QPolynomial:
    return f.conj_sharp()


def characteristic_polynomial(trace, norm) -> QPolynomial:
    """``z^2 - trace z + norm``, the real quadratic vanishing on a conjugacy class."""
    return QPolynomial.real([norm, -trace, 1 + 0 * norm])
