"""Quaternion scalars with exact-rational or floating components.

A :class:`Quaternion` is an immutable 4-tuple ``(x0, x1, x2, x3)`` standing for
``x0 + x1 i + x2 j + x3 k``.  Components are either exact rationals
(``int``/``fractions.Fraction``) or Python floats; the two kinds are the
"exact" and "float" backends.  Every algorithm in the package is written once
against this type and only the zero tests differ between backends (see
:func:`is_negligible`).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Real

EXACT = "exact"
FLOAT = "float"
BACKENDS = (EXACT, FLOAT)


@dataclass(frozen=True)
class Tolerance:
    """Tolerance policy used by the float backend only."""

    rel: float = 1e-9
    abs: float = 1e-12


DEFAULT_TOLERANCE = Tolerance()


def to_scalar(x, backend: str = EXACT):
    """Convert ``x`` (int, Fraction, float or a ``"p/q"`` string) to a backend scalar."""
    if backend == EXACT:
        if isinstance(x, Fraction):
            return x
        if isinstance(x, int):
            return Fraction(x)
        if isinstance(x, float):
            # decimal reading: 0.7 -> 7/10, not the binary expansion
            return Fraction(repr(x))
        if isinstance(x, str):
            return Fraction(x.strip())
        return Fraction(x)
    if backend == FLOAT:
        if isinstance(x, str):
            return float(Fraction(x.strip()))
        return float(x)
    raise ValueError(f"unknown backend {backend!r}")


def _div(x, n):
    if isinstance(x, int) and isinstance(n, int):
        return Fraction(x, n)
    return x / n


class Quaternion(tuple):
    """Hamilton quaternion ``x0 + x1 i + x2 j + x3 k``.

    >>> I * J == K
    True
    >>> J * I == -K
    True
    """

    __slots__ = ()

    def __new__(cls, x0=0, x1=0, x2=0, x3=0):
        return tuple.__new__(cls, (x0, x1, x2, x3))

    @classmethod
    def coerce(cls, value, backend: str | None = None) -> "Quaternion":
        """Turn a real scalar, 4-sequence or Quaternion into a Quaternion."""
        if isinstance(value, Quaternion):
            return value if backend is None else value.to_backend(backend)
        if isinstance(value, (Real, str)):
            parts = (value, 0, 0, 0)
        else:
            parts = tuple(value)
            if len(parts) != 4:
                raise ValueError(f"expected 4 components, got {len(parts)}")
        if backend is None:
            return cls(*parts)
        return cls(*(to_scalar(p, backend) for p in parts))

    @classmethod
    def exact(cls, x0=0, x1=0, x2=0, x3=0) -> "Quaternion":
        return cls(*(to_scalar(p, EXACT) for p in (x0, x1, x2, x3)))

    def to_backend(self, backend: str) -> "Quaternion":
        return Quaternion(*(to_scalar(p, backend) for p in self))

    # components ---------------------------------------------------------
    @property
    def x0(self):
        return self[0]

    @property
    def x1(self):
        return self[1]

    @property
    def x2(self):
        return self[2]

    @property
    def x3(self):
        return self[3]

    @property
    def real(self):
        return self[0]

    @property
    def imag(self) -> "Quaternion":
        return Quaternion(0 * self[0], self[1], self[2], self[3])

    # predicates ---------------------------------------------------------
    def is_zero(self) -> bool:
        return not (self[0] or self[1] or self[2] or self[3])

    def is_real(self) -> bool:
        return not (self[1] or self[2] or self[3])

    def is_exact(self) -> bool:
        return not any(isinstance(x, float) for x in self)

    def __bool__(self):
        return not self.is_zero()

    def __eq__(self, other):
        if isinstance(other, Real):
            return self.is_real() and self[0] == other
        return tuple.__eq__(self, other)

    def __ne__(self, other):
        return not self == other

    def __hash__(self):
        # real quaternions hash like the real number they equal
        return hash(self[0]) if self.is_real() else tuple.__hash__(self)

    # arithmetic ---------------------------------------------------------
    def conj(self) -> "Quaternion":
        a, b, c, d = self
        return Quaternion(a, -b, -c, -d)

    def norm2(self):
        """``|q|^2``, a real scalar of the same kind as the components."""
        a, b, c, d = self
        return a * a + b * b + c * c + d * d

    def abs(self) -> float:
        return math.sqrt(self.norm2())

    def inverse(self) -> "Quaternion":
        n = self.norm2()
        if not n:
            raise ZeroDivisionError("quaternion inverse of zero")
        a, b, c, d = self
        return Quaternion(_div(a, n), _div(-b, n), _div(-c, n), _div(-d, n))

    def __neg__(self):
        a, b, c, d = self
        return Quaternion(-a, -b, -c, -d)

    def __pos__(self):
        return self

    def __add__(self, other):
        if isinstance(other, Quaternion):
            return Quaternion(self[0] + other[0], self[1] + other[1],
                              self[2] + other[2], self[3] + other[3])
        if isinstance(other, Real):
            return Quaternion(self[0] + other, self[1], self[2], self[3])
        return NotImplemented

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, Quaternion):
            return Quaternion(self[0] - other[0], self[1] - other[1],
                              self[2] - other[2], self[3] - other[3])
        if isinstance(other, Real):
            return Quaternion(self[0] - other, self[1], self[2], self[3])
        return NotImplemented

    def __rsub__(self, other):
        if isinstance(other, Real):
            return Quaternion(other - self[0], -self[1], -self[2], -self[3])
        return NotImplemented

    def __mul__(self, other):
        if isinstance(other, Quaternion):
            a1, b1, c1, d1 = self
            a2, b2, c2, d2 = other
            return Quaternion(
                a1 * a2 - b1 * b2 - c1 * c2 - d1 * d2,
                a1 * b2 + b1 * a2 + c1 * d2 - d1 * c2,
                a1 * c2 - b1 * d2 + c1 * a2 + d1 * b2,
                a1 * d2 + b1 * c2 - c1 * b2 + d1 * a2,
            )
        if isinstance(other, Real):
            return Quaternion(self[0] * other, self[1] * other,
                              self[2] * other, self[3] * other)
        return NotImplemented

    def __rmul__(self, other):
        # only real scalars reach here, and they commute
        if isinstance(other, Real):
            return self.__mul__(other)
        return NotImplemented

    def __truediv__(self, other):
        """Right division ``self * other^{-1}``."""
        if isinstance(other, Quaternion):
            return self * other.inverse()
        if isinstance(other, Real):
            if not other:
                raise ZeroDivisionError("division by zero")
            return Quaternion(*(_div(x, other) for x in self))
        return NotImplemented

    def __pow__(self, n: int):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return self.inverse() ** (-n)
        result = Quaternion(1 + 0 * self[0], 0 * self[0], 0 * self[0], 0 * self[0])
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __repr__(self):
        from .serialize import format_quaternion

        return f"Quaternion({format_quaternion(self)!r})"

    def __str__(self):
        from .serialize import format_quaternion

        return format_quaternion(self)


ZERO = Quaternion.exact(0)
ONE = Quaternion.exact(1)
I = Quaternion.exact(0, 1)
J = Quaternion.exact(0, 0, 1)
K = Quaternion.exact(0, 0, 0, 1)


def is_negligible(q: Quaternion, scale=1, tol: Tolerance = DEFAULT_TOLERANCE) -> bool:
    """Zero test: exact for rational components, ``|q| <= abs + rel*scale`` for floats."""
    if q.is_exact():
        return q.is_zero()
    bound = tol.abs + tol.rel * float(scale)
    return q.norm2() <= bound * bound


def close(a: Quaternion, b: Quaternion, tol: Tolerance = DEFAULT_TOLERANCE) -> bool:
    if a.is_exact() and b.is_exact():
        return a == b
    scale = max(a.abs(), b.abs())
    return is_negligible(a - b, scale, tol)


def _close_real(x, y, tol: Tolerance) -> bool:
    if not (isinstance(x, float) or isinstance(y, float)):
        return x == y
    return abs(x - y) <= tol.abs + tol.rel * max(abs(x), abs(y))


@dataclass(frozen=True)
class ConjugacyClass:
    """The 2-sphere ``{h^-1 a h}``, identified by ``trace = 2 Re(a)`` and ``norm = |a|^2``."""

    trace: object
    norm: object

    def contains(self, q: Quaternion, tol: Tolerance = DEFAULT_TOLERANCE) -> bool:
        return _close_real(2 * q.real, self.trace, tol) and _close_real(q.norm2(), self.norm, tol)

    def is_point(self) -> bool:
        """True when the class is a single real number (norm = trace^2/4)."""
        return self.norm == self.trace * self.trace / 4 if not isinstance(self.norm, float) \
            else _close_real(self.norm, self.trace * self.trace / 4, DEFAULT_TOLERANCE)

    def same_as(self, other: "ConjugacyClass", tol: Tolerance = DEFAULT_TOLERANCE) -> bool:
        return _close_real(self.trace, other.trace, tol) and _close_real(self.norm, other.norm, tol)


def class_of(a: Quaternion) -> ConjugacyClass:
    return ConjugacyClass(2 * a.real, a.norm2())


def equivalent(a: Quaternion, b: Quaternion, tol: Tolerance = DEFAULT_TOLERANCE) -> bool:
    """``a ~ b``: equal real parts and equal norms (compared squared, so exact stays exact)."""
    return _close_real(a.real, b.real, tol) and _close_real(a.norm2(), b.norm2(), tol)


def mul(a: Quaternion, b: Quaternion) -> Quaternion:
    return a * b


def inverse(a: Quaternion) -> Quaternion:
    try:
        return a.inverse()
    except ZeroDivisionError:
        raise ValueError("zero quaternion has no inverse") from None
