"""Text and structured forms for quaternions, polynomials, chains and matrices.

Structured quaternions are ``[x0, x1, x2, x3]``; exact components are written as
``"p/q"`` strings so that nothing is lost going through JSON.  The text form is
``"x0 + x1 i + x2 j + x3 k"`` with zero terms dropped.
"""

from __future__ import annotations

import re
from fractions import Fraction

from .scalar import EXACT, FLOAT, Quaternion, to_scalar

_TERM = re.compile(
    r"([+-])?((?:\d+(?:\.\d*)?|\.\d+)(?:[eE][+-]?\d+)?(?:/\d+)?)?\*?([ijk])?"
)


def format_scalar(x) -> str:
    if isinstance(x, float):
        return repr(x)
    return str(Fraction(x))


def format_quaternion(q: Quaternion) -> str:
    terms = []
    for value, unit in zip(q, ("", "i", "j", "k")):
        if not value:
            continue
        text = format_scalar(abs(value))
        sign = "-" if value < 0 else "+"
        if unit and text in ("1", "1.0"):
            body = unit
        elif unit:
            body = f"{text} {unit}"
        else:
            body = text
        terms.append((sign, body))
    if not terms:
        return "0"
    first_sign, first = terms[0]
    out = ("-" if first_sign == "-" else "") + first
    for sign, body in terms[1:]:
        out += f" {sign} {body}"
    return out


def parse_quaternion_text(text: str, backend: str = EXACT) -> Quaternion:
    """Parse ``"1 - 2i + 1/2 j"``-style text."""
    s = text.replace(" ", "")
    if not s:
        raise ValueError("empty quaternion text")
    parts = [to_scalar(0, backend)] * 4
    pos = 0
    while pos < len(s):
        m = _TERM.match(s, pos)
        if m is None or m.end() == pos or (m.group(2) is None and m.group(3) is None):
            raise ValueError(f"cannot parse quaternion {text!r} at offset {pos}")
        if pos and m.group(1) is None:
            raise ValueError(f"missing sign between terms in {text!r}")
        coeff = to_scalar(m.group(2) or "1", backend)
        if m.group(1) == "-":
            coeff = -coeff
        slot = " ijk".index(m.group(3)) if m.group(3) else 0
        parts[slot] = parts[slot] + coeff
        pos = m.end()
    return Quaternion(*parts)


def parse_quaternion(value, backend: str = EXACT) -> Quaternion:
    """Accept a structured ``[x0, x1, x2, x3]``, text, or a bare real number."""
    if isinstance(value, Quaternion):
        return value.to_backend(backend)
    if isinstance(value, str):
        return parse_quaternion_text(value, backend)
    if isinstance(value, bool):
        raise ValueError("booleans are not quaternions")
    if isinstance(value, (int, float)):
        return Quaternion.coerce(value, backend)
    if isinstance(value, (list, tuple)):
        if len(value) != 4:
            raise ValueError(f"structured quaternion needs 4 components, got {len(value)}")
        return Quaternion(*(to_scalar(v, backend) for v in value))
    raise ValueError(f"not a quaternion: {value!r}")


def _json_scalar(x):
    if isinstance(x, float):
        return x
    return format_scalar(x)


def quaternion_to_json(q: Quaternion) -> list:
    return [_json_scalar(x) for x in q]


def poly_to_json(f) -> list:
    return [quaternion_to_json(c) for c in f.coeffs]


def poly_from_json(data, backend: str = EXACT):
    from .qpoly import QPolynomial

    return QPolynomial([parse_quaternion(c, backend) for c in data])


def matrix_to_json(a) -> list:
    return [[quaternion_to_json(x) for x in row] for row in a.rows]


def matrix_from_json(data, backend: str = EXACT):
    from .qmatrix import QMatrix

    return QMatrix([[parse_quaternion(x, backend) for x in row] for row in data])


def chain_to_json(chain) -> list:
    return [quaternion_to_json(a) for a in chain.nodes]


def chain_from_json(data, backend: str = EXACT):
    from .chains import SphericalChain

    return SphericalChain([parse_quaternion(x, backend) for x in data])


def family_to_json(family) -> list:
    out = []
    for idx, chain in enumerate(family.chains):
        label = family.labels[idx] if family.labels else None
        if label is None:
            out.append(chain_to_json(chain))
        else:
            out.append({"label": label, "nodes": chain_to_json(chain)})
    return out


def family_from_json(data, backend: str = EXACT):
    """Family entries are either node arrays or ``{"label": ..., "nodes": [...]}``."""
    from .chains import ChainFamily, SphericalChain

    chains, labels = [], []
    for entry in data:
        if isinstance(entry, dict):
            nodes, label = entry["nodes"], entry.get("label")
        else:
            nodes, label = entry, None
        chains.append(SphericalChain([parse_quaternion(x, backend) for x in nodes]))
        labels.append(label)
    return ChainFamily(chains, labels if any(lab is not None for lab in labels) else None)


def scalar_to_json(x):
    return _json_scalar(x)


__all__ = [
    "EXACT",
    "FLOAT",
    "format_quaternion",
    "parse_quaternion",
    "parse_quaternion_text",
    "quaternion_to_json",
    "poly_to_json",
    "poly_from_json",
    "matrix_to_json",
    "matrix_from_json",
    "chain_to_json",
    "chain_from_json",
    "family_to_json",
    "family_from_json",
]
