"""Exact sparse Laurent arithmetic for link invariants.

Three rings share one implementation:

* ``HalfLaurent`` -- integer Laurent polynomials in ``t`` with exponents in
  (1/2)Z.  Exponents are stored as integer *numerators* over the fixed
  denominator 2, so ``t^(-7/2)`` is the key ``-7``.  Jones polynomials of
  links live here.
* ``BracketPoly`` -- integer Laurent polynomials in ``A`` with integer
  exponents.  Kauffman bracket values live here; under ``A = t^(-1/4)``
  every bracket exponent is a quarter-integer power of ``t``.
* ``ZPoly`` -- integer polynomials in ``z`` (Conway normalization).

Values are immutable after construction; every operation returns a new
value, so instances are safe to share between threads.  Construction
purges zero coefficients and asserts none survive: the zero polynomial is
the one with no terms.
"""

from __future__ import annotations

import re
from fractions import Fraction
from types import MappingProxyType
from typing import Iterator, Mapping, Optional

from .errors import NormalizationError, ValidationError

__all__ = [
    "HalfLaurent",
    "BracketPoly",
    "ZPoly",
    "add",
    "mul",
    "divide_exact",
    "substitute_inverse",
    "bracket_to_jones",
]


class _SparsePoly:
    """Shared sparse-term machinery.  Keys are exponent numerators over the
    class-level denominator ``DEN``; values are nonzero ints."""

    __slots__ = ("_terms",)

    VAR = "x"
    DEN = 1  # exponent denominator: key k means exponent k / DEN

    def __init__(self, terms: Mapping[int, int] | None = None):
        cleaned = {}
        if terms:
            for e, c in terms.items():
                if not isinstance(e, int) or not isinstance(c, int):
                    raise TypeError("exponent keys and coefficients must be int")
                if c != 0:
                    cleaned[e] = c
        assert all(c != 0 for c in cleaned.values())
        object.__setattr__(self, "_terms", cleaned)

    def __setattr__(self, name, value):
        raise AttributeError(f"{type(self).__name__} is immutable")

    # -- constructors ----------------------------------------------------

    @classmethod
    def zero(cls):
        return cls()

    @classmethod
    def one(cls):
        return cls({0: 1})

    @classmethod
    def monomial(cls, exponent_numerator: int, coeff: int = 1):
        return cls({exponent_numerator: coeff})

    # -- inspection ------------------------------------------------------

    @property
    def terms(self) -> Mapping[int, int]:
        """Read-only view of the term map (exponent numerator -> coeff)."""
        return MappingProxyType(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self) -> bool:
        return bool(self._terms)

    def __len__(self) -> int:
        return len(self._terms)

    def __iter__(self) -> Iterator[tuple[int, int]]:
        return iter(sorted(self._terms.items()))

    def __eq__(self, other) -> bool:
        if type(other) is not type(self):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self) -> int:
        return hash((type(self).__name__, frozenset(self._terms.items())))

    # -- ring operations -------------------------------------------------

    def __add__(self, other):
        self._check_same_ring(other)
        out = dict(self._terms)
        for e, c in other._terms.items():
            s = out.get(e, 0) + c
            if s == 0:
                out.pop(e, None)
            else:
                out[e] = s
        return type(self)(out)

    def __neg__(self):
        return type(self)({e: -c for e, c in self._terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        self._check_same_ring(other)
        out: dict[int, int] = {}
        for e1, c1 in self._terms.items():
            for e2, c2 in other._terms.items():
                e = e1 + e2
                s = out.get(e, 0) + c1 * c2
                if s == 0:
                    out.pop(e, None)
                else:
                    out[e] = s
        return type(self)(out)

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            raise ValueError("only nonnegative integer powers are supported")
        result = type(self).one()
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def _check_same_ring(self, other):
        if type(other) is not type(self):
            raise TypeError(
                f"cannot combine {type(self).__name__} with "
                f"{type(other).__name__}"
            )

    # -- text form ---------------------------------------------------------

    def __str__(self) -> str:
        if not self._terms:
            return "0"
        parts = []
        for e, c in sorted(self._terms.items()):
            mag = abs(c)
            var = self._var_text(e)
            if var:
                body = var if mag == 1 else f"{mag}{var}"
            else:
                body = str(mag)
            parts.append((c < 0, body))
        first_neg, first_body = parts[0]
        out = ("-" if first_neg else "") + first_body
        for neg, body in parts[1:]:
            out += (" - " if neg else " + ") + body
        return out

    def __repr__(self) -> str:
        return f"{type(self).__name__}({str(self)!r})"

    @classmethod
    def _var_text(cls, e: int) -> str:
        if e == 0:
            return ""
        if e % cls.DEN == 0:
            k = e // cls.DEN
            return cls.VAR if k == 1 else f"{cls.VAR}^{k}"
        return f"{cls.VAR}^{e}/{cls.DEN}"

    # Term grammar: optional sign, optional integer magnitude, optional
    # variable with integer or (for DEN=2) half-integer exponent.
    _TERM_RE_TEMPLATE = (
        r"\s*(?P<sign>[+-]|−)?\s*(?P<mag>\d+)?\s*"
        r"(?P<var>{var}(\^(?P<num>-?\d+)(?P<half>/2)?)?)?\s*"
    )

    @classmethod
    def from_string(cls, text: str):
        """Parse the canonical text form.  Strict: every chunk must be a
        well-formed term, exponents must not repeat, and /2 exponents must
        be in lowest terms."""
        term_re = re.compile(cls._TERM_RE_TEMPLATE.format(var=re.escape(cls.VAR)))
        text = text.strip()
        if text == "0":
            return cls.zero()
        if not text:
            raise ValidationError("empty polynomial text")
        terms: dict[int, int] = {}
        pos = 0
        first = True
        while pos < len(text):
            m = term_re.match(text, pos)
            if not m or m.end() == pos:
                raise ValidationError(f"bad polynomial syntax at: {text[pos:]!r}")
            sign, mag, var = m.group("sign"), m.group("mag"), m.group("var")
            if mag is None and var is None:
                raise ValidationError(f"bad polynomial syntax at: {text[pos:]!r}")
            if not first and sign is None:
                raise ValidationError("terms must be separated by '+' or '-'")
            coeff = 1 if mag is None else int(mag)
            if sign in ("-", "−"):
                coeff = -coeff
            if var is None:
                e = 0
            elif m.group("num") is None:
                e = cls.DEN
            else:
                num = int(m.group("num"))
                if m.group("half"):
                    if cls.DEN != 2:
                        raise ValidationError(
                            f"half-integer exponents not allowed for {cls.VAR}"
                        )
                    if num % 2 == 0:
                        raise ValidationError(
                            f"exponent {num}/2 is not in lowest terms"
                        )
                    e = num
                else:
                    e = num * cls.DEN
            if e in terms:
                raise ValidationError(f"duplicate exponent in polynomial: {text!r}")
            if coeff == 0:
                raise ValidationError("explicit zero coefficients are not allowed")
            terms[e] = coeff
            pos = m.end()
            first = False
        return cls(terms)


class HalfLaurent(_SparsePoly):
    """Element of Z[t^(1/2), t^(-1/2)]: keys are doubled exponents."""

    __slots__ = ()
    VAR = "t"
    DEN = 2


class BracketPoly(_SparsePoly):
    """Integer Laurent polynomial in the bracket variable ``A``."""

    __slots__ = ()
    VAR = "A"
    DEN = 1


class ZPoly(_SparsePoly):
    """Integer polynomial in the Conway variable ``z``."""

    __slots__ = ()
    VAR = "z"
    DEN = 1


def add(a: _SparsePoly, b: _SparsePoly) -> _SparsePoly:
    """Coefficient-wise sum (zero coefficients purged)."""
    return a + b


def mul(a: _SparsePoly, b: _SparsePoly) -> _SparsePoly:
    """Convolution product (exponent numerators add)."""
    return a * b


def substitute_inverse(a: _SparsePoly) -> _SparsePoly:
    """Substitute the variable by its inverse: every exponent is negated.

    This is the effect of mirroring on Jones polynomials."""
    return type(a)({-e: c for e, c in a._terms.items()})


def divide_exact(n: _SparsePoly, d: _SparsePoly) -> Optional[_SparsePoly]:
    """Exact division in the Laurent ring.

    Returns ``q`` with ``d * q == n`` when ``d`` divides ``n``, else
    ``None``.  Both operands are shifted by unit monomials so each becomes
    an ordinary polynomial in ``u`` (``u = t^(1/2)`` for HalfLaurent) with
    nonzero constant term; long division over the rationals then decides
    divisibility: the units of Z[u, u^(-1)] are +-u^k, so d | n in the
    Laurent ring iff the remainder vanishes and the quotient has integer
    coefficients (Gauss's lemma handles the content).
    """
    if type(n) is not type(d):
        raise TypeError("operands must live in the same ring")
    if d.is_zero():
        raise ZeroDivisionError("division by the zero polynomial")
    if n.is_zero():
        return type(n).zero()

    n_shift = min(n._terms)
    d_shift = min(d._terms)
    # dense coefficient lists in u, constant term nonzero
    n_deg = max(n._terms) - n_shift
    d_deg = max(d._terms) - d_shift
    if n_deg < d_deg:
        return None
    num = [Fraction(n._terms.get(e + n_shift, 0)) for e in range(n_deg + 1)]
    den = [Fraction(d._terms.get(e + d_shift, 0)) for e in range(d_deg + 1)]

    quot = [Fraction(0)] * (n_deg - d_deg + 1)
    rem = list(num)
    lead = den[d_deg]
    for i in range(n_deg - d_deg, -1, -1):
        coeff = rem[i + d_deg] / lead
        quot[i] = coeff
        if coeff:
            for j, dc in enumerate(den):
                rem[i + j] -= coeff * dc
    if any(rem):
        return None
    if any(q.denominator != 1 for q in quot):
        return None
    shift = n_shift - d_shift
    return type(n)({i + shift: int(q) for i, q in enumerate(quot) if q})


def bracket_to_jones(b: BracketPoly, writhe: int) -> HalfLaurent:
    """Normalize a Kauffman bracket value to a Jones polynomial.

    Multiplies by (-A)^(-3w) and substitutes A = t^(-1/4), so the
    A-exponent e becomes the t-exponent -e/4.  After normalization every
    A-exponent must be even (t-exponents in (1/2)Z); a surviving
    quarter-integer exponent means the diagram or its orientation data was
    malformed.
    """
    if not isinstance(b, BracketPoly):
        raise TypeError("expected a BracketPoly")
    sign = -1 if writhe % 2 else 1
    out: dict[int, int] = {}
    for e, c in b._terms.items():
        shifted = e - 3 * writhe
        if shifted % 2:
            raise NormalizationError(
                "bracket normalization left a quarter-integer t-exponent "
                f"(A-exponent {shifted}); the diagram is malformed"
            )
        out[-shifted // 2] = sign * c
    return HalfLaurent(out)
