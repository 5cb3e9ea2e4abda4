"""Exact scalars: a base field k (Q or F_p) and the rational function field k(s).

Elements of k are plain Python values: ``Fraction`` for Q, ``int`` in
``range(p)`` for F_p.  Polynomials over k are tuples of coefficients,
constant term first, with no trailing zeros (the zero polynomial is ``()``).
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce

from .errors import DivisionByZero, InvalidConfig, NegativeValuation

DEFAULT_PRIME = 10007


def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    if p % 2 == 0:
        return p == 2
    f = 3
    while f * f <= p:
        if p % f == 0:
            return False
        f += 2
    return True


@dataclass(frozen=True)
class FieldDesc:
    """Base field descriptor: ``FieldDesc("rationals")`` or ``FieldDesc("prime_field", p)``."""

    kind: str = "prime_field"
    p: int | None = DEFAULT_PRIME

    def __post_init__(self):
        if self.kind == "rationals":
            if self.p is not None:
                raise InvalidConfig("rationals take no modulus")
        elif self.kind == "prime_field":
            if not isinstance(self.p, int) or not _is_prime(self.p):
                raise InvalidConfig(f"modulus {self.p!r} is not prime")
            if self.p == 2:
                raise InvalidConfig("characteristic 2 is not supported")
        else:
            raise InvalidConfig(f"unknown field kind {self.kind!r}")

    @classmethod
    def rationals(cls) -> FieldDesc:
        return cls("rationals", None)

    @classmethod
    def fp(cls, p: int = DEFAULT_PRIME) -> FieldDesc:
        return cls("prime_field", p)

    @classmethod
    def parse(cls, text: str) -> FieldDesc:
        """Parse the CLI spelling ``q`` or ``fp:P``."""
        text = text.strip().lower()
        if text in ("q", "rationals"):
            return cls.rationals()
        if text.startswith("fp:"):
            try:
                return cls.fp(int(text[3:]))
            except ValueError as exc:
                raise InvalidConfig(f"bad field {text!r}") from exc
        raise InvalidConfig(f"bad field {text!r}")

    def label(self) -> str:
        return "q" if self.p is None else f"fp:{self.p}"

    # -- base field k -------------------------------------------------------

    @property
    def modulus(self) -> int:
        """p for F_p, 0 for Q (used as a cheap branch flag)."""
        return self.p or 0

    def coerce(self, x):
        """Map an int, Fraction, or decimal string into k."""
        if isinstance(x, str):
            x = Fraction(x)
        if self.p:
            if isinstance(x, Fraction):
                return x.numerator * pow(x.denominator, -1, self.p) % self.p
            return int(x) % self.p
        return Fraction(x)

    def inv(self, x):
        if x == 0:
            raise DivisionByZero("inverse of zero")
        if self.p:
            return pow(x, -1, self.p)
        return 1 / Fraction(x)

    def random_element(self, rng: random.Random, bound: int = 9):
        """Uniform over F_p; small integers in [-bound, bound] over Q."""
        if self.p:
            return rng.randrange(self.p)
        return Fraction(rng.randint(-bound, bound))

    def random_nonzero(self, rng: random.Random, bound: int = 9):
        while True:
            x = self.random_element(rng, bound)
            if x != 0:
                return x

    def to_str(self, x) -> str:
        return str(x)


# -- polynomials over k -------------------------------------------------------


def _trim(c: list, p: int) -> tuple:
    if p:
        c = [x % p for x in c]
    n = len(c)
    while n and c[n - 1] == 0:
        n -= 1
    return tuple(c[:n])


def padd(a: tuple, b: tuple, p: int) -> tuple:
    if len(a) < len(b):
        a, b = b, a
    out = list(a)
    for i, x in enumerate(b):
        out[i] += x
    return _trim(out, p)


def pneg(a: tuple, p: int) -> tuple:
    return tuple((-x) % p for x in a) if p else tuple(-x for x in a)


def psub(a: tuple, b: tuple, p: int) -> tuple:
    return padd(a, pneg(b, p), p)


def pmul(a: tuple, b: tuple, p: int) -> tuple:
    if not a or not b:
        return ()
    if len(a) == 1:
        return _trim([a[0] * x for x in b], p)
    if len(b) == 1:
        return _trim([x * b[0] for x in a], p)
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x == 0:
            continue
        for j, y in enumerate(b):
            out[i + j] += x * y
    return _trim(out, p)


def pscale(a: tuple, c, p: int) -> tuple:
    return _trim([x * c for x in a], p)


def _inv(x, p: int):
    return pow(x, -1, p) if p else 1 / Fraction(x)


def pdivmod(a: tuple, b: tuple, p: int) -> tuple[tuple, tuple]:
    if not b:
        raise DivisionByZero("polynomial division by zero")
    if len(a) < len(b):
        return (), a
    rem = list(a)
    inv_lead = _inv(b[-1], p)
    q = [0] * (len(a) - len(b) + 1)
    for k in range(len(a) - len(b), -1, -1):
        c = rem[k + len(b) - 1] * inv_lead
        if p:
            c %= p
        q[k] = c
        if c == 0:
            continue
        for j, y in enumerate(b):
            rem[k + j] -= c * y
    return _trim(q, p), _trim(rem[: len(b) - 1], p)


def pmonic(a: tuple, p: int) -> tuple:
    if not a or a[-1] == 1:
        return a
    return pscale(a, _inv(a[-1], p), p)


def pgcd(a: tuple, b: tuple, p: int) -> tuple:
    while b:
        a, b = b, pdivmod(a, b, p)[1]
    return pmonic(a, p)


def pord(a: tuple) -> int:
    """Order of vanishing at s = 0 of a nonzero polynomial."""
    for i, x in enumerate(a):
        if x != 0:
            return i
    raise ValueError("zero polynomial")


# -- k(s) ----------------------------------------------------------------------


_ONE = (1,)


class Scalar:
    """Immutable element num/den of k(s) in canonical reduced form."""

    __slots__ = ("num", "den", "field")

    def __init__(self, num, den=_ONE, field: FieldDesc | None = None, *, _canonical=False):
        field = field or FieldDesc()
        object.__setattr__(self, "field", field)
        if _canonical:
            object.__setattr__(self, "num", num)
            object.__setattr__(self, "den", den)
            return
        p = field.modulus
        num = _trim([field.coerce(x) for x in num], p)
        den = _trim([field.coerce(x) for x in den], p)
        if not den:
            raise DivisionByZero("zero denominator")
        num, den = _reduce(num, den, p)
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "den", den)

    def __setattr__(self, name, value):
        raise AttributeError("Scalar is immutable")

    # constructors

    @classmethod
    def const(cls, c, field: FieldDesc) -> Scalar:
        c = field.coerce(c)
        return cls((c,) if c != 0 else (), _ONE, field, _canonical=True)

    @classmethod
    def zero(cls, field: FieldDesc) -> Scalar:
        return cls((), _ONE, field, _canonical=True)

    @classmethod
    def one(cls, field: FieldDesc) -> Scalar:
        return cls(_ONE, _ONE, field, _canonical=True)

    @classmethod
    def s(cls, field: FieldDesc) -> Scalar:
        return cls((0, 1), _ONE, field, _canonical=True)

    @classmethod
    def s_pow(cls, e: int, field: FieldDesc) -> Scalar:
        if e < 0:
            return cls(_ONE, (0,) * -e + (1,), field, _canonical=True)
        return cls((0,) * e + (1,), _ONE, field, _canonical=True)

    @classmethod
    def poly(cls, coeffs, field: FieldDesc) -> Scalar:
        p = field.modulus
        return cls(_trim([field.coerce(x) for x in coeffs], p), _ONE, field, _canonical=True)

    # predicates

    def is_zero(self) -> bool:
        return not self.num

    def __bool__(self):
        return bool(self.num)

    def is_constant(self) -> bool:
        return len(self.num) <= 1 and len(self.den) == 1

    def __eq__(self, other):
        if isinstance(other, Scalar):
            return self.num == other.num and self.den == other.den
        if isinstance(other, (int, Fraction)):
            return self == Scalar.const(other, self.field)
        return NotImplemented

    def __hash__(self):
        return hash((self.num, self.den))

    def __repr__(self):
        return f"Scalar({self})"

    def __str__(self):
        def fmt(poly):
            if not poly:
                return "0"
            terms = []
            for i, c in enumerate(poly):
                if c == 0:
                    continue
                if i == 0:
                    terms.append(str(c))
                elif i == 1:
                    terms.append(f"{c}*s")
                else:
                    terms.append(f"{c}*s^{i}")
            return " + ".join(terms)

        if self.den == _ONE:
            return fmt(self.num)
        return f"({fmt(self.num)})/({fmt(self.den)})"

    # arithmetic

    def _lift(self, other) -> Scalar:
        if isinstance(other, Scalar):
            return other
        if isinstance(other, (int, Fraction)):
            return Scalar.const(other, self.field)
        return NotImplemented

    def __add__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        p = self.field.modulus
        if not self.num:
            return other
        if not other.num:
            return self
        if self.den == other.den:
            if self.den == _ONE:
                return Scalar(padd(self.num, other.num, p), _ONE, self.field, _canonical=True)
            num, den = _reduce(padd(self.num, other.num, p), self.den, p)
        else:
            # Henrici: only the gcd of the denominators can cancel
            d1, d2 = self.den, other.den
            g = pgcd(d1, d2, p) if len(d1) > 1 and len(d2) > 1 else _ONE
            if g != _ONE:
                d1, d2 = pdivmod(d1, g, p)[0], pdivmod(d2, g, p)[0]
            num = padd(pmul(self.num, d2, p), pmul(other.num, d1, p), p)
            if not num:
                return Scalar((), _ONE, self.field, _canonical=True)
            den = pmul(pmul(d1, d2, p), g, p)
            if g != _ONE:
                num, den = _reduce(num, den, p)
            else:
                num, den = _normalize_den(num, den, p)
        return Scalar(num, den, self.field, _canonical=True)

    __radd__ = __add__

    def __neg__(self):
        return Scalar(pneg(self.num, self.field.modulus), self.den, self.field, _canonical=True)

    def __sub__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        if not self.num or not other.num:
            return Scalar((), _ONE, self.field, _canonical=True)
        p = self.field.modulus
        if self.den == _ONE and other.den == _ONE:
            return Scalar(pmul(self.num, other.num, p), _ONE, self.field, _canonical=True)
        # cross-cancel: gcd(n1, d2) and gcd(n2, d1) are all that can cancel
        n1, d1, n2, d2 = self.num, self.den, other.num, other.den
        if len(d2) > 1 and len(n1) > 1:
            g = pgcd(n1, d2, p)
            if len(g) > 1:
                n1, d2 = pdivmod(n1, g, p)[0], pdivmod(d2, g, p)[0]
        if len(d1) > 1 and len(n2) > 1:
            g = pgcd(n2, d1, p)
            if len(g) > 1:
                n2, d1 = pdivmod(n2, g, p)[0], pdivmod(d1, g, p)[0]
        num, den = pmul(n1, n2, p), pmul(d1, d2, p)
        if den == _ONE:
            return Scalar(num, den, self.field, _canonical=True)
        num, den = _normalize_den(num, den, p)
        return Scalar(num, den, self.field, _canonical=True)

    __rmul__ = __mul__

    def inverse(self) -> Scalar:
        if not self.num:
            raise DivisionByZero("division by zero in k(s)")
        p = self.field.modulus
        num, den = _normalize_den(self.den, self.num, p)
        return Scalar(num, den, self.field, _canonical=True)

    def __truediv__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return self * other.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        out = Scalar.one(self.field)
        base = self
        while e:
            if e & 1:
                out = out * base
            base = base * base
            e >>= 1
        return out

    # valuation and specialization

    def valuation(self):
        """ord_s(num) - ord_s(den); ``math.inf`` for zero."""
        if not self.num:
            return math.inf
        return pord(self.num) - pord(self.den)

    def specialize0(self):
        """Evaluate at s = 0, returning an element of k."""
        if not self.num:
            return self.field.coerce(0)
        if self.valuation() < 0:
            raise NegativeValuation(f"{self} has a pole at s = 0")
        if self.den[0] == 0:
            # common factor of s cannot survive reduction, so num(0) must be 0 here
            return self.field.coerce(0)
        c = self.num[0] * _inv(self.den[0], self.field.modulus)
        return c % self.field.p if self.field.p else c

    def constant_value(self):
        """The k-element of a constant scalar."""
        if not self.is_constant():
            raise ValueError(f"{self} is not constant")
        return self.num[0] if self.num else self.field.coerce(0)

    # JSON

    def to_json(self) -> dict:
        return {
            "num": [str(c) for c in self.num] or ["0"],
            "den": [str(c) for c in self.den],
        }

    @classmethod
    def from_json(cls, obj, field: FieldDesc) -> Scalar:
        if isinstance(obj, (int, str)):
            return cls.const(obj, field)
        return cls(obj["num"], obj.get("den", ["1"]), field)


def _normalize_den(num: tuple, den: tuple, p: int) -> tuple[tuple, tuple]:
    """Scale so den is monic (F_p) or primitive with positive lead (Q)."""
    if p:
        lead = den[-1]
        if lead != 1:
            inv = pow(lead, -1, p)
            num = pscale(num, inv, p)
            den = pscale(den, inv, p)
        return num, den
    lead = Fraction(den[-1])
    if lead != 1:
        num = tuple(Fraction(c) / lead for c in num)
        den = tuple(Fraction(c) / lead for c in den)
    denoms = [Fraction(c).denominator for c in den]
    lcm = reduce(lambda a, b: a * b // math.gcd(a, b), denoms, 1)
    ints = [int(Fraction(c) * lcm) for c in den]
    content = reduce(math.gcd, ints, 0)
    scale = Fraction(lcm, content)
    if scale != 1:
        num = tuple(Fraction(c) * scale for c in num)
        den = tuple(Fraction(c) * scale for c in den)
    return tuple(Fraction(c) for c in num), tuple(Fraction(c) for c in den)


def _reduce(num: tuple, den: tuple, p: int) -> tuple[tuple, tuple]:
    if not num:
        return (), _ONE
    if len(den) > 1 and not any(den[:-1]):
        # monomial denominator c*s^k: cancel the common power of s
        t = min(len(den) - 1, pord(num))
        num, den = num[t:], den[t:]
    elif len(den) > 1:
        g = pgcd(num, den, p)
        if len(g) > 1:
            num = pdivmod(num, g, p)[0]
            den = pdivmod(den, g, p)[0]
    if den == _ONE:
        return num, den
    return _normalize_den(num, den, p)


def random_poly(field: FieldDesc, rng: random.Random, degree: int) -> Scalar:
    """Random polynomial in s of degree at most ``degree``."""
    return Scalar.poly([field.random_element(rng) for _ in range(degree + 1)], field)
