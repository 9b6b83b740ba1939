"""Exact scalar fields: the rationals and prime fields F_p."""

from __future__ import annotations

import re
from fractions import Fraction

_RATIONAL_RE = re.compile(r"^\s*([+-]?\d+)\s*(?:/\s*(\d+))?\s*$")


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


class Fp:
    """An element of the prime field F_p, stored as its least residue."""

    __slots__ = ("v", "p")

    def __init__(self, v: int, p: int):
        self.v = v % p
        self.p = p

    def _coerce(self, other):
        if isinstance(other, Fp):
            if other.p != self.p:
                raise ValueError(f"mixing F_{self.p} and F_{other.p}")
            return other.v
        if isinstance(other, int):
            return other
        if isinstance(other, Fraction):
            return other.numerator * pow(other.denominator, -1, self.p)
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return Fp(self.v + o, self.p)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return Fp(self.v - o, self.p)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return Fp(o - self.v, self.p)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return Fp(self.v * o, self.p)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        if o % self.p == 0:
            raise ZeroDivisionError("division by zero in F_%d" % self.p)
        return Fp(self.v * pow(o, -1, self.p), self.p)

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return Fp(o, self.p) / self

    def __neg__(self):
        return Fp(-self.v, self.p)

    def __pow__(self, n: int):
        if n < 0:
            return Fp(pow(self.v, -1, self.p), self.p) ** (-n)
        return Fp(pow(self.v, n, self.p), self.p)

    def __eq__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return False
        return (self.v - o) % self.p == 0

    def __hash__(self):
        return hash(self.v)

    def __bool__(self):
        return self.v != 0

    def __int__(self):
        return self.v

    def __repr__(self):
        return f"Fp({self.v}, {self.p})"

    def __str__(self):
        return str(self.v)


class Field:
    """Either the rationals (characteristic 0) or a prime field.

    Calling the field coerces ints, Fractions, field elements and strings
    such as ``"-2/7"`` into canonical elements.
    """

    def __init__(self, characteristic: int = 0):
        if characteristic != 0 and not _is_prime(characteristic):
            raise ValueError(f"characteristic {characteristic} is not prime")
        self.characteristic = characteristic
        self.kind = "rationals" if characteristic == 0 else "prime_field"
        self.zero = self(0)
        self.one = self(1)

    @property
    def p(self) -> int:
        return self.characteristic

    @classmethod
    def parse(cls, spec: str) -> "Field":
        spec = spec.strip()
        if spec == "Q":
            return cls(0)
        m = re.fullmatch(r"F(\d+)", spec)
        if not m:
            raise ValueError(f"unknown field {spec!r} (expected 'Q' or 'F<p>')")
        return cls(int(m.group(1)))

    def __call__(self, x):
        p = self.characteristic
        if isinstance(x, str):
            m = _RATIONAL_RE.match(x)
            if not m:
                raise ValueError(f"malformed scalar {x!r}")
            num, den = int(m.group(1)), int(m.group(2) or 1)
            if den == 0:
                raise ZeroDivisionError(f"zero denominator in {x!r}")
            x = Fraction(num, den)
        if p == 0:
            if isinstance(x, Fp):
                raise ValueError("cannot coerce an F_p element into Q")
            return Fraction(x)
        if isinstance(x, Fp):
            if x.p != p:
                raise ValueError(f"cannot coerce F_{x.p} element into F_{p}")
            return x
        if isinstance(x, Fraction):
            if x.denominator % p == 0:
                raise ZeroDivisionError(f"{x} has no image in F_{p}")
            return Fp(x.numerator * pow(x.denominator, -1, p), p)
        return Fp(int(x), p)

    def format(self, x) -> str:
        """Canonical string form: lowest terms over Q, least residue over F_p."""
        x = self(x)
        if self.characteristic:
            return str(x.v)
        if x.denominator == 1:
            return str(x.numerator)
        return f"{x.numerator}/{x.denominator}"

    def to_int(self, x) -> int:
        """Residue of an F_p element (F_p only)."""
        return x.v

    def random(self, rng, nonzero=False):
        """Random element drawn from ``rng`` (a ``random.Random``)."""
        if self.characteristic:
            lo = 1 if nonzero else 0
            return Fp(rng.randrange(lo, self.characteristic), self.characteristic)
        while True:
            v = Fraction(rng.randint(-3, 3), rng.randint(1, 2))
            if v or not nonzero:
                return v

    def __eq__(self, other):
        return isinstance(other, Field) and other.characteristic == self.characteristic

    def __hash__(self):
        return hash(("Field", self.characteristic))

    def __repr__(self):
        return "Q" if self.characteristic == 0 else f"F{self.characteristic}"

    __str__ = __repr__


QQ = Field(0)


def GF(p: int) -> Field:
    return Field(p)
