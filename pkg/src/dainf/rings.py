"""Coefficient rings.

Four kinds are supported::

    >>> CoefficientRing.parse("q").descriptor
    'q'
    >>> R = CoefficientRing.parse("zloc:3")
    >>> R.valuation(R.coerce("9/2"))
    2
    >>> R.is_unit(R.coerce("2/5"))
    True

Elements are plain Python numbers: ``int`` for the integers and the prime
fields (stored in ``range(p)``), ``Fraction`` for the rationals and the
p-local integers.  Characteristic 2 is rejected everywhere.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

RATIONALS = "rationals"
INTEGERS = "integers"
PRIME_FIELD = "prime-field"
P_LOCAL = "p-local-integers"

_KINDS = (RATIONALS, INTEGERS, PRIME_FIELD, P_LOCAL)


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


def _p_valuation(n: int, p: int) -> int:
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


@dataclass(frozen=True)
class CoefficientRing:
    kind: str
    p: int | None = None

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValueError(f"unknown ring kind {self.kind!r}")
        if self.kind in (PRIME_FIELD, P_LOCAL):
            if self.p is None or not _is_prime(self.p):
                raise ValueError(f"{self.kind} needs a prime, got {self.p!r}")
            if self.p == 2:
                raise ValueError("characteristic 2 / 2-torsion is not supported")
        elif self.p is not None:
            raise ValueError(f"{self.kind} takes no prime")

    # construction -----------------------------------------------------
    @classmethod
    def parse(cls, text: str) -> "CoefficientRing":
        """Parse a descriptor: ``q``, ``zz``, ``zp:P`` or ``zloc:P``."""
        text = text.strip()
        if text == "q":
            return cls(RATIONALS)
        if text == "zz":
            return cls(INTEGERS)
        head, sep, tail = text.partition(":")
        if sep and head in ("zp", "zloc"):
            try:
                p = int(tail)
            except ValueError:
                raise ValueError(f"bad prime in ring descriptor {text!r}") from None
            return cls(PRIME_FIELD if head == "zp" else P_LOCAL, p)
        raise ValueError(f"bad ring descriptor {text!r}")

    @property
    def descriptor(self) -> str:
        return {
            RATIONALS: "q",
            INTEGERS: "zz",
            PRIME_FIELD: f"zp:{self.p}",
            P_LOCAL: f"zloc:{self.p}",
        }[self.kind]

    def __str__(self):
        return self.descriptor

    @property
    def is_field(self) -> bool:
        return self.kind in (RATIONALS, PRIME_FIELD)

    @property
    def zero(self):
        return 0

    @property
    def one(self):
        return 1

    # elements ---------------------------------------------------------
    def coerce(self, x):
        """Bring an int, Fraction or decimal/fraction string into the ring."""
        if isinstance(x, str):
            x = Fraction(x.strip())
        if isinstance(x, bool):
            x = int(x)
        if self.kind == INTEGERS:
            if isinstance(x, Fraction):
                if x.denominator != 1:
                    raise ValueError(f"{x} is not an integer")
                x = x.numerator
            return int(x)
        if self.kind == PRIME_FIELD:
            x = Fraction(x)
            if x.denominator % self.p == 0:
                raise ValueError(f"{x} has no image in F_{self.p}")
            return x.numerator * pow(x.denominator, -1, self.p) % self.p
        x = Fraction(x)
        if self.kind == P_LOCAL and x.denominator % self.p == 0:
            raise ValueError(f"{x} is not {self.p}-local")
        return x

    def normalize(self, x):
        """Canonical form of an element produced by +, -, *."""
        if self.kind == PRIME_FIELD:
            return x % self.p
        if self.kind == INTEGERS:
            return x
        if isinstance(x, int):
            return Fraction(x)
        return x

    def contains(self, x) -> bool:
        try:
            x = Fraction(x)
        except (TypeError, ValueError):
            return False
        if self.kind == INTEGERS:
            return x.denominator == 1
        if self.kind in (PRIME_FIELD, P_LOCAL):
            return x.denominator % self.p != 0
        return True

    def valuation(self, x) -> int:
        """Euclidean size used for pivoting.

        abs value over the integers, p-adic valuation over Z_(p), 0 for
        nonzero field elements.
        """
        if x == 0:
            raise ValueError("valuation of zero")
        if self.kind == INTEGERS:
            return abs(x)
        if self.kind == P_LOCAL:
            return _p_valuation(Fraction(x).numerator, self.p)
        return 0

    def is_unit(self, x) -> bool:
        if x == 0:
            return False
        if self.kind == INTEGERS:
            return abs(x) == 1
        if self.kind == P_LOCAL:
            return Fraction(x).numerator % self.p != 0
        return True

    def inverse(self, x):
        if not self.is_unit(x):
            raise ZeroDivisionError(f"{x} is not a unit in {self}")
        if self.kind == INTEGERS:
            return x
        if self.kind == PRIME_FIELD:
            return pow(x, -1, self.p)
        return 1 / Fraction(x)

    def quotient(self, b, a):
        """Exact quotient b/a when a divides b, else None."""
        if a == 0:
            return 0 if b == 0 else None
        if b == 0:
            return self.zero
        if self.kind == INTEGERS:
            return b // a if b % a == 0 else None
        if self.kind == PRIME_FIELD:
            return b * pow(a, -1, self.p) % self.p
        if self.kind == P_LOCAL and self.valuation(b) < self.valuation(a):
            return None
        return Fraction(b) / Fraction(a)

    def divmod(self, b, a):
        """Euclidean division b = q a + r with r = 0 or smaller than a."""
        q = self.quotient(b, a)
        if q is not None:
            return q, self.zero
        if self.kind == INTEGERS:
            q = b // a
            return q, b - q * a
        # p-local: valuation of b is below that of a, so b itself is the remainder
        return self.zero, b

    def associate_unit(self, x):
        """Unit u with u*x in canonical form (positive, 1, or a power of p)."""
        if self.kind == INTEGERS:
            return 1 if x > 0 else -1
        if self.kind == P_LOCAL:
            return Fraction(self.p ** self.valuation(x)) / Fraction(x)
        return self.inverse(x)

    def residue(self, x, d):
        """Canonical representative of x modulo the ideal (d)."""
        if d == 0:
            return x
        if self.is_unit(d):
            return self.zero
        if self.kind == INTEGERS:
            return x % abs(d)
        if self.kind == P_LOCAL:
            n = self.p ** self.valuation(d)
            x = Fraction(x)
            return Fraction(x.numerator * pow(x.denominator, -1, n) % n)
        return self.zero

    def format(self, x) -> str:
        return str(x)
