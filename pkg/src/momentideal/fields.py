"""Exact coefficient arithmetic: prime fields Z/pZ and arbitrary-precision rationals.

Values are plain Python objects: canonical residues (``int`` in ``[0, p-1]``)
for prime fields, ``fractions.Fraction`` (lowest terms, positive denominator)
for rationals.  A :class:`FieldSpec` names the domain and provides all
operations, so values stay cheap, hashable, and structurally comparable.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from math import isqrt


class FieldError(Exception):
    """Base class for coefficient-domain errors."""


class DivisionByZero(FieldError):
    pass


class ParseError(FieldError):
    pass


class FieldMismatch(FieldError):
    """A value cannot be interpreted in the requested field."""


_VALUE_RE = re.compile(r"^([+-]?\d+)(?:\s*/\s*([+-]?\d+))?$")


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    if p < 4:
        return True
    if p % 2 == 0 or p % 3 == 0:
        return False
    f = 5
    while f <= isqrt(p):
        if p % f == 0 or p % (f + 2) == 0:
            return False
        f += 6
    return True


@dataclass(frozen=True)
class FieldSpec:
    """An exact coefficient domain: ``kind`` is ``"prime"`` or ``"rational"``.

    For prime fields the modulus must be prime and small enough that a
    product of two residues fits a machine word (p < 2**31).
    """

    kind: str
    p: int | None = None

    def __post_init__(self):
        if self.kind == "rational":
            if self.p is not None:
                raise ValueError("rational field takes no modulus")
        elif self.kind == "prime":
            if self.p is None or not is_prime(self.p):
                raise ValueError(f"modulus {self.p!r} is not prime")
            if self.p >= 1 << 31:
                raise ValueError("modulus too large: residue products must fit a machine word")
        else:
            raise ValueError(f"unknown field kind {self.kind!r}")

    # -- constructors ------------------------------------------------------

    @staticmethod
    def rational() -> "FieldSpec":
        return FieldSpec("rational")

    @staticmethod
    def prime(p: int) -> "FieldSpec":
        return FieldSpec("prime", p)

    @property
    def is_prime_field(self) -> bool:
        return self.kind == "prime"

    # -- element constructors ---------------------------------------------

    @property
    def zero(self):
        return 0 if self.is_prime_field else Fraction(0)

    @property
    def one(self):
        return 1 if self.is_prime_field else Fraction(1)

    def from_int(self, n: int):
        return n % self.p if self.is_prime_field else Fraction(n)

    # -- arithmetic ---------------------------------------------------------

    def add(self, a, b):
        return (a + b) % self.p if self.is_prime_field else a + b

    def sub(self, a, b):
        return (a - b) % self.p if self.is_prime_field else a - b

    def neg(self, a):
        return (-a) % self.p if self.is_prime_field else -a

    def mul(self, a, b):
        return (a * b) % self.p if self.is_prime_field else a * b

    def inv(self, a):
        if self.is_zero(a):
            raise DivisionByZero("inverse of zero")
        if self.is_prime_field:
            return pow(a, self.p - 2, self.p)
        return 1 / a

    def div(self, a, b):
        return self.mul(a, self.inv(b))

    def power(self, a, e: int):
        """a**e for e >= 0."""
        if e < 0:
            raise ValueError("negative exponent")
        if self.is_prime_field:
            return pow(a, e, self.p)
        return a ** e

    def is_zero(self, a) -> bool:
        return a == 0

    # -- text and JSON -------------------------------------------------------

    def parse(self, text: str):
        m = _VALUE_RE.match(text.strip())
        if not m:
            raise ParseError(f"cannot parse field value {text!r}")
        num = int(m.group(1))
        den = int(m.group(2)) if m.group(2) is not None else 1
        if den == 0:
            raise DivisionByZero(f"zero denominator in {text!r}")
        if self.is_prime_field:
            if den % self.p == 0:
                raise FieldMismatch(f"denominator of {text!r} is not invertible mod {self.p}")
            return self.div(num % self.p, den % self.p)
        return Fraction(num, den)

    def format(self, a) -> str:
        return str(a)

    def to_json(self) -> dict:
        if self.is_prime_field:
            return {"type": "prime", "p": self.p}
        return {"type": "rational"}

    @staticmethod
    def from_json(obj: dict) -> "FieldSpec":
        kind = obj.get("type")
        if kind == "rational":
            return FieldSpec.rational()
        if kind == "prime":
            return FieldSpec.prime(int(obj["p"]))
        raise ParseError(f"unknown field description {obj!r}")


#: The paper-scale default modulus used by the benchmark workflows.
DEFAULT_PRIME = 32003
