"""Prime field arithmetic.

The engine itself works on plain ``int`` residues for speed; :class:`Fp` is the
value type used at the public boundary and in property tests.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

from .errors import NotPrime, ZeroInverse

DEFAULT_P = 101

# deterministic Miller-Rabin witnesses for n < 3_215_031_751
_MR_BASES = (2, 3, 5, 7)


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    for q in (2, 3, 5, 7, 11, 13):
        if n % q == 0:
            return n == q
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


@dataclass(frozen=True)
class FieldChar:
    """An odd prime ``p`` with ``2 < p < 2**31``."""

    p: int = DEFAULT_P

    def __post_init__(self):
        if not (2 < self.p < 2**31) or not is_prime(self.p):
            raise NotPrime(f"{self.p} is not an odd prime below 2^31")

    def __call__(self, value: int) -> "Fp":
        return Fp(value % self.p, self.p)

    def inv(self, a: int) -> int:
        a %= self.p
        if a == 0:
            raise ZeroInverse("0 has no inverse")
        return pow(a, -1, self.p)


@dataclass(frozen=True)
class Fp:
    value: int
    p: int = DEFAULT_P

    def __post_init__(self):
        if not 0 <= self.value < self.p:
            object.__setattr__(self, "value", self.value % self.p)

    def _coerce(self, other) -> int:
        if isinstance(other, Fp):
            if other.p != self.p:
                raise ValueError("mixed characteristics")
            return other.value
        return int(other) % self.p

    def __add__(self, other):
        return Fp((self.value + self._coerce(other)) % self.p, self.p)

    __radd__ = __add__

    def __sub__(self, other):
        return Fp((self.value - self._coerce(other)) % self.p, self.p)

    def __rsub__(self, other):
        return Fp((self._coerce(other) - self.value) % self.p, self.p)

    def __mul__(self, other):
        return Fp(self.value * self._coerce(other) % self.p, self.p)

    __rmul__ = __mul__

    def __neg__(self):
        return Fp(-self.value % self.p, self.p)

    def __truediv__(self, other):
        return self * fp_inv(Fp(self._coerce(other), self.p))

    def __int__(self):
        return self.value

    def __bool__(self):
        return self.value != 0

    def __repr__(self):
        return f"Fp({self.value} mod {self.p})"


def fp_inv(a: Fp) -> Fp:
    if a.value == 0:
        raise ZeroInverse("0 has no inverse")
    return Fp(pow(a.value, -1, a.p), a.p)


def fp_arith(a: Fp, b: Fp, kind: Literal["add", "sub", "mul", "div"]) -> Fp:
    if kind == "add":
        return a + b
    if kind == "sub":
        return a - b
    if kind == "mul":
        return a * b
    if kind == "div":
        return a / b
    raise ValueError(f"unknown operation {kind!r}")
