"""Polynomials over F_p, monomial orders and graded quotient rings.

Exponent vectors are plain tuples; a polynomial is a map from exponent tuple
to a nonzero residue. Every polynomial carries the :class:`Ring` it lives in,
and arithmetic results are kept in normal form modulo the defining ideal.
"""

from __future__ import annotations

import itertools
import re
from functools import lru_cache
from typing import Callable, Iterable, Sequence

from .errors import BadOrder, NotHomogeneous, UnitIdeal
from .field import FieldChar

Monomial = tuple  # exponent vector; degree is sum(exponents)

ORDERS = ("grevlex", "lex", "deglex")


def _grevlex(e):
    return (sum(e), tuple(-x for x in reversed(e)))


def _deglex(e):
    return (sum(e), e)


def _lex(e):
    return e


_ORDER_KEYS: dict[str, Callable] = {"grevlex": _grevlex, "deglex": _deglex, "lex": _lex}


def order_key(order: str) -> Callable:
    try:
        return lru_cache(maxsize=None)(_ORDER_KEYS[order])
    except KeyError:
        raise BadOrder(f"unknown monomial order {order!r}; use one of {ORDERS}") from None


def monomials_of_degree(nvars: int, d: int) -> list[tuple]:
    """All exponent vectors of total degree ``d`` (empty for negative ``d``)."""
    if d < 0:
        return []
    if nvars == 0:
        return [()] if d == 0 else []
    out = []
    for first in range(d, -1, -1):
        for rest in monomials_of_degree(nvars - 1, d - first):
            out.append((first,) + rest)
    return out


def divides(a: tuple, b: tuple) -> bool:
    return all(x <= y for x, y in zip(a, b))


def mono_mul(a: tuple, b: tuple) -> tuple:
    return tuple(x + y for x, y in zip(a, b))


def mono_div(b: tuple, a: tuple) -> tuple:
    return tuple(y - x for x, y in zip(a, b))


def mono_lcm(a: tuple, b: tuple) -> tuple:
    return tuple(max(x, y) for x, y in zip(a, b))


class Ring:
    """F_p[vars]/I with a fixed monomial order.

    ``gb`` holds the reduced Groebner basis of ``I`` as raw term dicts; it is
    empty for a polynomial ring. Instances are immutable after construction.
    """

    def __init__(self, p: int, vars: Sequence[str], order: str = "grevlex", gb: Sequence[dict] = ()):
        self.char = FieldChar(p)
        self.p = p
        self.vars = tuple(vars)
        self.nvars = len(self.vars)
        self.order = order
        self.mkey = order_key(order)
        self.gb = tuple(dict(g) for g in gb)
        self._gb_leads = tuple(self._lead(g)[0] for g in self.gb)
        self._hash = hash((p, self.vars, order, tuple(tuple(sorted(g.items())) for g in self.gb)))

    # identity -------------------------------------------------------------
    def _ident(self):
        return (self.p, self.vars, self.order, tuple(tuple(sorted(g.items())) for g in self.gb))

    def __eq__(self, other):
        return isinstance(other, Ring) and (self is other or self._ident() == other._ident())

    def __hash__(self):
        return self._hash

    def __repr__(self):
        base = f"F_{self.p}[{', '.join(self.vars)}]"
        if self.gb:
            base += "/(" + ", ".join(str(self.poly(g, reduce=False)) for g in self.gb) + ")"
        return base

    @property
    def ambient(self) -> "Ring":
        """The polynomial ring this ring is a quotient of."""
        return Ring(self.p, self.vars, self.order)

    @property
    def ideal(self) -> list["Polynomial"]:
        return [self.poly(g, reduce=False) for g in self.gb]

    # construction helpers -------------------------------------------------
    def _lead(self, terms: dict):
        m = max(terms, key=self.mkey)
        return m, terms[m]

    def poly(self, terms, reduce: bool = True) -> "Polynomial":
        if isinstance(terms, Polynomial):
            terms = terms.terms
        elif isinstance(terms, str):
            return parse_poly(terms, self)
        elif isinstance(terms, int):
            terms = {self.one_exp: terms} if terms % self.p else {}
        t = {m: c % self.p for m, c in terms.items() if c % self.p}
        if reduce:
            t = self.reduce_terms(t)
        return Polynomial(self, t)

    @property
    def one_exp(self) -> tuple:
        return (0,) * self.nvars

    def zero(self) -> "Polynomial":
        return Polynomial(self, {})

    def one(self) -> "Polynomial":
        return Polynomial(self, {self.one_exp: 1})

    def var(self, name_or_index) -> "Polynomial":
        i = self.vars.index(name_or_index) if isinstance(name_or_index, str) else name_or_index
        e = [0] * self.nvars
        e[i] = 1
        return Polynomial(self, self.reduce_terms({tuple(e): 1}))

    def gens(self) -> list["Polynomial"]:
        return [self.var(i) for i in range(self.nvars)]

    def maximal_ideal(self) -> list["Polynomial"]:
        return self.gens()

    # normal forms -------------------------------------------------------
    def reduce_terms(self, terms: dict) -> dict:
        """Full reduction of a term dict modulo the quotient GB."""
        if not self.gb or not terms:
            return terms
        p, key = self.p, self.mkey
        f = dict(terms)
        out = {}
        while f:
            m = max(f, key=key)
            c = f[m]
            for g, lm in zip(self.gb, self._gb_leads):
                if divides(lm, m):
                    q = mono_div(m, lm)
                    scale = c * pow(g[lm], -1, p) % p
                    for gm, gc in g.items():
                        t = mono_mul(gm, q)
                        v = (f.get(t, 0) - scale * gc) % p
                        if v:
                            f[t] = v
                        else:
                            f.pop(t, None)
                    break
            else:
                out[m] = c
                del f[m]
        return out


class Polynomial:
    """An element of a :class:`Ring`, kept in normal form."""

    __slots__ = ("ring", "terms", "_hash")

    def __init__(self, ring: Ring, terms: dict):
        self.ring = ring
        self.terms = terms
        self._hash = None

    # basic predicates -----------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def degree(self) -> int:
        if not self.terms:
            raise ValueError("zero polynomial has no degree")
        return max(sum(m) for m in self.terms)

    def is_homogeneous(self) -> bool:
        return len({sum(m) for m in self.terms}) <= 1

    def is_constant(self) -> bool:
        return all(sum(m) == 0 for m in self.terms)

    def constant_term(self) -> int:
        return self.terms.get(self.ring.one_exp, 0)

    def lead(self):
        """(exponent, coefficient) of the leading term."""
        return self.ring._lead(self.terms)

    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda mc: self.ring.mkey(mc[0]), reverse=True)

    # arithmetic -----------------------------------------------------------
    def _check(self, other) -> "Polynomial":
        if isinstance(other, int):
            return self.ring.poly(other)
        if not isinstance(other, Polynomial):
            return NotImplemented
        if other.ring != self.ring:
            raise ValueError("polynomials from different rings")
        return other

    def __add__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return other
        p = self.ring.p
        t = dict(self.terms)
        for m, c in other.terms.items():
            v = (t.get(m, 0) + c) % p
            if v:
                t[m] = v
            else:
                t.pop(m, None)
        return Polynomial(self.ring, t)

    __radd__ = __add__

    def __neg__(self):
        p = self.ring.p
        return Polynomial(self.ring, {m: (-c) % p for m, c in self.terms.items()})

    def __sub__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, int):
            c = other % self.ring.p
            if not c:
                return self.ring.zero()
            return Polynomial(self.ring, {m: v * c % self.ring.p for m, v in self.terms.items()})
        other = self._check(other)
        if other is NotImplemented:
            return other
        p = self.ring.p
        t: dict = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = mono_mul(m1, m2)
                t[m] = (t.get(m, 0) + c1 * c2) % p
        t = {m: c for m, c in t.items() if c}
        return Polynomial(self.ring, self.ring.reduce_terms(t))

    __rmul__ = __mul__

    def __pow__(self, n: int):
        out = self.ring.one()
        for _ in range(n):
            out = out * self
        return out

    def __eq__(self, other):
        if isinstance(other, int):
            other = self.ring.poly(other)
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.terms == other.terms and self.ring == other.ring

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self.terms.items()))
        return self._hash

    def __str__(self):
        return format_poly(self)

    def __repr__(self):
        return f"Polynomial({format_poly(self)!r})"


# ---------------------------------------------------------------------------
# text syntax


def format_poly(f: Polynomial) -> str:
    if not f.terms:
        return "0"
    p = f.ring.p
    parts = []
    for m, c in f.sorted_terms():
        sign = "+"
        if c > p // 2:
            sign, c = "-", p - c
        factors = []
        for name, e in zip(f.ring.vars, m):
            if e == 1:
                factors.append(name)
            elif e > 1:
                factors.append(f"{name}^{e}")
        if c != 1 or not factors:
            factors.insert(0, str(c))
        parts.append((sign, "*".join(factors)))
    out = ("-" if parts[0][0] == "-" else "") + parts[0][1]
    for sign, body in parts[1:]:
        out += f" {sign} {body}"
    return out


_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z_0-9]*)|(.))")


def parse_poly(text: str, ring: Ring) -> Polynomial:
    """Parse ``3*x^2*y + 7*y^3``-style text. Parenthesised factors are allowed."""
    tokens = []
    for m in _TOKEN.finditer(text):
        if m.group(0).strip() == "":
            continue
        num, name, sym = m.groups()
        tokens.append(("num", int(num)) if num else ("name", name) if name else ("sym", sym))
    pos = 0

    def peek():
        return tokens[pos] if pos < len(tokens) else ("end", None)

    def take(kind, value=None):
        nonlocal pos
        tok = peek()
        if tok[0] != kind or (value is not None and tok[1] != value):
            raise ValueError(f"cannot parse polynomial {text!r}: expected {value or kind}, got {tok[1]!r}")
        pos += 1
        return tok[1]

    def atom():
        tok = peek()
        if tok[0] == "num":
            base = ring.poly(take("num"))
        elif tok[0] == "name":
            name = take("name")
            if name not in ring.vars:
                raise ValueError(f"unknown variable {name!r} in {text!r}")
            base = ring.var(name)
        elif tok == ("sym", "("):
            take("sym", "(")
            base = expr()
            take("sym", ")")
        else:
            raise ValueError(f"cannot parse polynomial {text!r}: unexpected {tok[1]!r}")
        if peek() == ("sym", "^"):
            take("sym", "^")
            base = base ** take("num")
        return base

    def term():
        out = atom()
        while peek() == ("sym", "*"):
            take("sym", "*")
            out = out * atom()
        return out

    def expr():
        sign = 1
        if peek() in (("sym", "-"), ("sym", "+")):
            sign = -1 if take("sym") == "-" else 1
        out = term() * sign
        while peek() in (("sym", "+"), ("sym", "-")):
            op = take("sym")
            t = term()
            out = out + t if op == "+" else out - t
        return out

    result = expr()
    if pos != len(tokens):
        raise ValueError(f"cannot parse polynomial {text!r}: trailing {tokens[pos][1]!r}")
    return result


# ---------------------------------------------------------------------------
# ring construction


def make_ring(p: int, vars: Sequence[str], order: str = "grevlex", ideal_gens: Iterable = ()) -> Ring:
    """Build F_p[vars]/(ideal_gens) with the reduced Groebner basis of the ideal."""
    from .groebner import ideal_gb

    if order not in _ORDER_KEYS:
        raise BadOrder(f"unknown monomial order {order!r}; use one of {ORDERS}")
    base = Ring(p, vars, order)
    gens = [g if isinstance(g, Polynomial) else base.poly(g) for g in ideal_gens]
    gens = [base.poly(g.terms) for g in gens if g.terms]
    for g in gens:
        if not g.is_homogeneous():
            raise NotHomogeneous(f"ideal generator {g} is not homogeneous")
    gb = ideal_gb(base, gens)
    if any(all(e == 0 for e in m) for g in gb for m in g):
        raise UnitIdeal("the ideal contains 1")
    return Ring(p, vars, order, gb)


def normal_form(f: Polynomial, R: Ring) -> Polynomial:
    return Polynomial(R, R.reduce_terms({m: c % R.p for m, c in f.terms.items() if c % R.p}))


def all_monomials_up_to(nvars: int, d: int):
    return itertools.chain.from_iterable(monomials_of_degree(nvars, k) for k in range(d + 1))
