"""Infinite sentinels for dimensions.

They deliberately refuse ordering comparisons with integers; use
:func:`dim_le` and :func:`dim_max`, which handle them explicitly.
"""

from __future__ import annotations


class _Sentinel:
    __slots__ = ("name", "sign")

    def __init__(self, name: str, sign: int):
        self.name = name
        self.sign = sign

    def __repr__(self):
        return self.name

    __str__ = __repr__

    def __reduce__(self):
        return (_lookup, (self.name,))

    def _refuse(self, other):
        raise TypeError(f"{self.name} cannot be compared implicitly; use dim_le/dim_max")

    __lt__ = __le__ = __gt__ = __ge__ = _refuse


INFINITY = _Sentinel("inf", 1)
NEG_INFINITY = _Sentinel("-inf", -1)


def _lookup(name):
    return INFINITY if name == "inf" else NEG_INFINITY


def is_finite(v) -> bool:
    return isinstance(v, int)


def _rank(v):
    if v is INFINITY:
        return (1, 0)
    if v is NEG_INFINITY:
        return (-1, 0)
    return (0, v)


def dim_le(a, b) -> bool:
    return _rank(a) <= _rank(b)


def dim_max(values):
    values = list(values)
    if not values:
        return NEG_INFINITY
    return max(values, key=_rank)


def to_json(v):
    return v if isinstance(v, int) else str(v)
