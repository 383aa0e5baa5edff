from __future__ import annotations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from gradedhom.errors import NotPrime, ZeroInverse
from gradedhom.field import FieldChar, Fp, fp_arith, fp_inv, is_prime

F = FieldChar(101)
residues = st.integers(min_value=0, max_value=100)
nonzero = st.integers(min_value=1, max_value=100)


def test_inverse_examples():
    assert int(fp_inv(F(1))) == 1
    assert int(fp_inv(F(2))) == 51
    with pytest.raises(ZeroInverse):
        fp_inv(F(0))


def test_arith_examples():
    assert int(fp_arith(F(100), F(2), "add")) == 1
    assert int(fp_arith(F(10), F(21), "mul")) == 8
    with pytest.raises(ZeroInverse):
        fp_arith(F(1), F(0), "div")
    with pytest.raises(ValueError):
        fp_arith(F(1), F(1), "pow")


def test_canonical_residues():
    assert F(-1).value == 100
    assert F(205).value == 3
    assert F(3) == F(104)


@pytest.mark.parametrize("p", [1, 2, 4, 100, 2**31 + 11, 2**31 - 1 + 2])
def test_bad_characteristics(p):
    with pytest.raises(NotPrime):
        FieldChar(p)


def test_primality_against_trial_division():
    def slow(n):
        return n > 1 and all(n % d for d in range(2, int(n**0.5) + 1))

    assert all(is_prime(n) == slow(n) for n in range(2000))
    assert is_prime(2**31 - 1)


def test_mixed_characteristics_rejected():
    with pytest.raises(ValueError):
        Fp(1, 101) + Fp(1, 103)


@given(residues, residues, residues)
def test_ring_axioms(a, b, c):
    x, y, z = F(a), F(b), F(c)
    assert (x + y) + z == x + (y + z)
    assert (x * y) * z == x * (y * z)
    assert x * (y + z) == x * y + x * z
    assert x + y == y + x and x * y == y * x
    assert int(x - y) == (a - b) % 101


@given(nonzero)
def test_inverse_properties(a):
    x = F(a)
    assert int(fp_inv(x) * x) == 1
    assert fp_inv(fp_inv(x)) == x
    # independent oracle: Python's modular inverse
    assert int(fp_inv(x)) == pow(a, -1, 101)


@given(residues, nonzero)
def test_division_matches_multiplication_by_inverse(a, b):
    assert fp_arith(F(a), F(b), "div") == F(a) * fp_inv(F(b))
