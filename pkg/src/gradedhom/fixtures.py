"""Standard rings and modules used in tests, examples and the CLI."""

from __future__ import annotations

import random

from .field import DEFAULT_P
from .matrix import Matrix
from .module import FpModule, syzygy
from .poly import Ring, make_ring, monomials_of_degree

_RINGS = {
    "R1": (("x",), ()),
    "R2": (("x",), ("x^2",)),
    "R3": (("x", "y"), ("x*y",)),
    "R4": (("x", "y"), ()),
    "R5": (("x", "y"), ("x^2", "x*y")),
}


def ring(name: str, p: int = DEFAULT_P, order: str = "grevlex") -> Ring:
    """R1 = k[x], R2 = k[x]/(x^2), R3 = k[x,y]/(xy), R4 = k[x,y], R5 = k[x,y]/(x^2,xy)."""
    vars_, ideal = _RINGS[name]
    return make_ring(p, vars_, order, ideal)


def all_rings(p: int = DEFAULT_P) -> dict[str, Ring]:
    return {name: ring(name, p) for name in _RINGS}


def free(R: Ring) -> FpModule:
    return FpModule.free(R, (0,))


def residue_field(R: Ring) -> FpModule:
    return FpModule.residue_field(R)


def cyclic_x(R: Ring) -> FpModule:
    """R/(x)."""
    return FpModule.quotient_ring(R, [R.var(0)])


def omega_k(R: Ring) -> FpModule:
    return syzygy(residue_field(R), 1)


def random_homogeneous(R: Ring, degree: int, rng: random.Random, density: float = 0.6):
    terms = {}
    for m in monomials_of_degree(R.nvars, degree):
        if rng.random() < density:
            terms[m] = rng.randrange(1, R.p)
    return R.poly(terms)


def random_module(R: Ring, seed: int, max_gens: int = 2, max_rels: int = 2) -> FpModule:
    """A small random graded cokernel, reproducible from ``seed``."""
    rng = random.Random(seed)
    ngens = rng.randint(1, max_gens)
    degrees = [rng.randint(0, 1) for _ in range(ngens)]
    cols = []
    for _ in range(rng.randint(1, max_rels)):
        top = max(degrees) + rng.randint(1, 2)
        cols.append([random_homogeneous(R, top - d, rng) for d in degrees])
    return FpModule(R, degrees, Matrix(R, ngens, cols))


def standard_modules(R: Ring) -> dict[str, FpModule]:
    return {"R": free(R), "k": residue_field(R), "R/(x)": cyclic_x(R), "Omega1k": omega_k(R)}
