"""Prime-indexed invariants computed through support tests.

Localizations are never built. A module N has N_p != 0 exactly when
ann(N) ⊆ p, so local Ext/Tor questions become annihilator containments
decided by Groebner normal forms. Primes are asserted by the user; nothing
here checks primality, and every table is relative to the supplied list.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence, Union

from .errors import ABViolation, BadDeclaration, NotExact, NotWellDefined, RankMismatch, UnitIdeal
from .homalg import BoundedVerdict, Dualizer, depth
from .module import (
    FpModule,
    ModuleMap,
    annihilator,
    certify_exact,
    direct_sum,
    ext,
    ext_is_zero,
    free_resolution,
    ideal_subset,
    is_isomorphic,
    is_unit_ideal,
    minimal_presentation,
    syzygy,
    tor,
)
from .poly import Polynomial, Ring
from .sentinels import INFINITY, dim_le, dim_max

PROJECTIVES = "projective"


@dataclass(frozen=True)
class PrimeRecord:
    """A user-asserted homogeneous prime; ``declared_inclusions`` lists primes contained in it."""

    label: str
    ideal: tuple
    declared_inclusions: tuple = ()

    def __post_init__(self):
        gens = tuple(self.ideal)
        object.__setattr__(self, "ideal", gens)
        object.__setattr__(self, "declared_inclusions", tuple(self.declared_inclusions))
        if not gens:
            return
        ring = gens[0].ring
        for g in gens:
            if not g.is_homogeneous():
                from .errors import NotHomogeneous

                raise NotHomogeneous(f"prime generator {g} is not homogeneous")
        if is_unit_ideal(ring, list(gens)):
            raise UnitIdeal(f"prime {self.label} is the unit ideal")

    def contains(self, ring: Ring, I: Sequence[Polynomial]) -> bool:
        """I ⊆ p."""
        return ideal_subset(ring, list(I), list(self.ideal))


def make_prime(ring: Ring, label: str, gens: Iterable, inclusions: Iterable[str] = ()) -> PrimeRecord:
    polys = tuple(g if isinstance(g, Polynomial) else ring.poly(g) for g in gens)
    polys = tuple(g for g in polys if g.terms)
    if is_unit_ideal(ring, list(polys)):
        raise UnitIdeal(f"prime {label} is the unit ideal")
    return PrimeRecord(label, polys, tuple(inclusions))


def maximal_ideal(ring: Ring, label: str = "m") -> PrimeRecord:
    return make_prime(ring, label, ring.gens())


def validate_primes(ring: Ring, primes: Sequence[PrimeRecord]) -> None:
    """Check that every declared inclusion q ⊆ p actually holds."""
    by_label = {p.label: p for p in primes}
    for p in primes:
        for q in p.declared_inclusions:
            if q not in by_label:
                raise BadDeclaration(f"prime {p.label} declares unknown prime {q}")
            if not p.contains(ring, by_label[q].ideal):
                raise BadDeclaration(f"declared inclusion {q} ⊆ {p.label} is false")


@dataclass
class GradeFnTable:
    entries: dict = field(default_factory=dict)

    def __getitem__(self, label):
        return self.entries[label]

    def __eq__(self, other):
        return isinstance(other, GradeFnTable) and self.entries == other.entries

    def labels(self):
        return list(self.entries)

    def pointwise_max(self, other: "GradeFnTable") -> "GradeFnTable":
        return GradeFnTable({k: dim_max([v, other.entries[k]]) for k, v in self.entries.items()})

    def values(self, primes: Sequence[PrimeRecord]) -> list:
        return [self.entries[p.label] for p in primes]


# ---------------------------------------------------------------------------
# grade and local invariants


def _support_contains(M: FpModule, p: PrimeRecord) -> bool:
    """M_p != 0."""
    if minimal_presentation(M).ngens == 0:
        return False
    return p.contains(M.ring, annihilator(M))


def grade(ring: Ring, I: Sequence[Polynomial]) -> int:
    """min{i : Ext^i(R/I, R) != 0}."""
    gens = [g if isinstance(g, Polynomial) else ring.poly(g) for g in I]
    if is_unit_ideal(ring, gens):
        raise UnitIdeal("grade of the unit ideal is undefined")
    Q = FpModule.quotient_ring(ring, gens)
    R = FpModule.free(ring)
    for i in range(ring.nvars + 1):
        if not ext_is_zero(Q, R, i):
            return i
    raise AssertionError("Ext^i(R/I, R) vanished for all i <= dim R")


def local_depth(M: FpModule, p: PrimeRecord):
    """depth of M_p over R_p; INFINITY when M_p = 0."""
    ring = M.ring
    if not _support_contains(M, p):
        return INFINITY
    Q = FpModule.quotient_ring(ring, list(p.ideal))
    M0 = minimal_presentation(M)
    for i in range(ring.nvars + 1):
        if ext_is_zero(Q, M0, i):
            continue
        if p.contains(ring, annihilator(ext(Q, M0, i))):
            return i
    raise AssertionError("no nonvanishing local Ext below dim R; engine bug")


def local_pd(M: FpModule, p: PrimeRecord, bound: int = 20) -> BoundedVerdict:
    """Projective dimension of M_p, read from the support of Tor_i(M, R/p)."""
    ring = M.ring
    if not _support_contains(M, p):
        return BoundedVerdict(0, bound, checks={"support": "M_p = 0"})
    Q = FpModule.quotient_ring(ring, list(p.ideal))
    res = free_resolution(M, bound + 1)
    top = None
    for i in range(bound + 1):
        if not res.twists[i]:
            break
        T = tor(M, Q, i)
        if minimal_presentation(T).ngens and p.contains(ring, annihilator(T)):
            top = i
    if top is None:
        top = 0
    if top == bound and bound > 0:
        return BoundedVerdict(INFINITY, bound)
    return BoundedVerdict(top, bound)


def local_gcdim(X: FpModule, C: Dualizer, p: PrimeRecord, bound: int = 20) -> BoundedVerdict:
    """G_C-dimension of X_p: depth R_p - depth X_p, once local Ext vanishing is certified."""
    C.require(bound)
    ring = X.ring
    if not _support_contains(X, p):
        return BoundedVerdict(0, bound, checks={"support": "X_p = 0"})
    X0 = minimal_presentation(X)
    C0 = C.base
    last = 0
    for i in range(bound, 0, -1):
        if ext_is_zero(X0, C0, i):
            continue
        if p.contains(ring, annihilator(ext(X0, C0, i))):
            last = i
            break
    if last == bound:
        return BoundedVerdict(INFINITY, bound, checks={"ext_vanishing": INFINITY})
    dR = local_depth(FpModule.free(ring), p)
    dX = local_depth(X0, p)
    value = dR - dX
    if value != last:
        raise ABViolation(f"local depth difference {value} disagrees with local Ext index {last} at {p.label}")
    return BoundedVerdict(value, bound, checks={"ab_check": f"{value} + {dX} = {dR}"})


# ---------------------------------------------------------------------------
# Phi, Lambda and grade consistency

Kind = Union[str, Dualizer]


def _local_dim(X: FpModule, kind: Kind, p: PrimeRecord, bound: int):
    if isinstance(kind, Dualizer):
        return local_gcdim(X, kind, p, bound).value
    if kind != PROJECTIVES:
        raise ValueError(f"unknown dimension kind {kind!r}")
    return local_pd(X, p, bound).value


def phi(S: Sequence[FpModule], kind: Kind, primes: Sequence[PrimeRecord], bound: int = 20) -> GradeFnTable:
    """p -> max over X in S of the local (projective or G_C) dimension of X_p."""
    if not S:
        raise ValueError("S must be nonempty")
    table = {}
    for p in sorted(primes, key=lambda q: q.label):
        table[p.label] = dim_max(_local_dim(X, kind, p, bound) for X in S)
    return GradeFnTable({p.label: table[p.label] for p in primes})


@dataclass
class Yes:
    note: str = ""

    verdict = "Yes"


@dataclass
class No:
    violation: str
    prime: str
    detail: str = ""

    verdict = "No"


def is_grade_consistent(f: GradeFnTable, primes: Sequence[PrimeRecord], ring: Ring):
    """Order preserving on declared inclusions and bounded by grade."""
    by_label = {p.label: p for p in primes}
    for p in primes:
        if p.label not in f.entries:
            raise KeyError(f"grade table is missing prime {p.label}")
    for p in primes:
        g = grade(ring, list(p.ideal))
        if not dim_le(f[p.label], g):
            return No("grade bound", p.label, f"f({p.label}) = {f[p.label]} > grade = {g}")
        for q in p.declared_inclusions:
            if q in by_label and not dim_le(f[q], f[p.label]):
                return No("monotonicity", p.label, f"{q} ⊆ {p.label} but f({q}) = {f[q]} > f({p.label}) = {f[p.label]}")
    return Yes("relative to the supplied prime list")


def lambda_member(X: FpModule, f: GradeFnTable, kind: Kind, primes: Sequence[PrimeRecord], bound: int = 20):
    """Is the local dimension of X at every supplied prime at most f(p)?"""
    for p in primes:
        d = _local_dim(X, kind, p, bound)
        if not dim_le(d, f[p.label]):
            return No("dimension", p.label, f"local dimension {d} > f({p.label}) = {f[p.label]}")
    return Yes("relative to the supplied prime list")


# ---------------------------------------------------------------------------
# resolving witnesses


@dataclass(frozen=True)
class Generator:
    index: int


@dataclass(frozen=True)
class FreeModule:
    twists: tuple


@dataclass(frozen=True)
class Syzygy:
    child: str


@dataclass(frozen=True, eq=False)
class Extension:
    """0 -> left -> module -> right -> 0 with maps f, g."""

    left: str
    right: str
    module: FpModule
    f: ModuleMap
    g: ModuleMap


@dataclass(frozen=True, eq=False)
class Kernel:
    """0 -> module -> middle -> right -> 0 with maps f, g."""

    middle: str
    right: str
    module: FpModule
    f: ModuleMap
    g: ModuleMap


@dataclass(frozen=True, eq=False)
class Summand:
    """child ≅ module ⊕ complement, certified by ``iso`` (or by search when None)."""

    child: str
    complement: FpModule
    module: FpModule
    iso: ModuleMap | None = None


Node = Union[Generator, FreeModule, Syzygy, Extension, Kernel, Summand]


@dataclass
class ResolvingWitness:
    nodes: Mapping[str, Node]
    root: str


@dataclass
class Valid:
    modules: dict = field(repr=False, default_factory=dict)

    verdict = "Valid"


@dataclass
class Invalid:
    node: str
    reason: str

    verdict = "Invalid"


def _children(node) -> list[str]:
    if isinstance(node, Syzygy):
        return [node.child]
    if isinstance(node, Extension):
        return [node.left, node.right]
    if isinstance(node, Kernel):
        return [node.middle, node.right]
    if isinstance(node, Summand):
        return [node.child]
    return []


class _Bad(Exception):
    def __init__(self, node: str, reason: str):
        self.node, self.reason = node, reason


def _eval_node(name: str, node, S, mods: dict, seed: int) -> FpModule:
    def need(child):
        if child not in mods:
            raise _Bad(name, f"child {child} is missing")
        return mods[child]

    def same(a: FpModule, b: FpModule, what: str):
        if a != b:
            raise _Bad(name, f"{what} does not match the child module")

    if isinstance(node, Generator):
        if not 0 <= node.index < len(S):
            raise _Bad(name, f"generator index {node.index} out of range")
        return S[node.index]
    if isinstance(node, FreeModule):
        if not S:
            raise _Bad(name, "cannot infer the ring of a free module without generators")
        return FpModule.free(S[0].ring, node.twists)
    if isinstance(node, Syzygy):
        return syzygy(need(node.child), 1)
    try:
        if isinstance(node, Extension):
            same(node.f.source, need(node.left), "f source")
            same(node.g.target, need(node.right), "g target")
            same(node.f.target, node.module, "f target")
            same(node.g.source, node.module, "g source")
            _recheck(node.f)
            _recheck(node.g)
            if not all(certify_exact([node.f, node.g])):
                raise _Bad(name, "NotExact")
            return node.module
        if isinstance(node, Kernel):
            same(node.f.target, need(node.middle), "f target")
            same(node.g.source, need(node.middle), "g source")
            same(node.g.target, need(node.right), "g target")
            same(node.f.source, node.module, "f source")
            _recheck(node.f)
            _recheck(node.g)
            if not all(certify_exact([node.f, node.g])):
                raise _Bad(name, "NotExact")
            return node.module
        if isinstance(node, Summand):
            B = need(node.child)
            total = direct_sum(node.module, node.complement)
            if node.iso is not None:
                same(node.iso.target, B, "iso target")
                if node.iso.source != total:
                    raise _Bad(name, "iso source is not module ⊕ complement")
                _recheck(node.iso)
                if not node.iso.is_iso():
                    raise _Bad(name, "decomposition map is not an isomorphism")
            elif is_isomorphic(total, B, seed=seed).verdict != "Iso":
                raise _Bad(name, "decomposition not certified by is_isomorphic")
            return node.module
    except (NotWellDefined, NotExact, RankMismatch) as exc:
        raise _Bad(name, f"{type(exc).__name__}: {exc}") from None
    raise _Bad(name, f"unknown node type {type(node).__name__}")


def _recheck(f: ModuleMap) -> None:
    """Rebuild the map so its well-definedness certificate is recomputed."""
    ModuleMap(f.source, f.target, f.matrix, check=True)


def check_resolving_witness(w: ResolvingWitness, S: Sequence[FpModule], target: FpModule, seed: int = 0):
    """Valid iff every certificate re-verifies and the root is isomorphic to target."""
    order: list[str] = []
    state: dict[str, int] = {}

    def visit(name: str, stack: tuple):
        if state.get(name) == 2:
            return
        if name in stack:
            raise _Bad(name, "cycle in witness graph")
        if name not in w.nodes:
            raise _Bad(stack[-1] if stack else name, f"unknown node {name}")
        for c in _children(w.nodes[name]):
            visit(c, stack + (name,))
        state[name] = 2
        order.append(name)

    mods: dict[str, FpModule] = {}
    try:
        visit(w.root, ())
        for name in order:
            mods[name] = _eval_node(name, w.nodes[name], S, mods, seed)
        if is_isomorphic(mods[w.root], target, seed=seed).verdict != "Iso":
            return Invalid(w.root, "root module is not isomorphic to the target")
    except _Bad as bad:
        return Invalid(bad.node, bad.reason)
    return Valid(mods)
