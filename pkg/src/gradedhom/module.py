"""Finitely presented graded modules and their homological toolkit.

Conventions: a module is ``coker(A)`` where the columns of ``A`` are the
relations; maps act on the left, so a map ``M -> N`` is a matrix with one
column per generator of ``M``. A module generated in degree ``d`` shifted by
``M.shift(a)`` is generated in degree ``d - a``, i.e. ``M(a)_n = M_{a+n}``.
"""

from __future__ import annotations

import random
import threading
from dataclasses import dataclass, field
from itertools import combinations
from typing import Sequence

from .errors import NotExact, NotHomogeneous, NotWellDefined, RankMismatch, RingMismatch
from .groebner import ModuleGB, column_degrees, ideal_gb, minimal_columns, syzygies
from .matrix import Matrix, block_diag, col_to_vec, hstack, kron_identity, vec_to_col
from .poly import Polynomial, Ring, divides, monomials_of_degree
from .sentinels import NEG_INFINITY

# ---------------------------------------------------------------------------
# memo tables

_lock = threading.RLock()
_caches: dict[str, dict] = {}


def _memo(name: str):
    def deco(fn):
        table = _caches.setdefault(name, {})

        def wrapper(*args):
            with _lock:
                if args in table:
                    return table[args]
            value = fn(*args)
            with _lock:
                table.setdefault(args, value)
            return value

        wrapper.__name__ = fn.__name__
        wrapper.__doc__ = fn.__doc__
        wrapper.__wrapped__ = fn
        return wrapper

    return deco


def clear_caches() -> None:
    with _lock:
        for t in _caches.values():
            t.clear()


# ---------------------------------------------------------------------------
# modules


class FpModule:
    """coker(relations) on generators of the given degrees."""

    def __init__(self, ring: Ring, degrees: Sequence[int], relations: Matrix | None = None):
        self.ring = ring
        self.degrees = tuple(int(d) for d in degrees)
        if relations is None:
            relations = Matrix(ring, len(self.degrees), [])
        if relations.nrows != len(self.degrees):
            raise RankMismatch(f"{relations.nrows} relation rows for {len(self.degrees)} generators")
        if relations.ring != ring:
            raise RingMismatch("relation matrix over a different ring")
        cols = [tuple(ring.poly(e.terms) for e in c) for c in relations.cols]
        cols = [c for c in cols if any(not e.is_zero() for e in c)]
        self.relations = Matrix(ring, len(self.degrees), cols)
        self.rel_degrees = tuple(column_degrees(self.relations, self.degrees))
        self._hash = hash((ring, self.degrees, self.relations))
        self._gb = None

    # constructors -----------------------------------------------------------
    @classmethod
    def free(cls, ring: Ring, degrees: Sequence[int] = (0,)) -> "FpModule":
        return cls(ring, degrees)

    @classmethod
    def coker(cls, ring: Ring, rows: Sequence[Sequence], degrees: Sequence[int] | None = None) -> "FpModule":
        """``rows`` lists one row per generator; each column is a relation."""
        if degrees is None:
            degrees = [0] * len(rows)
        if not rows:
            return cls(ring, degrees)
        return cls(ring, degrees, Matrix.from_rows(ring, rows))

    @classmethod
    def zero(cls, ring: Ring) -> "FpModule":
        return cls(ring, ())

    @classmethod
    def quotient_ring(cls, ring: Ring, ideal: Sequence, degree: int = 0) -> "FpModule":
        gens = [ring.poly(g) if not isinstance(g, Polynomial) else g for g in ideal]
        return cls(ring, (degree,), Matrix(ring, 1, [[g] for g in gens]))

    @classmethod
    def residue_field(cls, ring: Ring, degree: int = 0) -> "FpModule":
        return cls.quotient_ring(ring, ring.gens(), degree)

    # basics -----------------------------------------------------------------
    @property
    def ngens(self) -> int:
        return len(self.degrees)

    def __eq__(self, other):
        return (
            isinstance(other, FpModule)
            and self.degrees == other.degrees
            and self.ring == other.ring
            and self.relations == other.relations
        )

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"FpModule(degrees={list(self.degrees)}, relations={self.relations!r})"

    def rel_gb(self) -> ModuleGB:
        if self._gb is None:
            self._gb = ModuleGB(self.ring, self.degrees, [col_to_vec(c) for c in self.relations.cols])
        return self._gb

    def in_relations(self, col: Sequence[Polynomial]) -> bool:
        return self.rel_gb().contains(col_to_vec(col))

    def shift(self, a: int) -> "FpModule":
        return FpModule(self.ring, [d - a for d in self.degrees], self.relations)

    def is_zero(self) -> bool:
        return minimal_presentation(self).ngens == 0

    def __add__(self, other: "FpModule") -> "FpModule":
        return direct_sum(self, other)


def direct_sum(*mods: FpModule) -> FpModule:
    if not mods:
        raise ValueError("direct_sum of nothing")
    ring = mods[0].ring
    for m in mods:
        _same_ring(mods[0], m)
    degrees = [d for m in mods for d in m.degrees]
    n = len(degrees)
    z = ring.zero()
    cols = []
    off = 0
    for m in mods:
        for c in m.relations.cols:
            cols.append([z] * off + list(c) + [z] * (n - off - m.ngens))
        off += m.ngens
    return FpModule(ring, degrees, Matrix(ring, n, cols))


def _same_ring(M, N) -> None:
    if M.ring != N.ring:
        raise RingMismatch("modules live over different rings")


# ---------------------------------------------------------------------------
# maps


class ModuleMap:
    """A degree-0 homomorphism ``source -> target``.

    Construction verifies that ``matrix @ source.relations`` lies in the span
    of ``target.relations``; ``well_defined`` records that certificate.
    """

    def __init__(self, source: FpModule, target: FpModule, matrix: Matrix, check: bool = True):
        _same_ring(source, target)
        if matrix.shape != (target.ngens, source.ngens):
            raise RankMismatch(f"map matrix has shape {matrix.shape}, expected {(target.ngens, source.ngens)}")
        self.source = source
        self.target = target
        self.matrix = matrix
        self.well_defined = False
        if check:
            self._check_degrees()
            img = matrix @ source.relations
            if not all(target.in_relations(c) for c in img.cols):
                raise NotWellDefined("relations of the source do not map into relations of the target")
            self.well_defined = True

    def _check_degrees(self) -> None:
        for j, col in enumerate(self.matrix.cols):
            for i, e in enumerate(col):
                want = self.source.degrees[j] - self.target.degrees[i]
                if any(sum(m) != want for m in e.terms):
                    raise NotHomogeneous(f"map entry ({i},{j}) = {e} is not of degree {want}")

    @classmethod
    def identity(cls, M: FpModule) -> "ModuleMap":
        return cls(M, M, Matrix.identity(M.ring, M.ngens), check=False)

    @classmethod
    def zero(cls, M: FpModule, N: FpModule) -> "ModuleMap":
        return cls(M, N, Matrix.zero(M.ring, N.ngens, M.ngens), check=False)

    def __matmul__(self, other: "ModuleMap") -> "ModuleMap":
        if other.target != self.source:
            raise RankMismatch("maps are not composable")
        return ModuleMap(other.source, self.target, self.matrix @ other.matrix, check=False)

    def __repr__(self):
        return f"ModuleMap({self.matrix!r})"

    # properties -------------------------------------------------------------
    def is_zero(self) -> bool:
        return all(self.target.in_relations(c) for c in self.matrix.cols)

    def equals(self, other: "ModuleMap") -> bool:
        diff = self.matrix - other.matrix
        return all(self.target.in_relations(c) for c in diff.cols)

    def _kernel_vectors(self) -> Matrix:
        src, tgt = self.source, self.target
        L = hstack(src.ring, tgt.ngens, [self.matrix, tgt.relations])
        Z = syzygies(L, tgt.degrees, col_degrees=list(src.degrees) + list(tgt.rel_degrees), minimal=False)
        return Z.select_rows(list(range(src.ngens)))

    def kernel(self) -> "Presented":
        return subquotient(self.source.ring, self.source.degrees, self._kernel_vectors(), self.source.relations)

    def image(self) -> "Presented":
        return subquotient(self.source.ring, self.target.degrees, self.matrix, self.target.relations)

    def cokernel(self) -> "Presented":
        tgt = self.target
        C = FpModule(tgt.ring, tgt.degrees, hstack(tgt.ring, tgt.ngens, [self.matrix, tgt.relations]))
        return presented(C)

    def is_injective(self) -> bool:
        if self.source.ngens == 0:
            return True
        K = self._kernel_vectors()
        return all(self.source.in_relations(c) for c in K.cols)

    def is_surjective(self) -> bool:
        tgt = self.target
        if tgt.ngens == 0:
            return True
        span = FpModule(tgt.ring, tgt.degrees, hstack(tgt.ring, tgt.ngens, [self.matrix, tgt.relations]))
        ident = Matrix.identity(tgt.ring, tgt.ngens)
        return all(span.in_relations(c) for c in ident.cols)

    def is_iso(self) -> bool:
        return self.is_surjective() and self.is_injective()


def is_exact_at(f: ModuleMap, g: ModuleMap) -> bool:
    """True when ``A -f-> B -g-> C`` is exact at ``B``."""
    if f.target != g.source:
        raise RankMismatch("maps are not composable")
    if not (g @ f).is_zero():
        return False
    B = f.target
    if B.ngens == 0:
        return True
    K = g._kernel_vectors()
    span = FpModule(B.ring, B.degrees, hstack(B.ring, B.ngens, [f.matrix, B.relations]))
    return all(span.in_relations(c) for c in K.cols)


def certify_exact(maps: Sequence[ModuleMap], left_zero: bool = True, right_zero: bool = True) -> list[bool]:
    """Exactness verdicts for ``0 -> M0 -> ... -> Mk -> 0`` at every junction."""
    out = []
    if left_zero:
        out.append(maps[0].is_injective())
    for f, g in zip(maps, maps[1:]):
        out.append(is_exact_at(f, g))
    if right_zero:
        out.append(maps[-1].is_surjective())
    return out


def certify_ses(f: ModuleMap, g: ModuleMap) -> None:
    if not all(certify_exact([f, g])):
        raise NotExact("sequence 0 -> A -> B -> C -> 0 is not exact")


# ---------------------------------------------------------------------------
# minimal presentations and subquotients


@_memo("minimize")
def _minimize(M: FpModule):
    """Return (Mmin, P, Q): P maps old generators to new, Q includes new into old."""
    ring = M.ring
    r = M.ngens
    zero, one = ring.zero(), ring.one()
    A = [list(c) for c in M.relations.cols]
    P = [[one if i == j else zero for i in range(r)] for j in range(r)]
    alive = list(range(r))  # current generator -> original index
    degs = list(M.degrees)
    while True:
        pivot = None
        for j, col in enumerate(A):
            for i, e in enumerate(col):
                if e.terms and e.is_constant():
                    pivot = (i, j)
                    break
            if pivot:
                break
        if pivot is None:
            break
        i, j = pivot
        col = A[j]
        inv = ring.char.inv(col[i].constant_term())
        w = [(-e) * inv for e in col]

        def sub(c):
            ci = c[i]
            if ci.is_zero():
                return [e for k, e in enumerate(c) if k != i]
            return [e + ci * w[k] for k, e in enumerate(c) if k != i]

        A = [sub(c) for jj, c in enumerate(A) if jj != j]
        P = [sub(c) for c in P]
        del alive[i]
        del degs[i]
        A = [c for c in A if any(e.terms for e in c)]
    n = len(degs)
    Amat = Matrix(ring, n, A)
    keep = minimal_columns(Amat, degs)
    Mmin = FpModule(ring, degs, Amat.select_cols(keep))
    Pm = Matrix(ring, n, P)
    Q = Matrix(ring, r, [[one if k == a else zero for k in range(r)] for a in alive])
    return Mmin, Pm, Q


def minimal_presentation(M: FpModule) -> FpModule:
    return _minimize(M)[0]


def minimal_presentation_maps(M: FpModule):
    """(Mmin, iso M -> Mmin, iso Mmin -> M)."""
    Mmin, P, Q = _minimize(M)
    return Mmin, ModuleMap(M, Mmin, P, check=False), ModuleMap(Mmin, M, Q, check=False)


@dataclass
class Presented:
    """A module together with its realisation inside an ambient quotient F/rels.

    ``emb`` has one column per generator of ``module``: the ambient vector the
    generator stands for.
    """

    module: FpModule
    amb_degrees: tuple
    amb_rels: Matrix
    emb: Matrix
    _gb: ModuleGB | None = field(default=None, repr=False)

    def _lift_gb(self) -> ModuleGB:
        if self._gb is None:
            ring = self.module.ring
            cols = list(self.emb.cols) + list(self.amb_rels.cols)
            degs = list(self.module.degrees) + list(column_degrees(self.amb_rels, self.amb_degrees))
            degs = [d if d is not None else 0 for d in degs]
            self._gb = ModuleGB(ring, self.amb_degrees, [col_to_vec(c) for c in cols], track=True, gen_degrees=degs)
        return self._gb

    def coords(self, B: Matrix) -> Matrix:
        """Coordinates (in module generators) of ambient vectors lying in the module."""
        ring = self.module.ring
        n = self.module.ngens
        gb = self._lift_gb()
        cols = []
        for c in B.cols:
            v = col_to_vec(c)
            cof = gb.lift(v) if v else {}
            if cof is None:
                raise NotWellDefined("ambient vector does not lie in the submodule")
            cols.append(vec_to_col(ring, cof, n))
        return Matrix(ring, n, cols)

    def contains(self, B: Matrix) -> bool:
        gb = self._lift_gb()
        return all(gb.contains(col_to_vec(c)) for c in B.cols)


def presented(M: FpModule) -> Presented:
    Mmin, _, Q = _minimize(M)
    return Presented(Mmin, M.degrees, M.relations, Q)


def subquotient(ring: Ring, amb_degrees: Sequence[int], gens: Matrix, rels: Matrix) -> Presented:
    """(span(gens) + rels) / rels inside the free module with ``amb_degrees``."""
    amb_degrees = tuple(amb_degrees)
    n = len(amb_degrees)
    gdeg = column_degrees(gens, amb_degrees)
    keep = [j for j, d in enumerate(gdeg) if d is not None]
    K = gens.select_cols(keep)
    kdeg = [gdeg[j] for j in keep]
    if not keep:
        return Presented(FpModule.zero(ring), amb_degrees, rels, Matrix(ring, n, []))
    rdeg = column_degrees(rels, amb_degrees)
    rkeep = [j for j, d in enumerate(rdeg) if d is not None]
    R0 = rels.select_cols(rkeep)
    L = hstack(ring, n, [K, R0])
    Z = syzygies(L, amb_degrees, col_degrees=kdeg + [rdeg[j] for j in rkeep], minimal=False)
    N0 = FpModule(ring, kdeg, Z.select_rows(list(range(len(keep)))))
    Nmin, _, Q = _minimize(N0)
    return Presented(Nmin, amb_degrees, rels, K @ Q)


def induced_map(src: Presented, tgt: Presented, L: Matrix) -> ModuleMap:
    """Map between presented modules induced by the ambient matrix ``L``."""
    return ModuleMap(src.module, tgt.module, tgt.coords(L @ src.emb))


# ---------------------------------------------------------------------------
# resolutions


@dataclass
class Resolution:
    """Minimal graded free resolution F_0 <- F_1 <- ... computed to ``bound``.

    ``differentials[i]`` is d_{i+1}: F_{i+1} -> F_i, ``twists[i]`` the
    generator degrees of F_i. ``complete`` means the next syzygy module is 0.
    """

    module: FpModule
    differentials: list
    twists: list
    minimal: bool = True
    complete: bool = False

    @property
    def bound(self) -> int:
        return len(self.twists) - 1

    def betti(self) -> list[int]:
        return [len(t) for t in self.twists]

    def graded_betti(self) -> list[dict[int, int]]:
        out = []
        for t in self.twists:
            row: dict[int, int] = {}
            for d in t:
                row[d] = row.get(d, 0) + 1
            out.append(dict(sorted(row.items())))
        return out

    def length(self):
        """Projective dimension when the resolution is known to stop."""
        if not self.complete:
            return None
        ranks = self.betti()
        while len(ranks) > 1 and ranks[-1] == 0:
            ranks.pop()
        return len(ranks) - 1 if ranks[0] else 0

    def differential(self, i: int) -> Matrix:
        """d_i : F_i -> F_{i-1} (i >= 1)."""
        return self.differentials[i - 1]

    def check_complex(self) -> bool:
        for a, b in zip(self.differentials, self.differentials[1:]):
            if a.ncols and b.ncols and not (a @ b).is_zero():
                return False
        return True

    def check_exact(self) -> bool:
        """Syzygy certificate: ker d_i = im d_{i+1} at every internal step."""
        ring = self.module.ring
        for i in range(1, len(self.differentials)):
            d, nxt = self.differentials[i - 1], self.differentials[i]
            K = syzygies(d, self.twists[i - 1], col_degrees=self.twists[i], minimal=False)
            span = FpModule(ring, self.twists[i], nxt)
            if not all(span.in_relations(c) for c in K.cols):
                return False
        return True


class _ResolutionState:
    def __init__(self, M: FpModule):
        Mmin = minimal_presentation(M)
        self.module = M
        self.twists = [list(Mmin.degrees)]
        self.diffs: list[Matrix] = []
        self.complete = False
        if Mmin.ngens == 0:
            self.complete = True
            return
        d1 = Mmin.relations
        self.diffs.append(d1)
        self.twists.append(list(Mmin.rel_degrees))
        if d1.ncols == 0:
            self.complete = True

    def extend(self, bound: int) -> None:
        while len(self.twists) - 1 < bound and not self.complete:
            d = self.diffs[-1]
            nxt = syzygies(d, self.twists[-2], col_degrees=self.twists[-1], minimal=True)
            self.diffs.append(nxt)
            self.twists.append(column_degrees(nxt, self.twists[-1]) if nxt.ncols else [])
            if nxt.ncols == 0:
                self.complete = True


def free_resolution(M: FpModule, bound: int) -> Resolution:
    """Minimal free resolution of ``M`` through F_bound (extended lazily, cached)."""
    if bound < 0:
        raise ValueError("bound must be non-negative")
    with _lock:
        table = _caches.setdefault("resolution", {})
        st = table.get(M)
        if st is None:
            st = table[M] = _ResolutionState(M)
    with _lock:
        st.extend(bound + 1)
    twists = [tuple(t) for t in st.twists[: bound + 1]]
    diffs = list(st.diffs[:bound])
    while len(twists) < bound + 1:
        twists.append(())
    while len(diffs) < bound:
        i = len(diffs)
        diffs.append(Matrix(M.ring, len(twists[i]), []))
    complete = st.complete and len(st.twists) - 1 <= bound + 1
    return Resolution(M, diffs, twists, minimal=True, complete=complete)


def syzygy(M: FpModule, n: int) -> FpModule:
    """Omega^n M from the minimal resolution (Omega^0 M = minimal presentation)."""
    if n < 0:
        raise ValueError("n must be non-negative")
    if n == 0:
        return minimal_presentation(M)
    res = free_resolution(M, n + 1)
    tw = res.twists[n]
    if not tw:
        return FpModule.zero(M.ring)
    return FpModule(M.ring, tw, res.differentials[n])


def syzygy_sequence(M: FpModule):
    """The maps of 0 -> Omega^1 M -> F_0 -> M -> 0 (with M minimally presented)."""
    Mmin, to_min, _ = minimal_presentation_maps(M)
    res = free_resolution(M, 2)
    F0 = FpModule.free(M.ring, res.twists[0])
    Om = syzygy(M, 1)
    inc = ModuleMap(Om, F0, res.differentials[0] if Om.ngens else Matrix(M.ring, F0.ngens, []))
    proj = ModuleMap(F0, Mmin, Matrix.identity(M.ring, Mmin.ngens))
    return Om, F0, Mmin, inc, proj


# ---------------------------------------------------------------------------
# Hom, Ext, Tor


def _hom_ambient(twists: Sequence[int], N: FpModule):
    """Ambient data for Hom(F, N) with F free on ``twists``: degrees and relations."""
    g = N.ngens
    degs = [b - t for t in twists for b in N.degrees]
    rels = block_diag(N.ring, [N.relations] * len(twists)) if twists else Matrix(N.ring, 0, [])
    if not twists:
        rels = Matrix(N.ring, 0, [])
    del g
    return tuple(degs), rels


def _kernel_in(ring, amb_degrees, rels_src, L: Matrix, tgt_degrees, tgt_rels) -> Matrix:
    """Vectors of the ambient whose image under L lies in span(tgt_rels)."""
    n = len(amb_degrees)
    if L.nrows == 0:
        return Matrix.identity(ring, n)
    M = hstack(ring, L.nrows, [L, tgt_rels])
    rdeg = [d for d in column_degrees(tgt_rels, tgt_degrees)]
    Z = syzygies(M, tgt_degrees, col_degrees=list(amb_degrees) + rdeg, minimal=False)
    return Z.select_rows(list(range(n)))


def hom_presented(M: FpModule, N: FpModule) -> Presented:
    """Hom(M, N) inside Hom(F_0, N) = N^{r0}; ambient index j*g + a (j: gen of M)."""
    _same_ring(M, N)
    ring = M.ring
    g = N.ngens
    amb, rels = _hom_ambient(M.degrees, N)
    if M.ngens == 0 or g == 0:
        return Presented(FpModule.zero(ring), amb, rels, Matrix(ring, len(amb), []))
    A = M.relations
    if A.ncols == 0:
        return subquotient(ring, amb, Matrix.identity(ring, len(amb)), rels)
    L = kron_identity(A.T, g)
    tdeg, trels = _hom_ambient(M.rel_degrees, N)
    K = _kernel_in(ring, amb, rels, L, tdeg, trels)
    return subquotient(ring, amb, K, rels)


def hom(M: FpModule, N: FpModule) -> FpModule:
    _same_ring(M, N)
    return hom_presented(minimal_presentation(M), minimal_presentation(N)).module


def hom_vector_to_matrix(v: Sequence[Polynomial], M: FpModule, N: FpModule) -> Matrix:
    """Ambient Hom vector -> matrix of the map M -> N (one column per gen of M)."""
    g = N.ngens
    return Matrix(M.ring, g, [list(v[j * g : (j + 1) * g]) for j in range(M.ngens)])


def matrix_to_hom_vector(H: Matrix) -> list[Polynomial]:
    return [e for c in H.cols for e in c]


def _ext_data(M: FpModule, N: FpModule, i: int):
    """(ambient degrees, cycle vectors, boundaries+relations) for Ext^i, or None if the chain group is 0."""
    _same_ring(M, N)
    ring = M.ring
    N = minimal_presentation(N)
    res = free_resolution(M, i + 1)
    tw = res.twists
    amb, rels = _hom_ambient(tw[i], N)
    g = N.ngens
    if not tw[i] or g == 0:
        return amb, rels, None, None
    d_next = res.differentials[i]
    if d_next.ncols:
        tdeg, trels = _hom_ambient(tw[i + 1], N)
        K = _kernel_in(ring, amb, rels, kron_identity(d_next.T, g), tdeg, trels)
    else:
        K = Matrix.identity(ring, len(amb))
    allrels = rels
    if i >= 1 and tw[i - 1]:
        img = kron_identity(res.differentials[i - 1].T, g)
        allrels = hstack(ring, len(amb), [rels, img])
    return amb, rels, K, allrels


def ext_presented(M: FpModule, N: FpModule, i: int) -> Presented:
    """Ext^i(M, N) as a subquotient of Hom(F_i, N), F the minimal resolution of M."""
    amb, rels, K, allrels = _ext_data(M, N, i)
    if K is None:
        return Presented(FpModule.zero(M.ring), amb, rels, Matrix(M.ring, len(amb), []))
    return subquotient(M.ring, amb, K, allrels)


@_memo("ext_zero")
def ext_is_zero(M: FpModule, N: FpModule, i: int) -> bool:
    """Decide Ext^i(M, N) = 0 without building a presentation."""
    if (M, N, i) in _caches.get("ext", {}):
        return _caches["ext"][(M, N, i)].ngens == 0
    amb, _, K, allrels = _ext_data(M, N, i)
    if K is None:
        return True
    span = FpModule(M.ring, amb, allrels)
    return all(span.in_relations(c) for c in K.cols)


def ext(M: FpModule, N: FpModule, i: int, bound: int | None = None) -> FpModule:
    if bound is not None and i > bound:
        raise ValueError("index exceeds bound")
    return _ext_cached(M, N, i)


@_memo("ext")
def _ext_cached(M, N, i):
    return ext_presented(M, N, i).module


def tor(M: FpModule, N: FpModule, i: int) -> FpModule:
    return _tor_cached(M, N, i)


@_memo("tor")
def _tor_cached(M: FpModule, N: FpModule, i: int) -> FpModule:
    _same_ring(M, N)
    ring = M.ring
    N = minimal_presentation(N)
    g = N.ngens
    res = free_resolution(M, i + 1)
    tw = res.twists
    if not tw[i] or g == 0:
        return FpModule.zero(ring)

    def amb(tt):
        degs = tuple(t + b for t in tt for b in N.degrees)
        return degs, block_diag(ring, [N.relations] * len(tt))

    a_i, r_i = amb(tw[i])
    if i >= 1 and tw[i - 1]:
        a_prev, r_prev = amb(tw[i - 1])
        K = _kernel_in(ring, a_i, r_i, kron_identity(res.differentials[i - 1], g), a_prev, r_prev)
    else:
        K = Matrix.identity(ring, len(a_i))
    allrels = r_i
    if res.differentials[i].ncols:
        allrels = hstack(ring, len(a_i), [r_i, kron_identity(res.differentials[i], g)])
    return subquotient(ring, a_i, K, allrels).module


# ---------------------------------------------------------------------------
# annihilators, Hilbert series, dimension


def ideal_key(ring: Ring, gens: Sequence[Polynomial]) -> tuple:
    """Canonical form of the ideal (gens) + I: its reduced GB in the ambient ring."""
    allg = [g for g in gens if g.terms] + ring.ideal
    gb = ideal_gb(ring.ambient, [ring.ambient.poly(g.terms, reduce=False) for g in allg])
    return tuple(sorted(tuple(sorted(g.items())) for g in gb))


def ideal_contains(ring: Ring, gens: Sequence[Polynomial], f: Polynomial) -> bool:
    allg = [g for g in gens if g.terms] + ring.ideal
    amb = ring.ambient
    gb = ModuleGB(amb, (0,), [{(0, m): c for m, c in g.terms.items()} for g in allg], quotient=False)
    return gb.contains({(0, m): c for m, c in f.terms.items()})


def ideal_subset(ring: Ring, I: Sequence[Polynomial], J: Sequence[Polynomial]) -> bool:
    """I ⊆ J (both read in R)."""
    allg = [g for g in J if g.terms] + ring.ideal
    gb = ModuleGB(ring.ambient, (0,), [{(0, m): c for m, c in g.terms.items()} for g in allg], quotient=False)
    return all(gb.contains({(0, m): c for m, c in f.terms.items()}) for f in I)


def is_unit_ideal(ring: Ring, gens: Sequence[Polynomial]) -> bool:
    return ideal_contains(ring, gens, ring.one())


@_memo("ann")
def annihilator(M: FpModule) -> list[Polynomial]:
    """Minimal generators of ann_R(M)."""
    ring = M.ring
    M0 = minimal_presentation(M)
    r = M0.ngens
    if r == 0:
        return [ring.one()]
    degs = [d - di for di in M0.degrees for d in M0.degrees]
    z, o = ring.zero(), ring.one()
    v = [o if k == i * r + i else z for i in range(r) for k in range(i * r, (i + 1) * r)]
    rels = block_diag(ring, [M0.relations] * r)
    L = hstack(ring, r * r, [Matrix(ring, r * r, [v]), rels])
    rdeg = list(column_degrees(rels, degs))
    Z = syzygies(L, degs, col_degrees=[0] + rdeg, minimal=False)
    row = [c[0] for c in Z.cols if c[0].terms]
    if not row:
        return []
    keep = minimal_columns(Matrix(ring, 1, [[f] for f in row]), [0])
    return [row[j] for j in keep]


def _leads_by_pos(M: FpModule) -> dict[int, list[tuple]]:
    out: dict[int, list[tuple]] = {i: [] for i in range(M.ngens)}
    for pos, e in M.rel_gb().leading_terms():
        out[pos].append(e)
    return out


def hilbert_series(M: FpModule, D: int, start: int = 0) -> list[int]:
    """dim_k M_d for start <= d <= D, by counting standard monomials."""
    leads = _leads_by_pos(M)
    n = M.ring.nvars
    out = []
    for d in range(start, D + 1):
        total = 0
        for i, gd in enumerate(M.degrees):
            for u in monomials_of_degree(n, d - gd):
                if not any(divides(l, u) for l in leads[i]):
                    total += 1
        out.append(total)
    return out


def _monomial_ideal_dim(nvars: int, leads: list[tuple]):
    if any(sum(l) == 0 for l in leads):
        return NEG_INFINITY
    for size in range(nvars, -1, -1):
        for sigma in combinations(range(nvars), size):
            s = set(sigma)
            if not any(all(i in s for i, e in enumerate(l) if e) for l in leads):
                return size
    return NEG_INFINITY


def krull_dim(M: FpModule):
    """Krull dimension; NEG_INFINITY for the zero module."""
    leads = _leads_by_pos(M)
    best = NEG_INFINITY
    for i in range(M.ngens):
        d = _monomial_ideal_dim(M.ring.nvars, leads[i])
        if d is not NEG_INFINITY and (best is NEG_INFINITY or d > best):
            best = d
    return best


def degree_window(*mods: FpModule) -> tuple[int, int]:
    """Degrees where the modules' generators and relations live."""
    degs = [d for m in mods for d in (*m.degrees, *m.rel_degrees)]
    if not degs:
        return (0, 0)
    return (min(degs), max(degs))


# ---------------------------------------------------------------------------
# isomorphism testing


@dataclass
class Iso:
    map: ModuleMap
    inverse: ModuleMap
    shift: int = 0

    verdict = "Iso"


@dataclass
class NotIso:
    reason: str

    verdict = "NotIso"


@dataclass
class Unknown:
    trials: int

    verdict = "Unknown"


def _invariant_mismatch(M: FpModule, N: FpModule) -> str | None:
    if M.ngens == 0 or N.ngens == 0:
        if M.ngens != N.ngens:
            return "one module is zero and the other is not"
        return None
    lo, hi = degree_window(M, N)
    hi += M.ring.nvars + 2
    if hilbert_series(M, hi, lo) != hilbert_series(N, hi, lo):
        return f"Hilbert series differ on degrees {lo}..{hi}"
    if sorted(M.degrees) != sorted(N.degrees) or sorted(M.rel_degrees) != sorted(N.rel_degrees):
        return "graded Betti numbers differ"
    if ideal_key(M.ring, annihilator(M)) != ideal_key(M.ring, annihilator(N)):
        return "annihilators differ"
    return None


def _degree0_spanning_set(H: Presented) -> list[Matrix]:
    """Ambient vectors spanning Hom(M, N)_0 over k."""
    ring = H.module.ring
    out = []
    for s, ds in enumerate(H.module.degrees):
        if ds > 0:
            continue
        col = H.emb.cols[s]
        for u in monomials_of_degree(ring.nvars, -ds):
            mono = ring.poly({u: 1})
            v = [e * mono for e in col]
            if any(e.terms for e in v):
                out.append(v)
    return out


def inverse_map(f: ModuleMap) -> ModuleMap | None:
    """Two-sided inverse of an isomorphism, verified; None if f is not invertible."""
    src, tgt = f.source, f.target
    ring = src.ring
    if tgt.ngens == 0:
        G = Matrix(ring, src.ngens, [])
    else:
        A = hstack(ring, tgt.ngens, [f.matrix, tgt.relations])
        P = Presented(tgt, tgt.degrees, Matrix(ring, tgt.ngens, []), A)
        gb = ModuleGB(
            ring,
            tgt.degrees,
            [col_to_vec(c) for c in A.cols],
            track=True,
            gen_degrees=list(src.degrees) + list(tgt.rel_degrees),
        )
        del P
        cols = []
        for c in Matrix.identity(ring, tgt.ngens).cols:
            cof = gb.lift(col_to_vec(c))
            if cof is None:
                return None
            cols.append(vec_to_col(ring, cof, src.ngens))
        G = Matrix(ring, src.ngens, cols)
    try:
        g = ModuleMap(tgt, src, G)
    except NotWellDefined:
        return None
    if not (g @ f).equals(ModuleMap.identity(src)) or not (f @ g).equals(ModuleMap.identity(tgt)):
        return None
    return g


def is_isomorphic(M: FpModule, N: FpModule, trials: int = 64, seed: int = 0, allow_shift: bool = False):
    """Three-valued graded isomorphism test.

    ``Iso`` carries a verified map with a verified two-sided inverse,
    ``NotIso`` a differing invariant, ``Unknown`` means the random search over
    degree-0 maps found nothing in ``trials`` attempts (retry with a new seed).
    With ``allow_shift`` the second module is first shifted so that the lowest
    generator degrees agree; ``Iso.shift`` records the twist used.
    """
    _same_ring(M, N)
    shift = 0
    M0, to_m, _ = minimal_presentation_maps(M)
    N0 = minimal_presentation(N)
    if allow_shift and M0.ngens and N0.ngens:
        shift = min(M0.degrees) - min(N0.degrees)
        N = N.shift(-shift)
    N0, _, from_n = minimal_presentation_maps(N)
    reason = _invariant_mismatch(M0, N0)
    if reason:
        return NotIso(reason)
    if M0.ngens == 0:
        return Iso(ModuleMap.zero(M, N), ModuleMap.zero(N, M), shift)
    H = hom_presented(M0, N0)
    span = _degree0_spanning_set(H)
    if not span:
        return NotIso("no nonzero homomorphism of degree 0")
    rng = random.Random(seed)
    p = M.ring.p
    for _ in range(trials):
        coeffs = [rng.randrange(p) for _ in span]
        v = [M.ring.zero()] * len(span[0])
        for c, s in zip(coeffs, span):
            if c:
                v = [a + b * c for a, b in zip(v, s)]
        cand = ModuleMap(M0, N0, hom_vector_to_matrix(v, M0, N0))
        if not cand.is_surjective():
            continue
        inv = inverse_map(cand)
        if inv is None:
            continue
        fwd = from_n @ cand @ to_m
        Mx, _, from_m = minimal_presentation_maps(M)
        _, to_n, _ = minimal_presentation_maps(N)
        bwd = from_m @ inv @ to_n
        fwd = ModuleMap(M, N, fwd.matrix)
        bwd = ModuleMap(N, M, bwd.matrix)
        if (bwd @ fwd).equals(ModuleMap.identity(M)) and (fwd @ bwd).equals(ModuleMap.identity(N)):
            return Iso(fwd, bwd, shift)
    return Unknown(trials)
