"""Duality against a semidualizing module C and the constructions built on it.

Every "Ext^{>n} = 0" statement is checked only for indices up to a bound,
and every verdict records the bound it was certified to.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Any, Sequence

from .errors import ABViolation, NotExact, UncertifiedDualizer, ZeroModule
from .matrix import Matrix, hstack, kron_identity
from .module import (
    FpModule,
    ModuleMap,
    Presented,
    certify_exact,
    certify_ses,
    degree_window,
    direct_sum,
    ext,
    ext_is_zero,
    hilbert_series,
    hom_presented,
    induced_map,
    is_isomorphic,
    minimal_presentation,
    minimal_presentation_maps,
    presented,
    subquotient,
    syzygy,
    _hom_ambient,
    _kernel_in,
    _memo,
)
from .groebner import column_degrees, lift
from .poly import Ring
from .sentinels import INFINITY

DEFAULT_BOUND = 20


# ---------------------------------------------------------------------------
# verdicts


@dataclass(frozen=True)
class Failure:
    condition: str
    index: int | None = None
    module: FpModule | None = None
    detail: str = ""

    def describe(self) -> str:
        out = self.condition
        if self.index is not None:
            out += f"[{self.index}]"
        if self.detail:
            out += f": {self.detail}"
        return out


@dataclass(frozen=True, eq=False)
class BoundedVerdict:
    """A value certified up to ``bound``; ``failures`` is empty on success."""

    value: Any
    bound: int
    failures: tuple = ()
    checks: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return not self.failures

    @property
    def witness(self) -> Failure | None:
        return self.failures[0] if self.failures else None

    @property
    def failed_conditions(self) -> list[str]:
        return [f.condition for f in self.failures]

    def __repr__(self):
        if self.failures:
            return f"Fail({', '.join(f.describe() for f in self.failures)}; bound={self.bound})"
        return f"{self.value} (bound={self.bound})"


class Dualizer:
    """A candidate semidualizing module together with its certification state."""

    def __init__(self, module: FpModule, verdict: BoundedVerdict | None = None):
        self.module = module
        self.verdict = verdict

    @classmethod
    def certified(cls, module: FpModule, bound: int = DEFAULT_BOUND) -> "Dualizer":
        d = cls(module)
        d.certify(bound)
        return d

    @classmethod
    def ring(cls, ring: Ring, bound: int = DEFAULT_BOUND) -> "Dualizer":
        return cls.certified(FpModule.free(ring), bound)

    @property
    def status(self) -> str:
        if self.verdict is None:
            return "Unchecked"
        if self.verdict.ok:
            return f"SemidualizingUpTo({self.verdict.bound})"
        return "Failed"

    def certify(self, bound: int = DEFAULT_BOUND) -> BoundedVerdict:
        self.verdict = is_semidualizing(self.module, bound)
        return self.verdict

    def require(self, bound: int) -> None:
        if self.verdict is None or not self.verdict.ok or self.verdict.bound < bound:
            raise UncertifiedDualizer(f"dualizer is {self.status}; needs certification up to {bound}")

    @property
    def base(self) -> FpModule:
        return minimal_presentation(self.module)


def _C(C) -> FpModule:
    return C.base if isinstance(C, Dualizer) else minimal_presentation(C)


# ---------------------------------------------------------------------------
# duals and homothety


def dual(M: FpModule, C) -> FpModule:
    """M† = Hom(M, C)."""
    return _dual_cached(minimal_presentation(M), _C(C))


@_memo("dual")
def _dual_cached(M, C0):
    return hom_presented(M, C0).module


def dual_presented(M: FpModule, C) -> Presented:
    return hom_presented(M, _C(C))


def hom_of_map(f: ModuleMap, C, src: Presented | None = None, tgt: Presented | None = None):
    """f†: Hom(target, C) -> Hom(source, C) for f: source -> target."""
    C0 = _C(C)
    g = C0.ngens
    Ht = tgt or hom_presented(f.target, C0)
    Hs = src or hom_presented(f.source, C0)
    L = kron_identity(f.matrix.T, g)
    return induced_map(Ht, Hs, L), Ht, Hs


def homothety_map(M: FpModule, C) -> tuple[ModuleMap, bool]:
    """The evaluation map M -> M†† and whether it is an isomorphism."""
    C0 = _C(C)
    g = C0.ngens
    M0, to_min, _ = minimal_presentation_maps(M)
    H1 = hom_presented(M0, C0)
    H2 = hom_presented(H1.module, C0)
    ring = M.ring
    q = H1.module.ngens
    cols = []
    for j in range(M0.ngens):
        cols.append([H1.emb.cols[s][j * g + a] for s in range(q) for a in range(g)])
    L = Matrix(ring, q * g, cols)
    eta0 = ModuleMap(M0, H2.module, H2.coords(L))
    eta = ModuleMap(M, H2.module, (eta0 @ to_min).matrix)
    return eta, eta.is_iso()


def _ring_homothety(C0: FpModule) -> ModuleMap:
    """R -> Hom(C, C), 1 -> identity."""
    ring = C0.ring
    r = C0.ngens
    H = hom_presented(C0, C0)
    z, o = ring.zero(), ring.one()
    ident = [o if k == j * r + j else z for j in range(r) for k in range(j * r, (j + 1) * r)]
    R = FpModule.free(ring)
    return ModuleMap(R, H.module, H.coords(Matrix(ring, r * r, [ident])))


# ---------------------------------------------------------------------------
# certification


def is_semidualizing(C: FpModule, bound: int = DEFAULT_BOUND) -> BoundedVerdict:
    """Ext^i(C, C) = 0 for 1 <= i <= bound and R -> Hom(C, C) an isomorphism.

    All violated conditions are reported: the first nonvanishing Ext index
    (with the Ext module as witness) and, separately, a homothety failure.
    """
    C0 = minimal_presentation(C)
    if C0.ngens == 0:
        raise ZeroModule("the zero module is not a semidualizing candidate")
    failures = []
    for i in range(1, bound + 1):
        if not ext_is_zero(C0, C0, i):
            failures.append(Failure("ext", i, ext(C0, C0, i), f"Ext^{i}(C,C) != 0"))
            break
    eta = _ring_homothety(C0)
    if not eta.is_iso():
        failures.append(Failure("homothety", None, eta.target, "R -> Hom(C,C) is not an isomorphism"))
    value = "Fail" if failures else "SemidualizingUpTo"
    return BoundedVerdict(value, bound, tuple(failures))


def _first_nonvanishing(M: FpModule, C0: FpModule, bound: int, start: int = 1) -> int | None:
    for i in range(start, bound + 1):
        if not ext_is_zero(M, C0, i):
            return i
    return None


def is_totally_reflexive(X: FpModule, C: Dualizer, bound: int = DEFAULT_BOUND) -> BoundedVerdict:
    """Conditions: Ext^{1..bound}(X, C) = 0, Ext^{1..bound}(X†, C) = 0, homothety iso."""
    C.require(bound)
    C0 = C.base
    X0 = minimal_presentation(X)
    i = _first_nonvanishing(X0, C0, bound)
    if i is not None:
        return BoundedVerdict("Fail", bound, (Failure("condition 1", i, ext(X0, C0, i), f"Ext^{i}(X,C) != 0"),))
    Xd = dual(X0, C)
    i = _first_nonvanishing(Xd, C0, bound)
    if i is not None:
        return BoundedVerdict("Fail", bound, (Failure("condition 2", i, ext(Xd, C0, i), f"Ext^{i}(X+,C) != 0"),))
    eta, iso = homothety_map(X0, C)
    if not iso:
        return BoundedVerdict("Fail", bound, (Failure("condition 3", None, eta.target, "X -> X++ is not an isomorphism"),))
    return BoundedVerdict("Pass", bound)


def depth(M: FpModule) -> int:
    """min{i : Ext^i(k, M) != 0}."""
    M0 = minimal_presentation(M)
    if M0.ngens == 0:
        raise ZeroModule("depth of the zero module is undefined")
    k = FpModule.residue_field(M.ring)
    for i in range(M.ring.nvars + 1):
        if not ext_is_zero(k, M0, i):
            return i
    raise AssertionError("Ext^i(k, M) vanished for all i <= dim; engine bug")


def ext_vanishing_index(M: FpModule, Bs: Sequence[FpModule], bound: int):
    """Least n with Ext^i(M, B) = 0 for n < i <= bound and all B, or INFINITY."""
    M0 = minimal_presentation(M)
    last = 0
    for B in Bs:
        B0 = minimal_presentation(B)
        for i in range(bound, last, -1):
            if not ext_is_zero(M0, B0, i):
                last = i
                break
    return INFINITY if last == bound and bound > 0 else last


def ext_vanishing_dim(M: FpModule, B: Sequence[FpModule], bound: int = DEFAULT_BOUND) -> BoundedVerdict:
    if not B:
        raise ValueError("B must be nonempty")
    for b in B:
        if b.ring != M.ring:
            from .errors import RingMismatch

            raise RingMismatch("modules live over different rings")
    return BoundedVerdict(ext_vanishing_index(M, B, bound), bound)


def gc_dim(X: FpModule, C: Dualizer, bound: int = DEFAULT_BOUND) -> BoundedVerdict:
    """G_C-dimension certified to ``bound`` with an Auslander-Buchsbaum cross-check."""
    C.require(bound)
    X0 = minimal_presentation(X)
    if X0.ngens == 0:
        return BoundedVerdict(0, bound, checks={"ab_check": "skipped (zero module)"})
    dR = depth(FpModule.free(X.ring))
    # a finite G_C-dimension never exceeds depth R, so a nonzero Ext above it
    # settles the infinite case without scanning down from the bound
    i = _first_nonvanishing(X0, C.base, bound, start=dR + 1)
    if i is not None:
        return BoundedVerdict(INFINITY, bound, checks={"ext_vanishing": INFINITY, "nonzero_above_depth": i})
    n0 = ext_vanishing_index(X0, [C.base], bound)
    if n0 is INFINITY:
        return BoundedVerdict(INFINITY, bound, checks={"ext_vanishing": INFINITY})
    for n in range(n0, bound + 1):
        Om = syzygy(X0, n)
        if Om.ngens == 0 or is_totally_reflexive(Om, C, bound).ok:
            dX = depth(X0)
            if n + dX != dR:
                raise ABViolation(f"G_C-dim {n} + depth {dX} != depth R {dR}")
            return BoundedVerdict(
                n, bound, checks={"ext_vanishing": n0, "ab_check": f"{n} + {dX} = {dR}", "reflexive_syzygy": n}
            )
    return BoundedVerdict(INFINITY, bound, checks={"ext_vanishing": n0})


# ---------------------------------------------------------------------------
# transposes


@dataclass
class TransposeResult:
    module: FpModule
    presentation_used: Matrix
    flavor: str
    presented: Presented | None = None


def _dual_free(twists: Sequence[int], C0: FpModule):
    return _hom_ambient(list(twists), C0)


def _transpose_from(d: Matrix, src_twists, tgt_twists, C0: FpModule) -> Presented:
    """coker(d†) for d: F1 -> F0 free, inside F1† = C^{rank F1}."""
    ring = C0.ring
    amb1, rels1 = _dual_free(src_twists, C0)
    if not amb1:
        return Presented(FpModule.zero(ring), amb1, rels1, Matrix(ring, 0, []))
    g = C0.ngens
    img = kron_identity(d.T, g) if tgt_twists else Matrix(ring, len(amb1), [])
    allrels = hstack(ring, len(amb1), [rels1, img])
    return presented(FpModule(ring, amb1, allrels))


def transpose(X: FpModule, C) -> TransposeResult:
    """⊺X = coker(d1†) for the minimal presentation d1 of X."""
    C0 = _C(C)
    X0 = minimal_presentation(X)
    P = _transpose_from(X0.relations, X0.rel_degrees, X0.degrees, C0)
    return TransposeResult(minimal_presentation(P.module), X0.relations, "projective", P)


def transpose_wrt(X: FpModule, pres, C) -> TransposeResult:
    """Transpose from a caller-supplied presentation A1 -f-> A0 -e-> X -> 0."""
    f, e = pres
    if e.target != X:
        raise NotExact("presentation does not end at X")
    if not e.is_surjective() or not _exact(f, e):
        raise NotExact("supplied presentation is not exact")
    fd, Ht, Hs = hom_of_map(f, C)
    coker = fd.cokernel()
    return TransposeResult(minimal_presentation(coker.module), f.matrix, "A-presentation", coker)


def _exact(f: ModuleMap, g: ModuleMap) -> bool:
    from .module import is_exact_at

    return is_exact_at(f, g)


@dataclass
class TransposeDecomposition:
    E: FpModule
    T: FpModule
    S: FpModule
    maps: tuple
    exact: list
    presented: tuple

    @property
    def certified(self) -> bool:
        return all(self.exact)

    def hilbert_identity(self, D: int, start: int | None = None) -> bool:
        lo = start if start is not None else min(degree_window(self.E, self.T, self.S)[0], 0) - 2
        hT = hilbert_series(self.T, D, lo)
        hE = hilbert_series(self.E, D, lo)
        hS = hilbert_series(self.S, D, lo)
        return all(t == e + s for t, e, s in zip(hT, hE, hS))


def transpose_decompose(X: FpModule, C) -> TransposeDecomposition:
    """0 -> Ext^1(X, C) -> ⊺X -> Ω⊺ΩX -> 0 built from F2 -g-> F1 -f-> F0.

    T = F1†/im f†, E = ker g†/im f† inside T, and S = im g† ⊆ F2†; the maps
    are the inclusion E -> T and the map induced by g†.
    """
    from .module import free_resolution

    C0 = _C(C)
    ring = X.ring
    g = C0.ngens
    res = free_resolution(X, 2)
    tw = res.twists
    f, gg = res.differentials[0], res.differentials[1]
    amb1, rels1 = _dual_free(tw[1], C0)
    amb2, rels2 = _dual_free(tw[2], C0)
    n1 = len(amb1)
    imf = kron_identity(f.T, g) if tw[0] and tw[1] else Matrix(ring, n1, [])
    allrels = hstack(ring, n1, [rels1, imf]) if n1 else Matrix(ring, 0, [])
    T = presented(FpModule(ring, amb1, allrels))
    if tw[2] and n1:
        gd = kron_identity(gg.T, g)
        K = _kernel_in(ring, amb1, rels1, gd, amb2, rels2)
    else:
        gd = Matrix(ring, len(amb2), [[ring.zero()] * len(amb2) for _ in range(n1)])
        K = Matrix.identity(ring, n1)
    E = subquotient(ring, amb1, K, allrels)
    S = subquotient(ring, amb2, gd, rels2)
    iota = induced_map(E, T, Matrix.identity(ring, n1))
    pi = induced_map(T, S, gd)
    exact = certify_exact([iota, pi])
    return TransposeDecomposition(E.module, T.module, S.module, (iota, pi), exact, (E, T, S))


@dataclass
class SixTerm:
    modules: tuple  # Z†, Y†, X†, ⊺Z, ⊺Y, ⊺X
    maps: tuple
    exact: list
    presentations: dict

    @property
    def certified(self) -> bool:
        return all(self.exact)

    def hilbert_series(self, D: int, start: int = -5) -> list[list[int]]:
        return [hilbert_series(M, D, start) for M in self.modules]


def _lift_cols(A: Matrix, B: Matrix, row_degrees, col_degrees) -> Matrix:
    X = lift(A, B, row_degrees, col_degrees)
    if X is None:
        raise NotExact("lifting failed; the sequence is not exact")
    return X


def horseshoe(f: ModuleMap, g: ModuleMap):
    """Compatible presentations for 0 -> X -f-> Y -g-> Z -> 0.

    Returns (Y', pi, h) where Y' = coker [[d_X, -h], [0, d_Z]] on F0X ⊕ F0Z
    and pi: Y' -> Y is a verified isomorphism.
    """
    X, Y, Z = f.source, f.target, g.target
    ring = X.ring
    # lift Z generators to Y
    A = hstack(ring, Z.ngens, [g.matrix, Z.relations])
    s = _lift_cols(A, Matrix.identity(ring, Z.ngens), Z.degrees, list(Y.degrees) + list(Z.rel_degrees))
    s = s.select_rows(list(range(Y.ngens)))
    # s·d_Z lies in f(X): solve f(h) = s·d_Z mod Y relations
    B = hstack(ring, Y.ngens, [f.matrix, Y.relations])
    sd = s @ Z.relations
    h = _lift_cols(B, sd, Y.degrees, list(X.degrees) + list(Y.rel_degrees)) if sd.ncols else Matrix(ring, 0, [])
    h = h.select_rows(list(range(X.ngens))) if sd.ncols else Matrix(ring, X.ngens, [])
    nX, nZ = X.ngens, Z.ngens
    z = ring.zero()
    cols = [list(c) + [z] * nZ for c in X.relations.cols]
    cols += [[-e for e in hc] + list(zc) for hc, zc in zip(h.cols, Z.relations.cols)]
    Yp = FpModule(ring, list(X.degrees) + list(Z.degrees), Matrix(ring, nX + nZ, cols))
    pi = ModuleMap(Yp, Y, hstack(ring, Y.ngens, [f.matrix, s]))
    if not pi.is_iso():
        raise NotExact("horseshoe presentation does not present Y")
    return Yp, pi, h


def transpose_ses(f: ModuleMap, g: ModuleMap, C) -> SixTerm:
    """0 -> Z† -> Y† -> X† -> ⊺Z -> ⊺Y -> ⊺X -> 0 for 0 -> X -> Y -> Z -> 0."""
    certify_ses(f, g)
    C0 = _C(C)
    gC = C0.ngens
    X, Z = f.source, g.target
    ring = X.ring
    Yp, _, h = horseshoe(f, g)
    nX, nZ = X.ngens, Z.ngens
    Zd = hom_presented(Z, C0)
    Yd = hom_presented(Yp, C0)
    Xd = hom_presented(X, C0)
    tZ = _transpose_from(Z.relations, Z.rel_degrees, Z.degrees, C0)
    tY = _transpose_from(Yp.relations, Yp.rel_degrees, Yp.degrees, C0)
    tX = _transpose_from(X.relations, X.rel_degrees, X.degrees, C0)
    a0X, a0Z = nX * gC, nZ * gC
    a1X, a1Z = len(X.relations.cols) * gC, len(Z.relations.cols) * gC

    def block(rows: int, cols: int, r0: int, c0: int, n: int) -> Matrix:
        z, o = ring.zero(), ring.one()
        return Matrix(ring, rows, [[o if (i - r0) == (j - c0) and r0 <= i < r0 + n else z for i in range(rows)] for j in range(cols)])

    m1 = induced_map(Zd, Yd, block(a0X + a0Z, a0Z, a0X, 0, a0Z))
    m2 = induced_map(Yd, Xd, block(a0X, a0X + a0Z, 0, 0, a0X))
    L3 = kron_identity(h.T, gC) if h.ncols else Matrix(ring, a1Z, [[ring.zero()] * a1Z for _ in range(a0X)])
    m3 = induced_map(Xd, tZ, L3)
    m4 = induced_map(tZ, tY, block(a1X + a1Z, a1Z, a1X, 0, a1Z))
    m5 = induced_map(tY, tX, block(a1X, a1X + a1Z, 0, 0, a1X))
    maps = (m1, m2, m3, m4, m5)
    exact = certify_exact(list(maps))
    mods = (Zd.module, Yd.module, Xd.module, tZ.module, tY.module, tX.module)
    return SixTerm(mods, maps, exact, {"Y": Yp, "h": h})


# ---------------------------------------------------------------------------
# cosyzygies, words, stable equivalence


def cosyzygy(M: FpModule, C) -> FpModule:
    """(Ω(M†))†."""
    return minimal_presentation(dual(syzygy(dual(M, C), 1), C))


def _same_class(a: FpModule, b: FpModule, seed: int) -> bool:
    if a == b:
        return True
    return is_isomorphic(a, b, seed=seed).verdict == "Iso"


def w_words(C, k: int, seed: int = 0) -> list[FpModule]:
    """Modules reachable from R by words of length <= k in {Ω, †}, up to isomorphism."""
    C0 = _C(C)
    ring = C0.ring
    found = [FpModule.free(ring)]
    frontier = list(found)
    for _ in range(k):
        nxt = []
        for M in frontier:
            for N in (syzygy(M, 1), dual(M, C0)):
                N = minimal_presentation(N)
                if N.ngens == 0:
                    continue
                if any(_same_class(N, F, seed) for F in found):
                    continue
                found.append(N)
                nxt.append(N)
        frontier = nxt
    return found


@dataclass
class Yes:
    P: tuple
    Q: tuple
    iso: Any

    verdict = "Yes"


@dataclass
class Unknown:
    tried: int

    verdict = "Unknown"


def _summand_window(X: FpModule, Y: FpModule) -> range:
    degs = [d for M in (X, Y) for d in M.degrees]
    hi_degs = [d for M in (X, Y) for d in (*M.degrees, *M.rel_degrees)]
    if not degs:
        return range(0, 1)
    return range(min(degs) - 1, max(hi_degs) + 2)


def stable_equiv_mod_add(X: FpModule, Y: FpModule, C, summand_bound: int = 4, seed: int = 0, max_iso_tests: int = 200):
    """Search for X ⊕ P ≅ Y ⊕ Q with P, Q sums of twisted copies of R and C.

    Never answers No: exhausting the search gives ``Unknown``.
    """
    C0 = _C(C)
    ring = X.ring
    X0, Y0 = minimal_presentation(X), minimal_presentation(Y)
    iso = is_isomorphic(X0, Y0, seed=seed)
    if iso.verdict == "Iso":
        return Yes((), (), iso)
    window = _summand_window(X0, Y0)
    bases = [("R", FpModule.free(ring))]
    if C0 != FpModule.free(ring):
        bases.append(("C", C0))
    cands = [(name, t, B.shift(-t)) for t in window for name, B in bases]
    lo = min(window) - 1
    hi = max(d for M in (X0, Y0, C0) for d in (*M.degrees, *M.rel_degrees, 0)) + max(window) + ring.nvars + 2

    def hs(M):
        return tuple(hilbert_series(M, hi, lo))

    cand_hs = [hs(c[2]) for c in cands]
    zero = tuple([0] * (hi - lo + 1))

    def multisets(size):
        for combo in itertools.combinations_with_replacement(range(len(cands)), size):
            yield combo

    def total(combo):
        out = list(zero)
        for i in combo:
            out = [a + b for a, b in zip(out, cand_hs[i])]
        return tuple(out)

    hx, hy = hs(X0), hs(Y0)
    by_hs: dict[tuple, list[tuple]] = {}
    for size in range(summand_bound + 1):
        for q in multisets(size):
            by_hs.setdefault(total(q), []).append(q)
    tried = 0
    pairs = []
    for size in range(summand_bound + 1):
        for p in multisets(size):
            need = tuple(a + b - c for a, b, c in zip(hx, total(p), hy))
            for q in by_hs.get(need, []):
                if set(p) & set(q):
                    continue
                pairs.append((len(p) + len(q), p, q))
    pairs.sort(key=lambda t: (t[0], t[1], t[2]))
    for _, p, q in pairs:
        if tried >= max_iso_tests:
            break
        tried += 1
        XP = direct_sum(X0, *[cands[i][2] for i in p]) if p else X0
        YQ = direct_sum(Y0, *[cands[i][2] for i in q]) if q else Y0
        res = is_isomorphic(XP, YQ, seed=seed)
        if res.verdict == "Iso":
            desc = lambda idx: tuple(f"{cands[i][0]}({-cands[i][1]})" for i in idx)
            return Yes(desc(p), desc(q), res)
    return Unknown(tried)
