"""Degreewise linear algebra over F_p, used to cross-check the module engine.

Everything here works in the ambient polynomial ring S, one degree at a time,
with the defining ideal of R carried as an extra subspace. No Groebner bases
are used: a graded piece of ``(S^g / (relations + I S^g))`` is the span of all
monomial vectors of that degree modulo the span of all monomial multiples of
the relations.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .module import FpModule, Resolution, free_resolution
from .poly import Ring, monomials_of_degree


def rank_mod_p(rows: np.ndarray, p: int) -> int:
    """Rank of an integer matrix over F_p by Gaussian elimination."""
    if rows.size == 0:
        return 0
    A = np.array(rows, dtype=np.int64) % p
    nr, nc = A.shape
    r = 0
    for c in range(nc):
        if r == nr:
            break
        nz = np.nonzero(A[r:, c])[0]
        if nz.size == 0:
            continue
        piv = r + nz[0]
        if piv != r:
            A[[r, piv]] = A[[piv, r]]
        inv = pow(int(A[r, c]), -1, p)
        A[r] = (A[r] * inv) % p
        col = A[:, c].copy()
        col[r] = 0
        mask = col != 0
        if mask.any():
            A[mask] = (A[mask] - np.outer(col[mask], A[r])) % p
        r += 1
    return r


class _Space:
    """Index of the monomial basis of (S^g)_e for a free S-module with twists."""

    def __init__(self, nvars: int, twists: Sequence[int], e: int):
        self.index: dict[tuple, int] = {}
        for a, t in enumerate(twists):
            for m in monomials_of_degree(nvars, e - t):
                self.index[(a, m)] = len(self.index)

    @property
    def dim(self) -> int:
        return len(self.index)


def _mul(u: tuple, m: tuple) -> tuple:
    return tuple(a + b for a, b in zip(u, m))


class DegreewiseOracle:
    """Graded pieces of quotients of free S-modules and maps between them."""

    def __init__(self, ring: Ring):
        self.ring = ring
        self.p = ring.p
        self.n = ring.nvars
        # ideal generators as raw term dicts of the ambient ring
        self.ideal = [dict(g) for g in ring.gb]

    def _vec(self, space: _Space, parts: dict) -> np.ndarray:
        v = np.zeros(space.dim, dtype=np.int64)
        for key, c in parts.items():
            v[space.index[key]] = (v[space.index[key]] + c) % self.p
        return v

    def relation_space(self, twists: Sequence[int], relations: Sequence[dict], e: int) -> np.ndarray:
        """Rows spanning (relations + I S^g)_e inside (S^g)_e.

        ``relations`` are vectors ``{(a, monomial): coeff}`` in the free module.
        """
        sp = _Space(self.n, twists, e)
        rows = []
        gens = list(relations)
        for a in range(len(twists)):
            for g in self.ideal:
                gens.append({(a, m): c for m, c in g.items()})
        for r in gens:
            if not r:
                continue
            (a0, m0) = next(iter(r))
            deg = twists[a0] + sum(m0)
            for u in monomials_of_degree(self.n, e - deg):
                parts: dict = {}
                for (a, m), c in r.items():
                    key = (a, _mul(m, u))
                    parts[key] = (parts.get(key, 0) + c) % self.p
                rows.append(self._vec(sp, parts))
        if not rows:
            return np.zeros((0, sp.dim), dtype=np.int64)
        return np.array(rows)

    def quotient_dim(self, twists, relations, e: int) -> int:
        sp = _Space(self.n, twists, e)
        return sp.dim - rank_mod_p(self.relation_space(twists, relations, e), self.p)

    def map_rows(self, src_twists, tgt_twists, entries: dict, e: int) -> np.ndarray:
        """Image rows of the basis of (S^src)_e under a matrix.

        ``entries[(i, j)]`` is the raw term dict of the entry sending source
        basis vector j to target component i.
        """
        src = _Space(self.n, src_twists, e)
        tgt = _Space(self.n, tgt_twists, e)
        rows = []
        for (j, m) in src.index:
            parts: dict = {}
            for i in range(len(tgt_twists)):
                f = entries.get((i, j))
                if not f:
                    continue
                for mm, c in f.items():
                    key = (i, _mul(m, mm))
                    parts[key] = (parts.get(key, 0) + c) % self.p
            rows.append(self._vec(tgt, parts))
        if not rows:
            return np.zeros((0, tgt.dim), dtype=np.int64)
        return np.array(rows)

    def _stack(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        if a.shape[0] == 0:
            return b
        if b.shape[0] == 0:
            return a
        return np.vstack([a, b])

    def kernel_dim(self, src, tgt, entries: dict, e: int) -> int:
        """dim ker(A/U -> A'/U'); ``src``/``tgt`` are (twists, relations) pairs."""
        (st, sr), (tt, tr) = src, tgt
        U = self.relation_space(st, sr, e)
        U2 = self.relation_space(tt, tr, e)
        F = self.map_rows(st, tt, entries, e)
        dimA = _Space(self.n, st, e).dim
        rU = rank_mod_p(U, self.p)
        rU2 = rank_mod_p(U2, self.p)
        return dimA - (rank_mod_p(self._stack(F, U2), self.p) - rU2) - rU

    def image_dim(self, src, tgt, entries: dict, e: int) -> int:
        (st, _), (tt, tr) = src, tgt
        U = self.relation_space(tt, tr, e)
        G = self.map_rows(st, tt, entries, e)
        return rank_mod_p(self._stack(G, U), self.p) - rank_mod_p(U, self.p)

    def homology_dim(self, prev, mid, nxt, e: int, f_in: dict | None, f_out: dict | None) -> int:
        """dim of ker(mid -> nxt) / im(prev -> mid) in degree e."""
        if f_out is None:
            U = self.relation_space(*mid, e)
            k = _Space(self.n, mid[0], e).dim - rank_mod_p(U, self.p)
        else:
            k = self.kernel_dim(mid, nxt, f_out, e)
        if f_in is None:
            return k
        return k - self.image_dim(prev, mid, f_in, e)


def _entries_of_transpose_kron(d, g: int) -> dict:
    """Entries of d^T ⊗ I_g as raw term dicts, index (i*g + a, j*g + a)."""
    out = {}
    for l, col in enumerate(d.cols):
        for j, f in enumerate(col):
            if f.terms:
                for a in range(g):
                    out[(l * g + a, j * g + a)] = dict(f.terms)
    return out


def _hom_twists(twists, N: FpModule):
    return [b - t for t in twists for b in N.degrees]


def _hom_rels(twists, N: FpModule):
    g = N.ngens
    rels = []
    for j in range(len(twists)):
        for col in N.relations.cols:
            v = {}
            for a, f in enumerate(col):
                for m, c in f.terms.items():
                    v[(j * g + a, m)] = c
            rels.append(v)
    return rels


def ext_dims(M: FpModule, N: FpModule, i: int, lo: int, hi: int, res: Resolution | None = None) -> list[int]:
    """dim_k Ext^i(M, N)_d for lo <= d <= hi via Hom(F_•, N) built degreewise.

    In degree d, Hom(R(-t), N)_d = N_{t+d}; we store that as the degree-d
    piece of N(t), i.e. the free module with twists b - t.
    """
    ring = M.ring
    orc = DegreewiseOracle(ring)
    if res is None:
        res = free_resolution(M, i + 1)
    g = N.ngens
    tw = res.twists
    mid = (_hom_twists(tw[i], N), _hom_rels(tw[i], N))
    nxt = (_hom_twists(tw[i + 1], N), _hom_rels(tw[i + 1], N)) if i + 1 < len(tw) else None
    prev = (_hom_twists(tw[i - 1], N), _hom_rels(tw[i - 1], N)) if i >= 1 else None
    f_out = _entries_of_transpose_kron(res.differentials[i], g) if nxt and tw[i + 1] else None
    f_in = _entries_of_transpose_kron(res.differentials[i - 1], g) if prev and tw[i - 1] else None
    if not tw[i] or g == 0:
        return [0] * (hi - lo + 1)
    return [orc.homology_dim(prev, mid, nxt, d, f_in, f_out) for d in range(lo, hi + 1)]


def hilbert_dims(M: FpModule, lo: int, hi: int) -> list[int]:
    """dim_k M_d computed from the presentation without Groebner bases."""
    orc = DegreewiseOracle(M.ring)
    rels = []
    for col in M.relations.cols:
        v = {}
        for a, f in enumerate(col):
            for m, c in f.terms.items():
                v[(a, m)] = c
        rels.append(v)
    return [orc.quotient_dim(M.degrees, rels, d) for d in range(lo, hi + 1)]


def resolution_exact_degreewise(res: Resolution, lo: int, hi: int) -> bool:
    """Check d_i d_{i+1} = 0 and exactness of F_• -> M -> 0 degree by degree."""
    M = res.module
    orc = DegreewiseOracle(M.ring)

    def entries(d):
        out = {}
        for j, col in enumerate(d.cols):
            for i, f in enumerate(col):
                if f.terms:
                    out[(i, j)] = dict(f.terms)
        return out

    spaces = [(list(t), []) for t in res.twists]
    target = hilbert_dims(M, lo, hi)
    for e in range(lo, hi + 1):
        # H_0 must be M
        if res.twists[0]:
            h0 = orc.homology_dim(spaces[1], spaces[0], None, e, entries(res.differentials[0]) if res.twists[1] else None, None)
        else:
            h0 = 0
        if h0 != target[e - lo]:
            return False
        for i in range(1, len(res.twists) - 1):
            if not res.twists[i]:
                continue
            d_out = entries(res.differentials[i - 1]) if res.twists[i - 1] else None
            d_in = entries(res.differentials[i]) if res.twists[i + 1] else None
            h = orc.homology_dim(spaces[i + 1], spaces[i], spaces[i - 1], e, d_in, d_out)
            if h != 0:
                return False
    return True
