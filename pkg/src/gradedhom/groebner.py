"""Buchberger's algorithm for graded submodules of free modules over R = S/I.

Vectors are dicts ``{(position, exponent): coefficient}``. The order is
position-over-term: a smaller position index is larger, ties are broken by the
ring's monomial order. Quotient rings are handled by appending ``g * e_i`` for
every ``g`` in the Groebner basis of ``I`` and every position ``i``, so all
arithmetic happens in the ambient polynomial ring.

With ``track=True`` each basis element also carries its cofactor vector with
respect to the input generators; this gives lifting (solve ``A c = v``) and,
through S-pair residues of the final basis, generators of the syzygy module.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from typing import Sequence

from .errors import NotHomogeneous, RankMismatch
from .matrix import Matrix, col_to_vec, vec_to_col
from .poly import Polynomial, Ring, divides, mono_div, mono_lcm

__all__ = [
    "FreeModuleElem",
    "ModuleGB",
    "buchberger",
    "module_nf",
    "syzygies",
    "ideal_gb",
    "lift",
    "minimal_columns",
]


def _axpy(target: dict, src: dict, scale: int, mono: tuple, p: int) -> None:
    """target += scale * mono * src (in place)."""
    for (pos, e), c in src.items():
        t = (pos, tuple(a + b for a, b in zip(e, mono)))
        v = (target.get(t, 0) + scale * c) % p
        if v:
            target[t] = v
        else:
            target.pop(t, None)


class _Elem:
    __slots__ = ("top", "bot", "lead", "inv_lc", "deg", "quotient")

    def __init__(self, top: dict, bot: dict, key, degrees, p: int, quotient: bool = False):
        self.top = top
        self.bot = bot
        self.lead = max(top, key=key)
        self.inv_lc = pow(top[self.lead], -1, p)
        self.deg = degrees[self.lead[0]] + sum(self.lead[1])
        self.quotient = quotient


class ModuleGB:
    """Groebner basis of the submodule of R^rank spanned by ``gens``.

    ``degrees`` are the degrees of the ambient basis vectors. ``gen_degrees``
    must be given for zero generators when ``track`` is set. ``truncate``
    stops the computation above that degree; results are then valid only for
    vectors of degree at most ``truncate``.
    """

    def __init__(
        self,
        ring: Ring,
        degrees: Sequence[int],
        gens: Sequence[dict],
        *,
        track: bool = False,
        gen_degrees: Sequence[int] | None = None,
        truncate: int | None = None,
        quotient: bool = True,
    ):
        self.ring = ring
        self.p = ring.p
        self.degrees = tuple(degrees)
        self.rank = len(self.degrees)
        self.track = track
        self.truncate = truncate
        mkey = ring.mkey
        self._key = lambda t: (-t[0], mkey(t[1]))
        self.gens = [dict(g) for g in gens]
        if gen_degrees is None:
            gen_degrees = [self._vec_degree(g) for g in self.gens]
        self.gen_degrees = list(gen_degrees)
        for g, d in zip(self.gens, self.gen_degrees):
            if g and self._vec_degree(g) != d:
                raise NotHomogeneous("generator degree does not match its declared degree")
        self.basis: list[_Elem] = []
        self._by_pos: dict[int, list[_Elem]] = {}
        self.minimal: list[int] = []
        if quotient:
            for pos in range(self.rank):
                for g in ring.gb:
                    top = {(pos, m): c for m, c in g.items()}
                    self._add(_Elem(top, {}, self._key, self.degrees, self.p, quotient=True))
        self._run()

    # helpers ----------------------------------------------------------------
    def _vec_degree(self, v: dict) -> int:
        degs = {self.degrees[pos] + sum(e) for pos, e in v}
        if len(degs) > 1:
            raise NotHomogeneous(f"vector is not homogeneous (degrees {sorted(degs)})")
        if not degs:
            raise NotHomogeneous("zero generator needs an explicit degree")
        return degs.pop()

    def _add(self, el: _Elem) -> None:
        self.basis.append(el)
        self._by_pos.setdefault(el.lead[0], []).append(el)

    def _reducer(self, t):
        for g in self._by_pos.get(t[0], ()):
            if divides(g.lead[1], t[1]):
                return g
        return None

    def _reduce(self, top: dict, bot: dict | None):
        """Full reduction; returns (remainder, updated cofactor dict)."""
        p, key = self.p, self._key
        top = dict(top)
        bot = dict(bot) if bot is not None else None
        rem = {}
        while top:
            t = max(top, key=key)
            g = self._reducer(t)
            if g is None:
                rem[t] = top.pop(t)
                continue
            q = mono_div(t[1], g.lead[1])
            s = (-top[t] * g.inv_lc) % p
            _axpy(top, g.top, s, q, p)
            if bot is not None and g.bot:
                _axpy(bot, g.bot, s, q, p)
        return rem, bot

    def _spair(self, a: _Elem, b: _Elem):
        l = mono_lcm(a.lead[1], b.lead[1])
        qa, qb = mono_div(l, a.lead[1]), mono_div(l, b.lead[1])
        top: dict = {}
        _axpy(top, a.top, a.inv_lc, qa, self.p)
        _axpy(top, b.top, (-b.inv_lc) % self.p, qb, self.p)
        bot = None
        if self.track:
            bot = {}
            _axpy(bot, a.bot, a.inv_lc, qa, self.p)
            _axpy(bot, b.bot, (-b.inv_lc) % self.p, qb, self.p)
        return top, bot

    def _pair_degree(self, a: _Elem, b: _Elem) -> int:
        return self.degrees[a.lead[0]] + sum(mono_lcm(a.lead[1], b.lead[1]))

    # main loop --------------------------------------------------------------
    def _run(self) -> None:
        heap: list = []
        counter = 0

        def push_pairs(new: _Elem):
            nonlocal counter
            for old in self._by_pos.get(new.lead[0], ()):
                if old is new or (old.quotient and new.quotient):
                    continue
                heapq.heappush(heap, (self._pair_degree(old, new), counter, old, new))
                counter += 1

        for el in list(self.basis):
            push_pairs(el)

        order = sorted(range(len(self.gens)), key=lambda j: (self.gen_degrees[j], j))
        gi = 0
        while heap or gi < len(order):
            next_gen_deg = self.gen_degrees[order[gi]] if gi < len(order) else None
            if heap and (next_gen_deg is None or heap[0][0] <= next_gen_deg):
                d, _, a, b = heapq.heappop(heap)
                if self.truncate is not None and d > self.truncate:
                    heap.clear()
                    continue
                top, bot = self._spair(a, b)
                top, bot = self._reduce(top, bot)
                if top:
                    el = _Elem(top, bot or {}, self._key, self.degrees, self.p)
                    self._add(el)
                    push_pairs(el)
                continue
            j = order[gi]
            gi += 1
            if self.truncate is not None and next_gen_deg > self.truncate:
                continue
            bot = {(j, self.ring.one_exp): 1} if self.track else None
            top, bot = self._reduce(self.gens[j], bot)
            if top:
                self.minimal.append(j)
                el = _Elem(top, bot or {}, self._key, self.degrees, self.p)
                self._add(el)
                push_pairs(el)
        self.minimal.sort()

    # queries ----------------------------------------------------------------
    def nf(self, v: dict) -> dict:
        return self._reduce(v, None)[0]

    def contains(self, v: dict) -> bool:
        return not self.nf(v)

    def lift(self, v: dict):
        """Return cofactors ``c`` (dict) with ``v = sum c_j gens_j`` mod I, or None."""
        if not self.track:
            raise ValueError("lift needs a tracked basis")
        rem, bot = self._reduce(v, {})
        if rem:
            return None
        p = self.p
        return {t: (-c) % p for t, c in bot.items()}

    def leading_terms(self) -> list[tuple]:
        return [el.lead for el in self.basis]

    def reduced_basis(self) -> list[dict]:
        """The reduced Groebner basis (monic, interreduced) as top vectors."""
        els = sorted(self.basis, key=lambda e: self._key(e.lead), reverse=True)
        keep = []
        for i, e in enumerate(els):
            if any(
                f.lead[0] == e.lead[0] and divides(f.lead[1], e.lead[1]) and (f.lead != e.lead or k < i)
                for k, f in enumerate(els)
                if f is not e
            ):
                continue
            keep.append(e)
        sub = ModuleGB.__new__(ModuleGB)
        sub.__dict__.update(self.__dict__)
        sub.basis, sub._by_pos = [], {}
        out = []
        for e in keep:
            sub.basis, sub._by_pos = [], {}
            for f in keep:
                if f is not e:
                    sub._add(f)
            lead_c = e.top[e.lead]
            tail = dict(e.top)
            del tail[e.lead]
            rem, _ = sub._reduce(tail, None)
            inv = pow(lead_c, -1, self.p)
            vec = {t: c * inv % self.p for t, c in rem.items()}
            vec[e.lead] = 1
            out.append(vec)
        out.sort(key=lambda v: self._key(max(v, key=self._key)), reverse=True)
        return out

    def syzygies(self) -> list[dict]:
        """Generators (not minimal) of the kernel of R^m -> R^rank, e_j -> gens_j.

        Residues of the input generators plus the S-pair residues of the
        finished basis; by Schreyer's theorem these span the kernel.
        """
        if not self.track:
            raise ValueError("syzygies need a tracked basis")
        one = self.ring.one_exp
        out = []
        for j, g in enumerate(self.gens):
            _, bot = self._reduce(g, {(j, one): 1})
            out.append(bot)
        for pos, els in self._by_pos.items():
            for a_i in range(len(els)):
                for b_i in range(a_i + 1, len(els)):
                    a, b = els[a_i], els[b_i]
                    if a.quotient and b.quotient:
                        continue
                    if self.truncate is not None and self._pair_degree(a, b) > self.truncate:
                        continue
                    top, bot = self._spair(a, b)
                    top, bot = self._reduce(top, bot)
                    out.append(bot)
        res = []
        ring = self.ring
        for s in out:
            s = _reduce_components(ring, s)
            if s:
                res.append(s)
        return res


def _reduce_components(ring: Ring, v: dict) -> dict:
    """Reduce each component of a vector modulo the quotient ideal."""
    if not ring.gb:
        return v
    comps: dict[int, dict] = {}
    for (pos, m), c in v.items():
        comps.setdefault(pos, {})[m] = c
    out = {}
    for pos, t in comps.items():
        for m, c in ring.reduce_terms(t).items():
            out[(pos, m)] = c
    return out


# ---------------------------------------------------------------------------
# typed front end


@dataclass(frozen=True)
class FreeModuleElem:
    ring: Ring
    components: tuple
    twists: tuple

    def __post_init__(self):
        if len(self.components) != len(self.twists):
            raise RankMismatch("components and twists differ in length")
        degs = {t + sum(m) for f, t in zip(self.components, self.twists) for m in f.terms}
        if len(degs) > 1:
            raise NotHomogeneous("free module element is not homogeneous")

    @classmethod
    def make(cls, ring: Ring, components, twists=None):
        comps = tuple(c if isinstance(c, Polynomial) else ring.poly(c) for c in components)
        return cls(ring, comps, tuple(twists) if twists is not None else (0,) * len(comps))

    @property
    def rank(self) -> int:
        return len(self.components)

    def vec(self) -> dict:
        return col_to_vec(self.components)

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.components)

    @classmethod
    def from_vec(cls, ring: Ring, v: dict, twists) -> "FreeModuleElem":
        return cls(ring, tuple(vec_to_col(ring, v, len(twists))), tuple(twists))


def buchberger(gens: Sequence[FreeModuleElem], ring: Ring | None = None, twists=None) -> "ReducedBasis":
    if gens:
        ring, twists = gens[0].ring, gens[0].twists
    for g in gens:
        if g.twists != twists:
            raise RankMismatch("generators live in different free modules")
    gb = ModuleGB(ring, twists, [g.vec() for g in gens if not g.is_zero()])
    return ReducedBasis(ring, tuple(twists), gb)


class ReducedBasis:
    """Reduced GB of a submodule; ``generators`` exclude the quotient relations."""

    def __init__(self, ring: Ring, twists: tuple, gb: ModuleGB):
        self.ring = ring
        self.twists = twists
        self._gb = gb
        quotient = ModuleGB(ring, twists, [])
        vecs = [v for v in gb.reduced_basis() if quotient.nf(v)]
        self.generators = [FreeModuleElem.from_vec(ring, v, twists) for v in vecs]

    def __len__(self):
        return len(self.generators)


def module_nf(v: FreeModuleElem, G: ReducedBasis) -> FreeModuleElem:
    if v.twists != G.twists:
        raise RankMismatch("vector and basis live in different free modules")
    return FreeModuleElem.from_vec(v.ring, G._gb.nf(v.vec()), v.twists)


# ---------------------------------------------------------------------------
# matrix-level operations


def column_degrees(M: Matrix, row_degrees: Sequence[int]) -> list[int | None]:
    out = []
    for c in M.cols:
        degs = {row_degrees[i] + sum(m) for i, f in enumerate(c) for m in f.terms}
        if len(degs) > 1:
            raise NotHomogeneous("matrix column is not homogeneous")
        out.append(degs.pop() if degs else None)
    return out


def syzygies(M: Matrix, row_degrees: Sequence[int] | None = None, col_degrees=None, minimal: bool = True) -> Matrix:
    """Columns generating ker(M: R^ncols -> R^nrows), minimal by default."""
    ring = M.ring
    if row_degrees is None:
        row_degrees = [0] * M.nrows
    cdeg = column_degrees(M, row_degrees)
    if col_degrees is not None:
        cdeg = [d if d is not None else cd for d, cd in zip(cdeg, col_degrees)]
    if any(d is None for d in cdeg):
        raise NotHomogeneous("zero columns need explicit degrees")
    gb = ModuleGB(ring, row_degrees, [col_to_vec(c) for c in M.cols], track=True, gen_degrees=cdeg)
    syz = gb.syzygies()
    if minimal:
        syz = _minimal_vectors(ring, cdeg, syz)
    return Matrix(ring, M.ncols, [vec_to_col(ring, s, M.ncols) for s in syz])


def _vdeg(v: dict, degrees) -> int:
    pos, e = next(iter(v))
    return degrees[pos] + sum(e)


def _minimal_vectors(ring: Ring, degrees, vecs: list[dict]) -> list[dict]:
    vecs = [v for v in vecs if v]
    if not vecs:
        return []
    gb = ModuleGB(ring, degrees, vecs)
    return [vecs[j] for j in gb.minimal]


def minimal_columns(M: Matrix, row_degrees: Sequence[int], fixed: Matrix | None = None) -> list[int]:
    """Indices of a minimal subset of columns spanning the same submodule.

    Columns of ``fixed`` always belong to the span but are never selected;
    within one degree they are processed before the columns of ``M``.
    """
    ring = M.ring
    extra = [v for v in (col_to_vec(c) for c in fixed.cols) if v] if fixed is not None else []
    vecs = [col_to_vec(c) for c in M.cols]
    idx = [j for j, v in enumerate(vecs) if v]
    if not idx:
        return []
    gb = ModuleGB(ring, row_degrees, extra + [vecs[j] for j in idx])
    n = len(extra)
    return [idx[j - n] for j in gb.minimal if j >= n]


def lift(A: Matrix, B: Matrix, row_degrees: Sequence[int], col_degrees_A=None) -> Matrix | None:
    """Solve ``A X = B`` over R (columns of B in the column span of A)."""
    ring = A.ring
    cdeg = column_degrees(A, row_degrees)
    if col_degrees_A is not None:
        cdeg = [d if d is not None else cd for d, cd in zip(cdeg, col_degrees_A)]
    cdeg = [d if d is not None else 0 for d in cdeg]
    gens = [col_to_vec(c) for c in A.cols]
    safe = [g if g else {} for g in gens]
    gb = ModuleGB(ring, row_degrees, safe, track=True, gen_degrees=cdeg)
    cols = []
    for c in B.cols:
        v = col_to_vec(c)
        cof = gb.lift(v) if v else {}
        if cof is None:
            return None
        cols.append(vec_to_col(ring, cof, A.ncols))
    return Matrix(ring, A.ncols, cols)


def ideal_gb(ring: Ring, gens: Sequence[Polynomial]) -> list[dict]:
    """Reduced GB (raw term dicts) of the ideal generated by ``gens`` in the ambient ring."""
    vecs = [{(0, m): c for m, c in g.terms.items()} for g in gens if g.terms]
    if not vecs:
        return []
    gb = ModuleGB(ring, (0,), vecs, quotient=False)
    return [{m: c for (_, m), c in v.items()} for v in gb.reduced_basis()]
