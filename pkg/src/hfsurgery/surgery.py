"""Heegaard Floer homology of rational surgeries from CFK^infinity data.

HF+ of large surgeries is read off H_*(A+_s); rational surgeries use the
truncated mapping cone

    X+ = (+)_t A+_{s_t}  --D-->  (+)_t B+,      s_t = floor((i + p t) / q)

with D = v into column t plus h into column t + 1.  Every "+" complex is
replaced by a finite truncation, and homology is only trusted in the range
of gradings where the truncation does not change the chain groups.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from functools import lru_cache
from typing import Dict, List, Optional, Sequence, Tuple

from .algebra_core import (ChainMap, FiniteChainComplex, Homology, as_rational, dense_rank,
                           induced_map, mat_mul)
from .cfk import (APlus, BPlus, KnotComplex, a_level, genus, h_images, maslov_span, mirror,
                  require_valid, subquotient, u_map, v_images)


class TruncationError(RuntimeError):
    """The truncated model never stabilized; a bound was too small."""


class UnsupportedSlopeError(ValueError):
    """Slope outside what a given operation handles (p <= 0 or p = 0)."""


# ---------------------------------------------------------------------------
# U-modules


@dataclass(frozen=True)
class UModule:
    """T+ with bottom at tower_bottom, plus torsion summands Q[U]/U^n.

    torsion holds (bottom grading, length) pairs in sorted order.  When
    absolute is False the gradings are only meaningful up to a common shift.
    """

    tower_bottom: Fraction
    torsion: Tuple[Tuple[Fraction, int], ...] = ()
    absolute: bool = False

    def __post_init__(self):
        object.__setattr__(self, "tower_bottom", as_rational(self.tower_bottom))
        tors = tuple(sorted((as_rational(g), int(n)) for g, n in self.torsion))
        for g, n in tors:
            if n < 1:
                raise ValueError("torsion lengths must be positive")
            if (g - self.tower_bottom).denominator != 1:
                raise ValueError("gradings in one Spin^c structure must differ by integers")
        object.__setattr__(self, "torsion", tors)

    def shifted(self, by) -> "UModule":
        by = as_rational(by)
        return UModule(self.tower_bottom + by, tuple((g + by, n) for g, n in self.torsion), self.absolute)

    def normalized(self) -> "UModule":
        """Relative form with the tower bottom moved to 0."""
        return UModule(Fraction(0), self.shifted(-self.tower_bottom).torsion, False)

    def same_relative(self, other: "UModule") -> bool:
        return self.normalized() == other.normalized()

    @property
    def torsion_count(self) -> int:
        return len(self.torsion)

    @property
    def reduced_dim(self) -> int:
        return sum(n for _, n in self.torsion)

    @property
    def hf_hat_dim(self) -> int:
        # dim ker U + dim coker U: one each per torsion summand, one for the tower
        return 1 + 2 * len(self.torsion)

    def u_kills_reduced(self) -> bool:
        return all(n == 1 for _, n in self.torsion)

    def reduced_euler(self, d: Optional[Fraction] = None) -> int:
        """chi(HF_red): a summand Q[U]/U^n at grading h contributes n(-1)^h."""
        chi = 0
        for g, n in self.torsion:
            ref = g if g.denominator == 1 else g - (self.tower_bottom if d is None else d)
            if ref.denominator != 1:
                raise ValueError("cannot assign a parity to this grading")
            chi += n if ref.numerator % 2 == 0 else -n
        return chi

    def anchored(self, d) -> "UModule":
        return replace(self.shifted(as_rational(d) - self.tower_bottom), absolute=True)

    def __str__(self) -> str:
        parts = [f"T+({self.tower_bottom})"]
        for g, n in self.torsion:
            parts.append(f"Q({g})" if n == 1 else f"Q[U]/U^{n}({g})")
        return " + ".join(parts)


def anchor_gradings(relative: UModule, d) -> UModule:
    """Shift all gradings so that the tower bottom sits in grading d."""
    if relative.tower_bottom is None:
        raise ValueError("module has no tower")
    return relative.anchored(d)


def decompose(cx: FiniteChainComplex, u: ChainMap, top: int, margin: int) -> UModule:
    """Tower + torsion decomposition of H_*(cx) as a Q[U]-module.

    Homology is trusted only in gradings <= top.  Summands are counted by
    their bottom grading h and length l through

        k(h, l) = dim(ker U_h  cap  im U^(l-1)),

    the number of summands with bottom h and length >= l.  Bottoms are
    forbidden within 2*margin of top, and exactly one summand may be longer
    than what the range can resolve; that one is the tower.
    """
    gs = [g for g in cx.gradings_present() if g <= top]
    if not gs:
        raise TruncationError("no gradings in the exact range")
    for g in gs:
        if g.denominator != 1:
            raise ValueError("internal gradings must be integers")
    lo = int(min(gs))
    top = int(top)
    H = Homology(cx)
    dims = {h: H.dim(h) for h in range(lo, top + 1)}
    Umap = induced_map(u, gradings=[h for h in range(lo, top + 1)], source_homology=H, target_homology=H,
                       check=False)

    # r[(h, l)] = rank of U^l : H_{h+2l} -> H_h
    def block(h):  # U : H_h -> H_{h-2}
        if h - 2 < lo:
            return [[Fraction(0)] * dims[h] for _ in range(0)]
        return Umap.block(h)

    rank: Dict[Tuple[int, int], int] = {}
    for start in range(lo, top + 1):
        # powers of U starting from H_start, walking down
        cur = None  # matrix H_start -> H_h
        h = start
        rank[(h, 0)] = dims[h]
        ell = 0
        while h - 2 >= lo:
            b = block(h)
            if cur is None:
                cur = b
            else:
                cur = mat_mul(b, cur, dims[h])
            h -= 2
            ell += 1
            rank[(h, ell)] = dense_rank(cur) if dims[h] and dims[start] else 0

    def r(h, ell):
        if h < lo:
            return 0
        return rank[(h, ell)]

    def k(h, ell):
        return r(h, ell - 1) - r(h - 2, ell)

    tower = []
    torsion: List[Tuple[Fraction, int]] = []
    for h in range(lo, top + 1):
        L = (top - h) // 2 + 1
        if L <= margin:
            if dims[h] and k(h, 1):
                raise TruncationError(f"summand bottom at grading {h} too close to the truncation edge")
            continue
        for ell in range(1, L):
            count = k(h, ell) - k(h, ell + 1)
            torsion.extend([(Fraction(h), ell)] * count)
        tower.extend([h] * k(h, L))
    if len(tower) != 1:
        raise TruncationError(f"expected exactly one tower, found {len(tower)}")
    return UModule(Fraction(tower[0]), tuple(torsion), False)


def _default_N(K: KnotComplex) -> int:
    return 2 * genus(K) + maslov_span(K) + 4


def _margin(K: KnotComplex) -> int:
    return genus(K) + maslov_span(K) + 2


# ---------------------------------------------------------------------------
# A+_s


def a_plus_exact_top(K: KnotComplex, s: int, N: int) -> int:
    """Largest grading where the N-truncation of A+_s has exact homology."""
    gmin = min(g.maslov - 2 * max(0, g.alexander - s) for g in K.generators) + 2 * N
    return gmin - 2


def _a_plus_at(K: KnotComplex, s: int, N: int) -> UModule:
    cx = subquotient(K, APlus(s, N))
    return decompose(cx, u_map(cx), a_plus_exact_top(K, s, N), _margin(K))


def _stable(compute, N0: int, tries: int = 6):
    N = N0
    last_err = None
    for _ in range(tries):
        try:
            first = compute(N)
        except TruncationError as exc:
            last_err = exc
            N += 2
            continue
        second = compute(N + 1)
        if first != second:
            raise TruncationError(f"results at N={N} and N={N + 1} disagree")
        return first
    raise TruncationError(f"no stable truncation up to N={N}: {last_err}")


_cache: Dict[Tuple, object] = {}


def _key(K: KnotComplex) -> Tuple:
    return (K.name, K.generators, K.arrows, tuple(sorted(K.flip.items())))


def a_plus_homology(K: KnotComplex, s: int) -> UModule:
    """H_*(A+_s) as a U-module, graded as a subquotient of CFK^infinity."""
    key = ("aplus", _key(K), s)
    if key not in _cache:
        require_valid(K)
        _cache[key] = _stable(lambda N: _a_plus_at(K, s, N), _default_N(K))
    return _cache[key]


def large_surgery(K: KnotComplex, N: int, s: int) -> UModule:
    """HF+(S^3_N(K), s) via H_*(A+_s); requires N >= 2g - 1 and |s| <= N/2."""
    g = genus(K)
    if N < max(1, 2 * g - 1):
        raise UnsupportedSlopeError(f"N={N} is below the large surgery bound {max(1, 2 * g - 1)}")
    if 2 * abs(s) > N:
        raise UnsupportedSlopeError(f"|s|={abs(s)} exceeds N/2")
    return a_plus_homology(K, s)


# ---------------------------------------------------------------------------
# V_s and H_s


@dataclass(frozen=True)
class VHTable:
    genus: int
    V_values: Tuple[Tuple[int, int], ...]

    def V(self, s: int) -> int:
        if s >= self.genus:
            return 0
        if s < 0:
            return self.V(-s) - s
        return dict(self.V_values)[s]

    def H(self, s: int) -> int:
        return self.V(-s)


def vs_hs(K: KnotComplex) -> VHTable:
    """V_s from tower bottoms of A+_s, checked against the maps v and h."""
    key = ("vh", _key(K))
    if key in _cache:
        return _cache[key]
    require_valid(K)
    g = genus(K)
    vals = {}
    for s in range(-g - 1, g + 2):
        mod = a_plus_homology(K, s)
        V = -mod.tower_bottom / 2
        if V.denominator != 1 or V < 0:
            raise TruncationError(f"tower bottom {mod.tower_bottom} of A+_{s} is not -2V")
        vals[s] = int(V)
        _check_vh_maps(K, s, int(V))
    for s in range(-g - 1, g + 2):
        if vals[s] != (vals[-s] - s if s < 0 else vals[s]):
            raise TruncationError("V_s values violate the conjugation identity")
    table = VHTable(g, tuple(sorted((s, v) for s, v in vals.items() if 0 <= s)))
    _cache[key] = table
    return table


def _check_vh_maps(K: KnotComplex, s: int, V: int) -> None:
    # v_* is nonzero on grading 0 and h_* is nonzero on grading 2s (both land on
    # the bottom of the B+ tower), so both exponents are as the gradings say
    N = _default_N(K) + abs(s)
    src = subquotient(K, APlus(s, N))
    tgt = subquotient(K, BPlus(N))
    hs, ht = Homology(src), Homology(tgt)
    v = ChainMap(src, tgt, v_images(K, s, src.ids), Fraction(0))
    h = ChainMap(src, tgt, h_images(K, s, src.ids), Fraction(-2 * s))
    if induced_map(v, [0], hs, ht).rank(0) != 1:
        raise TruncationError(f"v_* on grading 0 of A+_{s} is not onto the tower bottom")
    if induced_map(h, [2 * s], hs, ht).rank(2 * s) != 1:
        raise TruncationError(f"h_* on grading {2 * s} of A+_{s} is not onto the tower bottom")


# ---------------------------------------------------------------------------
# slopes, labels, lens spaces


@dataclass(frozen=True)
class SurgerySlope:
    p: int
    q: int

    def __post_init__(self):
        if self.q <= 0:
            raise ValueError("q must be positive")
        if self.p == 0:
            raise UnsupportedSlopeError("0-surgery is not supported")
        if math.gcd(abs(self.p), self.q) != 1:
            raise ValueError(f"{self.p}/{self.q} is not in lowest terms")

    @classmethod
    def parse(cls, text: str) -> "SurgerySlope":
        text = text.strip()
        if "/" in text:
            a, b = text.split("/", 1)
        else:
            a, b = text, "1"
        try:
            p, q = int(a), int(b)
        except ValueError:
            raise ValueError(f"bad slope {text!r}") from None
        return cls(p, q)

    @classmethod
    def of(cls, r) -> "SurgerySlope":
        r = as_rational(r)
        return cls(r.numerator, r.denominator)

    @property
    def value(self) -> Fraction:
        return Fraction(self.p, self.q)

    def __str__(self) -> str:
        return f"{self.p}/{self.q}"


def column_s(p: int, q: int, i: int, t: int) -> int:
    return (i + p * t) // q


def conjugate_label(p: int, q: int, i: int) -> int:
    """Label of the conjugate Spin^c structure of S^3_{p/q}(K)."""
    return (q - 1 - i) % p


def lens_d(p: int, q: int, i: int) -> Fraction:
    """d-invariant of p/q surgery on the unknot in Spin^c structure i.

    d(p, q, i) = -1/4 + (p + q - 1 - 2i)^2 / (4pq) - d(q, p mod q, i mod q),
    with d = 0 for p = 1.
    """
    if p <= 0 or q <= 0:
        raise ValueError("p and q must be positive")
    if math.gcd(p, q) != 1:
        raise ValueError(f"{p} and {q} are not coprime")
    if not 0 <= i < p:
        raise ValueError(f"label {i} out of range 0..{p - 1}")
    return _lens_d(p, q, i)


@lru_cache(maxsize=None)
def _lens_d(p: int, q: int, i: int) -> Fraction:
    if p == 1:
        return Fraction(0)
    return Fraction(-1, 4) + Fraction((p + q - 1 - 2 * i) ** 2, 4 * p * q) - _lens_d(q, p % q, i % q)


def d_invariant(K: KnotComplex, slope: SurgerySlope, i: int) -> Fraction:
    """d(S^3_{p/q}(K), i) = d(lens, i) - 2 max(V_{floor(i/q)}, H_{floor((i-p)/q)})."""
    p, q = slope.p, slope.q
    if p <= 0:
        raise UnsupportedSlopeError("d_invariant needs p > 0; use surger for negative slopes")
    if not 0 <= i < p:
        raise ValueError(f"label {i} out of range 0..{p - 1}")
    vh = vs_hs(K)
    return lens_d(p, q, i) - 2 * max(vh.V(i // q), vh.H((i - p) // q))


# ---------------------------------------------------------------------------
# mapping cone


def default_window(g: int, p: int, q: int, i: int) -> Tuple[int, int]:
    """Columns [s, s'] outside of which v or h is a quasi-isomorphism.

    lo is the first column with s_t >= 1 - g and hi the last with
    s_t <= g - 1; both ends are then widened by one.  For small genus hi can
    fall below lo, so the window spans both.
    """
    lo = -((i - q * (1 - g)) // p)
    hi = (q * g - 1 - i) // p
    return min(lo, hi) - 1, max(lo, hi) + 1


@dataclass
class MappingCone:
    complex: FiniteChainComplex
    u: ChainMap
    top: int
    columns: Tuple[Tuple[int, int, int], ...]  # (t, s_t, A shift)


def build_mapping_cone(K: KnotComplex, slope: SurgerySlope, i: int, window: Tuple[int, int],
                       N: int) -> MappingCone:
    p, q = slope.p, slope.q
    s0, s1 = window
    shifts = {s0: 0}
    for t in range(s0, s1):
        shifts[t + 1] = shifts[t] + 2 * column_s(p, q, i, t)
    gens = []
    diff: Dict = {}
    tops = []
    cols = []
    for t in range(s0, s1 + 1):
        st = column_s(p, q, i, t)
        cols.append((t, st, shifts[t]))
        A = subquotient(K, APlus(st, N), shift=shifts[t])
        gens.extend(((("A", t),) + gid, A.gradings[k]) for k, gid in enumerate(A.ids))
        tops.append(a_plus_exact_top(K, st, N) + shifts[t])
        for k, gid in enumerate(A.ids):
            row = {(("A", t),) + A.ids[j]: -c for j, c in A.d[k].items()}
            if t > s0:
                for tgt, c in v_images(K, st, [gid]).get(gid, {}).items():
                    row[(("B", t),) + tgt] = c
            if t < s1:
                for tgt, c in h_images(K, st, [gid]).get(gid, {}).items():
                    row[(("B", t + 1),) + tgt] = c
            if row:
                diff[(("A", t),) + gid] = row
    for t in range(s0 + 1, s1 + 1):
        B = subquotient(K, BPlus(N), shift=shifts[t] - 1)
        gens.extend(((("B", t),) + gid, B.gradings[k]) for k, gid in enumerate(B.ids))
        tops.append(min(g.maslov for g in K.generators) + 2 * N + shifts[t] - 1 - 2)
        for k, gid in enumerate(B.ids):
            row = {(("B", t),) + B.ids[j]: c for j, c in B.d[k].items()}
            if row:
                diff[(("B", t),) + gid] = row
    cx = FiniteChainComplex(gens, diff)
    images = {}
    for gid in cx.ids:
        col, x, n = gid
        tgt = (col, x, n + 1)
        if tgt in cx.index:
            images[gid] = {tgt: Fraction(1)}
    u = ChainMap(cx, cx, images, Fraction(-2))
    return MappingCone(cx, u, min(tops), tuple(cols))


def mapping_cone(K: KnotComplex, slope: SurgerySlope, i: int,
                 window: Optional[Tuple[int, int]] = None, N: Optional[int] = None) -> UModule:
    """HF+(S^3_{p/q}(K), i) as a relatively graded U-module (p > 0).

    Gradings are those of the cone with the leftmost A column unshifted.
    """
    if slope.p <= 0:
        raise UnsupportedSlopeError("mapping_cone needs p > 0; negative slopes go through the mirror")
    if not 0 <= i < slope.p:
        raise ValueError(f"label {i} out of range 0..{slope.p - 1}")
    key = ("cone", _key(K), slope, i, window, N)
    if key in _cache:
        return _cache[key]
    require_valid(K)
    w = window or default_window(genus(K), slope.p, slope.q, i)
    margin = _margin(K)

    def compute(n):
        cone = build_mapping_cone(K, slope, i, w, n)
        return decompose(cone.complex, cone.u, cone.top, margin)

    result = compute(N) if N is not None else _stable(compute, _default_N(K))
    _cache[key] = result
    return result


# ---------------------------------------------------------------------------
# driver


@dataclass(frozen=True)
class SpinCEntry:
    label: int
    d: Fraction
    hf_hat_dim: int
    module: Optional[UModule] = None


@dataclass(frozen=True)
class SurgeryResult:
    knot: str
    slope: SurgerySlope
    entries: Tuple[SpinCEntry, ...]

    @property
    def absolute(self) -> bool:
        return all(e.module is not None for e in self.entries)

    @property
    def hf_hat_dim(self) -> int:
        return sum(e.hf_hat_dim for e in self.entries)

    def d_invariants(self) -> List[Fraction]:
        return [e.d for e in self.entries]


def surger(K: KnotComplex, slope: SurgerySlope) -> SurgeryResult:
    """HF+ of S^3_{p/q}(K) for p > 0; d-invariants and dimensions for p < 0.

    For p < 0 the manifold is -S^3_{-p/q}(mirror K): d-invariants change sign
    and HF-hat dimensions are unchanged.  Labels are carried over unchanged.
    """
    require_valid(K)
    if slope.p < 0:
        pos = surger(mirror(K), SurgerySlope(-slope.p, slope.q))
        entries = tuple(SpinCEntry(e.label, -e.d, e.hf_hat_dim, None) for e in pos.entries)
        return SurgeryResult(K.name, slope, entries)
    entries = []
    for i in range(slope.p):
        rel = mapping_cone(K, slope, i)
        d = d_invariant(K, slope, i)
        mod = anchor_gradings(rel, d)
        entries.append(SpinCEntry(i, d, mod.hf_hat_dim, mod))
    return SurgeryResult(K.name, slope, tuple(entries))


def hf_hat_dim(K: KnotComplex, slope: SurgerySlope) -> int:
    if slope.p < 0:
        return hf_hat_dim(mirror(K), SurgerySlope(-slope.p, slope.q))
    return sum(mapping_cone(K, slope, i).hf_hat_dim for i in range(slope.p))
