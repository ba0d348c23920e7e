"""Finite models of the full knot Floer complex CFK^infinity.

A reduced model is a list of generators x with Alexander grading a(x) and
Maslov grading m(x), plus arrows.  The arrow (x, y, k, c) says that the
differential of x contains c * U^k * y.  The generator U^n x sits at lattice
position (i, j) = (-n, a(x) - n) in Maslov grading m(x) - 2n.

The flip is the symmetry exchanging the i and j filtrations.  It is stored
as an involution on generator ids together with a sign per generator:

    F(U^n x) = eps(x) * U^(n - a(x)) * flip(x)

Signs are needed because the square in the 5_2 complex carries a -1 that no
permutation of the basis can absorb.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

from .algebra_core import ChainMap, FiniteChainComplex, as_rational


class StructureError(ValueError):
    """Malformed complex data (duplicate ids, dangling references)."""


class ComplexParseError(ValueError):
    """Complex file that cannot be parsed; carries a position when known."""

    def __init__(self, message: str, line: Optional[int] = None, column: Optional[int] = None):
        self.line = line
        self.column = column
        where = f" (line {line}, column {column})" if line is not None else ""
        super().__init__(message + where)


@dataclass(frozen=True)
class Generator:
    id: str
    alexander: int
    maslov: int


@dataclass(frozen=True)
class Arrow:
    source: str
    target: str
    u_power: int
    coeff: Fraction


class KnotComplex:
    """Immutable reduced model of CFK^infinity."""

    def __init__(self, name: str, generators: Iterable[Generator], arrows: Iterable[Arrow],
                 flip: Mapping[str, Tuple[str, int]]):
        self.name = name
        self.generators: Tuple[Generator, ...] = tuple(generators)
        self.by_id: Dict[str, Generator] = {}
        for g in self.generators:
            if g.id in self.by_id:
                raise StructureError(f"duplicate generator id {g.id!r}")
            self.by_id[g.id] = g
        arrs = []
        for a in arrows:
            for end in (a.source, a.target):
                if end not in self.by_id:
                    raise StructureError(f"arrow endpoint {end!r} is not a generator")
            if a.u_power < 0:
                raise StructureError(f"negative U power on arrow {a.source}->{a.target}")
            c = as_rational(a.coeff)
            if c == 0:
                raise StructureError(f"zero coefficient on arrow {a.source}->{a.target}")
            arrs.append(Arrow(a.source, a.target, int(a.u_power), c))
        seen = set()
        for a in arrs:
            key = (a.source, a.target, a.u_power)
            if key in seen:
                raise StructureError(f"repeated arrow {a.source}->{a.target} with U power {a.u_power}")
            seen.add(key)
        self.arrows: Tuple[Arrow, ...] = tuple(arrs)
        fl = {}
        for x, (y, eps) in flip.items():
            for end in (x, y):
                if end not in self.by_id:
                    raise StructureError(f"flip refers to unknown generator {end!r}")
            if eps not in (1, -1):
                raise StructureError(f"flip sign for {x!r} must be 1 or -1")
            fl[x] = (y, int(eps))
        self.flip: Dict[str, Tuple[str, int]] = fl
        self.out: Dict[str, List[Arrow]] = {g.id: [] for g in self.generators}
        for a in self.arrows:
            self.out[a.source].append(a)

    def __repr__(self) -> str:
        return f"KnotComplex({self.name!r}, {len(self.generators)} generators, {len(self.arrows)} arrows)"

    def a(self, x: str) -> int:
        return self.by_id[x].alexander

    def m(self, x: str) -> int:
        return self.by_id[x].maslov

    def renamed(self, name: str) -> "KnotComplex":
        return KnotComplex(name, self.generators, self.arrows, self.flip)


# ---------------------------------------------------------------------------
# validation


@dataclass(frozen=True)
class ValidationReport:
    violations: Tuple[str, ...] = ()

    @property
    def valid(self) -> bool:
        return not self.violations

    def __str__(self) -> str:
        return "valid" if self.valid else "; ".join(self.violations)


class InvalidComplexError(ValueError):
    def __init__(self, report: ValidationReport, name: str = ""):
        self.report = report
        super().__init__(f"invalid complex {name}: {report}")


def _d_squared(K: KnotComplex) -> Dict[str, Dict[Tuple[str, int], Fraction]]:
    bad = {}
    for x in K.by_id:
        acc: Dict[Tuple[str, int], Fraction] = {}
        for a1 in K.out[x]:
            for a2 in K.out[a1.target]:
                key = (a2.target, a1.u_power + a2.u_power)
                acc[key] = acc.get(key, 0) + a1.coeff * a2.coeff
        acc = {k: v for k, v in acc.items() if v}
        if acc:
            bad[x] = acc
    return bad


def hfk_hat(K: KnotComplex) -> Dict[Tuple[int, int], int]:
    """Bigraded dimensions of HFK-hat, keyed by (alexander, maslov)."""
    dims: Dict[Tuple[int, int], int] = {}
    for g in K.generators:
        key = (g.alexander, g.maslov)
        dims[key] = dims.get(key, 0) + 1
    return dict(sorted(dims.items(), key=lambda kv: (-kv[0][0], -kv[0][1])))


def validate(K: KnotComplex) -> ValidationReport:
    v: List[str] = []
    for a in K.arrows:
        s, t = K.by_id[a.source], K.by_id[a.target]
        tag = f"arrow {a.source}->{a.target} (U^{a.u_power})"
        if a.u_power == 0 and s.alexander == t.alexander:
            v.append(f"reduced: {tag} preserves both filtrations")
        if s.alexander < t.alexander - a.u_power:
            v.append(f"filtration: {tag} raises the j filtration")
        if s.maslov - 1 != t.maslov - 2 * a.u_power:
            v.append(f"grading: {tag} does not lower the Maslov grading by 1")
    for x, terms in _d_squared(K).items():
        shown = ", ".join(f"{c}*U^{k}*{y}" for (y, k), c in sorted(terms.items()))
        v.append(f"d^2: d(d({x})) = {shown}")
    v.extend(_flip_violations(K))
    dims = hfk_hat(K)
    for (a, m), d in dims.items():
        if dims.get((-a, m - 2 * a), 0) != d:
            v.append(f"symmetry: HFK at (a={a}, m={m}) has no matching summand at (a={-a}, m={m - 2 * a})")
    return ValidationReport(tuple(v))


def _flip_violations(K: KnotComplex) -> List[str]:
    v: List[str] = []
    missing = [g.id for g in K.generators if g.id not in K.flip]
    if missing:
        v.append(f"flip symmetry: no flip image for {', '.join(missing)}")
        return v
    for g in K.generators:
        y, eps = K.flip[g.id]
        img = K.by_id[y]
        if K.flip[y][0] != g.id:
            v.append(f"flip symmetry: flip is not an involution at {g.id}")
        elif K.flip[y][1] != eps:
            v.append(f"flip symmetry: signs of {g.id} and {y} differ")
        if img.alexander != -g.alexander:
            v.append(f"flip symmetry: a({y}) != -a({g.id})")
        if img.maslov != g.maslov - 2 * g.alexander:
            v.append(f"flip symmetry: m({y}) != m({g.id}) - 2a({g.id})")
    if v:
        return v
    have = {(a.source, a.target, a.u_power): a.coeff for a in K.arrows}
    for a in K.arrows:
        fx, ex = K.flip[a.source]
        fy, ey = K.flip[a.target]
        k = a.u_power + K.a(a.source) - K.a(a.target)
        want = a.coeff * ex * ey
        got = have.get((fx, fy, k))
        if got != want:
            v.append(f"flip symmetry: arrow {a.source}->{a.target} (U^{a.u_power}) has no mirror "
                     f"arrow {fx}->{fy} (U^{k}) with coefficient {want}")
    return v


def require_valid(K: KnotComplex) -> KnotComplex:
    rep = validate(K)
    if not rep.valid:
        raise InvalidComplexError(rep, K.name)
    return K


def genus(K: KnotComplex) -> int:
    return max((abs(g.alexander) for g in K.generators), default=0)


def maslov_span(K: KnotComplex) -> int:
    ms = [g.maslov for g in K.generators]
    return max(ms) - min(ms) if ms else 0


def mirror(K: KnotComplex, name: Optional[str] = None) -> KnotComplex:
    """Dual complex: gradings negated, arrows reversed, flip transported."""
    gens = [Generator(g.id, -g.alexander, -g.maslov) for g in K.generators]
    arrows = [Arrow(a.target, a.source, a.u_power, a.coeff) for a in K.arrows]
    if name is None:
        name = K.name[1:] if K.name.startswith("m") and len(K.name) > 1 else "m" + K.name
    return KnotComplex(name, gens, arrows, dict(K.flip))


def isomorphic(K1: KnotComplex, K2: KnotComplex) -> bool:
    """Brute-force search for a monomial isomorphism of filtered complexes.

    A monomial isomorphism sends each generator to a nonzero multiple of a
    generator with the same (a, m).  This is enough for all bundled data.
    """
    groups1: Dict[Tuple[int, int], List[str]] = {}
    groups2: Dict[Tuple[int, int], List[str]] = {}
    for g in K1.generators:
        groups1.setdefault((g.alexander, g.maslov), []).append(g.id)
    for g in K2.generators:
        groups2.setdefault((g.alexander, g.maslov), []).append(g.id)
    if {k: len(v) for k, v in groups1.items()} != {k: len(v) for k, v in groups2.items()}:
        return False
    if len(K1.arrows) != len(K2.arrows):
        return False
    keys = sorted(groups1)
    arrows2 = {(a.source, a.target, a.u_power): a.coeff for a in K2.arrows}
    for perms in itertools.product(*(itertools.permutations(groups2[k]) for k in keys)):
        sigma = {}
        for k, perm in zip(keys, perms):
            sigma.update(zip(groups1[k], perm))
        if _scalable(K1, sigma, arrows2):
            return True
    return False


def _scalable(K1: KnotComplex, sigma: Mapping[str, str], arrows2: Mapping) -> bool:
    # need scalars lam with c2(sx, sy) = c1(x, y) * lam[y] / lam[x]
    edges: Dict[str, List[Tuple[str, Fraction]]] = {x: [] for x in K1.by_id}
    for a in K1.arrows:
        c2 = arrows2.get((sigma[a.source], sigma[a.target], a.u_power))
        if c2 is None:
            return False
        ratio = c2 / a.coeff  # lam[y] / lam[x]
        edges[a.source].append((a.target, ratio))
        edges[a.target].append((a.source, 1 / ratio))
    lam: Dict[str, Fraction] = {}
    for start in K1.by_id:
        if start in lam:
            continue
        lam[start] = Fraction(1)
        stack = [start]
        while stack:
            x = stack.pop()
            for y, r in edges[x]:
                want = lam[x] * r
                if y in lam:
                    if lam[y] != want:
                        return False
                else:
                    lam[y] = want
                    stack.append(y)
    return True


# ---------------------------------------------------------------------------
# regions and subquotients


@dataclass(frozen=True)
class APlus:
    """C{max(i, j - s) >= 0}, truncated to max(i, j - s) < N."""
    s: int
    N: Optional[int] = None


@dataclass(frozen=True)
class AHat:
    """C{max(i, j - s) = 0}."""
    s: int


@dataclass(frozen=True)
class BPlus:
    """C{i >= 0}, truncated to i < N."""
    N: Optional[int] = None


@dataclass(frozen=True)
class BHat:
    """C{i = 0}."""


@dataclass(frozen=True)
class VerticalSlab:
    """C{i = 0, j <= s}."""
    s: int


@dataclass(frozen=True)
class Box:
    """C{i = i0, j = j0}."""
    i0: int
    j0: int


RegionSpec = Union[APlus, AHat, BPlus, BHat, VerticalSlab, Box]


def a_level(K: KnotComplex, x: str, n: int, s: int) -> int:
    """max(i, j - s) for U^n x."""
    return max(0, K.a(x) - s) - n


def _region_members(K: KnotComplex, region: RegionSpec) -> List[Tuple[str, int]]:
    # (generator id, U power n) pairs, in a fixed order
    out: List[Tuple[str, int]] = []
    if isinstance(region, (APlus, BPlus)):
        if region.N is None:
            raise ValueError("a truncation bound N is required for plus regions")
        if region.N < 1:
            raise ValueError("truncation bound N must be at least 1")
    for g in K.generators:
        x, a = g.id, g.alexander
        if isinstance(region, APlus):
            top = max(0, a - region.s)
            ns = range(top - region.N + 1, top + 1)
        elif isinstance(region, AHat):
            ns = [max(0, a - region.s)]
        elif isinstance(region, BPlus):
            ns = range(-region.N + 1, 1)
        elif isinstance(region, BHat):
            ns = [0]
        elif isinstance(region, VerticalSlab):
            ns = [0] if a <= region.s else []
        elif isinstance(region, Box):
            n = -region.i0
            ns = [n] if a - n == region.j0 else []
        else:
            raise TypeError(f"unknown region {region!r}")
        out.extend((x, n) for n in ns)
    return out


def subquotient(K: KnotComplex, region: RegionSpec, shift: int = 0) -> FiniteChainComplex:
    """Finite complex spanned by the U-translates of generators in region.

    Generator ids are pairs (x, n) standing for U^n x; gradings are
    m(x) - 2n + shift.  Arrows whose target leaves the region are dropped.
    """
    members = _region_members(K, region)
    present = set(members)
    gens = [((x, n), K.m(x) - 2 * n + shift) for x, n in members]
    diff: Dict[Tuple[str, int], Dict[Tuple[str, int], Fraction]] = {}
    for x, n in members:
        row = {}
        for a in K.out[x]:
            tgt = (a.target, n + a.u_power)
            if tgt in present:
                row[tgt] = a.coeff
        if row:
            diff[(x, n)] = row
    return FiniteChainComplex(gens, diff)


def u_map(cx: FiniteChainComplex) -> ChainMap:
    """Multiplication by U on a complex produced by subquotient."""
    images = {}
    for x, n in cx.ids:
        tgt = (x, n + 1)
        if tgt in cx.index:
            images[(x, n)] = {tgt: Fraction(1)}
    return ChainMap(cx, cx, images, Fraction(-2))


def v_map(K: KnotComplex, s: int, N: int) -> ChainMap:
    """Projection A+_s -> B+, both truncated at N."""
    src = subquotient(K, APlus(s, N))
    tgt = subquotient(K, BPlus(N))
    return ChainMap(src, tgt, v_images(K, s, src.ids), Fraction(0))


def h_map(K: KnotComplex, s: int, N: int) -> ChainMap:
    """Project to C{j >= s}, multiply by U^s, then flip onto C{i >= 0}."""
    src = subquotient(K, APlus(s, N))
    tgt = subquotient(K, BPlus(N))
    return ChainMap(src, tgt, h_images(K, s, src.ids), Fraction(-2 * s))


def v_images(K: KnotComplex, s: int, ids: Iterable[Tuple[str, int]]) -> Dict:
    return {(x, n): {(x, n): Fraction(1)} for x, n in ids if n <= 0}


def h_images(K: KnotComplex, s: int, ids: Iterable[Tuple[str, int]]) -> Dict:
    out = {}
    for x, n in ids:
        a = K.a(x)
        if a - n - s >= 0:
            y, eps = K.flip[x]
            out[(x, n)] = {(y, n + s - a): Fraction(eps)}
    return out


# ---------------------------------------------------------------------------
# file format


def _flip_pairs(K: KnotComplex) -> List[Tuple[str, str, int]]:
    order = {g.id: i for i, g in enumerate(K.generators)}
    pairs = []
    done = set()
    for g in K.generators:
        if g.id in done or g.id not in K.flip:
            continue
        y, eps = K.flip[g.id]
        done.update((g.id, y))
        a, b = sorted((g.id, y), key=order.__getitem__)
        pairs.append((a, b, eps))
    return pairs


def serialize(K: KnotComplex) -> str:
    """Canonical text form; parse(serialize(K)) reproduces K exactly."""
    order = {g.id: i for i, g in enumerate(K.generators)}
    lines = ["{", f'  "name": {json.dumps(K.name)},', '  "generators": [']
    gl = [f'    {{"id": {json.dumps(g.id)}, "alexander": {g.alexander}, "maslov": {g.maslov}}}'
          for g in K.generators]
    lines.append(",\n".join(gl))
    lines.append("  ],")
    lines.append('  "arrows": [')
    arrows = sorted(K.arrows, key=lambda a: (order[a.source], order[a.target], a.u_power))
    al = [f'    {{"from": {json.dumps(a.source)}, "to": {json.dumps(a.target)}, '
          f'"u_power": {a.u_power}, "coeff": "{a.coeff}"}}' for a in arrows]
    lines.append(",\n".join(al))
    lines.append("  ],")
    lines.append('  "flip": [')
    fl = []
    for a, b, eps in _flip_pairs(K):
        tail = ', "-1"' if eps == -1 else ""
        fl.append(f"    [{json.dumps(a)}, {json.dumps(b)}{tail}]")
    lines.append(",\n".join(fl))
    lines.append("  ]")
    lines.append("}")
    text = "\n".join(line for line in lines if line != "") + "\n"
    return text


def _locate(text: str, needle: str) -> Tuple[Optional[int], Optional[int]]:
    pos = text.find(needle)
    if pos < 0:
        return None, None
    line = text.count("\n", 0, pos) + 1
    col = pos - (text.rfind("\n", 0, pos) + 1) + 1
    return line, col


def parse(text: str) -> KnotComplex:
    """Parse the text form.  Structural problems raise ComplexParseError."""
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ComplexParseError(exc.msg, exc.lineno, exc.colno) from None

    def fail(msg, needle=None):
        line, col = _locate(text, needle) if needle else (None, None)
        raise ComplexParseError(msg, line, col)

    if not isinstance(obj, dict):
        fail("top level must be an object")
    for key in ("name", "generators", "arrows", "flip"):
        if key not in obj:
            fail(f"missing field {key!r}")
    extra = set(obj) - {"name", "generators", "arrows", "flip"}
    if extra:
        fail(f"unknown field {sorted(extra)[0]!r}", f'"{sorted(extra)[0]}"')
    if not isinstance(obj["name"], str):
        fail("name must be a string", '"name"')
    gens = []
    for k, g in enumerate(obj["generators"]):
        if not isinstance(g, dict) or set(g) != {"id", "alexander", "maslov"}:
            fail(f"generator #{k} must have exactly id, alexander, maslov", '"generators"')
        if not isinstance(g["id"], str):
            fail(f"generator #{k}: id must be a string", '"generators"')
        for f in ("alexander", "maslov"):
            if not isinstance(g[f], int) or isinstance(g[f], bool):
                fail(f"generator {g['id']!r}: {f} must be an integer", json.dumps(g["id"]))
        gens.append(Generator(g["id"], g["alexander"], g["maslov"]))
    arrows = []
    for k, a in enumerate(obj["arrows"]):
        if not isinstance(a, dict) or set(a) != {"from", "to", "u_power", "coeff"}:
            fail(f"arrow #{k} must have exactly from, to, u_power, coeff", '"arrows"')
        if not isinstance(a["u_power"], int) or isinstance(a["u_power"], bool):
            fail(f"arrow #{k}: u_power must be an integer", '"arrows"')
        if not isinstance(a["coeff"], str):
            fail(f"arrow #{k}: coeff must be a string like \"p/q\"", '"arrows"')
        try:
            c = _parse_fraction(a["coeff"])
        except ValueError:
            fail(f"arrow #{k}: bad coefficient {a['coeff']!r}", json.dumps(a["coeff"]))
        arrows.append(Arrow(a["from"], a["to"], a["u_power"], c))
    flip: Dict[str, Tuple[str, int]] = {}
    for k, pair in enumerate(obj["flip"]):
        if not isinstance(pair, list) or len(pair) not in (2, 3) or not all(isinstance(p, str) for p in pair):
            fail(f"flip entry #{k} must be [id, id] or [id, id, \"-1\"]", '"flip"')
        eps = 1
        if len(pair) == 3:
            if pair[2] not in ("1", "-1"):
                fail(f"flip entry #{k}: sign must be \"1\" or \"-1\"", '"flip"')
            eps = int(pair[2])
        x, y = pair[0], pair[1]
        for a_, b_ in ((x, y), (y, x)):
            if a_ in flip and flip[a_] != (b_, eps):
                fail(f"flip entry #{k}: generator {a_!r} already has a flip image", '"flip"')
            flip[a_] = (b_, eps)
    try:
        return KnotComplex(obj["name"], gens, arrows, flip)
    except StructureError as exc:
        raise ComplexParseError(str(exc)) from None


def _parse_fraction(s: str) -> Fraction:
    s = s.strip()
    if not s or any(ch in s for ch in ".eE "):
        raise ValueError(s)
    return Fraction(s)


def load(path) -> KnotComplex:
    with open(path, encoding="utf-8") as fh:
        return parse(fh.read())


def dump(K: KnotComplex, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(serialize(K))
