"""Alexander, Conway and Jones polynomials and the invariants built on them."""

from __future__ import annotations

from fractions import Fraction
from typing import Dict, Iterable, Mapping, Optional, Tuple

from .algebra_core import as_rational


class PolynomialError(ValueError):
    pass


class LaurentPolynomial:
    """Exact Laurent polynomial sum c_e x^e with no zero coefficients stored."""

    __slots__ = ("_c",)

    def __init__(self, coeffs: Optional[Mapping[int, object]] = None):
        c = {}
        for e, v in (coeffs or {}).items():
            v = as_rational(v)
            if v:
                c[int(e)] = v
        self._c = c

    @classmethod
    def from_pairs(cls, pairs: Iterable[Tuple[int, object]]) -> "LaurentPolynomial":
        acc: Dict[int, Fraction] = {}
        for e, v in pairs:
            acc[e] = acc.get(e, 0) + as_rational(v)
        return cls(acc)

    @classmethod
    def monomial(cls, e: int, c=1) -> "LaurentPolynomial":
        return cls({e: c})

    @property
    def coeffs(self) -> Dict[int, Fraction]:
        return dict(sorted(self._c.items()))

    def __getitem__(self, e: int) -> Fraction:
        return self._c.get(e, Fraction(0))

    def is_zero(self) -> bool:
        return not self._c

    def degree(self) -> int:
        return max(self._c) if self._c else 0

    def low_degree(self) -> int:
        return min(self._c) if self._c else 0

    def __add__(self, other) -> "LaurentPolynomial":
        other = _lift(other)
        acc = dict(self._c)
        for e, v in other._c.items():
            acc[e] = acc.get(e, 0) + v
        return LaurentPolynomial(acc)

    __radd__ = __add__

    def __neg__(self) -> "LaurentPolynomial":
        return LaurentPolynomial({e: -v for e, v in self._c.items()})

    def __sub__(self, other) -> "LaurentPolynomial":
        return self + (-_lift(other))

    def __rsub__(self, other) -> "LaurentPolynomial":
        return _lift(other) - self

    def __mul__(self, other) -> "LaurentPolynomial":
        other = _lift(other)
        acc: Dict[int, Fraction] = {}
        for e1, v1 in self._c.items():
            for e2, v2 in other._c.items():
                acc[e1 + e2] = acc.get(e1 + e2, 0) + v1 * v2
        return LaurentPolynomial(acc)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "LaurentPolynomial":
        if n < 0:
            if len(self._c) != 1:
                raise PolynomialError("only monomials have Laurent inverses")
            (e, v), = self._c.items()
            return LaurentPolynomial({e * n: v ** n})
        out = LaurentPolynomial({0: 1})
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def __eq__(self, other) -> bool:
        try:
            other = _lift(other)
        except TypeError:
            return NotImplemented
        return self._c == other._c

    def __hash__(self) -> int:
        return hash(frozenset(self._c.items()))

    def substitute_inverse(self) -> "LaurentPolynomial":
        """p(x^-1)."""
        return LaurentPolynomial({-e: v for e, v in self._c.items()})

    def evaluate(self, x) -> Fraction:
        x = as_rational(x)
        return sum((v * x ** e for e, v in self._c.items()), Fraction(0))

    def derivative_at_one(self, k: int) -> Fraction:
        """k-th derivative at x = 1, i.e. sum c_e e(e-1)...(e-k+1)."""
        total = Fraction(0)
        for e, v in self._c.items():
            f = 1
            for j in range(k):
                f *= e - j
            total += v * f
        return total

    def is_symmetric(self) -> bool:
        return all(self._c.get(-e) == v for e, v in self._c.items())

    def pairs(self):
        return [(e, str(v)) for e, v in sorted(self._c.items())]

    def to_string(self, var: str = "t") -> str:
        if not self._c:
            return "0"
        parts = []
        for e, v in sorted(self._c.items(), reverse=True):
            mag = abs(v)
            sign = "-" if v < 0 else "+"
            if e == 0:
                body = f"{mag}"
            else:
                pw = var if e == 1 else f"{var}^{e}"
                body = pw if mag == 1 else f"{mag}*{pw}"
            parts.append((sign, body))
        first_sign, first = parts[0]
        out = ("-" if first_sign == "-" else "") + first
        for sign, body in parts[1:]:
            out += f" {sign} {body}"
        return out

    def __repr__(self) -> str:
        return f"LaurentPolynomial({self.to_string()})"


def _lift(x) -> LaurentPolynomial:
    if isinstance(x, LaurentPolynomial):
        return x
    if isinstance(x, (int, Fraction)):
        return LaurentPolynomial({0: x})
    raise TypeError(f"cannot treat {x!r} as a polynomial")


T = LaurentPolynomial({1: 1})


# ---------------------------------------------------------------------------
# Alexander and Conway


def alexander_from_hfk(dims: Mapping[Tuple[int, int], int]) -> LaurentPolynomial:
    """Graded Euler characteristic sum_a sum_m (-1)^m dim HFK_m(a) t^a."""
    acc: Dict[int, int] = {}
    for (a, m), d in dims.items():
        acc[a] = acc.get(a, 0) + (d if m % 2 == 0 else -d)
    delta = LaurentPolynomial(acc)
    check_alexander(delta)
    return delta


def alexander(K) -> LaurentPolynomial:
    from .cfk import hfk_hat
    return alexander_from_hfk(hfk_hat(K))


def check_alexander(delta: LaurentPolynomial) -> None:
    if not delta.is_symmetric():
        raise PolynomialError(f"Alexander polynomial {delta.to_string()} is not symmetric")
    if delta.evaluate(1) != 1:
        raise PolynomialError(f"Alexander polynomial {delta.to_string()} does not take value 1 at t=1")


def conway(delta: LaurentPolynomial) -> LaurentPolynomial:
    """The polynomial N(z) in z with N(t^(1/2) - t^(-1/2)) = delta(t).

    z^2 corresponds to t - 2 + t^-1, so coefficients are peeled off from the
    top degree down.
    """
    if not delta.is_symmetric():
        raise PolynomialError("Conway transform needs a symmetric polynomial")
    z2 = LaurentPolynomial({1: 1, 0: -2, -1: 1})
    rest = delta
    out: Dict[int, Fraction] = {}
    while not rest.is_zero():
        n = rest.degree()
        if n < 0:
            raise PolynomialError("no Conway polynomial")
        c = rest[n]
        out[2 * n] = c
        rest = rest - c * z2 ** n
    return LaurentPolynomial(out)


def a_coefficients(nabla: LaurentPolynomial) -> Tuple[Fraction, Fraction, Fraction]:
    for e in nabla.coeffs:
        if e < 0 or e % 2:
            raise PolynomialError("Conway polynomials of knots only have even powers")
    return nabla[0], nabla[2], nabla[4]


def f_family(g: int) -> LaurentPolynomial:
    """t^g - 2t^(g-1) + t^(g-2) + 1 + t^(2-g) - 2t^(1-g) + t^-g."""
    if g < 2:
        raise ValueError("g must be at least 2")
    return LaurentPolynomial.from_pairs([(g, 1), (g - 1, -2), (g - 2, 1), (0, 1),
                                         (2 - g, 1), (1 - g, -2), (-g, 1)])


_P2 = LaurentPolynomial({0: 1, 2: 2, 4: 1})
_P3 = LaurentPolynomial({0: 1, 2: 2, 4: 4, 6: 1})


def p_family_recurrence(g: int) -> LaurentPolynomial:
    """p_{g+1} = (z^2 + 2)(p_g - 1) - p_{g-1} + 2, seeded with p_2 and p_3."""
    if g < 2:
        raise ValueError("g must be at least 2")
    if g == 2:
        return _P2
    z2p2 = LaurentPolynomial({2: 1, 0: 2})
    prev, cur = _P2, _P3
    for _ in range(3, g):
        prev, cur = cur, z2p2 * (cur - 1) - prev + 2
    return cur


def p_family(g: int) -> LaurentPolynomial:
    """Conway polynomial of f_g, computed two ways and compared."""
    direct = conway(f_family(g))
    rec = p_family_recurrence(g)
    if direct != rec:
        raise PolynomialError(f"Conway transform of f_{g} disagrees with the recurrence")
    return direct


# ---------------------------------------------------------------------------
# Jones and v3


def jones_derivatives(V: LaurentPolynomial) -> Tuple[Fraction, Fraction, Fraction]:
    return V.derivative_at_one(1), V.derivative_at_one(2), V.derivative_at_one(3)


def four_v3(V: LaurentPolynomial) -> Fraction:
    """4 v_3 = -(V'''(1) + 3 V''(1)) / 36, for a Jones polynomial."""
    d1, d2, d3 = jones_derivatives(V)
    if d1 != 0:
        raise PolynomialError("V'(1) != 0, so this is not the Jones polynomial of a knot")
    return -(d3 + 3 * d2) / 36


def v3(V: LaurentPolynomial) -> Tuple[Fraction, Fraction]:
    """(v_3, 4 v_3)."""
    f = four_v3(V)
    return f / 4, f


def jones_pretzel(n: int) -> LaurentPolynomial:
    """Jones polynomial of the pretzel knot P(-3, 3, 2n)."""
    k = 2 * n
    return LaurentPolynomial.from_pairs([(-k - 3, -1), (-k - 2, 1), (-k - 1, -1), (-k, 2),
                                         (-k + 1, -1), (-k + 2, 1), (-k + 3, -1), (0, 1)])


# ---------------------------------------------------------------------------
# Casson and Casson-Walker


class CassonValue:
    """lambda(S^3_{p/q}(K)), or its difference from lambda(S^3_{p/q}(unknot)).

    absolute is True exactly when p = +-1, where the unknot term vanishes.
    """

    __slots__ = ("value", "absolute")

    def __init__(self, value: Fraction, absolute: bool):
        self.value = value
        self.absolute = absolute

    def __eq__(self, other):
        if isinstance(other, CassonValue):
            return (self.value, self.absolute) == (other.value, other.absolute)
        return NotImplemented

    def __repr__(self):
        kind = "absolute" if self.absolute else "difference"
        return f"CassonValue({self.value}, {kind})"


def casson_surgery(delta: LaurentPolynomial, p: int, q: int = 1) -> CassonValue:
    """Surgery formula (q/p) * Delta''(1) / 2."""
    if p == 0:
        raise ValueError("0-surgery has no Casson-Walker invariant")
    if q <= 0:
        raise ValueError("q must be positive")
    value = Fraction(q, p) * delta.derivative_at_one(2) / 2
    return CassonValue(value, abs(p) == 1)


def casson_walker_from_hf(result) -> Fraction:
    """|H_1| lambda = sum over Spin^c of chi(HF_red) - d/2."""
    if not result.absolute:
        raise ValueError("needs absolutely graded HF+ for every Spin^c structure")
    total = Fraction(0)
    for e in result.entries:
        total += e.module.reduced_euler(e.d) - e.d / 2
    return total / abs(result.slope.p)
