"""Surgery-dimension invariants, L-space classes and slope obstructions."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .algebra_core import Homology, as_rational
from .cfk import AHat, KnotComplex, genus, mirror, subquotient
from .classical_invariants import (LaurentPolynomial, a_coefficients, casson_surgery, conway,
                                   f_family)
from .surgery import SurgerySlope, d_invariant, hf_hat_dim, surger


class ProfileError(RuntimeError):
    """The dimension sweep does not fit the affine model."""


@dataclass(frozen=True)
class DimensionProfile:
    r0_hat: int
    nu_hat: int

    def __post_init__(self):
        if self.r0_hat < abs(self.nu_hat) or (self.r0_hat - abs(self.nu_hat)) % 2:
            raise ValueError(f"({self.r0_hat}, {self.nu_hat}): r0 - |nu| must be even and non-negative")
        if self.nu_hat != 0 and self.nu_hat % 2 == 0:
            raise ValueError(f"nu_hat = {self.nu_hat} must be odd or zero")

    def mirrored(self) -> "DimensionProfile":
        return DimensionProfile(self.r0_hat, -self.nu_hat)


def surgery_dim(profile: DimensionProfile, p: int, q: int = 1) -> int:
    """dim HF-hat(S^3_{p/q}(K)) = q r0 + |p - q nu|."""
    if p == 0 or q <= 0:
        raise ValueError("need p != 0 and q > 0")
    return q * profile.r0_hat + abs(p - q * profile.nu_hat)


def sweep_slopes(g: int) -> List[SurgerySlope]:
    """1, 2, 3, 1/2, 3/2 and 2g+2, with their negatives.

    |nu_hat| <= 2g + 1, so 2g + 2 lies beyond the breakpoint on both sides.
    """
    base = [(1, 1), (2, 1), (3, 1), (1, 2), (3, 2), (2 * g + 2, 1)]
    out = []
    for p, q in base:
        for sign in (1, -1):
            sl = SurgerySlope(sign * p, q)
            if sl not in out:
                out.append(sl)
    return out


def fit_profile(dims: Dict[SurgerySlope, int], g: int) -> DimensionProfile:
    fits = []
    bound = 2 * g + 1
    for nu in range(-bound, bound + 1):
        r = None
        ok = True
        for sl, d in dims.items():
            rest = d - abs(sl.p - sl.q * nu)
            if rest % sl.q:
                ok = False
                break
            cand = rest // sl.q
            if cand < 0 or (r is not None and cand != r):
                ok = False
                break
            r = cand
        if ok and r is not None:
            fits.append((r, nu))
    if len(fits) != 1:
        raise ProfileError(f"dimension sweep admits {len(fits)} affine fits: {fits}")
    return DimensionProfile(*fits[0])


def hat_sum(K: KnotComplex) -> int:
    """sum_s (dim H_*(A-hat_s) - 1); only |s| <= g contribute."""
    g = genus(K)
    return sum(Homology(subquotient(K, AHat(s))).graded_dims().total() - 1 for s in range(-g, g + 1))


def profile_from_complex(K: KnotComplex) -> DimensionProfile:
    g = genus(K)
    dims = {sl: hf_hat_dim(K, sl) for sl in sweep_slopes(g)}
    prof = fit_profile(dims, g)
    # the A-hat sum gives r0 - nu on the side where nu(K) >= nu(mirror K)
    own = prof.r0_hat - prof.nu_hat == hat_sum(K)
    other = prof.r0_hat + prof.nu_hat == hat_sum(mirror(K))
    if (prof.nu_hat > 0 and not own) or (prof.nu_hat < 0 and not other) or (prof.nu_hat == 0 and not (own or other)):
        raise ProfileError(f"profile {prof} of {K.name} disagrees with the A-hat sum relation")
    return prof


def r0_nu_hat(knot) -> DimensionProfile:
    """Profile of a KnotComplex, or of a record (computed or stored)."""
    if isinstance(knot, KnotComplex):
        return profile_from_complex(knot)
    if knot.complex is not None:
        return profile_from_complex(knot.complex)
    if knot.stored_profile is not None:
        return knot.stored_profile
    raise ValueError(f"no dimension profile available for {knot.name}")


# ---------------------------------------------------------------------------
# L-space classes


LSPACE_KNOT = "LSpaceKnot"
ALMOST_LSPACE_KNOT = "AlmostLSpaceKnot"
NEITHER = "Neither"
UNKNOT = "Unknot"


def classify_profile(profile: DimensionProfile, g: int) -> str:
    if profile.r0_hat == 0 and profile.nu_hat == 0 and g == 0:
        return UNKNOT
    if profile.r0_hat == profile.nu_hat >= 1:
        return LSPACE_KNOT
    if profile.r0_hat - profile.nu_hat == 2:
        return ALMOST_LSPACE_KNOT
    return NEITHER


def classify_lspace(knot) -> str:
    if isinstance(knot, KnotComplex):
        return classify_profile(r0_nu_hat(knot), genus(knot))
    return classify_profile(r0_nu_hat(knot), knot.genus)


# ---------------------------------------------------------------------------
# finite type obstruction


@dataclass(frozen=True)
class ItoVerdict:
    kind: str  # Unconstrained, IncompatiblePair or UniqueSlope
    slope: Optional[Fraction] = None

    def allows(self, r) -> bool:
        if self.kind == "Unconstrained":
            return True
        if self.kind == "IncompatiblePair":
            return False
        return as_rational(r) == self.slope

    def __str__(self) -> str:
        return f"UniqueSlope({self.slope})" if self.kind == "UniqueSlope" else self.kind


def ito_slope(a4_K, a4_K2, v3_K, v3_K2) -> ItoVerdict:
    """Slope r = -5(a4 - a4') / (4(v3 - v3')) forced by the LMO invariant."""
    da = as_rational(a4_K) - as_rational(a4_K2)
    dv = as_rational(v3_K) - as_rational(v3_K2)
    if da == 0 and dv == 0:
        return ItoVerdict("Unconstrained")
    if da == 0 or dv == 0:
        return ItoVerdict("IncompatiblePair")
    return ItoVerdict("UniqueSlope", -5 * da / (4 * dv))


# ---------------------------------------------------------------------------
# candidate constraints for genus g knots sharing a surgery with 5_2


@dataclass(frozen=True)
class CandidateConstraints:
    genus: int
    slope: int
    admissible: bool
    d: Optional[int] = None
    delta: Optional[int] = None
    alexander: Optional[LaurentPolynomial] = None
    hfk_shape: Optional[Dict[Tuple[int, int], int]] = None


def candidate_constraints(g: int, r: int) -> CandidateConstraints:
    if g < 2 or r < 1:
        raise ValueError("need g >= 2 and r >= 1")
    ok = (2 * g - 2) % r == 0 and (g % 2 == 1 or (g - 1) % r == 0)
    if not ok:
        return CandidateConstraints(g, r, False)
    if (g - 1) % r == 0:
        d = Fraction(-(g - 1) * ((g - 1) // r - 1))
    else:
        d = Fraction(-(2 * g - 2 - r) ** 2, 4 * r)
    if d.denominator != 1:
        raise ArithmeticError(f"d = {d} is not an integer")
    d = int(d)
    shape: Dict[Tuple[int, int], int] = {}

    def put(a, m, n):
        shape[(a, m)] = shape.get((a, m), 0) + n

    put(g, d + 2, 1)
    put(g - 1, d + 1, 2)
    put(g - 2, d, 1)
    put(0, 0, 1)
    put(2 - g, d + 4 - 2 * g, 1)
    put(1 - g, d + 3 - 2 * g, 2)
    put(-g, d + 2 - 2 * g, 1)
    shape = dict(sorted(shape.items(), key=lambda kv: (-kv[0][0], -kv[0][1])))
    return CandidateConstraints(g, r, True, d, d + 2 - g, f_family(g), shape)


# ---------------------------------------------------------------------------
# pairwise obstruction driver


PASS, FIRE, SKIPPED = "pass", "fire", "skipped"

OBSTRUCT_SWEEP: Tuple[SurgerySlope, ...] = tuple(
    [SurgerySlope(n, 1) for n in range(-7, 8) if n != 0]
    + [SurgerySlope(s * p, q) for p, q in ((1, 2), (3, 2), (5, 2), (1, 3), (2, 3)) for s in (1, -1)]
)


@dataclass(frozen=True)
class TestResult:
    name: str
    status: str
    witness: Tuple[Tuple[str, object], ...] = ()


@dataclass(frozen=True)
class ObstructionReport:
    a: str
    b: str
    slope: SurgerySlope
    tests: Tuple[TestResult, ...]

    @property
    def refuted(self) -> bool:
        return any(t.status == FIRE for t in self.tests)

    def test(self, name: str) -> TestResult:
        for t in self.tests:
            if t.name == name:
                return t
        raise KeyError(name)


def _profile_or_none(rec) -> Optional[DimensionProfile]:
    try:
        return r0_nu_hat(rec)
    except ValueError:
        return None


def _d_values(rec, slope: SurgerySlope) -> Optional[List[Fraction]]:
    if rec.complex is not None:
        if slope.p > 0:
            return sorted(d_invariant(rec.complex, slope, i) for i in range(slope.p))
        return sorted(surger(rec.complex, slope).d_invariants())
    if slope.p == 1 and slope.q == 1 and rec.stored_V0 is not None:
        return [Fraction(-2 * rec.stored_V0)]
    return None


def _dimension_test(A, B, slope) -> TestResult:
    pa, pb = _profile_or_none(A), _profile_or_none(B)
    if pa is None or pb is None:
        return TestResult("dimension", SKIPPED)
    da, db = surgery_dim(pa, slope.p, slope.q), surgery_dim(pb, slope.p, slope.q)
    return TestResult("dimension", PASS if da == db else FIRE, (("A", da), ("B", db)))


def _d_test(A, B, slope) -> TestResult:
    da, db = _d_values(A, slope), _d_values(B, slope)
    if da is None or db is None:
        return TestResult("d-invariant", SKIPPED)
    return TestResult("d-invariant", PASS if da == db else FIRE, (("A", da), ("B", db)))


def _casson_test(A, B, slope) -> TestResult:
    # both sides share the lens space term, so comparing the differences is enough
    ca = casson_surgery(A.alexander, slope.p, slope.q).value
    cb = casson_surgery(B.alexander, slope.p, slope.q).value
    return TestResult("casson", PASS if ca == cb else FIRE, (("A", ca), ("B", cb)))


def ito_verdicts(A, B) -> Optional[List[Tuple[Tuple[Fraction, Fraction], ItoVerdict]]]:
    """Verdict for every admissible sign choice of the stored 4 v_3 values."""
    oa, ob = A.four_v3_options(), B.four_v3_options()
    if not oa or not ob:
        return None
    a4a = a_coefficients(conway(A.alexander))[2]
    a4b = a_coefficients(conway(B.alexander))[2]
    out = []
    for fa, fb in itertools.product(oa, ob):
        out.append(((fa, fb), ito_slope(a4a, a4b, fa / 4, fb / 4)))
    return out


def _ito_test(A, B, slope) -> TestResult:
    verdicts = ito_verdicts(A, B)
    if verdicts is None:
        return TestResult("ito", SKIPPED)
    fires = all(not v.allows(slope.value) for _, v in verdicts)
    witness = tuple((f"4v3 {fa} vs {fb}", str(v)) for (fa, fb), v in verdicts)
    return TestResult("ito", FIRE if fires else PASS, witness)


def obstruct_pair(A, B, r) -> ObstructionReport:
    """Run every available test; a fire certifies S^3_r(A) and S^3_r(B) differ."""
    slope = r if isinstance(r, SurgerySlope) else SurgerySlope.of(r)
    tests = (_dimension_test(A, B, slope), _d_test(A, B, slope), _casson_test(A, B, slope),
             _ito_test(A, B, slope))
    return ObstructionReport(A.name, B.name, slope, tests)
