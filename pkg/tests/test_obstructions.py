from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from conftest import FULL, knot
from hfsurgery import knot_library as kl
from hfsurgery.cfk import mirror
from hfsurgery.classical_invariants import alexander_from_hfk, f_family
from hfsurgery.obstructions import (ALMOST_LSPACE_KNOT, FIRE, LSPACE_KNOT, NEITHER, PASS, SKIPPED, UNKNOT,
                                    DimensionProfile, ProfileError, candidate_constraints,
                                    classify_lspace, fit_profile, ito_slope, obstruct_pair, r0_nu_hat,
                                    surgery_dim, sweep_slopes)
from hfsurgery.surgery import SurgerySlope, UnsupportedSlopeError, hf_hat_dim

PROFILES = {"unknot": (0, 0), "T2_3": (1, 1), "T-2_3": (1, -1), "4_1": (2, 0), "5_2": (3, -1), "m5_2": (3, 1)}
CLASSES = {"unknot": UNKNOT, "T2_3": LSPACE_KNOT, "T-2_3": ALMOST_LSPACE_KNOT, "4_1": ALMOST_LSPACE_KNOT,
           "5_2": NEITHER, "m5_2": ALMOST_LSPACE_KNOT}


def test_profiles(full_name):
    assert r0_nu_hat(knot(full_name)) == DimensionProfile(*PROFILES[full_name])


def test_profile_of_mirror(full_name):
    K = knot(full_name)
    assert r0_nu_hat(mirror(K)) == r0_nu_hat(K).mirrored()


SWEEP = [(1, 1), (-1, 1), (2, 1), (-2, 1), (3, 1), (-3, 1), (1, 2), (-1, 2), (3, 2), (-3, 2), (5, 1), (7, 2)]


@pytest.mark.parametrize("pq", SWEEP)
def test_profile_predicts_dimensions(full_name, pq):
    K = knot(full_name)
    assert surgery_dim(r0_nu_hat(K), *pq) == hf_hat_dim(K, SurgerySlope(*pq))


def test_surgery_dim_examples():
    assert surgery_dim(DimensionProfile(3, 1), 1, 1) == 3
    for p, q in [(1, 1), (5, 2), (7, 3)]:
        assert surgery_dim(DimensionProfile(0, 0), p, q) == p
        assert surgery_dim(DimensionProfile(3, -1), p, q) == p + 4 * q
    with pytest.raises(ValueError):
        surgery_dim(DimensionProfile(0, 0), 0, 1)


def test_profile_invariants():
    with pytest.raises(ValueError):
        DimensionProfile(2, 1)
    with pytest.raises(ValueError):
        DimensionProfile(2, 2)
    with pytest.raises(ValueError):
        DimensionProfile(1, 3)


def test_sweep_brackets_breakpoint():
    for g in range(0, 5):
        ps = [sl.p / sl.q for sl in sweep_slopes(g)]
        assert max(ps) > 2 * g + 1 and min(ps) < -(2 * g + 1)


def test_fit_rejects_inconsistent_sweep():
    with pytest.raises(ProfileError):
        fit_profile({SurgerySlope(1, 1): 5, SurgerySlope(2, 1): 9, SurgerySlope(-1, 1): 1}, 1)


def test_classification(full_name):
    assert classify_lspace(knot(full_name)) == CLASSES[full_name]


def test_one_surgery_three_dimensional():
    names = [n for n in kl.names() if "<" not in n] + ["P-3,3,1", "P-3,3,8"]
    three = set()
    for n in names:
        rec = kl.get(n)
        if rec.complex is not None:
            dim = hf_hat_dim(rec.complex, SurgerySlope(1, 1))
        elif rec.stored_profile is not None:
            dim = surgery_dim(rec.stored_profile, 1)
        else:
            continue
        if dim == 3:
            three.add(n)
    assert three == {"T-2_3", "4_1", "m5_2"}


def test_records_classify_from_stored_profile():
    assert classify_lspace(kl.get("15n43522")) == NEITHER
    assert r0_nu_hat(kl.get("Wh+(T2_3,2)")) == DimensionProfile(4, 0)


def test_ito_examples():
    assert ito_slope(0, 0, Fraction(3), Fraction(3)).kind == "Unconstrained"
    v = ito_slope(0, 1, Fraction(-3, 4), Fraction(-8, 4))
    assert v.kind == "UniqueSlope" and v.slope == 1 and str(v) == "UniqueSlope(1)"
    for sign in (1, -1):
        assert ito_slope(0, 0, Fraction(-3, 4), Fraction(sign * 7, 4)).kind == "IncompatiblePair"


q = st.fractions(min_value=-20, max_value=20, max_denominator=4)


@given(q, q, q, q)
def test_ito_antisymmetric(a, b, c, d):
    assert ito_slope(a, b, c, d) == ito_slope(b, a, d, c)


def test_candidate_examples():
    c = candidate_constraints(2, 1)
    assert c.admissible and (c.d, c.delta) == (0, 0)
    assert sum(c.hfk_shape.values()) == 9
    assert not candidate_constraints(4, 2).admissible
    # r | g - 1 branch by hand: -(g-1)((g-1)/r - 1) = -4 * (2 - 1)
    assert candidate_constraints(5, 2).d == -4


def test_candidate_other_branch():
    # g = 3, r = 4: r does not divide g - 1, so d = -(2g-2-r)^2 / (4r) = 0
    c = candidate_constraints(3, 4)
    assert c.admissible and c.d == 0 and c.delta == -1


@pytest.mark.parametrize("g", range(2, 9))
def test_candidate_shapes(g):
    for r in range(1, 2 * g):
        c = candidate_constraints(g, r)
        divides = (2 * g - 2) % r == 0 and (g % 2 == 1 or (g - 1) % r == 0)
        assert c.admissible == divides
        if c.admissible:
            assert c.delta == c.d + 2 - g
            assert sum(c.hfk_shape.values()) == 9
            assert alexander_from_hfk(c.hfk_shape) == f_family(g) == c.alexander


def test_obstruct_5_2_vs_trefoil():
    A, B = kl.get("5_2"), kl.get("T2_3")
    for sl in sweep_slopes(1):
        if sl.p > 0:
            assert obstruct_pair(A, B, sl).test("dimension").status == FIRE


def test_obstruct_m5_2_vs_trefoil():
    rep = obstruct_pair(kl.get("m5_2"), kl.get("T2_3"), 1)
    assert rep.test("d-invariant").status == PASS
    assert dict(rep.test("d-invariant").witness)["A"] == [-2]
    assert rep.test("casson").status == FIRE
    assert dict(rep.test("casson").witness) == {"A": 2, "B": 1}


@pytest.mark.parametrize("r", [1, 2, Fraction(3, 2), -1])
def test_obstruct_reflexive(r):
    rep = obstruct_pair(kl.get("5_2"), kl.get("5_2"), r)
    assert not rep.refuted
    assert [t.name for t in rep.tests] == ["dimension", "d-invariant", "casson", "ito"]


def test_obstruct_skips_missing_data():
    rep = obstruct_pair(kl.get("5_2"), kl.get("P-3,3,8"), 1)
    assert rep.test("dimension").status == SKIPPED
    assert rep.test("ito").status == PASS
    rep = obstruct_pair(kl.get("5_2"), kl.get("P-3,3,8"), 2)
    assert rep.test("ito").status == FIRE


def test_obstruct_both_signs():
    rep = obstruct_pair(kl.get("5_2"), kl.get("15n43522"), 1)
    assert rep.test("ito").status == FIRE
    assert len(rep.test("ito").witness) == 2


def test_obstruct_zero_slope():
    with pytest.raises(UnsupportedSlopeError):
        obstruct_pair(kl.get("5_2"), kl.get("5_2"), 0)
