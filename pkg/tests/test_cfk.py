import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from conftest import FIXTURES, FULL, knot
from hfsurgery.algebra_core import GradedVectorSpace, Homology, homology, induced_map
from hfsurgery.cfk import (AHat, APlus, Arrow, BHat, BPlus, Box, ComplexParseError, Generator,
                           KnotComplex, StructureError, VerticalSlab, genus, h_map, hfk_hat, isomorphic,
                           load, mirror, parse, serialize, subquotient, v_map, validate)
from hfsurgery.knot_library import _data_path


def test_bundled_complexes_valid(full_name):
    assert validate(knot(full_name)).valid


def test_unknot_valid():
    K = KnotComplex("u", [Generator("x", 0, 0)], [], {"x": ("x", 1)})
    assert validate(K).valid


def test_missing_sign_breaks_d_squared():
    rep = validate(load(FIXTURES / "5_2_unsigned.json"))
    assert not rep.valid
    assert any(v.startswith("d^2") for v in rep.violations)


def test_broken_flip_reported():
    rep = validate(load(FIXTURES / "5_2_broken_flip.json"))
    assert not rep.valid
    assert all(v.startswith("flip symmetry") for v in rep.violations)


def test_structural_errors():
    with pytest.raises(StructureError):
        KnotComplex("k", [Generator("x", 0, 0), Generator("x", 0, 0)], [], {})
    with pytest.raises(StructureError):
        KnotComplex("k", [Generator("x", 0, 0)], [Arrow("x", "y", 0, Fraction(1))], {})


def test_filtration_and_grading_violations():
    gens = [Generator("x", 0, 1), Generator("y", 1, 0)]
    K = KnotComplex("k", gens, [Arrow("x", "y", 0, Fraction(1))], {"x": ("x", 1), "y": ("y", 1)})
    text = str(validate(K))
    assert "filtration" in text and "symmetry" in text


def test_mirror_of_unknot():
    U = knot("unknot")
    assert isomorphic(mirror(U), U)


def test_mirror_hfk_of_5_2():
    assert hfk_hat(mirror(knot("5_2"))) == {(1, 0): 2, (0, -1): 3, (-1, -2): 2}


def test_mirror_involution(full_name):
    K = knot(full_name)
    assert isomorphic(mirror(mirror(K)), K)
    assert validate(mirror(K)).valid


def test_bundled_mirror_pair():
    assert isomorphic(mirror(knot("5_2")), knot("m5_2"))
    assert not isomorphic(knot("5_2"), knot("m5_2"))


def test_hfk_tables():
    assert hfk_hat(knot("5_2")) == {(1, 2): 2, (0, 1): 3, (-1, 0): 2}
    assert hfk_hat(knot("unknot")) == {(0, 0): 1}
    assert hfk_hat(knot("T2_3")) == {(1, 0): 1, (0, -1): 1, (-1, -2): 1}


def test_genus():
    assert genus(knot("5_2")) == 1
    assert genus(knot("unknot")) == 0
    assert genus(mirror(knot("5_2"))) == 1
    assert genus(load(FIXTURES / "T2_5.json")) == 2


def test_a_hat_zero_of_5_2():
    cx = subquotient(knot("5_2"), AHat(0))
    assert len(cx) == 7
    assert homology(cx).total() == 5


def test_b_hat_is_s3(full_name):
    assert homology(subquotient(knot(full_name), BHat())) == GradedVectorSpace({0: 1})


def test_box_of_5_2():
    cx = subquotient(knot("5_2"), Box(0, 1))
    assert len(cx) == 2 and all(not row for row in cx.d)


def test_slab():
    # C{i = 0, j <= 0} for the trefoil: one generator in each of a = 0, -1
    cx = subquotient(knot("T2_3"), VerticalSlab(0))
    assert len(cx) == 2


def test_plus_region_needs_bound():
    with pytest.raises(ValueError):
        subquotient(knot("5_2"), APlus(0))
    with pytest.raises(ValueError):
        subquotient(knot("5_2"), BPlus(0))


@pytest.mark.parametrize("name", FULL + ["T2_5"])
def test_a_hat_odd_and_conjugation(name):
    K = load(FIXTURES / "T2_5.json") if name == "T2_5" else knot(name)
    for s in range(-genus(K) - 2, genus(K) + 3):
        H = homology(subquotient(K, AHat(s)))
        assert H.total() % 2 == 1
        assert homology(subquotient(K, AHat(-s))) == H.shifted(-2 * s)


@pytest.mark.parametrize("N", [1, 3, 5])
def test_b_plus_is_truncated_tower(full_name, N):
    H = homology(subquotient(knot(full_name), BPlus(N)))
    assert H == GradedVectorSpace({2 * k: 1 for k in range(N)})


def test_v_and_h_are_chain_maps(full_name):
    K = knot(full_name)
    for s in range(-genus(K) - 1, genus(K) + 2):
        v_map(K, s, 4).check()
        h_map(K, s, 4).check()


def _is_bijection(f):
    targets = []
    for x in f.source.ids:
        img = f.images.get(x, {})
        if len(img) != 1:
            return False
        (y, c), = img.items()
        if c not in (1, -1):
            return False
        targets.append(y)
    return sorted(targets) == sorted(f.target.ids) and len(set(targets)) == len(targets)


def test_v_iso_for_large_s(full_name):
    K = knot(full_name)
    g = genus(K)
    for s in range(g, g + 3):
        assert _is_bijection(v_map(K, s, 4))


def test_h_iso_for_small_s(full_name):
    K = knot(full_name)
    g = genus(K)
    for s in range(-g - 2, -g + 1):
        assert _is_bijection(h_map(K, s, 4))


def test_v_zero_of_m5_2_is_multiplication_by_u():
    # the tower of A+_0 starts at -2, so v_* kills it there and hits the B+ bottom from grading 0
    f = v_map(knot("m5_2"), 0, 5)
    hs = Homology(f.source)
    ind = induced_map(f, [-2, 0], hs, Homology(f.target))
    assert hs.dim(-2) == 2
    assert ind.rank(-2) == 0 and ind.rank(0) == 1


# ---------------------------------------------------------------------------
# file format


def test_round_trip_bundled(full_name):
    if full_name == "T-2_3":
        text = serialize(knot(full_name))
    else:
        text = _data_path(f"{full_name}.json").read_text()
    assert serialize(parse(text)) == text


@given(st.randoms(use_true_random=False))
def test_round_trip_relabeled(rnd):
    K = knot("5_2")
    ids = [g.id for g in K.generators]
    new = {x: f"g{rnd.randint(0, 10 ** 6)}_{k}" for k, x in enumerate(ids)}
    gens = [Generator(new[g.id], g.alexander, g.maslov) for g in K.generators]
    rnd.shuffle(gens)
    arrows = [Arrow(new[a.source], new[a.target], a.u_power, a.coeff) for a in K.arrows]
    rnd.shuffle(arrows)
    flip = {new[x]: (new[y], e) for x, (y, e) in K.flip.items()}
    K2 = KnotComplex("r", gens, arrows, flip)
    text = serialize(K2)
    assert serialize(parse(text)) == text
    assert isomorphic(parse(text), K)


def test_parse_error_position():
    text = '{\n  "name": "x",\n  "generators": [,\n}'
    with pytest.raises(ComplexParseError) as err:
        parse(text)
    assert err.value.line == 3


def test_parse_rejects_decimal_coefficient():
    text = _data_path("5_2.json").read_text().replace('"coeff": "-1"', '"coeff": "-1.0"')
    with pytest.raises(ComplexParseError) as err:
        parse(text)
    assert err.value.line is not None


def test_parse_rejects_unknown_field():
    text = _data_path("unknot.json").read_text().replace('"name"', '"colour": 1,\n  "name"')
    with pytest.raises(ComplexParseError):
        parse(text)


def test_parse_rejects_dangling_arrow():
    text = _data_path("T2_3.json").read_text()
    K = parse(text)
    bad = text.replace(f'"to": "{K.arrows[0].target}"', '"to": "nowhere"', 1)
    with pytest.raises(ComplexParseError):
        parse(bad)
