from fractions import Fraction

import pytest

from conftest import fixture_path, load
from helper.algebra_parser import parse_algebra
from helper.ainfinity import (HuStructureDesc, MultilinearMap, partner, validate_ainf, validate_hu,
                              validate_involution, validate_involutive_hu)
from helper.errors import MissingPartner, MissingTau
from helper.exact_linalg import RingSpec

FIXTURES = ["ground_field", "dual_numbers", "matrices_2x2", "ainf_three_generator"]


@pytest.mark.parametrize("name", FIXTURES)
def test_fixtures_are_involutive_ainfinity_algebras(name):
    a, h = load(name)
    for report in (validate_ainf(a), validate_involution(a), validate_hu(a, h), validate_involutive_hu(a, h)):
        assert report.passed, report.to_text()


def test_nonassociative_product_is_caught():
    a, _ = parse_algebra(
        "generators\nu 0\nx 0\n\npi 0\nu u -> u\nu x -> x\nx u -> x\nx x -> u\n"
        "\ninvolution\nu -> u\nx -> x\n"
    )
    assert validate_ainf(a).passed
    # right multiplication by u is not idempotent, so (x u) u != x (u u)
    b, _ = parse_algebra(
        "generators\nu 0\nx 0\n\npi 0\nu u -> u\nu x -> x\nx u -> 2*x\n"
    )
    report = validate_ainf(b)
    assert not report.passed
    assert report.failing_locations()


def test_involution_must_square_to_one():
    a, _ = parse_algebra("generators\nu 0\n\npi 0\nu u -> u\n\ninvolution\nu -> 2*u\n")
    report = validate_involution(a)
    assert "** = 1" in {f.relation for f in report.failures}


def test_involution_must_reverse_products():
    # the transpose is an anti-automorphism; the identity map is not
    with open(fixture_path("matrices_2x2"), encoding="utf-8") as fh:
        text = fh.read()
    text = text.replace("e12 -> e21", "e12 -> e12").replace("e21 -> e12", "e21 -> e21")
    a, _ = parse_algebra(text)
    assert not validate_involution(a).passed


def test_higher_product_flips_under_the_involution(three_generator):
    a, _ = three_generator
    assert a.max_pi == 1
    # pi_1(x, x, x)* = -pi_1(x*, x*, x*) forces y* = -y
    flipped = a.involution.table[("y",)]
    assert flipped == {"y": -1}


def test_missing_unit_is_required(dual_numbers):
    a, _ = dual_numbers
    with pytest.raises(MissingTau):
        validate_hu(a, HuStructureDesc())


def test_partner_signature():
    assert partner(2, (2, 0)) == (2, 0)
    assert partner(3, (1,)) == (2,)
    assert partner(1, (0,)) == (1,)


def test_nonzero_tau_needs_its_partner(dual_numbers):
    a, h = dual_numbers
    lonely = HuStructureDesc(dict(h.tau))
    lonely.tau[(1, (0,))] = MultilinearMap("tau_1^0", 1, 0, {("x",): {"x": Fraction(1)}})
    with pytest.raises(MissingPartner):
        validate_involutive_hu(a, lonely)


def test_unsupported_signatures_are_listed(dual_numbers):
    a, h = dual_numbers
    extra = HuStructureDesc(dict(h.tau))
    extra.tau[(3, (2, 1))] = MultilinearMap("tau_3^2,1", 2, 4, {})
    extra.tau[(3, (3, 1))] = MultilinearMap("tau_3^3,1", 2, 4, {("x", "x"): {"x": Fraction(1)}})
    report = validate_hu(a, extra)
    assert report.unsupported == ["tau_3^3,1"]


def test_reading_in_another_ring(dual_numbers):
    a, h = dual_numbers
    f2 = RingSpec.prime_field(2)
    b = a.over(f2)
    assert b.ring == f2
    assert b.pi_map(0).table[("u", "x")] == {"x": 1}
    assert h.over(f2).unit().table[()] == {"u": 1}
    assert validate_ainf(b).passed
