import pytest

from conftest import fixture_path, load
from helper.algebra_parser import parse_algebra
from helper.complexes import ComplexSuite
from helper.errors import NonExactNode, NotAField, RingMismatch, StructureInvalid, WindowExceeded
from helper.exact_linalg import RingSpec
from helper.homology import (LESNode, LESReport, cyclic_homology, default_workers, dihedral_homology, homology,
                             homology_basis, quotient_cross_check, reflexive_homology, verify_les)


def test_cyclic_homology_of_the_ground_field(ground_field):
    a, _ = ground_field
    hc = cyclic_homology(a, 6)
    assert hc.window == (0, 5)
    assert hc.bettis() == [1, 0, 1, 0, 1, 0]
    assert hc.euler_consistent()


def test_cyclic_homology_over_the_integers_is_free(ground_field):
    a, _ = ground_field
    hc = cyclic_homology(a, 5, ring=RingSpec.integers())
    assert hc.ring == "Z"
    assert hc.bettis() == [1, 0, 1, 0, 1]
    assert all(hc.torsion(N) == () for N in range(5))


@pytest.mark.parametrize("rho,expected", [(1, [1, 0, 0, 0, 1, 0]), (-1, [0, 0, 1, 0, 0, 0])])
def test_dihedral_homology_of_the_ground_field(ground_field, rho, expected):
    a, _ = ground_field
    hd = dihedral_homology(a, rho, 6)
    assert hd.bettis() == expected
    assert hd.euler_consistent()


@pytest.mark.parametrize("rho,expected", [(1, [1, 0, 0, 0, 0, 0]), (-1, [0, 0, 0, 0, 0, 0])])
def test_reflexive_homology_of_the_ground_field(ground_field, rho, expected):
    a, _ = ground_field
    assert reflexive_homology(a, rho, 6).bettis() == expected


def test_dihedral_splits_cyclic_in_characteristic_zero(dual_numbers):
    a, _ = dual_numbers
    hc = cyclic_homology(a, 5)
    plus = dihedral_homology(a, 1, 5)
    minus = dihedral_homology(a, -1, 5)
    assert [p + m for p, m in zip(plus.bettis(), minus.bettis())] == hc.bettis()


def test_parallel_workers_give_the_same_answer(dual_numbers):
    a, _ = dual_numbers
    suite = ComplexSuite(a, 4)
    sequential = dihedral_homology(a, 1, 4, suite=suite, workers=1)
    parallel = dihedral_homology(a, 1, 4, suite=suite, workers=2)
    assert parallel.to_dict() == sequential.to_dict()


def test_homology_outside_the_window(ground_field):
    a, _ = ground_field
    total = ComplexSuite(a, 3).cyclic().total()
    with pytest.raises(WindowExceeded):
        homology(total, degrees=[3])
    with pytest.raises(WindowExceeded):
        homology_basis(total, 3)


def test_ring_mismatch(ground_field, F2):
    a, _ = ground_field
    with pytest.raises(RingMismatch):
        homology(ComplexSuite(a, 2).cyclic().total(), ring=F2)


def test_worker_count_from_the_environment(monkeypatch):
    monkeypatch.setenv("DIHEDRAL_WORKERS", "3")
    assert default_workers() == 3
    monkeypatch.setenv("DIHEDRAL_WORKERS", "0")
    with pytest.raises(ValueError):
        default_workers()


def test_homology_basis_classifies_cycles(ground_field):
    a, _ = ground_field
    total = ComplexSuite(a, 4).cyclic().total()
    basis = homology_basis(total, 2)
    assert basis.dim == 1
    assert basis.classify(basis.representatives[0]) == {0: 1}
    for col in total.differential(3).columns():
        assert basis.classify(col) == {}
    non_cycle = next(i for i in range(total.dim(2)) if total.differential(2).apply({i: 1}))
    with pytest.raises(StructureInvalid):
        basis.classify({non_cycle: 1})
    assert homology_basis(total, -1).dim == 0


@pytest.mark.parametrize("name", ["ground_field", "dual_numbers", pytest.param("matrices_2x2", marks=pytest.mark.slow),
                                  "ainf_three_generator"])
def test_quotient_complexes_agree_over_q(name):
    a, _ = load(name)
    check = quotient_cross_check(ComplexSuite(a, 5))
    assert set(check) == {"L", "M", "N"}
    for entry in check.values():
        assert entry["agrees"] is True
        assert len(entry["quotient"]["degrees"]) == 5


def test_quotient_comparison_has_no_verdict_in_positive_characteristic(ground_field):
    a, _ = ground_field
    check = quotient_cross_check(ComplexSuite(a.over(RingSpec.prime_field(2)), 3))
    assert all(entry["agrees"] is None for entry in check.values())


def test_quotient_comparison_needs_a_field(ground_field):
    a, _ = ground_field
    with pytest.raises(NotAField):
        quotient_cross_check(ComplexSuite(a.over(RingSpec.integers()), 3))


@pytest.mark.parametrize("rho", [1, -1])
def test_long_exact_sequence_for_the_ground_field(ground_field, rho):
    a, h = ground_field
    report = verify_les(a, h, rho, 6)
    assert report.exact
    assert report.alpha_isomorphism
    assert report.q_acyclic
    assert report.degrees == [0, 1, 2, 3, 4]
    report.raise_if_not_exact()
    expected_hr = [1, 0, 0, 0, 0] if rho == 1 else [0, 0, 0, 0, 0]
    assert [report.dims["HR"][N] for N in report.degrees] == expected_hr


@pytest.mark.parametrize("rho", [1, -1])
def test_long_exact_sequence_for_dual_numbers(dual_numbers, rho):
    a, h = dual_numbers
    report = verify_les(a, h, rho, 5)
    assert report.exact, report.to_dict()
    assert report.alpha_isomorphism
    assert report.q_acyclic
    # HD and HR computed through P match the direct computations
    assert [report.dims["HD"][N] for N in report.degrees] == dihedral_homology(a, rho, 5).bettis()[:4]
    assert [report.dims["HR"][N] for N in report.degrees] == reflexive_homology(a, rho, 5).bettis()[:4]


@pytest.mark.parametrize("rho", [1, -1])
@pytest.mark.parametrize("name", [pytest.param("matrices_2x2", marks=pytest.mark.slow), "ainf_three_generator"])
def test_long_exact_sequence_for_the_remaining_fixtures(name, rho):
    a, h = load(name)
    suite = ComplexSuite(a.with_rho(rho), 6, h)
    report = verify_les(a, h, rho, 6, suite=suite)
    assert report.exact, report.to_dict()
    assert report.alpha_isomorphism
    assert report.q_acyclic
    assert report.degrees == [0, 1, 2, 3, 4]
    assert [report.dims["HD"][N] for N in report.degrees] == dihedral_homology(a, rho, 6, suite=suite).bettis()[:5]
    assert [report.dims["HR"][N] for N in report.degrees] == reflexive_homology(a, rho, 6, suite=suite).bettis()[:5]


def test_long_exact_sequence_dimensions_with_a_higher_product(three_generator):
    a, h = three_generator
    report = verify_les(a, h, -1, 5)
    assert report.exact
    assert report.dims["HR"] == {0: 0, 1: 1, 2: 0, 3: 1}
    assert report.dims["HD"] == {0: 0, 1: 0, 2: 1, 3: 0}
    assert report.dims["HD_opposite"] == {0: 2, 1: 0, 2: 1, 3: 0}


def test_long_exact_sequence_over_a_prime_field(ground_field):
    a, h = ground_field
    report = verify_les(a, h, 1, 5, ring=RingSpec.prime_field(3))
    assert report.exact


def test_long_exact_sequence_needs_a_field_and_room(ground_field):
    a, h = ground_field
    with pytest.raises(NotAField):
        verify_les(a, h, 1, 4, ring=RingSpec.integers())
    with pytest.raises(WindowExceeded):
        verify_les(a, h, 1, 1)


def test_non_exact_report_raises():
    report = LESReport(1, 3, [0], nodes=[LESNode("HD", 0, 2, 1, 0, True)])
    assert not report.exact
    with pytest.raises(NonExactNode):
        report.raise_if_not_exact()
    assert report.to_dict()["nodes"][0]["exact"] is False


@pytest.mark.parametrize("build", [cyclic_homology, lambda a, n, ring: reflexive_homology(a, 1, n, ring=ring)])
def test_rational_betti_numbers_bound_the_prime_field_ones(ground_field, build):
    a, _ = ground_field
    over_q = build(a, 5, ring=RingSpec.rationals()).bettis()
    over_z = build(a, 5, ring=RingSpec.integers())
    for p in (2, 3):
        over_p = build(a, 5, ring=RingSpec.prime_field(p)).bettis()
        assert all(q <= fp for q, fp in zip(over_q, over_p))
    # the free rank over Z is the rational betti number
    assert over_z.bettis() == over_q


def _reverse_generators(text):
    head, rest = text.split("generators\n", 1)
    block, tail = rest.split("\n\n", 1)
    return head + "generators\n" + "\n".join(reversed(block.splitlines())) + "\n\n" + tail


@pytest.mark.parametrize("name", ["dual_numbers", "matrices_2x2", "ainf_three_generator"])
def test_generator_order_does_not_change_homology(name):
    a, _ = load(name)
    with open(fixture_path(name), encoding="utf-8") as fh:
        b, _ = parse_algebra(_reverse_generators(fh.read()))
    assert b.names == list(reversed(a.names))
    n_max = 3 if name == "matrices_2x2" else 4
    assert cyclic_homology(b, n_max).bettis() == cyclic_homology(a, n_max).bettis()
    for rho in (1, -1):
        assert dihedral_homology(b, rho, n_max).bettis() == dihedral_homology(a, rho, n_max).bettis()
        assert reflexive_homology(b, rho, n_max).bettis() == reflexive_homology(a, rho, n_max).bettis()
    over_z = cyclic_homology(b, n_max, ring=RingSpec.integers())
    assert over_z.to_dict()["degrees"] == cyclic_homology(a, n_max, ring=RingSpec.integers()).to_dict()["degrees"]
