import pytest

from conftest import load
from helper.algebra_parser import parse_algebra
from helper.complexes import (ComplexSuite, MultiComplex, build_cyclic_bicomplex, build_dihedral_triple,
                              build_flattened_dihedral, build_q_bicomplex, build_reflexive_bicomplex)
from helper.errors import MissingHuStructure, MissingReflection, NotAField
from helper.exact_linalg import RingSpec

RINGS = ["Q", "Z", "Fp:2", "Fp:3"]


@pytest.mark.parametrize("ring", RINGS)
@pytest.mark.parametrize("name,n_max", [("ground_field", 4), ("dual_numbers", 4), ("matrices_2x2", 3),
                                        ("ainf_three_generator", 3)])
def test_totalizations_square_to_zero(name, n_max, ring):
    a, h = load(name, ring=RingSpec.parse(ring))
    suite = ComplexSuite(a, n_max, h)
    for multi in (suite.cyclic(), suite.dihedral(), suite.reflexive(), suite.q_bicomplex()):
        assert multi.total().square_zero_failures() == []


def test_ground_field_dimensions(ground_field):
    a, h = ground_field
    suite = ComplexSuite(a, 3, h)
    assert suite.cyclic().total().dims() == [1, 2, 3, 4]
    assert suite.dihedral().total().dims() == [1, 3, 6, 10]
    assert suite.reflexive().total().dims() == [1, 2, 3, 4]
    assert suite.cyclic().total().window == (0, 2)


def test_multicomplex_keys(ground_field):
    a, _ = ground_field
    suite = ComplexSuite(a, 2)
    assert suite.cyclic().keys(2) == [(0, 2), (1, 1), (2, 0)]
    assert len(suite.dihedral().keys(2)) == 6
    with pytest.raises(ValueError):
        MultiComplex("bad", 4, suite.bundle.barred, lambda key: [])


def test_totals_are_assembled_once(dual_numbers):
    a, _ = dual_numbers
    suite = ComplexSuite(a, 3)
    assert suite.dihedral().total() is suite.dihedral().total()


def test_flipping_rho_builds_the_opposite_complex(dual_numbers):
    a, _ = dual_numbers
    suite = ComplexSuite(a, 3)
    opposite = suite.with_rho(-1)
    assert opposite.rho == -1
    assert opposite.dihedral().name == "D(rho=-1)"
    assert suite.dihedral().name == "D(rho=+1)"


def test_acyclic_bicomplex_needs_homotopy_units(dual_numbers):
    a, _ = dual_numbers
    suite = ComplexSuite(a, 3)
    with pytest.raises(MissingHuStructure):
        suite.q_bicomplex()
    with pytest.raises(MissingHuStructure):
        suite.s_maps()


def test_ground_field_cyclic_quotient():
    a, _ = parse_algebra("generators\nu 0\n\npi 0\nu u -> u\n\ninvolution\nu -> u\n")
    quotients = ComplexSuite(a, 3).quotients()
    # 1 - T-bar is 0 in even degrees and 2 in odd degrees
    assert quotients["L"].dims() == [1, 0, 1, 0]
    assert set(quotients) == {"L", "M", "N"}


def test_quotients_without_involution_only_give_L():
    a, _ = parse_algebra("generators\nu 0\n\npi 0\nu u -> u\n")
    assert set(ComplexSuite(a, 2).quotients()) == {"L"}


def test_quotients_need_a_field():
    a, _ = load("dual_numbers", ring=RingSpec.integers())
    with pytest.raises(NotAField):
        ComplexSuite(a, 2).quotients()


FIXTURES = [("ground_field", 4), ("dual_numbers", 4), ("matrices_2x2", 3), ("ainf_three_generator", 3)]


@pytest.mark.parametrize("ring", ["Q", "Fp:2"])
@pytest.mark.parametrize("name,n_max", FIXTURES)
def test_quotient_complexes_square_to_zero(name, n_max, ring):
    a, _ = load(name, ring=RingSpec.parse(ring))
    quotients = ComplexSuite(a, n_max).quotients()
    assert set(quotients) == {"L", "M", "N"}
    for complex_ in quotients.values():
        assert complex_.square_zero_failures() == []


@pytest.mark.parametrize("ring", ["Q", "Z", "Fp:2"])
@pytest.mark.parametrize("name,n_max", FIXTURES)
def test_p_subcomplex_maps_are_chain_maps(name, n_max, ring):
    a, h = load(name, ring=RingSpec.parse(ring))
    ps = ComplexSuite(a, n_max, h).p_subcomplex()
    assert ps.chain_map_failures() == {}
    assert ps.P.square_zero_failures() == []
    assert ps.total_q is not None
    assert ps.identification_failures() == []


def test_p_subcomplex_dimensions(ground_field):
    a, h = ground_field
    ps = ComplexSuite(a, 3, h).p_subcomplex()
    # the m <= 1 slices of Tot(D)
    assert ps.P.dims() == [1, 3, 5, 7]
    assert ps.total_r.dims() == [1, 2, 3, 4]
    assert ps.total_q.dims() == [1, 2, 3, 4]


def test_p_subcomplex_without_homotopy_units(dual_numbers):
    a, _ = dual_numbers
    ps = ComplexSuite(a, 3).p_subcomplex()
    assert ps.beta is None
    assert ps.total_q is None


def test_flattened_dihedral_complex_matches_its_edges(dual_numbers):
    a, h = dual_numbers
    ps = ComplexSuite(a, 4, h).p_subcomplex()
    flat = ps.total_d_flat
    assert flat.dims() == ps.total_d.dims()
    assert flat.square_zero_failures() == []
    for N in range(flat.top + 1):
        assert ps.flat_dim(N, 0) == ps.total_r.dim(N)
        if N >= 1:
            assert ps.flat_dim(N - 1, 1) == ps.total_q.dim(N - 1)
    # the pieces (1, 1, 0) and (0, 1, 1) of D
    assert ps.flat_dim(1, 1) == 4 + 2


def test_flattening_regroups_the_basis(ground_field):
    a, _ = ground_field
    total_d = ComplexSuite(a, 4).dihedral().total()
    flat = build_flattened_dihedral(total_d)
    assert [lab[0] for lab in flat.labels[1]] == [(1, 0), (1, 0), (0, 1)]
    for N in range(1, flat.top + 1):
        assert flat.differential(N).nnz == total_d.differential(N).nnz


def test_builders_match_the_suite(dual_numbers):
    a, h = dual_numbers
    suite = ComplexSuite(a, 3, h)
    assert build_cyclic_bicomplex(suite).total().dims() == suite.cyclic().total().dims()
    assert build_dihedral_triple(suite).total().dims() == suite.dihedral().total().dims()
    assert build_reflexive_bicomplex(suite).total().dims() == suite.reflexive().total().dims()
    assert build_q_bicomplex(suite).name == "Q(rho=+1)"
    assert build_dihedral_triple(suite.with_rho(-1)).name == "D(rho=-1)"


def test_builders_check_their_inputs():
    a, h = parse_algebra("generators\nu 0\n\npi 0\nu u -> u\n\ntau 0 [0]\n-> u\n")
    suite = ComplexSuite(a, 2, h)
    assert build_cyclic_bicomplex(suite).total().dims() == [1, 2, 3]
    for build in (build_dihedral_triple, build_reflexive_bicomplex, build_q_bicomplex):
        with pytest.raises(MissingReflection):
            build(suite)
