from fractions import Fraction

import numpy as np
import pytest
from sympy import Matrix, ZZ
from sympy.matrices.normalforms import smith_normal_form as sympy_snf

from helper.errors import NotAField, NotIntegerRing, RingMismatch, SemanticError, ShapeMismatch
from helper.exact_linalg import Echelon, RingSpec, SparseMatrix, equal, kernel_basis, rank, smith_normal_form


def test_ring_parse_and_labels():
    assert RingSpec.parse("Q").label == "Q"
    assert RingSpec.parse("Z").is_field is False
    assert RingSpec.parse("Fp:7").characteristic() == 7
    with pytest.raises(SemanticError):
        RingSpec.parse("Fp:9")
    with pytest.raises(SemanticError):
        RingSpec.parse("R")


def test_prime_field_coercion_reduces_fractions():
    f7 = RingSpec.prime_field(7)
    assert f7.coerce(Fraction(1, 2)) == 4
    assert f7.coerce(-1) == 6
    with pytest.raises(SemanticError):
        f7.coerce(Fraction(1, 7))


def test_zero_entries_are_not_stored(Q):
    m = SparseMatrix.from_dense(Q, [[0, 1], [0, 0]])
    assert m.nnz == 1
    assert (m - m).is_zero()


def test_shape_checks(Q):
    a = SparseMatrix.zero(Q, 2, 3)
    b = SparseMatrix.zero(Q, 2, 3)
    with pytest.raises(ShapeMismatch):
        a.compose(b)
    with pytest.raises(ShapeMismatch):
        SparseMatrix(Q, 1, 1, {0: {4: 1}})


def test_ring_mismatch(Q, Z):
    with pytest.raises(RingMismatch):
        equal(SparseMatrix.identity(Q, 2), SparseMatrix.identity(Z, 2))


def test_compose_matches_numpy(Q):
    rng = np.random.default_rng(7)
    a = rng.integers(-3, 4, size=(4, 5))
    b = rng.integers(-3, 4, size=(5, 3))
    product = SparseMatrix.from_dense(Q, a.tolist()).compose(SparseMatrix.from_dense(Q, b.tolist()))
    assert (product.to_numpy() == (a @ b).astype(object)).all()


def test_rank_over_q_and_fp(Q, F2):
    dense = [[1, 1, 0], [0, 1, 1], [1, 0, 1]]
    assert rank(SparseMatrix.from_dense(Q, dense)) == 3
    # rows sum to zero mod 2
    assert rank(SparseMatrix.from_dense(F2, dense)) == 2


def test_rank_needs_a_field(Z):
    with pytest.raises(NotAField):
        rank(SparseMatrix.identity(Z, 2))


@pytest.mark.parametrize("seed", [1, 2, 3])
def test_kernel_basis_spans_the_null_space(Q, seed):
    rng = np.random.default_rng(seed)
    dense = rng.integers(-2, 3, size=(4, 7))
    dense[3] = dense[0] + dense[1]
    m = SparseMatrix.from_dense(Q, dense.tolist())
    basis = kernel_basis(m)
    assert len(basis) == m.cols - rank(m)
    for v in basis:
        assert m.apply(v) == {}


def test_echelon_reports_coordinates(Q):
    ech = Echelon(Q)
    assert ech.insert({0: 1, 1: 1}, {0: 1})
    assert ech.insert({1: 2}, {1: 1})
    assert not ech.insert({0: 2, 1: 4})
    rem, coords = ech.reduce({0: 1, 1: 3})
    assert rem == {}
    # (1, 3) = 1*(1, 1) + 1*(0, 2)
    assert coords == {0: 1, 1: 1}


def test_smith_normal_form_small_example(Z):
    m = SparseMatrix.from_dense(Z, [[2, 4, 4], [-6, 6, 12], [10, -4, -16]])
    snf = smith_normal_form(m)
    assert snf.invariant_factors == (2, 6, 12)
    assert snf.torsion == (2, 6, 12)
    assert snf.rank == 3


def test_smith_normal_form_needs_integers(Q):
    with pytest.raises(NotIntegerRing):
        smith_normal_form(SparseMatrix.identity(Q, 2))


@pytest.mark.parametrize("seed", range(5))
def test_smith_normal_form_matches_sympy(Z, seed):
    rng = np.random.default_rng(seed)
    dense = rng.integers(-6, 7, size=(4, 5))
    dense[rng.random(size=dense.shape) < 0.3] = 0
    ours = smith_normal_form(SparseMatrix.from_dense(Z, dense.tolist())).invariant_factors
    oracle = sympy_snf(Matrix(dense.tolist()), domain=ZZ)
    expected = sorted(abs(int(oracle[i, i])) for i in range(min(oracle.shape)) if oracle[i, i] != 0)
    assert list(ours) == expected


def test_smith_transforms_diagonalize(Z):
    m = SparseMatrix.from_dense(Z, [[4, 6], [6, 9], [2, 3]])
    snf = smith_normal_form(m, with_transforms=True)
    diagonal = snf.left.compose(m).compose(snf.right)
    entries = {k: s.value for k, s in diagonal.entries.items()}
    assert entries == {(i, i): d for i, d in enumerate(snf.invariant_factors)}


@pytest.mark.parametrize("dense,factors", [([[2, 0], [0, 6]], (2, 6)), ([[2, 4], [4, 8]], (2,)),
                                           ([[0, 0], [0, 0]], ())])
def test_smith_normal_form_small_cases(Z, dense, factors):
    assert smith_normal_form(SparseMatrix.from_dense(Z, dense)).invariant_factors == factors


def test_rank_plus_nullity(F2):
    dense = [[1, 1, 0, 1], [0, 1, 1, 1], [1, 0, 1, 0]]
    m = SparseMatrix.from_dense(F2, dense)
    assert rank(m) + len(kernel_basis(m)) == m.cols
