import pytest

from conftest import load
from helper import simplicial
from helper.errors import InvalidIndices, NotADifferential
from helper.graded import map_scale
from helper.simplicial import (check_indices, dq_differentials, face_tuples, hat_action, split_terms, totalize,
                               validate_f_module)
from helper.tensor_construction import build_faces, build_tensor_module


def _faces(name, n_max):
    a, _ = load(name)
    bundle = build_tensor_module(a, n_max)
    return bundle, build_faces(bundle)


def test_index_checks():
    assert check_indices([0, 2], 3) == (0, 2)
    with pytest.raises(InvalidIndices):
        check_indices([2, 1], 3)
    with pytest.raises(InvalidIndices):
        check_indices([0, 4], 3)
    with pytest.raises(InvalidIndices):
        check_indices([], 3)


def test_face_tuple_count():
    # every nonempty subset of {0..n} of size at most n
    assert len(list(face_tuples(3))) == 2 ** 4 - 2


def test_hat_action_lowers_by_smaller_entries_to_the_right():
    assert hat_action((1, 0), (0, 2)) == (1, 0)
    assert hat_action((0, 1), (0, 2)) == (0, 2)


def test_hat_action_of_a_swap():
    # 3 has one smaller entry to its right
    assert hat_action((1, 0), (1, 3)) == (2, 1)


def test_split_terms_of_a_pair_give_the_simplicial_identity():
    terms = {(first, second): sign for sign, first, second in split_terms((0, 2))}
    # d(face_02) = -face_0 face_2 + face_1 face_0
    assert terms == {((0,), (2,)): -1, ((1,), (0,)): 1}


@pytest.mark.parametrize("name", ["ground_field", "dual_numbers", pytest.param("matrices_2x2", marks=pytest.mark.slow),
                                  "ainf_three_generator"])
def test_tensor_module_faces_satisfy_the_hierarchy(name):
    _, ff = _faces(name, 6)
    report = validate_f_module(ff)
    assert report.passed, report.to_text()
    assert report.checks_run > 0


@pytest.mark.parametrize("q", [0, 1])
def test_level_differentials_are_d_infinity(q):
    _, ff = _faces("ainf_three_generator", 4)
    report = dq_differentials(ff, q).relation_report()
    assert report.passed, report.to_text()


def test_totalized_levels_square_to_zero():
    bundle, ff = _faces("dual_numbers", 4)
    b = totalize(dq_differentials(ff, 0), bundle.barred, "b")
    bprime = totalize(dq_differentials(ff, 1), bundle.barred, "b'")
    assert b.square_zero_failures() == []
    assert bprime.square_zero_failures() == []


def test_flipped_face_breaks_the_hierarchy():
    _, ff = _faces("dual_numbers", 3)
    flipped = ff.with_face(2, (0,), map_scale(-1, ff.face(2, (0,))))
    report = validate_f_module(flipped)
    assert not report.passed
    assert any("(0, 2)" in loc for loc in report.failing_locations())


def test_unsigned_alternation_is_not_a_differential(monkeypatch):
    bundle, ff = _faces("ground_field", 3)
    monkeypatch.setattr(simplicial, "_alternation_sign", lambda indices: 1)
    with pytest.raises(NotADifferential):
        totalize(dq_differentials(ff, 0), bundle.barred, "b")
