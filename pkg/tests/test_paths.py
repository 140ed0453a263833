from fractions import Fraction

import pytest

from kacward.core.hightemp import graph_generating_polynomial, partition_brute_force
from kacward.core.lattice import build_lattice
from kacward.core.paths import (
    PathWord,
    base_point_amplitude,
    base_point_sign_sum,
    canonicalize,
    enumerate_closed_classes,
    feynman_identity_check,
    iter_rooted_closed_walks,
    log_polynomial_series,
    log_product_series,
    log_product_series_check,
    partition_product_truncated,
    period,
    rooted_closed_walks,
    sign,
    turning_number,
)
from kacward.utils.exceptions import IntractableSizeError, PathValidationError

lattice2 = build_lattice(2)
lattice3 = build_lattice(3)

# Counterclockwise unit square and a figure eight through the centre of the 3x3 lattice
square = PathWord.from_sites(lattice2, [(0, 0), (1, 0), (1, 1), (0, 1)])
figure_eight = PathWord.from_sites(lattice3, [(1, 1), (2, 1), (2, 2), (1, 2), (1, 1), (1, 0), (0, 0), (0, 1)])


def test_signs_of_basic_paths():
    assert sign(square) == 1
    assert turning_number(square) == 1
    assert sign(square.inverse()) == 1
    assert turning_number(square.inverse()) == -1

    assert sign(figure_eight) == -1
    assert turning_number(figure_eight) == 0

    # The square traversed twice winds twice
    assert sign(square.repeat(2)) == -1
    assert sign(square.repeat(3)) == 1
    # A figure eight never winds, however often it repeats
    assert sign(figure_eight.repeat(2)) == -1
    assert turning_number(figure_eight.repeat(2)) == 0


def test_path_validation():
    with pytest.raises(PathValidationError, match="backtracks"):
        PathWord(((0, 1), (0, -1)), lattice2)
    with pytest.raises(PathValidationError, match="backtracks"):
        PathWord(((0, 1), (0, -1)))
    with pytest.raises(PathValidationError, match="backtracks"):
        PathWord(((0, 1), (1, 1), (1, -1), (0, -1)))
    assert PathWord(square.steps).steps == square.steps
    with pytest.raises(PathValidationError, match="not closed"):
        PathWord(((0, 1), (3, 1)), lattice2)
    with pytest.raises(PathValidationError):
        PathWord(((0, 2),))
    with pytest.raises(ValueError):
        sign(PathWord(square.steps))


def test_canonical_class_is_rotation_and_inversion_invariant():
    expected = canonicalize(figure_eight)
    for k in range(len(figure_eight)):
        assert canonicalize(figure_eight.rotate(k)).canonical == expected.canonical
        assert canonicalize(figure_eight.inverse().rotate(k)).canonical == expected.canonical
        assert sign(figure_eight.rotate(k)) == sign(figure_eight.inverse().rotate(k)) == -1
    for k in range(len(square)):
        assert sign(square.rotate(k)) == sign(square.inverse().rotate(k)) == 1
    assert expected.sign == -1
    assert expected.length == 8


def test_period():
    assert period(square) == 1
    assert period(square.repeat(3)) == 3
    assert canonicalize(square.repeat(2)).period == 2


def test_rooted_walk_multiplicity_two_by_two():
    walks = list(iter_rooted_closed_walks(lattice2, 8))

    # 8 rooted traversals of the square, 8 of the doubled square
    assert sum(1 for w in walks if len(w) == 4) == 8
    assert sum(1 for w in walks if len(w) == 8) == 8


def test_closed_classes_two_by_two():
    classes = enumerate_closed_classes(lattice2, 12)

    # Only the unit square is nonperiodic on a single plaquette
    assert len(classes) == 1
    assert classes[0].sign == 1 and classes[0].length == 4


def test_closed_classes_are_sorted_and_signed():
    classes = enumerate_closed_classes(lattice3, 8)

    assert [c.length for c in classes] == sorted(c.length for c in classes)
    assert all(c.sign in (1, -1) and c.period == 1 for c in classes)
    assert len({c.key for c in classes}) == len(classes)
    # Four unit squares and four dominoes
    assert sum(1 for c in classes if c.length == 4) == 4
    assert sum(1 for c in classes if c.length == 6) == 4


def test_feynman_identity_three_by_three():
    report = feynman_identity_check(lattice3, 8)

    assert report.verdict
    assert str(report.path_side) == "1 + 4u^4 + 4u^6 + 7u^8"
    assert report.to_dict()['verdict'] is True


def test_feynman_identity_through_order_ten():
    for N in (2, 3, 4):
        report = feynman_identity_check(build_lattice(N), 10)
        assert report.verdict, report.mismatches
        assert report.graph_side == graph_generating_polynomial(build_lattice(N)).truncate(10)


def test_truncated_product_exact_for_single_plaquette():
    for K in (0.1, 0.3, 0.5, 0.9):
        assert partition_product_truncated(lattice2, K, 4) == pytest.approx(
            partition_brute_force(lattice2, K), rel=1e-12)


def test_truncated_product_converges_at_weak_coupling():
    for K in (0.1, 0.2):
        assert partition_product_truncated(lattice3, K, 12) == pytest.approx(
            partition_brute_force(lattice3, K), rel=1e-6)
    lattice4 = build_lattice(4)
    assert partition_product_truncated(lattice4, 0.1, 12) == pytest.approx(
        partition_brute_force(lattice4, 0.1), rel=1e-6)


def test_free_plane_walks():
    assert rooted_closed_walks(2) == []
    assert rooted_closed_walks(5) == []
    assert len(rooted_closed_walks(4)) == 8
    assert len(rooted_closed_walks(6)) == 24

    assert base_point_sign_sum(4) == 8
    assert base_point_amplitude(4, 0.5) == pytest.approx(4 * 0.5**4)
    assert base_point_amplitude(6, 0.5) == pytest.approx(12 * 0.5**6)


def test_log_series_two_by_two():
    # ln(1 + u^4) = u^4 - u^8 / 2 + ...
    coeffs = log_product_series(lattice2, 8)

    assert coeffs[4] == 1
    assert coeffs[8] == Fraction(-1, 2)
    assert all(c == 0 for i, c in enumerate(coeffs) if i not in (4, 8))
    assert log_polynomial_series(graph_generating_polynomial(lattice2), 8) == coeffs


def test_log_series_matches_product_and_graphs():
    report = log_product_series_check(lattice3, 10)

    assert report.verdict
    assert report.to_dict()['walk_side'][4] == '4'


def test_path_length_budget():
    with pytest.raises(IntractableSizeError, match="path length"):
        list(iter_rooted_closed_walks(lattice3, 18))
    with pytest.raises(IntractableSizeError):
        feynman_identity_check(lattice3, 20)
