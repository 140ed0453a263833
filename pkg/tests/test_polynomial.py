from fractions import Fraction

import pytest

from kacward.utils.polynomial import IntPolynomial


def test_normalisation_and_degree():
    assert IntPolynomial((1, 0, 2, 0, 0)).coeffs == (1, 0, 2)
    assert IntPolynomial((0, 0)).degree == -1
    assert IntPolynomial.monomial(4, -1).degree == 4
    with pytest.raises(TypeError):
        IntPolynomial((1, 0.5))


def test_arithmetic():
    a = IntPolynomial((1, 1))
    b = IntPolynomial((1, -1))

    assert (a * b).coeffs == (1, 0, -1)
    assert (a + b).coeffs == (2,)
    assert (a - a).coeffs == ()
    assert a.multiply(a * a, max_degree=2).coeffs == (1, 3, 3)


def test_from_counts_and_evaluation():
    poly = IntPolynomial.from_counts([0, 4, 4, 4, 4, 6])

    assert poly.coeffs == (1, 0, 0, 0, 4, 0, 1)
    assert poly(Fraction(1, 2)) == 1 + Fraction(4, 16) + Fraction(1, 64)
    assert poly.coefficient_sum() == 6


def test_str_and_json():
    poly = IntPolynomial((1, 0, 0, 0, 4, 0, -4, 0, 7))

    assert str(poly) == "1 + 4u^4 - 4u^6 + 7u^8"
    assert IntPolynomial.from_json(poly.to_json()) == poly
    with pytest.raises(ValueError):
        IntPolynomial.from_dict({'degree': 3, 'coeffs': [1, 2]})
