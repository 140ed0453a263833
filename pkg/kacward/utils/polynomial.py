"""Exact integer polynomials in the weight u."""
from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, List, Optional, Sequence, Tuple, Union

Number = Union[int, float, Fraction]


def _normalize(coeffs: Sequence[int]) -> Tuple[int, ...]:
    # trailing zeros are dropped; the zero polynomial is ()
    n = len(coeffs)
    while n and coeffs[n - 1] == 0:
        n -= 1
    return tuple(coeffs[:n])


@dataclass(frozen=True)
class IntPolynomial:
    """
    Polynomial c_0 + c_1 u + ... + c_d u^d with exact integer coefficients.

    Every operation stays in integer arithmetic. Multiplication can be truncated at a maximal degree so that
    formal products over many factors (the path product of the Feynman identity) stay cheap.
    """
    coeffs: Tuple[int, ...] = ()

    def __post_init__(self):
        for c in self.coeffs:
            if isinstance(c, bool) or not isinstance(c, int):
                raise TypeError(f"IntPolynomial coefficients must be int, got {type(c).__name__}")
        object.__setattr__(self, 'coeffs', _normalize(tuple(self.coeffs)))

    @classmethod
    def one(cls) -> IntPolynomial:
        return cls((1,))

    @classmethod
    def monomial(cls, power: int, coeff: int = 1) -> IntPolynomial:
        if power < 0:
            raise ValueError(f"power must be nonnegative, got {power}")
        return cls((0,) * power + (coeff,))

    @classmethod
    def from_counts(cls, degrees: Iterable[int]) -> IntPolynomial:
        """Build the generating polynomial sum_m #{items of degree m} u^m."""
        counts: List[int] = []
        for d in degrees:
            if d >= len(counts):
                counts.extend([0] * (d + 1 - len(counts)))
            counts[d] += 1
        return cls(tuple(counts))

    @property
    def degree(self) -> int:
        """Degree of the polynomial; -1 for the zero polynomial."""
        return len(self.coeffs) - 1

    def coefficient(self, power: int) -> int:
        if 0 <= power < len(self.coeffs):
            return self.coeffs[power]
        return 0

    def truncate(self, max_degree: int) -> IntPolynomial:
        return IntPolynomial(self.coeffs[:max_degree + 1])

    def __add__(self, other: IntPolynomial) -> IntPolynomial:
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        res = list(a)
        for i, c in enumerate(b):
            res[i] += c
        return IntPolynomial(tuple(res))

    def __neg__(self) -> IntPolynomial:
        return IntPolynomial(tuple(-c for c in self.coeffs))

    def __sub__(self, other: IntPolynomial) -> IntPolynomial:
        return self + (-other)

    def __mul__(self, other: IntPolynomial) -> IntPolynomial:
        return self.multiply(other)

    def multiply(self, other: IntPolynomial, max_degree: Optional[int] = None) -> IntPolynomial:
        """Product of two polynomials, dropping every term of degree above max_degree."""
        if not self.coeffs or not other.coeffs:
            return IntPolynomial()
        top = len(self.coeffs) + len(other.coeffs) - 2
        if max_degree is not None:
            top = min(top, max_degree)
        if top < 0:
            return IntPolynomial()
        res = [0] * (top + 1)
        for i, a in enumerate(self.coeffs):
            if a == 0 or i > top:
                continue
            for j, b in enumerate(other.coeffs):
                if i + j > top:
                    break
                res[i + j] += a * b
        return IntPolynomial(tuple(res))

    def __call__(self, u: Number) -> Number:
        """Horner evaluation; exact for int and Fraction arguments."""
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * u + c
        return acc

    def coefficient_sum(self) -> int:
        return sum(self.coeffs)

    def to_dict(self) -> dict:
        return {'degree': self.degree, 'coeffs': list(self.coeffs)}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data: dict) -> IntPolynomial:
        coeffs = list(data['coeffs'])
        poly = cls(tuple(coeffs))
        if 'degree' in data and data['degree'] != poly.degree:
            raise ValueError(f"degree {data['degree']} does not match coefficients {coeffs}")
        return poly

    @classmethod
    def from_json(cls, text: str) -> IntPolynomial:
        return cls.from_dict(json.loads(text))

    def __str__(self) -> str:
        if not self.coeffs:
            return '0'
        terms = []
        for power, c in enumerate(self.coeffs):
            if c == 0:
                continue
            if power == 0:
                body = f"{abs(c)}"
            else:
                mag = '' if abs(c) == 1 else f"{abs(c)}"
                body = f"{mag}u" if power == 1 else f"{mag}u^{power}"
            sign = '-' if c < 0 else '+'
            terms.append((sign, body))
        first_sign, first_body = terms[0]
        out = ('-' if first_sign == '-' else '') + first_body
        for sign, body in terms[1:]:
            out += f" {sign} {body}"
        return out
