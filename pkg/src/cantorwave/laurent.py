"""Exact sparse Laurent polynomial arithmetic over rational complex coefficients.

A Laurent polynomial ``p(z) = sum_k p_k z^k`` (finitely many nonzero ``p_k``)
is stored as a dictionary mapping integer exponents to nonzero :class:`RatC`
coefficients.  All arithmetic is exact: coefficients are pairs of
``fractions.Fraction`` values, so identities such as ``(a + b) - b == a`` hold
with no rounding.  The canonical form never stores a zero coefficient, which
makes equality a plain dictionary comparison.

On the unit circle ``z = e^{2 pi i theta}``, the normalized Haar measure
integrates ``z^k`` to ``delta_{k0}``, so integration against Haar measure is
coefficient extraction at index 0 (:func:`haar_integral`) and the L2 inner
product of two polynomials is the coefficient-wise sum
``sum_k p_k conj(q_k)`` (:func:`inner_product`).

Irrational scale factors (the ``sqrt(2)`` of low-pass filters) are never
mixed into coefficients; callers keep them as separate half-power exponents
so that everything here stays inside the rationals.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Mapping, Union

RationalLike = Union[int, Fraction]
CoeffLike = Union[int, Fraction, "RatC", tuple]


def _frac(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    return Fraction(value)


@dataclass(frozen=True, eq=False)
class RatC:
    """A complex number with exact rational real and imaginary parts."""

    re: Fraction
    im: Fraction

    @staticmethod
    def of(value: CoeffLike) -> "RatC":
        """Coerce an int, Fraction, (re, im) pair, or RatC to a RatC."""
        if isinstance(value, RatC):
            return value
        if isinstance(value, tuple):
            re, im = value
            return RatC(_frac(re), _frac(im))
        return RatC(_frac(value), Fraction(0))

    def __add__(self, other: CoeffLike) -> "RatC":
        o = RatC.of(other)
        return RatC(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, other: CoeffLike) -> "RatC":
        o = RatC.of(other)
        return RatC(self.re - o.re, self.im - o.im)

    def __rsub__(self, other: CoeffLike) -> "RatC":
        return RatC.of(other) - self

    def __mul__(self, other: CoeffLike) -> "RatC":
        o = RatC.of(other)
        return RatC(self.re * o.re - self.im * o.im,
                    self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def __truediv__(self, other: CoeffLike) -> "RatC":
        o = RatC.of(other)
        d = o.abs2()
        if d == 0:
            raise ZeroDivisionError("division by zero RatC")
        num = self * o.conjugate()
        return RatC(num.re / d, num.im / d)

    def __neg__(self) -> "RatC":
        return RatC(-self.re, -self.im)

    def __eq__(self, other) -> bool:
        if isinstance(other, (RatC, int, Fraction, tuple)):
            o = RatC.of(other)
            return self.re == o.re and self.im == o.im
        return NotImplemented

    def __hash__(self):
        if self.im == 0:
            return hash(self.re)
        return hash((self.re, self.im))

    def __bool__(self) -> bool:
        return self.re != 0 or self.im != 0

    def conjugate(self) -> "RatC":
        return RatC(self.re, -self.im)

    def abs2(self) -> Fraction:
        """Exact squared modulus ``re^2 + im^2``."""
        return self.re * self.re + self.im * self.im

    def l1(self) -> Fraction:
        """Exact rational bound ``|re| + |im| >= |self|``."""
        return abs(self.re) + abs(self.im)

    def is_real(self) -> bool:
        return self.im == 0

    def to_complex(self) -> complex:
        return complex(self.re) + 1j * complex(self.im)

    def __repr__(self) -> str:
        if self.im == 0:
            return str(self.re)
        return f"({self.re}{'+' if self.im >= 0 else ''}{self.im}j)"


_ZERO = RatC(Fraction(0), Fraction(0))


class LaurentPoly:
    """Finitely supported ``sum_k p_k z^k`` with :class:`RatC` coefficients.

    Instances are immutable value objects; all operators return new
    polynomials.  Two polynomials are equal iff their canonical sparse maps
    are equal.
    """

    __slots__ = ("_coeffs",)

    def __init__(self, coeffs: Mapping[int, CoeffLike] | None = None):
        canon: dict[int, RatC] = {}
        if coeffs:
            for k, v in coeffs.items():
                c = RatC.of(v)
                if c:
                    canon[int(k)] = c
        self._coeffs = canon

    # -- constructors ------------------------------------------------------

    @classmethod
    def _raw(cls, coeffs: dict[int, RatC]) -> "LaurentPoly":
        """Internal constructor for maps already free of zero values."""
        obj = cls.__new__(cls)
        obj._coeffs = coeffs
        return obj

    @staticmethod
    def zero() -> "LaurentPoly":
        return LaurentPoly()

    @staticmethod
    def one() -> "LaurentPoly":
        return LaurentPoly({0: 1})

    @staticmethod
    def monomial(k: int, coeff: CoeffLike = 1) -> "LaurentPoly":
        return LaurentPoly({k: coeff})

    @staticmethod
    def constant(value: CoeffLike) -> "LaurentPoly":
        return LaurentPoly({0: value})

    # -- inspection --------------------------------------------------------

    def __getitem__(self, k: int) -> RatC:
        return self._coeffs.get(k, _ZERO)

    def items(self) -> Iterator[tuple[int, RatC]]:
        return iter(sorted(self._coeffs.items()))

    def support(self) -> tuple[int, ...]:
        return tuple(sorted(self._coeffs))

    def __len__(self) -> int:
        return len(self._coeffs)

    def __bool__(self) -> bool:
        return bool(self._coeffs)

    def is_constant(self) -> bool:
        return all(k == 0 for k in self._coeffs)

    def constant_term(self) -> RatC:
        return self._coeffs.get(0, _ZERO)

    def is_real(self) -> bool:
        return all(c.im == 0 for c in self._coeffs.values())

    def is_hermitian(self) -> bool:
        """True iff ``p_{-k} == conj(p_k)`` for all k (real-valued on the circle)."""
        return all(self[-k] == c.conjugate() for k, c in self._coeffs.items())

    def nonconstant_l1(self) -> Fraction:
        """Exact ``sum_{k != 0} (|re p_k| + |im p_k|)``.

        Dominates the sup-norm distance of the polynomial to its constant
        term on the circle, and equals the plain l1 tail mass whenever the
        coefficients are real.
        """
        return sum((c.l1() for k, c in self._coeffs.items() if k != 0),
                   Fraction(0))

    # -- arithmetic --------------------------------------------------------

    def __eq__(self, other) -> bool:
        if isinstance(other, LaurentPoly):
            return self._coeffs == other._coeffs
        return NotImplemented

    def __neg__(self) -> "LaurentPoly":
        return LaurentPoly({k: -c for k, c in self._coeffs.items()})

    def __add__(self, other: "LaurentPoly") -> "LaurentPoly":
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        out = dict(self._coeffs)
        for k, c in other._coeffs.items():
            s = out.get(k, _ZERO) + c
            if s:
                out[k] = s
            else:
                out.pop(k, None)
        return LaurentPoly._raw(out)

    def __sub__(self, other: "LaurentPoly") -> "LaurentPoly":
        return self + (-other)

    def __mul__(self, other) -> "LaurentPoly":
        if isinstance(other, LaurentPoly):
            out: dict[int, RatC] = {}
            for k1, c1 in self._coeffs.items():
                for k2, c2 in other._coeffs.items():
                    k = k1 + k2
                    s = out.get(k, _ZERO) + c1 * c2
                    if s:
                        out[k] = s
                    else:
                        out.pop(k, None)
            return LaurentPoly._raw(out)
        if isinstance(other, (int, Fraction, RatC, tuple)):
            c = RatC.of(other)
            return LaurentPoly({k: v * c for k, v in self._coeffs.items()})
        return NotImplemented

    __rmul__ = __mul__

    def conjugate(self) -> "LaurentPoly":
        """``conj(p)(z) = sum_k conj(p_k) z^{-k}`` (conjugation on the circle)."""
        return LaurentPoly({-k: c.conjugate() for k, c in self._coeffs.items()})

    def subs_power(self, m: int) -> "LaurentPoly":
        """Substitute ``z -> z^m``, i.e. move coefficient k to index m*k."""
        if m == 0:
            raise ValueError("substitution exponent must be nonzero")
        return LaurentPoly({m * k: c for k, c in self._coeffs.items()})

    def __repr__(self) -> str:
        if not self._coeffs:
            return "LaurentPoly(0)"
        parts = []
        for k, c in self.items():
            if k == 0:
                parts.append(f"{c!r}")
            elif k == 1:
                parts.append(f"{c!r}*z")
            else:
                parts.append(f"{c!r}*z^{k}")
        return "LaurentPoly(" + " + ".join(parts) + ")"

    # -- serialization -----------------------------------------------------

    def to_json_dict(self) -> dict[str, list[int]]:
        """Exact JSON form {"k": [re_num, re_den, im_num, im_den], ...}."""
        return {
            str(k): [c.re.numerator, c.re.denominator,
                     c.im.numerator, c.im.denominator]
            for k, c in self.items()
        }

    @staticmethod
    def from_json_dict(data: Mapping[str, Iterable[int]]) -> "LaurentPoly":
        coeffs = {}
        for k, quad in data.items():
            rn, rd, im_n, im_d = quad
            coeffs[int(k)] = RatC(Fraction(rn, rd), Fraction(im_n, im_d))
        return LaurentPoly(coeffs)


def autocorrelation(p: LaurentPoly) -> LaurentPoly:
    """Return ``p(z) * conj(p)(z)``, the squared modulus on the circle.

    The result has Hermitian coefficients (``c_{-k} == conj(c_k)``) and is
    nonnegative as a function on the circle.
    """
    return p * p.conjugate()


def haar_integral(p: LaurentPoly) -> RatC:
    """Integrate against normalized Haar measure: the coefficient at index 0."""
    return p.constant_term()


def inner_product(p: LaurentPoly, q: LaurentPoly) -> RatC:
    """L2 inner product on the circle, ``sum_k p_k conj(q_k)``, exact."""
    return haar_integral(p * q.conjugate())


def evaluate(p: LaurentPoly, theta: RationalLike) -> complex:
    """Evaluate ``p`` at ``z = e^{2 pi i theta}`` in floating point.

    ``theta`` is an exact rational angle in turns.  Each term reduces
    ``k * theta`` mod 1 exactly before exponentiating, so the absolute error
    is bounded by a small multiple of the support size times machine epsilon.
    """
    th = _frac(theta)
    total = 0.0 + 0.0j
    for k, c in p._coeffs.items():
        phase = (k * th) % 1
        total += c.to_complex() * cmath.exp(2j * cmath.pi * float(phase))
    return total
