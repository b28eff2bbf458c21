"""Transfer operator for ``z -> z^N`` acting exactly on Laurent coefficients.

For a filter ``m0`` on the circle and the ``N``-fold covering map
``r(z) = z^N``, the transfer operator averages over preimages with weight
``|m0|^2``:

    (R f)(x) = (1/N) * sum_{y^N = x} |m0(y)|^2 f(y).

With ``c = |m0|^2`` written as a Laurent polynomial, the coefficient action
is ``(R f)_k = sum_j c_j f_{Nk - j}``, i.e. the product ``c * f`` decimated
by ``N``.  Everything in this module is exact: filters store their numerator
polynomial over the rationals together with a separate power of ``sqrt(2)``
(``half_scale``), so ``|m0|^2 = autocorrelation(numerator) / 2^half_scale``
is again rational.

The canonical example here is the Cantor low-pass filter
``m0(z) = (1 + z^2)/sqrt(2)`` with ``N = 3``, whose weight polynomial is
``1 + z^2/2 + z^-2/2`` and whose transfer action is
``(R f)_k = f_{3k} + f_{3k-2}/2 + f_{3k+2}/2``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .laurent import LaurentPoly, RatC, autocorrelation

DEFAULT_MAX_ITER = 200
DEFAULT_TOL = Fraction(1, 10**9)


@dataclass(frozen=True, eq=False)
class Filter:
    """A filter ``m0 = numerator / sqrt(2)^half_scale`` for ``r(z) = z^N``.

    The numerator must be a nonzero Laurent polynomial (a nonzero trig
    polynomial has finitely many circle zeros, so the filter is
    non-singular).  ``qmf_valid`` is computed once at construction.
    """

    numerator: LaurentPoly
    half_scale: int
    branch_count: int
    qmf_valid: bool = field(init=False)

    def __post_init__(self):
        if not self.numerator:
            raise ValueError("filter numerator must be nonzero")
        if self.half_scale < 0:
            raise ValueError("half_scale must be nonnegative")
        if self.branch_count < 2:
            raise ValueError("branch_count must be at least 2")
        weight = autocorrelation(self.numerator) * Fraction(1, 2**self.half_scale)
        ok = weight.constant_term() == 1 and all(
            k == 0 or k % self.branch_count != 0 for k in weight.support()
        )
        object.__setattr__(self, "qmf_valid", ok)

    def __eq__(self, other) -> bool:
        if isinstance(other, Filter):
            return (self.numerator == other.numerator
                    and self.half_scale == other.half_scale
                    and self.branch_count == other.branch_count)
        return NotImplemented


def cantor_filter() -> Filter:
    """The Cantor low-pass filter ``(1 + z^2)/sqrt(2)`` with 3 branches."""
    return Filter(LaurentPoly({0: 1, 2: 1}), 1, 3)


def constant_one_filter(branch_count: int) -> Filter:
    """The trivial filter ``m0 = 1`` (uniform preimage averaging)."""
    return Filter(LaurentPoly.one(), 0, branch_count)


def haar_filter() -> Filter:
    """The dyadic Haar low-pass filter ``(1 + z)/sqrt(2)`` with 2 branches."""
    return Filter(LaurentPoly({0: 1, 1: 1}), 1, 2)


def weight_poly(filt: Filter) -> LaurentPoly:
    """Exact weight polynomial ``|m0|^2 = autocorrelation(num) / 2^half_scale``."""
    return autocorrelation(filt.numerator) * Fraction(1, 2**filt.half_scale)


def qmf_check(filt: Filter) -> bool:
    """True iff the preimage average of ``|m0|^2`` is identically 1.

    In coefficients: ``c_{Nk} == delta_{k0}`` for the weight polynomial c,
    which is exactly the statement ``R 1 = 1``.
    """
    return filt.qmf_valid


def apply(filt: Filter, f: LaurentPoly) -> LaurentPoly:
    """Apply the transfer operator once: ``(R f)_k = sum_j c_j f_{Nk-j}``."""
    g = weight_poly(filt) * f
    n = filt.branch_count
    return LaurentPoly({k // n: c for k, c in g.items() if k % n == 0})


@dataclass(frozen=True)
class ConvergenceReport:
    """Trace of ``R^n f`` toward its invariant-measure limit.

    ``iterates`` rows are ``(n, constant_part, nonconstant_l1_mass)``; the
    mass is an exact rational upper bound for the sup-norm distance of the
    iterate to its constant part, so a converged ``limit`` approximates the
    invariant integral of ``f`` with error at most the final mass.
    """

    iterates: tuple[tuple[int, RatC, Fraction], ...]
    limit: RatC | None
    converged: bool
    iterations_used: int

    def final_mass(self) -> Fraction:
        return self.iterates[-1][2]

    def to_json_dict(self) -> dict:
        def fs(x: Fraction) -> str:
            return f"{x.numerator}/{x.denominator}"

        rows = [[n, fs(c.re), fs(c.im), fs(m)] for n, c, m in self.iterates]
        limit = None
        if self.limit is not None:
            limit = {
                "re": fs(self.limit.re),
                "im": fs(self.limit.im),
                "float": [float(self.limit.re), float(self.limit.im)],
            }
        return {
            "iterates": rows,
            "limit": limit,
            "converged": self.converged,
            "iterations_used": self.iterations_used,
        }


def iterate_to_invariant(
    filt: Filter,
    f: LaurentPoly,
    max_iter: int = DEFAULT_MAX_ITER,
    tol: Fraction = DEFAULT_TOL,
) -> ConvergenceReport:
    """Iterate ``R`` on ``f`` until the nonconstant mass drops to ``tol``.

    Requires a QMF filter (so that constants are fixed and the constant
    parts of the iterates converge to the invariant integral).  Never
    truncates silently: if ``max_iter`` is hit first, ``converged`` is False
    and ``limit`` is None.
    """
    if not filt.qmf_valid:
        raise ValueError("iterate_to_invariant requires a QMF-valid filter")
    if max_iter < 0:
        raise ValueError("max_iter must be nonnegative")
    tol = Fraction(tol)

    rows = [(0, f.constant_term(), f.nonconstant_l1())]
    used = 0
    current = f
    while rows[-1][2] > tol and used < max_iter:
        current = apply(filt, current)
        used += 1
        rows.append((used, current.constant_term(), current.nonconstant_l1()))
    converged = rows[-1][2] <= tol
    return ConvergenceReport(
        iterates=tuple(rows),
        limit=rows[-1][1] if converged else None,
        converged=converged,
        iterations_used=used,
    )


def composite_filter(filt: Filter, n: int) -> Filter:
    """The n-step filter ``m0(z) m0(z^N) ... m0(z^{N^{n-1}})``.

    ``n = 0`` gives the constant filter 1; the half scale accumulates to
    ``n * half_scale``.
    """
    if n < 0:
        raise ValueError("composite order must be nonnegative")
    num = LaurentPoly.one()
    for j in range(n):
        num = num * filt.numerator.subs_power(filt.branch_count**j)
    return Filter(num, n * filt.half_scale, filt.branch_count)


def weighted_energy(filt: Filter, h: LaurentPoly, n: int) -> Fraction:
    """Exact ``integral |m0^(n)|^2 |h|^2 dmu`` (the squared norm of ``m0^(n) h``).

    Computed by Parseval on the coefficient product: with ``b`` the Cauchy
    product of the n-step numerator and ``h``, the value is
    ``sum_k |b_k|^2 / 2^(n * half_scale)``.
    """
    comp = composite_filter(filt, n)
    b = comp.numerator * h
    total = sum((c.abs2() for _, c in b.items()), Fraction(0))
    return total / 2**comp.half_scale
