"""The explicit square-summable fixed point of the Cantor transfer operator.

The coefficient recursion of the Cantor transfer operator,

    a_k = a_{3k}  +  a_{3k-2}/2  +  a_{3k+2}/2,

has an exact antisymmetric solution supported on the even integers, built
from geometric bands: ``a_n = 2^-k`` for even ``n`` in
``[3^k + 1, 3^{k+1} - 1]`` and ``a_{-n} = -a_n``.  Each band holds ``3^k``
even indices, so the sequence is square summable (``sum a_n^2 <= 8``) but
not absolutely summable, and the trig series it defines is unbounded.

This module builds truncations of that sequence, verifies the fixed-point
recursion exactly on the truncation-safe range, and computes the exact
energies ``S_n`` of the n-step filtered products, which grow like
``(3/2)^n`` (the witness that the fixed point is not bounded).  The
``S_n`` recursion works on integer-scaled coefficients, with the powers of
two reattached at the end, so everything is exact and fast.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .laurent import LaurentPoly
from .transfer import (ConvergenceReport, DEFAULT_MAX_ITER, DEFAULT_TOL,
                       apply, cantor_filter, iterate_to_invariant)


@dataclass(frozen=True)
class CantorFixedSequence:
    """A truncated coefficient sequence, kept on ``|k| <= truncation``.

    The canonical built sequence is antisymmetric with even support; test
    fixtures may perturb coefficients, so those structural facts are checked
    by :meth:`is_antisymmetric` / :meth:`has_even_support` rather than
    enforced here.
    """

    truncation: int
    coeffs: dict[int, Fraction]

    def coefficient(self, k: int) -> Fraction:
        return self.coeffs.get(k, Fraction(0))

    def is_antisymmetric(self) -> bool:
        if self.coeffs.get(0):
            return False
        return all(self.coeffs.get(-k, Fraction(0)) == -v
                   for k, v in self.coeffs.items())

    def has_even_support(self) -> bool:
        return all(k % 2 == 0 for k in self.coeffs)

    def l2_norm_sq(self) -> Fraction:
        return sum((v * v for v in self.coeffs.values()), Fraction(0))

    def l1_partial(self, bound: int) -> Fraction:
        """``sum_{|k| <= bound} |a_k|`` (grows without bound in the full sequence)."""
        return sum((abs(v) for k, v in self.coeffs.items() if abs(k) <= bound),
                   Fraction(0))

    def to_laurent(self, bound: int | None = None) -> LaurentPoly:
        items = self.coeffs.items()
        if bound is not None:
            items = ((k, v) for k, v in items if abs(k) <= bound)
        return LaurentPoly({k: v for k, v in items})


def build_sequence(K: int) -> CantorFixedSequence:
    """Build the banded fixed-point sequence truncated to ``|n| <= K``."""
    if K < 2:
        raise ValueError("truncation K must be at least 2")
    coeffs: dict[int, Fraction] = {}
    k = 0
    while 3**k + 1 <= K:
        lo = 3**k + 1
        hi = min(3**(k + 1) - 1, K)
        if hi % 2:
            hi -= 1
        value = Fraction(1, 2**k)
        for n in range(lo, hi + 1, 2):
            coeffs[n] = value
            coeffs[-n] = -value
        k += 1
    return CantorFixedSequence(K, coeffs)


def fixed_point_residual(seq: CantorFixedSequence) -> tuple[Fraction, int]:
    """Max absolute recursion residual over the truncation-safe range.

    Checks ``a_k - (a_{3k} + a_{3k-2}/2 + a_{3k+2}/2)`` for every
    ``|k| <= (K - 2) // 3`` (so all referenced indices stay inside the
    truncation).  The built sequence must give exactly zero.
    """
    K = seq.truncation
    safe = (K - 2) // 3
    a = seq.coeffs
    zero = Fraction(0)
    half = Fraction(1, 2)
    worst = zero
    for k in range(-safe, safe + 1):
        r = (a.get(k, zero)
             - a.get(3 * k, zero)
             - half * a.get(3 * k - 2, zero)
             - half * a.get(3 * k + 2, zero))
        if abs(r) > worst:
            worst = abs(r)
    return worst, safe


def _growth_guard(K: int, n: int) -> None:
    if 2 * 3**n > K // 3:
        raise ValueError(
            f"growth step n={n} would mix truncation-corrupted indices "
            f"(need 2*3^n <= K/3, K={K})")


def _scaled_ints(seq: CantorFixedSequence) -> tuple[dict[int, int], int]:
    """Clear powers of two: returns (integer coefficients, scale exponent)."""
    shift = 0
    for v in seq.coeffs.values():
        d = v.denominator
        shift = max(shift, d.bit_length() - 1)
    scaled = {}
    for k, v in seq.coeffs.items():
        w = v * 2**shift
        if w.denominator != 1:
            raise ValueError("coefficients must be dyadic rationals")
        scaled[k] = int(w)
    return scaled, shift


def _shifted_sum_iterates(seq: CantorFixedSequence, n_max: int):
    """Yield (n, integer coefficient map) for the cleared recursion
    ``b^(n+1)_k = b^(n)_k + b^(n)_{k - 2*3^n}`` starting from the scaled
    sequence."""
    b, shift = _scaled_ints(seq)
    yield 0, b, shift
    for n in range(n_max):
        step = 2 * 3**n
        nxt: dict[int, int] = {}
        for k, v in b.items():
            nxt[k] = nxt.get(k, 0) + v
            nxt[k + step] = nxt.get(k + step, 0) + v
        b = {k: v for k, v in nxt.items() if v}
        yield n + 1, b, shift


def energy_growth(seq: CantorFixedSequence,
                  n_max: int) -> list[tuple[int, Fraction]]:
    """Exact energies ``S_n`` of the n-step filtered products, n = 0..n_max.

    ``S_n`` is the squared norm of the product of the n-step composite
    filter with the truncated series; the guard refuses any ``n`` whose
    index mixing would reach outside the truncation window.
    """
    if n_max < 0:
        raise ValueError("n_max must be nonnegative")
    _growth_guard(seq.truncation, n_max)
    out = []
    for n, b, shift in _shifted_sum_iterates(seq, n_max):
        total = sum(v * v for v in b.values())
        out.append((n, Fraction(total, 2**(n + 2 * shift))))
    return out


def _tail_is_monotone(b: dict[int, int], K: int, n: int) -> bool:
    lo = 3**n
    if lo % 2:
        lo += 1
    hi = K - 2 * 3**n
    prev = None
    for k in range(lo, hi + 1, 2):
        v = b.get(k, 0)
        if v < 0:
            return False
        if prev is not None and prev < v:
            return False
        prev = v
    return True


def monotone_tail_profile(seq: CantorFixedSequence,
                          n_max: int) -> list[tuple[int, bool]]:
    """Tail-monotonicity verdicts for every step n = 0..n_max (one sweep).

    The verdict at n is whether ``b^(n)_k >= b^(n)_{k+2} >= 0`` for even
    ``k`` in ``[3^n, K - 2*3^n]``, the inductive structure behind the
    growth bound.
    """
    if n_max < 0:
        raise ValueError("n_max must be nonnegative")
    _growth_guard(seq.truncation, n_max)
    return [(n, _tail_is_monotone(b, seq.truncation, n))
            for n, b, _shift in _shifted_sum_iterates(seq, n_max)]


def monotone_tail_check(seq: CantorFixedSequence, n: int) -> bool:
    """True iff after n recursion steps the even tail is decreasing and >= 0."""
    return monotone_tail_profile(seq, n)[-1][1]


@dataclass(frozen=True)
class L1ProbeResult:
    """Outcome of probing a finitely supported candidate fixed point.

    A genuine absolutely-summable fixed point would have to be exactly fixed
    and nonconstant at once; ``coexistence`` records whether that happened
    (it never does: finitely supported functions flow to constants).
    """

    report: ConvergenceReport
    is_fixed: bool
    is_constant: bool
    first_violation: int | None

    @property
    def coexistence(self) -> bool:
        return self.is_fixed and not self.is_constant


def l1_exclusion_probe(p: LaurentPoly,
                       iterations: int = DEFAULT_MAX_ITER,
                       tol: Fraction = DEFAULT_TOL) -> L1ProbeResult:
    """Check that ``p`` is not a nonconstant fixed point, and watch it flow.

    Runs the transfer iteration on ``p`` with the Cantor filter and compares
    ``R p`` with ``p`` coefficientwise; ``first_violation`` localizes the
    smallest-|k| index where the fixed-point recursion fails (``None`` if
    ``p`` is exactly fixed).
    """
    filt = cantor_filter()
    report = iterate_to_invariant(filt, p, max_iter=iterations, tol=tol)
    diff = apply(filt, p) - p
    violations = sorted(diff.support(), key=lambda k: (abs(k), k))
    first = violations[0] if violations else None
    return L1ProbeResult(
        report=report,
        is_fixed=not diff,
        is_constant=p.is_constant(),
        first_violation=first,
    )
