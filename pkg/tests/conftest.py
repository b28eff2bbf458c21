"""Shared oracles and random-input generators for the test suite.

The oracles here are deliberately independent of the library code paths
they check: the quadrature oracle computes transfer coefficients from
pointwise circle samples, and the cell-expansion oracle recomputes inner
products from a locally reimplemented refinement rule.
"""

from __future__ import annotations

import cmath
import random
from fractions import Fraction

from cantorwave.cantor import CellFunction
from cantorwave.laurent import LaurentPoly, RatC, evaluate


# -- quadrature oracle for the transfer operator ---------------------------------

def quadrature_transfer_coeff(filt, f: LaurentPoly, k: int,
                              grid: int = 729) -> complex:
    """Coefficient k of the transfer image of f, from pointwise samples.

    Evaluates (1/N) sum over the N preimage branches of |m0|^2 f on a
    uniform grid and extracts the Fourier coefficient with a Riemann sum
    (exact for trig polynomials up to aliasing, so the grid only needs to
    exceed the bandwidth).
    """
    n = filt.branch_count
    scale = 2.0**(-filt.half_scale)

    def weight(theta: float) -> float:
        v = sum(c.to_complex() * cmath.exp(2j * cmath.pi * kk * theta)
                for kk, c in filt.numerator.items())
        return abs(v)**2 * scale

    def f_at(theta: float) -> complex:
        return sum(c.to_complex() * cmath.exp(2j * cmath.pi * kk * theta)
                   for kk, c in f.items())

    total = 0.0 + 0.0j
    for m in range(grid):
        th = m / grid
        rf = sum(weight((th + j) / n) * f_at((th + j) / n)
                 for j in range(n)) / n
        total += rf * cmath.exp(-2j * cmath.pi * k * th)
    return total / grid


# -- independent cell expansion oracle --------------------------------------------

def expand_cells(level: int, coeffs: dict[int, Fraction],
                 target: int) -> dict[int, Fraction]:
    """Refine a cell coefficient map to a deeper level (local reimplementation)."""
    out = dict(coeffs)
    for _ in range(target - level):
        nxt: dict[int, Fraction] = {}
        for k, v in out.items():
            for child in (3 * k, 3 * k + 2):
                nxt[child] = nxt.get(child, Fraction(0)) + v
        out = nxt
    return out


def brute_inner(f: CellFunction, g: CellFunction) -> Fraction:
    """Inner product via the expansion oracle (even combined scale only)."""
    total_half = f.half_scale + g.half_scale
    assert total_half % 2 == 0
    lvl = max(f.level, g.level)
    fc = expand_cells(f.level, f.coeffs(), lvl)
    gc = expand_cells(g.level, g.coeffs(), lvl)
    raw = sum((v * gc.get(k, Fraction(0)) for k, v in fc.items()), Fraction(0))
    return raw * Fraction(2)**(total_half // 2 - lvl)


# -- random generators --------------------------------------------------------------

def random_fraction(rng: random.Random, num_bound: int = 6,
                    den_bound: int = 4) -> Fraction:
    num = rng.randint(-num_bound, num_bound)
    den = rng.randint(1, den_bound)
    return Fraction(num, den)


def random_ratc(rng: random.Random) -> RatC:
    return RatC(random_fraction(rng), random_fraction(rng))


def random_poly(rng: random.Random, max_terms: int = 5, span: int = 6,
                real: bool = False) -> LaurentPoly:
    coeffs = {}
    for _ in range(rng.randint(0, max_terms)):
        k = rng.randint(-span, span)
        coeffs[k] = random_fraction(rng) if real else random_ratc(rng)
    return LaurentPoly(coeffs)


def random_cell_function(rng: random.Random, max_level: int = 3,
                         span: int = 12, max_terms: int = 4) -> CellFunction:
    level = rng.randint(0, max_level)
    coeffs = {}
    for _ in range(rng.randint(0, max_terms)):
        coeffs[rng.randint(-span, 3**level + span)] = random_fraction(rng)
    return CellFunction(level, coeffs)


def assert_close(a: complex, b: complex, tol: float = 1e-10) -> None:
    assert abs(a - b) <= tol, f"{a} vs {b} differ by {abs(a - b)}"


__all__ = [
    "quadrature_transfer_coeff", "expand_cells", "brute_inner",
    "random_fraction", "random_ratc", "random_poly", "random_cell_function",
    "assert_close", "evaluate",
]
