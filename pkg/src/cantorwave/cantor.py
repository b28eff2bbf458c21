"""Exact cell model of the wavelet representation on the triadic Cantor set.

Let ``C`` be the middle-third Cantor set and ``C_{n,k} = (C + k) / 3^n`` a
*triadic cell*.  Under the Hausdorff measure of dimension ``log_3 2`` the
cell ``C_{n,k}`` has measure ``2^-n``, cells at one level are a.e. disjoint
for distinct offsets, and each cell splits into two children:

    C_{n,k} = C_{n+1,3k}  u  C_{n+1,3k+2}      (disjoint).

A :class:`CellFunction` is a finite rational combination of cells at a single
level, together with a half-power-of-two scale exponent that absorbs every
``sqrt(2)`` produced by the dilation operator.  This keeps all coefficients,
norms and inner products inside the rationals; the scale exponent is
canonicalized to 0 or 1 by folding its even part into the coefficients.

The three operators of the representation act on cells by index arithmetic:

    U  (dilation)     U chi_{C_{n,k}}   = 2^-1/2 chi_{C_{n-1,k}}
    T  (translation)  T^m chi_{C_{n,k}} = chi_{C_{n,k + m 3^n}}
    M  (cascade)      M chi_{C_{n,k}}   = chi_{C_{n+1,k}} + chi_{C_{n+1,k + 2*3^n}}

``M = U^-1 pi(m0)`` iterates the refinement equation
``xi(x) = xi(3x) + xi(3x - 2)``; its fixed points with bounded support are
exactly the rational multiples of ``chi_C`` (checked at finite resolution by
:func:`refinement_nullspace`).  Correlation polynomials intertwine ``M``
with the transfer operator of the Cantor filter, which is what
:func:`cascade_divergence` cross-checks.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Iterable, Mapping

from .laurent import LaurentPoly
from . import transfer
from .transfer import cantor_filter


@dataclass(frozen=True)
class Cell:
    """The triadic cell ``C_{level,offset} = (C + offset) / 3^level``."""

    level: int
    offset: int

    def measure(self) -> Fraction:
        """Hausdorff measure ``2^-level`` (``2^|level|`` for coarse cells)."""
        return Fraction(2)**(-self.level)

    def children(self) -> tuple["Cell", "Cell"]:
        """The two disjoint subcells one level down."""
        return (Cell(self.level + 1, 3 * self.offset),
                Cell(self.level + 1, 3 * self.offset + 2))


def _frac(v) -> Fraction:
    if isinstance(v, Fraction):
        return v
    return Fraction(v)


class CellFunction:
    """value = sqrt(2)^half_scale * sum_k coeffs[k] * chi_{C_{level,k}}.

    Canonical form: level >= 0 (coarse cells are refined away using the cell
    splitting rule), no zero coefficients, and half_scale in {0, 1} (the even
    part is folded into the coefficients as a power of 2).  The zero function
    is level 0, empty coefficients, half_scale 0.
    """

    __slots__ = ("_level", "_coeffs", "_half2")

    def __init__(self, level: int, coeffs: Mapping[int, object],
                 half_scale: int = 0):
        canon: dict[int, Fraction] = {}
        for k, v in coeffs.items():
            f = _frac(v)
            if f:
                canon[int(k)] = f
        while level < 0 and canon:
            nxt: dict[int, Fraction] = {}
            for k, v in canon.items():
                nxt[3 * k] = nxt.get(3 * k, Fraction(0)) + v
                nxt[3 * k + 2] = nxt.get(3 * k + 2, Fraction(0)) + v
            canon = {k: v for k, v in nxt.items() if v}
            level += 1
        if not canon:
            level, half_scale = 0, 0
        else:
            fold, half_scale = divmod(half_scale, 2)
            if fold:
                factor = Fraction(2)**fold
                canon = {k: v * factor for k, v in canon.items()}
        self._level = max(level, 0)
        self._coeffs = canon
        self._half2 = half_scale

    # -- constructors ------------------------------------------------------

    @classmethod
    def _raw(cls, level: int, coeffs: dict[int, Fraction],
             half2: int) -> "CellFunction":
        """Internal constructor for inputs already in canonical form."""
        obj = cls.__new__(cls)
        obj._level = level
        obj._coeffs = coeffs
        obj._half2 = half2
        return obj

    @staticmethod
    def zero() -> "CellFunction":
        return CellFunction(0, {})

    @staticmethod
    def indicator(level: int = 0, offset: int = 0) -> "CellFunction":
        return CellFunction(level, {offset: 1})

    # -- inspection --------------------------------------------------------

    @property
    def level(self) -> int:
        return self._level

    @property
    def half_scale(self) -> int:
        return self._half2

    def coefficient(self, offset: int) -> Fraction:
        return self._coeffs.get(offset, Fraction(0))

    def support(self) -> tuple[int, ...]:
        return tuple(sorted(self._coeffs))

    def coeffs(self) -> dict[int, Fraction]:
        return dict(self._coeffs)

    def is_zero(self) -> bool:
        return not self._coeffs

    def __bool__(self) -> bool:
        return bool(self._coeffs)

    def __eq__(self, other) -> bool:
        if not isinstance(other, CellFunction):
            return NotImplemented
        if self.is_zero() or other.is_zero():
            return self.is_zero() and other.is_zero()
        if self._half2 != other._half2:
            return False
        lvl = max(self._level, other._level)
        return refine(self, lvl)._coeffs == refine(other, lvl)._coeffs

    def __repr__(self) -> str:
        if self.is_zero():
            return "CellFunction(0)"
        body = ", ".join(f"{k}: {v}" for k, v in sorted(self._coeffs.items()))
        tag = f", half_scale={self._half2}" if self._half2 else ""
        return f"CellFunction(level={self._level}, {{{body}}}{tag})"

    # -- linear structure ----------------------------------------------------

    def __neg__(self) -> "CellFunction":
        return CellFunction(self._level,
                            {k: -v for k, v in self._coeffs.items()},
                            self._half2)

    def __add__(self, other: "CellFunction") -> "CellFunction":
        if not isinstance(other, CellFunction):
            return NotImplemented
        if self.is_zero():
            return other
        if other.is_zero():
            return self
        if self._half2 != other._half2:
            raise ValueError(
                "cannot add cell functions with different sqrt(2) parity")
        lvl = max(self._level, other._level)
        a, b = refine(self, lvl), refine(other, lvl)
        out = dict(a._coeffs)
        for k, v in b._coeffs.items():
            out[k] = out.get(k, Fraction(0)) + v
        return CellFunction(lvl, out, self._half2)

    def __sub__(self, other: "CellFunction") -> "CellFunction":
        return self + (-other)

    def __mul__(self, scalar) -> "CellFunction":
        f = _frac(scalar)
        return CellFunction(self._level,
                            {k: v * f for k, v in self._coeffs.items()},
                            self._half2)

    __rmul__ = __mul__

    # -- serialization -----------------------------------------------------

    def to_json_dict(self) -> dict:
        return {
            "level": self._level,
            "coeffs": {str(k): [v.numerator, v.denominator]
                       for k, v in sorted(self._coeffs.items())},
            "half_scale": self._half2,
        }

    @staticmethod
    def from_json_dict(data: Mapping) -> "CellFunction":
        coeffs = {int(k): Fraction(num, den)
                  for k, (num, den) in data["coeffs"].items()}
        return CellFunction(int(data["level"]), coeffs,
                            int(data.get("half_scale", 0)))


def chi_C() -> CellFunction:
    """The scaling function: the characteristic function of the Cantor set."""
    return CellFunction.indicator(0, 0)


# -- elementary operators ----------------------------------------------------

def refine(f: CellFunction, target_level: int) -> CellFunction:
    """Rewrite ``f`` on cells at ``target_level`` using the splitting rule.

    Norms and inner products are preserved exactly.  Raises if the target is
    coarser than the current level.
    """
    if target_level < f.level:
        raise ValueError(
            f"cannot refine level {f.level} down to {target_level}")
    if f.is_zero():
        return f
    coeffs = f._coeffs
    for _ in range(target_level - f.level):
        nxt: dict[int, Fraction] = {}
        for k, v in coeffs.items():
            nxt[3 * k] = v
            nxt[3 * k + 2] = v
        coeffs = nxt
    return CellFunction._raw(target_level, dict(coeffs), f._half2)


def dilate(f: CellFunction) -> CellFunction:
    """The unitary dilation ``U f(x) = 2^-1/2 f(x/3)`` on cells."""
    return CellFunction(f.level - 1, f._coeffs, f.half_scale - 1)


def dilate_inverse(f: CellFunction) -> CellFunction:
    """``U^-1 f(x) = sqrt(2) f(3x)``; inverse of :func:`dilate`."""
    return CellFunction(f.level + 1, f._coeffs, f.half_scale + 1)


def scale_sqrt2(f: CellFunction, half_powers: int = 1) -> CellFunction:
    """Multiply by ``sqrt(2)^half_powers`` (exact bookkeeping)."""
    return CellFunction(f.level, f._coeffs, f.half_scale + half_powers)


def translate(f: CellFunction, m: int) -> CellFunction:
    """The unitary translation ``T^m f(x) = f(x - m)`` on cells."""
    if m == 0:
        return f
    step = m * 3**f.level
    return CellFunction(f.level,
                        {k + step: v for k, v in f._coeffs.items()},
                        f.half_scale)


def pi_apply(p: LaurentPoly, f: CellFunction) -> CellFunction:
    """Apply ``pi(p) = sum_k p_k T^k`` for a rational polynomial ``p``."""
    out: dict[int, Fraction] = {}
    base = 3**f.level
    for k, c in p.items():
        if c.im != 0:
            raise ValueError("pi_apply requires real rational coefficients")
        step = k * base
        for off, v in f._coeffs.items():
            key = off + step
            out[key] = out.get(key, Fraction(0)) + c.re * v
    return CellFunction(f.level, out, f.half_scale)


def cascade(f: CellFunction) -> CellFunction:
    """The cascade operator ``M xi(x) = xi(3x) + xi(3x - 2)``.

    Equals ``U^-1 pi(m0)`` for the Cantor filter; the two sqrt(2) factors
    cancel, so the result is rational at one level deeper.
    """
    out: dict[int, Fraction] = {}
    shift = 2 * 3**f.level
    for k, v in f._coeffs.items():
        out[k] = out.get(k, Fraction(0)) + v
        out[k + shift] = out.get(k + shift, Fraction(0)) + v
    return CellFunction(f.level + 1, out, f.half_scale)


# -- inner products and correlation ------------------------------------------

def _scale_factor(total_half: int, raw: Fraction) -> Fraction:
    if raw == 0:
        return Fraction(0)
    if total_half % 2:
        raise ValueError("inner product is irrational: sqrt(2) does not cancel")
    return raw * Fraction(2)**(total_half // 2)


def inner(f: CellFunction, g: CellFunction) -> Fraction:
    """Exact L2 inner product; raises if a lone sqrt(2) survives."""
    if f.is_zero() or g.is_zero():
        return Fraction(0)
    lvl = max(f.level, g.level)
    a, b = refine(f, lvl), refine(g, lvl)
    raw = Fraction(0)
    small, big = (a._coeffs, b._coeffs) if len(a._coeffs) <= len(b._coeffs) \
        else (b._coeffs, a._coeffs)
    for k, v in small.items():
        w = big.get(k)
        if w is not None:
            raw += v * w
    return _scale_factor(f.half_scale + g.half_scale, raw * Fraction(2)**(-lvl))


def norm_sq(f: CellFunction) -> Fraction:
    """Exact squared L2 norm ``2^half_scale * 2^-level * sum coeff^2``."""
    total = sum((v * v for v in f._coeffs.values()), Fraction(0))
    return total * Fraction(2)**(f.half_scale - f.level)


def correlation(f: CellFunction, g: CellFunction) -> LaurentPoly:
    """The correlation polynomial ``p`` with ``p_m = <T^-m f, g>``.

    The constant term of ``correlation(f, f)`` is the squared norm; the
    whole polynomial is nonnegative on the circle and intertwines the
    cascade operator with the Cantor transfer operator:
    ``correlation(M f, M g) = R correlation(f, g)``.
    """
    if f.is_zero() or g.is_zero():
        return LaurentPoly.zero()
    lvl = max(f.level, g.level)
    a, b = refine(f, lvl), refine(g, lvl)
    base = 3**lvl
    acc: dict[int, Fraction] = {}
    for kf, vf in a._coeffs.items():
        for kg, vg in b._coeffs.items():
            d = kf - kg
            if d % base == 0:
                m = d // base
                acc[m] = acc.get(m, Fraction(0)) + vf * vg
    total_half = f.half_scale + g.half_scale
    unit = Fraction(2)**(-lvl)
    out = {m: _scale_factor(total_half, raw * unit)
           for m, raw in acc.items() if raw}
    return LaurentPoly(out)


# -- cascade iteration -------------------------------------------------------

def cascade_divergence(f: CellFunction, n_max: int) -> list[tuple[int, Fraction]]:
    """Exact squared increments ``|M^{n+1} f - M^n f|^2`` for n = 0..n_max.

    Each value equals the Haar integral of the n-th transfer iterate of the
    correlation polynomial of ``M f - f`` with itself, which is the
    cross-check used by the tests and the CLI.
    """
    if n_max < 0:
        raise ValueError("n_max must be nonnegative")
    out = []
    g = f
    for n in range(n_max + 1):
        mg = cascade(g)
        out.append((n, norm_sq(mg - g)))
        g = mg
    return out


# -- refinement-equation nullspace -------------------------------------------

def _rref_nullspace(rows: Iterable[dict[int, Fraction]],
                    columns: list[int]) -> list[dict[int, Fraction]]:
    """Exact nullspace basis of a sparse rational matrix.

    Incremental reduced row echelon form with dictionary rows; pivot choice
    is the smallest column index, so the result is deterministic.
    """
    pivots: dict[int, dict[int, Fraction]] = {}
    for row in rows:
        row = {c: v for c, v in row.items() if v}
        while row:
            hit = None
            for c in sorted(row):
                if c in pivots:
                    hit = c
                    break
            if hit is None:
                break
            factor = row.pop(hit)
            for c, v in pivots[hit].items():
                if c == hit:
                    continue
                nv = row.get(c, Fraction(0)) - factor * v
                if nv:
                    row[c] = nv
                else:
                    row.pop(c, None)
        if not row:
            continue
        p = min(row)
        inv = Fraction(1) / row[p]
        row = {c: v * inv for c, v in row.items()}
        for q, prow in pivots.items():
            fac = prow.get(p)
            if fac is None:
                continue
            prow.pop(p)
            for c, v in row.items():
                if c == p:
                    continue
                nv = prow.get(c, Fraction(0)) - fac * v
                if nv:
                    prow[c] = nv
                else:
                    prow.pop(c, None)
        pivots[p] = row

    basis = []
    for free in columns:
        if free in pivots:
            continue
        vec = {free: Fraction(1)}
        for p, prow in pivots.items():
            coeff = prow.get(free)
            if coeff:
                vec[p] = -coeff
        basis.append(vec)
    return basis


def _primitive(vec: dict[int, Fraction]) -> dict[int, Fraction]:
    """Clear denominators, divide by the content, make the lead positive."""
    lcm = 1
    for v in vec.values():
        lcm = lcm * v.denominator // gcd(lcm, v.denominator)
    ints = {k: int(v * lcm) for k, v in vec.items()}
    g = 0
    for v in ints.values():
        g = gcd(g, abs(v))
    if g > 1:
        ints = {k: v // g for k, v in ints.items()}
    if ints[min(ints)] < 0:
        ints = {k: -v for k, v in ints.items()}
    return {k: Fraction(v) for k, v in ints.items()}


def refinement_nullspace(level: int, support_lo: int,
                         support_hi: int) -> list[CellFunction]:
    """Exact basis of finite-resolution solutions of ``M f = f``.

    Unknowns are cell coefficients at ``level`` with offsets in
    ``[support_lo * 3^level, support_hi * 3^level]``; the fixed-point
    equation is imposed coefficientwise at ``level + 1`` (the cascade raises
    the level, so the identity side is refined once).  Basis vectors are
    returned as primitive integer cell functions, ordered by leading offset.
    """
    if level < 1:
        raise ValueError("level must be at least 1")
    base = 3**level
    lo, hi = support_lo * base, support_hi * base
    columns = list(range(lo, hi + 1))
    if not columns:
        return []
    window = set(columns)

    rows: dict[int, dict[int, Fraction]] = {}

    def bump(j: int, col: int, delta: int) -> None:
        row = rows.setdefault(j, {})
        nv = row.get(col, Fraction(0)) + delta
        if nv:
            row[col] = nv
        else:
            row.pop(col, None)

    shift = 2 * base
    for k in columns:
        bump(k, k, +1)
        bump(k + shift, k, +1)
        bump(3 * k, k, -1)
        bump(3 * k + 2, k, -1)

    ordered = [rows[j] for j in sorted(rows) if rows[j]]
    basis = _rref_nullspace(ordered, columns)
    cells = [CellFunction(level, _primitive(vec)) for vec in basis]
    cells.sort(key=lambda c: c.support())
    return cells


# -- multiresolution ----------------------------------------------------------

def mra_project(f: CellFunction, n: int) -> CellFunction:
    """Orthogonal projection onto ``V_n``, the span of level-n cells.

    ``V_n = U^-n V_0`` is spanned by the orthonormal family
    ``sqrt(2)^n chi_{C_{n,k}}``, so the projection sums, for each level-n
    cell, the f-mass of its descendants.  Exact; commutes with the scale
    exponent.
    """
    if n < 0:
        raise ValueError("projection level must be nonnegative")
    if f.is_zero():
        return CellFunction.zero()
    lvl = max(f.level, n)
    fr = refine(f, lvl)
    depth = lvl - n
    acc: dict[int, Fraction] = {}
    for j, v in fr._coeffs.items():
        k = j
        ok = True
        for _ in range(depth):
            r = k % 3
            if r == 1:
                ok = False
                break
            k = (k - r) // 3
        if ok:
            acc[k] = acc.get(k, Fraction(0)) + v
    unit = Fraction(2)**(n - lvl)
    coeffs = {k: v * unit for k, v in acc.items() if v}
    return CellFunction(n, coeffs, f.half_scale)


def detail_basis(level_window: int) -> list[tuple[CellFunction, Fraction]]:
    """Orthogonal rational generators of the detail space ``V_1 - V_0``.

    Restricted to level-1 cells with offsets in ``[0, 3^level_window)``.
    Per integer translate ``k`` the two generators are the oscillation
    ``chi_{C_{1,3k}} - chi_{C_{1,3k+2}}`` and the middle cell
    ``chi_{C_{1,3k+1}}`` (level-0 cells refine onto offsets 0 and 2 mod 3
    only, so middle cells never meet ``V_0``).  Returned unnormalized with
    exact squared norms; the count is 2 per translate, the preimage
    multiplicity of the triple cover minus one.
    """
    if level_window < 1:
        raise ValueError("level_window must be at least 1")
    out: list[tuple[CellFunction, Fraction]] = []
    for k in range(3**(level_window - 1)):
        osc = CellFunction(1, {3 * k: 1, 3 * k + 2: -1})
        mid = CellFunction(1, {3 * k + 1: 1})
        out.append((osc, Fraction(1)))
        out.append((mid, Fraction(1, 2)))
    return out


# -- cross-module helpers ------------------------------------------------------

def transfer_side_series(f: CellFunction, n_max: int) -> list[tuple[int, Fraction]]:
    """The cascade increment series computed through the transfer operator.

    Returns the Haar integrals of ``R^n h0`` for ``h0`` the self-correlation
    of ``M f - f``; by the intertwining identity this must equal
    :func:`cascade_divergence` term by term.
    """
    d = cascade(f) - f
    h0 = correlation(d, d)
    filt = cantor_filter()
    out = []
    current = h0
    for n in range(n_max + 1):
        out.append((n, current.constant_term().re))
        current = transfer.apply(filt, current)
    return out
