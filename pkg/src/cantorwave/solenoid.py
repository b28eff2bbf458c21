"""Random walks on inverse-limit solenoids of circle covering maps.

The solenoid of ``r(x) = N x mod 1`` is the space of backward orbits
``(x_0, x_1, ...)`` with ``r(x_{n+1}) = x_n``.  A QMF filter ``m0`` turns
backward-orbit selection into a Markov chain: from ``x`` the walk moves to a
preimage ``y`` with probability ``W(y) = |m0(y)|^2 / N``, and the product
measure of those steps over a base point drawn from Haar measure is the
natural invariant measure of the shift.

Points carry exact rational angles (in turns), so preimage enumeration and
backward orbits are exact; only the filter amplitude is evaluated in
floating point.  The QMF identity makes the true weight sum equal 1, so the
observed float defect is logged and a defect above ``1e-9`` raises (it
indicates a broken filter, not rounding).

Randomness is counter-based: every sampled path derives its own Philox
stream from ``(seed, path index)``, so results are reproducible and
independent of sampling order.
"""

from __future__ import annotations

import math
from abc import ABC, abstractmethod
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, NamedTuple, Sequence

import numpy as np

from .laurent import LaurentPoly, evaluate
from .transfer import Filter, apply, cantor_filter, constant_one_filter

DEFECT_HARD_LIMIT = 1e-9
TREE_BUDGET = 600_000


class Point(NamedTuple):
    """A point of the base space: a circle component and an exact angle."""

    component: int
    angle: Fraction


class SolenoidSystem(ABC):
    """A finite union of circles with the covering map ``x -> N x mod 1``."""

    n_components: int
    branch_count: int
    name: str

    @abstractmethod
    def filter_value(self, point: Point) -> complex:
        """Evaluate ``m0`` at the point (the only floating-point step)."""

    @property
    def unit_filter(self) -> bool:
        """True iff ``m0`` is identically 1 on every component."""
        return False

    def forward(self, point: Point) -> Point:
        return Point(point.component, (self.branch_count * point.angle) % 1)

    def preimages(self, point: Point) -> list[Point]:
        """The ``N`` preimages on the same component, exact in rationals."""
        n = self.branch_count
        return [Point(point.component, (point.angle + j) / n)
                for j in range(n)]

    def base_sample(self, rng: np.random.Generator) -> Point:
        """Draw from the base measure: uniform component, uniform angle.

        The float in [0, 1) is converted to an exact dyadic rational so the
        sampled point still supports exact dynamics.
        """
        comp = int(rng.integers(self.n_components))
        return Point(comp, Fraction(float(rng.random())))


class CircleSystem(SolenoidSystem):
    """One circle with a transfer filter (default branch count from it)."""

    def __init__(self, filt: Filter):
        self.filter = filt
        self.n_components = 1
        self.branch_count = filt.branch_count
        self.name = "circle"

    @property
    def unit_filter(self) -> bool:
        return self.filter.numerator == LaurentPoly.one() \
            and self.filter.half_scale == 0

    def filter_value(self, point: Point) -> complex:
        value = evaluate(self.filter.numerator, point.angle)
        return value / math.sqrt(2.0)**self.filter.half_scale


class TwoCircleSystem(SolenoidSystem):
    """Two disjoint circles, each with ``m0 = 1``: the covering map is not
    ergodic because each component is invariant."""

    def __init__(self, branch_count: int = 3):
        self.n_components = 2
        self.branch_count = branch_count
        self.name = "two-circle"

    @property
    def unit_filter(self) -> bool:
        return True

    def filter_value(self, point: Point) -> complex:
        return 1.0 + 0.0j


def cantor_system() -> CircleSystem:
    sys_ = CircleSystem(cantor_filter())
    sys_.name = "cantor"
    return sys_


def unit_circle_system(branch_count: int = 3) -> CircleSystem:
    return CircleSystem(constant_one_filter(branch_count))


# -- transition kernel ---------------------------------------------------------

@dataclass(frozen=True)
class TransitionWeights:
    """Renormalized preimage weights plus the observed float defect."""

    entries: tuple[tuple[Point, float], ...]
    defect: float

    def __iter__(self):
        return iter(self.entries)


def transition_weights(system: SolenoidSystem, x: Point) -> TransitionWeights:
    """The ``N`` preimages of ``x`` with their walk probabilities.

    Weights are ``|m0(y)|^2 / N``; the QMF identity forces the exact sum to
    1, so the residual defect is renormalized away after being recorded.  A
    defect above ``1e-9`` raises (broken or non-QMF filter).
    """
    pre = system.preimages(x)
    n = system.branch_count
    raw = [abs(system.filter_value(y))**2 / n for y in pre]
    total = sum(raw)
    defect = abs(total - 1.0)
    if defect > DEFECT_HARD_LIMIT:
        raise ValueError(
            f"transition weights sum to {total!r}; defect {defect:.3e} "
            "exceeds 1e-9 (filter violates the QMF identity)")
    entries = tuple((y, w / total) for y, w in zip(pre, raw))
    return TransitionWeights(entries=entries, defect=defect)


# -- path sampling --------------------------------------------------------------

@dataclass(frozen=True)
class PathSample:
    """A sampled backward orbit ``x_1, ..., x_n`` from ``x_0``.

    ``log_weight`` accumulates the log probabilities of the chosen steps
    (diagnostic only; the sampling distribution is already the path
    measure).
    """

    x0: Point
    trajectory: tuple[Point, ...]
    log_weight: float

    def points(self) -> tuple[Point, ...]:
        return (self.x0,) + self.trajectory


def path_generator(seed: int, index: int) -> np.random.Generator:
    """A Philox stream keyed by seed with the path index in the counter."""
    key = [seed % 2**64, (seed >> 64) % 2**64]
    return np.random.Generator(np.random.Philox(counter=[0, 0, 0, index],
                                                key=key))


def _resolve_rng(rng_seed) -> np.random.Generator:
    if isinstance(rng_seed, np.random.Generator):
        return rng_seed
    return path_generator(int(rng_seed), 0)


def sample_path(system: SolenoidSystem, x: Point, n: int,
                rng_seed) -> PathSample:
    """Draw one backward orbit of length ``n`` under the path measure."""
    if n < 0:
        raise ValueError("path length must be nonnegative")
    rng = _resolve_rng(rng_seed)
    traj: list[Point] = []
    log_w = 0.0
    current = x
    for _ in range(n):
        tw = transition_weights(system, current)
        u = float(rng.random())
        acc = 0.0
        chosen, weight = tw.entries[-1]
        for y, w in tw.entries:
            acc += w
            if u < acc:
                chosen, weight = y, w
                break
        traj.append(chosen)
        log_w += math.log(weight) if weight > 0 else float("-inf")
        current = chosen
    return PathSample(x0=x, trajectory=tuple(traj), log_weight=log_w)


def sample_paths(system: SolenoidSystem, x: Point, n: int, n_paths: int,
                 seed: int) -> list[PathSample]:
    """Draw ``n_paths`` independent backward orbits (one stream per path)."""
    return [sample_path(system, x, n, path_generator(seed, i))
            for i in range(n_paths)]


# -- integration -----------------------------------------------------------------

@dataclass(frozen=True)
class MonteCarloEstimate:
    estimate: complex
    std_error: float
    n_samples: int

    @property
    def real(self) -> float:
        return self.estimate.real


def mu_infinity_integral(system: SolenoidSystem,
                         F: Callable[[Sequence[Point]], complex],
                         depth: int, n_samples: int,
                         rng_seed: int) -> MonteCarloEstimate:
    """Monte Carlo integral of a cylinder function of ``x_0 .. x_depth``.

    Draws the base point from Haar measure, extends it backward ``depth``
    steps under the path measure, and averages ``F`` over the samples.
    """
    if depth < 0:
        raise ValueError("depth must be nonnegative")
    if n_samples < 2:
        raise ValueError("need at least 2 samples for a standard error")
    values = np.empty(n_samples, dtype=complex)
    for i in range(n_samples):
        rng = path_generator(rng_seed, i)
        x0 = system.base_sample(rng)
        path = sample_path(system, x0, depth, rng)
        values[i] = F(path.points())
    mean = complex(values.mean())
    std_error = float(values.std(ddof=1) / math.sqrt(n_samples))
    return MonteCarloEstimate(estimate=mean, std_error=std_error,
                              n_samples=n_samples)


def _as_point_function(h) -> Callable[[Point], complex]:
    if callable(h):
        return h
    if isinstance(h, LaurentPoly):
        return lambda p: evaluate(h, p.angle)
    if isinstance(h, (tuple, list)):
        polys = list(h)

        def per_component(p: Point) -> complex:
            item = polys[p.component]
            if isinstance(item, LaurentPoly):
                return evaluate(item, p.angle)
            return complex(item)

        return per_component
    raise TypeError(f"cannot interpret {type(h).__name__} as a point function")


def component_indicator(component: int) -> Callable[[Point], complex]:
    """The indicator of one circle component, as a point function."""
    return lambda p: 1.0 + 0.0j if p.component == component else 0.0 + 0.0j


def tree_expectation(system: SolenoidSystem, x: Point, h, depth: int) -> complex:
    """Exact weighted sum of ``h(x_depth)`` over the full preimage tree.

    This is the depth-``depth`` transfer iterate of ``h`` evaluated at
    ``x``, computed by full enumeration (no sampling); the branch budget
    caps the tree size.
    """
    if depth < 0:
        raise ValueError("depth must be nonnegative")
    if system.branch_count**depth > TREE_BUDGET:
        raise ValueError(
            f"preimage tree {system.branch_count}^{depth} exceeds the "
            f"enumeration budget {TREE_BUDGET}")
    hf = _as_point_function(h)

    def rec(p: Point, d: int) -> complex:
        if d == 0:
            return complex(hf(p))
        return sum(w * rec(y, d - 1)
                   for y, w in transition_weights(system, p))

    return rec(x, depth)


# -- cocycle and ergodicity diagnostics -------------------------------------------

@dataclass(frozen=True)
class PathOscillation:
    final_value: complex
    tail_oscillation: float


@dataclass(frozen=True)
class CocycleReport:
    """Tail behaviour of ``h`` along sampled backward orbits.

    For a bounded fixed point of the transfer operator, ``h(x_n)`` must
    settle along almost every path; ``flagged_non_cocycle`` is set when the
    worst tail oscillation exceeds the tolerance.
    """

    paths: tuple[PathOscillation, ...]
    max_oscillation: float
    mean_oscillation: float
    tol: float

    @property
    def flagged_non_cocycle(self) -> bool:
        return self.max_oscillation > self.tol


def cocycle_limit(system: SolenoidSystem, h, x: Point, path_len: int,
                  n_paths: int, rng_seed: int,
                  tol: float = 1e-9) -> CocycleReport:
    """Sample paths and measure how ``h`` oscillates along their tails.

    The tail starts at the midpoint of each path; a candidate cocycle limit
    must show decaying oscillation, so a large, persistent tail oscillation
    flags ``h`` as not defining a cocycle.
    """
    if path_len < 2:
        raise ValueError("path_len must be at least 2")
    hf = _as_point_function(h)
    tail_start = path_len // 2
    rows = []
    for i in range(n_paths):
        path = sample_path(system, x, path_len, path_generator(rng_seed, i))
        values = [complex(hf(p)) for p in path.points()]
        ref = values[tail_start]
        osc = max(abs(v - ref) for v in values[tail_start:])
        rows.append(PathOscillation(final_value=values[-1],
                                    tail_oscillation=osc))
    max_osc = max(r.tail_oscillation for r in rows)
    mean_osc = sum(r.tail_oscillation for r in rows) / len(rows)
    return CocycleReport(paths=tuple(rows), max_oscillation=max_osc,
                         mean_oscillation=mean_osc, tol=tol)


ComponentFunction = tuple[LaurentPoly, ...]


def _as_component_function(system: SolenoidSystem, f) -> ComponentFunction:
    if isinstance(f, LaurentPoly):
        return tuple(f for _ in range(system.n_components))
    parts = tuple(f)
    if len(parts) != system.n_components:
        raise ValueError("component count mismatch")
    return tuple(p if isinstance(p, LaurentPoly) else LaurentPoly.constant(p)
                 for p in parts)


def _is_globally_constant(parts: ComponentFunction) -> bool:
    if not all(p.is_constant() for p in parts):
        return False
    first = parts[0].constant_term()
    return all(p.constant_term() == first for p in parts[1:])


@dataclass(frozen=True)
class ErgodicityVerdict:
    """Outcome of the averaging diagnostic for one test function."""

    verdict: str  # "consistent-with-ergodic" | "non-ergodic-witness" | "inconclusive"
    steps: int | None
    witness: ComponentFunction | None


def ergodicity_diagnostic(system: SolenoidSystem,
                          test_functions,
                          depth: int = 16) -> list[ErgodicityVerdict]:
    """Iterate uniform preimage averaging on test functions per component.

    Requires ``m0 = 1``.  A function that reaches a global constant is
    consistent with ergodicity of the covering map; an exactly fixed
    nonconstant function is a witness against it (for the two-circle system
    the component indicator is such a witness).
    """
    if not system.unit_filter:
        raise ValueError("ergodicity diagnostic requires the unit filter")
    filt = constant_one_filter(system.branch_count)
    out = []
    for f in test_functions:
        parts = _as_component_function(system, f)
        verdict = None
        current = parts
        for step in range(depth + 1):
            if _is_globally_constant(current):
                verdict = ErgodicityVerdict("consistent-with-ergodic",
                                            steps=step, witness=None)
                break
            stepped = tuple(apply(filt, p) for p in current)
            if stepped == current:
                verdict = ErgodicityVerdict("non-ergodic-witness",
                                            steps=step, witness=current)
                break
            current = stepped
        if verdict is None:
            verdict = ErgodicityVerdict("inconclusive", steps=None,
                                        witness=None)
        out.append(verdict)
    return out
