"""Command-line front end: per-claim verification commands with JSON reports.

Every command resolves its full configuration into the report, prints the
report as sorted JSON (so identical configs give byte-identical output) and
exits 0 only when all named checks pass.  Exact quantities are emitted as
"num/den" strings next to float renderings; the floats are presentation
only.
"""

from __future__ import annotations

import argparse
import csv
import json
import re
import sys
from fractions import Fraction

from . import cantor, fixedpoint, solenoid, transfer
from .cantor import CellFunction
from .laurent import LaurentPoly, evaluate
from .solenoid import Point

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_USAGE = 2


def frac_str(x: Fraction) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


_TERM_RE = re.compile(
    r"^(?P<coef>-?[0-9]+(?:/[0-9]+)?)?\*?(?P<var>z(?:\^(?P<exp>-?[0-9]+))?)?$")


def parse_poly(text: str) -> LaurentPoly:
    """Parse expressions like ``z^6``, ``1+z^2`` or ``1/2*z^-2 - 3``."""
    s = text.replace(" ", "").replace("^-", "^~")
    if not s:
        raise ValueError("empty polynomial")
    if s[0] not in "+-":
        s = "+" + s
    coeffs: dict[int, Fraction] = {}
    consumed = 0
    for m in re.finditer(r"([+-])([^+-]+)", s):
        consumed += len(m.group(0))
        sign = 1 if m.group(1) == "+" else -1
        term = m.group(2).replace("^~", "^-")
        tm = _TERM_RE.match(term)
        if not tm or (tm.group("coef") is None and tm.group("var") is None):
            raise ValueError(f"cannot parse term {term!r}")
        coef = Fraction(tm.group("coef")) if tm.group("coef") else Fraction(1)
        if tm.group("var"):
            exp = int(tm.group("exp")) if tm.group("exp") else 1
        else:
            exp = 0
        coeffs[exp] = coeffs.get(exp, Fraction(0)) + sign * coef
    if consumed != len(s):
        raise ValueError(f"cannot parse polynomial {text!r}")
    return LaurentPoly(coeffs)


FILTER_PRESETS = {
    "cantor": transfer.cantor_filter,
    "one": lambda: transfer.constant_one_filter(3),
    "haar": transfer.haar_filter,
}

CASCADE_PRESETS = {
    "chi_C": lambda: cantor.chi_C(),
    "half-cell": lambda: CellFunction.indicator(1, 0),
    "middle-cell": lambda: CellFunction.indicator(1, 1),
    "translate": lambda: cantor.translate(cantor.chi_C(), 1),
}


def parse_filter_spec(text: str) -> transfer.Filter:
    """Parse ``num=1+z^2;half_scale=1;N=3`` into a Filter."""
    fields = {}
    for part in text.split(";"):
        if not part:
            continue
        key, _, value = part.partition("=")
        fields[key.strip()] = value.strip()
    try:
        numerator = parse_poly(fields["num"])
        half_scale = int(fields.get("half_scale", "0"))
        branch_count = int(fields.get("N", "3"))
    except KeyError as exc:
        raise ValueError(f"filter spec missing field {exc}") from exc
    return transfer.Filter(numerator, half_scale, branch_count)


def _resolve_filter(args) -> transfer.Filter:
    if getattr(args, "filter_spec", None):
        return parse_filter_spec(args.filter_spec)
    return FILTER_PRESETS[args.filter]()


def _emit(report: dict, args) -> None:
    text = json.dumps(report, indent=2, sort_keys=True)
    print(text)
    if getattr(args, "out", None):
        with open(args.out, "w") as fh:
            fh.write(text + "\n")


def _write_csv(path: str, header: list[str], rows: list[list]) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)


def _checks_passed(checks: list[dict]) -> bool:
    return all(c["passed"] for c in checks)


# -- verify-fixed-point ---------------------------------------------------------

def cmd_verify_fixed_point(args) -> tuple[int, dict]:
    config = {"command": "verify-fixed-point", "K": args.K,
              "n_max": args.n_max, "bound_factor": frac_str(args.bound_factor)}
    try:
        seq = fixedpoint.build_sequence(args.K)
        growth = fixedpoint.energy_growth(seq, args.n_max)
    except ValueError as exc:
        return EXIT_USAGE, {"config": config, "error": str(exc)}

    residual, checked = fixedpoint.fixed_point_residual(seq)
    monotone = fixedpoint.monotone_tail_profile(seq, args.n_max)

    factor = args.bound_factor
    bound_rows = []
    increasing = True
    bounded = True
    prev = None
    for n, s in growth:
        bound = factor * Fraction(3, 2)**n
        bound_rows.append({"n": n, "S_n": frac_str(s), "S_n_float": float(s),
                           "bound_float": float(bound), "meets_bound": s >= bound})
        bounded = bounded and s >= bound
        if prev is not None and s <= prev:
            increasing = False
        prev = s

    checks = [
        {"name": "residual-zero", "passed": residual == 0,
         "max_residual": frac_str(residual), "checked_range": checked},
        {"name": "growth-strictly-increasing", "passed": increasing},
        {"name": "growth-meets-bound", "passed": bounded},
        {"name": "tail-monotone", "passed": all(ok for _n, ok in monotone)},
    ]
    report = {
        "config": config,
        "growth": bound_rows,
        "monotone_profile": [{"n": n, "monotone": ok} for n, ok in monotone],
        "checks": checks,
        "passed": _checks_passed(checks),
    }
    if args.csv:
        _write_csv(args.csv,
                   ["n", "S_n_num", "S_n_den", "S_n_float", "bound_float"],
                   [[n, s.numerator, s.denominator, float(s),
                     float(factor * Fraction(3, 2)**n)] for n, s in growth])
    return (EXIT_OK if report["passed"] else EXIT_CHECK_FAILED), report


# -- cascade ---------------------------------------------------------------------

def cmd_cascade(args) -> tuple[int, dict]:
    config = {"command": "cascade", "preset": args.preset, "xi": args.xi,
              "n_max": args.n_max, "max_iter": args.max_iter,
              "tol": frac_str(args.tol)}
    if args.xi:
        with open(args.xi) as fh:
            xi = CellFunction.from_json_dict(json.load(fh))
    else:
        xi = CASCADE_PRESETS[args.preset]()

    series = cantor.cascade_divergence(xi, args.n_max)
    via_transfer = cantor.transfer_side_series(xi, args.n_max)
    d = cantor.cascade(xi) - xi
    h0 = cantor.correlation(d, d)
    rep = transfer.iterate_to_invariant(transfer.cantor_filter(), h0,
                                        max_iter=args.max_iter, tol=args.tol)

    exact_match = all(s == t for (_n, s), (_m, t) in zip(series, via_transfer))
    if rep.converged:
        n_ref = min(args.n_max, rep.iterations_used)
        gap = abs(series[n_ref][1] - rep.limit.re)
        limit_ok = gap <= rep.final_mass()
    else:
        limit_ok = False

    checks = [
        {"name": "series-equals-transfer-side", "passed": exact_match},
        {"name": "limit-within-mass-bound", "passed": limit_ok,
         "final_mass": frac_str(rep.final_mass())},
    ]
    report = {
        "config": config,
        "series": [{"n": n, "value": frac_str(v), "float": float(v)}
                   for n, v in series],
        "transfer_limit": rep.to_json_dict(),
        "checks": checks,
        "passed": _checks_passed(checks),
    }
    if args.csv:
        _write_csv(args.csv, ["n", "value_num", "value_den", "float_value"],
                   [[n, v.numerator, v.denominator, float(v)]
                    for n, v in series])
    return (EXIT_OK if report["passed"] else EXIT_CHECK_FAILED), report


# -- transfer ---------------------------------------------------------------------

def cmd_transfer(args) -> tuple[int, dict]:
    config = {"command": "transfer", "f": args.f, "filter": args.filter,
              "filter_spec": args.filter_spec,
              "max_iter": args.max_iter, "tol": frac_str(args.tol)}
    try:
        f = parse_poly(args.f)
        filt = _resolve_filter(args)
        rep = transfer.iterate_to_invariant(filt, f, max_iter=args.max_iter,
                                            tol=args.tol)
    except ValueError as exc:
        return EXIT_USAGE, {"config": config, "error": str(exc)}
    checks = [{"name": "converged", "passed": rep.converged}]
    report = {
        "config": config,
        "qmf_valid": filt.qmf_valid,
        "report": rep.to_json_dict(),
        "checks": checks,
        "passed": _checks_passed(checks),
    }
    return (EXIT_OK if report["passed"] else EXIT_CHECK_FAILED), report


# -- nullspace ---------------------------------------------------------------------

def cmd_nullspace(args) -> tuple[int, dict]:
    lo, hi = args.window
    config = {"command": "nullspace", "level": args.level, "window": [lo, hi],
              "expect_dim": args.expect_dim}
    try:
        basis = cantor.refinement_nullspace(args.level, lo, hi)
    except ValueError as exc:
        return EXIT_USAGE, {"config": config, "error": str(exc)}
    checks = []
    if args.expect_dim is not None:
        checks.append({"name": "dimension", "passed": len(basis) == args.expect_dim,
                       "found": len(basis), "expected": args.expect_dim})
    fixed_ok = all(cantor.cascade(b) == b for b in basis)
    checks.append({"name": "basis-is-fixed", "passed": fixed_ok})
    report = {
        "config": config,
        "dimension": len(basis),
        "basis": [b.to_json_dict() for b in basis],
        "checks": checks,
        "passed": _checks_passed(checks),
    }
    return (EXIT_OK if report["passed"] else EXIT_CHECK_FAILED), report


# -- solenoid ----------------------------------------------------------------------

SYSTEM_PRESETS = {
    "cantor": solenoid.cantor_system,
    "circle": solenoid.unit_circle_system,
    "two-circle": solenoid.TwoCircleSystem,
}


def cmd_solenoid(args) -> tuple[int, dict]:
    config = {"command": "solenoid", "system": args.system,
              "angle": frac_str(args.angle), "len": args.len,
              "paths": args.paths, "seed": args.seed,
              "tree_depth": args.tree_depth, "f": args.f}
    system = SYSTEM_PRESETS[args.system]()
    x = Point(0, Fraction(args.angle) % 1)

    tw = transition_weights_report(system, x)
    paths = solenoid.sample_paths(system, x, args.len, args.paths, args.seed)
    exact_ok = all(
        system.forward(p) == q
        for sample in paths
        for q, p in zip(sample.points(), sample.trajectory)
    )

    freq_checks = []
    freq_ok = True
    if args.len > 0 and args.paths > 0:
        counts = [0] * system.branch_count
        first_steps = {y: i for i, (y, _w) in enumerate(tw["entries_points"])}
        for sample in paths:
            counts[first_steps[sample.trajectory[0]]] += 1
        n = len(paths)
        for i, (_y, w) in enumerate(tw["entries_points"]):
            p_hat = counts[i] / n
            sigma = (w * (1 - w) / n)**0.5
            ok = abs(p_hat - w) <= max(3 * sigma, 1e-12)
            freq_ok = freq_ok and ok
            freq_checks.append({"branch": i, "weight": w, "empirical": p_hat,
                                "std_error": sigma, "within_3_sigma": ok})

    f = parse_poly(args.f)
    tree_rows = []
    tree_ok = True
    g = f
    for depth in range(args.tree_depth + 1):
        via_tree = solenoid.tree_expectation(system, x, f, depth)
        via_transfer = evaluate(g, x.angle)
        err = abs(via_tree - via_transfer)
        tree_ok = tree_ok and err <= 1e-10
        tree_rows.append({"depth": depth, "tree_re": via_tree.real,
                          "tree_im": via_tree.imag, "abs_error": err})
        g = transfer.apply(_filter_of(system), g)

    checks = [
        {"name": "weight-defect", "passed": tw["defect"] <= 1e-12,
         "defect": tw["defect"]},
        {"name": "exact-backward-orbits", "passed": exact_ok},
        {"name": "first-step-frequencies", "passed": freq_ok},
        {"name": "tree-matches-transfer", "passed": tree_ok},
    ]
    report = {
        "config": config,
        "transition_weights": tw["entries_json"],
        "defect": tw["defect"],
        "first_step_frequencies": freq_checks,
        "tree_consistency": tree_rows,
        "checks": checks,
        "passed": _checks_passed(checks),
    }
    return (EXIT_OK if report["passed"] else EXIT_CHECK_FAILED), report


def _filter_of(system: solenoid.SolenoidSystem) -> transfer.Filter:
    if isinstance(system, solenoid.CircleSystem):
        return system.filter
    return transfer.constant_one_filter(system.branch_count)


def transition_weights_report(system, x) -> dict:
    tw = solenoid.transition_weights(system, x)
    return {
        "entries_points": list(tw.entries),
        "entries_json": [
            {"component": y.component, "angle": frac_str(y.angle), "weight": w}
            for y, w in tw.entries
        ],
        "defect": tw.defect,
    }


# -- ergodicity ---------------------------------------------------------------------

def cmd_ergodicity(args) -> tuple[int, dict]:
    config = {"command": "ergodicity", "system": args.system,
              "max_k": args.max_k, "depth": args.depth, "expect": args.expect}
    if args.system == "cantor":
        return EXIT_USAGE, {"config": config,
                            "error": "ergodicity diagnostic requires m0 = 1"}
    system = SYSTEM_PRESETS[args.system]()
    expect = args.expect
    if expect is None:
        expect = "non-ergodic" if args.system == "two-circle" else "ergodic"

    tests = []
    labels = []
    for k in range(-args.max_k, args.max_k + 1):
        if k == 0:
            continue
        tests.append(LaurentPoly.monomial(k))
        labels.append(f"z^{k}")
    if system.n_components > 1:
        indicator = tuple(
            LaurentPoly.one() if c == 1 else LaurentPoly.zero()
            for c in range(system.n_components))
        tests.append(indicator)
        labels.append("component-indicator")

    verdicts = solenoid.ergodicity_diagnostic(system, tests, depth=args.depth)
    rows = [{"function": lab, "verdict": v.verdict, "steps": v.steps}
            for lab, v in zip(labels, verdicts)]
    n_witness = sum(1 for v in verdicts if v.verdict == "non-ergodic-witness")
    all_consistent = all(v.verdict == "consistent-with-ergodic"
                         for v in verdicts)

    if expect == "ergodic":
        passed = all_consistent
    else:
        passed = n_witness > 0
    checks = [{"name": f"expected-{expect}", "passed": passed,
               "witnesses": n_witness}]
    report = {
        "config": config,
        "verdicts": rows,
        "checks": checks,
        "passed": passed,
    }
    return (EXIT_OK if passed else EXIT_CHECK_FAILED), report


# -- detail-basis --------------------------------------------------------------------

def cmd_detail_basis(args) -> tuple[int, dict]:
    config = {"command": "detail-basis", "window": args.window}
    try:
        basis = cantor.detail_basis(args.window)
    except ValueError as exc:
        return EXIT_USAGE, {"config": config, "error": str(exc)}

    expected_count = 2 * 3**(args.window - 1)
    ortho = all(
        cantor.inner(g1, g2) == 0
        for i, (g1, _n1) in enumerate(basis)
        for g2, _n2 in basis[i + 1:]
    )
    norms_ok = all(cantor.norm_sq(g) == nsq for g, nsq in basis)
    in_detail_space = all(cantor.mra_project(g, 0).is_zero() for g, _ in basis)
    translates_ok = all(
        cantor.inner(g, cantor.translate(cantor.chi_C(), k)) == 0
        for g, _ in basis
        for k in range(-args.window - 2, args.window + 3)
    )
    checks = [
        {"name": "generator-count", "passed": len(basis) == expected_count,
         "found": len(basis), "expected": expected_count},
        {"name": "mutually-orthogonal", "passed": ortho},
        {"name": "norms-exact", "passed": norms_ok},
        {"name": "orthogonal-to-coarse-space", "passed": in_detail_space
         and translates_ok},
    ]
    report = {
        "config": config,
        "generators": [{"function": g.to_json_dict(), "norm_sq": frac_str(n)}
                       for g, n in basis],
        "checks": checks,
        "passed": _checks_passed(checks),
    }
    return (EXIT_OK if report["passed"] else EXIT_CHECK_FAILED), report


# -- parser ----------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cantorwave",
        description="Exact verification commands for the Cantor wavelet "
                    "system: transfer-operator fixed points, cascade "
                    "iteration, refinement nullspaces and solenoid walks.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--out", help="also write the JSON report to this path")

    p = sub.add_parser("verify-fixed-point",
                       help="residual and energy growth of the explicit "
                            "transfer fixed point")
    p.add_argument("--K", type=int, required=True,
                   help="truncation: keep coefficients with |k| <= K")
    p.add_argument("--n-max", dest="n_max", type=int, default=6)
    p.add_argument("--bound-factor", dest="bound_factor", type=Fraction,
                   default=Fraction(3),
                   help="require S_n >= factor * (3/2)^n (default 3)")
    p.add_argument("--csv", help="write the growth series to this CSV path")
    add_common(p)

    p = sub.add_parser("cascade",
                       help="cascade-iteration increment series with the "
                            "transfer-side cross-check")
    p.add_argument("--preset", choices=sorted(CASCADE_PRESETS), default="half-cell")
    p.add_argument("--xi", help="JSON file with a cell function to iterate")
    p.add_argument("--n-max", dest="n_max", type=int, default=10)
    p.add_argument("--max-iter", dest="max_iter", type=int, default=60)
    p.add_argument("--tol", type=Fraction, default=Fraction(1, 10**6))
    p.add_argument("--csv", help="write the increment series to this CSV path")
    add_common(p)

    p = sub.add_parser("transfer",
                       help="iterate the transfer operator on a polynomial")
    p.add_argument("--f", required=True, help="polynomial, e.g. 'z^6' or '1+z^2'")
    p.add_argument("--filter", choices=sorted(FILTER_PRESETS), default="cantor")
    p.add_argument("--filter-spec", dest="filter_spec",
                   help="custom filter, e.g. 'num=1+z^2;half_scale=1;N=3' "
                        "(overrides --filter)")
    p.add_argument("--max-iter", dest="max_iter", type=int,
                   default=transfer.DEFAULT_MAX_ITER)
    p.add_argument("--tol", type=Fraction, default=transfer.DEFAULT_TOL)
    add_common(p)

    p = sub.add_parser("nullspace",
                       help="exact nullspace of the refinement fixed-point "
                            "equation at finite resolution")
    p.add_argument("--level", type=int, required=True)
    p.add_argument("--window", type=int, nargs=2, default=[-2, 3],
                   metavar=("LO", "HI"))
    p.add_argument("--expect-dim", dest="expect_dim", type=int)
    add_common(p)

    p = sub.add_parser("solenoid",
                       help="sample solenoid walks and check them against "
                            "exact transfer computations")
    p.add_argument("--system", choices=sorted(SYSTEM_PRESETS), default="cantor")
    p.add_argument("--angle", type=Fraction, default=Fraction(0))
    p.add_argument("--len", type=int, default=50)
    p.add_argument("--paths", type=int, default=10000)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--tree-depth", dest="tree_depth", type=int, default=4)
    p.add_argument("--f", default="z^2", help="test polynomial for the tree check")
    add_common(p)

    p = sub.add_parser("ergodicity",
                       help="preimage-averaging diagnostic for m0 = 1 systems")
    p.add_argument("--system", choices=["circle", "two-circle"], default="circle")
    p.add_argument("--max-k", dest="max_k", type=int, default=81)
    p.add_argument("--depth", type=int, default=16)
    p.add_argument("--expect", choices=["ergodic", "non-ergodic"])
    add_common(p)

    p = sub.add_parser("detail-basis",
                       help="orthogonal generators of the first detail space")
    p.add_argument("--window", type=int, default=1)
    add_common(p)

    return parser


COMMANDS = {
    "verify-fixed-point": cmd_verify_fixed_point,
    "cascade": cmd_cascade,
    "transfer": cmd_transfer,
    "nullspace": cmd_nullspace,
    "solenoid": cmd_solenoid,
    "ergodicity": cmd_ergodicity,
    "detail-basis": cmd_detail_basis,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    code, report = COMMANDS[args.command](args)
    _emit(report, args)
    return code


def main_entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    main_entry()
