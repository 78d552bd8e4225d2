"""Command-line driver: declarative problem specs in, deterministic
verification reports out.

Exit codes: 0 when every check passes, 1 when a mathematical property is
violated (witnesses in the report), 2 for input or schema errors.
"""
from __future__ import annotations

import argparse
import sys
from itertools import combinations

import numpy as np

from . import __version__
from .algebra import encode_element, random_self_adjoint
from .cdc import ccn_check, is_cdc
from .dirac import build_bimodule, dirac, dirac_seminorm, star_graph_check
from .energy import (
    cdc_from_dirichlet_form,
    connectedness,
    energy_form,
    energy_form_of_laplacian,
    heat_map,
    laplacian,
    leibniz_check,
    markov_check,
    reality_checks,
    resolvent_check,
)
from .errors import DisconnectedError, InputError, PropertyViolationError
from .fileio import ProblemSpec, parse_spec
from .quotient import central_projection, quotient_checks, split
from .reporting import CheckResult, Tolerances, dumps_canonical
from .resistance import (
    ResistanceNetwork,
    all_pairs_resistance,
    markov_violation_witness,
    metric_checks,
    network_laplacian,
)
from .states import dual_metric, energy_metric
from .stddev import extend, independent_copies_cdc, stddev_laplacian, stddev_seminorm

COMMANDS = (
    "check-cdc",
    "laplacian",
    "heat",
    "metric",
    "resistance",
    "quotient",
    "dirac",
    "stddev",
    "all",
)

DISCONNECTED = "disconnected"


def _cdc_checks(spec: ProblemSpec):
    gamma = spec.build_gamma()
    tol = spec.tolerances.positivity
    report = is_cdc(gamma, tol=tol)
    reality = reality_checks(gamma, tol=spec.tolerances.equality)
    checks = [
        CheckResult("cdc-symmetric", report.symmetric, report.residuals["symmetry"]),
        CheckResult("cdc-unit-annihilation", report.unit_annihilating, report.residuals["unit"]),
        CheckResult("cdc-star-representation", report.star_representation,
                    report.residuals["star_representation"]),
        CheckResult("cdc-completely-positive", report.completely_positive,
                    witness=report.witness if not report.completely_positive else None),
    ]
    data = {
        "is_cdc": report.is_cdc,
        "tau_real": reality["tau_real"],
        "tau_balanced": reality["tau_balanced"],
        "scale": float(gamma.scale),
    }
    if spec.generator and spec.generator["kind"] == "matrix":
        data["ccn"] = ccn_check(spec.generator["superop"], seed=spec.seed, tol=tol)
    elif spec.generator and spec.generator["kind"] == "lindblad":
        from .cdc import lindblad_generator

        gen = lindblad_generator(spec.algebra, spec.generator["vs"])
        data["ccn"] = ccn_check(gen, seed=spec.seed, tol=tol)
    return checks, data


def _laplacian_checks(spec: ProblemSpec):
    gamma = spec.build_gamma()
    e = energy_form(gamma, force=True)
    lap = laplacian(e, rank_tol=spec.tolerances.rank)
    tol = spec.tolerances.equality
    one = lap.algebra.identity()
    eigs = np.linalg.eigvalsh(lap.matrix)
    checks = [
        CheckResult("laplacian-annihilates-unit",
                    lap.apply(one).norm() <= tol * (1 + one.norm()),
                    float(lap.apply(one).norm())),
        CheckResult("laplacian-positive",
                    bool(eigs[0] >= -spec.tolerances.positivity * max(1.0, eigs[-1])),
                    float(max(0.0, -eigs[0]))),
    ]
    data = {
        "kernel_dim": int(lap.kernel_dim),
        "connected": connectedness(lap),
        "eigenvalues": [float(x) for x in eigs],
    }
    if e.is_real(tol):
        try:
            cdc_from_dirichlet_form(e, checks=False, tol=tol)
            checks.append(CheckResult("laplacian-form-reconstruction", True))
        except PropertyViolationError as exc:
            checks.append(CheckResult("laplacian-form-reconstruction", False,
                                      witness={"failures": [c.check for c in exc.checks]}))
    return checks, data


def _heat_checks(spec: ProblemSpec):
    gamma = spec.build_gamma()
    e = energy_form(gamma, force=True)
    lap = laplacian(e, rank_tol=spec.tolerances.rank)
    tol = spec.tolerances.positivity
    symmetrized = not e.is_real(spec.tolerances.equality)
    generator = lap.natural() if symmetrized else lap
    checks = []
    for t in spec.times:
        _, flags = heat_map(generator, t, tol=tol)
        checks.append(CheckResult(f"heat-unital-t{t:g}", flags["unital"],
                                  flags["unital_residual"]))
        checks.append(CheckResult(f"heat-cp-t{t:g}", flags["cp"],
                                  abs(min(0.0, flags["choi_min_eigenvalue"]))))
    if len(spec.times) >= 2:
        s, t = spec.times[-2], spec.times[-1]
        phi_s, _ = heat_map(generator, s)
        phi_t, _ = heat_map(generator, t)
        phi_st, _ = heat_map(generator, s + t)
        gap = float(np.abs(phi_s.compose(phi_t).matrix - phi_st.matrix).max())
        checks.append(CheckResult("heat-semigroup-law", gap <= spec.tolerances.equality, gap))
    checks.extend(
        resolvent_check(generator, spec.times, seed=spec.seed, tol=tol)
    )
    return checks, {"generator_symmetrized": symmetrized}


def _metric_checks(spec: ProblemSpec):
    if len(spec.states) < 2:
        raise InputError("the metric command needs at least two states in 'states'")
    gamma = spec.build_gamma()
    e = energy_form(gamma, force=True)
    lap = laplacian(e, rank_tol=spec.tolerances.rank)
    tol = spec.tolerances.equality
    n = len(spec.states)
    pairs = (
        [(int(i), int(j)) for i, j in spec.pairs]
        if spec.pairs
        else list(combinations(range(n), 2))
    )
    dist = [[0.0 if i == j else None for j in range(n)] for i in range(n)]
    worst = 0.0
    connected_all = True
    for i, j in pairs:
        if not (0 <= i < n and 0 <= j < n):
            raise InputError(f"state pair ({i}, {j}) out of range")
        try:
            d = energy_metric(lap, spec.states[i], spec.states[j], tol=tol)
            d_dual = dual_metric(e, spec.states[i], spec.states[j], tol=tol)
            worst = max(worst, abs(d - d_dual))
            dist[i][j] = dist[j][i] = float(d)
        except DisconnectedError:
            connected_all = False
            dist[i][j] = dist[j][i] = DISCONNECTED
    checks = [
        CheckResult("metric-connected", connected_all),
        CheckResult("metric-dual-agreement", worst <= max(tol, 1e-9), worst),
    ]
    return checks, {"distances": dist}


def _resistance_checks(spec: ProblemSpec):
    if spec.generator is None or spec.generator["kind"] != "network":
        raise InputError("the resistance command needs a network generator")
    net = ResistanceNetwork(
        spec.generator["c"], allow_negative=spec.generator.get("allow_negative", False)
    )
    checks = []
    data = {}
    if net.c.min() < 0:
        witness = markov_violation_witness(net)
        checks.append(CheckResult(
            "network-markov", witness is None,
            residual=0.0 if witness is None else witness.violation,
            witness=None if witness is None else {
                "edge": list(witness.edge),
                "r": witness.r,
                "f": encode_element(witness.f),
            },
        ))
        return checks, data
    if not net.is_connected():
        checks.append(CheckResult("network-connected", False,
                                  witness={"reason": "network graph is disconnected"}))
        data["resistance"] = DISCONNECTED
        return checks, data
    report = metric_checks(net, seed=spec.seed)
    checks.extend([
        CheckResult("resistance-triangle", report.triangle, report.residuals["triangle"]),
        CheckResult("resistance-square-relation", report.square_relation,
                    report.residuals["square_relation"]),
        CheckResult("resistance-acute-angles", report.acute_angles_pure,
                    report.residuals["acute_angles"]),
    ])
    rho = all_pairs_resistance(net)
    lap = network_laplacian(net)
    from .states import point_state

    points = [point_state(net.algebra, x) for x in range(net.size)]
    energy = [
        [float(energy_metric(lap, points[i], points[j])) for j in range(net.size)]
        for i in range(net.size)
    ]
    data["resistance"] = [[float(x) for x in row] for row in rho]
    data["energy"] = energy
    # absence of a witness is never a proof, only a grid statement
    data["mixture_counterexample"] = (
        report.mixture_counterexample
        if report.mixture_counterexample is not None
        else "not found at this resolution"
    )
    return checks, data


def _quotient_checks(spec: ProblemSpec):
    if spec.projection is None:
        raise InputError("the quotient command needs a 'projection' field")
    gamma = spec.build_gamma()
    e = energy_form(gamma, force=True)
    lap = laplacian(e, rank_tol=spec.tolerances.rank)
    if "keep_blocks" in spec.projection:
        p = central_projection(lap.algebra, spec.projection["keep_blocks"])
    else:
        p = spec.projection["element"]
    qd = split(lap, p, rank_tol=spec.tolerances.rank)
    checks = quotient_checks(qd, seed=spec.seed, tol=spec.tolerances.equality)
    schur = qd.quotient_laplacian.matrix
    data = {"schur_complement": [[[float(z.real), float(z.imag)] for z in row] for row in schur]}
    return checks, data


def _dirac_checks(spec: ProblemSpec):
    gamma = spec.build_gamma()
    bs = build_bimodule(gamma, pos_tol=spec.tolerances.positivity,
                        rank_tol=spec.tolerances.rank)
    op = dirac(bs)
    tol = spec.tolerances.equality
    rng = np.random.default_rng(spec.seed)
    worst = 0.0
    for _ in range(10):
        a = random_self_adjoint(bs.algebra, rng)
        worst = max(worst, dirac_seminorm(op, a).residual)
    checks = [
        CheckResult("dirac-factorizes-laplacian",
                    bs.residuals["laplacian_factorization"] <= max(tol, 1e-9),
                    bs.residuals["laplacian_factorization"]),
        CheckResult("dirac-null-space-invariant",
                    bs.residuals["null_space_invariance"] <= max(tol, 1e-9),
                    bs.residuals["null_space_invariance"]),
        CheckResult("dirac-left-action-star",
                    bs.residuals["star_representation"] <= max(tol, 1e-9),
                    bs.residuals["star_representation"]),
        CheckResult("dirac-norm-formula", worst <= max(tol, 1e-8), worst),
    ]
    data = {
        "dim_omega": int(bs.rank),
        "delta_factorization_residual": bs.residuals["laplacian_factorization"],
        "norm_formula_residual": worst,
    }
    if spec.generator and spec.generator["kind"] == "network" and spec.generator["c"].min() >= 0:
        net = ResistanceNetwork(spec.generator["c"])
        if net.is_connected():
            star = star_graph_check(net, seed=spec.seed)
            data["star_graph"] = {
                "is_star": star["is_star"],
                "parallelogram_holds": star["parallelogram_holds"],
            }
            checks.append(CheckResult(
                "dirac-star-characterization",
                star["is_star"] == star["parallelogram_holds"],
                star["max_relative_residual"],
            ))
    return checks, data


def _stddev_checks(spec: ProblemSpec):
    if spec.weight_element is None:
        raise InputError("the stddev command needs a 'weight_element' field")
    ea = extend(spec.algebra, spec.weight_element)
    tol = spec.tolerances.equality
    lap = stddev_laplacian(ea)
    gamma_ic = independent_copies_cdc(spec.algebra, spec.weight_element)
    from .algebra import SuperOperator
    from .energy import EnergyForm, gamma_delta, laplacian as build_laplacian

    closed = SuperOperator.from_function(
        spec.algebra,
        lambda x: spec.weight_element * (x - complex(ea.mu(x)) * spec.algebra.identity()),
    )
    lap_ic = build_laplacian(EnergyForm(spec.algebra, gamma_ic.tau_values))
    routes = {
        "schur_vs_closed": float(np.abs(lap.matrix - closed.matrix).max()),
        "schur_vs_copies": float(np.abs(lap.matrix - lap_ic.matrix).max()),
        "closed_vs_copies": float(np.abs(closed.matrix - lap_ic.matrix).max()),
    }
    gamma_quot = gamma_delta(lap)
    route_gap = max(
        float(np.abs(gamma_ic.gram - gamma_quot.gram).max()), *routes.values()
    )
    e = energy_form_of_laplacian(lap)
    rng = np.random.default_rng(spec.seed)
    sem_gap = 0.0
    for _ in range(10):
        a = random_self_adjoint(spec.algebra, rng)
        sem_gap = max(sem_gap, abs(stddev_seminorm(ea, a) - e.seminorm(a)))
    checks = [
        CheckResult("stddev-route-agreement", route_gap <= max(tol, 1e-9), route_gap),
        CheckResult("stddev-seminorm-identity", sem_gap <= max(tol, 1e-9), sem_gap),
        CheckResult("stddev-extension-connected", connectedness(ea.laplacian)),
    ]
    checks.extend(markov_check(e, seed=spec.seed, tol=tol))
    checks.extend(leibniz_check(e, seed=spec.seed, tol=tol))
    data = {
        "extension_residuals": dict(ea.residuals),
        "route_residuals": routes,
    }
    return checks, data


_RUNNERS = {
    "check-cdc": _cdc_checks,
    "laplacian": _laplacian_checks,
    "heat": _heat_checks,
    "metric": _metric_checks,
    "resistance": _resistance_checks,
    "quotient": _quotient_checks,
    "dirac": _dirac_checks,
    "stddev": _stddev_checks,
}


def _applicable(spec: ProblemSpec):
    cmds = []
    if spec.generator is not None:
        cmds.extend(["check-cdc", "laplacian", "heat", "dirac"])
        if len(spec.states) >= 2:
            cmds.append("metric")
        if spec.generator["kind"] == "network":
            cmds.append("resistance")
        if spec.projection is not None:
            cmds.append("quotient")
    if spec.weight_element is not None:
        cmds.append("stddev")
    if not cmds:
        raise InputError("spec contains no runnable suite (need at least a generator)")
    return cmds


def run_command(command: str, spec: ProblemSpec) -> dict:
    """Execute one verification suite (or every applicable one) and return
    the report as plain data."""
    if command not in COMMANDS:
        raise InputError(f"unknown command {command!r}")
    names = _applicable(spec) if command == "all" else [command]
    checks = []
    data = {}
    for name in names:
        prefix = f"{name}:" if command == "all" else ""
        try:
            got, extra = _RUNNERS[name](spec)
        except DisconnectedError as exc:
            got = [CheckResult("metrically-connected", False, witness={"reason": str(exc)})]
            extra = {"distance": DISCONNECTED}
        except PropertyViolationError as exc:
            got = [
                CheckResult(c.check, c.passed, c.residual, c.witness) for c in exc.checks
            ] or [CheckResult("precondition", False, witness={"reason": str(exc)})]
            extra = {}
        for c in got:
            checks.append(CheckResult(prefix + c.check, c.passed, c.residual, c.witness))
        if extra:
            data[name] = extra
    checks.sort(key=lambda c: c.check)
    if command != "all" and data:
        data = data[names[0]]
    passed = sum(1 for c in checks if c.passed)
    return {
        "command": command,
        "seed": spec.seed,
        "tolerances": spec.tolerances.to_dict(),
        "checks": [c.to_dict() for c in checks],
        "data": data,
        "summary": {"passed": passed, "failed": len(checks) - passed},
    }


def emit_report(report: dict, fmt: str = "human") -> str:
    """Render a report; json mode is canonical and byte-reproducible."""
    if fmt == "json":
        return dumps_canonical(report)
    lines = [
        f"command: {report['command']}   seed: {report['seed']}",
    ]
    for entry in report["checks"]:
        mark = "PASS" if entry["passed"] else "FAIL"
        lines.append(f"{mark:4}  {entry['check']:44} residual {entry['residual']:.3e}")
        if not entry["passed"] and "witness" in entry:
            lines.append(f"      witness: {entry['witness']}")
    if report.get("data"):
        lines.append("data: " + dumps_canonical(report["data"]))
    s = report["summary"]
    lines.append(f"{s['passed']} passed, {s['failed']} failed")
    return "\n".join(lines)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nca",
        description="Verification suites for noncommutative resistance networks.",
    )
    parser.add_argument("--version", action="version", version=f"nca {__version__}")
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("spec", help="path to a JSON problem spec (or inline JSON)")
    parser.add_argument("--json", action="store_true", help="emit the canonical JSON report")
    parser.add_argument("--seed", type=int, default=None, help="override the spec seed")
    parser.add_argument("--tol-pos", type=float, default=None, help="positivity tolerance")
    parser.add_argument("--tol-rank", type=float, default=None, help="rank cutoff tolerance")
    parser.add_argument("--tol-eq", type=float, default=None, help="equality tolerance")
    parser.add_argument("--t", default=None, help="comma-separated time grid, e.g. 0,0.1,1")
    parser.add_argument("--pairs", default=None,
                        help="state pairs for the metric command, e.g. 0:1,1:2")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        spec = parse_spec(args.spec)
        if args.seed is not None:
            spec.seed = args.seed
        tols = spec.tolerances
        spec.tolerances = Tolerances(
            positivity=args.tol_pos if args.tol_pos is not None else tols.positivity,
            rank=args.tol_rank if args.tol_rank is not None else tols.rank,
            equality=args.tol_eq if args.tol_eq is not None else tols.equality,
        )
        if args.t is not None:
            try:
                spec.times = [float(x) for x in args.t.split(",") if x]
            except ValueError:
                raise InputError(f"--t: cannot parse {args.t!r} as a comma-separated list")
            if any(t < 0 for t in spec.times):
                raise InputError("--t: times must be nonnegative")
        if args.pairs is not None:
            try:
                spec.pairs = [
                    [int(a), int(b)]
                    for a, b in (p.split(":") for p in args.pairs.split(",") if p)
                ]
            except ValueError:
                raise InputError(f"--pairs: cannot parse {args.pairs!r}; expected i:j,k:l")
        report = run_command(args.command, spec)
    except InputError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 2
    print(emit_report(report, "json" if args.json else "human"))
    return 0 if report["summary"]["failed"] == 0 else 1


if __name__ == "__main__":
    sys.exit(main())
