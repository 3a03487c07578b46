"""Command-line interface: ``lindforest {inspect,analyze,symmetry,simulate} FILE``.

Exit codes: 0 ok, 2 bad input, 3 internal disagreement, 4 not a GPM system,
5 integration guard.  Levels are printed 1-based.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from .exceptions import (
    InvalidSystem,
    MethodDisagreement,
    NonPhysicalState,
    NotGPM,
    NotInLeftKernel,
    RankMismatch,
    SearchSpaceExceeded,
    StabilityGuard,
)
from .graph import enumerate_basin_forests, enumerate_in_trees, export_dot, format_weight
from .io import InputError, load_initial, load_relation, load_system, system_to_dict
from .estimator import StationaryStateAnalyzer
from .model import GPM_TOL, is_gpm
from .oracle import integrate_master_equation, trace_distance, write_trajectory_csv
from .stationary import asymptotic_state
from .symmetry import (
    EquivalenceRelation,
    build_coherence_graph,
    check_oscillations,
    check_resonance,
    coherence_kernel_dim,
    detect_hidden_enclosures,
    verify_symmetry,
)

EXIT_OK, EXIT_INPUT, EXIT_DISAGREE, EXIT_NOT_GPM, EXIT_GUARD = 0, 2, 3, 4, 5
METHODS = {"enum": "enumerate", "det": "determinant", "both": "both"}


def fmt(x) -> str:
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, int):
        return str(x)
    return f"{float(x):.12g}"


def fmt_complex(z: complex) -> str:
    return f"{z.real:.12g}{z.imag:+.12g}i"


def _vertices(vs) -> str:
    return "{" + ", ".join(str(v + 1) for v in vs) + "}"


def _threads(args) -> int:
    if args.threads is not None:
        return args.threads
    env = os.environ.get("LF_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise InputError(f"LF_THREADS must be an integer, got {env!r}") from None
    return 1


def cmd_inspect(args) -> int:
    sf = load_system(args.file)
    s = sf.system
    print(f"dimension: {s.dim}")
    flags = [is_gpm(op, args.gpm_tol) for op in s.lindblad_ops]
    for i, ok in enumerate(flags):
        print(f"L{i + 1}: {'GPM' if ok else 'not GPM'}")
    m = len(flags)
    if all(flags):
        word = "GPM" if m == 1 else ("both GPM" if m == 2 else "all GPM")
    else:
        word = f"{sum(flags)} of {m} GPM"
    print(f"{m} Lindblad operator{'s' if m != 1 else ''}, {word}")
    print("validation: ok")
    return EXIT_OK


def _initial_lambda(spec: str, n: int):
    if spec == "uniform":
        return [Fraction(1, n)] * n
    rho = load_initial(spec, n)
    lam = np.real(np.diag(rho))
    return lam


def cmd_analyze(args) -> int:
    sf = load_system(args.file)
    est = StationaryStateAnalyzer(method=METHODS[args.method], edge_tol=args.edge_tol, threads=_threads(args))
    est.fit(sf.system, basis=sf.projectors)
    g, b = est.graph_, est.basins_
    print(f"vertices: {g.n}, edges: {len(g.edges)}")
    print(f"basins: {b.n_basins}, rank: {est.rank_}")
    for eta, bv in enumerate(b.basins):
        print(f"basin {eta + 1}: {_vertices(bv)}")
    print(f"decay vertices: {_vertices(b.non_basin)}")
    result: dict = {"system": system_to_dict(sf.system, sf.projectors), "basins": [], "non_basin": [v + 1 for v in b.non_basin]}
    for orb in est.orbits_:
        bv = b.basins[orb.eta]
        if orb.exact is not None:
            vals = [f"{x}/{orb.denominator}" for x in orb.numerators]
        else:
            vals = [fmt(x) for x in orb.lambda_inf]
        counts = {v: len(enumerate_in_trees(g, bv, v)) for v in bv}
        print(f"stationary orbit, basin {orb.eta + 1}:")
        for v in bv:
            print(f"  lambda_{v + 1} = {vals[v]}  (trees: {counts[v]}, weight: {format_weight(orb.numerators[v])})")
        result["basins"].append({
            "vertices": [v + 1 for v in bv],
            "lambda": [vals[v] for v in range(g.n)],
            "lambda_float": [float(x) for x in orb.lambda_inf],
            "tree_sums": {str(v + 1): orb.numerators[v] for v in bv},
            "tree_counts": {str(v + 1): counts[v] for v in bv},
            "denominator": orb.denominator,
        })
    forests = enumerate_basin_forests(g, b, "pruned")
    print(f"pruned forests: {len(forests)}")
    result["forest_count"] = len(forests)
    result["kappa_pruned"] = []
    for cv in est.constraints_:
        print(f"kappa'_{cv.eta + 1} = ({', '.join(format_weight(x) for x in cv.kappa)})")
        result["kappa_pruned"].append(list(cv.kappa))
    if args.initial:
        lam0 = _initial_lambda(args.initial, g.n)
        c, rho = asymptotic_state(g, b, lam0, est.projectors_, est.orbits_, est.constraints_)
        for eta, x in enumerate(c):
            print(f"c_{eta + 1} = {fmt(x)}")
        print("rho_inf diagonal: " + " ".join(f"{x:.12g}" for x in np.real(np.diag(rho))))
        result["initial"] = {"c": [fmt(x) for x in c], "rho_inf_diagonal": [float(x) for x in np.real(np.diag(rho))]}
    if args.dot:
        Path(args.dot).write_text(export_dot(g, b, sf.system.labels), encoding="utf-8")
    if args.json:
        Path(args.json).write_text(json.dumps(result, indent=1) + "\n", encoding="utf-8")
    return EXIT_OK


def _report_relation(s, rel, basins) -> None:
    rep = verify_symmetry(s, rel, basins)
    print(f"relation {rel.one_based()}: hamiltonian {'ok' if rep.hamiltonian_ok else 'violated'}, "
          f"dissipation {'ok' if rep.dissipation_ok else 'violated'}")
    for v in rep.violations:
        print(f"  {v}")
    cg = build_coherence_graph(s, rel)
    for i, comp in enumerate(cg.components):
        cert = check_resonance(cg, i)
        line = f"  component {i + 1} ({len(comp)} nodes): {cert.verdict}"
        if cert.witness is not None:
            e = cert.witness
            src = f"({e.source[0] + 1},{e.source[1] + 1})"
            tgt = f"({e.target[0] + 1},{e.target[1] + 1})"
            kind = "self-loop" if e.source == e.target else "edge"
            line += f"; witness {kind} {src} -> {tgt} via L{e.alpha + 1}, weight {fmt_complex(e.weight)}"
        print(line)
    print(f"  kernel dimension of coherence generator: {coherence_kernel_dim(s, rel)}")


def cmd_symmetry(args) -> int:
    sf = load_system(args.file)
    s = sf.system
    est = StationaryStateAnalyzer(edge_tol=args.edge_tol).fit(s)
    basins = est.basins_
    if args.relation:
        try:
            rel = EquivalenceRelation.from_one_based(load_relation(args.relation))
        except ValueError as exc:
            raise InputError(str(exc)) from None
        _report_relation(s, rel, basins)
    if args.search:
        cands = detect_hidden_enclosures(s, basins, max_n=args.max_n)
        if not cands:
            print("no candidate relations")
        for c in cands:
            print(f"candidate {c.relation.one_based()}: {c.verdict}")
            _report_relation(s, c.relation, basins)
    if args.oscillations:
        any_found = False
        for a in range(basins.n_basins):
            for bb in range(a + 1, basins.n_basins):
                delta = check_oscillations(s, None, None, basins.basins[a], basins.basins[bb], basins)
                if delta is not None:
                    any_found = True
                    print(f"oscillations between basins {a + 1} and {bb + 1}: Delta = {delta:.12g}")
        if not any_found:
            print("no oscillations found")
    return EXIT_OK


def cmd_simulate(args) -> int:
    sf = load_system(args.file)
    s = sf.system
    n = s.dim
    rho0 = np.eye(n, dtype=np.complex128) / n if args.initial == "uniform" else load_initial(args.initial, n)
    traj = integrate_master_equation(s, rho0, args.t, args.dt, record_every=args.record_every)
    rho = traj.final
    print(f"t = {traj.times[-1]:.12g}, steps = {len(traj.times) - 1 if args.record_every == 1 else 'n/a'}")
    print("final diagonal: " + " ".join(f"{x:.12g}" for x in np.real(np.diag(rho))))
    print(f"residual: {traj.residual:.3e}")
    if sf.projectors is None or sf.projectors.is_identity():
        diag0 = np.allclose(rho0, np.diag(np.diag(rho0)))
        if diag0:
            est = StationaryStateAnalyzer(edge_tol=args.edge_tol).fit(s)
            pred = est.predict_state(np.real(np.diag(rho0)))
            print(f"trace distance to prediction: {trace_distance(rho, pred):.3e}")
    if args.out:
        write_trajectory_csv(traj, args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="lindforest", description="Graph analysis of Lindblad systems.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("file", help="system JSON file")
    common.add_argument("--threads", type=int, default=None, help="worker threads (default: $LF_THREADS or 1)")
    common.add_argument("--gpm-tol", type=float, default=GPM_TOL)
    common.add_argument("--edge-tol", type=float, default=1e-12)
    sub = p.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("inspect", parents=[common], help="validate a system file and classify its operators")
    sp.set_defaults(func=cmd_inspect)

    sp = sub.add_parser("analyze", parents=[common], help="basins, stationary orbits, conserved quantities")
    sp.add_argument("--method", choices=sorted(METHODS), default="enum")
    sp.add_argument("--dot", metavar="PATH")
    sp.add_argument("--json", metavar="PATH")
    sp.add_argument("--initial", metavar="uniform|FILE")
    sp.set_defaults(func=cmd_analyze)

    sp = sub.add_parser("symmetry", parents=[common], help="hidden enclosures of GPM systems")
    sp.add_argument("--relation", metavar="FILE")
    sp.add_argument("--search", action="store_true")
    sp.add_argument("--oscillations", action="store_true")
    sp.add_argument("--max-n", type=int, default=12)
    sp.set_defaults(func=cmd_symmetry)

    sp = sub.add_parser("simulate", parents=[common], help="integrate the master equation")
    sp.add_argument("--initial", default="uniform", metavar="uniform|FILE")
    sp.add_argument("--t", type=float, default=10.0)
    sp.add_argument("--dt", type=float, default=1e-3)
    sp.add_argument("--record-every", type=int, default=1)
    sp.add_argument("--out", metavar="CSV")
    sp.set_defaults(func=cmd_simulate)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if getattr(args, "threads", None) is not None and args.threads < 1:
            raise InputError("--threads must be >= 1")
        if args.command == "symmetry" and not (args.relation or args.search or args.oscillations):
            raise InputError("symmetry needs --relation, --search or --oscillations")
        return args.func(args)
    except NotGPM as exc:
        print(f"error: not a GPM system: {exc}", file=sys.stderr)
        return EXIT_NOT_GPM
    except (MethodDisagreement, RankMismatch, NotInLeftKernel) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DISAGREE
    except (StabilityGuard, NonPhysicalState) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_GUARD
    except SearchSpaceExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (InvalidSystem, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
