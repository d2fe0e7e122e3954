"""Command-line harness: ``arpqaoa <command> [options]``.

Exit codes: 0 success, 1 usage or input error, 2 infeasible instance,
3 simulation width cap exceeded, 4 penalty insufficiency detected by the
brute-force gate.
"""

from __future__ import annotations

import argparse
import os
import re
import sys
from pathlib import Path

from . import bench, report
from .circuit import LADDER, TREE, cnot_count
from .formulation import HUBO, QUBO, build, unpruned_qubit_count
from .generate import CANONICAL_SHAPES, canonical_instance, canonical_instances, random_instance
from .oracle import brute_force_min, enumerate_routes
from .problem import InfeasibleInstanceError, ProblemInstance, preprocess
from .qasm import export_qasm
from .sim import SimulationCapError

SEED_ENV = "ARPQAOA_SEED"

EXIT_OK, EXIT_USAGE, EXIT_INFEASIBLE, EXIT_WIDTH, EXIT_PENALTY = 0, 1, 2, 3, 4


class CliError(Exception):
    def __init__(self, message: str, code: int = EXIT_USAGE):
        super().__init__(message)
        self.code = code


def load_instance(ref: str) -> ProblemInstance:
    """A JSON file path, or ``case1``..``case4`` for a shipped instance."""
    path = Path(ref)
    if path.exists():
        return ProblemInstance.load(path)
    m = re.fullmatch(r"case(\d+)", ref)
    if m and int(m.group(1)) in CANONICAL_SHAPES:
        return canonical_instance(int(m.group(1)))
    raise CliError(f"no such instance file: {ref}")


def _default_seed() -> int:
    raw = os.environ.get(SEED_ENV)
    if raw is None:
        return 0
    try:
        return int(raw)
    except ValueError:
        raise CliError(f"{SEED_ENV} must be an integer, got {raw!r}") from None


def _emit(text: str, output: str | None) -> None:
    if output:
        Path(output).write_text(text)
    else:
        sys.stdout.write(text)


# -- commands -----------------------------------------------------------------

def cmd_gen(args) -> int:
    if args.canonical is not None:
        inst = canonical_instance(args.canonical)
    else:
        if args.internal_nodes is None or args.deadline is None:
            raise CliError("gen needs --internal-nodes and --deadline (or --canonical)")
        inst = random_instance(args.internal_nodes, args.deadline, args.seed,
                               tuple(args.value_range), tuple(args.time_range),
                               args.edge_probability)
    _emit(inst.dumps(), args.output)
    return EXIT_OK


def cmd_build(args) -> int:
    completed, _, mask = preprocess(load_instance(args.instance))
    f = build(completed, mask, args.form, args.alpha)
    if args.output:
        Path(f"{args.output}.poly").write_text(f.poly_text())
        Path(f"{args.output}.registry.json").write_text(f.registry_json())
        print(f"qubits={f.num_qubits} degree={f.poly.degree} terms={len(f.poly.terms)} "
              f"alpha={f.alpha!r} dropped_constant={f.dropped_constant!r}")
    else:
        sys.stdout.write(f.poly_text())
    return EXIT_OK


def cmd_compile(args) -> int:
    prep = bench.prepare(load_instance(args.instance), args.form, args.factor, args.style, args.p)
    params = args.params if args.params is not None else [0.01] * len(prep.ansatz.parameters)
    if len(params) != len(prep.ansatz.parameters):
        raise CliError(f"--params needs {len(prep.ansatz.parameters)} values "
                       f"({', '.join(prep.ansatz.parameters)})")
    text = export_qasm(prep.ansatz, params)
    if args.output:
        Path(args.output).write_text(text)
        m = prep.metrics
        print(f"qubits={m.qubits} depth={m.depth} two_qubit_gates={m.two_qubit_gates}")
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_stats(args) -> int:
    inst = load_instance(args.instance)
    forms = [bench.form_label(args.form, args.factor)] if args.form else list(bench.FORMS)
    print("test,form,qubits,unpruned_qubits,depth,two_qubit_gates,cnot_closed_form")
    for label in forms:
        kind, factored = bench.parse_form(label)
        prep = bench.prepare(inst, kind, factored, args.style, args.p)
        f, m = prep.formulation, prep.metrics
        unpruned = unpruned_qubit_count(kind, len(inst.internal), inst.deadline)
        closed = args.p * cnot_count(f.spin, factored)
        print(f"{prep.test},{label},{f.num_qubits},{unpruned},{m.depth},{m.two_qubit_gates},{closed}")
    n, T = len(inst.internal), inst.deadline
    print(f"# closed forms before pruning (|I|={n}, T={T}): "
          f"hubo (|I|+1)(T-1)+(T+1) = {unpruned_qubit_count(HUBO, n, T)}; "
          f"qubo (|I|+1)+(T-1)(|I|^2+1)+(T+1) = {unpruned_qubit_count(QUBO, n, T)}")
    return EXIT_OK


def cmd_oracle(args) -> int:
    inst = load_instance(args.instance)
    completed, _, mask = preprocess(inst)
    opt = enumerate_routes(completed)
    print(f"route search: value={opt.value!r} route={opt.route} ties={opt.tie_count}")
    consistent = True
    for kind in ([args.form] if args.form else [QUBO, HUBO]):
        f = build(completed, mask, kind)
        if f.num_qubits > args.max_qubits:
            print(f"{kind}: skipped ({f.num_qubits} qubits > cap {args.max_qubits})")
            continue
        bf = brute_force_min(f, args.max_qubits)
        total = bf.value + f.dropped_constant
        ok = bf.feasible and abs(total - opt.value) < 1e-6
        consistent &= ok
        print(f"{kind}: qubits={f.num_qubits} value={total!r} feasible={bf.feasible} "
              f"route={bf.route} ties={bf.tie_count} {'ok' if ok else 'INCONSISTENT'}")
    if not consistent:
        raise CliError("brute-force minimum is not an optimal feasible route", EXIT_PENALTY)
    return EXIT_OK


def _gate(prep: bench.Prepared, max_qubits: int) -> None:
    check = bench.penalty_gate(prep, max_qubits)
    if not check.ok:
        raise CliError(f"{prep.test}/{prep.form}: penalty insufficient, brute-force minimum "
                       f"{check.brute_force.value + prep.formulation.dropped_constant!r} "
                       f"(feasible={check.brute_force.feasible}) vs optimum {check.optimum!r}",
                       EXIT_PENALTY)


def _print_rows(rows) -> None:
    print("test,form,repeat,seed,circuit_depth,two_qubit_gates,found_solution,optimal,feasible")
    for r in rows:
        print(f"{r.test},{r.form},{r.repeat},{r.seed},{r.depth},{r.two_qubit_gates},"
              f"{r.found_cost!r},{r.optimal_cost!r},{r.feasible}")
    for a in report.aggregate(rows):
        nd = "undefined" if a.normalized_distance is None else f"{a.normalized_distance:.6g}"
        print(f"# {a.test}/{a.form}: hits={a.hits}/{a.repeats} N_D={nd} std={a.std_found:.6g}")


def cmd_solve(args) -> int:
    prep = bench.prepare(load_instance(args.instance), args.form, args.factor, args.style, args.p)
    if prep.formulation.num_qubits > args.max_qubits:
        raise CliError(f"simulation-infeasible: {prep.formulation.num_qubits} qubits > cap "
                       f"{args.max_qubits}", EXIT_WIDTH)
    _gate(prep, args.max_qubits)
    rows = bench.solve(prep, args.repeats, args.seed, args.shots, args.max_evaluations, args.max_qubits)
    if args.output:
        report.save_rows(rows, args.output)
    _print_rows(rows)
    return EXIT_OK


def cmd_bench(args) -> int:
    instances = ([load_instance(i) for i in args.instances] if args.instances
                 else list(canonical_instances().values()))
    rows, skipped, failures = [], [], []
    for inst in instances:
        for label in args.forms:
            kind, factored = bench.parse_form(label)
            prep = bench.prepare(inst, kind, factored, args.style, args.p)
            width = prep.formulation.num_qubits
            if width > args.max_qubits:
                skipped.append({"test": prep.test, "form": label, "qubits": width,
                                "depth": prep.metrics.depth,
                                "two_qubit_gates": prep.metrics.two_qubit_gates,
                                "reason": "simulation-infeasible"})
                print(f"# {prep.test}/{label}: simulation-infeasible ({width} qubits)", file=sys.stderr)
                continue
            try:
                _gate(prep, args.max_qubits)
            except CliError as err:
                failures.append(str(err))
                print(f"# {err}", file=sys.stderr)
                continue
            rows.extend(bench.solve(prep, args.repeats, args.seed, args.shots,
                                    args.max_evaluations, args.max_qubits))
    if args.output:
        report.save_rows(rows, args.output, skipped)
    if rows:
        _print_rows(rows)
    if args.report:
        report.write_report(rows, args.report, plots=not args.no_plots)
    if failures:
        return EXIT_PENALTY
    return EXIT_OK


def cmd_report(args) -> int:
    rows = report.filter_rows(report.load_rows(args.rows), args.test or (), args.form or ())
    try:
        written = report.write_report(rows, args.output, plots=not args.no_plots)
    except report.EmptyReportError as err:
        raise CliError(str(err)) from None
    for path in written:
        print(path)
    return EXIT_OK


# -- parser -------------------------------------------------------------------

def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--seed", type=int, default=None,
                   help=f"random seed (default: ${SEED_ENV} or 0)")
    p.add_argument("--shots", type=int, default=1024)
    p.add_argument("--repeats", type=int, default=10)
    p.add_argument("--max-qubits", type=int, default=24)
    p.add_argument("--factor", action="store_true", help="factor phase gadgets into subset chains")
    p.add_argument("--style", choices=(LADDER, TREE), default=LADDER)
    p.add_argument("--form", choices=(QUBO, HUBO), default=None)
    p.add_argument("--p", type=int, default=1, help="QAOA layers")
    return p


def make_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(prog="arpqaoa", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", parents=[common], help="generate a random or canonical instance")
    p.add_argument("--internal-nodes", type=int)
    p.add_argument("--deadline", type=int)
    p.add_argument("--value-range", type=int, nargs=2, default=(5, 30), metavar=("LO", "HI"))
    p.add_argument("--time-range", type=int, nargs=2, default=(1, 3), metavar=("LO", "HI"))
    p.add_argument("--edge-probability", type=float, default=0.4)
    p.add_argument("--canonical", type=int, choices=sorted(CANONICAL_SHAPES))
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("build", parents=[common], help="write the polynomial and qubit registry")
    p.add_argument("instance")
    p.add_argument("--alpha", type=float, default=None, help="penalty weight (default 0.75 max value)")
    p.add_argument("-o", "--output", help="output prefix for .poly and .registry.json")
    p.set_defaults(func=cmd_build, default_form=HUBO)

    p = sub.add_parser("compile", parents=[common], help="export the QAOA circuit as OpenQASM")
    p.add_argument("instance")
    p.add_argument("--params", type=float, nargs="+", help="gamma_1..gamma_p beta_1..beta_p")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_compile, default_form=HUBO)

    p = sub.add_parser("stats", parents=[common], help="qubit, depth and two-qubit gate counts")
    p.add_argument("instance")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("oracle", parents=[common], help="compare brute force with route search")
    p.add_argument("instance")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("solve", parents=[common], help="run seeded QAOA repeats on one instance")
    p.add_argument("instance")
    p.add_argument("--max-evaluations", type=int, default=150)
    p.add_argument("-o", "--output", help="rows JSON for the report command")
    p.set_defaults(func=cmd_solve, default_form=HUBO)

    p = sub.add_parser("bench", parents=[common], help="solve several instances and forms")
    p.add_argument("instances", nargs="*", help="instance files (default: the shipped cases)")
    p.add_argument("--forms", nargs="+", choices=bench.FORMS, default=list(bench.FORMS))
    p.add_argument("--max-evaluations", type=int, default=150)
    p.add_argument("-o", "--output", help="rows JSON")
    p.add_argument("--report", help="also write the report into this directory")
    p.add_argument("--no-plots", action="store_true")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("report", help="CSV, JSON, data files and figures")
    p.add_argument("rows", nargs="+", help="rows JSON files written by solve or bench")
    p.add_argument("--test", action="append", help="keep only this test (repeatable)")
    p.add_argument("--form", dest="form", action="append", choices=bench.FORMS,
                   help="keep only this form (repeatable)")
    p.add_argument("-o", "--output", required=True, help="output directory")
    p.add_argument("--no-plots", action="store_true")
    p.set_defaults(func=cmd_report)
    return parser


def main(argv=None) -> int:
    parser = make_parser()
    args = parser.parse_args(argv)
    try:
        if getattr(args, "seed", 0) is None:
            args.seed = _default_seed()
        if hasattr(args, "default_form") and args.form is None:
            args.form = args.default_form
        return args.func(args)
    except CliError as err:
        print(f"error: {err}", file=sys.stderr)
        return err.code
    except InfeasibleInstanceError as err:
        print(f"error: infeasible instance: {err}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except SimulationCapError as err:
        print(f"error: simulation-infeasible: {err}", file=sys.stderr)
        return EXIT_WIDTH
    except (ValueError, OSError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
