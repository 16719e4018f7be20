"""Command-line front end for the ensemble search/period-finding experiments.

Exit codes are scripting contract: 0 success, 1 algorithmic failure (e.g. a
period-finding run that needs a different base), 2 configuration/validation
error, 3 molecule-budget violation.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from .engine import ExecPolicy
from .grover import (BudgetError, ResourceBudget, rpa_majority_vote,
                     rpa_state_probs, rpa_trial_counts, run_pqc_grover,
                     sweep_csv, sweep_tradeoff)
from .registers import CapacityError, RegisterLayout, read_ensemble
from .shor import n1_validity_check, run_pqc_shor, shor_params
from .spectrometer import CouplingConfig, default_couplings, measure_expected, measure_sampled

SUCCESS_TOL = 1e-6


def _figures():
    from . import figures  # deferred: pulls in matplotlib

    return figures


def _default_seed() -> int | None:
    env = os.environ.get("PQC_SEED")
    return int(env) if env else None


def _add_common(parser: argparse.ArgumentParser, *, measured: bool = True) -> None:
    parser.add_argument("--seed", type=int, default=_default_seed(),
                        help="RNG seed (default: PQC_SEED env var, else nondeterministic)")
    parser.add_argument("--workers", type=int, default=1, help="parallel workers")
    parser.add_argument("--out", help="write the JSON/CSV report to this path")
    parser.add_argument("--fig", help="render a figure of the result to this path")
    if measured:
        parser.add_argument("--mode", choices=("expected", "sampled"), default="expected",
                            help="exact intensities or Born-rule sampling")
        parser.add_argument("--samples", type=int, default=4096,
                            help="molecules sampled per constituent (sampled mode)")


def _load_couplings(path: str | None, width: int) -> CouplingConfig:
    if path is None:
        return default_couplings(width)
    with open(path) as fh:
        doc = json.load(fh)
    return CouplingConfig(doc.get("omega0", 0.0), doc["J"])


def _write_json(doc: dict, path: str | None) -> None:
    if path:
        with open(path, "w") as fh:
            json.dump(doc, fh, indent=2)
            fh.write("\n")


def _budget(args) -> ResourceBudget:
    return ResourceBudget(molecules=args.ne, molecules_per_logical=args.ns)


def cmd_grover(args) -> int:
    layout = RegisterLayout(n1=args.n1, n2=args.n2)
    policy = ExecPolicy(workers=args.workers)
    final, report = run_pqc_grover(layout, args.marked, budget=_budget(args),
                                   policy=policy, iterations=args.iterations)
    config = _load_couplings(args.couplings, layout.n)
    if args.mode == "sampled":
        report.spectrum = measure_sampled(final, config, args.samples, args.seed)
    elif args.couplings:
        report.spectrum = measure_expected(final, config)
    print(f"marked={report.marked_full} queries={report.queries_used} "
          f"p_success={report.success_probability:.9f}")
    for line in report.spectrum.summary_lines():
        print(line)
    _write_json(report.to_json_dict(), args.out)
    if args.fig:
        figures = _figures()
        figures.save_figure(figures.spectrum_figure(
            report.spectrum, title=f"search over {layout.N1} sub-databases"), args.fig)
    return 0 if report.success_probability >= 1 - SUCCESS_TOL else 1


def cmd_shor(args) -> int:
    params = shor_params(args.nb, args.a, n1=args.n1, n2=args.n2)
    _budget(args).check(params.n1)
    advisory = n1_validity_check(params)
    if advisory.level != "ok":
        print(f"advisory[{advisory.level}]: {advisory.message}", file=sys.stderr)
    policy = ExecPolicy(workers=args.workers)
    _, spectrum, report = run_pqc_shor(params, seed=args.seed, mode=args.mode,
                                       samples=args.samples, policy=policy)
    print(f"Nb={params.modulus} a={params.base} r={report.r} method={report.method} "
          f"transitions={report.transitions_observed}")
    if report.factors:
        print(f"factors: {report.factors[0]} x {report.factors[1]}")
    elif report.failure_reason:
        print(f"failure: {report.failure_reason}")
    _write_json(report.to_json_dict(), args.out)
    if args.fig:
        figures = _figures()
        figures.save_figure(figures.spectrum_figure(
            spectrum, title=f"n2-register spectrum, a={params.base} mod {params.modulus}"),
            args.fig)
    return 0 if report.success else 1


def cmd_sweep(args) -> int:
    rows = sweep_tradeoff(args.n, args.n1)
    table = sweep_csv(rows, realized=args.realized)
    print(table, end="")
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(table)
    if args.fig:
        figures = _figures()
        figures.save_figure(figures.sweep_figure(rows), args.fig)
    return 0


def cmd_rpa(args) -> int:
    db_size = 1 << args.n
    p_marked, p_other = (float(v) for v in
                         (rpa_state_probs(db_size, args.marked)[args.marked],
                          rpa_state_probs(db_size, args.marked)[(args.marked + 1) % db_size]))
    counts = rpa_trial_counts(db_size, args.k, args.seed, args.marked, trial=0)
    successes = 0
    first_winner = None
    for trial in range(args.trials):
        winner, ok = rpa_majority_vote(db_size, args.k, args.seed, args.marked, trial)
        successes += ok
        if trial == 0:
            first_winner = winner
    doc = {
        "n": args.n, "N": db_size, "k": args.k, "marked": args.marked,
        "seed": args.seed, "trials": args.trials,
        "p_marked_exact": p_marked, "p_other_exact": p_other,
        "empirical_marked_freq": counts[args.marked] / args.k,
        "winner_first_trial": first_winner,
        "successes": successes, "success_rate": successes / args.trials,
    }
    print(f"N={db_size} k={args.k} p_marked={p_marked:.6f} "
          f"empirical={doc['empirical_marked_freq']:.6f} "
          f"success_rate={doc['success_rate']:.3f} ({successes}/{args.trials})")
    _write_json(doc, args.out)
    if args.fig:
        figures = _figures()
        figures.save_figure(figures.rpa_figure(counts, args.marked), args.fig)
    return 0


def cmd_spectrum(args) -> int:
    ensemble = read_ensemble(args.ensemble)
    widths = {"argument": ensemble.layout.n, "n2": ensemble.layout.n2,
              "function_argument": ensemble.layout.m + ensemble.layout.n}
    config = _load_couplings(args.couplings, widths[args.target])
    if args.mode == "sampled":
        spectrum = measure_sampled(ensemble, config, args.samples, args.seed,
                                   target=args.target)
    else:
        spectrum = measure_expected(ensemble, config, target=args.target)
    for line in spectrum.summary_lines():
        print(line)
    _write_json(spectrum.to_json_dict(), args.out)
    if args.fig:
        figures = _figures()
        figures.save_figure(figures.spectrum_figure(spectrum), args.fig)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pqcsim",
        description="Simulate parallel quantum computing on one ensemble quantum computer")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("grover", help="zero-failure search over N1 sub-databases")
    p.add_argument("--n1", type=int, required=True, help="mixed argument qubits")
    p.add_argument("--n2", type=int, required=True, help="coherent argument qubits")
    p.add_argument("--marked", type=int, required=True, help="marked database item")
    p.add_argument("--iterations", type=int, default=None,
                   help="override the derived iteration count")
    p.add_argument("--couplings", help="JSON couplings file {omega0, J}")
    p.add_argument("--ne", type=float, default=6.022e23, help="molecule budget N_E")
    p.add_argument("--ns", type=int, default=1, help="molecules per logical molecule N_s")
    _add_common(p)
    p.set_defaults(func=cmd_grover)

    p = sub.add_parser("shor", help="period finding with a partial Fourier transform")
    p.add_argument("--nb", type=int, required=True, help="number to factor")
    p.add_argument("--a", type=int, required=True, help="base coprime to nb")
    p.add_argument("--n1", type=int, default=None, help="mixed argument qubits")
    p.add_argument("--n2", type=int, default=None, help="coherent argument qubits")
    p.add_argument("--ne", type=float, default=6.022e23, help="molecule budget N_E")
    p.add_argument("--ns", type=int, default=1, help="molecules per logical molecule N_s")
    _add_common(p)
    p.set_defaults(func=cmd_shor)

    p = sub.add_parser("sweep", help="query/molecule trade-off across register splits")
    p.add_argument("--n", type=int, required=True, help="total argument qubits")
    p.add_argument("--n1", type=int, nargs="+", default=None, help="splits to include")
    p.add_argument("--realized", action="store_true",
                   help="emit the realized product column instead of the asymptotic one")
    _add_common(p, measured=False)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("rpa", help="repetition-parallel baseline (majority vote)")
    p.add_argument("--n", type=int, required=True, help="database qubits (all pure)")
    p.add_argument("--k", type=int, required=True, help="parallel computers per trial")
    p.add_argument("--trials", type=int, default=1)
    p.add_argument("--marked", type=int, default=0)
    _add_common(p, measured=False)
    p.set_defaults(func=cmd_rpa)

    p = sub.add_parser("spectrum", help="render a saved ensemble through the spectrometer")
    p.add_argument("--ensemble", required=True, help="ensemble JSON file")
    p.add_argument("--target", choices=("argument", "n2", "function_argument"),
                   default="argument", help="qubits the ancilla coupling reads")
    p.add_argument("--couplings", help="JSON couplings file {omega0, J}")
    _add_common(p)
    p.set_defaults(func=cmd_spectrum)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except BudgetError as exc:
        print(f"budget violation: {exc}", file=sys.stderr)
        return 3
    except (CapacityError, ValueError, OSError, KeyError) as exc:
        print(f"invalid configuration: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
