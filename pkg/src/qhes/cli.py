"""Command-line runner: ``qhes {judge,select,sweep,verify}``.

Exit codes: 0 success, 1 validation or parse error, 2 verification failure,
3 resource cap exceeded.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

from .config import RunConfig, coin_config, load_config
from .eigensolver import dichotomy_lowest, quantum_selector
from .errors import LayoutError, ParseError, QhesError, ResourceError, ValidationError
from .experiments import ExperimentRecord, default_threads, format_value, parse_range, run_sweep, write_csv
from .reference import brute_force_eigs
from .verification import run_suite

EXIT_OK, EXIT_INVALID, EXIT_SUITE, EXIT_RESOURCE = 0, 1, 2, 3


def _common(p: argparse.ArgumentParser, config_required: bool = False):
    p.add_argument("--config", type=Path, required=config_required, help="INI or JSON experiment file")
    p.add_argument("--out", type=Path, help="write CSV records here instead of stdout")
    p.add_argument("--seed", type=int, help="override the configured seed")
    p.add_argument("--threads", type=int, help="worker threads (default $QHES_THREADS or CPU count)")
    p.add_argument("--shots", type=int, help="sampled readout with this many shots (0 = exact)")
    p.add_argument("--json", action="store_true", help="machine-readable output")
    p.add_argument("--no-timing", action="store_true", help="write wall_time_ms as 0 for byte-comparable output")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qhes", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    _common(sub.add_parser("judge", help="bisect for the lowest eigenvalue"), config_required=True)
    _common(sub.add_parser("select", help="extract the eigenstate at E_g"), config_required=True)
    sw = sub.add_parser("sweep", help="reference sweeps over (N, R) or (N, K)")
    _common(sw)
    sw.add_argument("kind", choices=("fig3", "fig4"))
    sw.add_argument("--n", default="2,3", help="physical sizes, e.g. '2,3' or '2..4'")
    sw.add_argument("--range", dest="xs", default=None, help="R (fig3) or K (fig4) values, e.g. '3..7'")
    sw.add_argument("--seeds", default="0", help="seed list, e.g. '0..4'")
    vf = sub.add_parser("verify", help="run the invariant suite")
    _common(vf)
    vf.add_argument("--inject", choices=("sign-flip",), help="corrupt the evolution kernel to prove the checks bite")
    return parser


def _load(args) -> RunConfig:
    run = load_config(args.config)
    if args.seed is not None:
        run.seed = args.seed
    if args.shots is not None:
        run.shots = args.shots
    return run


def _emit_records(args, records: list[ExperimentRecord]):
    if args.out:
        with open(args.out, "w", newline="") as fh:
            write_csv(records, fh, timing=not args.no_timing)
    elif not args.json:
        write_csv(records, sys.stdout, timing=not args.no_timing)


def cmd_judge(args) -> int:
    run = _load(args)
    if run.filter is None:
        raise ValidationError("[filter] needs R for the judge")
    h = run.hamiltonian
    ref = brute_force_eigs(h) if h.n_qubits <= 12 else None
    t = time.perf_counter()
    trace = dichotomy_lowest(
        h, run.filter, run.seed, amp=run.amp, strategy=run.strategy, repeats=run.repeats,
        shots=run.shots, reference=ref, decision_cut=run.decision_cut,
    )
    ms = (time.perf_counter() - t) * 1e3
    rec = ExperimentRecord(
        "judge", h.n_qubits, run.filter.R, run.filter.Q, run.filter.W, None, run.seed,
        trace.E_c, ref.ground if ref else None, trace.eps_v, ms, run.shots,
    )
    if args.json:
        out = {
            "E_c": trace.E_c,
            "iterations": trace.iterations,
            "brackets": trace.brackets,
            "verdicts": [
                {"threshold": s.threshold, "decision": s.verdict.decision, "mark0_probability": s.verdict.mark0_probability}
                for s in trace.steps
            ],
            "record": rec.as_dict() if not args.no_timing else {**rec.as_dict(), "wall_time_ms": 0.0},
        }
        print(json.dumps(out, indent=2))
    else:
        for s in trace.steps:
            print(f"# threshold {format_value(s.threshold)}: {s.verdict.decision} (p = {s.verdict.mark0_probability:.6f})", file=sys.stderr)
    _emit_records(args, [rec])
    return EXIT_OK


def cmd_select(args) -> int:
    run = _load(args)
    h = run.hamiltonian
    ref = brute_force_eigs(h)
    E_g = run.coin["E_g"] if run.coin["E_g"] is not None else ref.ground
    t = time.perf_counter()
    res = quantum_selector(
        h, E_g, run.seed, coin=coin_config(run), gap=run.coin["gap"], reference=ref,
        eps=run.coin["eps"], K=run.coin["K"], amp=run.amp,
    )
    ms = (time.perf_counter() - t) * 1e3
    rec = ExperimentRecord("select", h.n_qubits, res.coin.K, None, None, res.coin.M, run.seed, E_g, ref.ground, res.eps_s, ms, run.shots)
    amps = res.physical_state.amplitudes
    if args.json:
        out = {
            "amplitudes": [[float(a.real), float(a.imag)] for a in amps],
            "eps_s": res.eps_s,
            "M": res.coin.M,
            "K": res.coin.K,
            "success_probability": res.success_probability,
            "record": rec.as_dict() if not args.no_timing else {**rec.as_dict(), "wall_time_ms": 0.0},
        }
        print(json.dumps(out, indent=2))
    else:
        print("# index,real,imag", file=sys.stderr)
        for i, a in enumerate(amps):
            print(f"# {i},{format_value(float(a.real))},{format_value(float(a.imag))}", file=sys.stderr)
    _emit_records(args, [rec])
    return EXIT_OK


def cmd_sweep(args) -> int:
    Ns = parse_range(args.n)
    xs = parse_range(args.xs if args.xs is not None else ("3..7" if args.kind == "fig3" else "2..7"))
    seeds = parse_range(args.seeds)
    records = run_sweep(args.kind, Ns, xs, seeds, args.threads or default_threads(), args.shots or 0)
    if args.json:
        print(json.dumps([r.as_dict() for r in records], indent=2))
    _emit_records(args, records)
    return EXIT_OK


def cmd_verify(args) -> int:
    report = run_suite(args.seed or 0, args.inject)
    if args.json:
        print(json.dumps(report.as_dict(), indent=2))
    else:
        print("\n".join(report.lines()))
        print(f"{sum(c.passed for c in report.checks)}/{len(report.checks)} checks passed")
    return EXIT_OK if report.passed else EXIT_SUITE


COMMANDS = {"judge": cmd_judge, "select": cmd_select, "sweep": cmd_sweep, "verify": cmd_verify}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except ResourceError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_RESOURCE
    except (ParseError, ValidationError, LayoutError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INVALID
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INVALID
    except QhesError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
